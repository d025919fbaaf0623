//! Division-free characteristic polynomials.
//!
//! The Samuelson–Berkowitz vector recurrence computes `det(tI - M)` using
//! ring operations only, so it works over the dual numbers `F_q[e]/(e^2)`
//! (which have zero divisors) as well as over the field itself.

use alloc::vec::Vec;

use crate::gf::{DualElt, DualRing, Gf, GfElt};

/// Minimal commutative-ring interface consumed by the charpoly kernel.
pub trait RingOps {
    type Elt: Clone + PartialEq;

    fn zero(&self) -> Self::Elt;
    fn one(&self) -> Self::Elt;
    fn add(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn sub(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn mul(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn neg(&self, a: &Self::Elt) -> Self::Elt;
    fn is_zero(&self, a: &Self::Elt) -> bool;
}

impl RingOps for Gf {
    type Elt = GfElt;

    fn zero(&self) -> GfElt {
        Gf::zero(self)
    }
    fn one(&self) -> GfElt {
        Gf::one(self)
    }
    fn add(&self, a: &GfElt, b: &GfElt) -> GfElt {
        Gf::add(self, a, b)
    }
    fn sub(&self, a: &GfElt, b: &GfElt) -> GfElt {
        Gf::sub(self, a, b)
    }
    fn mul(&self, a: &GfElt, b: &GfElt) -> GfElt {
        Gf::mul(self, a, b)
    }
    fn neg(&self, a: &GfElt) -> GfElt {
        Gf::neg(self, a)
    }
    fn is_zero(&self, a: &GfElt) -> bool {
        Gf::is_zero(self, a)
    }
}

impl<'a> RingOps for DualRing<'a> {
    type Elt = DualElt;

    fn zero(&self) -> DualElt {
        DualElt {
            a: self.0.zero(),
            b: self.0.zero(),
        }
    }
    fn one(&self) -> DualElt {
        DualElt {
            a: self.0.one(),
            b: self.0.zero(),
        }
    }
    fn add(&self, x: &DualElt, y: &DualElt) -> DualElt {
        DualElt {
            a: self.0.add(&x.a, &y.a),
            b: self.0.add(&x.b, &y.b),
        }
    }
    fn sub(&self, x: &DualElt, y: &DualElt) -> DualElt {
        DualElt {
            a: self.0.sub(&x.a, &y.a),
            b: self.0.sub(&x.b, &y.b),
        }
    }
    fn mul(&self, x: &DualElt, y: &DualElt) -> DualElt {
        // (a + eb)(c + ed) = ac + e(ad + bc)
        DualElt {
            a: self.0.mul(&x.a, &y.a),
            b: self.0.add(&self.0.mul(&x.a, &y.b), &self.0.mul(&x.b, &y.a)),
        }
    }
    fn neg(&self, x: &DualElt) -> DualElt {
        DualElt {
            a: self.0.neg(&x.a),
            b: self.0.neg(&x.b),
        }
    }
    fn is_zero(&self, x: &DualElt) -> bool {
        self.0.is_zero(&x.a) && self.0.is_zero(&x.b)
    }
}

/// Coefficients of `det(tI - M)`, ascending (constant term first), length
/// `d + 1`, leading coefficient one. `mat` is row-major of size `d * d`.
pub fn charpoly<R: RingOps>(ring: &R, mat: &[R::Elt], d: usize) -> Vec<R::Elt> {
    assert!(d >= 1, "matrix dimension must be at least 1");
    assert_eq!(mat.len(), d * d);
    let at = |i: usize, j: usize| &mat[i * d + j];

    // descending coefficients of charpoly of the leading 1x1 block: t - a00
    let mut c = alloc::vec![ring.one(), ring.neg(at(0, 0))];
    for k in 1..d {
        // s_j = row . M^j . col over the leading k x k block
        let mut v: Vec<R::Elt> = (0..k).map(|i| at(i, k).clone()).collect();
        let mut s = Vec::with_capacity(k);
        for j in 0..k {
            let mut dot = ring.zero();
            for i in 0..k {
                dot = ring.add(&dot, &ring.mul(at(k, i), &v[i]));
            }
            s.push(dot);
            if j + 1 < k {
                let mut w = Vec::with_capacity(k);
                for i in 0..k {
                    let mut acc = ring.zero();
                    for l in 0..k {
                        acc = ring.add(&acc, &ring.mul(at(i, l), &v[l]));
                    }
                    w.push(acc);
                }
                v = w;
            }
        }
        // first column of the Toeplitz factor: [1, -a_kk, -s_0, .., -s_{k-1}]
        let mut col = Vec::with_capacity(k + 2);
        col.push(ring.one());
        col.push(ring.neg(at(k, k)));
        for sj in &s {
            col.push(ring.neg(sj));
        }
        // c_new[i] = sum_j col[i - j] * c[j]
        let mut next = Vec::with_capacity(c.len() + 1);
        for i in 0..c.len() + 1 {
            let mut acc = ring.zero();
            for (j, cj) in c.iter().enumerate() {
                if i >= j && i - j < col.len() {
                    acc = ring.add(&acc, &ring.mul(&col[i - j], cj));
                }
            }
            next.push(acc);
        }
        c = next;
    }
    c.reverse();
    c
}
