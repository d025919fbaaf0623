//! Automorphisms of `O_n` and their action on derivations.
//!
//! An automorphism is determined by the images `sigma(x_i)`, which must lie
//! in the maximal ideal and have a unit Jacobian. The inverse is computed
//! once at construction by the fixpoint iteration
//! `g <- A^{-1} (x - h(g))`, which stabilizes because the maximal ideal is
//! nilpotent. Conjugation of derivations is `sigma . D . sigma^{-1}`,
//! read off on the generators.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::GfElt;
use crate::linalg::Mat;
use crate::oring::{RingElt, TruncRing};
use crate::witt::Derivation;

#[derive(Clone, Debug)]
pub struct Automorphism {
    ring: TruncRing,
    images: Vec<RingElt>,
    inv_images: Vec<RingElt>,
    /// Linear part: `linear[i][j]` is the `x_{j+1}` coefficient of `images[i]`.
    linear: Mat,
    /// `pows[i][k] = images[i]^k` for `k < p`.
    pows: Vec<Vec<RingElt>>,
}

/// Substitutes `imgs` for the variables of `f`, given power tables
/// `pows[i][k] = imgs[i]^k`.
fn subst_with_pows(ring: &TruncRing, f: &RingElt, pows: &[Vec<RingElt>]) -> RingElt {
    let gf = ring.gf();
    let mut acc = ring.zero();
    for (idx, c) in f.coeffs().iter().enumerate() {
        if gf.is_zero(c) {
            continue;
        }
        let mut term = ring.constant(c.clone());
        for (i, &a) in ring.exponents(idx).iter().enumerate() {
            if a > 0 {
                term = ring.mul(&term, &pows[i][a as usize]);
            }
        }
        acc = ring.add(&acc, &term);
    }
    acc
}

fn power_tables(ring: &TruncRing, imgs: &[RingElt]) -> Vec<Vec<RingElt>> {
    let p = ring.p() as usize;
    imgs.iter()
        .map(|g| {
            let mut tab = Vec::with_capacity(p);
            tab.push(ring.one());
            for k in 1..p {
                let prev = &tab[k - 1];
                tab.push(ring.mul(prev, g));
            }
            tab
        })
        .collect()
}

impl Automorphism {
    /// Validates generator images and constructs the automorphism together
    /// with its inverse.
    pub fn new(ring: &TruncRing, images: Vec<RingElt>) -> Result<Automorphism> {
        if images.len() != ring.n() {
            return Err(Error::ContextMismatch);
        }
        for f in &images {
            ring.check(f)?;
            if !ring.in_max_ideal(f) {
                return Err(Error::ConstantTerm);
            }
        }
        let jac = ring.jacobian(&images)?;
        if ring.in_max_ideal(&jac) {
            return Err(Error::JacobianNotUnit);
        }
        let gf = ring.gf();
        let n = ring.n();
        let linear = Mat::from_fn(gf, n, n, |i, j| {
            let mut exps = alloc::vec![0u8; n];
            exps[j] = 1;
            images[i].coeffs()[ring.monomial_index(&exps)].clone()
        });
        let lin_inv = linear
            .inverse(gf)
            .expect("unit Jacobian forces an invertible linear part");

        // higher-order parts h_i = images_i - linear_i
        let higher: Vec<RingElt> = (0..n)
            .map(|i| {
                let mut lin = ring.zero();
                for j in 0..n {
                    lin = ring.add(&lin, &ring.scale(linear.get(i, j), &ring.var(j + 1)));
                }
                ring.sub(&images[i], &lin)
            })
            .collect();

        // fixpoint iteration for the inverse images
        let xs: Vec<RingElt> = (1..=n).map(|i| ring.var(i)).collect();
        let apply_lin_inv = |v: &[RingElt]| -> Vec<RingElt> {
            (0..n)
                .map(|j| {
                    let mut acc = ring.zero();
                    for i in 0..n {
                        acc = ring.add(&acc, &ring.scale(lin_inv.get(j, i), &v[i]));
                    }
                    acc
                })
                .collect()
        };
        let mut g = apply_lin_inv(&xs);
        let rounds = n * (ring.p() as usize - 1) + 1;
        for _ in 0..rounds {
            let gp = power_tables(ring, &g);
            let rhs: Vec<RingElt> = (0..n)
                .map(|i| ring.sub(&xs[i], &subst_with_pows(ring, &higher[i], &gp)))
                .collect();
            let next = apply_lin_inv(&rhs);
            if next == g {
                break;
            }
            g = next;
        }

        let pows = power_tables(ring, &images);
        let aut = Automorphism {
            ring: ring.clone(),
            images,
            inv_images: g,
            linear,
            pows,
        };
        debug_assert!(aut.round_trips());
        Ok(aut)
    }

    fn round_trips(&self) -> bool {
        let r = &self.ring;
        let inv_pows = power_tables(r, &self.inv_images);
        (0..r.n()).all(|i| {
            subst_with_pows(r, &self.images[i], &inv_pows) == r.var(i + 1)
                && self.apply(&self.inv_images[i]) == r.var(i + 1)
        })
    }

    pub fn identity(ring: &TruncRing) -> Automorphism {
        let images = (1..=ring.n()).map(|i| ring.var(i)).collect();
        Automorphism::new(ring, images).expect("identity is an automorphism")
    }

    /// The scaling automorphism `x_i -> t x_i` for a nonzero scalar.
    pub fn scaling(ring: &TruncRing, t: &GfElt) -> Result<Automorphism> {
        if ring.gf().is_zero(t) {
            return Err(Error::JacobianNotUnit);
        }
        let images = (1..=ring.n())
            .map(|i| ring.scale(t, &ring.var(i)))
            .collect();
        Automorphism::new(ring, images)
    }

    /// Uniform sample: invertible linear part by rejection, higher-degree
    /// coefficients independent uniform.
    pub fn random<R: Rng>(ring: &TruncRing, rng: &mut R) -> Automorphism {
        let gf = ring.gf();
        let n = ring.n();
        let q = gf.size();
        loop {
            let mut images = Vec::with_capacity(n);
            for _ in 0..n {
                let coeffs: Vec<GfElt> = (0..ring.dim())
                    .map(|idx| {
                        if ring.total_degree(idx) == 0 {
                            gf.zero()
                        } else {
                            gf.elt_from_index(rng.gen_range(0..q))
                        }
                    })
                    .collect();
                images.push(ring.from_coeffs(coeffs).unwrap());
            }
            match Automorphism::new(ring, images) {
                Ok(a) => return a,
                Err(Error::JacobianNotUnit) => continue,
                Err(e) => unreachable!("construction guarantees images in m: {e:?}"),
            }
        }
    }

    pub fn ring(&self) -> &TruncRing {
        &self.ring
    }

    pub fn images(&self) -> &[RingElt] {
        &self.images
    }

    pub fn linear_part(&self) -> &Mat {
        &self.linear
    }

    pub fn det_linear(&self) -> GfElt {
        self.linear.det(self.ring.gf())
    }

    /// Substitution action on ring elements.
    pub fn apply(&self, f: &RingElt) -> RingElt {
        subst_with_pows(&self.ring, f, &self.pows)
    }

    pub fn try_apply(&self, f: &RingElt) -> Result<RingElt> {
        self.ring.check(f)?;
        Ok(self.apply(f))
    }

    pub fn invert(&self) -> Automorphism {
        let linear = self
            .linear
            .inverse(self.ring.gf())
            .expect("linear part invertible");
        Automorphism {
            ring: self.ring.clone(),
            images: self.inv_images.clone(),
            inv_images: self.images.clone(),
            pows: power_tables(&self.ring, &self.inv_images),
            linear,
        }
    }

    /// `sigma . tau` (apply `tau` first).
    pub fn compose(&self, tau: &Automorphism) -> Result<Automorphism> {
        if self.ring != tau.ring {
            return Err(Error::ContextMismatch);
        }
        let images = tau.images.iter().map(|f| self.apply(f)).collect();
        Automorphism::new(&self.ring, images)
    }

    /// Conjugated derivation `sigma(D) = sigma . D . sigma^{-1}`.
    pub fn act_der(&self, d: &Derivation) -> Derivation {
        let r = &self.ring;
        let images = (0..r.n())
            .map(|i| self.apply(&d.apply(r, &self.inv_images[i])))
            .collect();
        Derivation::from_images(r, images).expect("image count matches")
    }

    /// Assignment text `x1 -> ...; x2 -> ...`.
    pub fn format(&self) -> String {
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(i, f)| alloc::format!("x{} -> {}", i + 1, self.ring.format_elt(f)))
            .collect();
        parts.join("; ")
    }
}
