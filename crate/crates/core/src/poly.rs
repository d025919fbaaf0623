//! Univariate polynomials over `F_{p^m}`.
//!
//! Coefficients are stored ascending (constant term first) with trailing
//! zeros trimmed; the zero polynomial is the empty list. Division and gcd
//! normalize to monic remainders at every step. [`separable_part`] computes
//! the monic squarefree polynomial with the same root set, unwinding p-th
//! power factors by coefficient Frobenius roots (the base field is perfect).

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gf::{Gf, GfElt};

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    coeffs: Vec<GfElt>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(gf: &Gf, mut coeffs: Vec<GfElt>) -> Poly {
        while coeffs.last().map_or(false, |c| gf.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(gf: &Gf, c: GfElt) -> Poly {
        Poly::from_coeffs(gf, alloc::vec![c])
    }

    pub fn one(gf: &Gf) -> Poly {
        Poly::constant(gf, gf.one())
    }

    /// The monomial `t`.
    pub fn t(gf: &Gf) -> Poly {
        Poly {
            coeffs: alloc::vec![gf.zero(), gf.one()],
        }
    }

    pub fn coeffs(&self) -> &[GfElt] {
        &self.coeffs
    }

    pub fn coeff(&self, gf: &Gf, k: usize) -> GfElt {
        self.coeffs.get(k).cloned().unwrap_or_else(|| gf.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&GfElt> {
        self.coeffs.last()
    }

    pub fn add(&self, gf: &Gf, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(gf.add(&self.coeff(gf, i), &other.coeff(gf, i)));
        }
        Poly::from_coeffs(gf, out)
    }

    pub fn sub(&self, gf: &Gf, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(gf.sub(&self.coeff(gf, i), &other.coeff(gf, i)));
        }
        Poly::from_coeffs(gf, out)
    }

    pub fn neg(&self, gf: &Gf) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| gf.neg(c)).collect(),
        }
    }

    pub fn scale(&self, gf: &Gf, c: &GfElt) -> Poly {
        if gf.is_zero(c) {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|x| gf.mul(c, x)).collect(),
        }
    }

    pub fn mul(&self, gf: &Gf, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = alloc::vec![gf.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if gf.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = gf.add(&out[i + j], &gf.mul(a, b));
            }
        }
        Poly::from_coeffs(gf, out)
    }

    /// Quotient and remainder; the divisor must be nonzero.
    pub fn divrem(&self, gf: &Gf, divisor: &Poly) -> Result<(Poly, Poly)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = gf.inv(divisor.leading().unwrap())?;
        let mut rem = self.coeffs.clone();
        let mut quo = alloc::vec![gf.zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1;
            let c = gf.mul(&rem[k], &lead_inv);
            if !gf.is_zero(&c) {
                let shift = k - dd;
                for j in 0..=dd {
                    let s = gf.mul(&c, &divisor.coeffs[j]);
                    rem[shift + j] = gf.sub(&rem[shift + j], &s);
                }
                quo[shift] = c;
            }
            rem.pop();
            while rem.last().map_or(false, |c| gf.is_zero(c)) {
                rem.pop();
            }
        }
        Ok((Poly::from_coeffs(gf, quo), Poly::from_coeffs(gf, rem)))
    }

    pub fn rem(&self, gf: &Gf, divisor: &Poly) -> Result<Poly> {
        Ok(self.divrem(gf, divisor)?.1)
    }

    pub fn monic(&self, gf: &Gf) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) if gf.is_one(l) => self.clone(),
            Some(l) => {
                let inv = gf.inv(l).expect("nonzero leading coefficient");
                self.scale(gf, &inv)
            }
        }
    }

    /// Monic gcd via the Euclidean remainder sequence.
    pub fn gcd(&self, gf: &Gf, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(gf, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(gf)
    }

    pub fn lcm(&self, gf: &Gf, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let g = self.gcd(gf, other);
        let (q, r) = other.divrem(gf, &g).unwrap();
        debug_assert!(r.is_zero());
        self.mul(gf, &q).monic(gf)
    }

    pub fn derivative(&self, gf: &Gf) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let out = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| gf.scalar_mul((i + 1) as u64, c))
            .collect();
        Poly::from_coeffs(gf, out)
    }

    pub fn eval(&self, gf: &Gf, x: &GfElt) -> GfElt {
        let mut acc = gf.zero();
        for c in self.coeffs.iter().rev() {
            acc = gf.add(&gf.mul(&acc, x), c);
        }
        acc
    }

    /// `base^e mod modulus`.
    pub fn powmod(gf: &Gf, base: &Poly, mut e: u64, modulus: &Poly) -> Result<Poly> {
        let mut acc = Poly::one(gf).rem(gf, modulus)?;
        let mut b = base.rem(gf, modulus)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(gf, &b).rem(gf, modulus)?;
            }
            b = b.mul(gf, &b).rem(gf, modulus)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Extended Euclid: the inverse of `self` modulo `modulus`, if coprime.
    pub fn invmod(&self, gf: &Gf, modulus: &Poly) -> Result<Poly> {
        let mut r0 = modulus.clone();
        let mut r1 = self.rem(gf, modulus)?;
        let mut s0 = Poly::zero();
        let mut s1 = Poly::one(gf);
        while !r1.is_zero() {
            let (q, r) = r0.divrem(gf, &r1)?;
            let s = s0.sub(gf, &q.mul(gf, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.degree() != Some(0) {
            return Err(Error::DivisionByZero);
        }
        let c = gf.inv(&r0.coeffs[0])?;
        Ok(s0.scale(gf, &c).rem(gf, modulus)?)
    }

    /// Writes the exponents-divisible-by-p polynomial `f(t) = g(t^p)` as
    /// the p-th power `h(t)^p` and returns `h` (coefficient p-th roots).
    fn pth_root_decompose(&self, gf: &Gf) -> Poly {
        let p = gf.p() as usize;
        let mut out = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i % p == 0 {
                out.push(gf.pth_root(c));
            } else {
                debug_assert!(gf.is_zero(c));
            }
        }
        Poly::from_coeffs(gf, out)
    }

    pub fn format(&self, gf: &Gf) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| gf.format_digits(c)).collect();
        parts.join(",")
    }
}

/// Least `k` such that a separable monic `f` splits into linear factors
/// over `F_{q^k}`: the lcm of the distinct-degree layers of `f`.
pub fn splitting_degree(gf: &Gf, f: &Poly) -> usize {
    let deg0 = f.degree().expect("nonzero polynomial");
    let mut rem = f.monic(gf);
    if deg0 == 0 {
        return 1;
    }
    let q = gf.size();
    let t = Poly::t(gf);
    let mut tq = t.rem(gf, &rem).unwrap();
    let mut k = 1usize;
    for i in 1..=deg0 {
        if rem.degree() == Some(0) {
            break;
        }
        tq = Poly::powmod(gf, &tq, q, &rem).unwrap();
        let g = tq.sub(gf, &t).gcd(gf, &rem);
        if g.degree().map_or(false, |d| d > 0) {
            k = lcm_usize(k, i);
            let (qt, r) = rem.divrem(gf, &g).unwrap();
            debug_assert!(r.is_zero());
            rem = qt;
            if rem.degree() == Some(0) {
                break;
            }
            tq = tq.rem(gf, &rem).unwrap();
        }
    }
    debug_assert_eq!(rem.degree(), Some(0), "input must be separable");
    k
}

fn lcm_usize(a: usize, b: usize) -> usize {
    fn gcd(mut x: usize, mut y: usize) -> usize {
        while y != 0 {
            let t = x % y;
            x = y;
            y = t;
        }
        x
    }
    a / gcd(a, b) * b
}

/// The monic squarefree polynomial with the same root set as `f` over the
/// perfect field `F_{p^m}`.
pub fn separable_part(gf: &Gf, f: &Poly) -> Poly {
    let deg = f.degree().expect("nonzero polynomial");
    if deg == 0 {
        return Poly::one(gf);
    }
    let f = f.monic(gf);
    let fp = f.derivative(gf);
    if fp.is_zero() {
        return separable_part(gf, &f.pth_root_decompose(gf));
    }
    let d = f.gcd(gf, &fp);
    if d.degree() == Some(0) {
        return f;
    }
    // u carries each factor of multiplicity not divisible by p exactly once
    let (u, r) = f.divrem(gf, &d).unwrap();
    debug_assert!(r.is_zero());
    let rest = separable_part(gf, &d);
    let g = u.gcd(gf, &rest);
    let (dedup, r) = rest.divrem(gf, &g).unwrap();
    debug_assert!(r.is_zero());
    u.mul(gf, &dedup).monic(gf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(gf: &Gf, cs: &[u64]) -> Poly {
        Poly::from_coeffs(gf, cs.iter().map(|&c| gf.from_u64(c)).collect())
    }

    #[test]
    fn divrem_and_gcd() {
        let gf = Gf::new(5, 1).unwrap();
        let a = poly(&gf, &[1, 0, 1]).mul(&gf, &poly(&gf, &[2, 1])); // (t^2+1)(t+2)
        let (q, r) = a.divrem(&gf, &poly(&gf, &[2, 1])).unwrap();
        assert_eq!(q, poly(&gf, &[1, 0, 1]));
        assert!(r.is_zero());
        let g = a.gcd(&gf, &poly(&gf, &[2, 1]));
        assert_eq!(g, poly(&gf, &[2, 1]));
    }

    #[test]
    fn separable_part_examples() {
        // t^9 - t^3 = (t^3 - t)^3 over F_3
        let f3 = Gf::new(3, 1).unwrap();
        let mut cs = alloc::vec![0u64; 10];
        cs[9] = 1;
        cs[3] = 2;
        let f = poly(&f3, &cs);
        assert_eq!(separable_part(&f3, &f), poly(&f3, &[0, 2, 0, 1]));

        // t^2 + 3 over F_5 is already separable
        let f5 = Gf::new(5, 1).unwrap();
        let g = poly(&f5, &[3, 0, 1]);
        assert_eq!(separable_part(&f5, &g), g);

        // t^{p^n} -> t
        let mut cs = alloc::vec![0u64; 26];
        cs[25] = 1;
        assert_eq!(separable_part(&f5, &poly(&f5, &cs)), poly(&f5, &[0, 1]));
    }

    #[test]
    fn separable_part_properties() {
        // random products of linear and quadratic factors with repetition
        let gf = Gf::new(5, 1).unwrap();
        let atoms = [
            poly(&gf, &[1, 1]),
            poly(&gf, &[2, 1]),
            poly(&gf, &[0, 1]),
            poly(&gf, &[3, 0, 1]),
        ];
        let mut counter = 1u64;
        for _ in 0..200 {
            let mut f = Poly::one(&gf);
            for a in &atoms {
                counter = counter.wrapping_mul(6364136223846793005).wrapping_add(1);
                let mult = (counter >> 33) % 4;
                for _ in 0..mult {
                    f = f.mul(&gf, a);
                }
            }
            if f.degree() == Some(0) {
                continue;
            }
            let s = separable_part(&gf, &f);
            // s divides f
            let (_, r) = f.divrem(&gf, &s).unwrap();
            assert!(r.is_zero());
            // s is separable
            assert_eq!(s.gcd(&gf, &s.derivative(&gf)).degree(), Some(0));
            // same roots in F_5 (all atoms split or stay quadratic over F_5;
            // root sets over the base field must agree)
            for x in 0..5 {
                let x = gf.from_u64(x);
                assert_eq!(gf.is_zero(&f.eval(&gf, &x)), gf.is_zero(&s.eval(&gf, &x)));
            }
        }
    }

    #[test]
    fn separable_part_roots_in_extension() {
        // roots of f in a splitting extension coincide with roots of the
        // separable part; checked by exhaustive evaluation over F_{p^k}
        let f3 = Gf::new(3, 1).unwrap();
        let f9 = Gf::new(3, 2).unwrap();
        // f = (t^2 + 1)^3 * t over F_3; t^2 + 1 splits over F_9
        let f = poly(&f3, &[1, 0, 1])
            .mul(&f3, &poly(&f3, &[1, 0, 1]))
            .mul(&f3, &poly(&f3, &[1, 0, 1]))
            .mul(&f3, &poly(&f3, &[0, 1]));
        let s = separable_part(&f3, &f);
        // lift coefficients to F_9 (prime-field constants embed digit-wise)
        let lift = |g: &Poly| -> Poly {
            Poly::from_coeffs(
                &f9,
                g.coeffs()
                    .iter()
                    .map(|c| f9.from_u64(c.digits()[0]))
                    .collect(),
            )
        };
        let f_lift = lift(&f);
        let s_lift = lift(&s);
        for k in 0..9 {
            let x = f9.elt_from_index(k);
            assert_eq!(
                f9.is_zero(&f_lift.eval(&f9, &x)),
                f9.is_zero(&s_lift.eval(&f9, &x))
            );
        }
    }

    #[test]
    fn splitting_degrees() {
        let f5 = Gf::new(5, 1).unwrap();
        // t^2 + 3 is irreducible over F_5 (3 is a quadratic nonresidue)
        assert_eq!(splitting_degree(&f5, &poly(&f5, &[3, 0, 1])), 2);
        // t(t - 1) splits already
        assert_eq!(splitting_degree(&f5, &poly(&f5, &[0, 4, 1])), 1);
        // t^5 - t splits over the base field
        let mut cs = alloc::vec![0u64; 6];
        cs[5] = 1;
        cs[1] = 4;
        assert_eq!(splitting_degree(&f5, &poly(&f5, &cs)), 1);
        // irreducible cubic times irreducible quadratic -> lcm = 6
        let f3 = Gf::new(3, 1).unwrap();
        let cubic = poly(&f3, &[1, 2, 0, 1]); // t^3 + 2t + 1, no roots in F_3
        for x in 0..3 {
            assert!(!f3.is_zero(&cubic.eval(&f3, &f3.from_u64(x))));
        }
        let quad = poly(&f3, &[1, 0, 1]); // t^2 + 1
        let prod = cubic.mul(&f3, &quad);
        assert_eq!(splitting_degree(&f3, &prod), 6);
    }

    #[test]
    fn invmod_round_trip() {
        let gf = Gf::new(7, 1).unwrap();
        let modulus = poly(&gf, &[1, 1, 0, 1]); // t^3 + t + 1, coprime to t + 2
        let a = poly(&gf, &[2, 1]);
        let inv = a.invmod(&gf, &modulus).unwrap();
        let prod = a.mul(&gf, &inv).rem(&gf, &modulus).unwrap();
        assert_eq!(prod, Poly::one(&gf));
    }
}
