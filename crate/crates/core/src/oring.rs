//! The truncated polynomial ring `O_n = k[x_1..x_n]/(x_1^p, .., x_n^p)`.
//!
//! Elements are dense coefficient vectors of length `p^n` over the monomial
//! basis `x^a`, `a` in `{0..p-1}^n`, stored at linear index
//! `sum a_i p^{i-1}` (the first variable varies fastest). The context
//! precomputes the digit table so multiplication never decodes indices.
//!
//! The parameter pair `(p, n) = (3, 1)` is rejected here: the derivation
//! algebra of that ring is too small for the machinery built on top.

use alloc::string::String;
use alloc::vec::Vec;

use crate::embed::GfEmbedding;
use crate::error::{Error, Result};
use crate::gf::{Gf, GfElt};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncRing {
    gf: Gf,
    n: usize,
    pn: usize,
    /// `digits[idx * n + i]` is the exponent of `x_{i+1}` in basis monomial `idx`.
    digits: Vec<u8>,
}

/// An element of `O_n`: dense coefficients over the monomial basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RingElt {
    coeffs: Vec<GfElt>,
}

impl RingElt {
    pub fn coeffs(&self) -> &[GfElt] {
        &self.coeffs
    }
}

impl TruncRing {
    pub fn new(gf: Gf, n: usize) -> Result<TruncRing> {
        if n == 0 {
            return Err(Error::IndexOutOfRange);
        }
        let p = gf.p();
        if p == 3 && n == 1 {
            return Err(Error::ExcludedParameters { p, n });
        }
        let mut pn: usize = 1;
        for _ in 0..n {
            pn = pn.checked_mul(p as usize).ok_or(Error::FieldTooLarge)?;
            if pn > 1 << 20 {
                return Err(Error::FieldTooLarge);
            }
        }
        let mut digits = alloc::vec![0u8; pn * n];
        for idx in 0..pn {
            let mut rest = idx;
            for i in 0..n {
                digits[idx * n + i] = (rest % p as usize) as u8;
                rest /= p as usize;
            }
        }
        Ok(TruncRing { gf, n, pn, digits })
    }

    pub fn gf(&self) -> &Gf {
        &self.gf
    }

    pub fn p(&self) -> u64 {
        self.gf.p()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension `p^n` of the ring as a vector space.
    pub fn dim(&self) -> usize {
        self.pn
    }

    /// Dimension `n * p^n` of the derivation algebra.
    pub fn der_dim(&self) -> usize {
        self.n * self.pn
    }

    #[inline]
    pub fn exponents(&self, idx: usize) -> &[u8] {
        &self.digits[idx * self.n..(idx + 1) * self.n]
    }

    /// Linear index of a monomial from its exponent tuple.
    pub fn monomial_index(&self, exps: &[u8]) -> usize {
        debug_assert_eq!(exps.len(), self.n);
        let p = self.p() as usize;
        let mut idx = 0usize;
        for i in (0..self.n).rev() {
            idx = idx * p + exps[i] as usize;
        }
        idx
    }

    /// Total degree of basis monomial `idx`.
    pub fn total_degree(&self, idx: usize) -> usize {
        self.exponents(idx).iter().map(|&a| a as usize).sum()
    }

    /// Index of the top monomial `x_1^{p-1} .. x_n^{p-1}`.
    pub fn top_index(&self) -> usize {
        self.pn - 1
    }

    pub fn check(&self, f: &RingElt) -> Result<()> {
        if f.coeffs.len() != self.pn {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn zero(&self) -> RingElt {
        RingElt {
            coeffs: alloc::vec![self.gf.zero(); self.pn],
        }
    }

    pub fn one(&self) -> RingElt {
        self.constant(self.gf.one())
    }

    pub fn constant(&self, c: GfElt) -> RingElt {
        let mut f = self.zero();
        f.coeffs[0] = c;
        f
    }

    /// The generator `x_i`, `1 <= i <= n`.
    pub fn var(&self, i: usize) -> RingElt {
        assert!(i >= 1 && i <= self.n);
        let mut exps = alloc::vec![0u8; self.n];
        exps[i - 1] = 1;
        self.monomial(&exps, self.gf.one())
    }

    pub fn monomial(&self, exps: &[u8], c: GfElt) -> RingElt {
        let mut f = self.zero();
        f.coeffs[self.monomial_index(exps)] = c;
        f
    }

    pub fn from_coeffs(&self, coeffs: Vec<GfElt>) -> Result<RingElt> {
        if coeffs.len() != self.pn {
            return Err(Error::ContextMismatch);
        }
        Ok(RingElt { coeffs })
    }

    pub fn coeff_mut<'a>(&self, f: &'a mut RingElt, idx: usize) -> &'a mut GfElt {
        &mut f.coeffs[idx]
    }

    pub fn add(&self, f: &RingElt, g: &RingElt) -> RingElt {
        let coeffs = f
            .coeffs
            .iter()
            .zip(&g.coeffs)
            .map(|(a, b)| self.gf.add(a, b))
            .collect();
        RingElt { coeffs }
    }

    pub fn sub(&self, f: &RingElt, g: &RingElt) -> RingElt {
        let coeffs = f
            .coeffs
            .iter()
            .zip(&g.coeffs)
            .map(|(a, b)| self.gf.sub(a, b))
            .collect();
        RingElt { coeffs }
    }

    pub fn neg(&self, f: &RingElt) -> RingElt {
        RingElt {
            coeffs: f.coeffs.iter().map(|a| self.gf.neg(a)).collect(),
        }
    }

    pub fn scale(&self, c: &GfElt, f: &RingElt) -> RingElt {
        RingElt {
            coeffs: f.coeffs.iter().map(|a| self.gf.mul(c, a)).collect(),
        }
    }

    pub fn is_zero(&self, f: &RingElt) -> bool {
        f.coeffs.iter().all(|a| self.gf.is_zero(a))
    }

    /// The unique scalar `f(0)` with `f - f(0)` in the maximal ideal.
    pub fn constant_term(&self, f: &RingElt) -> GfElt {
        f.coeffs[0].clone()
    }

    pub fn in_max_ideal(&self, f: &RingElt) -> bool {
        self.gf.is_zero(&f.coeffs[0])
    }

    /// Product with truncation by `x_i^p = 0`.
    pub fn mul(&self, f: &RingElt, g: &RingElt) -> RingElt {
        self.mul_impl(f, g).0
    }

    /// Checked product; errors on length mismatch.
    pub fn try_mul(&self, f: &RingElt, g: &RingElt) -> Result<RingElt> {
        self.check(f)?;
        self.check(g)?;
        Ok(self.mul(f, g))
    }

    /// Product plus a flag recording whether any nonzero term was dropped
    /// by the truncation `x_i^p = 0`.
    pub fn mul_tracked(&self, f: &RingElt, g: &RingElt) -> (RingElt, bool) {
        self.mul_impl(f, g)
    }

    fn mul_impl(&self, f: &RingElt, g: &RingElt) -> (RingElt, bool) {
        let p = self.p() as u8;
        let n = self.n;
        let mut out = self.zero();
        let mut truncated = false;
        for (i, a) in f.coeffs.iter().enumerate() {
            if self.gf.is_zero(a) {
                continue;
            }
            let di = &self.digits[i * n..(i + 1) * n];
            'pairs: for (j, b) in g.coeffs.iter().enumerate() {
                if self.gf.is_zero(b) {
                    continue;
                }
                let dj = &self.digits[j * n..(j + 1) * n];
                for k in 0..n {
                    if di[k] + dj[k] >= p {
                        truncated = true;
                        continue 'pairs;
                    }
                }
                // digit-wise sum has no carries, so the linear indices add
                let idx = i + j;
                out.coeffs[idx] = self.gf.add(&out.coeffs[idx], &self.gf.mul(a, b));
            }
        }
        (out, truncated)
    }

    pub fn pow(&self, f: &RingElt, e: u64) -> RingElt {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, f);
        }
        acc
    }

    /// Inverse of a unit via the geometric series in the nilpotent part;
    /// terminates because `m^{n(p-1)+1} = 0`.
    pub fn inv(&self, f: &RingElt) -> Result<RingElt> {
        let c = self.constant_term(f);
        if self.gf.is_zero(&c) {
            return Err(Error::NotAUnit);
        }
        let cinv = self.gf.inv(&c)?;
        let g = self.scale(&cinv, f);
        let u = self.sub(&g, &self.one()); // nilpotent
        let steps = self.n * (self.p() as usize - 1);
        let mut acc = self.one();
        for _ in 0..steps {
            // acc <- 1 - u * acc
            acc = self.sub(&self.one(), &self.mul(&u, &acc));
        }
        Ok(self.scale(&cinv, &acc))
    }

    /// Formal partial derivative with respect to `x_i`, `1 <= i <= n`.
    pub fn partial(&self, f: &RingElt, i: usize) -> RingElt {
        assert!(i >= 1 && i <= self.n);
        let stride = (self.p() as usize).pow((i - 1) as u32);
        let mut out = self.zero();
        for (idx, c) in f.coeffs.iter().enumerate() {
            if self.gf.is_zero(c) {
                continue;
            }
            let a = self.exponents(idx)[i - 1];
            if a == 0 {
                continue;
            }
            out.coeffs[idx - stride] = self
                .gf
                .add(&out.coeffs[idx - stride], &self.gf.scalar_mul(a as u64, c));
        }
        out
    }

    /// Determinant of the Jacobian matrix `(d f_i / d x_j)` over `O_n`,
    /// by division-free cofactor expansion.
    pub fn jacobian(&self, fs: &[RingElt]) -> Result<RingElt> {
        if fs.len() != self.n {
            return Err(Error::ContextMismatch);
        }
        let mut entries = Vec::with_capacity(self.n * self.n);
        for f in fs {
            self.check(f)?;
            for j in 1..=self.n {
                entries.push(self.partial(f, j));
            }
        }
        let all: Vec<usize> = (0..self.n).collect();
        Ok(self.det_ring(&entries, &all, &all))
    }

    fn det_ring(&self, entries: &[RingElt], rows: &[usize], cols: &[usize]) -> RingElt {
        if rows.len() == 1 {
            return entries[rows[0] * self.n + cols[0]].clone();
        }
        let mut acc = self.zero();
        for (k, &c) in cols.iter().enumerate() {
            let e = &entries[rows[0] * self.n + c];
            if self.is_zero(e) {
                continue;
            }
            let minor_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let sub = self.det_ring(entries, &rows[1..], &minor_cols);
            let term = self.mul(e, &sub);
            acc = if k % 2 == 0 {
                self.add(&acc, &term)
            } else {
                self.sub(&acc, &term)
            };
        }
        acc
    }

    /// Coefficient-wise image under a field embedding, into the matching
    /// ring over the larger field.
    pub fn embed_elt(&self, target: &TruncRing, emb: &GfEmbedding, f: &RingElt) -> Result<RingElt> {
        if target.n != self.n || target.p() != self.p() {
            return Err(Error::ContextMismatch);
        }
        self.check(f)?;
        Ok(RingElt {
            coeffs: f.coeffs.iter().map(|c| emb.map(c)).collect(),
        })
    }

    // ---- text forms ----

    /// Machine form: `poly(p,n):` then the dense coefficient list in index
    /// order, each coefficient as its digit string.
    pub fn serialize_elt(&self, f: &RingElt) -> String {
        let body: Vec<String> = f.coeffs.iter().map(|c| self.gf.format_digits(c)).collect();
        alloc::format!("poly({},{}):{}", self.p(), self.n, body.join(","))
    }

    pub fn parse_serialized(&self, s: &str) -> Result<RingElt> {
        let prefix = alloc::format!("poly({},{}):", self.p(), self.n);
        let rest = s.strip_prefix(prefix.as_str()).ok_or(Error::Syntax {
            offset: 0,
            expected: "poly(p,n): prefix",
        })?;
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != self.pn {
            return Err(Error::ContextMismatch);
        }
        let mut coeffs = Vec::with_capacity(self.pn);
        for part in parts {
            coeffs.push(self.gf.parse_digits(part)?);
        }
        Ok(RingElt { coeffs })
    }

    /// Human-readable polynomial text, e.g. `1 + 4*x1 + x1^2*x2`.
    pub fn format_elt(&self, f: &RingElt) -> String {
        let mut terms = Vec::new();
        for (idx, c) in f.coeffs.iter().enumerate() {
            if self.gf.is_zero(c) {
                continue;
            }
            let mut mono = String::new();
            for (i, &a) in self.exponents(idx).iter().enumerate() {
                if a == 0 {
                    continue;
                }
                if !mono.is_empty() {
                    mono.push('*');
                }
                mono.push_str(&alloc::format!("x{}", i + 1));
                if a > 1 {
                    mono.push_str(&alloc::format!("^{a}"));
                }
            }
            let coeff_str = if self.gf.m() == 1 {
                alloc::format!("{}", c.digits()[0])
            } else {
                alloc::format!("({})", self.gf.format_digits(c))
            };
            let term = if mono.is_empty() {
                coeff_str
            } else if self.gf.is_one(c) {
                mono
            } else {
                alloc::format!("{coeff_str}*{mono}")
            };
            terms.push(term);
        }
        if terms.is_empty() {
            String::from("0")
        } else {
            terms.join(" + ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring(p: u64, n: usize) -> TruncRing {
        TruncRing::new(Gf::new(p, 1).unwrap(), n).unwrap()
    }

    fn rand_elt(r: &TruncRing, rng: &mut ChaCha8Rng) -> RingElt {
        let coeffs = (0..r.dim())
            .map(|_| r.gf().elt_from_index(rng.gen_range(0..r.gf().size())))
            .collect();
        r.from_coeffs(coeffs).unwrap()
    }

    #[test]
    fn excluded_parameters() {
        let gf = Gf::new(3, 1).unwrap();
        assert_eq!(
            TruncRing::new(gf, 1).unwrap_err(),
            Error::ExcludedParameters { p: 3, n: 1 }
        );
        let gf = Gf::new(3, 1).unwrap();
        assert!(TruncRing::new(gf, 2).is_ok());
    }

    #[test]
    fn truncation_examples() {
        let r = ring(5, 1);
        let x3 = r.monomial(&[3], r.gf().one());
        assert!(r.is_zero(&r.mul(&x3, &x3)));

        let one_plus = r.add(&r.one(), &r.var(1));
        let one_minus = r.sub(&r.one(), &r.var(1));
        let prod = r.mul(&one_plus, &one_minus);
        let expect = r.sub(&r.one(), &r.monomial(&[2], r.gf().one()));
        assert_eq!(prod, expect);

        let r2 = ring(3, 2);
        let f = r2.monomial(&[2, 2], r2.gf().one());
        let g = r2.var(2);
        assert!(r2.is_zero(&r2.mul(&f, &g)));
        let (_, truncated) = r2.mul_tracked(&f, &g);
        assert!(truncated);
    }

    #[test]
    fn inverse_examples() {
        let r = ring(5, 1);
        let f = r.add(&r.one(), &r.var(1));
        let inv = r.inv(&f).unwrap();
        // geometric series: 1 + 4x + x^2 + 4x^3 + x^4
        let mut expect = r.zero();
        for (k, c) in [1u64, 4, 1, 4, 1].iter().enumerate() {
            expect = r.add(&expect, &r.monomial(&[k as u8], r.gf().from_u64(*c)));
        }
        assert_eq!(inv, expect);
        assert_eq!(r.mul(&f, &inv), r.one());

        let c = r.constant(r.gf().from_u64(3));
        assert_eq!(r.inv(&c).unwrap(), r.constant(r.gf().from_u64(2)));

        assert_eq!(r.inv(&r.var(1)).unwrap_err(), Error::NotAUnit);
    }

    #[test]
    fn partial_examples() {
        let r = ring(5, 2);
        // d/dx1 (x1^2 x2) = 2 x1 x2
        let f = r.monomial(&[2, 1], r.gf().one());
        assert_eq!(r.partial(&f, 1), r.monomial(&[1, 1], r.gf().from_u64(2)));
        // d/dx1 x1^4 = 4 x1^3
        let g = r.monomial(&[4, 0], r.gf().one());
        assert_eq!(r.partial(&g, 1), r.monomial(&[3, 0], r.gf().from_u64(4)));
        // d/dx2 x1^3 = 0
        let h = r.monomial(&[3, 0], r.gf().one());
        assert!(r.is_zero(&r.partial(&h, 2)));
    }

    #[test]
    fn jacobian_examples() {
        let r = ring(5, 2);
        let fs = alloc::vec![r.add(&r.var(1), &r.var(2)), r.var(2)];
        assert_eq!(r.jacobian(&fs).unwrap(), r.one());

        let swapped = alloc::vec![r.var(2), r.var(1)];
        assert_eq!(r.jacobian(&swapped).unwrap(), r.neg(&r.one()));

        let r1 = ring(5, 1);
        let sq = alloc::vec![r1.monomial(&[2], r1.gf().one())];
        let j = r1.jacobian(&sq).unwrap();
        assert_eq!(j, r1.monomial(&[1], r1.gf().from_u64(2)));
        assert!(r1.in_max_ideal(&j));
    }

    #[test]
    fn ring_axioms_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (p, n) in [(5u64, 1usize), (3, 2), (7, 1), (5, 2)] {
            let r = ring(p, n);
            for _ in 0..1000 {
                let f = rand_elt(&r, &mut rng);
                let g = rand_elt(&r, &mut rng);
                let h = rand_elt(&r, &mut rng);
                assert_eq!(r.mul(&f, &g), r.mul(&g, &f));
                assert_eq!(r.mul(&r.mul(&f, &g), &h), r.mul(&f, &r.mul(&g, &h)));
                assert_eq!(
                    r.mul(&f, &r.add(&g, &h)),
                    r.add(&r.mul(&f, &g), &r.mul(&f, &h))
                );
            }
        }
    }

    #[test]
    fn units_and_frobenius_collapse() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for (p, n) in [(5u64, 1usize), (3, 2)] {
            let r = ring(p, n);
            let mut units = 0;
            for _ in 0..500 {
                let f = rand_elt(&r, &mut rng);
                // unit iff f(0) != 0
                let is_unit = !r.gf().is_zero(&r.constant_term(&f));
                assert_eq!(r.inv(&f).is_ok(), is_unit);
                if is_unit {
                    units += 1;
                    assert_eq!(r.mul(&f, &r.inv(&f).unwrap()), r.one());
                }
                // f^p = f(0)^p
                let fp = r.pow(&f, p);
                let expect = r.constant(r.gf().pow(&r.constant_term(&f), p));
                assert_eq!(fp, expect);
            }
            assert!(units > 0);
        }
    }

    #[test]
    fn leibniz_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for (p, n) in [(5u64, 1usize), (3, 2)] {
            let r = ring(p, n);
            for _ in 0..200 {
                let f = rand_elt(&r, &mut rng);
                let g = rand_elt(&r, &mut rng);
                for i in 1..=n {
                    let lhs = r.partial(&r.mul(&f, &g), i);
                    let rhs = r.add(&r.mul(&f, &r.partial(&g, i)), &r.mul(&g, &r.partial(&f, i)));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn max_ideal_nilpotency_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for (p, n) in [(5u64, 1usize), (3, 2)] {
            let r = ring(p, n);
            let steps = n * (p as usize - 1) + 1;
            for _ in 0..100 {
                let mut prod = r.one();
                for _ in 0..steps {
                    let mut f = rand_elt(&r, &mut rng);
                    f.coeffs[0] = r.gf().zero(); // force into m
                    prod = r.mul(&prod, &f);
                }
                assert!(r.is_zero(&prod));
            }
            // the bound is sharp: x1^{p-1} * .. * xn^{p-1} uses n(p-1) factors
            let mut prod = r.one();
            for i in 1..=n {
                for _ in 0..p - 1 {
                    prod = r.mul(&prod, &r.var(i));
                }
            }
            assert!(!r.is_zero(&prod));
        }
    }

    #[test]
    fn serialization_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let r = ring(5, 1);
        let f = rand_elt(&r, &mut rng);
        let s = r.serialize_elt(&f);
        assert!(s.starts_with("poly(5,1):"));
        assert_eq!(r.parse_serialized(&s).unwrap(), f);

        let x = r.var(1);
        assert_eq!(r.serialize_elt(&x), "poly(5,1):0,1,0,0,0");
    }
}
