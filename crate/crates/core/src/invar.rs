//! The invariants `psi_0..psi_{n-1}` and the semiinvariants `delta`,
//! `delta_0..delta_n`.
//!
//! The characteristic polynomial of a derivation is supported on the
//! p-power degrees `p^0..p^{n-1}` plus the leading `p^n`; [`psi`] enforces
//! that shape as a hard assertion and returns the coefficients.
//! `delta` applies the derivation `p^n - 1` times to the top monomial and
//! takes the constant term. `delta_0` is the coefficient of
//! `d_1 ^ .. ^ d_n` in the wedge `D ^ D^p ^ .. ^ D^{p^{n-1}}`; since every
//! graded component of a derivation has degree at least `-1`, the only way
//! `n` components can sum to degree `-n` is for all of them to have degree
//! exactly `-1`, so that coefficient collapses to the determinant of the
//! constant-term vectors of the p-power iterates — an `n x n` determinant
//! instead of anything built on the exterior power of an `n p^n`
//! dimensional space. `delta_i` replaces row `i` by the degree-(-1)
//! component of `D^{p^n}`. Directional derivatives of the `psi_i` are read
//! off a single characteristic polynomial over the dual numbers.

use alloc::string::String;
use alloc::vec::Vec;

use crate::charpoly::charpoly;
use crate::error::{Error, Result};
use crate::gf::{DualElt, DualRing, Gf, GfElt};
use crate::linalg::Mat;
use crate::oring::TruncRing;
use crate::witt::Derivation;

/// The invariant vector `(psi_0, .., psi_{n-1})`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PsiVector {
    values: Vec<GfElt>,
}

impl PsiVector {
    pub fn new(values: Vec<GfElt>) -> PsiVector {
        PsiVector { values }
    }

    pub fn zero(ring: &TruncRing) -> PsiVector {
        PsiVector {
            values: alloc::vec![ring.gf().zero(); ring.n()],
        }
    }

    pub fn values(&self) -> &[GfElt] {
        &self.values
    }

    pub fn is_zero(&self, gf: &Gf) -> bool {
        self.values.iter().all(|v| gf.is_zero(v))
    }

    /// Least `i` with `psi_i != 0`; `n` when all vanish (nilpotent case).
    pub fn r_index(&self, gf: &Gf) -> usize {
        self.values
            .iter()
            .position(|v| !gf.is_zero(v))
            .unwrap_or(self.values.len())
    }

    pub fn format(&self, gf: &Gf) -> String {
        let parts: Vec<String> = self.values.iter().map(|v| gf.format_digits(v)).collect();
        alloc::format!("[{}]", parts.join(","))
    }
}

/// `delta` together with the wedge minors `delta_0..delta_n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DeltaVector {
    pub delta: GfElt,
    /// `minors[i]` is `delta_i` for `0 <= i <= n`.
    pub minors: Vec<GfElt>,
}

/// Indices `p^0, .., p^n` into the coefficient list of a characteristic
/// polynomial of dimension `p^n`.
fn power_support(ring: &TruncRing) -> Vec<usize> {
    let p = ring.p() as usize;
    let mut out = Vec::with_capacity(ring.n() + 1);
    let mut v = 1usize;
    for _ in 0..=ring.n() {
        out.push(v);
        v *= p;
    }
    out
}

fn extract_psi(ring: &TruncRing, coeffs: &[GfElt]) -> Result<Vec<GfElt>> {
    let gf = ring.gf();
    let support = power_support(ring);
    if coeffs.len() != ring.dim() + 1 || !gf.is_one(&coeffs[ring.dim()]) {
        return Err(Error::ShapeViolation);
    }
    for (k, c) in coeffs.iter().enumerate() {
        if k != ring.dim() && !support[..ring.n()].contains(&k) && !gf.is_zero(c) {
            return Err(Error::ShapeViolation);
        }
    }
    Ok(support[..ring.n()]
        .iter()
        .map(|&k| coeffs[k].clone())
        .collect())
}

/// Full characteristic polynomial coefficients of the matrix of `D`.
pub fn char_coeffs(ring: &TruncRing, d: &Derivation) -> Vec<GfElt> {
    let m = d.matrix(ring);
    charpoly(ring.gf(), m.data(), ring.dim())
}

/// The invariant vector of `D`, with the p-power support shape asserted.
pub fn psi(ring: &TruncRing, d: &Derivation) -> Result<PsiVector> {
    let coeffs = char_coeffs(ring, d);
    Ok(PsiVector {
        values: extract_psi(ring, &coeffs)?,
    })
}

/// `delta(D) = (D^{p^n - 1}(x^{p-1}))(0)`.
pub fn delta(ring: &TruncRing, d: &Derivation) -> GfElt {
    let gf = ring.gf();
    let m = d.matrix(ring);
    let mut w = alloc::vec![gf.zero(); ring.dim()];
    w[ring.top_index()] = gf.one();
    for _ in 0..ring.dim() - 1 {
        w = m.matvec(gf, &w);
    }
    w[0].clone()
}

/// `(-1)^n` in the field.
pub fn sign_n(gf: &Gf, n: usize) -> GfElt {
    if n % 2 == 0 {
        gf.one()
    } else {
        gf.neg(&gf.one())
    }
}

/// All of `delta, delta_0..delta_n`, with the cross identities
/// `delta_0^{p-1} = (-1)^n delta` and `delta_i = -psi_{i-1} delta_0`
/// asserted before returning.
pub fn delta_minors(ring: &TruncRing, d: &Derivation) -> Result<DeltaVector> {
    let gf = ring.gf();
    let n = ring.n();
    // degree-(-1) components of D^{p^0}, .., D^{p^{n-1}}, D^{p^n}
    let mut rows: Vec<Vec<GfElt>> = Vec::with_capacity(n + 1);
    let mut m = d.matrix(ring);
    let mut cur = d.clone();
    for k in 0..=n {
        rows.push(cur.degree_minus_one(ring));
        if k < n {
            m = m.pow(gf, ring.p());
            cur = Derivation::from_matrix(ring, &m);
        }
    }
    let base = Mat::from_rows(rows[..n].to_vec());
    let delta0 = base.det(gf);
    let mut minors = alloc::vec![delta0.clone()];
    for i in 1..=n {
        let mut rep = rows[..n].to_vec();
        rep[i - 1] = rows[n].clone();
        minors.push(Mat::from_rows(rep).det(gf));
    }
    let delta_val = delta(ring, d);

    // delta_0^{p-1} = (-1)^n delta
    let lhs = gf.pow(&delta0, ring.p() - 1);
    let rhs = gf.mul(&sign_n(gf, n), &delta_val);
    if lhs != rhs {
        return Err(Error::Defect(String::from("delta_0^{p-1} != (-1)^n delta")));
    }
    // delta_i = -psi_{i-1} delta_0
    let psi_vec = psi(ring, d)?;
    for i in 1..=n {
        let expect = gf.neg(&gf.mul(&psi_vec.values()[i - 1], &delta0));
        if minors[i] != expect {
            return Err(Error::Defect(String::from("delta_i != -psi_{i-1} delta_0")));
        }
    }
    Ok(DeltaVector {
        delta: delta_val,
        minors,
    })
}

/// Directional derivatives `(d psi_i)_D(y)` for all `i`, via one
/// characteristic polynomial over the dual numbers.
pub fn dpsi_at(ring: &TruncRing, d: &Derivation, y: &Derivation) -> Result<Vec<GfElt>> {
    let gf = ring.gf();
    let dual = DualRing(gf);
    let md = d.matrix(ring);
    let my = y.matrix(ring);
    let dim = ring.dim();
    let entries: Vec<DualElt> = md
        .data()
        .iter()
        .zip(my.data())
        .map(|(a, b)| DualElt {
            a: a.clone(),
            b: b.clone(),
        })
        .collect();
    let coeffs = charpoly(&dual, &entries, dim);
    // constant parts must satisfy the shape; infinitesimal parts must be
    // supported on the same degrees (the off-support coefficients vanish
    // identically, so their derivatives vanish too)
    let a_parts: Vec<GfElt> = coeffs.iter().map(|c| c.a.clone()).collect();
    extract_psi(ring, &a_parts)?;
    let support = power_support(ring);
    for (k, c) in coeffs.iter().enumerate() {
        if !support[..ring.n()].contains(&k) && !gf.is_zero(&c.b) {
            return Err(Error::ShapeViolation);
        }
    }
    Ok(support[..ring.n()]
        .iter()
        .map(|&k| coeffs[k].b.clone())
        .collect())
}

/// Gradient matrix of the `psi_i` at `D`: `n` rows, one column per
/// coordinate direction of the derivation algebra.
pub fn dpsi_gradient(ring: &TruncRing, d: &Derivation) -> Result<Mat> {
    let gf = ring.gf();
    let dim = ring.der_dim();
    let mut cols = Vec::with_capacity(dim);
    for k in 0..dim {
        let dir = Derivation::basis_elt(ring, k);
        cols.push(dpsi_at(ring, d, &dir)?);
    }
    Ok(Mat::from_cols(gf, &cols))
}

/// Moore determinants `phi_0..phi_n` of the parameter vector `xi`.
pub fn dickson_phi(gf: &Gf, n: usize, xi: &[GfElt]) -> Vec<GfElt> {
    assert_eq!(xi.len(), n);
    // row k of the base matrix holds xi_j^{p^k}
    let mut rows: Vec<Vec<GfElt>> = Vec::with_capacity(n + 1);
    let mut cur: Vec<GfElt> = xi.to_vec();
    for _ in 0..=n {
        rows.push(cur.clone());
        cur = cur.iter().map(|x| gf.pow(x, gf.p())).collect();
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(Mat::from_rows(rows[..n].to_vec()).det(gf));
    for i in 1..=n {
        let mut rep = rows[..n].to_vec();
        rep[i - 1] = rows[n].clone();
        out.push(Mat::from_rows(rep).det(gf));
    }
    out
}

/// Moore determinants plus the ratios `psibar_{i-1} = -phi_i / phi_0`;
/// errors when the denominator vanishes.
pub fn dickson_restrict(gf: &Gf, n: usize, xi: &[GfElt]) -> Result<(Vec<GfElt>, Vec<GfElt>)> {
    let phi = dickson_phi(gf, n, xi);
    if gf.is_zero(&phi[0]) {
        return Err(Error::DicksonDenominatorZero);
    }
    let inv = gf.inv(&phi[0])?;
    let psibar = (1..=n).map(|i| gf.neg(&gf.mul(&phi[i], &inv))).collect();
    Ok((phi, psibar))
}

/// `sum xi_i (1 + x_i) d_i`, the standard parameterization of the torus
/// spanned by the `(1 + x_i) d_i`.
pub fn t0_derivation(ring: &TruncRing, xi: &[GfElt]) -> Derivation {
    assert_eq!(xi.len(), ring.n());
    let mut d = Derivation::zero(ring);
    for i in 1..=ring.n() {
        let f = ring.scale(&xi[i - 1], &ring.add(&ring.one(), &ring.var(i)));
        d.set_image(i, f);
    }
    d
}

/// The witness family `(1 + l_1 x_1^{p-1}) d_1 + x_1^{p-1} (1 + l_2 x_2^{p-1}) d_2 + ..`
/// whose `delta` value is `(-1)^n` for every parameter vector.
pub fn d_lambda(ring: &TruncRing, lambda: &[GfElt]) -> Derivation {
    assert_eq!(lambda.len(), ring.n());
    let p = ring.p() as u8;
    let mut d = Derivation::zero(ring);
    let mut prefix = ring.one(); // x_1^{p-1} .. x_{i-1}^{p-1}
    for i in 1..=ring.n() {
        let mut exps = alloc::vec![0u8; ring.n()];
        exps[i - 1] = p - 1;
        let top_i = ring.monomial(&exps, ring.gf().one());
        let unit = ring.add(&ring.one(), &ring.scale(&lambda[i - 1], &top_i));
        d.set_image(i, ring.mul(&prefix, &unit));
        prefix = ring.mul(&prefix, &top_i);
    }
    d
}

/// Membership of `D` in the fibre over `eta`; for `eta = 0` the answer is
/// cross-checked against nilpotency of `D`.
pub fn fibre_test(ring: &TruncRing, d: &Derivation, eta: &PsiVector) -> Result<bool> {
    let gf = ring.gf();
    let ps = psi(ring, d)?;
    let member = ps.values() == eta.values();
    if eta.is_zero(gf) {
        let nilp = d.is_nilpotent(ring);
        if nilp != member {
            return Err(Error::Defect(String::from(
                "nilpotency disagrees with vanishing of all psi_i",
            )));
        }
    }
    Ok(member)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autgrp::Automorphism;
    use crate::gf::Gf;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring(p: u64, n: usize) -> TruncRing {
        TruncRing::new(Gf::new(p, 1).unwrap(), n).unwrap()
    }

    fn rand_der(r: &TruncRing, rng: &mut ChaCha8Rng) -> Derivation {
        let coeffs = (0..r.n())
            .map(|_| {
                let v = (0..r.dim())
                    .map(|_| r.gf().elt_from_index(rng.gen_range(0..r.gf().size())))
                    .collect();
                r.from_coeffs(v).unwrap()
            })
            .collect();
        Derivation::from_images(r, coeffs).unwrap()
    }

    fn euler(r: &TruncRing, i: usize) -> Derivation {
        let mut d = Derivation::zero(r);
        d.set_image(i, r.var(i));
        d
    }

    fn one_plus_x_d(r: &TruncRing) -> Derivation {
        let mut d = Derivation::zero(r);
        d.set_image(1, r.add(&r.one(), &r.var(1)));
        d
    }

    #[test]
    fn psi_examples() {
        let r = ring(5, 1);
        let d1 = Derivation::partial(&r, 1);
        assert!(psi(&r, &d1).unwrap().is_zero(r.gf()));

        // x d: eigenvalues 0..4, charpoly t^5 - t, psi_0 = -1 = 4
        let e = euler(&r, 1);
        assert_eq!(psi(&r, &e).unwrap().values(), &[r.gf().from_u64(4)]);
    }

    #[test]
    fn psi_homogeneity() {
        // deg psi_0 = p^n - 1 = 4 at (5,1): psi_0(cD) = c^4 psi_0(D)
        let r = ring(5, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..20 {
            let d = rand_der(&r, &mut rng);
            let base = psi(&r, &d).unwrap().values()[0].clone();
            for c in 0..5u64 {
                let ce = r.gf().from_u64(c);
                let scaled = psi(&r, &d.scale(&r, &ce)).unwrap().values()[0].clone();
                assert_eq!(scaled, r.gf().mul(&r.gf().pow(&ce, 4), &base));
            }
        }
    }

    #[test]
    fn shape_holds_on_random_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for (p, n) in [(5u64, 1usize), (3, 2), (5, 2)] {
            let r = ring(p, n);
            for _ in 0..200 {
                let d = rand_der(&r, &mut rng);
                psi(&r, &d).unwrap();
            }
        }
    }

    /// Direct iteration oracle for delta, avoiding the matrix path.
    fn delta_oracle(r: &TruncRing, d: &Derivation) -> GfElt {
        let p = r.p() as u8;
        let exps = alloc::vec![p - 1; r.n()];
        let mut f = r.monomial(&exps, r.gf().one());
        for _ in 0..r.dim() - 1 {
            f = d.apply(r, &f);
        }
        r.constant_term(&f)
    }

    #[test]
    fn delta_examples() {
        let r = ring(5, 1);
        let d1 = Derivation::partial(&r, 1);
        assert_eq!(delta(&r, &d1), r.gf().from_u64(4));
        assert_eq!(delta_oracle(&r, &d1), r.gf().from_u64(4));

        let e = euler(&r, 1);
        assert!(r.gf().is_zero(&delta(&r, &e)));

        let d = one_plus_x_d(&r);
        assert_eq!(delta(&r, &d), r.gf().from_u64(4));
        assert_eq!(delta_oracle(&r, &d), r.gf().from_u64(4));

        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for _ in 0..50 {
            let d = rand_der(&r, &mut rng);
            assert_eq!(delta(&r, &d), delta_oracle(&r, &d));
        }
    }

    #[test]
    fn delta_minor_examples() {
        let r = ring(5, 1);
        let gf = r.gf();
        let d1 = Derivation::partial(&r, 1);
        let dv = delta_minors(&r, &d1).unwrap();
        assert!(gf.is_one(&dv.minors[0]));
        // delta_0^{p-1} = 1 = (-1) * delta = (-1) * 4 over F_5
        assert_eq!(gf.pow(&dv.minors[0], 4), gf.mul(&sign_n(gf, 1), &dv.delta));

        let e = euler(&r, 1);
        let dv = delta_minors(&r, &e).unwrap();
        assert!(gf.is_zero(&dv.minors[0]));

        let d = one_plus_x_d(&r);
        let dv = delta_minors(&r, &d).unwrap();
        assert!(gf.is_one(&dv.minors[0]));
        assert!(gf.is_one(&dv.minors[1])); // delta_1 = -psi_0 delta_0 = -4 = 1
    }

    #[test]
    fn delta_identities_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        for (p, n) in [(5u64, 1usize), (3, 2)] {
            let r = ring(p, n);
            for _ in 0..100 {
                let d = rand_der(&r, &mut rng);
                // delta_minors returns Err(Defect) if an identity fails
                delta_minors(&r, &d).unwrap();
            }
        }
    }

    #[test]
    fn dpsi_examples() {
        let r = ring(5, 1);
        let gf = r.gf();
        // Euler identity at x d: directional derivative along itself is
        // deg(psi_0) * psi_0 = 4 * 4 = 1
        let e = euler(&r, 1);
        let g = dpsi_at(&r, &e, &e).unwrap();
        assert_eq!(g[0], gf.from_u64(1));

        // all coordinate directions vanish at the non-regular x^2 d
        let mut x2d = Derivation::zero(&r);
        x2d.set_image(1, r.monomial(&[2], gf.one()));
        for k in 0..r.der_dim() {
            let dir = Derivation::basis_elt(&r, k);
            let g = dpsi_at(&r, &x2d, &dir).unwrap();
            assert!(g.iter().all(|v| gf.is_zero(v)));
        }

        // linearity in the direction
        let mut rng = ChaCha8Rng::seed_from_u64(65);
        for _ in 0..20 {
            let d = rand_der(&r, &mut rng);
            let y = rand_der(&r, &mut rng);
            let z = rand_der(&r, &mut rng);
            let both = dpsi_at(&r, &d, &y.add(&r, &z)).unwrap();
            let gy = dpsi_at(&r, &d, &y).unwrap();
            let gz = dpsi_at(&r, &d, &z).unwrap();
            for i in 0..r.n() {
                assert_eq!(both[i], gf.add(&gy[i], &gz[i]));
            }
        }
    }

    #[test]
    fn dpsi_differential_identity() {
        // (ad D)^{p^n - 1}(y) + sum_i psi_i(D) (ad D)^{p^i - 1}(y)
        //   = - sum_i dpsi_i|_D(y) D^{p^i}
        let mut rng = ChaCha8Rng::seed_from_u64(66);
        for (p, n) in [(5u64, 1usize), (3, 2)] {
            let r = ring(p, n);
            let gf = r.gf();
            for _ in 0..15 {
                let d = rand_der(&r, &mut rng);
                let y = rand_der(&r, &mut rng);
                let ps = psi(&r, &d).unwrap();
                let ad = d.ad_matrix(&r);
                let yv = y.to_vec(&r);
                let pn = r.dim() as u64;
                let mut lhs = ad.pow(gf, pn - 1).matvec(gf, &yv);
                let mut pk = 1u64;
                for i in 0..n {
                    let term = ad.pow(gf, pk - 1).matvec(gf, &yv);
                    for (t, v) in term.iter().enumerate() {
                        lhs[t] = gf.add(&lhs[t], &gf.mul(&ps.values()[i], v));
                    }
                    pk *= p;
                }
                let grad = dpsi_at(&r, &d, &y).unwrap();
                let mut rhs = alloc::vec![gf.zero(); r.der_dim()];
                for i in 0..n {
                    let dp = d.pth_power(&r, i).to_vec(&r);
                    for (t, v) in dp.iter().enumerate() {
                        rhs[t] = gf.sub(&rhs[t], &gf.mul(&grad[i], v));
                    }
                }
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn dickson_examples() {
        // n = 1: phi_0 = xi, psibar_0 = -xi^{p-1}
        let gf = Gf::new(5, 1).unwrap();
        let xi = [gf.from_u64(1)];
        let (phi, psibar) = dickson_restrict(&gf, 1, &xi).unwrap();
        assert_eq!(phi[0], gf.from_u64(1));
        assert_eq!(psibar[0], gf.from_u64(4));

        let r = ring(5, 1);
        let d = t0_derivation(&r, &xi);
        assert_eq!(psi(&r, &d).unwrap().values(), &psibar[..]);

        // n = 2, p = 3: phi_0 = xi1 xi2^3 - xi2 xi1^3, exhaustively
        let gf3 = Gf::new(3, 1).unwrap();
        for a in 0..3u64 {
            for b in 0..3u64 {
                let xi = [gf3.from_u64(a), gf3.from_u64(b)];
                let phi = dickson_phi(&gf3, 2, &xi);
                let expect = gf3.sub(
                    &gf3.mul(&xi[0], &gf3.pow(&xi[1], 3)),
                    &gf3.mul(&xi[1], &gf3.pow(&xi[0], 3)),
                );
                assert_eq!(phi[0], expect);
            }
        }

        // zero parameters: all phi vanish, ratios error out
        let zero = [gf.zero()];
        assert_eq!(
            dickson_restrict(&gf, 1, &zero).unwrap_err(),
            Error::DicksonDenominatorZero
        );
        assert!(dickson_phi(&gf, 1, &zero).iter().all(|v| gf.is_zero(v)));
    }

    #[test]
    fn dickson_matches_psi_and_delta0() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for (p, n) in [(5u64, 1usize), (3, 2)] {
            let r = ring(p, n);
            let gf = r.gf();
            for _ in 0..100 {
                let xi: Vec<GfElt> = (0..n)
                    .map(|_| gf.elt_from_index(rng.gen_range(0..gf.size())))
                    .collect();
                let d = t0_derivation(&r, &xi);
                let phi = dickson_phi(gf, n, &xi);
                let dv = delta_minors(&r, &d).unwrap();
                // restriction of delta_0 to the torus is phi_0, and the
                // minors match all Moore determinants
                assert_eq!(dv.minors, phi);
                // psi phi_0 = -phi_i as a product identity (no division)
                let ps = psi(&r, &d).unwrap();
                for i in 1..=n {
                    assert_eq!(gf.mul(&ps.values()[i - 1], &phi[0]), gf.neg(&phi[i]));
                }
            }
        }
    }

    #[test]
    fn d_lambda_examples() {
        let r = ring(5, 1);
        let gf = r.gf();
        assert_eq!(d_lambda(&r, &[gf.zero()]), Derivation::partial(&r, 1));
        for c in 0..5u64 {
            let d = d_lambda(&r, &[gf.from_u64(c)]);
            assert_eq!(delta(&r, &d), gf.from_u64(4)); // (-1)^1
        }

        let r2 = ring(3, 2);
        let gf2 = r2.gf();
        for a in 0..3u64 {
            for b in 0..3u64 {
                let d = d_lambda(&r2, &[gf2.from_u64(a), gf2.from_u64(b)]);
                assert!(gf2.is_one(&delta(&r2, &d))); // (-1)^2
            }
        }
    }

    #[test]
    fn fibre_test_examples() {
        let r = ring(5, 1);
        let gf = r.gf();
        let zero = PsiVector::zero(&r);
        assert!(fibre_test(&r, &Derivation::partial(&r, 1), &zero).unwrap());
        assert!(!fibre_test(&r, &euler(&r, 1), &zero).unwrap());

        let mut x2d = Derivation::zero(&r);
        x2d.set_image(1, r.monomial(&[2], gf.one()));
        assert!(fibre_test(&r, &x2d, &zero).unwrap());
        assert!(x2d.is_nilpotent(&r));
    }

    #[test]
    fn invariance_under_automorphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(68);
        for (p, n) in [(5u64, 1usize), (3, 2)] {
            let r = ring(p, n);
            let gf = r.gf();
            for _ in 0..25 {
                let s = Automorphism::random(&r, &mut rng);
                let d = rand_der(&r, &mut rng);
                let conj = s.act_der(&d);
                assert_eq!(psi(&r, &d).unwrap(), psi(&r, &conj).unwrap());

                // semiinvariance: delta_0(s(D)) = det(A)^{-1} delta_0(D)
                let det_inv = gf.inv(&s.det_linear()).unwrap();
                let d0 = delta_minors(&r, &d).unwrap().minors[0].clone();
                let d0c = delta_minors(&r, &conj).unwrap().minors[0].clone();
                assert_eq!(d0c, gf.mul(&det_inv, &d0));

                // delta(s(D)) = det(A)^{-(p-1)} delta(D)
                let chi = gf.pow(&det_inv, p - 1);
                assert_eq!(delta(&r, &conj), gf.mul(&chi, &delta(&r, &d)));
            }
        }
    }

    #[test]
    fn frobenius_and_semisimple_compat() {
        let mut rng = ChaCha8Rng::seed_from_u64(69);
        for (p, n) in [(5u64, 1usize), (3, 2)] {
            let r = ring(p, n);
            let gf = r.gf();
            for _ in 0..40 {
                let d = rand_der(&r, &mut rng);
                let ps = psi(&r, &d).unwrap();
                // psi_i(D^{[p]}) = psi_i(D)^p
                let psp = psi(&r, &d.pth_power(&r, 1)).unwrap();
                for i in 0..n {
                    assert_eq!(psp.values()[i], gf.pow(&ps.values()[i], p));
                }
                // psi_i(D) = psi_i(D_s)
                let jc = d.jordan_chevalley(&r);
                assert_eq!(psi(&r, &jc.s).unwrap(), ps);
            }
        }
    }

    #[test]
    fn cayley_hamilton_in_the_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        for (p, n) in [(5u64, 1usize), (3, 2)] {
            let r = ring(p, n);
            for _ in 0..40 {
                let d = rand_der(&r, &mut rng);
                let ps = psi(&r, &d).unwrap();
                let mut acc = d.pth_power(&r, n);
                for i in 0..n {
                    let term = d.pth_power(&r, i).scale(&r, &ps.values()[i]);
                    acc = acc.add(&r, &term);
                }
                assert!(acc.is_zero(&r));
            }
        }
    }

    #[test]
    fn regular_semisimple_window_exhaustive() {
        // psi_0 != 0  <=>  semisimple with one-dimensional kernel,
        // exhaustively over all 3125 derivations at (5, 1)
        let r = ring(5, 1);
        let gf = r.gf();
        for code in 0..gf.size().pow(5) {
            let mut rest = code;
            let coeffs: Vec<GfElt> = (0..5)
                .map(|_| {
                    let c = gf.elt_from_index(rest % gf.size());
                    rest /= gf.size();
                    c
                })
                .collect();
            let d =
                Derivation::from_images(&r, alloc::vec![r.from_coeffs(coeffs).unwrap()]).unwrap();
            let ps = psi(&r, &d).unwrap();
            let jc = d.jordan_chevalley(&r);
            let semisimple = jc.n_part.is_zero(&r);
            let kernel_dim = r.dim() - d.matrix(&r).rank(gf);
            let window = semisimple && kernel_dim == 1;
            assert_eq!(!gf.is_zero(&ps.values()[0]), window);
        }
    }

    #[test]
    fn regular_semisimple_window_sampled() {
        // the same equivalence by sampling at (3, 2)
        let r = ring(3, 2);
        let gf = r.gf();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..300 {
            let d = rand_der(&r, &mut rng);
            let ps = psi(&r, &d).unwrap();
            let jc = d.jordan_chevalley(&r);
            let semisimple = jc.n_part.is_zero(&r);
            let kernel_dim = r.dim() - d.matrix(&r).rank(gf);
            let window = semisimple && kernel_dim == 1;
            assert_eq!(!gf.is_zero(&ps.values()[0]), window);
        }
    }
}
