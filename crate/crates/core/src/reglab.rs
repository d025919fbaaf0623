//! Regularity certificates, tori and weight tables, canonical forms of
//! regular derivations, and fibre scans.
//!
//! The four regularity criteria are computed independently and packaged
//! into a [`RegularityCertificate`]: kernel dimension 1, all Jordan blocks
//! of the nilpotent part of size `p^r`, full rank of the invariant
//! differentials, and minimal polynomial of degree `p^n`. They must agree;
//! a disagreement is a defect in this crate, never a property of the
//! input.
//!
//! Tori are spanned by the p-power iterates of a semisimple part. The
//! toral elements (`t^{[p]} = t`) are found by an `F_p`-linear solve; when
//! the eigenvalues live in a proper extension, the construction moves to
//! the minimal splitting field (computed by distinct-degree layers of the
//! minimal polynomial) and records the extension degree.

use alloc::string::String;
use alloc::vec::Vec;

use alloc::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::autgrp::Automorphism;
use crate::embed::GfEmbedding;
use crate::error::{Error, Result};
use crate::gf::{Gf, GfElt};
use crate::invar::{delta, dpsi_gradient, psi, PsiVector};
use crate::linalg::{minpoly, nilpotent_jordan_profile, Mat};
use crate::oring::{RingElt, TruncRing};
use crate::poly::splitting_degree;
use crate::sample;
use crate::witt::Derivation;

/// Everything the four regularity criteria measure, plus their verdicts.
#[derive(Clone, Debug)]
pub struct RegularityCertificate {
    /// Least `i` with `psi_i != 0`; `n` for nilpotent input.
    pub r: usize,
    pub kernel_dim: usize,
    /// Jordan block sizes of the nilpotent part, descending.
    pub jordan_profile: Vec<usize>,
    pub dpsi_rank: usize,
    pub minpoly_degree: usize,
    pub psi: PsiVector,
    pub v_kernel: bool,
    pub v_jordan: bool,
    pub v_gradient: bool,
    pub v_minpoly: bool,
}

impl RegularityCertificate {
    /// All four criteria give the same answer.
    pub fn agree(&self) -> bool {
        self.v_kernel == self.v_jordan
            && self.v_kernel == self.v_gradient
            && self.v_kernel == self.v_minpoly
    }

    /// The common verdict (meaningful when [`agree`](Self::agree) holds).
    pub fn consensus(&self) -> bool {
        self.v_kernel
    }
}

/// Least `i` with `psi_i(D) != 0`, with `r = n` for nilpotent `D`.
pub fn r_index(ring: &TruncRing, d: &Derivation) -> Result<usize> {
    Ok(psi(ring, d)?.r_index(ring.gf()))
}

/// Evaluates all four regularity criteria.
pub fn certify(ring: &TruncRing, d: &Derivation) -> Result<RegularityCertificate> {
    let gf = ring.gf();
    let ps = psi(ring, d)?;
    let r = ps.r_index(gf);
    let m = d.matrix(ring);
    let kernel_dim = ring.dim() - m.rank(gf);
    let jc = d.jordan_chevalley(ring);
    let jordan_profile = nilpotent_jordan_profile(gf, &jc.n_part.matrix(ring));
    let pr = (ring.p() as usize).pow(r as u32);
    let v_jordan = jordan_profile.iter().all(|&s| s == pr);
    let grad = dpsi_gradient(ring, d)?;
    let dpsi_rank = grad.rank(gf);
    let mp = minpoly(gf, &m);
    let minpoly_degree = mp.degree().unwrap_or(0);
    Ok(RegularityCertificate {
        r,
        kernel_dim,
        jordan_profile,
        dpsi_rank,
        minpoly_degree,
        v_kernel: kernel_dim == 1,
        v_jordan,
        v_gradient: dpsi_rank == ring.n(),
        v_minpoly: minpoly_degree == ring.dim(),
        psi: ps,
    })
}

/// The operator `(ad D)^{p^n - p^r} + sum_{i>=r} psi_i(D) (ad D)^{p^i - p^r}`
/// on the derivation algebra; undefined for nilpotent input.
pub fn q_operator(ring: &TruncRing, d: &Derivation) -> Result<Mat> {
    let gf = ring.gf();
    let n = ring.n();
    let ps = psi(ring, d)?;
    let r = ps.r_index(gf);
    if r == n {
        return Err(Error::NilpotentInput);
    }
    let ad = d.ad_matrix(ring);
    let p = ring.p();
    let pr = p.pow(r as u32);
    let pn = p.pow(n as u32);
    let mut q = ad.pow(gf, pn - pr);
    let mut pi = pr;
    for i in r..n {
        let term = ad.pow(gf, pi - pr).scale(gf, &ps.values()[i]);
        q = q.add(gf, &term);
        pi *= p;
    }
    Ok(q)
}

/// Basis of the generalized 0-eigenspace of `ad D`.
pub fn null_component_basis(ring: &TruncRing, d: &Derivation) -> Vec<Vec<GfElt>> {
    let gf = ring.gf();
    let ad = d.ad_matrix(ring);
    ad.pow(gf, ring.der_dim() as u64).kernel_basis(gf)
}

// ---- tori ----

#[derive(Clone, Debug)]
pub struct Torus {
    ring: TruncRing,
    /// Extension degree over the field the torus was requested in.
    extension: usize,
    generators: Vec<Derivation>,
    toral_basis: Vec<Derivation>,
    dim: usize,
}

impl Torus {
    pub fn ring(&self) -> &TruncRing {
        &self.ring
    }

    pub fn extension(&self) -> usize {
        self.extension
    }

    pub fn generators(&self) -> &[Derivation] {
        &self.generators
    }

    /// Basis of `t^{[p]} = t` solutions; also a basis of the torus over
    /// the (possibly extended) field.
    pub fn toral_basis(&self) -> &[Derivation] {
        &self.toral_basis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Maximal independent subset of vectors, chosen greedily in order.
fn independent_subset(gf: &Gf, vecs: &[Derivation], ring: &TruncRing) -> Vec<Derivation> {
    let mut chosen: Vec<Derivation> = Vec::new();
    let mut cols: Vec<Vec<GfElt>> = Vec::new();
    for v in vecs {
        if v.is_zero(ring) {
            continue;
        }
        cols.push(v.to_vec(ring));
        let rank = Mat::from_cols(gf, &cols).rank(gf);
        if rank == cols.len() {
            chosen.push(v.clone());
        } else {
            cols.pop();
        }
    }
    chosen
}

/// Solves `t^{[p]} = t` inside the span of commuting semisimple
/// derivations. Returns `None` when the current field is too small (the
/// `F_p`-solution space has dimension below the span dimension).
fn toral_basis_in_span(ring: &TruncRing, span: &[Derivation]) -> Result<Option<Vec<Derivation>>> {
    let gf = ring.gf();
    let d = span.len();
    if d == 0 {
        return Ok(Some(Vec::new()));
    }
    let cols: Vec<Vec<GfElt>> = span.iter().map(|b| b.to_vec(ring)).collect();
    let span_mat = Mat::from_cols(gf, &cols);
    // p-map coordinates: span_j^{[p]} = sum_k a[j][k] span_k
    let mut a = Vec::with_capacity(d);
    for b in span {
        let bp = b.pth_power(ring, 1).to_vec(ring);
        let x = span_mat
            .solve(gf, &bp)
            .ok_or_else(|| Error::Defect(String::from("torus not closed under the p-map")))?;
        a.push(x);
    }
    // F_p-linear system: sum_j a[j][k] c_j^p = c_k for all k
    let p = ring.p();
    let pf = Gf::new(p, 1)?;
    let md = gf.m();
    // Frobenius digit matrix and multiplication matrices over F_p
    let frob = Mat::from_fn(&pf, md, md, |rr, ll| {
        let mut digits = alloc::vec![0u64; md];
        digits[ll] = 1;
        let e = gf.from_digits(&digits).unwrap();
        pf.from_u64(gf.pow(&e, p).digits()[rr])
    });
    let mul_mat = |c: &GfElt| {
        Mat::from_fn(&pf, md, md, |rr, ll| {
            let mut digits = alloc::vec![0u64; md];
            digits[ll] = 1;
            let e = gf.from_digits(&digits).unwrap();
            pf.from_u64(gf.mul(c, &e).digits()[rr])
        })
    };
    let mut big = Mat::zeros(&pf, d * md, d * md);
    for k in 0..d {
        for j in 0..d {
            let block = mul_mat(&a[j][k]).mul(&pf, &frob);
            for rr in 0..md {
                for ll in 0..md {
                    let mut v = block.get(rr, ll).clone();
                    if j == k && rr == ll {
                        v = pf.sub(&v, &pf.one());
                    }
                    big.set(k * md + rr, j * md + ll, v);
                }
            }
        }
    }
    let kernel = big.kernel_basis(&pf);
    if kernel.len() < d {
        return Ok(None);
    }
    if kernel.len() > d {
        return Err(Error::Defect(String::from(
            "toral solution space too large",
        )));
    }
    let mut raw = Vec::with_capacity(d);
    for vec in kernel {
        let mut t = Derivation::zero(ring);
        for j in 0..d {
            let digits: Vec<u64> = (0..md).map(|l| vec[j * md + l].digits()[0]).collect();
            let c = gf.from_digits(&digits)?;
            t = t.add(ring, &span[j].scale(ring, &c));
        }
        if t.pth_power(ring, 1) != t {
            return Err(Error::Defect(String::from(
                "toral solve produced a non-toral element",
            )));
        }
        raw.push(t);
    }
    // canonicalize: the toral elements form an F_p-space, so F_p-echelon
    // reduction over the digit coordinates stays inside it
    let digit_rows: Vec<Vec<GfElt>> = raw
        .iter()
        .map(|t| {
            t.to_vec(ring)
                .iter()
                .flat_map(|c| {
                    c.digits()
                        .iter()
                        .map(|&x| pf.from_u64(x))
                        .collect::<Vec<_>>()
                })
                .collect()
        })
        .collect();
    let (ech, pivots) = Mat::from_rows(digit_rows).rref(&pf);
    let mut basis = Vec::with_capacity(d);
    for row in 0..pivots.len() {
        let mut coords = Vec::with_capacity(ring.der_dim());
        for t in 0..ring.der_dim() {
            let digits: Vec<u64> = (0..md)
                .map(|l| ech.get(row, t * md + l).digits()[0])
                .collect();
            coords.push(gf.from_digits(&digits)?);
        }
        let t = Derivation::from_vec(ring, &coords);
        debug_assert_eq!(t.pth_power(ring, 1), t);
        basis.push(t);
    }
    // the toral elements span the torus over the field
    let bc: Vec<Vec<GfElt>> = basis.iter().map(|b| b.to_vec(ring)).collect();
    if Mat::from_cols(gf, &bc).rank(gf) != d {
        return Err(Error::Defect(String::from(
            "toral basis does not span the torus",
        )));
    }
    Ok(Some(basis))
}

fn extend_ring(ring: &TruncRing, k: usize) -> Result<(TruncRing, GfEmbedding)> {
    let gf2 = Gf::new(ring.p(), ring.gf().m() * k)?;
    let emb = GfEmbedding::new(ring.gf(), &gf2)?;
    let ring2 = TruncRing::new(gf2, ring.n())?;
    Ok((ring2, emb))
}

/// Builds a torus from commuting semisimple generators, extending the
/// field when necessary so that the toral basis exists.
fn torus_from_span(ring: &TruncRing, span: Vec<Derivation>) -> Result<Torus> {
    let gf = ring.gf();
    let dim = span.len();
    // minimal field over which every generator diagonalizes
    let mut k = 1usize;
    for b in &span {
        let mu = minpoly(gf, &b.matrix(ring));
        let kb = splitting_degree(gf, &mu);
        k = k / gcd_usize(k, kb) * kb;
    }
    if k == 1 {
        let basis = toral_basis_in_span(ring, &span)?.ok_or_else(|| {
            Error::Defect(String::from("toral solve failed over the splitting field"))
        })?;
        return Ok(Torus {
            ring: ring.clone(),
            extension: 1,
            generators: span,
            toral_basis: basis,
            dim,
        });
    }
    let (ring2, emb) = extend_ring(ring, k)?;
    let span2: Vec<Derivation> = span
        .iter()
        .map(|b| b.embed(ring, &ring2, &emb))
        .collect::<Result<_>>()?;
    let basis = toral_basis_in_span(&ring2, &span2)?.ok_or_else(|| {
        Error::Defect(String::from("toral solve failed over the splitting field"))
    })?;
    Ok(Torus {
        ring: ring2,
        extension: k,
        generators: span2,
        toral_basis: basis,
        dim,
    })
}

fn gcd_usize(mut x: usize, mut y: usize) -> usize {
    while y != 0 {
        let t = x % y;
        x = y;
        y = t;
    }
    x
}

/// The torus generated by the semisimple part of `D`; its dimension is
/// `n - r(D)`. Extends the field transparently and records the degree.
pub fn torus_of(ring: &TruncRing, d: &Derivation) -> Result<Torus> {
    let gf = ring.gf();
    let ps = psi(ring, d)?;
    let r = ps.r_index(gf);
    let jc = d.jordan_chevalley(ring);
    let mut powers = Vec::with_capacity(ring.n());
    let mut cur = jc.s.clone();
    let mut mat = jc.s.matrix(ring);
    for i in 0..ring.n() {
        powers.push(cur.clone());
        if i + 1 < ring.n() {
            mat = mat.pow(gf, ring.p());
            cur = Derivation::from_matrix(ring, &mat);
        }
    }
    let span = independent_subset(gf, &powers, ring);
    if span.len() != ring.n() - r {
        return Err(Error::Defect(String::from(
            "torus dimension differs from n - r",
        )));
    }
    torus_from_span(ring, span)
}

/// Torus spanned by explicit generators, which must commute pairwise and
/// be semisimple.
pub fn torus_from_generators(ring: &TruncRing, gens: &[Derivation]) -> Result<Torus> {
    for (i, a) in gens.iter().enumerate() {
        let jc = a.jordan_chevalley(ring);
        if !jc.n_part.is_zero(ring) {
            return Err(Error::NotRegular);
        }
        for b in &gens[..i] {
            if !a.bracket(ring, b).is_zero(ring) {
                return Err(Error::ContextMismatch);
            }
        }
    }
    // close the span under the p-map
    let mut closure: Vec<Derivation> = Vec::new();
    for g in gens {
        let mut cur = g.clone();
        for _ in 0..=ring.n() * ring.gf().m() {
            closure.push(cur.clone());
            cur = cur.pth_power(ring, 1);
        }
    }
    let span = independent_subset(ring.gf(), &closure, ring);
    torus_from_span(ring, span)
}

/// The standard torus spanned by `x_1 d_1 .. x_k d_k` and
/// `(1 + x_{k+1}) d_{k+1} .. (1 + x_n) d_n`.
pub fn standard_torus(ring: &TruncRing, k: usize) -> Result<Torus> {
    if k > ring.n() {
        return Err(Error::IndexOutOfRange);
    }
    let mut gens = Vec::with_capacity(ring.n());
    for i in 1..=ring.n() {
        let f = if i <= k {
            ring.var(i)
        } else {
            ring.add(&ring.one(), &ring.var(i))
        };
        let mut t = Derivation::zero(ring);
        t.set_image(i, f);
        gens.push(t);
    }
    Ok(Torus {
        ring: ring.clone(),
        extension: 1,
        toral_basis: gens.clone(),
        generators: gens,
        dim: ring.n(),
    })
}

// ---- weight tables ----

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WhichModule {
    /// The ring `O_n` as a module.
    Ring,
    /// The derivation algebra under the adjoint action.
    Der,
}

#[derive(Clone, Debug)]
pub struct WeightTable {
    pub module: WhichModule,
    pub torus_dim: usize,
    /// Weight vectors over `F_p` (against the toral basis) with the
    /// dimension of each weight space; odometer order.
    pub entries: Vec<(Vec<u64>, usize)>,
}

/// Simultaneous eigenspaces of the toral basis, with bases.
pub fn weight_spaces(torus: &Torus, which: WhichModule) -> Vec<(Vec<u64>, Mat)> {
    let ring = &torus.ring;
    let gf = ring.gf();
    let mats: Vec<Mat> = torus
        .toral_basis
        .iter()
        .map(|t| match which {
            WhichModule::Ring => t.matrix(ring),
            WhichModule::Der => t.ad_matrix(ring),
        })
        .collect();
    let space_dim = match which {
        WhichModule::Ring => ring.dim(),
        WhichModule::Der => ring.der_dim(),
    };
    let d = torus.dim;
    if d == 0 {
        return alloc::vec![(Vec::new(), Mat::identity(gf, space_dim))];
    }
    let p = ring.p();
    // progressive refinement: split the whole space by the first toral
    // element, then refine each piece by the next; the inner kernels act
    // on small restricted matrices instead of the full space
    let mut current: Vec<(Vec<u64>, Mat)> = alloc::vec![(Vec::new(), Mat::identity(gf, space_dim))];
    for m in mats.iter() {
        let mut next = Vec::new();
        for (w, basis) in current {
            let image = m.mul(gf, &basis);
            for c in 0..p {
                // kernel of (M - cI) restricted to the span of `basis`
                let mut shifted = image.clone();
                let ce = gf.from_u64(c);
                for row in 0..space_dim {
                    for col in 0..basis.cols {
                        let v = gf.sub(shifted.get(row, col), &gf.mul(&ce, basis.get(row, col)));
                        shifted.set(row, col, v);
                    }
                }
                let z = shifted.kernel_basis(gf);
                if z.is_empty() {
                    continue;
                }
                let zmat = Mat::from_cols(gf, &z);
                let mut wc = w.clone();
                wc.push(c);
                next.push((wc, basis.mul(gf, &zmat)));
            }
        }
        current = next;
    }
    // odometer order: first toral element varies fastest
    current.sort_by_key(|(w, _)| {
        let mut code = 0u64;
        for &x in w.iter().rev() {
            code = code * p + x;
        }
        code
    });
    current
}

/// Weight multiplicities of the torus on `O_n` or on the derivation
/// algebra.
pub fn weight_table(torus: &Torus, which: WhichModule) -> WeightTable {
    let entries = weight_spaces(torus, which)
        .into_iter()
        .map(|(w, basis)| (w, basis.cols))
        .collect();
    WeightTable {
        module: which,
        torus_dim: torus.dim,
        entries,
    }
}

// ---- canonical forms ----

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    /// Ring the form lives in (extended when eigenvalues required it).
    pub ring: TruncRing,
    /// Extension degree over the caller's field (`1` = none).
    pub extension: usize,
    pub sigma: Automorphism,
    pub r: usize,
    /// Shift flags for the toral coordinates, one per variable `r+1..n`.
    pub eps: Vec<u64>,
    /// Eigenvalues of the semisimple part on the chosen coordinates.
    pub lambda: Vec<GfElt>,
    /// `sigma(D)`, equal to the chain plus the diagonal toral part.
    pub canonical: Derivation,
}

/// The nilpotent chain `d_1 + x_1^{p-1} d_2 + ..` on the first `r`
/// variables.
pub fn chain_derivation(ring: &TruncRing, r: usize) -> Derivation {
    sample::chain_derivation(ring, r)
}

/// Recognizes the canonical shape and extracts `(r, eps, lambda)`.
pub fn canonical_shape(ring: &TruncRing, d: &Derivation) -> Option<(usize, Vec<u64>, Vec<GfElt>)> {
    let gf = ring.gf();
    let n = ring.n();
    let p = ring.p() as u8;
    // longest chain prefix
    let mut r = 0usize;
    let mut prefix = ring.one();
    while r < n {
        if d.image(r + 1) != &prefix {
            break;
        }
        r += 1;
        let mut exps = alloc::vec![0u8; n];
        exps[r - 1] = p - 1;
        prefix = ring.mul(&prefix, &ring.monomial(&exps, gf.one()));
    }
    let mut eps = Vec::new();
    let mut lambda = Vec::new();
    for i in r + 1..=n {
        let f = d.image(i);
        let xi_idx = (ring.p() as usize).pow((i - 1) as u32);
        let l = f.coeffs()[xi_idx].clone();
        if gf.is_zero(&l) {
            return None;
        }
        let c = f.coeffs()[0].clone();
        let e = if gf.is_zero(&c) {
            0
        } else if c == l {
            1
        } else {
            return None;
        };
        for (idx, coeff) in f.coeffs().iter().enumerate() {
            if idx != 0 && idx != xi_idx && !gf.is_zero(coeff) {
                return None;
            }
        }
        eps.push(e);
        lambda.push(l);
    }
    Some((r, eps, lambda))
}

fn coords_in_basis(gf: &Gf, basis: &Mat, v: &[GfElt]) -> Option<Vec<GfElt>> {
    basis.solve(gf, v)
}

struct WeightCandidate {
    weight: Vec<u64>,
    eps: u64,
    /// The maximal-ideal part of the eigenvector (the future image of a
    /// coordinate under the inverse automorphism).
    y_m: RingElt,
    lambda: GfElt,
    /// Degree-1 coefficients of `y_m`.
    lin: Vec<GfElt>,
}

/// Canonicalizing conjugation per the regularity theory: splits off the
/// chain on the zero-weight subalgebra and diagonal toral coordinates on
/// kernel vectors of the nilpotent part inside the nonzero weight spaces.
///
/// Fails with `NeedsFieldExtension` when the torus of `D` only splits
/// over a larger field; see [`canonical_form_extending`].
pub fn canonical_form(ring: &TruncRing, d: &Derivation) -> Result<CanonicalForm> {
    let cert = certify(ring, d)?;
    if !cert.agree() {
        return Err(Error::Defect(String::from("regularity criteria disagree")));
    }
    if !cert.consensus() {
        return Err(Error::NotRegular);
    }
    canonical_form_of_regular(ring, d, cert.r)
}

/// Canonicalization body for a derivation already known to be regular
/// (regularity is a rank condition and survives field extension, so the
/// extension retry skips the expensive re-certification).
fn canonical_form_of_regular(ring: &TruncRing, d: &Derivation, r: usize) -> Result<CanonicalForm> {
    let gf = ring.gf();
    let n = ring.n();
    let torus = torus_of(ring, d)?;
    if torus.extension() > 1 {
        return Err(Error::NeedsFieldExtension {
            degree: torus.extension(),
        });
    }
    let jc = d.jordan_chevalley(ring);
    let spaces = weight_spaces(&torus, WhichModule::Ring);
    let zero_w = alloc::vec![0u64; torus.dim()];
    let b_basis = spaces
        .iter()
        .find(|(w, _)| *w == zero_w)
        .map(|(_, b)| b.clone())
        .ok_or_else(|| Error::Defect(String::from("zero weight space missing")))?;
    let b_dim = b_basis.cols;
    if b_dim != (ring.p() as usize).pow(r as u32) {
        return Err(Error::Defect(String::from(
            "zero weight space has wrong dimension",
        )));
    }

    // chain solve on the zero-weight subalgebra
    let md = d.matrix(ring);
    let mut db_cols = Vec::with_capacity(b_dim);
    for j in 0..b_dim {
        let col = b_basis.col(j);
        let image = md.matvec(gf, &col);
        let coords = coords_in_basis(gf, &b_basis, &image).ok_or_else(|| {
            Error::Defect(String::from(
                "derivation does not preserve the zero weight space",
            ))
        })?;
        db_cols.push(coords);
    }
    let db = Mat::from_cols(gf, &db_cols);
    let mut ys: Vec<RingElt> = Vec::with_capacity(r);
    let mut rhs_elt = ring.one();
    for _ in 0..r {
        let rhs_coords = coords_in_basis(gf, &b_basis, rhs_elt.coeffs()).ok_or_else(|| {
            Error::Defect(String::from(
                "chain right-hand side left the zero weight space",
            ))
        })?;
        let u = db
            .solve(gf, &rhs_coords)
            .ok_or(Error::SolveFailed("chain step unsolvable"))?;
        let y_coords = b_basis.matvec(gf, &u);
        let mut y = ring.from_coeffs(y_coords)?;
        // zero the constant term; 1 spans the kernel of D on B
        let c = ring.constant_term(&y);
        y = ring.sub(&y, &ring.constant(c));
        if d.apply(ring, &y) != rhs_elt {
            return Err(Error::Defect(String::from(
                "chain solution does not satisfy its equation",
            )));
        }
        let pm1 = ring.pow(&y, ring.p() - 1);
        rhs_elt = ring.mul(&rhs_elt, &pm1);
        ys.push(y);
    }
    let lin_of = |f: &RingElt| -> Vec<GfElt> {
        (0..n)
            .map(|t| f.coeffs()[(ring.p() as usize).pow(t as u32)].clone())
            .collect()
    };
    let base_lin: Vec<Vec<GfElt>> = ys.iter().map(|y| lin_of(y)).collect();
    if !base_lin.is_empty() && Mat::from_rows(base_lin.clone()).rank(gf) != r {
        return Err(Error::Defect(String::from(
            "chain coordinates are degenerate",
        )));
    }

    // candidate coordinates from nonzero weight spaces
    let mn = jc.n_part.matrix(ring);
    let mut cands: Vec<WeightCandidate> = Vec::new();
    for (w, basis) in &spaces {
        if *w == zero_w {
            continue;
        }
        let img = mn.mul(gf, basis);
        let z = img.kernel_basis(gf);
        if z.len() != 1 {
            return Err(Error::Defect(String::from(
                "kernel of the nilpotent part is not a line in a weight space",
            )));
        }
        let mut v = basis.matvec(gf, &z[0]);
        let c = v[0].clone();
        let eps = if gf.is_zero(&c) {
            let j = v
                .iter()
                .position(|x| !gf.is_zero(x))
                .expect("nonzero eigenvector");
            let inv = gf.inv(&v[j])?;
            v = v.iter().map(|x| gf.mul(&inv, x)).collect();
            0
        } else {
            let inv = gf.inv(&c)?;
            v = v.iter().map(|x| gf.mul(&inv, x)).collect();
            1
        };
        let v_elt = ring.from_coeffs(v.clone())?;
        // eigenvalue of D on the vector (the nilpotent part kills it)
        let u = d.apply(ring, &v_elt);
        let j = v.iter().position(|x| !gf.is_zero(x)).unwrap();
        let lambda = gf.div(&u.coeffs()[j], &v[j])?;
        if u != ring.scale(&lambda, &v_elt) {
            return Err(Error::Defect(String::from(
                "weight vector is not an eigenvector of D",
            )));
        }
        let mut y_m = v_elt;
        if eps == 1 {
            y_m = ring.sub(&y_m, &ring.one());
        }
        let lin = lin_of(&y_m);
        cands.push(WeightCandidate {
            weight: w.clone(),
            eps,
            y_m,
            lambda,
            lin,
        });
    }

    // depth-first selection of a weight basis with independent linear parts
    let pf = Gf::new(ring.p(), 1)?;
    let need = n - r;
    let mut chosen: Vec<usize> = Vec::new();
    let found = select_candidates(
        ring,
        &pf,
        &cands,
        need,
        &base_lin,
        &mut chosen,
        &|sel: &[usize]| {
            // final assembly and verification
            let mut images: Vec<RingElt> = ys.clone();
            for &ci in sel {
                images.push(cands[ci].y_m.clone());
            }
            let tau = match Automorphism::new(ring, images) {
                Ok(t) => t,
                Err(_) => return None,
            };
            let sigma = tau.invert();
            let eps: Vec<u64> = sel.iter().map(|&ci| cands[ci].eps).collect();
            let lambda: Vec<GfElt> = sel.iter().map(|&ci| cands[ci].lambda.clone()).collect();
            let canonical = sample::canonical_representative(ring, r, &eps, &lambda);
            if sigma.act_der(d) != canonical {
                return None;
            }
            // the torus must map into the span of the canonical toral directions
            let span_cols: Vec<Vec<GfElt>> = (0..need)
                .map(|t| {
                    let i = r + t + 1;
                    let mut gen = Derivation::zero(ring);
                    let base = ring.add(&ring.constant(gf.from_u64(eps[t])), &ring.var(i));
                    gen.set_image(i, base);
                    gen.to_vec(ring)
                })
                .collect();
            if need > 0 {
                let span = Mat::from_cols(gf, &span_cols);
                for t in torus.toral_basis() {
                    let img = sigma.act_der(t).to_vec(ring);
                    span.solve(gf, &img)?;
                }
            }
            Some((sigma, eps, lambda, canonical))
        },
    );
    let (sigma, eps, lambda, canonical) =
        found.ok_or(Error::SolveFailed("no admissible coordinate selection"))?;
    Ok(CanonicalForm {
        ring: ring.clone(),
        extension: 1,
        sigma,
        r,
        eps,
        lambda,
        canonical,
    })
}

/// DFS over weight candidates: weights must stay `F_p`-independent and the
/// linear parts must keep extending the span.
fn select_candidates<T>(
    ring: &TruncRing,
    pf: &Gf,
    cands: &[WeightCandidate],
    need: usize,
    base_lin: &[Vec<GfElt>],
    chosen: &mut Vec<usize>,
    finish: &dyn Fn(&[usize]) -> Option<T>,
) -> Option<T> {
    let gf = ring.gf();
    if chosen.len() == need {
        return finish(chosen);
    }
    for ci in 0..cands.len() {
        if chosen.contains(&ci) {
            continue;
        }
        // F_p-independence of the weight vectors
        let mut wrows: Vec<Vec<GfElt>> = chosen
            .iter()
            .map(|&c| cands[c].weight.iter().map(|&x| pf.from_u64(x)).collect())
            .collect();
        wrows.push(cands[ci].weight.iter().map(|&x| pf.from_u64(x)).collect());
        if Mat::from_rows(wrows.clone()).rank(pf) != chosen.len() + 1 {
            continue;
        }
        // linear parts keep full rank
        let mut lrows: Vec<Vec<GfElt>> = base_lin.to_vec();
        for &c in chosen.iter() {
            lrows.push(cands[c].lin.clone());
        }
        lrows.push(cands[ci].lin.clone());
        let want = lrows.len();
        if Mat::from_rows(lrows).rank(gf) != want {
            continue;
        }
        chosen.push(ci);
        if let Some(out) = select_candidates(ring, pf, cands, need, base_lin, chosen, finish) {
            return Some(out);
        }
        chosen.pop();
    }
    None
}

/// Like [`canonical_form`], but extends the field when the torus requires
/// it; the result records the extension degree.
pub fn canonical_form_extending(ring: &TruncRing, d: &Derivation) -> Result<CanonicalForm> {
    match canonical_form(ring, d) {
        Err(Error::NeedsFieldExtension { degree }) => {
            let (ring2, emb) = extend_ring(ring, degree)?;
            let d2 = d.embed(ring, &ring2, &emb)?;
            // r is read off psi, which is invariant under the embedding
            let r = psi(&ring2, &d2)?.r_index(ring2.gf());
            let mut cf = canonical_form_of_regular(&ring2, &d2, r)?;
            cf.extension = degree;
            Ok(cf)
        }
        other => other,
    }
}

// ---- fibre scans ----

#[derive(Clone, Copy, Debug)]
pub enum ScanMode {
    Exhaustive,
    Sample { seed: u64, count: u64 },
}

#[derive(Clone, Debug, Default)]
pub struct ScanReport {
    pub exhaustive: bool,
    pub total: u64,
    pub fibre_count: u64,
    pub fibre_regular: u64,
    pub fibre_delta_nonzero: u64,
    pub nilpotent_total: u64,
    /// All requested-fibre points regular (exhaustive: exact statement;
    /// sample: no counterexample found).
    pub smooth: bool,
    /// Exhaustive only: smoothness agrees with `eta_0 != 0`.
    pub smooth_matches_theorem: Option<bool>,
    /// Failures of any checked implication across all scanned points.
    pub violations: u64,
    /// Exhaustive only: points per invariant vector.
    pub histogram: Vec<(String, u64)>,
}

const EXHAUSTIVE_BOUND: u128 = 10_000_000;

/// Scans the derivation algebra, buckets by the invariant vector, and
/// checks the smoothness dichotomy on the requested fibre together with
/// the `delta != 0  =>  regular` implication.
pub fn fibre_scan(ring: &TruncRing, eta: &PsiVector, mode: ScanMode) -> Result<ScanReport> {
    let gf = ring.gf();
    let q = gf.size();
    let dim = ring.der_dim();
    let mut report = ScanReport::default();
    let eta0_nonzero = !gf.is_zero(&eta.values()[0]);
    let mut histogram: BTreeMap<Vec<u64>, u64> = BTreeMap::new();

    let visit = |d: &Derivation,
                 report: &mut ScanReport,
                 histogram: &mut BTreeMap<Vec<u64>, u64>|
     -> Result<()> {
        report.total += 1;
        let ps = psi(ring, d)?;
        let key: Vec<u64> = ps.values().iter().map(|v| gf.elt_index(v)).collect();
        *histogram.entry(key).or_insert(0) += 1;
        let nilpotent = d.pth_power(ring, ring.n()).is_zero(ring);
        if nilpotent {
            report.nilpotent_total += 1;
        }
        if nilpotent != ps.is_zero(gf) {
            report.violations += 1;
        }
        let kernel_regular = ring.dim() - d.matrix(ring).rank(gf) == 1;
        let dv = delta(ring, d);
        if !gf.is_zero(&dv) && !kernel_regular {
            report.violations += 1;
        }
        if ps.values() == eta.values() {
            report.fibre_count += 1;
            let cert = certify(ring, d)?;
            if !cert.agree() {
                return Err(Error::Defect(String::from("criteria disagree during scan")));
            }
            if cert.consensus() {
                report.fibre_regular += 1;
            }
            if !gf.is_zero(&dv) {
                report.fibre_delta_nonzero += 1;
            }
            if eta0_nonzero {
                // the fibre must consist of regular semisimple points
                let jc = d.jordan_chevalley(ring);
                if !(cert.consensus() && jc.n_part.is_zero(ring)) {
                    report.violations += 1;
                }
            }
        }
        Ok(())
    };

    match mode {
        ScanMode::Exhaustive => {
            let mut size: u128 = 1;
            for _ in 0..dim {
                size *= q as u128;
                if size > EXHAUSTIVE_BOUND {
                    return Err(Error::EnumerationTooLarge);
                }
            }
            report.exhaustive = true;
            let mut digits = alloc::vec![0u64; dim];
            loop {
                let vec: Vec<GfElt> = digits.iter().map(|&k| gf.elt_from_index(k)).collect();
                let d = Derivation::from_vec(ring, &vec);
                visit(&d, &mut report, &mut histogram)?;
                // odometer
                let mut pos = 0;
                loop {
                    if pos == dim {
                        break;
                    }
                    digits[pos] += 1;
                    if digits[pos] < q {
                        break;
                    }
                    digits[pos] = 0;
                    pos += 1;
                }
                if pos == dim {
                    break;
                }
            }
            report.smooth = report.fibre_regular == report.fibre_count;
            report.smooth_matches_theorem = Some(report.smooth == eta0_nonzero);
            report.histogram = histogram
                .into_iter()
                .map(|(k, v)| {
                    let parts: Vec<String> = k
                        .iter()
                        .map(|&idx| gf.format_digits(&gf.elt_from_index(idx)))
                        .collect();
                    (parts.join(","), v)
                })
                .collect();
        }
        ScanMode::Sample { seed, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let d = sample::rand_derivation(ring, &mut rng);
                visit(&d, &mut report, &mut histogram)?;
            }
            report.smooth = report.fibre_regular == report.fibre_count;
            report.smooth_matches_theorem = None;
            report.histogram = Vec::new();
        }
    }
    Ok(report)
}
