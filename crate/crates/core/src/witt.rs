//! Derivations of `O_n`.
//!
//! A derivation `D = sum f_i d_i` is stored as its images `f_i = D(x_i)`;
//! the derivation algebra is a free `O_n`-module on the partials `d_i`, so
//! this representation is faithful and unique. The module provides the
//! bracket, the `p^n x p^n` matrix of the action on `O_n`, iterated p-th
//! powers through that matrix, the grading by total degree, and the
//! decomposition `D = D_s + D_n` into commuting semisimple and nilpotent
//! parts.
//!
//! Basis order for the algebra as a vector space: the derivation `x^a d_j`
//! sits at index `(j - 1) p^n + idx(a)`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::embed::GfEmbedding;
use crate::error::{Error, Result};
use crate::gf::GfElt;
use crate::linalg::{eval_poly, minpoly, Mat};
use crate::oring::{RingElt, TruncRing};
use crate::poly::{separable_part, Poly};

/// `D = sum f_i d_i`, stored as the images `f_i = D(x_i)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Derivation {
    coeffs: Vec<RingElt>,
}

/// The commuting split `D = s + n_part` with `s` semisimple and `n_part`
/// nilpotent, both polynomials in the p-th power iterates of `D`.
#[derive(Clone, Debug)]
pub struct JcPair {
    pub s: Derivation,
    pub n_part: Derivation,
}

impl Derivation {
    pub fn from_images(ring: &TruncRing, coeffs: Vec<RingElt>) -> Result<Derivation> {
        if coeffs.len() != ring.n() {
            return Err(Error::ContextMismatch);
        }
        for f in &coeffs {
            ring.check(f)?;
        }
        Ok(Derivation { coeffs })
    }

    pub fn zero(ring: &TruncRing) -> Derivation {
        Derivation {
            coeffs: alloc::vec![ring.zero(); ring.n()],
        }
    }

    /// The partial derivative `d_i`, `1 <= i <= n`.
    pub fn partial(ring: &TruncRing, i: usize) -> Derivation {
        let mut d = Derivation::zero(ring);
        d.coeffs[i - 1] = ring.one();
        d
    }

    pub fn images(&self) -> &[RingElt] {
        &self.coeffs
    }

    pub fn image(&self, i: usize) -> &RingElt {
        &self.coeffs[i - 1]
    }

    pub fn set_image(&mut self, i: usize, f: RingElt) {
        self.coeffs[i - 1] = f;
    }

    pub fn is_zero(&self, ring: &TruncRing) -> bool {
        self.coeffs.iter().all(|f| ring.is_zero(f))
    }

    pub fn add(&self, ring: &TruncRing, other: &Derivation) -> Derivation {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| ring.add(a, b))
            .collect();
        Derivation { coeffs }
    }

    pub fn sub(&self, ring: &TruncRing, other: &Derivation) -> Derivation {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| ring.sub(a, b))
            .collect();
        Derivation { coeffs }
    }

    pub fn neg(&self, ring: &TruncRing) -> Derivation {
        Derivation {
            coeffs: self.coeffs.iter().map(|a| ring.neg(a)).collect(),
        }
    }

    pub fn scale(&self, ring: &TruncRing, c: &GfElt) -> Derivation {
        Derivation {
            coeffs: self.coeffs.iter().map(|a| ring.scale(c, a)).collect(),
        }
    }

    /// `f D` for a ring element `f`.
    pub fn mul_ring(&self, ring: &TruncRing, f: &RingElt) -> Derivation {
        Derivation {
            coeffs: self.coeffs.iter().map(|a| ring.mul(f, a)).collect(),
        }
    }

    /// `D(f) = sum f_i d_i(f)`.
    pub fn apply(&self, ring: &TruncRing, f: &RingElt) -> RingElt {
        let mut acc = ring.zero();
        for (i, fi) in self.coeffs.iter().enumerate() {
            if ring.is_zero(fi) {
                continue;
            }
            let df = ring.partial(f, i + 1);
            acc = ring.add(&acc, &ring.mul(fi, &df));
        }
        acc
    }

    /// Checked apply; errors on mismatched coefficient lengths.
    pub fn try_apply(&self, ring: &TruncRing, f: &RingElt) -> Result<RingElt> {
        ring.check(f)?;
        if self.coeffs.len() != ring.n() {
            return Err(Error::ContextMismatch);
        }
        Ok(self.apply(ring, f))
    }

    /// Commutator `[D, E]`, read off componentwise on the generators.
    pub fn bracket(&self, ring: &TruncRing, other: &Derivation) -> Derivation {
        let coeffs = (1..=ring.n())
            .map(|i| {
                let de = self.apply(ring, other.image(i));
                let ed = other.apply(ring, self.image(i));
                ring.sub(&de, &ed)
            })
            .collect();
        Derivation { coeffs }
    }

    /// Matrix of the action on the monomial basis of `O_n`; column `j`
    /// holds the coordinates of `D(basis_j)`.
    pub fn matrix(&self, ring: &TruncRing) -> Mat {
        let gf = ring.gf();
        let d = ring.dim();
        let mut m = Mat::zeros(gf, d, d);
        // D(x^a) = sum_i a_i x^{a - e_i} f_i; assemble by shifting f_i
        for (i, fi) in self.coeffs.iter().enumerate() {
            if ring.is_zero(fi) {
                continue;
            }
            let stride = (ring.p() as usize).pow(i as u32);
            for j in 0..d {
                let a = ring.exponents(j)[i];
                if a == 0 {
                    continue;
                }
                let base = j - stride;
                let dj = ring.exponents(base);
                'mono: for (k, c) in fi.coeffs().iter().enumerate() {
                    if gf.is_zero(c) {
                        continue;
                    }
                    let dk = ring.exponents(k);
                    for t in 0..ring.n() {
                        if dj[t] + dk[t] >= ring.p() as u8 {
                            continue 'mono;
                        }
                    }
                    let row = base + k;
                    let v = gf.add(m.get(row, j), &gf.scalar_mul(a as u64, c));
                    m.set(row, j, v);
                }
            }
        }
        m
    }

    /// Reads a derivation off a matrix acting on `O_n`: the images of the
    /// generators are the columns at the generator indices.
    pub fn from_matrix(ring: &TruncRing, m: &Mat) -> Derivation {
        let coeffs = (0..ring.n())
            .map(|i| {
                let idx = (ring.p() as usize).pow(i as u32);
                ring.from_coeffs(m.col(idx))
                    .expect("matrix has ring dimension")
            })
            .collect();
        Derivation { coeffs }
    }

    /// `D^{p^k}` via `k` successive matrix p-th powers.
    pub fn pth_power(&self, ring: &TruncRing, k: usize) -> Derivation {
        if k == 0 {
            return self.clone();
        }
        let gf = ring.gf();
        let mut m = self.matrix(ring);
        for _ in 0..k {
            m = m.pow(gf, ring.p());
        }
        let out = Derivation::from_matrix(ring, &m);
        debug_assert_eq!(out.matrix(ring), m, "p-th power must stay a derivation");
        out
    }

    /// Nilpotent iff `D^{p^n} = 0`.
    pub fn is_nilpotent(&self, ring: &TruncRing) -> bool {
        self.pth_power(ring, ring.n()).is_zero(ring)
    }

    /// Splits `D` into graded components; `x^a d_j` has degree `|a| - 1`.
    pub fn grade(&self, ring: &TruncRing) -> BTreeMap<i64, Derivation> {
        let gf = ring.gf();
        let mut out: BTreeMap<i64, Derivation> = BTreeMap::new();
        for (i, fi) in self.coeffs.iter().enumerate() {
            for (idx, c) in fi.coeffs().iter().enumerate() {
                if gf.is_zero(c) {
                    continue;
                }
                let deg = ring.total_degree(idx) as i64 - 1;
                let entry = out.entry(deg).or_insert_with(|| Derivation::zero(ring));
                let mut v = alloc::vec![gf.zero(); ring.dim()];
                v[idx] = c.clone();
                let mono = ring.from_coeffs(v).unwrap();
                entry.coeffs[i] = ring.add(&entry.coeffs[i], &mono);
            }
        }
        out
    }

    /// The grading component in degree `-1`: constant terms of the
    /// coefficient functions.
    pub fn degree_minus_one(&self, ring: &TruncRing) -> Vec<GfElt> {
        self.coeffs.iter().map(|f| ring.constant_term(f)).collect()
    }

    /// Jordan–Chevalley split through the minimal polynomial of the matrix:
    /// Newton-lift `h` with `s(h) = 0 mod m_D` starting from `h = t`, where
    /// `s` is the separable part; then `D_s = h(D)`.
    pub fn jordan_chevalley(&self, ring: &TruncRing) -> JcPair {
        let gf = ring.gf();
        let m = self.matrix(ring);
        if m.is_zero(gf) {
            return JcPair {
                s: Derivation::zero(ring),
                n_part: Derivation::zero(ring),
            };
        }
        let mu = minpoly(gf, &m);
        let s = separable_part(gf, &mu);
        let s_prime = s.derivative(gf);
        let mut h = Poly::t(gf).rem(gf, &mu).expect("minpoly nonzero");
        let mut rounds = 0;
        loop {
            let val = compose_mod(ring, &s, &h, &mu);
            if val.is_zero() {
                break;
            }
            rounds += 1;
            assert!(rounds <= 64, "Newton lift must converge");
            let der = compose_mod(ring, &s_prime, &h, &mu);
            let inv = der
                .invmod(gf, &mu)
                .expect("separable part derivative invertible modulo minpoly");
            let step = val.mul(gf, &inv).rem(gf, &mu).unwrap();
            h = h.sub(gf, &step).rem(gf, &mu).unwrap();
        }
        let ms = eval_poly(gf, &h, &m);
        let s_der = Derivation::from_matrix(ring, &ms);
        assert_eq!(
            s_der.matrix(ring),
            ms,
            "semisimple part must be a derivation"
        );
        let n_der = self.sub(ring, &s_der);
        JcPair {
            s: s_der,
            n_part: n_der,
        }
    }

    // ---- vector form on the basis x^a d_j at (j-1) p^n + idx(a) ----

    pub fn to_vec(&self, ring: &TruncRing) -> Vec<GfElt> {
        let mut v = Vec::with_capacity(ring.der_dim());
        for f in &self.coeffs {
            v.extend(f.coeffs().iter().cloned());
        }
        v
    }

    pub fn from_vec(ring: &TruncRing, v: &[GfElt]) -> Derivation {
        assert_eq!(v.len(), ring.der_dim());
        let coeffs = (0..ring.n())
            .map(|i| {
                ring.from_coeffs(v[i * ring.dim()..(i + 1) * ring.dim()].to_vec())
                    .unwrap()
            })
            .collect();
        Derivation { coeffs }
    }

    /// Matrix of `ad D` on the derivation algebra in the vector basis.
    pub fn ad_matrix(&self, ring: &TruncRing) -> Mat {
        let gf = ring.gf();
        let dim = ring.der_dim();
        let mut cols = Vec::with_capacity(dim);
        for k in 0..dim {
            let basis = Derivation::basis_elt(ring, k);
            cols.push(self.bracket(ring, &basis).to_vec(ring));
        }
        Mat::from_cols(gf, &cols)
    }

    pub fn basis_elt(ring: &TruncRing, k: usize) -> Derivation {
        let gf = ring.gf();
        let j = k / ring.dim();
        let idx = k % ring.dim();
        let mut v = alloc::vec![gf.zero(); ring.dim()];
        v[idx] = gf.one();
        let mut coeffs = alloc::vec![ring.zero(); ring.n()];
        coeffs[j] = ring.from_coeffs(v).unwrap();
        Derivation { coeffs }
    }

    pub fn embed(
        &self,
        ring: &TruncRing,
        target: &TruncRing,
        emb: &GfEmbedding,
    ) -> Result<Derivation> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|f| ring.embed_elt(target, emb, f))
            .collect::<Result<Vec<_>>>()?;
        Ok(Derivation { coeffs })
    }

    // ---- text forms ----

    /// Machine form: `der(p,n):` then the `n` coefficient lists joined by
    /// semicolons.
    pub fn serialize(&self, ring: &TruncRing) -> String {
        let bodies: Vec<String> = self
            .coeffs
            .iter()
            .map(|f| {
                let parts: Vec<String> = f
                    .coeffs()
                    .iter()
                    .map(|c| ring.gf().format_digits(c))
                    .collect();
                parts.join(",")
            })
            .collect();
        alloc::format!("der({},{}):{}", ring.p(), ring.n(), bodies.join(";"))
    }

    pub fn parse_serialized(ring: &TruncRing, s: &str) -> Result<Derivation> {
        let prefix = alloc::format!("der({},{}):", ring.p(), ring.n());
        let rest = s.strip_prefix(prefix.as_str()).ok_or(Error::Syntax {
            offset: 0,
            expected: "der(p,n): prefix",
        })?;
        let bodies: Vec<&str> = rest.split(';').collect();
        if bodies.len() != ring.n() {
            return Err(Error::ContextMismatch);
        }
        let mut coeffs = Vec::with_capacity(ring.n());
        for body in bodies {
            let parts: Vec<&str> = body.split(',').collect();
            if parts.len() != ring.dim() {
                return Err(Error::ContextMismatch);
            }
            let mut v = Vec::with_capacity(ring.dim());
            for part in parts {
                v.push(ring.gf().parse_digits(part)?);
            }
            coeffs.push(ring.from_coeffs(v)?);
        }
        Ok(Derivation { coeffs })
    }

    /// Human-readable sum of `coeff * d<i>` terms.
    pub fn format(&self, ring: &TruncRing) -> String {
        let mut terms = Vec::new();
        for (i, f) in self.coeffs.iter().enumerate() {
            if ring.is_zero(f) {
                continue;
            }
            let body = ring.format_elt(f);
            if body == "1" {
                terms.push(alloc::format!("d{}", i + 1));
            } else if body.contains(" + ") {
                terms.push(alloc::format!("({})*d{}", body, i + 1));
            } else {
                terms.push(alloc::format!("{}*d{}", body, i + 1));
            }
        }
        if terms.is_empty() {
            String::from("0")
        } else {
            terms.join(" + ")
        }
    }
}

/// `f(h) mod mu` by Horner over the residue ring.
fn compose_mod(ring: &TruncRing, f: &Poly, h: &Poly, mu: &Poly) -> Poly {
    let gf = ring.gf();
    let mut acc = Poly::zero();
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(gf, h).add(gf, &Poly::constant(gf, c.clone()));
        acc = acc.rem(gf, mu).unwrap();
    }
    acc
}
