//! Canonical embeddings `F_{p^m} -> F_{p^M}` for `m | M`.
//!
//! Both fields carry deterministic moduli, so the embedding is pinned by
//! sending the source generator to the lexicographically least root of the
//! source modulus inside the target field. Splitting uses the usual
//! gcd-with-`(t+c)^{(q-1)/2} - 1` step over a deterministic sequence of
//! shifts, so the whole construction is reproducible.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gf::{Gf, GfElt};
use crate::poly::Poly;

#[derive(Clone, Debug)]
pub struct GfEmbedding {
    src: Gf,
    dst: Gf,
    /// Powers of the chosen root, `gen_pows[i] = rho^i` for `i < src.m()`.
    gen_pows: Vec<GfElt>,
}

impl GfEmbedding {
    pub fn new(src: &Gf, dst: &Gf) -> Result<GfEmbedding> {
        if src.p() != dst.p() || dst.m() % src.m() != 0 {
            return Err(Error::ContextMismatch);
        }
        if src.m() == 1 {
            return Ok(GfEmbedding {
                src: src.clone(),
                dst: dst.clone(),
                gen_pows: alloc::vec![dst.one()],
            });
        }
        if src == dst {
            // identity embedding
            let gen = dst.from_digits(&unit_digits(dst, 1))?;
            let gen_pows = power_table(dst, &gen, src.m());
            return Ok(GfEmbedding {
                src: src.clone(),
                dst: dst.clone(),
                gen_pows,
            });
        }
        // source modulus lifted to dst coefficient-wise (constants)
        let f = Poly::from_coeffs(
            dst,
            src.modulus().iter().map(|&c| dst.from_u64(c)).collect(),
        );
        let rho = least_root(dst, &f, src.m())?;
        debug_assert!(dst.is_zero(&f.eval(dst, &rho)));
        let gen_pows = power_table(dst, &rho, src.m());
        Ok(GfEmbedding {
            src: src.clone(),
            dst: dst.clone(),
            gen_pows,
        })
    }

    pub fn src(&self) -> &Gf {
        &self.src
    }

    pub fn dst(&self) -> &Gf {
        &self.dst
    }

    /// Maps `sum a_i gen^i` to `sum a_i rho^i`.
    pub fn map(&self, a: &GfElt) -> GfElt {
        let mut acc = self.dst.zero();
        for (i, &digit) in a.digits().iter().enumerate() {
            if digit == 0 {
                continue;
            }
            let term = self.dst.scalar_mul(digit, &self.gen_pows[i]);
            acc = self.dst.add(&acc, &term);
        }
        acc
    }
}

fn unit_digits(gf: &Gf, pos: usize) -> Vec<u64> {
    let mut d = alloc::vec![0u64; gf.m()];
    d[pos] = 1;
    d
}

fn power_table(gf: &Gf, x: &GfElt, count: usize) -> Vec<GfElt> {
    let mut pows = Vec::with_capacity(count);
    let mut cur = gf.one();
    for _ in 0..count {
        pows.push(cur.clone());
        cur = gf.mul(&cur, x);
    }
    pows
}

/// The lexicographically least root (digits compared constant-first) of a
/// polynomial that splits into distinct linear factors over `gf`.
fn least_root(gf: &Gf, f: &Poly, deg_over_prime: usize) -> Result<GfElt> {
    let one_root = split_to_root(gf, f)?;
    // all roots are Frobenius conjugates of any one of them
    let mut best = one_root.clone();
    let mut cur = one_root;
    for _ in 1..deg_over_prime {
        cur = gf.pow(&cur, gf.p());
        if digit_lex_less(&cur, &best) {
            best = cur.clone();
        }
    }
    Ok(best)
}

fn digit_lex_less(a: &GfElt, b: &GfElt) -> bool {
    a.digits() < b.digits()
}

fn split_to_root(gf: &Gf, f: &Poly) -> Result<GfElt> {
    let mut g = f.monic(gf);
    let half = (gf.size() - 1) / 2;
    let mut shift = 0u64;
    loop {
        let deg = g.degree().ok_or(Error::ShapeViolation)?;
        if deg == 1 {
            // monic t + c has root -c
            return Ok(gf.neg(&g.coeff(gf, 0)));
        }
        // try gcd(g, (t + c)^{(q-1)/2} - 1) over a deterministic shift walk
        let c = gf.elt_from_index(shift % gf.size());
        shift += 1;
        if shift > 4 * gf.size() {
            return Err(Error::SolveFailed("root splitting did not converge"));
        }
        let base = Poly::from_coeffs(gf, alloc::vec![c, gf.one()]);
        let pw = Poly::powmod(gf, &base, half, &g)?;
        let h = pw.sub(gf, &Poly::one(gf)).gcd(gf, &g);
        if let Some(dh) = h.degree() {
            if dh > 0 && dh < deg {
                // recurse into the smaller factor
                let (q, r) = g.divrem(gf, &h)?;
                debug_assert!(r.is_zero());
                g = if dh <= q.degree().unwrap_or(0) { h } else { q };
            }
        }
    }
}
