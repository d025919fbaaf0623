//! Seeded random elements for property suites and the CLI.
//!
//! Everything takes the generator explicitly; there is no shared state and
//! no wall-clock entropy anywhere in the crate.

use alloc::vec::Vec;

use rand::Rng;

use crate::gf::{Gf, GfElt};
use crate::oring::{RingElt, TruncRing};
use crate::reglab;
use crate::witt::Derivation;

pub fn rand_elt<R: Rng>(gf: &Gf, rng: &mut R) -> GfElt {
    gf.elt_from_index(rng.gen_range(0..gf.size()))
}

pub fn rand_nonzero_elt<R: Rng>(gf: &Gf, rng: &mut R) -> GfElt {
    gf.elt_from_index(rng.gen_range(1..gf.size()))
}

pub fn rand_ring_elt<R: Rng>(ring: &TruncRing, rng: &mut R) -> RingElt {
    let coeffs = (0..ring.dim()).map(|_| rand_elt(ring.gf(), rng)).collect();
    ring.from_coeffs(coeffs).unwrap()
}

pub fn rand_derivation<R: Rng>(ring: &TruncRing, rng: &mut R) -> Derivation {
    let coeffs = (0..ring.n()).map(|_| rand_ring_elt(ring, rng)).collect();
    Derivation::from_images(ring, coeffs).unwrap()
}

pub fn rand_nonnilpotent<R: Rng>(ring: &TruncRing, rng: &mut R) -> Derivation {
    loop {
        let d = rand_derivation(ring, rng);
        if !d.is_nilpotent(ring) {
            return d;
        }
    }
}

/// Rejection-samples a regular derivation; regular points are dense, so
/// this terminates quickly.
pub fn rand_regular<R: Rng>(ring: &TruncRing, rng: &mut R) -> Derivation {
    loop {
        let d = rand_derivation(ring, rng);
        if let Ok(cert) = reglab::certify(ring, &d) {
            if cert.agree() && cert.consensus() {
                return d;
            }
        }
    }
}

/// The nilpotent chain `d_1 + x_1^{p-1} d_2 + .. + x_1^{p-1}..x_{r-1}^{p-1} d_r`.
pub fn chain_derivation(ring: &TruncRing, r: usize) -> Derivation {
    let p = ring.p() as u8;
    let mut d = Derivation::zero(ring);
    let mut prefix = ring.one();
    for i in 1..=r {
        d.set_image(i, prefix.clone());
        let mut exps = alloc::vec![0u8; ring.n()];
        exps[i - 1] = p - 1;
        prefix = ring.mul(&prefix, &ring.monomial(&exps, ring.gf().one()));
    }
    d
}

/// A regular derivation in canonical shape: the chain on the first `r`
/// variables plus `sum lambda_t (eps_t + x_{r+t}) d_{r+t}`.
pub fn canonical_representative(
    ring: &TruncRing,
    r: usize,
    eps: &[u64],
    lambda: &[GfElt],
) -> Derivation {
    assert_eq!(eps.len(), ring.n() - r);
    assert_eq!(lambda.len(), ring.n() - r);
    let mut d = chain_derivation(ring, r);
    for (t, (e, l)) in eps.iter().zip(lambda).enumerate() {
        let i = r + t + 1;
        let base = ring.add(&ring.constant(ring.gf().from_u64(*e)), &ring.var(i));
        d.set_image(i, ring.scale(l, &base));
    }
    d
}

/// Random canonical representative with the torus-dimension side condition
/// enforced by rejection: the semisimple part must generate an
/// `(n - r)`-dimensional torus.
pub fn rand_canonical_rep<R: Rng>(ring: &TruncRing, rng: &mut R) -> Derivation {
    let n = ring.n();
    loop {
        let r = rng.gen_range(0..=n);
        let eps: Vec<u64> = (0..n - r).map(|_| rng.gen_range(0..2u64)).collect();
        let lambda: Vec<GfElt> = (0..n - r)
            .map(|_| rand_nonzero_elt(ring.gf(), rng))
            .collect();
        let d = canonical_representative(ring, r, &eps, &lambda);
        if let Ok(cert) = reglab::certify(ring, &d) {
            if cert.agree() && cert.consensus() && cert.r == r {
                return d;
            }
        }
    }
}
