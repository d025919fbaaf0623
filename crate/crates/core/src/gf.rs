//! Exact arithmetic in `F_{p^m}`.
//!
//! A [`Gf`] value is the field context: the odd prime `p`, the extension
//! degree `m` and a monic irreducible modulus of degree `m` over `F_p`.
//! The modulus is always the lexicographically least monic irreducible
//! (coefficients compared constant-term first), so serialized data is
//! reproducible across runs and machines.
//!
//! Elements are plain digit vectors of length `m` with entries in `[0, p)`;
//! the context performs all arithmetic. [`DualElt`] is the dual-number
//! extension `F_q[e]/(e^2)` used to read off first-order terms of
//! polynomial maps.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

/// Digit storage; inline for extension degrees up to 4.
pub type Digits = SmallVec<[u64; 4]>;

/// An element of `F_{p^m}` in the polynomial representation: digit `i` is
/// the coefficient of `t^i`, reduced to `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GfElt {
    d: Digits,
}

impl GfElt {
    pub fn digits(&self) -> &[u64] {
        &self.d
    }
}

/// The field `F_{p^m}` with its deterministic modulus.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Gf {
    p: u64,
    m: usize,
    /// Monic modulus of degree `m` over `F_p`, ascending coefficients,
    /// length `m + 1`. For `m = 1` this is `t`.
    modulus: Vec<u64>,
}

#[inline]
fn mulmod(p: u64, a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    if x % 2 == 0 {
        return x == 2;
    }
    let mut d = 3u64;
    while d * d <= x {
        if x % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

// ---- dense F_p[t] helpers used for modulus search (coefficients ascending,
// trailing zeros trimmed) ----

fn fp_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_mul(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = alloc::vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(p, ai, bj)) % p;
        }
    }
    fp_trim(&mut out);
    out
}

/// Remainder of `a` modulo a monic `f`.
fn fp_rem(p: u64, a: &[u64], f: &[u64]) -> Vec<u64> {
    let mut r: Vec<u64> = a.into();
    fp_trim(&mut r);
    let df = f.len() - 1;
    while r.len() > df {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - df;
        if lead != 0 {
            for j in 0..df {
                let s = mulmod(p, lead, f[j]);
                r[shift + j] = (r[shift + j] + p - s) % p;
            }
        }
        r.pop();
        fp_trim(&mut r);
    }
    r
}

fn fp_gcd_monic(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut x: Vec<u64> = a.into();
    let mut y: Vec<u64> = b.into();
    fp_trim(&mut x);
    fp_trim(&mut y);
    while !y.is_empty() {
        // make y monic before reducing
        let lead = *y.last().unwrap();
        if lead != 1 {
            let inv = fp_inv_scalar(p, lead);
            for c in y.iter_mut() {
                *c = mulmod(p, *c, inv);
            }
        }
        let r = fp_rem(p, &x, &y);
        x = y;
        y = r;
    }
    if let Some(&lead) = x.last() {
        if lead != 1 {
            let inv = fp_inv_scalar(p, lead);
            for c in x.iter_mut() {
                *c = mulmod(p, *c, inv);
            }
        }
    }
    x
}

fn fp_inv_scalar(p: u64, a: u64) -> u64 {
    // Fermat; p is prime and a != 0.
    fp_pow_scalar(p, a, p - 2)
}

fn fp_pow_scalar(p: u64, mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(p, acc, a);
        }
        a = mulmod(p, a, a);
        e >>= 1;
    }
    acc
}

fn fp_powmod(p: u64, base: &[u64], mut e: u64, f: &[u64]) -> Vec<u64> {
    let mut acc = alloc::vec![1u64];
    let mut b = fp_rem(p, base, f);
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_rem(p, &fp_mul(p, &acc, &b), f);
        }
        b = fp_rem(p, &fp_mul(p, &b, &b), f);
        e >>= 1;
    }
    acc
}

/// `f` monic of degree `m >= 1`: irreducible over `F_p` iff it shares no
/// factor with `t^{p^k} - t` for any `k <= m/2`.
fn fp_is_irreducible(p: u64, f: &[u64], m: usize) -> bool {
    if m == 1 {
        return true;
    }
    let mut tp = alloc::vec![0u64, 1]; // t
    for k in 1..=m / 2 {
        tp = fp_powmod(p, &tp, p, f);
        let mut diff = tp.clone();
        while diff.len() < 2 {
            diff.push(0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        fp_trim(&mut diff);
        let g = fp_gcd_monic(p, f, &diff);
        if g.len() > 1 {
            return false;
        }
        let _ = k;
    }
    true
}

impl Gf {
    /// Builds `F_{p^m}` with the lex-least monic irreducible modulus.
    pub fn new(p: u64, m: usize) -> Result<Gf> {
        if p <= 2 {
            return Err(Error::SmallCharacteristic(p));
        }
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if m == 0 {
            return Err(Error::BadExtensionDegree(m));
        }
        // Digit serialization uses one symbol per digit; keep fields small.
        if p >= 36 {
            return Err(Error::FieldTooLarge);
        }
        // splitting fields for tori can reach degrees around the largest
        // element order of GL_n(F_p); keep q inside u64 arithmetic
        let mut q: u64 = 1;
        for _ in 0..m {
            q = q.checked_mul(p).ok_or(Error::FieldTooLarge)?;
            if q > 1 << 62 {
                return Err(Error::FieldTooLarge);
            }
        }
        let modulus = if m == 1 {
            alloc::vec![0, 1]
        } else {
            Self::least_irreducible(p, m)?
        };
        Ok(Gf { p, m, modulus })
    }

    /// Enumerates non-leading coefficient tuples `(c_0, .., c_{m-1})` in
    /// lexicographic order and returns the first irreducible
    /// `t^m + sum c_i t^i`. The whole `c_0 = 0` block is divisible by `t`,
    /// so enumeration starts at `c_0 = 1`.
    fn least_irreducible(p: u64, m: usize) -> Result<Vec<u64>> {
        let mut total: u64 = 1;
        for _ in 0..m {
            total *= p;
        }
        let start = total / p; // first tuple with c_0 = 1
        for k in start..total {
            let mut f = alloc::vec![0u64; m + 1];
            f[m] = 1;
            let mut rest = k;
            // c_0 is the most significant digit of k, so increasing k walks
            // the tuples (c_0, .., c_{m-1}) in lexicographic order.
            for i in (0..m).rev() {
                f[i] = rest % p;
                rest /= p;
            }
            if fp_is_irreducible(p, &f, m) {
                return Ok(f);
            }
        }
        Err(Error::FieldTooLarge)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Field size `p^m`.
    pub fn size(&self) -> u64 {
        let mut q = 1u64;
        for _ in 0..self.m {
            q *= self.p;
        }
        q
    }

    pub fn zero(&self) -> GfElt {
        GfElt {
            d: smallvec![0; self.m],
        }
    }

    pub fn one(&self) -> GfElt {
        let mut d: Digits = smallvec![0; self.m];
        d[0] = 1;
        GfElt { d }
    }

    pub fn from_u64(&self, c: u64) -> GfElt {
        let mut d: Digits = smallvec![0; self.m];
        d[0] = c % self.p;
        GfElt { d }
    }

    /// Builds an element from explicit digits (length must equal `m`).
    pub fn from_digits(&self, digits: &[u64]) -> Result<GfElt> {
        if digits.len() != self.m {
            return Err(Error::ContextMismatch);
        }
        let d: Digits = digits.iter().map(|&c| c % self.p).collect();
        Ok(GfElt { d })
    }

    /// Element with index `k` in the digit enumeration (little-endian base
    /// p); used for deterministic sweeps over the field.
    pub fn elt_from_index(&self, k: u64) -> GfElt {
        let mut d: Digits = smallvec![0; self.m];
        let mut rest = k;
        for i in 0..self.m {
            d[i] = rest % self.p;
            rest /= self.p;
        }
        GfElt { d }
    }

    pub fn elt_index(&self, a: &GfElt) -> u64 {
        let mut k = 0u64;
        for i in (0..self.m).rev() {
            k = k * self.p + a.d[i];
        }
        k
    }

    pub fn is_zero(&self, a: &GfElt) -> bool {
        a.d.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self, a: &GfElt) -> bool {
        a.d[0] == 1 && a.d[1..].iter().all(|&c| c == 0)
    }

    pub fn check(&self, a: &GfElt) -> Result<()> {
        if a.d.len() != self.m {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn add(&self, a: &GfElt, b: &GfElt) -> GfElt {
        let p = self.p;
        let d = a.d.iter().zip(&b.d).map(|(&x, &y)| (x + y) % p).collect();
        GfElt { d }
    }

    pub fn sub(&self, a: &GfElt, b: &GfElt) -> GfElt {
        let p = self.p;
        let d =
            a.d.iter()
                .zip(&b.d)
                .map(|(&x, &y)| (x + p - y) % p)
                .collect();
        GfElt { d }
    }

    pub fn neg(&self, a: &GfElt) -> GfElt {
        let p = self.p;
        let d = a.d.iter().map(|&x| (p - x) % p).collect();
        GfElt { d }
    }

    pub fn mul(&self, a: &GfElt, b: &GfElt) -> GfElt {
        let p = self.p;
        let m = self.m;
        if m == 1 {
            return GfElt {
                d: smallvec![(a.d[0] * b.d[0]) % p],
            };
        }
        // digits are below p < 36, so the raw convolution stays far from
        // overflow and a single reduction per slot suffices
        let mut scratch: SmallVec<[u64; 8]> = smallvec![0; 2 * m - 1];
        for i in 0..m {
            let ai = a.d[i];
            if ai == 0 {
                continue;
            }
            for j in 0..m {
                scratch[i + j] += ai * b.d[j];
            }
        }
        self.reduce_product_digits(&mut scratch)
    }

    /// Folds a raw convolution (length `2m - 1`, unreduced accumulators)
    /// into a field element using `t^m = -sum modulus[j] t^j`.
    pub fn reduce_product_digits(&self, scratch: &mut [u64]) -> GfElt {
        let p = self.p;
        let m = self.m;
        debug_assert_eq!(scratch.len(), 2 * m - 1);
        for slot in scratch.iter_mut() {
            *slot %= p;
        }
        for k in (m..2 * m - 1).rev() {
            let c = scratch[k];
            if c == 0 {
                continue;
            }
            scratch[k] = 0;
            for j in 0..m {
                let s = (c * self.modulus[j]) % p;
                scratch[k - m + j] = (scratch[k - m + j] + p - s) % p;
            }
        }
        let d: Digits = scratch[..m].iter().copied().collect();
        GfElt { d }
    }

    pub fn scalar_mul(&self, c: u64, a: &GfElt) -> GfElt {
        let p = self.p;
        let c = c % p;
        let d = a.d.iter().map(|&x| (c * x) % p).collect();
        GfElt { d }
    }

    pub fn pow(&self, a: &GfElt, mut e: u64) -> GfElt {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &GfElt) -> Result<GfElt> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.size() - 2))
    }

    pub fn div(&self, a: &GfElt, b: &GfElt) -> Result<GfElt> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// `a^{p^k}`.
    pub fn frobenius(&self, a: &GfElt, k: usize) -> GfElt {
        let mut x = a.clone();
        for _ in 0..k {
            x = self.pow(&x, self.p);
        }
        x
    }

    /// Inverse Frobenius: the unique `b` with `b^p = a`.
    pub fn pth_root(&self, a: &GfElt) -> GfElt {
        if self.m <= 1 {
            return a.clone();
        }
        self.frobenius(a, self.m - 1)
    }

    // ---- serialization ----

    /// `gf(p^m):` followed by base-p digits, least significant first.
    pub fn format_elt(&self, a: &GfElt) -> String {
        let mut s = String::new();
        let _ = write!(s, "gf({}^{}):", self.p, self.m);
        for &c in a.d.iter() {
            s.push(digit_char(c));
        }
        s
    }

    /// Bare digit string (used inside larger serializations).
    pub fn format_digits(&self, a: &GfElt) -> String {
        a.d.iter().map(|&c| digit_char(c)).collect()
    }

    pub fn parse_elt(&self, s: &str) -> Result<GfElt> {
        let prefix = alloc::format!("gf({}^{}):", self.p, self.m);
        let rest = s.strip_prefix(prefix.as_str()).ok_or(Error::Syntax {
            offset: 0,
            expected: "gf(p^m): prefix",
        })?;
        self.parse_digits(rest)
    }

    pub fn parse_digits(&self, s: &str) -> Result<GfElt> {
        if s.len() != self.m {
            return Err(Error::ContextMismatch);
        }
        let mut d: Digits = smallvec![0; self.m];
        for (i, ch) in s.chars().enumerate() {
            let v = digit_val(ch).ok_or(Error::Syntax {
                offset: i,
                expected: "base-p digit",
            })?;
            if v >= self.p {
                return Err(Error::Syntax {
                    offset: i,
                    expected: "digit below p",
                });
            }
            d[i] = v;
        }
        Ok(GfElt { d })
    }
}

fn digit_char(v: u64) -> char {
    if v < 10 {
        (b'0' + v as u8) as char
    } else {
        (b'a' + (v - 10) as u8) as char
    }
}

fn digit_val(c: char) -> Option<u64> {
    match c {
        '0'..='9' => Some(c as u64 - '0' as u64),
        'a'..='z' => Some(c as u64 - 'a' as u64 + 10),
        _ => None,
    }
}

/// An element `a + e b` of `F_q[e]/(e^2)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DualElt {
    pub a: GfElt,
    pub b: GfElt,
}

/// The dual-number ring over a field context.
#[derive(Clone, Copy)]
pub struct DualRing<'a>(pub &'a Gf);

impl<'a> DualRing<'a> {
    pub fn constant(&self, a: GfElt) -> DualElt {
        DualElt {
            b: self.0.zero(),
            a,
        }
    }

    pub fn from_parts(&self, a: GfElt, b: GfElt) -> DualElt {
        DualElt { a, b }
    }
}
