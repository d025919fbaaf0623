//! Dense exact linear algebra over `F_{p^m}`.
//!
//! Matrices are row-major with the field context passed explicitly, like
//! every other layer of the crate. Multiplication has a fast path for
//! prime fields: digits are accumulated lazily in `u64` and reduced once
//! per entry, which is where the exhaustive scans spend their time.

use alloc::vec::Vec;

use crate::gf::{Gf, GfElt};
use crate::poly::Poly;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<GfElt>,
}

impl Mat {
    pub fn zeros(gf: &Gf, rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: alloc::vec![gf.zero(); rows * cols],
        }
    }

    pub fn identity(gf: &Gf, d: usize) -> Mat {
        let mut m = Mat::zeros(gf, d, d);
        for i in 0..d {
            m.set(i, i, gf.one());
        }
        m
    }

    pub fn from_fn(
        gf: &Gf,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> GfElt,
    ) -> Mat {
        let _ = gf;
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<GfElt>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        Mat {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_cols(gf: &Gf, cols: &[Vec<GfElt>]) -> Mat {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = Mat::zeros(gf, r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r);
            for i in 0..r {
                m.set(i, j, col[i].clone());
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &GfElt {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: GfElt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[GfElt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<GfElt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn data(&self) -> &[GfElt] {
        &self.data
    }

    pub fn is_zero(&self, gf: &Gf) -> bool {
        self.data.iter().all(|x| gf.is_zero(x))
    }

    pub fn add(&self, gf: &Gf, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| gf.add(a, b))
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, gf: &Gf, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| gf.sub(a, b))
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, gf: &Gf, c: &GfElt) -> Mat {
        let data = self.data.iter().map(|a| gf.mul(c, a)).collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Lazy-reduction product over flattened digit buffers: raw `u64`
    /// accumulation with one reduction per output entry. Digits stay below
    /// `p < 36` and dimensions are desk-scale, so the accumulators cannot
    /// overflow.
    pub fn mul(&self, gf: &Gf, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let md = gf.m();
        let p = gf.p();
        let (n, k, m) = (self.rows, self.cols, other.cols);
        debug_assert!((k as u128) * (md as u128) * ((p - 1) as u128).pow(2) < u64::MAX as u128 / 2);
        if md == 1 {
            let a: Vec<u64> = self.data.iter().map(|x| x.digits()[0]).collect();
            let b: Vec<u64> = other.data.iter().map(|x| x.digits()[0]).collect();
            let mut out = Vec::with_capacity(n * m);
            for i in 0..n {
                for j in 0..m {
                    let mut acc = 0u64;
                    for l in 0..k {
                        acc += a[i * k + l] * b[l * m + j];
                    }
                    out.push(gf.from_u64(acc % p));
                }
            }
            return Mat {
                rows: n,
                cols: m,
                data: out,
            };
        }
        let mut a = alloc::vec![0u64; n * k * md];
        for (e, x) in self.data.iter().enumerate() {
            a[e * md..(e + 1) * md].copy_from_slice(x.digits());
        }
        let mut b = alloc::vec![0u64; k * m * md];
        for (e, x) in other.data.iter().enumerate() {
            b[e * md..(e + 1) * md].copy_from_slice(x.digits());
        }
        let mut out = Vec::with_capacity(n * m);
        let mut scratch = alloc::vec![0u64; 2 * md - 1];
        for i in 0..n {
            for j in 0..m {
                scratch.iter_mut().for_each(|s| *s = 0);
                for l in 0..k {
                    let ad = &a[(i * k + l) * md..(i * k + l + 1) * md];
                    let bd = &b[(l * m + j) * md..(l * m + j + 1) * md];
                    for (s, &av) in ad.iter().enumerate() {
                        if av == 0 {
                            continue;
                        }
                        for (t, &bv) in bd.iter().enumerate() {
                            scratch[s + t] += av * bv;
                        }
                    }
                }
                out.push(gf.reduce_product_digits(&mut scratch));
            }
        }
        Mat {
            rows: n,
            cols: m,
            data: out,
        }
    }

    pub fn matvec(&self, gf: &Gf, v: &[GfElt]) -> Vec<GfElt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = gf.zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !gf.is_zero(a) {
                        acc = gf.add(&acc, &gf.mul(a, &v[j]));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, gf: &Gf, mut e: u64) -> Mat {
        assert_eq!(self.rows, self.cols);
        let mut acc = Mat::identity(gf, self.rows);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(gf, &b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(gf, &b);
            }
        }
        acc
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Mat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Reduced row echelon form; returns the pivot column indices.
    pub fn rref(&self, gf: &Gf) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut pivot = None;
            for i in r..m.rows {
                if !gf.is_zero(m.get(i, c)) {
                    pivot = Some(i);
                    break;
                }
            }
            let Some(pi) = pivot else { continue };
            // swap rows pi and r
            if pi != r {
                for j in 0..m.cols {
                    let a = m.get(r, j).clone();
                    let b = m.get(pi, j).clone();
                    m.set(r, j, b);
                    m.set(pi, j, a);
                }
            }
            let inv = gf.inv(m.get(r, c)).expect("pivot nonzero");
            for j in c..m.cols {
                let v = gf.mul(&inv, m.get(r, j));
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || gf.is_zero(m.get(i, c)) {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = gf.sub(m.get(i, j), &gf.mul(&f, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, gf: &Gf) -> usize {
        self.rref(gf).1.len()
    }

    /// A basis of the right kernel, one `Vec` per basis vector.
    pub fn kernel_basis(&self, gf: &Gf) -> Vec<Vec<GfElt>> {
        let (r, pivots) = self.rref(gf);
        let mut is_pivot = alloc::vec![None; self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(row);
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = alloc::vec![gf.zero(); self.cols];
            v[free] = gf.one();
            for (c, rp) in is_pivot.iter().enumerate() {
                if let Some(row) = rp {
                    v[c] = gf.neg(r.get(*row, free));
                }
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of `self * x = rhs` with all free variables set to
    /// zero, or `None` if the system is inconsistent.
    pub fn solve(&self, gf: &Gf, rhs: &[GfElt]) -> Option<Vec<GfElt>> {
        assert_eq!(self.rows, rhs.len());
        let mut aug = Mat::zeros(gf, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, rhs[i].clone());
        }
        let (r, pivots) = aug.rref(gf);
        if pivots.contains(&self.cols) {
            return None; // pivot in the rhs column
        }
        let mut x = alloc::vec![gf.zero(); self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            x[c] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self, gf: &Gf) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let d = self.rows;
        let mut aug = Mat::zeros(gf, d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, d + i, gf.one());
        }
        let (r, pivots) = aug.rref(gf);
        if pivots.len() < d || pivots[d - 1] != d - 1 {
            return None;
        }
        let mut inv = Mat::zeros(gf, d, d);
        for i in 0..d {
            for j in 0..d {
                inv.set(i, j, r.get(i, d + j).clone());
            }
        }
        Some(inv)
    }

    /// Determinant by Gaussian elimination with pivoting.
    pub fn det(&self, gf: &Gf) -> GfElt {
        assert_eq!(self.rows, self.cols);
        let d = self.rows;
        let mut m = self.clone();
        let mut det = gf.one();
        for c in 0..d {
            let mut pivot = None;
            for i in c..d {
                if !gf.is_zero(m.get(i, c)) {
                    pivot = Some(i);
                    break;
                }
            }
            let Some(pi) = pivot else { return gf.zero() };
            if pi != c {
                det = gf.neg(&det);
                for j in 0..d {
                    let a = m.get(c, j).clone();
                    let b = m.get(pi, j).clone();
                    m.set(c, j, b);
                    m.set(pi, j, a);
                }
            }
            let pv = m.get(c, c).clone();
            det = gf.mul(&det, &pv);
            let inv = gf.inv(&pv).unwrap();
            for i in c + 1..d {
                if gf.is_zero(m.get(i, c)) {
                    continue;
                }
                let f = gf.mul(m.get(i, c), &inv);
                for j in c..d {
                    let v = gf.sub(m.get(i, j), &gf.mul(&f, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }
}

/// Horner evaluation of a polynomial at a square matrix.
pub fn eval_poly(gf: &Gf, f: &Poly, m: &Mat) -> Mat {
    let d = m.rows;
    let mut acc = Mat::zeros(gf, d, d);
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(gf, m);
        for i in 0..d {
            let v = gf.add(acc.get(i, i), c);
            acc.set(i, i, v);
        }
    }
    acc
}

/// Minimal polynomial via Krylov chains: for each start vector the first
/// linear dependence yields a local annihilator, and the lcm over start
/// vectors is the minimal polynomial.
pub fn minpoly(gf: &Gf, m: &Mat) -> Poly {
    assert_eq!(m.rows, m.cols);
    let d = m.rows;
    let mut acc = Poly::one(gf);
    for j in 0..d {
        if acc.degree() == Some(d) {
            break;
        }
        let mut e = alloc::vec![gf.zero(); d];
        e[j] = gf.one();
        let local = krylov_annihilator(gf, m, &e);
        acc = acc.lcm(gf, &local);
    }
    acc
}

/// Monic `g` of least degree with `g(M) v = 0`.
fn krylov_annihilator(gf: &Gf, m: &Mat, v: &[GfElt]) -> Poly {
    let d = m.rows;
    // echelon rows: (pivot index, reduced vector, expression over v_0..v_k)
    let mut ech: Vec<(usize, Vec<GfElt>, Vec<GfElt>)> = Vec::new();
    let mut cur = v.to_vec();
    for step in 0..=d {
        // reduce cur against the echelon, tracking the expression
        let mut r = cur.clone();
        let mut expr = alloc::vec![gf.zero(); step + 1];
        expr[step] = gf.one();
        for (pi, vecr, ex) in &ech {
            let c = r[*pi].clone();
            if gf.is_zero(&c) {
                continue;
            }
            for i in 0..d {
                r[i] = gf.sub(&r[i], &gf.mul(&c, &vecr[i]));
            }
            for (i, x) in ex.iter().enumerate() {
                expr[i] = gf.sub(&expr[i], &gf.mul(&c, x));
            }
        }
        if let Some(pi) = (0..d).find(|&i| !gf.is_zero(&r[i])) {
            // normalize pivot to 1 and store
            let inv = gf.inv(&r[pi]).unwrap();
            let vecr: Vec<GfElt> = r.iter().map(|x| gf.mul(&inv, x)).collect();
            let ex: Vec<GfElt> = expr.iter().map(|x| gf.mul(&inv, x)).collect();
            ech.push((pi, vecr, ex));
            cur = m.matvec(gf, &cur);
        } else {
            // dependence: expr gives coefficients of sum c_i M^i v = 0
            return Poly::from_coeffs(gf, expr).monic(gf);
        }
    }
    unreachable!("dependence must occur within dim + 1 steps")
}

/// Jordan block sizes (descending) of a nilpotent matrix, from the rank
/// sequence of its powers: the number of blocks of size at least `s`
/// equals `rank(A^{s-1}) - rank(A^s)`.
pub fn nilpotent_jordan_profile(gf: &Gf, m: &Mat) -> Vec<usize> {
    let d = m.rows;
    let mut ranks = alloc::vec![d];
    let mut pw = m.clone();
    loop {
        let r = pw.rank(gf);
        ranks.push(r);
        if r == 0 {
            break;
        }
        assert!(ranks.len() <= d + 1, "matrix is not nilpotent");
        pw = pw.mul(gf, m);
    }
    let ge = |s: usize| ranks[s - 1] - ranks[s];
    let max = ranks.len() - 1;
    let mut profile = Vec::new();
    for s in (1..=max).rev() {
        let count = if s == max { ge(s) } else { ge(s) - ge(s + 1) };
        for _ in 0..count {
            profile.push(s);
        }
    }
    profile
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_mat(gf: &Gf, d: usize, rng: &mut ChaCha8Rng) -> Mat {
        Mat::from_fn(gf, d, d, |_, _| gf.from_u64(rng.gen_range(0..gf.p())))
    }

    #[test]
    fn rank_kernel_solve() {
        let gf = Gf::new(5, 1).unwrap();
        let m = Mat::from_rows(alloc::vec![
            alloc::vec![gf.from_u64(1), gf.from_u64(2), gf.from_u64(3)],
            alloc::vec![gf.from_u64(2), gf.from_u64(4), gf.from_u64(2)],
        ]);
        assert_eq!(m.rank(&gf), 2);
        let ker = m.kernel_basis(&gf);
        assert_eq!(ker.len(), 1);
        for v in &ker {
            assert!(m.matvec(&gf, v).iter().all(|x| gf.is_zero(x)));
        }
        let rhs = alloc::vec![gf.from_u64(1), gf.from_u64(2)];
        let x = m.solve(&gf, &rhs).unwrap();
        assert_eq!(m.matvec(&gf, &x), rhs);
    }

    #[test]
    fn inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (p, m) in [(5u64, 1usize), (3, 2)] {
            let gf = Gf::new(p, m).unwrap();
            let mut found = 0;
            while found < 50 {
                let d = rng.gen_range(1..=6);
                let a = Mat::from_fn(&gf, d, d, |_, _| {
                    gf.elt_from_index(rng.gen_range(0..gf.size()))
                });
                if let Some(inv) = a.inverse(&gf) {
                    assert_eq!(a.mul(&gf, &inv), Mat::identity(&gf, d));
                    assert_eq!(inv.mul(&gf, &a), Mat::identity(&gf, d));
                    found += 1;
                }
            }
        }
    }

    #[test]
    fn det_matches_rank_and_charpoly() {
        let gf = Gf::new(7, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let d = rng.gen_range(1..=5);
            let a = rand_mat(&gf, d, &mut rng);
            let det = a.det(&gf);
            assert_eq!(gf.is_zero(&det), a.rank(&gf) < d);
            // det = (-1)^d * constant term of charpoly
            let c = crate::charpoly::charpoly(&gf, a.data(), d);
            let mut sign_det = det.clone();
            if d % 2 == 1 {
                sign_det = gf.neg(&sign_det);
            }
            assert_eq!(c[0], sign_det);
        }
    }

    #[test]
    fn cayley_hamilton_random_sizes() {
        // charpoly(M) evaluated at M is the zero matrix
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, m) in [(3u64, 1usize), (5, 1), (3, 2)] {
            let gf = Gf::new(p, m).unwrap();
            for _ in 0..50 {
                let d = rng.gen_range(1..=9);
                let a = Mat::from_fn(&gf, d, d, |_, _| {
                    gf.elt_from_index(rng.gen_range(0..gf.size()))
                });
                let c = crate::charpoly::charpoly(&gf, a.data(), d);
                let f = Poly::from_coeffs(&gf, c);
                assert!(eval_poly(&gf, &f, &a).is_zero(&gf));
            }
        }
    }

    #[test]
    fn cayley_hamilton_all_sizes() {
        // 50 random matrices at every dimension up to the largest in use
        let gf = Gf::new(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for d in 1..=27 {
            for _ in 0..50 {
                let a = rand_mat(&gf, d, &mut rng);
                let c = crate::charpoly::charpoly(&gf, a.data(), d);
                let f = Poly::from_coeffs(&gf, c);
                assert!(eval_poly(&gf, &f, &a).is_zero(&gf));
            }
        }
    }

    #[test]
    fn minpoly_divides_charpoly_and_annihilates() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for p in [3u64, 5] {
            let gf = Gf::new(p, 1).unwrap();
            for _ in 0..100 {
                let d = rng.gen_range(1..=6);
                let a = rand_mat(&gf, d, &mut rng);
                let mp = minpoly(&gf, &a);
                assert!(eval_poly(&gf, &mp, &a).is_zero(&gf));
                let cp = Poly::from_coeffs(&gf, crate::charpoly::charpoly(&gf, a.data(), d));
                let (_, r) = cp.divrem(&gf, &mp).unwrap();
                assert!(r.is_zero());
            }
        }
    }

    #[test]
    fn jordan_profile_of_shift_blocks() {
        let gf = Gf::new(5, 1).unwrap();
        // nilpotent with blocks 3 and 2
        let mut a = Mat::zeros(&gf, 5, 5);
        a.set(0, 1, gf.one());
        a.set(1, 2, gf.one());
        a.set(3, 4, gf.one());
        assert_eq!(nilpotent_jordan_profile(&gf, &a), alloc::vec![3, 2]);
    }

    #[test]
    fn prime_field_fast_path_matches_generic() {
        let gf = Gf::new(7, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let d = rng.gen_range(1..=8);
            let a = rand_mat(&gf, d, &mut rng);
            let b = rand_mat(&gf, d, &mut rng);
            let fast = a.mul(&gf, &b);
            // generic path: force it by computing entries directly
            let mut slow = Mat::zeros(&gf, d, d);
            for i in 0..d {
                for j in 0..d {
                    let mut acc = gf.zero();
                    for k in 0..d {
                        acc = gf.add(&acc, &gf.mul(a.get(i, k), b.get(k, j)));
                    }
                    slow.set(i, j, acc);
                }
            }
            assert_eq!(fast, slow);
        }
    }
}
