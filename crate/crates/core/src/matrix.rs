//! Dense matrices over a [`Field`].
//!
//! Over `F_p` rank is plain Gaussian elimination. Over `Q` the rank is
//! computed exactly in two stages: the rank modulo a large prime is a
//! certified lower bound, and it is accepted only once the modular kernel has
//! been lifted by CRT and rational reconstruction to vectors that are checked
//! to be in the kernel over `Q`. Anything that fails to certify falls back to
//! fraction-free Bareiss elimination over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::field::{large_primes, Field, Rationals};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<K: Field> {
    field: K,
    rows: usize,
    cols: usize,
    data: Vec<K::Elem>,
}

impl<K: Field> Matrix<K> {
    pub fn zeros(field: &K, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &K, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &K, rows: Vec<Vec<K::Elem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            field: field.clone(),
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(field: &K, rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn field(&self) -> &K {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &K::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: K::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &K::Elem) {
        let idx = i * self.cols + j;
        self.data[idx] = self.field.add(&self.data[idx], v);
    }

    pub fn row(&self, i: usize) -> &[K::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<K::Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<K::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !f.is_zero(b) {
                        out.add_to(i, j, &f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[K::Elem]) -> Vec<K::Elem> {
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect()
    }

    /// Stack `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Place `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(&self.field, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(&self.field, self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.field.rank(self)
    }

    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }

    /// Rank by Gaussian elimination with field division.
    pub fn rank_gauss(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !f.is_zero(self.get(i, c))) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = f.inv(self.get(r, c)).unwrap();
            for j in c..self.cols {
                let v = f.mul(self.get(r, j), &inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || f.is_zero(self.get(i, c)) {
                    continue;
                }
                let factor = self.get(i, c).clone();
                for j in c..self.cols {
                    let v = f.sub(self.get(i, j), &f.mul(&factor, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<K::Elem>> {
        let f = &self.field;
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![f.zero(); self.cols];
                v[fc] = f.one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(m.get(row, fc));
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = self.hstack(&Self::identity(&self.field, n));
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(aug.select_columns(&cols))
    }

    pub fn det(&self) -> K::Elem {
        assert_eq!(self.rows, self.cols);
        let f = self.field.clone();
        let mut m = self.clone();
        let mut det = f.one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
                return f.zero();
            };
            if p != c {
                m.swap_rows(c, p);
                det = f.neg(&det);
            }
            let pivot = m.get(c, c).clone();
            det = f.mul(&det, &pivot);
            let inv = f.inv(&pivot).unwrap();
            for i in c + 1..m.rows {
                if f.is_zero(m.get(i, c)) {
                    continue;
                }
                let factor = f.mul(m.get(i, c), &inv);
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn convert<L: Field>(&self, target: &L) -> crate::error::Result<Matrix<L>> {
        let data = self
            .data
            .iter()
            .map(|x| target.from_rational(&self.field.to_rational(x)))
            .collect::<crate::error::Result<Vec<_>>>()?;
        Ok(Matrix {
            field: target.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

impl Matrix<Rationals> {
    /// Rank by fraction-free Bareiss elimination only.
    pub fn rank_bareiss(&self) -> usize {
        bareiss_rank(integer_rows(self), self.cols)
    }
}

/// Scale each row by the lcm of its denominators.
fn integer_rows(m: &Matrix<Rationals>) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * &lcm).to_integer()).collect()
        })
        .collect()
}

pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = &pivot_row[c];
        for row in rest.iter_mut() {
            let lead = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let v = pivot * &row[j] - &lead * &pivot_row[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = pivot.clone();
        r += 1;
    }
    r
}

/// RREF of an integer matrix modulo `p`; returns pivots and the reduced rows.
fn rref_mod(ints: &[Vec<BigInt>], cols: usize, p: u32) -> (Vec<usize>, Vec<Vec<u64>>) {
    let pm = p as u64;
    let big_p = BigInt::from(p);
    let mut a: Vec<Vec<u64>> = ints
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    if x.is_zero() {
                        0
                    } else {
                        x.mod_floor(&big_p).to_u64().unwrap()
                    }
                })
                .collect()
        })
        .collect();
    let rows = a.len();
    let inv = |x: u64| -> u64 {
        let mut acc = 1u64;
        let mut base = x;
        let mut e = pm - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % pm;
            }
            base = base * base % pm;
            e >>= 1;
        }
        acc
    };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let iv = inv(a[r][c]);
        for x in a[r][c..].iter_mut() {
            *x = *x * iv % pm;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let factor = pm - row[c];
            for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                if *y != 0 {
                    *x = (*x + factor * y) % pm;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (pivots, a)
}

fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    // Find n/d = a mod m with |n|, d <= sqrt(m/2).
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

const MAX_PRIMES: usize = 80;

pub(crate) fn rational_rank(m: &Matrix<Rationals>) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    if rows == 0 || cols == 0 {
        return 0;
    }
    let ints = integer_rows(m);
    let full = rows.min(cols);

    // Current candidate: rank, pivots, CRT state over pivot-row x free-col entries.
    struct Candidate {
        pivots: Vec<usize>,
        free: Vec<usize>,
        residues: Vec<BigInt>,
        modulus: BigInt,
        last: Option<Vec<BigRational>>,
    }
    let mut cand: Option<Candidate> = None;

    for &p in large_primes().iter().take(MAX_PRIMES) {
        let (pivots, reduced) = rref_mod(&ints, cols, p);
        if pivots.len() == full {
            return full;
        }
        let entries: Vec<u64> = {
            let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
            reduced
                .iter()
                .flat_map(|row| free.iter().map(move |&f| row[f]))
                .collect()
        };
        let restart = match &cand {
            None => true,
            Some(c) => {
                pivots.len() > c.pivots.len()
                    || (pivots.len() == c.pivots.len() && pivots != c.pivots)
            }
        };
        if restart {
            let free = (0..cols).filter(|c| !pivots.contains(c)).collect();
            cand = Some(Candidate {
                pivots,
                free,
                residues: entries.iter().map(|&e| BigInt::from(e)).collect(),
                modulus: BigInt::from(p),
                last: None,
            });
            continue;
        }
        let c = cand.as_mut().unwrap();
        if pivots.len() < c.pivots.len() {
            continue;
        }
        let pb = BigInt::from(p);
        let m_inv = {
            let mm = c.modulus.mod_floor(&pb).to_u64().unwrap();
            let mut acc = 1u64;
            let mut base = mm;
            let mut e = p as u64 - 2;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * base % p as u64;
                }
                base = base * base % p as u64;
                e >>= 1;
            }
            BigInt::from(acc)
        };
        for (res, &e) in c.residues.iter_mut().zip(&entries) {
            let diff = (BigInt::from(e) - &*res).mod_floor(&pb);
            let k = (diff * &m_inv).mod_floor(&pb);
            *res += &c.modulus * k;
        }
        c.modulus *= &pb;
        let recon: Option<Vec<BigRational>> = c
            .residues
            .iter()
            .map(|r| rational_reconstruct(r, &c.modulus))
            .collect();
        let Some(recon) = recon else {
            c.last = None;
            continue;
        };
        if c.last.as_ref() == Some(&recon) && verify_kernel(&ints, &c.pivots, &c.free, &recon) {
            return c.pivots.len();
        }
        c.last = Some(recon);
    }
    bareiss_rank(ints, cols)
}

fn verify_kernel(
    ints: &[Vec<BigInt>],
    pivots: &[usize],
    free: &[usize],
    entries: &[BigRational],
) -> bool {
    let nf = free.len();
    for (fi, &fc) in free.iter().enumerate() {
        // v[fc] = 1, v[pivot_r] = -entries[r][fi]
        let col: Vec<&BigRational> = (0..pivots.len()).map(|r| &entries[r * nf + fi]).collect();
        let den = col.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let coeffs: Vec<BigInt> = col.iter().map(|x| (*x * &den).to_integer()).collect();
        for row in ints {
            let mut acc = &row[fc] * &den;
            for (r, &pc) in pivots.iter().enumerate() {
                if !row[pc].is_zero() && !coeffs[r].is_zero() {
                    acc -= &row[pc] * &coeffs[r];
                }
            }
            if !acc.is_zero() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn identity_and_zero() {
        let q = Rationals;
        assert_eq!(Matrix::identity(&q, 2).rank(), 2);
        assert_eq!(Matrix::zeros(&q, 3, 5).rank(), 0);
        assert_eq!(Matrix::zeros(&q, 3, 5).kernel_dim(), 5);
        assert_eq!(Matrix::identity(&q, 4).kernel_dim(), 0);
    }

    #[test]
    fn deficient_rank_certified() {
        // rank 2: third row = first + second, fourth column = 2*first column
        let q = Rationals;
        let m = Matrix::from_i64(&q, &[vec![1, 2, 3, 2], vec![4, 5, 6, 8], vec![5, 7, 9, 10]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.rank_bareiss(), 2);
        assert_eq!(m.rank_gauss(), 2);
    }

    #[test]
    fn rank_differs_by_characteristic() {
        let m = [vec![2, 0], vec![0, 3]];
        assert_eq!(Matrix::from_i64(&Rationals, &m).rank(), 2);
        assert_eq!(Matrix::from_i64(&PrimeField::new(3).unwrap(), &m).rank(), 1);
    }

    #[test]
    fn kernel_and_inverse() {
        let q = Rationals;
        let m = Matrix::from_i64(&q, &[vec![1, 2, 3], vec![2, 4, 6]]);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        let a = Matrix::from_i64(&q, &[vec![2, 1], vec![7, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(&q, 2));
        assert_eq!(a.det(), q.from_i64(1));
        assert!(Matrix::from_i64(&q, &[vec![1, 2], vec![2, 4]])
            .inverse()
            .is_none());
    }

    #[test]
    fn reconstruction_roundtrip() {
        let m = BigInt::from(2147483647u64) * BigInt::from(2147483629u64);
        let x = BigRational::new((-1234).into(), 577.into());
        let inv = {
            let e = BigInt::from(577).extended_gcd(&m);
            e.x.mod_floor(&m)
        };
        let a = (BigInt::from(-1234) * inv).mod_floor(&m);
        assert_eq!(rational_reconstruct(&a, &m), Some(x));
    }
}
