//! The map `A : W -> I (x) V` and everything derived directly from it.
//!
//! Layout: a `k x (m + k)` grid of linear forms in `x_0..x_n`. Rows index a
//! basis of `I`, columns a basis of `W`, and the form in cell `(i, j)` is the
//! `V`-component of `A(w_j)` along `e_i`. The presentation matrix of the
//! cokernel sheaf is the transpose of this grid.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldDesc, Rationals};
use crate::forms::BinaryForm;
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dimensions {
    /// `P(V) = P^n`, so `dim V = n + 1`.
    pub n: usize,
    /// Rank of the cokernel sheaf; `dim W = m + k`.
    pub m: usize,
    /// `dim I`.
    pub k: usize,
}

impl Dimensions {
    pub fn new(n: usize, m: usize, k: usize) -> Result<Self> {
        let d = Dimensions { n, m, k };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let Dimensions { n, m, k } = *self;
        if k < 2 || n < 2 || m < 1 {
            return Err(Error::Dimensions(format!(
                "need k >= 2, n >= 2, m >= 1 (got n={n}, m={m}, k={k})"
            )));
        }
        if m + k > k * (n + 1) {
            return Err(Error::Dimensions(format!(
                "m + k = {} exceeds k(n+1) = {}",
                m + k,
                k * (n + 1)
            )));
        }
        Ok(())
    }

    pub fn w(&self) -> usize {
        self.m + self.k
    }
    pub fn v(&self) -> usize {
        self.n + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KroneckerMap {
    dims: Dimensions,
    field: FieldDesc,
    /// Flat `[i][j][l]`, lowest terms; canonical residues over `F_p`.
    coeffs: Vec<BigRational>,
}

/// The coefficients of a map converted into a concrete field.
#[derive(Clone, Debug)]
pub struct Coeffs<K: Field> {
    pub field: K,
    pub dims: Dimensions,
    data: Vec<K::Elem>,
}

impl<K: Field> Coeffs<K> {
    pub fn get(&self, i: usize, j: usize, l: usize) -> &K::Elem {
        let d = &self.dims;
        &self.data[(i * d.w() + j) * d.v() + l]
    }

    pub fn form(&self, i: usize, j: usize) -> &[K::Elem] {
        let d = &self.dims;
        let start = (i * d.w() + j) * d.v();
        &self.data[start..start + d.v()]
    }

    /// The `k(n+1) x (m+k)` matrix of `A` as a linear map `W -> I (x) V`;
    /// row `i * (n+1) + l`.
    pub fn flattening(&self) -> Matrix<K> {
        let d = self.dims;
        let mut out = Matrix::zeros(&self.field, d.k * d.v(), d.w());
        for i in 0..d.k {
            for j in 0..d.w() {
                for l in 0..d.v() {
                    out.set(i * d.v() + l, j, self.get(i, j, l).clone());
                }
            }
        }
        out
    }

    pub fn is_injective(&self) -> bool {
        self.flattening().rank() == self.dims.w()
    }

    /// `(n+1) x (m+k)` matrix of row `i`: column `j` is the coefficient
    /// vector of the form in cell `(i, j)`.
    pub fn slice(&self, i: usize) -> Matrix<K> {
        let d = self.dims;
        let mut out = Matrix::zeros(&self.field, d.v(), d.w());
        for j in 0..d.w() {
            for l in 0..d.v() {
                out.set(l, j, self.get(i, j, l).clone());
            }
        }
        out
    }

    /// The scalar `k x (m+k)` matrix at a point `x` of `P^n`.
    pub fn evaluate(&self, x: &[K::Elem]) -> Matrix<K> {
        let d = self.dims;
        let f = &self.field;
        let mut out = Matrix::zeros(f, d.k, d.w());
        for i in 0..d.k {
            for j in 0..d.w() {
                let v = self
                    .form(i, j)
                    .iter()
                    .zip(x)
                    .fold(f.zero(), |acc, (c, xl)| f.add(&acc, &f.mul(c, xl)));
                out.set(i, j, v);
            }
        }
        out
    }
}

impl KroneckerMap {
    /// `entries[i][j]` is the coefficient vector of the form in cell `(i, j)`.
    pub fn new(
        dims: Dimensions,
        field: FieldDesc,
        entries: Vec<Vec<Vec<BigRational>>>,
    ) -> Result<Self> {
        dims.validate()?;
        if entries.len() != dims.k {
            return Err(Error::Dimensions(format!(
                "expected {} rows, got {}",
                dims.k,
                entries.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(dims.k * dims.w() * dims.v());
        for (i, row) in entries.into_iter().enumerate() {
            if row.len() != dims.w() {
                return Err(Error::Dimensions(format!(
                    "row {i}: expected {} entries, got {}",
                    dims.w(),
                    row.len()
                )));
            }
            for (j, form) in row.into_iter().enumerate() {
                if form.len() != dims.v() {
                    return Err(Error::Dimensions(format!(
                        "entry ({i},{j}): expected {} coefficients, got {}",
                        dims.v(),
                        form.len()
                    )));
                }
                coeffs.extend(form);
            }
        }
        if let FieldDesc::Fp { p } = field {
            let f = crate::field::PrimeField::new(p as u64)?;
            for c in coeffs.iter_mut() {
                *c = f.to_rational(&f.from_rational(c)?);
            }
        }
        if coeffs.iter().all(Zero::is_zero) {
            return Err(Error::Precondition("the map is identically zero".into()));
        }
        Ok(KroneckerMap {
            dims,
            field,
            coeffs,
        })
    }

    /// Build from a grid of variable indices: `Some(l)` is `x_l`, `None` is 0.
    pub fn from_variables(n: usize, rows: &[Vec<Option<usize>>]) -> Result<Self> {
        let k = rows.len();
        let w = rows.first().map_or(0, Vec::len);
        if w < k {
            return Err(Error::Dimensions("fewer columns than rows".into()));
        }
        let dims = Dimensions::new(n, w - k, k)?;
        let entries = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| {
                        (0..=n)
                            .map(|l| {
                                if *cell == Some(l) {
                                    BigRational::one()
                                } else {
                                    BigRational::zero()
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self::new(dims, FieldDesc::Q, entries)
    }

    pub fn from_integers(dims: Dimensions, entries: &[Vec<Vec<i64>>]) -> Result<Self> {
        let e = entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|form| {
                        form.iter()
                            .map(|&c| BigRational::from_integer(c.into()))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self::new(dims, FieldDesc::Q, e)
    }

    pub fn dims(&self) -> Dimensions {
        self.dims
    }

    pub fn field(&self) -> FieldDesc {
        self.field
    }

    pub fn coeff(&self, i: usize, j: usize, l: usize) -> &BigRational {
        let d = &self.dims;
        &self.coeffs[(i * d.w() + j) * d.v() + l]
    }

    pub fn entries(&self) -> Vec<Vec<Vec<BigRational>>> {
        let d = self.dims;
        (0..d.k)
            .map(|i| {
                (0..d.w())
                    .map(|j| (0..d.v()).map(|l| self.coeff(i, j, l).clone()).collect())
                    .collect()
            })
            .collect()
    }

    pub fn coeffs_in<K: Field>(&self, f: &K) -> Result<Coeffs<K>> {
        let data = self
            .coeffs
            .iter()
            .map(|c| f.from_rational(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Coeffs {
            field: f.clone(),
            dims: self.dims,
            data,
        })
    }

    /// The same map read in `F_p`.
    pub fn reduce_mod(&self, p: u32) -> Result<Self> {
        let f = crate::field::PrimeField::new(p as u64)?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| f.from_rational(c).map(|r| f.to_rational(&r)))
            .collect::<Result<Vec<_>>>()?;
        if coeffs.iter().all(Zero::is_zero) {
            return Err(Error::Precondition(format!("map vanishes modulo {p}")));
        }
        Ok(KroneckerMap {
            dims: self.dims,
            field: FieldDesc::Fp { p },
            coeffs,
        })
    }

    pub fn is_injective(&self) -> Result<bool> {
        Ok(with_field!(self.field, |f| self
            .coeffs_in(&f)?
            .is_injective()))
    }

    /// Schwarzenberger-type band: row 0 carries `x_0..x_n` in columns
    /// `0..=n`, row 1 carries them in columns `m+1-n..=m+1`. For `m = n` this
    /// is the classical Schwarzenberger presentation; for `m != n` the shift
    /// is a convention.
    pub fn schwarzenberger(n: usize, m: usize) -> Result<Self> {
        Dimensions::new(n, m, 2)?;
        if n > m + 1 {
            return Err(Error::Dimensions(format!(
                "band of width {} does not fit in {} columns",
                n + 1,
                m + 2
            )));
        }
        let shift = m + 1 - n;
        let row0 = (0..m + 2).map(|j| (j <= n).then_some(j)).collect();
        let row1 = (0..m + 2)
            .map(|j| (j >= shift).then(|| j - shift))
            .collect();
        Self::from_variables(n, &[row0, row1])
    }

    /// Rows `[x_0..x_{t-1}, 0..0, x_t]` and `[0..0, x_0..x_{t-1}, x_{t+1}]`
    /// with `t = (m+1)/2`.
    pub fn boundary_normal_form(n: usize, m: usize) -> Result<Self> {
        if m % 2 == 0 {
            return Err(Error::Precondition(format!(
                "boundary normal form needs m odd (got {m})"
            )));
        }
        let t = (m + 1) / 2;
        if t + 2 > n + 1 {
            return Err(Error::Dimensions(format!(
                "need t + 2 = {} <= n + 1 = {}",
                t + 2,
                n + 1
            )));
        }
        Dimensions::new(n, m, 2)?;
        let mut row0 = vec![None; m + 2];
        let mut row1 = vec![None; m + 2];
        for i in 0..t {
            row0[i] = Some(i);
            row1[t + i] = Some(i);
        }
        row0[m + 1] = Some(t);
        row1[m + 1] = Some(t + 1);
        Self::from_variables(n, &[row0, row1])
    }

    /// Integer coefficients uniform in `[-bound, bound]`, deterministic in `seed`.
    pub fn random(dims: Dimensions, seed: u64, bound: i64) -> Result<Self> {
        dims.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let entries: Vec<Vec<Vec<BigRational>>> = (0..dims.k)
                .map(|_| {
                    (0..dims.w())
                        .map(|_| {
                            (0..dims.v())
                                .map(|_| {
                                    BigRational::from_integer(BigInt::from(
                                        rng.gen_range(-bound..=bound),
                                    ))
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect();
            match Self::new(dims, FieldDesc::Q, entries) {
                Err(Error::Precondition(_)) => continue,
                other => return other,
            }
        }
    }

    pub fn pencil<K: Field>(&self, f: &K) -> Result<Pencil<K>> {
        Pencil::of(&self.coeffs_in(f)?)
    }
}

/// An element of `GL(I) x GL(W)`, optionally with `GL(V)`.
///
/// It acts by `A -> (P (x) S) . A . Q^{-1}`: rows of the grid mix through
/// `P`, columns through `Q^{-1}`, coefficient vectors through `S`. This is a
/// left action. Scalars act trivially on the projective point, so no
/// determinant normalization is done.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub p: Matrix<Rationals>,
    pub q: Matrix<Rationals>,
    pub s: Option<Matrix<Rationals>>,
}

impl GroupElement {
    pub fn identity(dims: Dimensions) -> Self {
        GroupElement {
            p: Matrix::identity(&Rationals, dims.k),
            q: Matrix::identity(&Rationals, dims.w()),
            s: None,
        }
    }

    /// Random invertible integer matrices with entries in `[-2, 2]`.
    pub fn random(dims: Dimensions, seed: u64, with_v: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut invertible = |n: usize| loop {
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect())
                .collect();
            let m = Matrix::from_i64(&Rationals, &rows);
            if m.rank() == n {
                return m;
            }
        };
        let p = invertible(dims.k);
        let q = invertible(dims.w());
        let s = with_v.then(|| invertible(dims.v()));
        GroupElement { p, q, s }
    }

    /// Group product `self . other`.
    pub fn compose(&self, other: &Self) -> Self {
        let s = match (&self.s, &other.s) {
            (None, None) => None,
            (a, b) => {
                let n = a.as_ref().or(b.as_ref()).unwrap().rows();
                let id = Matrix::identity(&Rationals, n);
                Some(a.as_ref().unwrap_or(&id).mul(b.as_ref().unwrap_or(&id)))
            }
        };
        GroupElement {
            p: self.p.mul(&other.p),
            q: self.q.mul(&other.q),
            s,
        }
    }

    pub fn act(&self, a: &KroneckerMap) -> Result<KroneckerMap> {
        let d = a.dims();
        if self.p.rows() != d.k
            || self.q.rows() != d.w()
            || self.s.as_ref().is_some_and(|s| s.rows() != d.v())
        {
            return Err(Error::Dimensions(
                "group element does not match the map".into(),
            ));
        }
        with_field!(a.field(), |f| act_in(self, a, &f))
    }
}

fn act_in<K: Field>(g: &GroupElement, a: &KroneckerMap, f: &K) -> Result<KroneckerMap> {
    let d = a.dims();
    let c = a.coeffs_in(f)?;
    let p = g.p.convert(f)?;
    let q_inv = g.q.convert(f)?.inverse().ok_or(Error::Singular("Q"))?;
    if p.rank() < d.k {
        return Err(Error::Singular("P"));
    }
    let s = match &g.s {
        Some(s) => {
            let s = s.convert(f)?;
            if s.rank() < d.v() {
                return Err(Error::Singular("S"));
            }
            Some(s)
        }
        None => None,
    };
    // Apply S to every coefficient vector, then P on rows, then Q^{-1} on columns.
    let mut stage = vec![vec![vec![f.zero(); d.v()]; d.w()]; d.k];
    for i in 0..d.k {
        for j in 0..d.w() {
            stage[i][j] = match &s {
                Some(s) => s.mul_vec(c.form(i, j)),
                None => c.form(i, j).to_vec(),
            };
        }
    }
    let mut rows = vec![vec![vec![f.zero(); d.v()]; d.w()]; d.k];
    for i in 0..d.k {
        for i2 in 0..d.k {
            let pc = p.get(i, i2);
            if f.is_zero(pc) {
                continue;
            }
            for j in 0..d.w() {
                for l in 0..d.v() {
                    rows[i][j][l] = f.add(&rows[i][j][l], &f.mul(pc, &stage[i2][j][l]));
                }
            }
        }
    }
    let mut out = vec![vec![vec![f.zero(); d.v()]; d.w()]; d.k];
    for i in 0..d.k {
        for j in 0..d.w() {
            for j2 in 0..d.w() {
                let qc = q_inv.get(j2, j);
                if f.is_zero(qc) {
                    continue;
                }
                for l in 0..d.v() {
                    out[i][j][l] = f.add(&out[i][j][l], &f.mul(&rows[i][j2][l], qc));
                }
            }
        }
    }
    let entries = out
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|form| form.iter().map(|x| f.to_rational(x)).collect())
                .collect()
        })
        .collect();
    KroneckerMap::new(d, a.field(), entries)
}

/// The two coefficient slices of a `k = 2` map. For `omega = (a:b) = a e_0 + b e_1`
/// the slice `M(a, b) = bU - aV` has kernel `{w : A(w) in omega (x) V}`, so
/// its nullity is `dim(R_omega ∩ T_A)` when `A` is injective.
#[derive(Clone, Debug)]
pub struct Pencil<K: Field> {
    pub u: Matrix<K>,
    pub v: Matrix<K>,
}

impl<K: Field> Pencil<K> {
    pub fn of(c: &Coeffs<K>) -> Result<Self> {
        if c.dims.k != 2 {
            return Err(Error::Unsupported(format!(
                "pencils need k = 2 (got k = {})",
                c.dims.k
            )));
        }
        if !c.is_injective() {
            return Err(Error::NotInjective);
        }
        Ok(Pencil {
            u: c.slice(0),
            v: c.slice(1),
        })
    }

    /// Build directly from two equally shaped matrices, no injectivity check.
    pub fn from_slices(u: Matrix<K>, v: Matrix<K>) -> Self {
        assert_eq!((u.rows(), u.cols()), (v.rows(), v.cols()));
        Pencil { u, v }
    }

    pub fn field(&self) -> &K {
        self.u.field()
    }

    pub fn at(&self, a: &K::Elem, b: &K::Elem) -> Matrix<K> {
        let f = self.field();
        let mut out = Matrix::zeros(f, self.u.rows(), self.u.cols());
        for i in 0..self.u.rows() {
            for j in 0..self.u.cols() {
                let x = f.sub(&f.mul(b, self.u.get(i, j)), &f.mul(a, self.v.get(i, j)));
                out.set(i, j, x);
            }
        }
        out
    }

    /// Entries of `bU - aV` as linear binary forms.
    pub fn forms(&self) -> Vec<Vec<BinaryForm<K::Elem>>> {
        let f = self.field();
        (0..self.u.rows())
            .map(|i| {
                (0..self.u.cols())
                    .map(|j| {
                        BinaryForm::linear(f, self.u.get(i, j).clone(), f.neg(self.v.get(i, j)))
                    })
                    .collect()
            })
            .collect()
    }
}
