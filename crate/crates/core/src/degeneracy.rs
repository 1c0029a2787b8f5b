//! The degeneracy locus `D(A) = {x : rank A(x) <= k - 1}`, the index `tau`,
//! and the reduction of boundary maps to their normal form.
//!
//! For `k = 2` the dimension is exact. A point `x` lies in `D(A)` iff some
//! combination `alpha row_0 + beta row_1` vanishes at `x`, so `D(A)` is the
//! union over `omega` of `P(ker N(omega))` with `N = (alpha U + beta V)^T`.
//! Outside the common kernel `K0` of all entries each `x` meets at most one
//! `omega`, which gives
//! `dim D = max(kappa_max - 1, kappa_gen if kappa_gen > dim K0)` where
//! `kappa` is the nullity of `N` at a generic and at the worst `omega`.
//! For `k >= 3` the dimension is estimated over `F_p` by point enumeration
//! and random linear slicing: a level of `c` hyperplanes counts as hit when
//! at least a third of the trials meet `D(A)`, which absorbs both chance
//! incidences (probability about `deg/p`) and slices without rational points.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, FieldDesc, PrimeField};
use crate::git::{analyze_pencil, git_verdict, Status};
use crate::matrix::Matrix;
use crate::model::{Coeffs, GroupElement, KroneckerMap, Pencil};

/// Rank of the `k x (m+k)` scalar matrix `A(x)`.
pub fn rank_at_point(a: &KroneckerMap, x: &[BigRational]) -> Result<usize> {
    let d = a.dims();
    if x.len() != d.v() {
        return Err(Error::Dimensions(format!(
            "point needs {} coordinates",
            d.v()
        )));
    }
    with_field!(a.field(), |f| {
        let c = a.coeffs_in(&f)?;
        let pt = x
            .iter()
            .map(|q| f.from_rational(q))
            .collect::<Result<Vec<_>>>()?;
        if pt.iter().all(|v| f.is_zero(v)) {
            return Err(Error::Precondition("the zero vector is not a point".into()));
        }
        Ok(c.evaluate(&pt).rank())
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Exact for `k = 2`, enumeration or slicing otherwise.
    Auto,
    Exact,
    Enumeration,
    Slicing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegeneracyReport {
    /// `-1` for the empty locus.
    pub dim_estimate: i64,
    pub method: Strategy,
    pub exact: bool,
    pub prime: Option<u32>,
    pub trials: usize,
    pub seed: u64,
    /// Number of `F_p`-points of `D(A)` (enumeration only).
    pub points: Option<u64>,
    /// Entry `c`: how many trials found a point of `D(A)` on the
    /// intersection of `c` random hyperplanes. Levels above the reported
    /// dimension are all recorded; lower levels are not visited.
    pub slice_hits: Vec<usize>,
    pub tau: i64,
    /// Dimension of the locus where `A(x) = 0`; always exact.
    pub dim_d0: i64,
    pub codim: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

pub fn tau(dim: i64) -> i64 {
    (dim + 2).max(1)
}

/// `dim K0`, the common kernel of all coefficient vectors.
fn common_kernel_dim<K: Field>(c: &Coeffs<K>) -> usize {
    let d = c.dims;
    let rows: Vec<Vec<K::Elem>> = (0..d.k)
        .flat_map(|i| (0..d.w()).map(move |j| (i, j)))
        .map(|(i, j)| c.form(i, j).to_vec())
        .collect();
    d.v() - Matrix::from_rows(&c.field, rows).rank()
}

/// Exact `dim D(A)` for `k = 2`.
pub fn exact_dimension<K: Field>(c: &Coeffs<K>) -> Result<i64> {
    let d = c.dims;
    if d.k != 2 {
        return Err(Error::Unsupported(
            "exact degeneracy dimension needs k = 2".into(),
        ));
    }
    let pencil = Pencil::from_slices(c.slice(0).transpose(), c.slice(1).transpose());
    let an = analyze_pencil(&pencil);
    let kappa_gen = (d.v() - an.normal_rank) as i64;
    let kappa_max = (d.v() - an.min_rank) as i64;
    let k0 = common_kernel_dim(c) as i64;
    let generic = if kappa_gen > k0 { kappa_gen } else { -1 };
    Ok((kappa_max - 1).max(generic))
}

fn projective_points(p: u32, dim: usize) -> u64 {
    let p = p as u64;
    (0..=dim as u32)
        .map(|e| p.saturating_pow(e))
        .fold(0u64, |a, b| a.saturating_add(b))
}

/// Call `visit` on one representative of every point of `P^dim(F_p)`.
fn for_each_point(p: u32, dim: usize, mut visit: impl FnMut(&[u32]) -> bool) {
    let mut x = vec![0u32; dim + 1];
    for lead in 0..=dim {
        x.iter_mut().for_each(|v| *v = 0);
        x[lead] = 1;
        loop {
            if !visit(&x) {
                return;
            }
            let mut i = lead + 1;
            while i <= dim {
                x[i] += 1;
                if x[i] < p {
                    break;
                }
                x[i] = 0;
                i += 1;
            }
            if i > dim {
                break;
            }
        }
    }
}

const ENUMERATION_LIMIT: u64 = 300_000;

pub fn degeneracy_dimension(
    a: &KroneckerMap,
    p: u32,
    strategy: Strategy,
    trials: usize,
    seed: u64,
) -> Result<DegeneracyReport> {
    let d = a.dims();
    let trials = trials.max(1);
    let exact_ok = d.k == 2;
    let strategy = match strategy {
        Strategy::Auto if exact_ok => Strategy::Exact,
        Strategy::Auto if projective_points(p, d.n) <= ENUMERATION_LIMIT => Strategy::Enumeration,
        Strategy::Auto => Strategy::Slicing,
        s => s,
    };
    let dim_d0 = with_field!(a.field(), |f| common_kernel_dim(&a.coeffs_in(&f)?) as i64
        - 1);
    let mut report = DegeneracyReport {
        dim_estimate: -1,
        method: strategy,
        exact: strategy == Strategy::Exact,
        prime: None,
        trials,
        seed,
        points: None,
        slice_hits: Vec::new(),
        tau: 1,
        dim_d0,
        codim: 0,
        warning: None,
    };
    if strategy == Strategy::Exact {
        report.dim_estimate = with_field!(a.field(), |f| exact_dimension(&a.coeffs_in(&f)?)?);
    } else {
        let reduced = match a.field() {
            FieldDesc::Q => a.reduce_mod(p).map_err(|e| match e {
                Error::Precondition(_) => Error::BadReduction { p },
                other => other,
            })?,
            FieldDesc::Fp { p: q } if q == p => a.clone(),
            FieldDesc::Fp { p: q } => {
                return Err(Error::Unsupported(format!("map is over F_{q}, not F_{p}")))
            }
        };
        let f = PrimeField::new(p as u64)?;
        let c = reduced.coeffs_in(&f)?;
        report.prime = Some(p);
        if (p as usize) < 2 * d.w() {
            report.warning = Some(format!(
                "p = {p} is small against the degree bound {}; estimate is weak",
                d.w()
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let degenerate = |x: &[u32]| c.evaluate(x).rank() < d.k;
        let points: Option<Vec<Vec<u32>>> = (strategy == Strategy::Enumeration).then(|| {
            let mut pts = Vec::new();
            for_each_point(p, d.n, |x| {
                if degenerate(x) {
                    pts.push(x.to_vec());
                }
                true
            });
            pts
        });
        report.points = points.as_ref().map(|v| v.len() as u64);
        // Does the linear subspace cut out by `hs` meet D(A)?
        let meets = |hs: Vec<Vec<u32>>| -> bool {
            if let Some(pts) = &points {
                return pts.iter().any(|x| hs.iter().all(|h| dot(&f, h, x) == 0));
            }
            let basis = if hs.is_empty() {
                Matrix::<PrimeField>::identity(&f, d.v()).rows_vec()
            } else {
                Matrix::from_rows(&f, hs).kernel_basis()
            };
            if basis.is_empty() {
                return false;
            }
            let mut found = false;
            for_each_point(p, basis.len() - 1, |y| {
                let x: Vec<u32> = (0..d.v())
                    .map(|l| {
                        basis
                            .iter()
                            .zip(y)
                            .fold(0, |acc, (b, yi)| f.add(&acc, &f.mul(&b[l], yi)))
                    })
                    .collect();
                found = degenerate(&x);
                !found
            });
            found
        };
        let threshold = trials.div_ceil(3);
        let mut hits = vec![0usize; d.n + 1];
        report.dim_estimate = -1;
        for cut in (0..=d.n).rev() {
            let rounds = if cut == 0 { 1 } else { trials };
            for _ in 0..rounds {
                let hs: Vec<Vec<u32>> = (0..cut)
                    .map(|_| (0..d.v()).map(|_| rng.gen_range(0..p)).collect())
                    .collect();
                if meets(hs) {
                    hits[cut] += 1;
                }
            }
            if hits[cut] >= threshold.min(rounds) {
                report.dim_estimate = cut as i64;
                break;
            }
        }
        report.slice_hits = hits;
        report.dim_estimate = report.dim_estimate.max(dim_d0);
    }
    report.tau = tau(report.dim_estimate);
    report.codim = d.n as i64 - report.dim_estimate;
    Ok(report)
}

fn dot(f: &PrimeField, h: &[u32], x: &[u32]) -> u32 {
    h.iter()
        .zip(x)
        .fold(0, |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationReport {
    pub sigma: i64,
    pub tau: i64,
    pub status: Status,
    /// `sigma <= tau <= sigma + 1`.
    pub chain_holds: bool,
    /// `sigma >= 2` iff `tau >= 2`.
    pub second_step_holds: bool,
    /// The filtrations live in the semistable locus; for unstable maps the
    /// two checks are reported but carry no meaning.
    pub outside_semistable: bool,
    pub degeneracy: DegeneracyReport,
}

pub fn filtration_indices(
    a: &KroneckerMap,
    p: u32,
    trials: usize,
    seed: u64,
) -> Result<FiltrationReport> {
    let v = git_verdict(a)?;
    let sigma = v.sigma.expect("k = 2 verdicts carry sigma");
    let degeneracy = degeneracy_dimension(a, p, Strategy::Auto, trials, seed)?;
    let tau = degeneracy.tau;
    Ok(FiltrationReport {
        sigma,
        tau,
        status: v.status,
        chain_holds: sigma <= tau && tau <= sigma + 1,
        second_step_holds: (sigma >= 2) == (tau >= 2),
        outside_semistable: v.status == Status::Unstable,
        degeneracy,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Reduction {
    Reduced {
        g: GroupElement,
        normal_form: KroneckerMap,
    },
    NotBoundary {
        reason: String,
    },
}

/// Carry a stable boundary map (`m` odd, `codim D = t = (m+1)/2`) to
/// `boundary_normal_form(n, m)`.
pub fn normal_form_reduce(a: &KroneckerMap) -> Result<Reduction> {
    let d = a.dims();
    if d.k != 2 || d.m % 2 == 0 {
        return Err(Error::Precondition(
            "normal form needs k = 2 and m odd".into(),
        ));
    }
    let v = git_verdict(a)?;
    if v.status != Status::Stable {
        return Err(Error::Precondition("normal form needs a stable map".into()));
    }
    with_field!(a.field(), |f| normal_form_in(a, &f))
}

fn not_boundary(reason: impl Into<String>) -> Result<Reduction> {
    Ok(Reduction::NotBoundary {
        reason: reason.into(),
    })
}

fn to_q<K: Field>(f: &K, m: &Matrix<K>) -> Matrix<crate::field::Rationals> {
    let q = crate::field::Rationals;
    let rows = (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| f.to_rational(x)).collect())
        .collect();
    Matrix::from_rows(&q, rows)
}

fn normal_form_in<K: Field>(a: &KroneckerMap, f: &K) -> Result<Reduction> {
    let d = a.dims();
    let t = (d.m + 1) / 2;
    if d.n + 1 < t + 2 {
        return not_boundary(format!("n + 1 = {} < t + 2 = {}", d.n + 1, t + 2));
    }
    let c = a.coeffs_in(f)?;
    let dim = exact_dimension(&c)?;
    if d.n as i64 - dim != t as i64 {
        return not_boundary(format!(
            "codim D(A) = {} differs from t = {t}",
            d.n as i64 - dim
        ));
    }
    // Two rational points omega = (alpha:beta) of P(I) with dim(omega (x) V ∩ T_A) = t.
    let pencil = Pencil::from_slices(c.slice(0), c.slice(1));
    let mut omegas: Vec<(K::Elem, K::Elem)> = Vec::new();
    let candidates = [
        (1, 0),
        (0, 1),
        (1, 1),
        (1, -1),
        (1, 2),
        (2, 1),
        (1, -2),
        (2, -1),
        (1, 3),
        (3, 1),
    ];
    for (x, y) in candidates {
        let (al, be) = (f.from_i64(x), f.from_i64(y));
        if d.w() - pencil.at(&al, &be).rank() == t {
            omegas.push((al, be));
        }
        if omegas.len() == 2 {
            break;
        }
    }
    if omegas.len() < 2 {
        return not_boundary("fewer than two rational omega with dim(omega (x) V ∩ T_A) = t; reduction requires field extension");
    }
    // Rows transform by P = B^{-1}, B = [omega_1 omega_2] as columns.
    let b = Matrix::from_rows(
        f,
        vec![
            vec![omegas[0].0.clone(), omegas[1].0.clone()],
            vec![omegas[0].1.clone(), omegas[1].1.clone()],
        ],
    );
    let p = b.inverse().ok_or(Error::Singular("P"))?;
    let g_p = GroupElement {
        p: to_q(f, &p),
        q: Matrix::identity(&crate::field::Rationals, d.w()),
        s: None,
    };
    let a1 = g_p.act(a)?;
    let c1 = a1.coeffs_in(f)?;
    let (s0, s1) = (c1.slice(0), c1.slice(1));
    // K1: row 1 vanishes, so A(K1) lies in e_0 (x) V; K2 symmetric.
    let k1 = s1.kernel_basis();
    let k2 = s0.kernel_basis();
    if k1.len() != t || k2.len() != t {
        return not_boundary(format!(
            "slice nullities {} and {} differ from t = {t}",
            k1.len(),
            k2.len()
        ));
    }
    let fs: Vec<Vec<K::Elem>> = k1.iter().map(|w| s0.mul_vec(w)).collect();
    let gs: Vec<Vec<K::Elem>> = k2.iter().map(|w| s1.mul_vec(w)).collect();
    let both: Vec<Vec<K::Elem>> = fs.iter().chain(&gs).cloned().collect();
    if Matrix::from_rows(f, both).rank() != t {
        return not_boundary("<f_0..f_{t-1}> differs from <g_0..g_{t-1}>");
    }
    // Rebase K2 so that g_i = f_i: solve G^T r_i = f_i.
    let gt = Matrix::from_rows(f, gs.clone()).transpose();
    let mut k2_new = Vec::with_capacity(t);
    for fi in &fs {
        let aug = gt.hstack(&Matrix::from_rows(
            f,
            fi.iter().map(|x| vec![x.clone()]).collect(),
        ));
        let sol = aug
            .kernel_basis()
            .into_iter()
            .find(|v| !f.is_zero(&v[t]))
            .ok_or(Error::Singular("rebasing"))?;
        let scale = f.neg(&f.inv(&sol[t]).unwrap());
        let mut w = vec![f.zero(); d.w()];
        for (r, kv) in k2.iter().enumerate() {
            let coef = f.mul(&sol[r], &scale);
            for (wj, kj) in w.iter_mut().zip(kv) {
                *wj = f.add(wj, &f.mul(&coef, kj));
            }
        }
        k2_new.push(w);
    }
    // Complete K1 + K2 by one vector of W and clean it against both.
    let span = Matrix::from_rows(f, k1.iter().chain(&k2_new).cloned().collect());
    let mut last = span
        .kernel_basis()
        .into_iter()
        .next()
        .ok_or(Error::Singular("completion"))?;
    // The kernel of the span matrix is its orthogonal complement; any vector
    // outside the span works, so pick a unit vector if this one is inside.
    if Matrix::from_rows(
        f,
        k1.iter()
            .chain(&k2_new)
            .chain(std::iter::once(&last))
            .cloned()
            .collect(),
    )
    .rank()
        <= 2 * t
    {
        last = (0..d.w())
            .map(|j| {
                (0..d.w())
                    .map(|l| if l == j { f.one() } else { f.zero() })
                    .collect::<Vec<_>>()
            })
            .find(|e| {
                Matrix::from_rows(
                    f,
                    k1.iter()
                        .chain(&k2_new)
                        .chain(std::iter::once(e))
                        .cloned()
                        .collect(),
                )
                .rank()
                    > 2 * t
            })
            .ok_or(Error::Singular("completion"))?;
    }
    let reduce = |form: Vec<K::Elem>,
                  basis: &[Vec<K::Elem>],
                  ws: &[Vec<K::Elem>],
                  last: &mut Vec<K::Elem>|
     -> Vec<K::Elem> {
        // Write form = sum c_i basis_i + rest; subtract sum c_i ws_i from last.
        let bt = Matrix::from_rows(f, basis.to_vec()).transpose();
        let aug = bt.hstack(&Matrix::from_rows(
            f,
            form.iter().map(|x| vec![x.clone()]).collect(),
        ));
        if let Some(sol) = aug
            .kernel_basis()
            .into_iter()
            .find(|v| !f.is_zero(&v[basis.len()]))
        {
            let scale = f.neg(&f.inv(&sol[basis.len()]).unwrap());
            let mut out = form.clone();
            for (i, bi) in basis.iter().enumerate() {
                let coef = f.mul(&sol[i], &scale);
                for (o, x) in out.iter_mut().zip(bi) {
                    *o = f.sub(o, &f.mul(&coef, x));
                }
                for (l, x) in last.iter_mut().zip(&ws[i]) {
                    *l = f.sub(l, &f.mul(&coef, x));
                }
            }
            out
        } else {
            form
        }
    };
    let ft = s0.mul_vec(&last);
    let ft = reduce(ft, &fs, &k1, &mut last);
    let gt_form = s1.mul_vec(&last);
    let gt_form = reduce(gt_form, &fs, &k2_new, &mut last);
    let mut forms: Vec<Vec<K::Elem>> = fs.clone();
    forms.push(ft);
    forms.push(gt_form);
    if Matrix::from_rows(f, forms.clone()).rank() != t + 2 {
        return not_boundary("f_0..f_t, g_t are dependent (g_t lies in <f_0..f_t>)");
    }
    for l in 0..d.v() {
        if forms.len() == d.v() {
            break;
        }
        let mut e = vec![f.zero(); d.v()];
        e[l] = f.one();
        let mut trial = forms.clone();
        trial.push(e);
        if Matrix::from_rows(f, trial.clone()).rank() == trial.len() {
            forms = trial;
        }
    }
    // Coefficient vectors transform by S: S sends the chosen forms to unit vectors.
    let s = Matrix::from_rows(f, forms)
        .transpose()
        .inverse()
        .ok_or(Error::Singular("S"))?;
    let q_inv = Matrix::from_rows(
        f,
        k1.iter()
            .chain(&k2_new)
            .chain(std::iter::once(&last))
            .cloned()
            .collect(),
    )
    .transpose();
    let q = q_inv.inverse().ok_or(Error::Singular("Q"))?;
    let g = GroupElement {
        p: to_q(f, &p),
        q: to_q(f, &q),
        s: Some(to_q(f, &s)),
    };
    let out = g.act(a)?;
    let target = KroneckerMap::boundary_normal_form(d.n, d.m)?;
    let target = match a.field() {
        FieldDesc::Q => target,
        FieldDesc::Fp { p } => target.reduce_mod(p)?,
    };
    if out != target {
        return not_boundary("reduction did not reach the normal form");
    }
    Ok(Reduction::Reduced {
        g,
        normal_form: out,
    })
}
