//! GIT stability of `A` under `SL(I) x SL(W)`.
//!
//! For `k = 2` the proper subspaces of `I` are the points `omega` of `P^1`,
//! and `A` is stable (semistable) iff `dim(omega (x) V ∩ T_A) < (<=) (m+2)/2`
//! for every `omega`. The left side is the nullity of the pencil slice
//! `M(a, b)`, so its maximum is read off the determinantal divisors `g_j`:
//! the rank at a point is `>= j` exactly where `g_j` does not vanish.
//!
//! For `k >= 3` the slope condition `k dim T' < (m+k) dim I'` over all proper
//! `I'` is checked over a prime field, which certifies only the reduction.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{format_rational, Field, FieldDesc, PrimeField};
use crate::forms::{gcd_of_forms, minor_levels, BinaryForm};
use crate::matrix::Matrix;
use crate::model::{Coeffs, KroneckerMap, Pencil};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Stable,
    StrictlySemistable,
    Unstable,
}

impl Status {
    /// Classify `lhs` against `rhs` in the inequality `lhs < rhs`.
    fn compare(lhs: u64, rhs: u64) -> Self {
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Less => Status::Stable,
            std::cmp::Ordering::Equal => Status::StrictlySemistable,
            std::cmp::Ordering::Greater => Status::Unstable,
        }
    }

    fn worst(self, other: Self) -> Self {
        use Status::*;
        match (self, other) {
            (Unstable, _) | (_, Unstable) => Unstable,
            (StrictlySemistable, _) | (_, StrictlySemistable) => StrictlySemistable,
            _ => Stable,
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Stable => 0,
            Status::StrictlySemistable => 10,
            Status::Unstable => 11,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A point `omega = (a:b)` of `P(I)`.
    Point { omega: Vec<String> },
    /// Every point of `P^1` attains the maximum.
    Everywhere,
    /// No rational root: a binary form (coefficient of `a^i b^(d-i)` at index
    /// `i`) whose roots over the algebraic closure attain the maximum.
    Factor { coefficients: Vec<String> },
    /// A nonzero vector of `W` killed by `A`.
    Kernel { vector: Vec<String> },
    /// A subspace `I'` (rows span it) together with `dim T'`.
    Subspace {
        basis: Vec<Vec<String>>,
        dim_t: usize,
    },
}

fn fmt_vec<K: Field>(f: &K, v: &[K::Elem]) -> Vec<String> {
    v.iter()
        .map(|x| format_rational(&f.to_rational(x)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PencilAnalysis {
    pub normal_rank: usize,
    /// `deg g_j` for `j = 1..=normal_rank`.
    pub dd_degrees: Vec<usize>,
    pub min_rank: usize,
    pub max_nullity: usize,
    pub witness: Option<Witness>,
}

/// Determinantal-divisor analysis of `bU - aV`.
pub fn analyze_pencil<K: Field>(p: &Pencil<K>) -> PencilAnalysis {
    let f = p.field();
    let cols = p.u.cols();
    let entries = p.forms();
    let levels = minor_levels(f, &entries, usize::MAX);
    let mut divisors = Vec::new();
    for level in &levels {
        match gcd_of_forms(f, level) {
            Ok(g) => divisors.push(g),
            Err(_) => break,
        }
    }
    let normal_rank = divisors.len();
    let dd_degrees: Vec<usize> = divisors.iter().map(|g| g.degree().unwrap()).collect();
    let min_rank = dd_degrees.iter().take_while(|&&d| d == 0).count();
    let witness = if normal_rank == 0 || min_rank == normal_rank {
        Some(Witness::Everywhere)
    } else {
        let g = &divisors[min_rank];
        match g.roots(f).and_then(|r| r.into_iter().next()) {
            Some((a, b)) => Some(Witness::Point {
                omega: fmt_vec(f, &[a, b]),
            }),
            None => Some(Witness::Factor {
                coefficients: fmt_vec(f, g.coeffs()),
            }),
        }
    };
    PencilAnalysis {
        normal_rank,
        dd_degrees,
        min_rank,
        max_nullity: cols - min_rank,
        witness,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityVerdict {
    pub status: Status,
    /// `k = 2`: `max_omega dim(omega (x) V ∩ T_A)`. `k >= 3`: the maximum of
    /// `dim T'` over one-dimensional `I'`.
    pub max_nullity: usize,
    /// Filtration index `max{j >= 1 : A in S^j}` (`k = 2` only).
    pub sigma: Option<i64>,
    pub j0: Option<i64>,
    pub injective: bool,
    pub witness: Option<Witness>,
    pub method: &'static str,
    pub probabilistic: bool,
    pub prime: Option<u32>,
    /// Largest `dim T' / dim I'` found, against `dim T / dim I = (m+k)/k`.
    pub worst_ratio: String,
    pub analysis: Option<PencilAnalysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

pub fn j0(n: usize, m: usize) -> i64 {
    ((m + 3) / 2) as i64 + n as i64 - m as i64
}

pub fn sigma(n: usize, m: usize, max_nullity: usize) -> i64 {
    (max_nullity as i64 - m as i64 + n as i64).clamp(1, j0(n, m).max(1))
}

fn ratio(num: usize, den: usize) -> String {
    format_rational(&BigRational::new((num as i64).into(), (den as i64).into()))
}

fn kernel_witness<K: Field>(c: &Coeffs<K>) -> Option<Witness> {
    let flat = c.flattening();
    flat.kernel_basis()
        .into_iter()
        .next()
        .map(|v| Witness::Kernel {
            vector: fmt_vec(&c.field, &v),
        })
}

/// Exact verdict for `k = 2` over the field of `A`.
pub fn git_verdict(a: &KroneckerMap) -> Result<StabilityVerdict> {
    let d = a.dims();
    if d.k != 2 {
        return Err(Error::Unsupported(format!(
            "exact GIT stability needs k = 2 (got k = {}); use the probabilistic check",
            d.k
        )));
    }
    with_field!(a.field(), |f| git_verdict_in(a, &f))
}

fn git_verdict_in<K: Field>(a: &KroneckerMap, f: &K) -> Result<StabilityVerdict> {
    let d = a.dims();
    let c = a.coeffs_in(f)?;
    let injective = c.is_injective();
    let pencil = Pencil::from_slices(c.slice(0), c.slice(1));
    let analysis = analyze_pencil(&pencil);
    let nullity = analysis.max_nullity;
    let (status, witness) = if injective {
        (
            Status::compare(2 * nullity as u64, d.w() as u64),
            analysis.witness.clone(),
        )
    } else {
        (Status::Unstable, kernel_witness(&c))
    };
    debug_assert!(d.m % 2 == 0 || status != Status::StrictlySemistable);
    Ok(StabilityVerdict {
        status,
        max_nullity: nullity,
        sigma: Some(sigma(d.n, d.m, nullity)),
        j0: Some(j0(d.n, d.m)),
        injective,
        witness,
        method: "determinantal-divisors",
        probabilistic: false,
        prime: match a.field() {
            FieldDesc::Fp { p } => Some(p),
            FieldDesc::Q => None,
        },
        worst_ratio: ratio(nullity, 1),
        analysis: Some(analysis),
        caveat: None,
    })
}

const CAVEAT: &str =
    "verdict certifies the reduction modulo p only; over Q it is evidence, not proof";
/// Largest number of subspaces enumerated before switching to line sweeps.
const ENUMERATION_LIMIT: u64 = 400_000;

/// Number of `d`-dimensional subspaces of `F_p^k`.
fn grassmannian_count(p: u64, k: usize, d: usize) -> u64 {
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..d {
        num = num.saturating_mul((p as u128).pow((k - i) as u32) - 1);
        den = den.saturating_mul((p as u128).pow((i + 1) as u32) - 1);
    }
    (num / den).min(u64::MAX as u128) as u64
}

/// Visit every `d`-dimensional subspace of `F_p^k` once, as an RREF basis.
fn for_each_subspace(f: &PrimeField, k: usize, d: usize, mut visit: impl FnMut(&[Vec<u32>])) {
    let p = f.modulus();
    for pivots in crate::combinatorics::subsets_colex(k, d) {
        let free: Vec<(usize, usize)> = (0..d)
            .flat_map(|r| {
                let pivots = &pivots;
                (pivots[r] + 1..k)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let mut digits = vec![0u32; free.len()];
        loop {
            let mut basis = vec![vec![0u32; k]; d];
            for (r, &pc) in pivots.iter().enumerate() {
                basis[r][pc] = 1;
            }
            for (&(r, c), &v) in free.iter().zip(&digits) {
                basis[r][c] = v;
            }
            visit(&basis);
            let mut i = 0;
            loop {
                if i == digits.len() {
                    break;
                }
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
    }
}

/// `dim T'` for `I' = span(basis)`: the nullity of `(phi (x) id) . A`
/// stacked over a basis of the annihilator of `I'`.
fn dim_t_prime(f: &PrimeField, slices: &[Matrix<PrimeField>], basis: &[Vec<u32>]) -> usize {
    let k = slices.len();
    let b = Matrix::from_rows(f, basis.to_vec());
    let annihilator = b.kernel_basis();
    let rows = slices[0].rows();
    let cols = slices[0].cols();
    let mut stacked = Matrix::zeros(f, rows * annihilator.len(), cols);
    for (t, phi) in annihilator.iter().enumerate() {
        for (i, s) in slices.iter().enumerate().take(k) {
            if phi[i] == 0 {
                continue;
            }
            for r in 0..rows {
                for c in 0..cols {
                    stacked.add_to(t * rows + r, c, &f.mul(&phi[i], s.get(r, c)));
                }
            }
        }
    }
    cols - stacked.rank()
}

/// Minimum rank of `sum_i w_i B_i` over all points `w` of `P^2(F_p)`.
///
/// Every point lies on a line through a fixed center. On each line the
/// family is a pencil; its rank drops below the generic rank `rho` only at
/// roots of `g_rho`, which divides the determinant of every `rho x rho`
/// compression `R M C`. Roots of the gcd of a few random compressions are
/// therefore a superset of the rank-drop points, and each is checked exactly.
fn sweep_plane(
    f: &PrimeField,
    fam: &[Matrix<PrimeField>; 3],
    rng: &mut ChaCha8Rng,
    trials: usize,
) -> (usize, Vec<u32>) {
    let p = f.modulus();
    let combine = |w: &[u32]| {
        let mut out = Matrix::zeros(f, fam[0].rows(), fam[0].cols());
        for (wi, b) in w.iter().zip(fam) {
            if *wi == 0 {
                continue;
            }
            for r in 0..out.rows() {
                for c in 0..out.cols() {
                    out.add_to(r, c, &f.mul(wi, b.get(r, c)));
                }
            }
        }
        out
    };
    let center = [0u32, 0, 1];
    let mut best = (combine(&center).rank(), center.to_vec());
    // Lines through the center: directions (1:s:0) and (0:1:0).
    let directions = (0..p).map(|s| [1, s, 0]).chain(std::iter::once([0, 1, 0]));
    for dir in directions {
        let mc = combine(&center);
        let md = combine(&dir);
        let point = |s: u32, t: u32| -> Vec<u32> {
            (0..3)
                .map(|i| f.add(&f.mul(&s, &center[i]), &f.mul(&t, &dir[i])))
                .collect()
        };
        let at = |s: u32, t: u32| combine(&point(s, t));
        let rho = (0..trials.max(2))
            .map(|_| at(rng.gen_range(0..p), 1).rank())
            .max()
            .unwrap();
        if rho < best.0 {
            best = (rho, point(rng.gen_range(0..p), 1));
        }
        if rho == 0 {
            continue;
        }
        // Pencil s*M(center) + t*M(dir) as binary forms in (a, b) = (s, t).
        let forms: Vec<Vec<BinaryForm<u32>>> = (0..mc.rows())
            .map(|r| {
                (0..mc.cols())
                    .map(|c| BinaryForm::linear(f, *md.get(r, c), *mc.get(r, c)))
                    .collect()
            })
            .collect();
        let mut dets = Vec::new();
        for _ in 0..trials.max(2) {
            let left: Vec<Vec<u32>> = (0..rho)
                .map(|_| (0..mc.rows()).map(|_| rng.gen_range(0..p)).collect())
                .collect();
            let right: Vec<Vec<u32>> = (0..mc.cols())
                .map(|_| (0..rho).map(|_| rng.gen_range(0..p)).collect())
                .collect();
            let mut compressed = vec![vec![BinaryForm::zero(); rho]; rho];
            for (i, row) in compressed.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    let mut acc = BinaryForm::zero();
                    for r in 0..mc.rows() {
                        for c in 0..mc.cols() {
                            let s = f.mul(&left[i][r], &right[c][j]);
                            if s != 0 && !forms[r][c].is_zero() {
                                acc = acc.add(&forms[r][c].mul(&BinaryForm::constant(f, s), f), f);
                            }
                        }
                    }
                    *cell = acc;
                }
            }
            let det = minor_levels(f, &compressed, rho)
                .pop()
                .and_then(|mut l| l.pop())
                .unwrap_or_else(BinaryForm::zero);
            if !det.is_zero() {
                dets.push(det);
            }
        }
        let candidates: Vec<(u32, u32)> = match gcd_of_forms(f, &dets) {
            Ok(g) => g.roots(f).unwrap_or_default(),
            // Every compression vanished: fall back to the whole line.
            Err(_) => (0..p)
                .map(|s| (s, 1))
                .chain(std::iter::once((1, 0)))
                .collect(),
        };
        for (s, t) in candidates {
            let r = at(s, t).rank();
            if r < best.0 {
                best = (r, point(s, t));
            }
        }
    }
    best
}

/// Slope check over `F_p`. For `k = 2` this combines the determinantal
/// analysis over `F_p` with a scan of `P^1(F_p)`; for `k >= 3` every proper
/// subspace of `I` is enumerated when that is feasible, and for `k = 3` with
/// large `p` the planes `P(I)` and `P(I*)` are swept line by line.
pub fn git_verdict_probabilistic(
    a: &KroneckerMap,
    p: u32,
    trials: usize,
    seed: u64,
) -> Result<StabilityVerdict> {
    let reduced = match a.field() {
        FieldDesc::Q => a.reduce_mod(p).map_err(|e| match e {
            Error::Precondition(_) => Error::BadReduction { p },
            other => other,
        })?,
        FieldDesc::Fp { p: q } if q == p => a.clone(),
        FieldDesc::Fp { p: q } => {
            return Err(Error::Unsupported(format!(
                "map is defined over F_{q}, cannot reduce modulo {p}"
            )));
        }
    };
    let f = PrimeField::new(p as u64)?;
    let d = a.dims();
    let c = reduced.coeffs_in(&f)?;
    let slices: Vec<Matrix<PrimeField>> = (0..d.k).map(|i| c.slice(i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verdict = StabilityVerdict {
        status: Status::Stable,
        max_nullity: 0,
        sigma: None,
        j0: None,
        injective: c.is_injective(),
        witness: None,
        method: "",
        probabilistic: true,
        prime: Some(p),
        worst_ratio: String::new(),
        analysis: None,
        caveat: Some(CAVEAT.into()),
    };
    // (dim T', dim I', basis) of the worst subspace so far, by ratio.
    let mut worst: Option<(usize, usize, Vec<Vec<u32>>)> = None;
    let mut record =
        |dim_t: usize, dim_i: usize, basis: Vec<Vec<u32>>, verdict: &mut StabilityVerdict| {
            let status = Status::compare((d.k * dim_t) as u64, (d.w() * dim_i) as u64);
            verdict.status = verdict.status.worst(status);
            if dim_i == 1 {
                verdict.max_nullity = verdict.max_nullity.max(dim_t);
            }
            let better = match &worst {
                None => true,
                Some((t, i, _)) => dim_t * i > t * dim_i,
            };
            if better {
                worst = Some((dim_t, dim_i, basis));
            }
        };

    if d.k == 2 {
        let analysis = analyze_pencil(&Pencil::from_slices(slices[0].clone(), slices[1].clone()));
        let mut scanned = None;
        if grassmannian_count(p as u64, 2, 1) <= ENUMERATION_LIMIT {
            for_each_subspace(&f, 2, 1, |basis| {
                let t = dim_t_prime(&f, &slices, basis);
                if scanned.as_ref().is_none_or(|(best, _)| t > *best) {
                    scanned = Some((t, basis.to_vec()));
                }
            });
        }
        match scanned {
            Some((t, basis)) if t >= analysis.max_nullity => record(t, 1, basis, &mut verdict),
            _ => {
                let t = analysis.max_nullity;
                let status = Status::compare(2 * t as u64, d.w() as u64);
                verdict.status = verdict.status.worst(status);
                verdict.max_nullity = t;
                verdict.witness = analysis.witness.clone();
                worst = Some((t, 1, Vec::new()));
            }
        }
        verdict.sigma = Some(sigma(d.n, d.m, verdict.max_nullity));
        verdict.j0 = Some(j0(d.n, d.m));
        verdict.method = "divisors+enumeration";
        verdict.analysis = Some(analysis);
    } else {
        let total: u64 = (1..d.k)
            .map(|dim| grassmannian_count(p as u64, d.k, dim))
            .sum();
        if total <= ENUMERATION_LIMIT {
            verdict.method = "enumeration";
            for dim in 1..d.k {
                for_each_subspace(&f, d.k, dim, |basis| {
                    let t = dim_t_prime(&f, &slices, basis);
                    record(t, dim, basis.to_vec(), &mut verdict);
                });
            }
        } else if d.k == 3 {
            verdict.method = "line-sweep";
            let (m0, m1, m2) = (&slices[0], &slices[1], &slices[2]);
            let zero = Matrix::zeros(&f, m0.rows(), m0.cols());
            let neg = |m: &Matrix<PrimeField>| {
                let mut out = m.clone();
                for r in 0..out.rows() {
                    for cc in 0..out.cols() {
                        out.set(r, cc, f.neg(m.get(r, cc)));
                    }
                }
                out
            };
            // T'(omega) = ker L(omega), L(omega) = [w0 M1 - w1 M0; w0 M2 - w2 M0; w1 M2 - w2 M1].
            let lines = [
                m1.vstack(m2).vstack(&zero),
                neg(m0).vstack(&zero).vstack(m2),
                zero.vstack(&neg(m0)).vstack(&neg(m1)),
            ];
            let (rank, omega) = sweep_plane(&f, &lines, &mut rng, trials);
            record(d.w() - rank, 1, vec![omega], &mut verdict);
            // I' = ker(phi): T' = ker(sum phi_i M_i).
            let planes = [m0.clone(), m1.clone(), m2.clone()];
            let (rank, phi) = sweep_plane(&f, &planes, &mut rng, trials);
            let basis = Matrix::from_rows(&f, vec![phi]).kernel_basis();
            record(d.w() - rank, 2, basis, &mut verdict);
        } else {
            return Err(Error::Unsupported(format!(
                "{total} subspaces of F_{p}^{} is too many to enumerate; use a smaller prime",
                d.k
            )));
        }
    }
    if !verdict.injective {
        verdict.status = Status::Unstable;
        verdict.witness = kernel_witness(&c);
    } else if verdict.witness.is_none() {
        if let Some((t, _, basis)) = &worst {
            verdict.witness = Some(Witness::Subspace {
                basis: basis.iter().map(|v| fmt_vec(&f, v)).collect(),
                dim_t: *t,
            });
        }
    }
    if let Some((t, i, _)) = &worst {
        verdict.worst_ratio = ratio(*t, *i);
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::fixtures;
    use crate::model::{Dimensions, GroupElement};

    fn pencil_from(u: &[Vec<i64>], v: &[Vec<i64>]) -> Pencil<Rationals> {
        Pencil::from_slices(
            Matrix::from_i64(&Rationals, u),
            Matrix::from_i64(&Rationals, v),
        )
    }

    #[test]
    fn point_at_infinity() {
        // U = I_2 padded, V = 0: M(a, b) = b U drops to rank 0 at b = 0.
        let p = pencil_from(&[vec![1, 0, 0], vec![0, 1, 0]], &[vec![0; 3], vec![0; 3]]);
        let a = analyze_pencil(&p);
        assert_eq!((a.normal_rank, a.min_rank, a.max_nullity), (2, 0, 3));
        assert_eq!(a.dd_degrees, vec![1, 2]);
        assert_eq!(
            a.witness,
            Some(Witness::Point {
                omega: vec!["1".into(), "0".into()]
            })
        );
    }

    #[test]
    fn zero_pencil() {
        let p = pencil_from(&[vec![0; 2]], &[vec![0; 2]]);
        let a = analyze_pencil(&p);
        assert_eq!((a.normal_rank, a.min_rank, a.max_nullity), (0, 0, 2));
    }

    #[test]
    fn irrational_root_reported_as_factor() {
        // bU - aV = [[b, 2a], [a, b]] has determinant b^2 - 2a^2.
        let p = pencil_from(&[vec![1, 0], vec![0, 1]], &[vec![0, -2], vec![-1, 0]]);
        let a = analyze_pencil(&p);
        assert_eq!(a.min_rank, 1);
        assert!(matches!(a.witness, Some(Witness::Factor { .. })));
    }

    #[test]
    fn fixtures_are_stable() {
        for id in [
            "remark-s3",
            "boundary-3-3",
            "schwarzenberger-3-3",
            "schwarzenberger-5-5",
        ] {
            let a = fixtures::fixture(id).unwrap();
            let v = git_verdict(&a).unwrap();
            assert_eq!(v.status, Status::Stable, "{id}");
        }
        let remark = git_verdict(&fixtures::fixture("remark-s3").unwrap()).unwrap();
        assert_eq!(remark.max_nullity, 2);
        assert!(remark.sigma.unwrap() < 3);
        let boundary = git_verdict(&fixtures::fixture("boundary-3-3").unwrap()).unwrap();
        assert_eq!(boundary.max_nullity, 2);
        let schw = KroneckerMap::schwarzenberger(3, 3)
            .unwrap()
            .pencil(&Rationals)
            .unwrap();
        let an = analyze_pencil(&schw);
        assert_eq!((an.normal_rank, an.min_rank), (4, 4));
    }

    #[test]
    fn block_destabilized() {
        let a = fixtures::destabilized_block(3, 3, 1, 5).unwrap();
        let v = git_verdict(&a).unwrap();
        assert_eq!(v.status, Status::Unstable);
        assert!(v.max_nullity >= 3);
    }

    #[test]
    fn non_injective_is_unstable() {
        let a = KroneckerMap::from_variables(
            3,
            &[
                vec![Some(0), Some(1), Some(2), Some(3), None],
                vec![None, Some(0), Some(1), Some(2), None],
            ],
        )
        .unwrap();
        let v = git_verdict(&a).unwrap();
        assert_eq!(v.status, Status::Unstable);
        assert!(!v.injective);
        assert!(matches!(v.witness, Some(Witness::Kernel { .. })));
    }

    #[test]
    fn k3_fixture_probabilistically_stable() {
        let a = fixtures::fixture("k3-counterexample").unwrap();
        assert!(git_verdict(&a).is_err());
        for p in [101, 10007] {
            let v = git_verdict_probabilistic(&a, p, 3, 1).unwrap();
            assert_eq!(v.status, Status::Stable, "p = {p}");
            assert!(v.probabilistic);
        }
    }

    #[test]
    fn k3_unstable_found_by_both_methods() {
        // Third row zero except one entry: I' = <e_0, e_1> has dim T' = 4 > 2(m+3)/3.
        let a = KroneckerMap::from_variables(
            2,
            &[
                vec![Some(0), Some(1), Some(2), None, None],
                vec![None, Some(0), Some(1), Some(2), None],
                vec![None, None, None, None, Some(0)],
            ],
        )
        .unwrap();
        for p in [7, 10007] {
            let v = git_verdict_probabilistic(&a, p, 3, 2).unwrap();
            assert_eq!(v.status, Status::Unstable, "p = {p}");
        }
    }

    #[test]
    fn probabilistic_matches_exact_k2() {
        let d = Dimensions::new(3, 3, 2).unwrap();
        for seed in 0..20 {
            let a = KroneckerMap::random(d, seed, 1).unwrap();
            let exact = git_verdict(&a).unwrap();
            let prob = git_verdict_probabilistic(&a, 101, 3, seed).unwrap();
            assert_eq!(exact.status, prob.status, "seed {seed}");
        }
    }

    #[test]
    fn bad_reduction() {
        let text = r#"{"n":2,"m":1,"k":3,"matrix":[[["1/7",0,0],[0,1,0],[0,0,1],[1,0,0]],[[0,1,0],[0,0,1],[1,0,0],[0,1,0]],[[0,0,1],[1,0,0],[0,1,0],[0,0,1]]]}"#;
        let a = crate::json::from_json(text).unwrap();
        assert_eq!(
            git_verdict_probabilistic(&a, 7, 2, 0).unwrap_err(),
            Error::BadReduction { p: 7 }
        );
    }

    #[test]
    fn invariant_under_action() {
        let a = fixtures::fixture("remark-s3").unwrap();
        for seed in 0..5 {
            let g = GroupElement::random(a.dims(), seed, false);
            let b = g.act(&a).unwrap();
            let (va, vb) = (git_verdict(&a).unwrap(), git_verdict(&b).unwrap());
            assert_eq!((va.status, va.max_nullity), (vb.status, vb.max_nullity));
        }
    }

    #[test]
    fn subspace_counts() {
        assert_eq!(grassmannian_count(7, 3, 1), 57);
        assert_eq!(grassmannian_count(7, 3, 2), 57);
        assert_eq!(grassmannian_count(2, 4, 2), 35);
        let f = PrimeField::new(3).unwrap();
        let mut n = 0;
        for_each_subspace(&f, 4, 2, |_| n += 1);
        assert_eq!(n as u64, grassmannian_count(3, 4, 2));
    }
}
