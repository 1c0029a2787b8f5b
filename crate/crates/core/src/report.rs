//! The combined classification of a single map.

use serde::Serialize;

use crate::degeneracy::{
    degeneracy_dimension, filtration_indices, DegeneracyReport, FiltrationReport, Strategy,
};
use crate::error::Result;
use crate::field::DEFAULT_PRIME;
use crate::git::{git_verdict, git_verdict_probabilistic, StabilityVerdict, Status};
use crate::homology::{
    build_sel, build_sel_eis, ext_dimensions, hoppe_criterion, mu_stability_verdict,
    stabilizer_dimension, ExtDimensions, HoppeProfile, MuStatus, MuVerdict,
};
use crate::model::KroneckerMap;

/// Prime used for degeneracy estimates when none is given.
pub const DEGENERACY_PRIME: u32 = 31;

#[derive(Clone, Copy, Debug)]
pub struct Options {
    /// Prime for probabilistic stability; `None` means the default.
    pub prime: Option<u32>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            prime: None,
            trials: 7,
            seed: 0,
        }
    }
}

impl Options {
    pub fn git_prime(&self) -> u32 {
        self.prime.unwrap_or(DEFAULT_PRIME)
    }
    pub fn degeneracy_prime(&self) -> u32 {
        self.prime.unwrap_or(DEGENERACY_PRIME)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Section<T> {
    Ok(T),
    Error(String),
}

impl<T> Section<T> {
    fn from(r: Result<T>) -> Self {
        match r {
            Ok(v) => Section::Ok(v),
            Err(e) => Section::Error(e.to_string()),
        }
    }

    pub fn ok(&self) -> Option<&T> {
        match self {
            Section::Ok(v) => Some(v),
            Section::Error(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub outcome: Outcome,
    pub detail: String,
}

fn check(name: &'static str, applies: bool, holds: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        outcome: match (applies, holds) {
            (false, _) => Outcome::Skipped,
            (true, true) => Outcome::Pass,
            (true, false) => Outcome::Fail,
        },
        detail: detail.into(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub git: Section<StabilityVerdict>,
    pub degeneracy: Section<DegeneracyReport>,
    pub filtration: Section<FiltrationReport>,
    pub hoppe: Section<HoppeProfile>,
    pub mu: Section<MuVerdict>,
    pub ext: Section<ExtDimensions>,
    pub stabilizer_dim: Section<usize>,
    pub consistency: Vec<Check>,
    pub summary: String,
}

impl ClassifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.consistency
            .iter()
            .filter(|c| c.outcome == Outcome::Fail)
    }
}

pub fn classify(a: &KroneckerMap, opts: &Options) -> ClassifyReport {
    let d = a.dims();
    let git = Section::from(if d.k == 2 {
        git_verdict(a)
    } else {
        git_verdict_probabilistic(a, opts.git_prime(), opts.trials, opts.seed)
    });
    let degeneracy = Section::from(degeneracy_dimension(
        a,
        opts.degeneracy_prime(),
        Strategy::Auto,
        opts.trials,
        opts.seed,
    ));
    let k2 = d.k == 2;
    let odd = d.m % 2 == 1;
    let filtration = Section::from(filtration_indices(
        a,
        opts.degeneracy_prime(),
        opts.trials,
        opts.seed,
    ));
    let hoppe = Section::from(hoppe_criterion(a));
    let mu = Section::from(mu_stability_verdict(
        a,
        opts.degeneracy_prime(),
        opts.trials,
        opts.seed,
    ));
    let ext = Section::from(ext_dimensions(a));
    let stabilizer_dim = Section::from(if k2 {
        stabilizer_dimension(a)
    } else {
        Err(crate::Error::Unsupported("k = 2 only".into()))
    });

    let status = git.ok().map(|v| v.status);
    let stable = status == Some(Status::Stable);
    let mut consistency = Vec::new();
    consistency.push(check(
        "m odd excludes strict semistability",
        odd && status.is_some(),
        status != Some(Status::StrictlySemistable),
        format!("status {status:?}"),
    ));
    if let Some(fr) = filtration.ok() {
        let semistable = !fr.outside_semistable;
        consistency.push(check(
            "sigma <= tau <= sigma + 1",
            semistable,
            fr.chain_holds,
            format!("sigma = {}, tau = {}", fr.sigma, fr.tau),
        ));
        consistency.push(check(
            "sigma >= 2 iff tau >= 2",
            semistable,
            fr.second_step_holds,
            format!("sigma = {}, tau = {}", fr.sigma, fr.tau),
        ));
    }
    if let Some(dr) = degeneracy.ok() {
        consistency.push(check(
            "codim D >= (m+1)/2 for stable maps",
            stable && odd,
            2 * dr.codim >= d.m as i64 + 1,
            format!("codim D = {}", dr.codim),
        ));
    }
    let mu_status = mu.ok().map(|v| v.status);
    consistency.push(check(
        "GIT stable iff mu-stable",
        k2 && odd && status.is_some() && mu_status.is_some(),
        stable == (mu_status == Some(MuStatus::MuStable)),
        format!("git {status:?}, mu {mu_status:?}"),
    ));
    if let Some(h) = hoppe.ok() {
        let pairs: Vec<_> = h
            .entries
            .iter()
            .filter_map(|e| e.direct.map(|dv| (e.r, dv, e.h0)))
            .collect();
        consistency.push(check(
            "dual and direct h0 agree",
            !pairs.is_empty(),
            pairs.iter().all(|(_, a, b)| a == b),
            format!("(r, direct, dual) = {pairs:?}"),
        ));
    }
    if let Some(e) = ext.ok() {
        consistency.push(check(
            "Ext^2 = 0",
            true,
            e.ext2 == 0,
            format!("ext2 = {}", e.ext2),
        ));
        consistency.push(check(
            "Ext^1 = (m+2)(2n-m) - 3 for simple sheaves",
            e.hom == 1,
            e.ext1 as i64 == e.expected_ext1,
            format!("ext1 = {}, expected {}", e.ext1, e.expected_ext1),
        ));
        if let Some(s) = stabilizer_dim.ok() {
            consistency.push(check(
                "stabilizer dim = dim Hom - 1",
                true,
                *s + 1 == e.hom,
                format!("stab = {s}, hom = {}", e.hom),
            ));
            consistency.push(check(
                "stable maps have finite stabilizers",
                stable,
                *s == 0,
                format!("stab = {s}"),
            ));
        }
    }
    if k2 {
        let ok = with_q(a, |c| {
            let mut all = true;
            for r in 1..d.m.max(2) {
                if let Ok(cx) = build_sel_eis(c, r) {
                    all &= cx.is_complex();
                }
                if let Ok(cx) = build_sel(c, r, stable) {
                    all &= cx.is_complex();
                }
            }
            all
        });
        consistency.push(check(
            "d^2 = 0 for every built complex",
            ok.is_some(),
            ok.unwrap_or(false),
            "",
        ));
    }

    let locus = degeneracy.ok().map(|r| {
        if r.dim_estimate < 0 {
            "D empty".to_string()
        } else {
            format!("codim D = {}", r.codim)
        }
    });
    let summary = match (status, mu_status, locus) {
        (Some(Status::Stable), Some(MuStatus::Torsion), _) if !k2 => {
            "stable map, non-mu-stable sheaf: the equivalence fails for k=3".to_string()
        }
        (Some(s), Some(mu), Some(l)) => format!("{} map, {} sheaf, {l}", name(&s), name(&mu)),
        (Some(s), None, Some(l)) => format!("{} map, {l}", name(&s)),
        (Some(s), _, None) => format!("{} map", name(&s)),
        _ => "stability undetermined".to_string(),
    };
    ClassifyReport {
        n: d.n,
        m: d.m,
        k: d.k,
        git,
        degeneracy,
        filtration,
        hoppe,
        mu,
        ext,
        stabilizer_dim,
        consistency,
        summary,
    }
}

pub(crate) fn name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn with_q<T>(
    a: &KroneckerMap,
    f: impl FnOnce(&crate::model::Coeffs<crate::field::Rationals>) -> T,
) -> Option<T> {
    match a.field() {
        crate::field::FieldDesc::Q => a.coeffs_in(&crate::field::Rationals).ok().map(|c| f(&c)),
        crate::field::FieldDesc::Fp { .. } => None,
    }
}
