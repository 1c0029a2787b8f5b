//! Randomized census over a fixed `(n, m)` with JSONL records.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::degeneracy::{degeneracy_dimension, tau, Strategy};
use crate::error::{Error, Result};
use crate::field::FieldDesc;
use crate::fixtures::destabilized_block;
use crate::git::{git_verdict, Status};
use crate::homology::{mu_stability_verdict, MuStatus};
use crate::model::{Dimensions, GroupElement, KroneckerMap};

pub const SCHEMA_VERSION: u32 = 1;

/// How a sample was drawn. Cycling through the kinds keeps every stratum
/// populated; uniformly random maps are almost always generic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    Generic,
    Sparse,
    Block,
    Boundary,
}

const KINDS: [SampleKind; 4] = [
    SampleKind::Generic,
    SampleKind::Sparse,
    SampleKind::Block,
    SampleKind::Boundary,
];

#[derive(Clone, Debug)]
pub struct CensusConfig {
    pub n: usize,
    pub m: usize,
    pub count: usize,
    pub seed: u64,
    pub prime: u32,
    pub trials: usize,
    /// Skip the sheaf-side computations (Hoppe and mu-stability).
    pub skip_mu: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub git: u64,
    pub degeneracy: u64,
    pub mu: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusRecord {
    pub schema_version: u32,
    pub index: usize,
    pub seed: u64,
    pub sample_seed: u64,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub field: &'static str,
    pub prime: u32,
    pub kind: SampleKind,
    pub injective: bool,
    pub status: Status,
    pub max_nullity: usize,
    pub sigma: Option<i64>,
    pub tau: Option<i64>,
    pub dim_d: Option<i64>,
    pub mu: Option<MuStatus>,
    pub hoppe_all_zero: Option<bool>,
    /// `(r, direct, dual)` wherever both sides of the duality were computed.
    pub duality: Vec<(usize, u64, u64)>,
    pub violations: Vec<String>,
    pub error: Option<String>,
    pub timings_ms: Timings,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CensusSummary {
    pub count: usize,
    pub status: BTreeMap<String, usize>,
    /// Keyed by `sigma,tau` over semistable samples.
    pub strata: BTreeMap<String, usize>,
    pub dim_d: BTreeMap<i64, usize>,
    pub mu: BTreeMap<String, usize>,
    pub duality_checks: usize,
    pub violations: Vec<(usize, String)>,
    pub errors: Vec<(usize, String)>,
}

impl CensusSummary {
    fn add(&mut self, r: &CensusRecord) {
        self.count += 1;
        *self
            .status
            .entry(crate::report::name(&r.status))
            .or_default() += 1;
        if let (Some(s), Some(t)) = (r.sigma, r.tau) {
            *self.strata.entry(format!("{s},{t}")).or_default() += 1;
        }
        if let Some(d) = r.dim_d {
            *self.dim_d.entry(d).or_default() += 1;
        }
        if let Some(mu) = r.mu {
            *self.mu.entry(crate::report::name(&mu)).or_default() += 1;
        }
        self.duality_checks += r.duality.len();
        self.violations
            .extend(r.violations.iter().map(|v| (r.index, v.clone())));
        if let Some(e) = &r.error {
            self.errors.push((r.index, e.clone()));
        }
    }
}

/// Seed for sample `index`, a splitmix step so nearby indices decorrelate.
pub fn sample_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sparse(dims: Dimensions, seed: u64) -> Result<KroneckerMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let density = rng.gen_range(0.2..0.6);
        let entries: Vec<Vec<Vec<BigRational>>> = (0..dims.k)
            .map(|_| {
                (0..dims.w())
                    .map(|_| {
                        (0..dims.v())
                            .map(|_| {
                                if rng.gen_bool(density) {
                                    BigRational::from_integer(BigInt::from(
                                        rng.gen_range(-2i64..=2),
                                    ))
                                } else {
                                    BigRational::zero()
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        match KroneckerMap::new(dims, FieldDesc::Q, entries) {
            Err(Error::Precondition(_)) | Err(Error::ZeroIdeal) => continue,
            other => return other,
        }
    }
}

/// Draws sample `index`. Kinds that do not exist for `(n, m)` fall back to
/// sparse maps.
pub fn draw(n: usize, m: usize, seed: u64, index: usize) -> Result<(SampleKind, KroneckerMap)> {
    let dims = Dimensions::new(n, m, 2)?;
    let s = sample_seed(seed, index);
    let kind = KINDS[index % KINDS.len()];
    let a = match kind {
        SampleKind::Generic => KroneckerMap::random(dims, s, 1),
        SampleKind::Sparse => sparse(dims, s),
        SampleKind::Block => {
            let width = 1 + (s % (m as u64 + 1)) as usize;
            destabilized_block(n, m, width, s)
        }
        SampleKind::Boundary => match KroneckerMap::boundary_normal_form(n, m) {
            Ok(b) => GroupElement::random(dims, s, true).act(&b),
            Err(_) => return Ok((SampleKind::Sparse, sparse(dims, s)?)),
        },
    }?;
    Ok((kind, a))
}

fn ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

pub fn run_sample(cfg: &CensusConfig, index: usize) -> CensusRecord {
    let mut rec = CensusRecord {
        schema_version: SCHEMA_VERSION,
        index,
        seed: cfg.seed,
        sample_seed: sample_seed(cfg.seed, index),
        n: cfg.n,
        m: cfg.m,
        k: 2,
        field: "Q",
        prime: cfg.prime,
        kind: KINDS[index % KINDS.len()],
        injective: false,
        status: Status::Unstable,
        max_nullity: 0,
        sigma: None,
        tau: None,
        dim_d: None,
        mu: None,
        hoppe_all_zero: None,
        duality: Vec::new(),
        violations: Vec::new(),
        error: None,
        timings_ms: Timings {
            git: 0,
            degeneracy: 0,
            mu: 0,
        },
    };
    if let Err(e) = fill(cfg, &mut rec) {
        rec.error = Some(e.to_string());
    }
    rec
}

fn fill(cfg: &CensusConfig, rec: &mut CensusRecord) -> Result<()> {
    let (kind, a) = draw(cfg.n, cfg.m, cfg.seed, rec.index)?;
    rec.kind = kind;
    let odd = cfg.m % 2 == 1;

    let t = Instant::now();
    let v = git_verdict(&a)?;
    rec.timings_ms.git = ms(t);
    rec.injective = v.injective;
    rec.status = v.status;
    rec.max_nullity = v.max_nullity;
    if odd && v.status == Status::StrictlySemistable {
        rec.violations.push("strictly semistable with m odd".into());
    }
    if !v.injective {
        return Ok(());
    }

    let t = Instant::now();
    let d = degeneracy_dimension(&a, cfg.prime, Strategy::Auto, cfg.trials, rec.sample_seed)?;
    rec.timings_ms.degeneracy = ms(t);
    rec.dim_d = Some(d.dim_estimate);
    if v.status != Status::Unstable {
        let sigma = v.sigma.expect("semistable verdicts carry sigma");
        let ta = tau(d.dim_estimate);
        rec.sigma = Some(sigma);
        rec.tau = Some(ta);
        if !(sigma <= ta && ta <= sigma + 1) {
            rec.violations.push(format!(
                "chain sigma <= tau <= sigma + 1 fails: sigma = {sigma}, tau = {ta}"
            ));
        }
        if (sigma >= 2) != (ta >= 2) {
            rec.violations.push(format!(
                "sigma >= 2 iff tau >= 2 fails: sigma = {sigma}, tau = {ta}"
            ));
        }
    }
    if v.status == Status::Stable && odd && 2 * d.codim < cfg.m as i64 + 1 {
        rec.violations
            .push(format!("stable with codim D = {} < (m+1)/2", d.codim));
    }

    if odd && !cfg.skip_mu {
        let t = Instant::now();
        let mu = mu_stability_verdict(&a, cfg.prime, cfg.trials, rec.sample_seed)?;
        rec.timings_ms.mu = ms(t);
        rec.mu = Some(mu.status);
        if let Some(h) = &mu.hoppe {
            rec.hoppe_all_zero = Some(h.all_zero);
            for e in &h.entries {
                if let Some(direct) = e.direct {
                    rec.duality.push((e.r, direct as u64, e.h0 as u64));
                    if direct != e.h0 {
                        rec.violations.push(format!(
                            "duality mismatch at r = {}: direct {direct}, dual {}",
                            e.r, e.h0
                        ));
                    }
                }
            }
        }
        if (v.status == Status::Stable) != (mu.status == MuStatus::MuStable) {
            rec.violations
                .push(format!("GIT {:?} but sheaf {:?}", v.status, mu.status));
        }
    }
    Ok(())
}

/// Number of worker threads, capped by `KRONSTAB_THREADS` when set.
pub fn thread_count() -> usize {
    let avail = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    match std::env::var("KRONSTAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        Some(t) if t > 0 => t,
        _ => avail,
    }
}

/// Runs the census, handing records to `sink` in index order. Samples are
/// computed in parallel batches so a crash loses at most one batch.
pub fn run_census(
    cfg: &CensusConfig,
    mut sink: impl FnMut(&CensusRecord) -> std::io::Result<()>,
) -> Result<CensusSummary> {
    Dimensions::new(cfg.n, cfg.m, 2)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let mut summary = CensusSummary::default();
    let batch = 4 * pool.current_num_threads().max(1);
    let mut start = 0;
    while start < cfg.count {
        let end = (start + batch).min(cfg.count);
        let recs: Vec<CensusRecord> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|i| run_sample(cfg, i))
                .collect()
        });
        for r in &recs {
            sink(r).map_err(|e| Error::Io(e.to_string()))?;
            summary.add(r);
        }
        start = end;
    }
    Ok(summary)
}
