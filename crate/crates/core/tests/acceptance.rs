//! End-to-end checks of the library's main claims. Runs as a plain binary so
//! each criterion prints one PASS/FAIL line.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kronstab::census::{draw, run_census, CensusConfig, CensusRecord};
use kronstab::degeneracy::{degeneracy_dimension, normal_form_reduce, Reduction, Strategy};
use kronstab::field::{parse_rational, PrimeField, Rationals};
use kronstab::fixtures::{destabilized_block, fixture};
use kronstab::git::{analyze_pencil, git_verdict, git_verdict_probabilistic, Status, Witness};
use kronstab::homology::{
    build_sel, build_sel_eis, ext_dimensions, hoppe_criterion, mu_stability_verdict,
    stabilizer_dimension, MuStatus,
};
use kronstab::matrix::Matrix;
use kronstab::model::{Dimensions, GroupElement, KroneckerMap, Pencil};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

fn fixtures() -> Outcome {
    let remark = fixture("remark-s3").unwrap();
    let v = e(git_verdict(&remark))?;
    let d = e(degeneracy_dimension(&remark, 31, Strategy::Auto, 7, 0))?;
    ensure!(v.status == Status::Stable, "remark-s3 not stable");
    ensure!(
        d.dim_estimate == 1 && d.tau == 3,
        "remark-s3: dim D {} tau {}",
        d.dim_estimate,
        d.tau
    );
    ensure!(
        v.sigma.is_some_and(|s| s < 3),
        "remark-s3: sigma {:?}",
        v.sigma
    );

    let boundary = fixture("boundary-3-3").unwrap();
    ensure!(
        e(git_verdict(&boundary))?.status == Status::Stable,
        "boundary-3-3 not stable"
    );
    let d = e(degeneracy_dimension(&boundary, 31, Strategy::Auto, 7, 0))?;
    ensure!(d.codim == 2, "boundary-3-3: codim {}", d.codim);
    ensure!(
        e(hoppe_criterion(&boundary))?.all_zero,
        "boundary-3-3: Hoppe profile not zero"
    );

    let k3 = fixture("k3-counterexample").unwrap();
    for p in [101, 10007] {
        let v = e(git_verdict_probabilistic(&k3, p, 7, 0))?;
        ensure!(
            v.status == Status::Stable && v.probabilistic,
            "k3 at p = {p}: {:?}",
            v.status
        );
    }
    let mu = e(mu_stability_verdict(&k3, 31, 7, 0))?;
    ensure!(
        mu.status == MuStatus::Torsion && mu.codim_d == Some(1),
        "k3: {:?} codim {:?}",
        mu.status,
        mu.codim_d
    );

    let sch = fixture("schwarzenberger-3-3").unwrap();
    let d = e(degeneracy_dimension(&sch, 31, Strategy::Auto, 7, 0))?;
    ensure!(
        d.dim_estimate == -1,
        "schwarzenberger-3-3: dim D {}",
        d.dim_estimate
    );
    ensure!(
        e(mu_stability_verdict(&sch, 31, 7, 0))?.status == MuStatus::MuStable,
        "schwarzenberger-3-3 not mu-stable"
    );
    Ok("4 fixtures".into())
}

fn equivalence_on(a: &KroneckerMap, seed: u64) -> Result<bool, String> {
    let git = e(git_verdict(a))?.status == Status::Stable;
    let mu = e(mu_stability_verdict(a, 31, 7, seed))?.status == MuStatus::MuStable;
    ensure!(
        git == mu,
        "GIT stable = {git}, mu-stable = {mu} on {:?}",
        a.entries()
    );
    Ok(git)
}

fn equivalence() -> Outcome {
    let (mut total, mut stable) = (0, 0);
    for (n, m) in [(3, 3), (4, 3), (5, 5)] {
        for i in 0..50 {
            let (_, a) = e(draw(n, m, 1000 + n as u64, i))?;
            stable += equivalence_on(&a, i as u64)? as usize;
            total += 1;
        }
    }
    for i in 0..10u64 {
        let (n, m) = if i < 5 { (3, 3) } else { (5, 5) };
        let s = 1 + (i as usize % (m + 1));
        let a = e(destabilized_block(n, m, s, 77 + i))?;
        stable += equivalence_on(&a, i)? as usize;
        total += 1;
    }
    ensure!(
        stable > 0 && stable < total,
        "degenerate sample: {stable} of {total} stable"
    );
    Ok(format!("{total} maps, {stable} stable, 0 exceptions"))
}

fn census() -> Result<Vec<CensusRecord>, String> {
    let mut recs = Vec::new();
    for (n, m, count) in [(3, 3, 200), (4, 3, 60), (5, 5, 40)] {
        let cfg = CensusConfig {
            n,
            m,
            count,
            seed: 2024,
            prime: 31,
            trials: 7,
            skip_mu: false,
        };
        e(run_census(&cfg, |r| {
            recs.push(r.clone());
            Ok(())
        }))?;
    }
    Ok(recs)
}

fn filtration(recs: &[CensusRecord]) -> Outcome {
    let mut checked = 0;
    for r in recs {
        ensure!(
            r.error.is_none(),
            "sample {} of ({}, {}): {:?}",
            r.index,
            r.n,
            r.m,
            r.error
        );
        if let (Some(s), Some(t)) = (r.sigma, r.tau) {
            ensure!(
                s <= t && t <= s + 1,
                "chain fails at sample {} of ({}, {}): sigma {s} tau {t}",
                r.index,
                r.n,
                r.m
            );
            ensure!(
                (s >= 2) == (t >= 2),
                "second step fails at sample {} of ({}, {}): sigma {s} tau {t}",
                r.index,
                r.n,
                r.m
            );
            checked += 1;
        }
    }
    ensure!(checked >= 200, "only {checked} semistable samples");
    Ok(format!("{checked} semistable of {} samples", recs.len()))
}

fn codim_bound(recs: &[CensusRecord]) -> Outcome {
    let mut checked = 0;
    for r in recs
        .iter()
        .filter(|r| r.m % 2 == 1 && r.status == Status::Stable)
    {
        let dim = r.dim_d.ok_or("stable sample without dim D")?;
        ensure!(
            2 * (r.n as i64 - dim) >= r.m as i64 + 1,
            "sample {} of ({}, {}): dim D = {dim}",
            r.index,
            r.n,
            r.m
        );
        checked += 1;
    }
    ensure!(checked > 0, "no stable samples");
    Ok(format!("{checked} stable samples"))
}

fn moduli() -> Outcome {
    let mut maps: Vec<KroneckerMap> = [
        "boundary-3-3",
        "remark-s3",
        "schwarzenberger-3-3",
        "boundary-5-5",
    ]
    .iter()
    .map(|id| fixture(id).unwrap())
    .collect();
    for (n, m, count) in [(3, 3, 12), (4, 3, 6), (3, 2, 6), (5, 5, 3)] {
        for i in 0..count {
            maps.push(e(draw(n, m, 31, i))?.1);
        }
    }
    let mut checked = 0;
    for a in &maps {
        if e(git_verdict(a))?.status != Status::Stable {
            continue;
        }
        let x = e(ext_dimensions(a))?;
        let d = a.dims();
        ensure!(x.hom == 1, "stable map with dim Hom = {}", x.hom);
        let expected = (d.m as i64 + 2) * (2 * d.n as i64 - d.m as i64) - 3;
        ensure!(
            x.ext1 as i64 == expected,
            "({}, {}): ext1 {} expected {expected}",
            d.n,
            d.m,
            x.ext1
        );
        ensure!(x.ext2 == 0, "ext2 = {}", x.ext2);
        ensure!(
            e(stabilizer_dimension(a))? == 0,
            "positive-dimensional stabilizer"
        );
        if (d.n, d.m) == (3, 3) {
            ensure!(x.ext1 == 12, "(3, 3) gives {}", x.ext1);
        }
        checked += 1;
    }
    Ok(format!("{checked} stable simple maps"))
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn random_square(rng: &mut ChaCha8Rng, s: usize) -> Matrix<Rationals> {
    let rows: Vec<Vec<i64>> = (0..s)
        .map(|_| (0..s).map(|_| rng.gen_range(-3..=3)).collect())
        .collect();
    Matrix::from_i64(&Rationals, &rows)
}

fn invertible(rng: &mut ChaCha8Rng, s: usize) -> Matrix<Rationals> {
    loop {
        let m = random_square(rng, s);
        if m.rank() == s {
            return m;
        }
    }
}

/// Pencil number `i`: from a random map, a square pencil with planted
/// integer eigenvalues and Jordan blocks, or a random square pencil.
fn pencil(i: usize) -> Pencil<Rationals> {
    let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
    match i % 3 {
        0 => {
            let m = rng.gen_range(1..=4);
            let n = rng.gen_range(m.max(2)..=5);
            let a = KroneckerMap::random(
                Dimensions::new(n, m, 2).unwrap(),
                i as u64,
                rng.gen_range(1..=2),
            )
            .unwrap();
            let c = a.coeffs_in(&Rationals).unwrap();
            Pencil::from_slices(c.slice(0), c.slice(1))
        }
        1 => {
            let s = rng.gen_range(2..=5);
            let mut d = Matrix::zeros(&Rationals, s, s);
            for j in 0..s {
                d.set(j, j, q(rng.gen_range(-2..=2)));
                if j > 0 && rng.gen_bool(0.3) && d.get(j, j) == d.get(j - 1, j - 1) {
                    d.set(j - 1, j, q(1));
                }
            }
            let (p, r) = (invertible(&mut rng, s), invertible(&mut rng, s));
            let mut u = p.mul(&r);
            let v = p.mul(&d).mul(&r);
            // sometimes a singular U, putting eigenvalues at infinity
            if rng.gen_bool(0.2) {
                u = p
                    .mul(&Matrix::from_rows(
                        &Rationals,
                        (0..s)
                            .map(|a| {
                                (0..s)
                                    .map(|b| if a == b && a > 0 { q(1) } else { q(0) })
                                    .collect()
                            })
                            .collect(),
                    ))
                    .mul(&r);
            }
            Pencil::from_slices(u, v)
        }
        _ => {
            let s = rng.gen_range(2..=4);
            Pencil::from_slices(random_square(&mut rng, s), random_square(&mut rng, s))
        }
    }
}

fn all_rational_roots(p: &Pencil<Rationals>) -> Vec<(BigRational, BigRational)> {
    let f = &Rationals;
    let levels = kronstab::forms::minor_levels(f, &p.forms(), usize::MAX);
    let mut pts = Vec::new();
    for level in &levels {
        if let Ok(g) = kronstab::forms::gcd_of_forms(f, level) {
            pts.extend(g.roots(f).unwrap_or_default());
        }
    }
    pts
}

fn rank_mod_p_at_closed_point(
    p: &Pencil<Rationals>,
    min_rank: usize,
    dd: &[usize],
) -> Result<usize, String> {
    for prime in [
        10007u64, 10009, 10037, 10039, 10061, 10067, 10069, 10079, 10091, 10093, 20011, 30011,
        40009, 50021,
    ] {
        let fp = PrimeField::new(prime).unwrap();
        let (Ok(u), Ok(v)) = (p.u.convert(&fp), p.v.convert(&fp)) else {
            continue;
        };
        let pp = Pencil::from_slices(u, v);
        let an = analyze_pencil(&pp);
        if an.dd_degrees != dd || an.min_rank != min_rank {
            continue;
        }
        if let Some(Witness::Point { omega }) = an.witness {
            let pt: Vec<u32> = omega
                .iter()
                .map(|s| parse_rational(s).unwrap().to_integer().to_u32().unwrap())
                .collect();
            return Ok(pp.at(&pt[0], &pt[1]).rank());
        }
    }
    Err("no prime splits the divisor".into())
}

fn oracle() -> Outcome {
    let grid: Vec<(BigRational, BigRational)> = {
        let mut g = vec![(q(1), q(0))];
        for a in -8i64..=8 {
            for b in 1i64..=8 {
                if a.gcd(&b) == 1 {
                    g.push((q(a), q(b)));
                }
            }
        }
        g
    };
    let (mut closed, mut planted) = (0, 0);
    for i in 0..1000 {
        let p = pencil(i);
        let an = analyze_pencil(&p);
        let mut rational_min = usize::MAX;
        let roots = all_rational_roots(&p);
        planted += !roots.is_empty() as usize;
        for (a, b) in grid.iter().chain(roots.iter()) {
            rational_min = rational_min.min(p.at(a, b).rank());
        }
        match &an.witness {
            Some(Witness::Factor { .. }) => {
                ensure!(
                    rational_min > an.min_rank,
                    "pencil {i}: factor witness but rational rank {rational_min} = min"
                );
                let r = rank_mod_p_at_closed_point(&p, an.min_rank, &an.dd_degrees)
                    .map_err(|x| format!("pencil {i}: {x}"))?;
                ensure!(
                    r == an.min_rank,
                    "pencil {i}: rank {r} at a closed point, divisors say {}",
                    an.min_rank
                );
                closed += 1;
            }
            Some(Witness::Point { omega }) => {
                ensure!(
                    rational_min == an.min_rank,
                    "pencil {i}: evaluation {rational_min}, divisors {}",
                    an.min_rank
                );
                let (a, b) = (
                    parse_rational(&omega[0]).unwrap(),
                    parse_rational(&omega[1]).unwrap(),
                );
                ensure!(
                    p.at(&a, &b).rank() == an.min_rank,
                    "pencil {i}: witness point has the wrong rank"
                );
            }
            _ => ensure!(
                rational_min == an.min_rank,
                "pencil {i}: evaluation {rational_min}, divisors {}",
                an.min_rank
            ),
        }
    }
    Ok(format!(
        "1000 pencils, {planted} with rational roots, {closed} checked at closed points mod p"
    ))
}

fn complexes(recs: &[CensusRecord]) -> Outcome {
    let mut built = 0;
    for m in 1..=7usize {
        let n = m.max(2);
        for seed in 0..2u64 {
            let a = KroneckerMap::random(Dimensions::new(n, m, 2).unwrap(), seed, 1).unwrap();
            if !a.is_injective().unwrap() {
                continue;
            }
            let stable = e(git_verdict(&a))?.status == Status::Stable;
            let c = a.coeffs_in(&Rationals).unwrap();
            for r in 1..=3 {
                for cx in [build_sel_eis(&c, r), build_sel(&c, r, stable)]
                    .into_iter()
                    .flatten()
                {
                    ensure!(cx.is_complex(), "d^2 != 0 for m = {m}, r = {r}");
                    built += 1;
                }
            }
        }
    }
    let mut dual = 0;
    for r in recs {
        for &(deg, direct, dual_side) in &r.duality {
            ensure!(
                direct == dual_side,
                "sample {} of ({}, {}), r = {deg}: direct {direct}, dual {dual_side}",
                r.index,
                r.n,
                r.m
            );
            dual += 1;
        }
    }
    ensure!(dual > 0, "no reflexive case met");
    Ok(format!("{built} complexes, {dual} duality checks"))
}

fn normal_form() -> Outcome {
    let target = KroneckerMap::boundary_normal_form(3, 3).unwrap();
    for seed in 0..20 {
        let g = GroupElement::random(target.dims(), seed, true);
        let a = e(g.act(&target))?;
        match e(normal_form_reduce(&a))? {
            Reduction::Reduced { g: h, normal_form } => {
                ensure!(normal_form == target, "seed {seed}: wrong normal form");
                ensure!(
                    e(h.act(&a))? == target,
                    "seed {seed}: returned element does not reduce"
                );
            }
            Reduction::NotBoundary { reason } => return Err(format!("seed {seed}: {reason}")),
        }
    }
    Ok("20 group elements".into())
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |name: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("PASS {name}: {detail} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} ({secs:.1}s)");
            }
        }
    };
    report("1 fixture facts", &mut fixtures);
    report("2 GIT stability iff mu-stability", &mut equivalence);
    let recs = census();
    let recs = recs.as_deref().map_err(Clone::clone);
    report("3 filtration chain", &mut || filtration(recs.clone()?));
    report("4 codimension bound", &mut || codim_bound(recs.clone()?));
    report("5 moduli dimension", &mut moduli);
    report("6 divisors match evaluation", &mut oracle);
    report("7 complexes and duality", &mut || complexes(recs.clone()?));
    report("8 normal form round trip", &mut normal_form);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
