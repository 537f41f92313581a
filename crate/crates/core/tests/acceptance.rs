//! Acceptance suite. Every test prints one `criterion N ... PASS|FAIL` line
//! before asserting, so `cargo test --test acceptance -- --nocapture` gives a
//! complete scorecard even when some criteria fail.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use rampsvm::certify::{check_kkt, check_pstationary, grade_point};
use rampsvm::io::{fixtures, gen_synthetic, SyntheticConfig};
use rampsvm::prox::{prox_large_step, prox_objective, prox_oracle, prox_scalar, prox_small_step};
use rampsvm::solver::{
    global_oracle, probe_local_minimum, train_admm, OracleConfig, SolveResult, SolveStatus,
    SolverConfig,
};
use rampsvm::support::{extract_support, support_threshold, verify_support_hyperplanes};
use rampsvm::{Dataset, PrimalDualPoint, ProblemData, ProxParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} {name:<28} {status}  {detail}");
}

fn dv(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

/// A point certified somewhere in this suite, with the step and tolerance
/// it was certified at.
struct Certified {
    problem: ProblemData,
    point: PrimalDualPoint,
    c: f64,
    gamma: f64,
    tol: f64,
}

// ---------------------------------------------------------------------------
// Shared runs

struct NecessityRun {
    problem: ProblemData,
    c: f64,
    gamma: f64,
    point: PrimalDualPoint,
    max_residual: f64,
    passed: bool,
}

const NECESSITY_TOL: f64 = 1e-2;

fn necessity_runs() -> &'static (Vec<NecessityRun>, Duration) {
    static RUNS: OnceLock<(Vec<NecessityRun>, Duration)> = OnceLock::new();
    RUNS.get_or_init(|| {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut runs = Vec::new();
        for k in 0..50 {
            let m = rng.random_range(3..=6);
            let c = if k % 2 == 0 { 0.1 } else { 1.0 };
            let problem = loop {
                let features: Vec<Vec<f64>> = (0..m)
                    .map(|_| (0..2).map(|_| rng.random_range(-2.0..2.0)).collect())
                    .collect();
                let labels: Vec<f64> = (0..m)
                    .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
                    .collect();
                let p = ProblemData::build(&Dataset::new(features, labels).unwrap()).unwrap();
                if p.full_column_rank() {
                    break p;
                }
            };
            let opt = global_oracle(&problem, c, &OracleConfig::default()).unwrap();
            let gamma = 0.5 / problem.lambda_h().unwrap();
            let grade = grade_point(&opt.w, opt.b, &problem, c, &[gamma], NECESSITY_TOL).unwrap();
            let cert = grade.best_certificate();
            runs.push(NecessityRun {
                c,
                gamma,
                max_residual: cert.max_residual(),
                passed: cert.is_pstationary(),
                point: grade.point.clone(),
                problem,
            });
        }
        (runs, start.elapsed())
    })
}

struct AdmmRun {
    label: String,
    problem: ProblemData,
    config: SolverConfig,
    result: SolveResult,
}

const MARGIN_C: f64 = 1.0;

fn margin_problems() -> Vec<(u64, ProblemData)> {
    (0..20u64)
        .map(|seed| {
            let data = gen_synthetic(&SyntheticConfig::new(10, 3.0, 0.1, seed)).unwrap();
            (seed, ProblemData::build(&data.dataset).unwrap())
        })
        .collect()
}

fn admm_runs() -> &'static Vec<AdmmRun> {
    static RUNS: OnceLock<Vec<AdmmRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let mut runs = Vec::new();
        let mut push = |label: String, problem: ProblemData, config: SolverConfig| {
            let result = train_admm(&problem, &config).unwrap();
            runs.push(AdmmRun {
                label,
                problem,
                config,
                result,
            });
        };
        for (seed, problem) in margin_problems() {
            push(
                format!("synthetic seed {seed}"),
                problem,
                SolverConfig::new(MARGIN_C)
                    .with_tol(1e-9)
                    .with_max_iter(50_000),
            );
        }
        let single = ProblemData::build(&fixtures::single_sample()).unwrap();
        push(
            "single sample".into(),
            single,
            SolverConfig::new(1.0).with_sigma(1.0),
        );
        let pair = ProblemData::build(&fixtures::symmetric_pair()).unwrap();
        push(
            "symmetric pair".into(),
            pair,
            SolverConfig::new(1.0).with_sigma(0.5).with_tol(1e-10),
        );
        let cx = ProblemData::build(&fixtures::counterexample()).unwrap();
        for sigma in [0.05, 0.125, 0.5] {
            push(
                format!("counterexample sigma {sigma}"),
                cx.clone(),
                SolverConfig::new(fixtures::COUNTEREXAMPLE_C)
                    .with_sigma(sigma)
                    .with_max_iter(50_000),
            );
        }
        runs
    })
}

fn counterexample_point() -> (ProblemData, PrimalDualPoint) {
    let problem = ProblemData::build(&fixtures::counterexample()).unwrap();
    let point = PrimalDualPoint::from_primal(
        &problem,
        dv(&fixtures::COUNTEREXAMPLE_W),
        fixtures::COUNTEREXAMPLE_B,
        dv(&fixtures::COUNTEREXAMPLE_LAMBDA),
    )
    .unwrap();
    (problem, point)
}

fn single_sample_point() -> (ProblemData, PrimalDualPoint) {
    let problem = ProblemData::build(&fixtures::single_sample()).unwrap();
    let point = PrimalDualPoint {
        w: dv(&[0.0]),
        b: 1.0,
        u: dv(&[0.0]),
        lambda: dv(&[0.0]),
    };
    (problem, point)
}

fn symmetric_pair_point() -> (ProblemData, PrimalDualPoint) {
    let problem = ProblemData::build(&fixtures::symmetric_pair()).unwrap();
    let point = PrimalDualPoint {
        w: dv(&[1.0]),
        b: 0.0,
        u: dv(&[0.0, 0.0]),
        lambda: dv(&[-0.5, -0.5]),
    };
    (problem, point)
}

// ---------------------------------------------------------------------------
// Criteria

#[test]
fn criterion_01_prox_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let gcs = [0.3, 1.0, 1.9, 2.0, 4.0, 10.0];
    let mut worst = 0.0f64;
    let mut worst_case = (0.0, 0.0);
    for _ in 0..10_000 {
        let s = rng.random_range(-5.0..8.0);
        let gc = gcs[rng.random_range(0..gcs.len())];
        let gamma = rng.random_range(0.5..2.0);
        let params = ProxParams::new(gamma, gc / gamma).unwrap();
        let best = prox_objective(prox_oracle(s, params).unwrap(), s, params);
        for &v in prox_scalar(s, params).unwrap().values() {
            let gap = (prox_objective(v, s, params) - best).abs();
            if gap > worst {
                worst = gap;
                worst_case = (s, gc);
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-9 && elapsed < Duration::from_secs(10);
    report(
        1,
        "prox oracle equivalence",
        ok,
        &format!(
            "max gap {worst:.3e} at (s, gC) = {worst_case:?}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_02_tie_exactness() {
    let mut worst = 0.0f64;
    let mut all_pairs = true;
    let cases = [
        (0.5, false),
        (1.0, false),
        (1.9, false),
        (2.0, true),
        (8.0, true),
    ];
    for (gc, large) in cases {
        let params = ProxParams::new(1.0, gc).unwrap();
        let s = if large {
            (2.0 * gc).sqrt()
        } else {
            1.0 + gc / 2.0
        };
        let set = prox_scalar(s, params).unwrap();
        let v = set.values();
        all_pairs &= v.len() == 2 && set.is_tie();
        if v.len() == 2 {
            worst = worst
                .max((prox_objective(v[0], s, params) - prox_objective(v[1], s, params)).abs());
        }
    }
    let ok = all_pairs && worst <= 1e-12;
    report(
        2,
        "tie exactness",
        ok,
        &format!("two members each: {all_pairs}, max objective gap {worst:.3e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_03_regime_continuity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let s = rng.random_range(-5.0..8.0);
        if prox_small_step(s, 2.0).values() != prox_large_step(s, 2.0).values() {
            mismatches += 1;
        }
    }
    let ok = mismatches == 0;
    report(
        3,
        "regime continuity",
        ok,
        &format!("{mismatches} of 1000 sets differ"),
    );
    assert!(ok);
}

#[test]
fn criterion_04_counterexample() {
    let start = Instant::now();
    let (problem, point) = counterexample_point();
    let c = fixtures::COUNTEREXAMPLE_C;
    let kkt = check_kkt(&point, &problem, c, 1e-12).unwrap();
    let kkt_max = kkt.equality.max().max(kkt.r_subdiff);
    let min_prox = fixtures::COUNTEREXAMPLE_GAMMAS
        .iter()
        .map(|&g| {
            check_pstationary(&point, &problem, c, g, 1e-12)
                .unwrap()
                .r_prox
        })
        .fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    let ok = kkt.holds && kkt_max <= 1e-12 && min_prox >= 0.1 && elapsed < Duration::from_secs(1);
    report(
        4,
        "counterexample reproduction",
        ok,
        &format!(
            "KKT max residual {kkt_max:.1e}, min prox residual {min_prox:.6} over gamma {:?}, {:.3}s",
            fixtures::COUNTEREXAMPLE_GAMMAS,
            elapsed.as_secs_f64()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_05_necessity_probe() {
    let (runs, elapsed) = necessity_runs();
    let failures: Vec<String> = runs
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.passed)
        .map(|(k, r)| {
            format!(
                "#{k} (m={}, C={}, gamma={:.4}, residual {:.3})",
                r.problem.n_samples(),
                r.c,
                r.gamma,
                r.max_residual
            )
        })
        .collect();
    let ok = failures.is_empty() && *elapsed < Duration::from_secs(60);
    report(
        5,
        "necessity probe",
        ok,
        &format!(
            "{}/{} certified at gamma = 0.5/lambda_H, {:.1}s; failing: {}",
            runs.len() - failures.len(),
            runs.len(),
            elapsed.as_secs_f64(),
            if failures.is_empty() {
                "none".to_string()
            } else {
                failures.join(", ")
            }
        ),
    );
    assert!(ok, "necessity probe failures: {failures:?}");
}

#[test]
fn criterion_06_sufficiency_probe() {
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0;
    let mut failing = Vec::new();
    for (k, run) in admm_runs().iter().enumerate() {
        if run.result.status != SolveStatus::Converged {
            continue;
        }
        checked += 1;
        let probe = probe_local_minimum(
            &run.problem,
            &run.result.point.w,
            run.result.point.b,
            run.config.c,
            1e-3,
            1000,
            k as u64,
        )
        .unwrap();
        worst = worst.max(probe.max_decrease);
        if probe.max_decrease > 1e-9 {
            failing.push(run.label.clone());
        }
    }
    let ok = checked > 0 && failing.is_empty();
    report(
        6,
        "sufficiency probe",
        ok,
        &format!(
            "{checked} converged runs probed, largest decrease {worst:.3e}, failing: {failing:?}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_07_margin_geometry() {
    let c = MARGIN_C;
    let mut converged = 0;
    let mut support_total = 0;
    let mut problems = Vec::new();
    for run in admm_runs()
        .iter()
        .filter(|r| r.label.starts_with("synthetic"))
    {
        assert_eq!(run.config.gamma_c(), 2.0);
        if run.result.status != SolveStatus::Converged {
            continue;
        }
        converged += 1;
        let gamma = run.config.gamma();
        let lo = -(2.0 * c / gamma).sqrt();
        let point = &run.result.point;
        let sv = extract_support(
            point,
            &run.problem,
            support_threshold(gamma, run.config.tol),
        )
        .unwrap();
        support_total += sv.len();
        for &i in &sv.indices {
            let (u, l) = (point.u[i], point.lambda[i]);
            if u.abs() > 1e-5 || !(l >= lo && l < 0.0) {
                problems.push(format!("{} sample {i}: u={u:.3e} lambda={l:.6}", run.label));
            }
        }
        let check = verify_support_hyperplanes(point, &run.problem, c, gamma, 1e-6).unwrap();
        if !check.holds {
            problems.push(format!(
                "{}: hyperplane check failed ({:.3e})",
                run.label, check.max_margin_deviation
            ));
        }
    }
    let ok = converged > 0 && problems.is_empty();
    report(
        7,
        "margin geometry",
        ok,
        &format!("{converged}/20 runs converged, {support_total} support vectors checked, issues: {problems:?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_08_outlier_boundedness() {
    let c = 1.0;
    let mut worst = f64::NEG_INFINITY;
    for seed in 0..10u64 {
        let data = gen_synthetic(&SyntheticConfig::new(4, 2.0, 0.0, 100 + seed)).unwrap();
        let base = ProblemData::build(&data.dataset).unwrap();
        let old = global_oracle(&base, c, &OracleConfig::default()).unwrap();

        let mut features: Vec<Vec<f64>> = (0..data.dataset.n_samples())
            .map(|i| data.dataset.sample(i))
            .collect();
        let mut labels = data.dataset.labels().to_vec();
        features.push(vec![-25.0, 3.0 * (seed as f64 - 4.5)]);
        labels.push(1.0);
        let grown = ProblemData::build(&Dataset::new(features, labels).unwrap()).unwrap();
        let mut seed_point: Vec<f64> = old.w.iter().copied().collect();
        seed_point.push(old.b);
        let cfg = OracleConfig {
            seeds: vec![seed_point],
            ..OracleConfig::default()
        };
        let new = global_oracle(&grown, c, &cfg).unwrap();
        worst = worst.max(new.objective - old.objective);
    }
    let ok = worst <= c + 1e-6;
    report(
        8,
        "outlier boundedness",
        ok,
        &format!("largest objective increase {worst:.6} (cap C = {c})"),
    );
    assert!(ok);
}

#[test]
fn criterion_09_p_implies_kkt() {
    let mut records: Vec<Certified> = Vec::new();
    let (cx, cx_point) = counterexample_point();
    for &g in &fixtures::COUNTEREXAMPLE_GAMMAS {
        records.push(Certified {
            problem: cx.clone(),
            point: cx_point.clone(),
            c: fixtures::COUNTEREXAMPLE_C,
            gamma: g,
            tol: 1e-12,
        });
    }
    let (one, one_point) = single_sample_point();
    for g in [0.1, 1.0, 2.0, 10.0] {
        records.push(Certified {
            problem: one.clone(),
            point: one_point.clone(),
            c: 1.0,
            gamma: g,
            tol: 1e-12,
        });
    }
    let (pair, pair_point) = symmetric_pair_point();
    records.push(Certified {
        problem: pair,
        point: pair_point,
        c: 1.0,
        gamma: 2.0,
        tol: 1e-12,
    });
    for run in &necessity_runs().0 {
        records.push(Certified {
            problem: run.problem.clone(),
            point: run.point.clone(),
            c: run.c,
            gamma: run.gamma,
            tol: NECESSITY_TOL,
        });
    }
    for run in admm_runs() {
        records.push(Certified {
            problem: run.problem.clone(),
            point: run.result.point.clone(),
            c: run.config.c,
            gamma: run.config.gamma(),
            tol: run.config.tol,
        });
    }

    let mut passing = 0;
    let mut violations = Vec::new();
    for (k, r) in records.iter().enumerate() {
        let cert = check_pstationary(&r.point, &r.problem, r.c, r.gamma, r.tol).unwrap();
        if !cert.is_pstationary() {
            continue;
        }
        passing += 1;
        let kkt = check_kkt(&r.point, &r.problem, r.c, 10.0 * r.tol).unwrap();
        if !kkt.holds {
            violations.push(format!(
                "record {k}: subdiff residual {:.3e}",
                kkt.r_subdiff
            ));
        }
    }
    let ok = passing > 0 && violations.is_empty();
    report(
        9,
        "P implies KKT",
        ok,
        &format!(
            "{} points checked, {passing} P-stationary, violations: {violations:?}",
            records.len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_10_fixture_exactness() {
    let (one, one_point) = single_sample_point();
    let mut worst_one = 0.0f64;
    let mut one_ok = true;
    for g in [0.1, 1.0, 2.0, 10.0] {
        let cert = check_pstationary(&one_point, &one, 1.0, g, 1e-12).unwrap();
        worst_one = worst_one.max(cert.max_residual());
        one_ok &= cert.is_pstationary();
    }
    let (pair, pair_point) = symmetric_pair_point();
    let cert = check_pstationary(&pair_point, &pair, 1.0, 2.0, 1e-12).unwrap();
    let objective = pair.objective(&pair_point.w, pair_point.b, 1.0).unwrap();
    let pair_ok =
        cert.is_pstationary() && cert.max_residual() <= 1e-12 && (objective - 0.5).abs() <= 1e-12;
    let ok = one_ok && worst_one <= 1e-12 && pair_ok;
    report(
        10,
        "fixture exactness",
        ok,
        &format!(
            "m=1 max residual {worst_one:.1e}; pair max residual {:.1e}, objective {objective}",
            cert.max_residual()
        ),
    );
    assert!(ok);
}
