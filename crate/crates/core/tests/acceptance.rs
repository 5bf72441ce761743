//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coopeq::cli::{self, OutputRecord};
use coopeq::coopeq::{sweep_schedule, BenefitSchedule};
use coopeq::empirics::{rank_sum, read_datasets, summarize, PValueMethod};
use coopeq::oracle::{run_suite, Fault, GridSearchConfig, Suite, VerificationReport};
use coopeq::{solve, GameSpec};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:.2?}, limit {limit:.0?}"))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pgg_point_predictions() -> Outcome {
    let start = Instant::now();
    let s = solve(&GameSpec::pgg(4, 0.5)).map_err(|e| e.to_string())?;
    let l = solve(&GameSpec::pgg(40, 0.5)).map_err(|e| e.to_string())?;
    let (s, l) = (s.equilibrium.value(), l.equilibrium.value());
    ensure(s == 0.0, || format!("n=4 gave {s}"))?;
    ensure((l - 0.3464).abs() <= 5e-4, || format!("n=40 gave {l}"))?;
    within(start.elapsed(), Duration::from_millis(500))?;
    Ok(format!("n=4 -> {s}, n=40 -> {l:.6} ({:.2} on a 10-unit endowment)", 10.0 * l))
}

fn npd_point_predictions() -> Outcome {
    let start = Instant::now();
    let s = solve(&GameSpec::npd(2, 0.3, 0.1)).map_err(|e| e.to_string())?;
    let l = solve(&GameSpec::npd(11, 0.3, 0.1)).map_err(|e| e.to_string())?;
    let (s, l) = (s.equilibrium.value(), l.equilibrium.value());
    ensure((s - 0.5).abs() <= 1e-9, || format!("n=2 gave {s}"))?;
    ensure(l == 0.0, || format!("n=11 gave {l}"))?;
    within(start.elapsed(), Duration::from_millis(500))?;
    Ok(format!("n=2 -> {s}, n=11 -> {l}"))
}

fn model_comparison_table() -> Outcome {
    let start = Instant::now();
    let mut buf = Vec::new();
    let code = cli::run(["coopeq", "--format", "json", "--seed", "7", "compare"], &mut buf);
    ensure(code == 0, || format!("compare exited with {code}"))?;
    let record = OutputRecord::from_json(&String::from_utf8_lossy(&buf)).map_err(|e| e.to_string())?;
    let table = record.table("model comparison").ok_or("no comparison table")?;
    let got: Vec<Vec<&str>> = table
        .rows
        .iter()
        .map(|r| r.iter().map(|c| c.as_str().unwrap_or("?")).collect())
        .collect();
    let want = vec![
        vec!["FS", "none", "negative", "two"],
        vec!["CR1", "positive", "none", "one"],
        vec!["CR2", "positive", "negative", "two"],
        vec!["CE", "positive", "negative", "none"],
    ];
    ensure(got == want, || format!("got {got:?}"))?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("4 rows match in {:.2?}", start.elapsed()))
}

fn failures(report: &VerificationReport) -> Vec<String> {
    report
        .failures()
        .map(|r| format!("{} {:?} residual {}", r.check, r.parameters, r.residual))
        .collect()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let cfg = GridSearchConfig::default();
    let eq = run_suite(Suite::Equivalence, 2015, &cfg, Fault::None).map_err(|e| e.to_string())?;
    let bin = run_suite(Suite::Binomial, 2015, &cfg, Fault::None).map_err(|e| e.to_string())?;
    let count = |check: &str| eq.records.iter().filter(|r| r.check == check).count();
    let (forecasts, verified) = (count("generic_forecast"), count("verify_equilibrium"));
    ensure(forecasts >= 200 && verified >= 200, || {
        format!("only {forecasts} forecasts and {verified} verifications")
    })?;
    let bad = failures(&eq);
    ensure(bad.is_empty(), || format!("{} failures, first {}", bad.len(), bad[0]))?;
    let worst = eq
        .records
        .iter()
        .filter(|r| r.check == "generic_forecast")
        .map(|r| r.residual)
        .fold(0.0, f64::max);
    ensure(worst < 1e-6, || format!("forecast residual {worst}"))?;
    let bad = failures(&bin);
    ensure(bad.is_empty(), || format!("binomial identity: {}", bad[0]))?;
    let worst_binomial = bin.records.iter().map(|r| r.residual).fold(0.0, f64::max);
    ensure(worst_binomial <= 1e-10, || format!("binomial residual {worst_binomial}"))?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "{forecasts} instances, max residual {worst:.1e}, binomial max {worst_binomial:.1e}, {:.2?}",
        start.elapsed()
    ))
}

fn monotonicity_suites() -> Outcome {
    let start = Instant::now();
    let cfg = GridSearchConfig::default();
    let mut runs = 0;
    for suite in [Suite::Monotone, Suite::Bertrand, Suite::Propositions] {
        let report = run_suite(suite, 2015, &cfg, Fault::None).map_err(|e| e.to_string())?;
        let bad = failures(&report);
        ensure(bad.is_empty(), || format!("{suite}: {} counterexamples, first {}", bad.len(), bad[0]))?;
        ensure(!report.records.is_empty(), || format!("{suite} produced no checks"))?;
        runs += report.records.len();
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("{runs} checks, no counterexamples, {:.2?}", start.elapsed()))
}

fn general_pgg_peak() -> Outcome {
    let start = Instant::now();
    let ns: Vec<usize> = (3..=80).collect();
    let schedule = BenefitSchedule::Capped { slope: 0.5, cap: 10.0 };
    let points = sweep_schedule(&schedule, &ns).map_err(|e| e.to_string())?;
    let values: Vec<f64> = points.iter().map(|p| p.prediction.equilibrium.value()).collect();
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let at = values.iter().position(|&v| v == best).unwrap();
    let last = values.len() - 1;
    ensure(best > values[0] && best > values[last], || {
        format!("maximum {best} at n={} is not interior", ns[at])
    })?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "peak {best:.4} at n={}, endpoints {:.4} and {:.4}",
        ns[at], values[0], values[last]
    ))
}

/// Two-sided p-value by listing every way to split the pooled ranks.
fn brute_force_p(m: usize, n: usize, u_obs: f64) -> f64 {
    let total = m + n;
    let mut us = Vec::new();
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let rank_sum: usize = (0..total).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).sum();
        us.push(rank_sum as f64 - (m * (m + 1)) as f64 / 2.0);
    }
    let k = us.len() as f64;
    let lower = us.iter().filter(|&&u| u <= u_obs).count() as f64 / k;
    let upper = us.iter().filter(|&&u| u >= u_obs).count() as f64 / k;
    (2.0 * lower.min(upper)).min(1.0)
}

fn empirics() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2015);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let m = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=8);
        let mut pool: Vec<f64> = (0..m + n).map(|i| i as f64 + rng.gen::<f64>() * 0.5).collect();
        for i in (1..pool.len()).rev() {
            pool.swap(i, rng.gen_range(0..=i));
        }
        let (a, b) = pool.split_at(m);
        let r = rank_sum(a, b).map_err(|e| e.to_string())?;
        ensure(r.method == PValueMethod::Exact, || format!("sizes ({m},{n}) not exact"))?;
        let p = brute_force_p(m, n, r.u);
        worst = worst.max((p - r.p_value).abs());
    }
    ensure(worst < 1e-12, || format!("exact and brute-force p differ by {worst}"))?;

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/summary_fixture.csv");
    let file = std::fs::File::open(path).map_err(|e| e.to_string())?;
    let data = read_datasets(file, 10.0).map_err(|e| e.to_string())?;
    let s = summarize(&data[0]).map_err(|e| e.to_string())?;
    ensure(s.mean == 5.0 && (s.sem - 1.336).abs() <= 1e-3, || {
        format!("fixture mean {} sem {}", s.mean, s.sem)
    })?;
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "500 instances, max p difference {worst:.1e}; fixture mean {} sem {:.4}",
        s.mean, s.sem
    ))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_coopeq");
    let commands: &[&[&str]] = &[
        &["--seed", "11", "compare"],
        &["--seed", "11", "--format", "json", "compare", "--samples", "5000"],
        &["--seed", "11", "--format", "csv", "verify", "--suite", "equivalence"],
        &["--seed", "11", "verify", "--suite", "propositions"],
        &["--seed", "11", "--format", "json", "analyze", "--synthetic", "--game", "npd"],
        &["--seed", "11", "--format", "csv", "synthesize"],
        &["--seed", "11", "tables", "--table", "3"],
    ];
    for args in commands {
        let run = || Command::new(bin).args(*args).output().map_err(|e| e.to_string());
        let (first, second) = (run()?, run()?);
        ensure(first.status.success(), || format!("{args:?} exited with {}", first.status))?;
        ensure(first.stdout == second.stdout, || format!("{args:?} differs between runs"))?;
        ensure(!first.stdout.is_empty(), || format!("{args:?} printed nothing"))?;
    }
    Ok(format!("{} seeded commands byte-identical across runs", commands.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("CE public goods point predictions", pgg_point_predictions),
        ("CE prisoner's dilemma point predictions", npd_point_predictions),
        ("model comparison table", model_comparison_table),
        ("oracle equivalence", oracle_equivalence),
        ("monotonicity suites", monotonicity_suites),
        ("generalized PGG interior peak", general_pgg_peak),
        ("rank-sum exactness and summary fixture", empirics),
        ("seeded determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
