//! Parameter scans that certify closed forms and monotonicity claims.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{best_response, generic_forecast, verify_equilibrium, GridSearchConfig};
use crate::coopeq::{bertrand_closed_form, forecast, solve, CoalitionStructure};
use crate::error::{Error, Result};
use crate::games::{GameSpec, SymmetricAction};
use crate::preferences::{
    cooperation_threshold, prefers_cooperation, Comparison, PreferenceModel, PreferenceParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// One row of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub parameters: BTreeMap<String, String>,
    pub residual: f64,
    pub verdict: Verdict,
}

impl CheckRecord {
    fn new(check: &str, parameters: BTreeMap<String, String>, residual: f64, ok: bool) -> Self {
        CheckRecord {
            check: check.to_string(),
            parameters,
            residual,
            verdict: Verdict::from_bool(ok),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: Option<u64>,
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.verdict == Verdict::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.verdict == Verdict::Fail)
    }
}

fn params<const K: usize>(pairs: [(&str, String); K]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn game_params(spec: &GameSpec) -> BTreeMap<String, String> {
    let mut out = params([("variant", spec.variant().to_string())]);
    for (k, v) in spec.parameters() {
        out.insert(k.to_string(), v.to_string());
    }
    out
}

/// Deliberate defects for negative-control runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    #[default]
    None,
    /// Shift every predicted equilibrium action by this amount before checking it.
    PerturbPrediction(f64),
}

/// A random valid game with at most `max_n` players.
fn random_game(rng: &mut ChaCha8Rng, max_n: usize) -> GameSpec {
    match rng.gen_range(0..4) {
        0 => {
            let n = rng.gen_range(2..=max_n);
            let lo = 1.0 / n as f64 + 0.01;
            GameSpec::pgg(n, rng.gen_range(lo..0.99))
        }
        1 => {
            let n = rng.gen_range(2..=max_n);
            let b = rng.gen_range(0.1..=5.0);
            GameSpec::npd(n, b, b * rng.gen_range(0.01..0.95))
        }
        2 => {
            let n = rng.gen_range(2..=max_n);
            let high: f64 = rng.gen_range(2.0..=100.0);
            let low = if high - 1.5 <= 0.5 {
                if rng.gen_bool(0.5) {
                    0.0
                } else {
                    0.5
                }
            } else {
                rng.gen_range(0.0..high - 1.5)
            };
            GameSpec::bertrand(n, low, high)
        }
        _ => {
            let n = rng.gen_range(3..=max_n);
            GameSpec::general_pgg(n, rng.gen_range(1.0..n as f64).max(1.0 + 1e-3))
        }
    }
}

/// Generic forecasts against the closed forms, and equilibrium checks, on
/// `count` random games.
pub fn equivalence_scan(
    seed: u64,
    count: usize,
    cfg: &GridSearchConfig,
    fault: Fault,
) -> Result<Vec<CheckRecord>> {
    let cfg = cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_n = cfg.max_players_exhaustive.clamp(3, 12);
    let games: Vec<GameSpec> = (0..count).map(|_| random_game(&mut rng, max_n)).collect();
    let rows: Vec<Vec<CheckRecord>> = games
        .par_iter()
        .map(|spec| -> Result<Vec<CheckRecord>> {
            let spec = spec.validate()?;
            let mut residual: f64 = 0.0;
            for s in CoalitionStructure::ALL {
                let g = generic_forecast(&spec, s, &cfg)?;
                let c = forecast(&spec, s)?;
                residual = residual.max((g.forecast - c.forecast).abs());
            }
            let forecast_row = CheckRecord::new(
                "generic_forecast",
                game_params(&spec),
                residual,
                residual < cfg.tolerance,
            );
            let mut prediction = solve(&spec)?;
            if let Fault::PerturbPrediction(delta) = fault {
                let (low, high) = spec.action_bounds();
                let x = prediction.equilibrium.value() + delta;
                let x = if x > high { prediction.equilibrium.value() - delta } else { x };
                prediction.equilibrium = SymmetricAction::new(&spec, x.clamp(low, high))?;
            }
            let check = verify_equilibrium(&spec, &prediction, &cfg)?;
            let residual = check
                .payoff_shortfall
                .max(check.deviation_gain)
                .max(check.action_gap);
            let verify_row =
                CheckRecord::new("verify_equilibrium", game_params(&spec), residual, check.passed);
            Ok(vec![forecast_row, verify_row])
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1)) as f64
}

/// `sum_k lambda^(N-1-k) (1-lambda)^k C(N-1,k) k = (1-lambda)(N-1)` for `N <= max_n`.
pub fn binomial_identity_scan(max_n: usize, lambda_points: usize) -> Vec<CheckRecord> {
    (2..=max_n)
        .map(|n| {
            let m = (n - 1) as u64;
            let mut worst: f64 = 0.0;
            for t in 0..lambda_points {
                let lambda = t as f64 / (lambda_points - 1) as f64;
                let lhs: f64 = (0..=m)
                    .map(|k| {
                        lambda.powi((m - k) as i32)
                            * (1.0 - lambda).powi(k as i32)
                            * binomial(m, k)
                            * k as f64
                    })
                    .sum();
                worst = worst.max((lhs - (1.0 - lambda) * m as f64).abs());
            }
            CheckRecord::new(
                "binomial_identity",
                params([("n", n.to_string()), ("lambda_points", lambda_points.to_string())]),
                worst,
                worst < 1e-10,
            )
        })
        .collect()
}

/// Largest rise between consecutive values (zero for a non-increasing sequence).
fn largest_rise(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// PGG contribution is non-decreasing in `N` up to `max_n` for each `gamma`.
pub fn pgg_monotone_scan(gammas: &[f64], max_n: usize) -> Result<Vec<CheckRecord>> {
    gammas
        .par_iter()
        .map(|&gamma| {
            let start = ((1.0 / gamma).floor() as usize + 1).max(3);
            let contributions = (start..=max_n)
                .map(|n| solve(&GameSpec::pgg(n, gamma)).map(|p| p.equilibrium.value()))
                .collect::<Result<Vec<_>>>()?;
            let drops: Vec<f64> = contributions.iter().map(|x| -x).collect();
            let residual = largest_rise(&drops);
            Ok(CheckRecord::new(
                "pgg_contribution_monotone",
                params([
                    ("gamma", gamma.to_string()),
                    ("n_min", start.to_string()),
                    ("n_max", max_n.to_string()),
                ]),
                residual,
                residual <= 1e-12,
            ))
        })
        .collect()
}

/// NPD cooperation is non-increasing in `N`, strictly while positive.
pub fn npd_monotone_scan(pairs: &[(f64, f64)], max_n: usize) -> Result<Vec<CheckRecord>> {
    pairs
        .par_iter()
        .map(|&(b, c)| {
            let lambdas = (2..=max_n)
                .map(|n| solve(&GameSpec::npd(n, b, c)).map(|p| p.equilibrium.value()))
                .collect::<Result<Vec<_>>>()?;
            let residual = largest_rise(&lambdas);
            let strict = lambdas
                .windows(2)
                .all(|w| w[0] == 0.0 || w[1] < w[0]);
            Ok(CheckRecord::new(
                "npd_cooperation_monotone",
                params([
                    ("b", b.to_string()),
                    ("c", c.to_string()),
                    ("n_max", max_n.to_string()),
                ]),
                residual,
                residual == 0.0 && strict,
            ))
        })
        .collect()
}

/// Bertrand price is non-increasing in `N` and reaches the floor by `max_n`.
/// For `N <= eq9_n` the pipeline is also compared with the literal price
/// formula clamped to the strategy interval and with the enumeration oracle.
pub fn bertrand_scan(
    games: &[(f64, f64)],
    max_n: usize,
    eq9_n: usize,
    cfg: &GridSearchConfig,
) -> Result<Vec<CheckRecord>> {
    let cfg = cfg.validate()?;
    let mut out = Vec::new();
    for &(low, high) in games {
        let prices = (2..=max_n)
            .map(|n| solve(&GameSpec::bertrand(n, low, high)).map(|p| p.equilibrium.value()))
            .collect::<Result<Vec<_>>>()?;
        let rise = largest_rise(&prices);
        let floor_gap = prices.last().map_or(f64::INFINITY, |p| p - low);
        out.push(CheckRecord::new(
            "bertrand_monotone",
            params([
                ("low", low.to_string()),
                ("high", high.to_string()),
                ("n_max", max_n.to_string()),
            ]),
            rise.max(floor_gap),
            rise == 0.0 && floor_gap <= 1e-12 * high,
        ));
        for n in 2..=eq9_n.min(cfg.max_players_exhaustive) {
            let spec = GameSpec::bertrand(n, low, high);
            let literal = bertrand_closed_form(n, low, high)?.min(high);
            let pipeline = solve(&spec)?.equilibrium.value();
            let mut v: f64 = f64::NEG_INFINITY;
            for s in CoalitionStructure::ALL {
                v = v.max(generic_forecast(&spec, s, &cfg)?.forecast);
            }
            let enumerated = (v * n as f64).clamp(low, high);
            let residual = (pipeline - literal).abs().max((enumerated - literal).abs());
            out.push(CheckRecord::new(
                "bertrand_price_formula",
                game_params(&spec),
                residual,
                residual < cfg.tolerance,
            ));
        }
    }
    Ok(out)
}

/// Grid best responses in the PGG and NPD are the Nash action against every
/// common opponent action.
pub fn dominance_scan(cfg: &GridSearchConfig, opponent_points: usize) -> Result<Vec<CheckRecord>> {
    let cfg = cfg.validate()?;
    let specs = [
        GameSpec::pgg(4, 0.5),
        GameSpec::pgg(40, 0.9),
        GameSpec::general_pgg(10, 7.5),
        GameSpec::npd(2, 0.3, 0.1),
        GameSpec::npd(7, 2.0, 1.5),
    ];
    specs
        .iter()
        .map(|spec| {
            let mut worst: f64 = 0.0;
            for x in super::action_grid(spec, opponent_points) {
                let br = best_response(spec, SymmetricAction::new(spec, x)?, &cfg)?;
                worst = worst.max((br - spec.nash_action()).abs());
            }
            Ok(CheckRecord::new("dominance", game_params(spec), worst, worst == 0.0))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Proposition {
    /// Fehr–Schmidt in the NPD: cooperation falls with group size.
    FsNpd,
    /// Fehr–Schmidt in the PGG: no group-size effect.
    FsPgg,
    /// One-parameter Charness–Rabin in the NPD: no group-size effect.
    CrNpd,
    /// One-parameter Charness–Rabin in the PGG: cooperation rises with group size.
    CrPgg,
}

impl Proposition {
    pub const ALL: [Proposition; 4] = [
        Proposition::FsNpd,
        Proposition::FsPgg,
        Proposition::CrNpd,
        Proposition::CrPgg,
    ];
}

/// Threshold and population-share monotonicity for one proposition.
///
/// `sample` holds the swept preference parameter (beta for Fehr–Schmidt,
/// alpha for Charness–Rabin); the share of the sample preferring cooperation
/// is computed by direct utility comparison.
pub fn proposition_scan(
    prop: Proposition,
    ns: &[usize],
    game: &dyn Fn(usize) -> GameSpec,
    sample: &[f64],
) -> Result<Vec<CheckRecord>> {
    let model = match prop {
        Proposition::FsNpd | Proposition::FsPgg => PreferenceModel::FehrSchmidt,
        _ => PreferenceModel::CharnessRabin,
    };
    let to_params = |x: f64| match model {
        PreferenceModel::FehrSchmidt => PreferenceParams::FehrSchmidt {
            alpha: 3.0,
            beta: x,
        },
        _ => PreferenceParams::CharnessRabin { alpha: x },
    };
    let mut thresholds = Vec::with_capacity(ns.len());
    let mut shares = Vec::with_capacity(ns.len());
    let mut disagreements = 0usize;
    for &n in ns {
        let spec = game(n).validate()?;
        let t = cooperation_threshold(model, &spec)?;
        let mut count = 0usize;
        for &x in sample {
            let p = to_params(x);
            let direct = prefers_cooperation(&p, &spec, Comparison::VersusCooperation)?;
            if direct != t.admits(&p)? {
                disagreements += 1;
            }
            count += direct as usize;
        }
        thresholds.push(t.value);
        shares.push(count as f64 / sample.len().max(1) as f64);
    }
    let steps: Vec<f64> = thresholds.windows(2).map(|w| w[1] - w[0]).collect();
    let (threshold_ok, threshold_residual) = match prop {
        // A higher beta bound admits fewer players.
        Proposition::FsNpd | Proposition::CrPgg => (
            steps.iter().all(|&d| d > 0.0),
            steps.iter().copied().fold(0.0, |m: f64, d| m.max(-d)),
        ),
        Proposition::FsPgg | Proposition::CrNpd => (
            steps.iter().all(|&d| d == 0.0),
            steps.iter().copied().fold(0.0, |m: f64, d| m.max(d.abs())),
        ),
    };
    let share_residual = match prop {
        Proposition::FsNpd => largest_rise(&shares),
        Proposition::CrPgg => largest_rise(&shares.iter().map(|s| -s).collect::<Vec<_>>()),
        _ => shares
            .iter()
            .map(|s| (s - shares[0]).abs())
            .fold(0.0, f64::max),
    };
    let label = format!("{prop:?}");
    let range = |ns: &[usize]| {
        format!(
            "{}..{}",
            ns.first().copied().unwrap_or(0),
            ns.last().copied().unwrap_or(0)
        )
    };
    let base = params([("proposition", label), ("n", range(ns))]);
    Ok(vec![
        CheckRecord::new(
            "proposition_threshold",
            base.clone(),
            threshold_residual,
            threshold_ok,
        ),
        CheckRecord::new(
            "proposition_share",
            base.clone(),
            share_residual,
            share_residual == 0.0,
        ),
        CheckRecord::new(
            "proposition_predicate",
            base,
            disagreements as f64,
            disagreements == 0,
        ),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Equivalence,
    Binomial,
    Monotone,
    Bertrand,
    Propositions,
    Dominance,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = [
        "all",
        "equivalence",
        "binomial",
        "monotone",
        "bertrand",
        "propositions",
        "dominance",
    ];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "equivalence" => Suite::Equivalence,
            "binomial" => Suite::Binomial,
            "monotone" => Suite::Monotone,
            "bertrand" => Suite::Bertrand,
            "propositions" => Suite::Propositions,
            "dominance" => Suite::Dominance,
            other => return Err(Error::Unsupported(format!("unknown suite {other}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(Suite::NAMES[*self as usize])
    }
}

/// Runs a suite at its standard sizes. Only the equivalence and proposition
/// suites draw random numbers.
pub fn run_suite(
    suite: Suite,
    seed: u64,
    cfg: &GridSearchConfig,
    fault: Fault,
) -> Result<VerificationReport> {
    let mut records = Vec::new();
    let wants = |s: Suite| suite == Suite::All || suite == s;
    if wants(Suite::Equivalence) {
        records.extend(equivalence_scan(seed, 200, cfg, fault)?);
    }
    if wants(Suite::Binomial) {
        records.extend(binomial_identity_scan(30, 101));
    }
    if wants(Suite::Monotone) {
        let gammas: Vec<f64> = (2..=9).map(|k| k as f64 / 10.0).collect();
        records.extend(pgg_monotone_scan(&gammas, 10_000)?);
        let pairs = [(0.3, 0.1), (0.5, 0.1), (1.0, 0.5), (2.0, 0.2), (5.0, 4.0)];
        records.extend(npd_monotone_scan(&pairs, 200)?);
    }
    if wants(Suite::Bertrand) {
        let games = [(0.0, 2.0), (0.5, 2.0), (0.0, 5.0), (1.0, 5.0), (0.0, 10.0), (1.0, 10.0), (0.0, 100.0), (1.0, 100.0)];
        records.extend(bertrand_scan(&games, 10_000, 6, cfg)?);
    }
    if wants(Suite::Propositions) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let betas: Vec<f64> = (0..500).map(|_| rng.gen_range(0.0..3.0)).collect();
        let alphas: Vec<f64> = (0..500).map(|_| rng.gen_range(0.0..1.0)).collect();
        let npd = |n| GameSpec::npd(n, 0.3, 0.1);
        let pgg = |n| GameSpec::pgg(n, 0.5);
        let small: Vec<usize> = (3..=100).collect();
        let large: Vec<usize> = (3..=1000).collect();
        records.extend(proposition_scan(Proposition::FsNpd, &(2..=100).collect::<Vec<_>>(), &npd, &betas)?);
        records.extend(proposition_scan(Proposition::FsPgg, &small, &pgg, &betas)?);
        records.extend(proposition_scan(Proposition::CrNpd, &(2..=50).collect::<Vec<_>>(), &npd, &alphas)?);
        records.extend(proposition_scan(Proposition::CrPgg, &large, &pgg, &alphas)?);
    }
    if wants(Suite::Dominance) {
        records.extend(dominance_scan(cfg, 51)?);
    }
    let seeded = wants(Suite::Equivalence) || wants(Suite::Propositions);
    Ok(VerificationReport {
        seed: seeded.then_some(seed),
        records,
    })
}
