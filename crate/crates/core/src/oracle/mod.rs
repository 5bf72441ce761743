//! Brute-force verification of the closed forms.
//!
//! Everything here works on discretized action sets and literal
//! definitions: grid best responses, incentive and disincentive by grid
//! search, the forecast as a full sum over subsets of the other players,
//! and equilibrium checks inside the induced game.

mod scans;

use serde::{Deserialize, Serialize};

use crate::coopeq::{forecast, CoalitionStructure, ForecastReport, Prediction};
use crate::error::{Error, Result};
use crate::games::{GameSpec, SymmetricAction};

pub use scans::{
    bertrand_scan, binomial_identity_scan, dominance_scan, equivalence_scan, proposition_scan,
    run_suite, pgg_monotone_scan, npd_monotone_scan, CheckRecord, Fault, Proposition, Suite,
    VerificationReport, Verdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSearchConfig {
    /// Points of the fine action grid, endpoints included.
    pub grid_points: usize,
    pub tolerance: f64,
    /// Largest `n` for which subsets of players are enumerated.
    pub max_players_exhaustive: usize,
    /// Points of the coarse lattice the other players range over in the
    /// disincentive and worst-case searches.
    pub search_points: usize,
    /// Smallest price step in Bertrand games.
    pub price_tick: f64,
}

impl Default for GridSearchConfig {
    fn default() -> Self {
        GridSearchConfig {
            grid_points: 1001,
            tolerance: 1e-6,
            max_players_exhaustive: 12,
            search_points: 6,
            price_tick: 1.0,
        }
    }
}

impl GridSearchConfig {
    pub fn validate(self) -> Result<Self> {
        if self.grid_points < 2 || self.search_points < 2 {
            return Err(Error::out_of_range("grids need at least two points"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::out_of_range(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if !(self.price_tick > 0.0) {
            return Err(Error::out_of_range(format!(
                "price tick must be positive, got {}",
                self.price_tick
            )));
        }
        Ok(self)
    }

    /// The same configuration with a ten times finer action grid.
    pub fn refined(self) -> Self {
        GridSearchConfig {
            grid_points: (self.grid_points - 1) * 10 + 1,
            ..self
        }
    }
}

/// `points` evenly spaced actions covering the action interval.
pub fn action_grid(spec: &GameSpec, points: usize) -> Vec<f64> {
    let (low, high) = spec.action_bounds();
    let last = points.max(2) - 1;
    (0..=last)
        .map(|k| {
            if k == last {
                high
            } else {
                low + (high - low) * k as f64 / last as f64
            }
        })
        .collect()
}

/// Bertrand prices `high, high - tick, ...` down to the floor, ascending.
fn price_lattice(low: f64, high: f64, tick: f64) -> Vec<f64> {
    let mut prices = vec![low];
    let mut k = 0u32;
    loop {
        let p = high - tick * k as f64;
        if p <= low + 1e-12 {
            break;
        }
        prices.push(p);
        k += 1;
    }
    prices.sort_by(f64::total_cmp);
    prices
}

/// Actions a deviating player chooses among when computing the incentive.
fn deviation_actions(spec: &GameSpec, cfg: &GridSearchConfig) -> Vec<f64> {
    match *spec {
        GameSpec::Bertrand { low, high, .. } => price_lattice(low, high, cfg.price_tick),
        _ => action_grid(spec, cfg.grid_points),
    }
}

fn coarse_actions(spec: &GameSpec, cfg: &GridSearchConfig) -> Vec<f64> {
    match *spec {
        GameSpec::Bertrand { low, high, .. } => {
            let lattice = price_lattice(low, high, cfg.price_tick);
            let last = lattice.len() - 1;
            let picks = cfg.search_points.min(lattice.len()).max(2) - 1;
            let mut out: Vec<f64> = (0..=picks).map(|k| lattice[k * last / picks]).collect();
            out.dedup();
            out
        }
        _ => action_grid(spec, cfg.search_points),
    }
}

fn push_unique(actions: &mut Vec<f64>, a: f64) {
    if !actions.contains(&a) {
        actions.push(a);
    }
}

/// Payoff of a player choosing `own` when every other player chooses `others`.
fn symmetric_others(spec: &GameSpec, own: f64, others: f64) -> Result<f64> {
    spec.payoff(own, &vec![others; spec.n() - 1])
}

/// Grid best response to a common action of all other players. Ties go to
/// the lowest action.
pub fn best_response(
    spec: &GameSpec,
    others: SymmetricAction,
    cfg: &GridSearchConfig,
) -> Result<f64> {
    let spec = spec.validate()?;
    let cfg = cfg.validate()?;
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for a in action_grid(&spec, cfg.grid_points) {
        let u = symmetric_others(&spec, a, others.value())?;
        if u > best.0 {
            best = (u, a);
        }
    }
    Ok(best.1)
}

/// Smallest grid action that is a symmetric Nash equilibrium on the grid.
fn grid_nash(spec: &GameSpec, actions: &[f64]) -> Result<f64> {
    for &a in actions {
        let stay = symmetric_others(spec, a, a)?;
        let mut stable = true;
        for &d in actions {
            if symmetric_others(spec, d, a)? > stay + 1e-12 * stay.abs().max(1.0) {
                stable = false;
                break;
            }
        }
        if stable {
            return Ok(a);
        }
    }
    Err(Error::Unsupported("no symmetric grid equilibrium".into()))
}

/// Symmetric action maximizing the common payoff on the grid.
fn grid_welfare(spec: &GameSpec, actions: &[f64]) -> Result<f64> {
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for &a in actions {
        let u = symmetric_others(spec, a, a)?;
        if u > best.0 {
            best = (u, a);
        }
    }
    Ok(best.1)
}

/// Calls `visit` on every multiset of `size` elements drawn from `actions`.
fn for_each_multiset(
    actions: &[f64],
    size: usize,
    visit: &mut dyn FnMut(&[f64]) -> Result<()>,
) -> Result<()> {
    fn rec(
        actions: &[f64],
        start: usize,
        buf: &mut Vec<f64>,
        size: usize,
        visit: &mut dyn FnMut(&[f64]) -> Result<()>,
    ) -> Result<()> {
        if buf.len() == size {
            return visit(buf);
        }
        for i in start..actions.len() {
            buf.push(actions[i]);
            rec(actions, i, buf, size, visit)?;
            buf.pop();
        }
        Ok(())
    }
    rec(actions, 0, &mut Vec::with_capacity(size), size, visit)
}

/// Lowest payoff of a player choosing `own` over all profiles of the
/// others (drawn from `free`) in which at least one other plays an action
/// from `eligible`.
fn worst_case(spec: &GameSpec, own: f64, free: &[f64], eligible: &[f64]) -> Result<f64> {
    let mut lowest = f64::INFINITY;
    let mut others = Vec::with_capacity(spec.n() - 1);
    for &e in eligible {
        for_each_multiset(free, spec.n() - 2, &mut |rest| {
            others.clear();
            others.push(e);
            others.extend_from_slice(rest);
            lowest = lowest.min(spec.payoff(own, &others)?);
            Ok(())
        })?;
    }
    Ok(lowest)
}

/// Actions among `candidates` that weakly improve player 0's payoff against
/// `profile[1..]`.
fn improving(spec: &GameSpec, profile: &[f64], candidates: &[f64]) -> Result<Vec<f64>> {
    let current = spec.payoff(profile[0], &profile[1..])?;
    let eps = 1e-12 * current.abs().max(1.0);
    let mut out = Vec::new();
    for &a in candidates {
        if spec.payoff(a, &profile[1..])? >= current - eps {
            out.push(a);
        }
    }
    Ok(out)
}

/// Forecast of a coalition structure evaluated from the definitions.
///
/// The incentive is a grid maximum over own deviations from the reference
/// profile. The disincentive and the deviation payoffs are grid minima over
/// profiles of the other players in which at least one of them deviates.
/// The forecast sums over all `2^(n-1)` subsets of the other players.
pub fn generic_forecast(
    spec: &GameSpec,
    structure: CoalitionStructure,
    cfg: &GridSearchConfig,
) -> Result<ForecastReport> {
    let spec = spec.validate()?;
    let cfg = cfg.validate()?;
    let n = spec.n();
    if n > cfg.max_players_exhaustive {
        return Err(Error::TooManyPlayers {
            n,
            cap: cfg.max_players_exhaustive,
        });
    }
    let actions = deviation_actions(&spec, &cfg);
    let reference = match structure {
        CoalitionStructure::Selfish => grid_nash(&spec, &actions)?,
        CoalitionStructure::FullyCooperative => grid_welfare(&spec, &actions)?,
    };
    let e_nobody = symmetric_others(&spec, reference, reference)?;

    let mut gains = Vec::with_capacity(actions.len());
    for &a in &actions {
        gains.push(symmetric_others(&spec, a, reference)? - e_nobody);
    }
    let incentive = gains.iter().copied().fold(0.0, f64::max);
    let best_deviations: Vec<f64> = actions
        .iter()
        .zip(&gains)
        .filter(|&(_, &g)| g >= incentive - 1e-12 * incentive.abs().max(1.0))
        .map(|(&a, _)| a)
        .collect();

    let mut free = coarse_actions(&spec, &cfg);
    push_unique(&mut free, best_deviations[0]);
    push_unique(&mut free, best_deviations[best_deviations.len() - 1]);
    push_unique(&mut free, reference);
    let base = vec![reference; n];
    let from_reference = improving(&spec, &base, &free)?;

    let mut disincentive: f64 = 0.0;
    for &own in &best_deviations {
        // Deviations of another player from the reference profile, or from
        // the profile in which only the focal player has left it.
        let mut eligible = from_reference.clone();
        let mut shifted = base.clone();
        shifted[1] = own;
        for a in improving(&spec, &shifted, &free)? {
            push_unique(&mut eligible, a);
        }
        let worst = worst_case(&spec, own, &free, &eligible)?;
        disincentive = disincentive.max(e_nobody - worst);
    }
    let e_deviation = worst_case(&spec, reference, &free, &from_reference)?;

    let total = incentive + disincentive;
    let tau = if total > 0.0 { incentive / total } else { 0.0 };
    let m = n - 1;
    let tau_nobody = inclusion_exclusion_nobody(tau, m);
    let mut v = 0.0;
    for mask in 0u64..(1u64 << m) {
        let k = mask.count_ones() as i32;
        v += if k == 0 {
            e_nobody * tau_nobody
        } else {
            e_deviation * tau.powi(k) * (1.0 - tau).powi(m as i32 - k)
        };
    }
    Ok(ForecastReport {
        structure,
        reference_action: reference,
        incentive,
        disincentive,
        tau_pair: tau,
        tau_nobody,
        e_nobody,
        e_deviation,
        forecast: v,
    })
}

/// `sum_k (-1)^k C(m, k) tau^k`, the probability that none of `m` players leaves.
fn inclusion_exclusion_nobody(tau: f64, m: usize) -> f64 {
    let mut binom = 1.0;
    let mut sum = 0.0;
    for k in 0..=m {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * tau.powi(k as i32);
        binom = binom * (m - k) as f64 / (k + 1) as f64;
    }
    sum
}

/// Largest forecast over both structures: from the subset enumeration when
/// `n` is small enough, from the two-event collapse otherwise.
pub fn oracle_forecast(spec: &GameSpec, cfg: &GridSearchConfig) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for s in CoalitionStructure::ALL {
        let v = if spec.n() <= cfg.max_players_exhaustive {
            generic_forecast(spec, s, cfg)?.forecast
        } else {
            forecast(spec, s)?.forecast
        };
        best = best.max(v);
    }
    Ok(best)
}

/// Outcome of [`verify_equilibrium`]. Residuals are non-negative; zero is ideal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCheck {
    pub passed: bool,
    pub forecast: f64,
    /// Shortfall of the predicted payoff below the forecast.
    pub payoff_shortfall: f64,
    /// Distance from the prediction to the least admissible grid action.
    pub action_gap: f64,
    /// Largest gain from a unilateral deviation that keeps every payoff
    /// at or above the forecast.
    pub deviation_gain: f64,
    pub grid_points: usize,
    pub retried: bool,
}

/// Checks a prediction against the induced game on a grid, retrying once at
/// ten times the density before reporting failure.
pub fn verify_equilibrium(
    spec: &GameSpec,
    prediction: &Prediction,
    cfg: &GridSearchConfig,
) -> Result<EquilibriumCheck> {
    let spec = spec.validate()?;
    let cfg = cfg.validate()?;
    let v = oracle_forecast(&spec, &cfg)?;
    let first = check_on_grid(&spec, prediction.equilibrium.value(), v, &cfg)?;
    if first.passed {
        return Ok(first);
    }
    let mut second = check_on_grid(&spec, prediction.equilibrium.value(), v, &cfg.refined())?;
    second.retried = true;
    Ok(second)
}

fn check_on_grid(
    spec: &GameSpec,
    predicted: f64,
    v: f64,
    cfg: &GridSearchConfig,
) -> Result<EquilibriumCheck> {
    let n = spec.n();
    let tol = cfg.tolerance;
    let grid = action_grid(spec, cfg.grid_points);
    let (low, high) = spec.action_bounds();
    let step = (high - low) / (cfg.grid_points - 1) as f64;

    let own = symmetric_others(spec, predicted, predicted)?;
    let payoff_shortfall = (v - own).max(0.0);

    let mut least = None;
    for &a in &grid {
        if symmetric_others(spec, a, a)? >= v - tol {
            least = Some(a);
            break;
        }
    }
    let action_gap = match least {
        Some(a) => (predicted - a).abs(),
        None => f64::INFINITY,
    };

    let floor = v - 1e-9 * v.abs().max(1.0);
    let mut profile = vec![predicted; n];
    let mut deviation_gain: f64 = 0.0;
    for &a in &grid {
        profile[0] = a;
        let payoffs = spec.payoffs(&profile)?;
        if payoffs.iter().all(|&u| u >= floor) {
            deviation_gain = deviation_gain.max(payoffs[0] - own);
        }
    }

    Ok(EquilibriumCheck {
        passed: payoff_shortfall <= tol && action_gap <= step + 1e-12 && deviation_gain <= tol,
        forecast: v,
        payoff_shortfall,
        action_gap,
        deviation_gain,
        grid_points: cfg.grid_points,
        retried: false,
    })
}
