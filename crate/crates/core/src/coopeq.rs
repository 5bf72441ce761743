//! Cooperative equilibrium for highly symmetric dilemmas.
//!
//! Only the selfish and the fully cooperative coalition structures are
//! considered. For both, the forecast collapses to two events: nobody
//! abandons the structure, or at least one other player does, since the
//! worst-case payoff is the same for every non-empty set of deserters.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{GameSpec, Param, SymmetricAction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoalitionStructure {
    Selfish,
    FullyCooperative,
}

impl CoalitionStructure {
    pub const ALL: [CoalitionStructure; 2] = [
        CoalitionStructure::Selfish,
        CoalitionStructure::FullyCooperative,
    ];
}

impl fmt::Display for CoalitionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoalitionStructure::Selfish => "selfish",
            CoalitionStructure::FullyCooperative => "fully_cooperative",
        })
    }
}

/// Forecast quantities for one coalition structure, in normalized units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecastReport {
    pub structure: CoalitionStructure,
    /// Symmetric action every player takes under the structure.
    pub reference_action: f64,
    pub incentive: f64,
    pub disincentive: f64,
    /// Believed probability that one given other player abandons the structure.
    pub tau_pair: f64,
    /// Believed probability that nobody abandons it.
    pub tau_nobody: f64,
    pub e_nobody: f64,
    pub e_deviation: f64,
    pub forecast: f64,
}

impl ForecastReport {
    /// Assembles a report from incentive, disincentive and the two event
    /// payoffs, using `tau_nobody = (1 - tau)^(n-1)`.
    pub fn from_parts(
        structure: CoalitionStructure,
        reference_action: f64,
        incentive: f64,
        disincentive: f64,
        e_nobody: f64,
        e_deviation: f64,
        n: usize,
    ) -> Self {
        let total = incentive + disincentive;
        let tau_pair = if total > 0.0 { incentive / total } else { 0.0 };
        let tau_nobody = ((n - 1) as f64 * (-tau_pair).ln_1p()).exp();
        let forecast = e_nobody * tau_nobody + e_deviation * (1.0 - tau_nobody);
        ForecastReport {
            structure,
            reference_action,
            incentive,
            disincentive,
            tau_pair,
            tau_nobody,
            e_nobody,
            e_deviation,
            forecast,
        }
    }
}

/// Forecast of a coalition structure from the per-game closed-form
/// incentive, disincentive and event payoffs.
pub fn forecast(spec: &GameSpec, structure: CoalitionStructure) -> Result<ForecastReport> {
    let spec = spec.validate()?;
    let n = spec.n();
    let nf = n as f64;
    let report = match structure {
        CoalitionStructure::Selfish => {
            let nash = spec.nash_action();
            let payoff = spec.expected_symmetric_payoff(SymmetricAction::new_unchecked(nash));
            ForecastReport::from_parts(structure, nash, 0.0, 0.0, payoff, payoff, n)
        }
        CoalitionStructure::FullyCooperative => match spec {
            GameSpec::Pgg { .. } | GameSpec::GeneralPgg { .. } => {
                let gamma = spec.marginal_return().expect("public goods variant");
                ForecastReport::from_parts(
                    structure,
                    1.0,
                    1.0 - gamma,
                    gamma * nf - 1.0,
                    gamma * nf,
                    gamma,
                    n,
                )
            }
            GameSpec::Npd { b, c, .. } => {
                ForecastReport::from_parts(structure, 1.0, c, b - c, b - c, -c, n)
            }
            GameSpec::Bertrand { high, .. } => {
                // One price unit below the reservation value takes the whole
                // market; being undercut in turn leaves nothing.
                let share = high / nf;
                let incentive = (high - 1.0 - share).max(0.0);
                ForecastReport::from_parts(structure, high, incentive, share, share, 0.0, n)
            }
        },
    };
    Ok(report)
}

/// Forecast of the fully cooperative structure in the PGG, evaluated directly.
pub fn v_pgg(gamma: f64, n: usize) -> Result<f64> {
    GameSpec::pgg(n, gamma).validate()?;
    let nf = n as f64;
    let r = pgg_stay_probability(gamma, nf);
    Ok(gamma * nf * r + gamma * (1.0 - r))
}

/// `((gamma n - 1) / (gamma (n - 1)))^(n - 1)`, computed in log space.
fn pgg_stay_probability(gamma: f64, n: f64) -> f64 {
    let tau = (1.0 - gamma) / (gamma * (n - 1.0));
    ((n - 1.0) * (-tau).ln_1p()).exp()
}

/// Forecast of the fully cooperative structure in the NPD, evaluated directly.
pub fn v_npd(b: f64, c: f64, n: usize) -> Result<f64> {
    GameSpec::npd(n, b, c).validate()?;
    let r = ((n - 1) as f64 * (-c / b).ln_1p()).exp();
    Ok((b - c) * r - c * (1.0 - r))
}

/// `max(L, H (H / ((H - 1) N))^(N - 1))`.
pub fn bertrand_closed_form(n: usize, low: f64, high: f64) -> Result<f64> {
    GameSpec::bertrand(n, low, high).validate()?;
    let nf = n as f64;
    let ratio = high / ((high - 1.0) * nf);
    Ok(low.max(high * ((nf - 1.0) * ratio.ln()).exp()))
}

/// The cooperative equilibrium of a game with both forecasts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub game: GameSpec,
    pub winning_structure: CoalitionStructure,
    pub equilibrium: SymmetricAction,
    pub equilibrium_payoff: f64,
    pub selfish: ForecastReport,
    pub cooperative: ForecastReport,
}

impl Prediction {
    pub fn report(&self, structure: CoalitionStructure) -> &ForecastReport {
        match structure {
            CoalitionStructure::Selfish => &self.selfish,
            CoalitionStructure::FullyCooperative => &self.cooperative,
        }
    }

    pub fn best_forecast(&self) -> f64 {
        self.report(self.winning_structure).forecast
    }
}

/// Computes the cooperative equilibrium.
///
/// The structure with the larger forecast wins (ties go to full
/// cooperation). Under the selfish structure the equilibrium is the Nash
/// profile; otherwise it is the least cooperative symmetric action whose
/// payoff reaches the forecast.
pub fn solve(spec: &GameSpec) -> Result<Prediction> {
    let spec = spec.validate()?;
    let selfish = forecast(&spec, CoalitionStructure::Selfish)?;
    let cooperative = forecast(&spec, CoalitionStructure::FullyCooperative)?;
    let winning_structure = if cooperative.forecast >= selfish.forecast {
        CoalitionStructure::FullyCooperative
    } else {
        CoalitionStructure::Selfish
    };
    let (low, high) = spec.action_bounds();
    let value = match winning_structure {
        CoalitionStructure::Selfish => spec.nash_action(),
        CoalitionStructure::FullyCooperative => {
            let v = cooperative.forecast;
            let raw = match spec {
                GameSpec::Pgg { .. } | GameSpec::GeneralPgg { .. } => {
                    let gamma = spec.marginal_return().expect("public goods variant");
                    (v - 1.0) / (gamma * spec.n() as f64 - 1.0)
                }
                GameSpec::Npd { b, c, .. } => v / (b - c),
                GameSpec::Bertrand { .. } => v * spec.n() as f64,
            };
            raw.clamp(low, high)
        }
    };
    let equilibrium = SymmetricAction::new(&spec, value)?;
    Ok(Prediction {
        game: spec,
        winning_structure,
        equilibrium,
        equilibrium_payoff: spec.expected_symmetric_payoff(equilibrium),
        selfish,
        cooperative,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub prediction: Prediction,
}

/// Solves the template with `vary` set to each of `values`, in order.
pub fn sweep(template: &GameSpec, vary: Param, values: &[f64]) -> Result<Vec<SweepPoint>> {
    let specs = values
        .iter()
        .map(|&value| {
            template
                .with_param(vary, value)
                .and_then(GameSpec::validate)
                .map(|spec| (value, spec))
                .map_err(|e| Error::SweepPoint {
                    value,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    solve_points(specs)
}

fn solve_points(specs: Vec<(f64, GameSpec)>) -> Result<Vec<SweepPoint>> {
    specs
        .into_par_iter()
        .map(|(value, spec)| {
            solve(&spec)
                .map(|prediction| SweepPoint { value, prediction })
                .map_err(|e| Error::SweepPoint {
                    value,
                    source: Box::new(e),
                })
        })
        .collect()
}

/// How the benefit `b_N` of a generalized public goods game depends on `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BenefitSchedule {
    /// `b_N = slope * N`, the standard PGG with `gamma = slope`.
    Linear { slope: f64 },
    /// `b_N = value`.
    Constant { value: f64 },
    /// `b_N = min(slope * N, cap)`: benefit saturates at `cap`.
    Capped { slope: f64, cap: f64 },
}

impl BenefitSchedule {
    pub fn benefit(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            BenefitSchedule::Linear { slope } => slope * nf,
            BenefitSchedule::Constant { value } => value,
            BenefitSchedule::Capped { slope, cap } => (slope * nf).min(cap),
        }
    }

    pub fn game(&self, n: usize) -> GameSpec {
        GameSpec::general_pgg(n, self.benefit(n))
    }
}

/// Sweeps group size for a generalized PGG whose benefit follows `schedule`.
pub fn sweep_schedule(schedule: &BenefitSchedule, ns: &[usize]) -> Result<Vec<SweepPoint>> {
    let specs = ns
        .iter()
        .map(|&n| {
            schedule
                .game(n)
                .validate()
                .map(|spec| (n as f64, spec))
                .map_err(|e| Error::SweepPoint {
                    value: n as f64,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    solve_points(specs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pgg_forecast_example() {
        let r = forecast(&GameSpec::pgg(4, 0.5), CoalitionStructure::FullyCooperative).unwrap();
        assert_abs_diff_eq!(r.incentive, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.disincentive, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.tau_pair, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.e_nobody, 2.0);
        assert_abs_diff_eq!(r.e_deviation, 0.5);
        let stay: f64 = 8.0 / 27.0;
        assert_abs_diff_eq!(r.tau_nobody, stay, epsilon = 1e-15);
        assert_abs_diff_eq!(r.forecast, 2.0 * stay + 0.5 * (1.0 - stay), epsilon = 1e-12);
        assert_abs_diff_eq!(r.forecast, 0.944_444_444_444, epsilon = 1e-9);
    }

    #[test]
    fn npd_forecast_example() {
        let r = forecast(&GameSpec::npd(2, 0.3, 0.1), CoalitionStructure::FullyCooperative).unwrap();
        assert_abs_diff_eq!(r.incentive, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(r.disincentive, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(r.tau_pair, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.forecast, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn selfish_forecast_is_nash_payoff() {
        let cases = [
            (GameSpec::pgg(4, 0.5), 1.0),
            (GameSpec::npd(5, 0.3, 0.1), 0.0),
            (GameSpec::bertrand(4, 2.0, 10.0), 0.5),
            (GameSpec::general_pgg(6, 3.0), 1.0),
        ];
        for (spec, nash) in cases {
            let r = forecast(&spec, CoalitionStructure::Selfish).unwrap();
            assert_eq!(r.incentive, 0.0);
            assert_eq!(r.tau_pair, 0.0);
            assert_eq!(r.tau_nobody, 1.0);
            assert_abs_diff_eq!(r.forecast, nash, epsilon = 1e-15);
        }
    }

    #[test]
    fn closed_form_values() {
        assert_abs_diff_eq!(v_pgg(0.5, 4).unwrap(), 0.944_444, epsilon = 1e-6);
        // (19/19.5)^39 by repeated multiplication.
        let mut r = 1.0;
        for _ in 0..39 {
            r *= 19.0 / 19.5;
        }
        let expected = 20.0 * r + 0.5 * (1.0 - r);
        assert_abs_diff_eq!(v_pgg(0.5, 40).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(v_pgg(0.5, 40).unwrap(), 7.5807, epsilon = 1e-4);

        let r = 1024.0 / 59049.0;
        let expected = 0.2 * r - 0.1 * (1.0 - r);
        assert_abs_diff_eq!(v_npd(0.3, 0.1, 11).unwrap(), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(v_npd(0.3, 0.1, 11).unwrap(), -0.094_80, epsilon = 1e-5);
        assert!(v_pgg(0.5, 2).is_err());
        assert!(v_npd(0.1, 0.3, 2).is_err());
    }

    #[test]
    fn forecast_matches_direct_closed_forms() {
        for n in 2..200 {
            for g in 1..10 {
                let gamma = g as f64 / 10.0;
                if gamma * n as f64 <= 1.0 {
                    continue;
                }
                let r = forecast(&GameSpec::pgg(n, gamma), CoalitionStructure::FullyCooperative)
                    .unwrap();
                assert_abs_diff_eq!(r.forecast, v_pgg(gamma, n).unwrap(), epsilon = 1e-12);
            }
            for (b, c) in [(0.3, 0.1), (1.0, 0.5), (5.0, 0.2), (2.0, 1.9)] {
                let r = forecast(&GameSpec::npd(n, b, c), CoalitionStructure::FullyCooperative)
                    .unwrap();
                assert_abs_diff_eq!(r.forecast, v_npd(b, c, n).unwrap(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn point_predictions() {
        let p = solve(&GameSpec::pgg(4, 0.5)).unwrap();
        assert_eq!(p.winning_structure, CoalitionStructure::Selfish);
        assert_eq!(p.equilibrium.value(), 0.0);

        let p = solve(&GameSpec::pgg(40, 0.5)).unwrap();
        assert_eq!(p.winning_structure, CoalitionStructure::FullyCooperative);
        assert_abs_diff_eq!(p.equilibrium.value(), 0.3464, epsilon = 5e-4);

        let p = solve(&GameSpec::npd(2, 0.3, 0.1)).unwrap();
        assert_abs_diff_eq!(p.equilibrium.value(), 0.5, epsilon = 1e-9);
        let p = solve(&GameSpec::npd(11, 0.3, 0.1)).unwrap();
        assert_eq!(p.equilibrium.value(), 0.0);

        let p = solve(&GameSpec::bertrand(2, 1.0, 10.0)).unwrap();
        assert_abs_diff_eq!(p.equilibrium.value(), 100.0 / 18.0, epsilon = 1e-12);
        let p = solve(&GameSpec::bertrand(4, 1.0, 10.0)).unwrap();
        assert_eq!(p.equilibrium.value(), 1.0);
    }

    #[test]
    fn bertrand_pipeline_reproduces_closed_form() {
        for n in 2..30 {
            for high in [2.0, 3.5, 5.0, 10.0, 100.0] {
                for low in [0.0, 0.5, 1.0] {
                    if high < n as f64 / (n as f64 - 1.0) || low >= high {
                        continue;
                    }
                    let p = solve(&GameSpec::bertrand(n, low, high)).unwrap();
                    let eq9 = bertrand_closed_form(n, low, high).unwrap();
                    assert_abs_diff_eq!(p.equilibrium.value(), eq9, epsilon = 1e-9 * high);
                }
            }
        }
    }

    #[test]
    fn bertrand_price_capped_when_no_unit_undercut_pays() {
        // H < N/(N-1): the literal closed form exceeds H.
        let n = 3;
        let high = 1.2;
        assert!(bertrand_closed_form(n, 0.0, high).unwrap() > high);
        let p = solve(&GameSpec::bertrand(n, 0.0, high)).unwrap();
        assert_eq!(p.equilibrium.value(), high);
    }

    #[test]
    fn prediction_payoff_invariants() {
        let specs = [
            GameSpec::pgg(4, 0.5),
            GameSpec::pgg(40, 0.5),
            GameSpec::pgg(1000, 0.01),
            GameSpec::npd(2, 0.3, 0.1),
            GameSpec::npd(11, 0.3, 0.1),
            GameSpec::npd(3, 5.0, 0.1),
            GameSpec::bertrand(2, 1.0, 10.0),
            GameSpec::bertrand(4, 1.0, 10.0),
            GameSpec::general_pgg(20, 10.0),
        ];
        for spec in specs {
            let p = solve(&spec).unwrap();
            let direct = spec.expected_symmetric_payoff(p.equilibrium);
            assert_abs_diff_eq!(p.equilibrium_payoff, direct, epsilon = 1e-9);
            let best = p.selfish.forecast.max(p.cooperative.forecast);
            assert!(p.equilibrium_payoff >= best - 1e-9, "{spec:?}");
        }
    }

    #[test]
    fn tied_forecasts_pick_full_cooperation() {
        // b = 2c with n = 2: v_c = c/2 - c/2 = 0, the Nash payoff.
        let p = solve(&GameSpec::npd(2, 0.5, 0.25)).unwrap();
        assert_eq!(p.cooperative.forecast, 0.0);
        assert_eq!(p.selfish.forecast, 0.0);
        assert_eq!(p.winning_structure, CoalitionStructure::FullyCooperative);
        assert_eq!(p.equilibrium.value(), 0.0);
    }

    #[test]
    fn near_degenerate_pgg_has_no_nan() {
        for n in [2usize, 3, 10, 1000] {
            let edge = 1.0 / n as f64;
            for eps in [1e-3, 1e-6, 1e-9, 1e-12, 1e-15] {
                let gamma = edge * (1.0 + eps);
                if GameSpec::pgg(n, gamma).validate().is_err() {
                    continue;
                }
                let p = solve(&GameSpec::pgg(n, gamma)).unwrap();
                assert!(p.equilibrium.value().is_finite());
                assert!(p.cooperative.forecast.is_finite());
                assert!(p.equilibrium.value() < 1e-2, "n={n} eps={eps}");
            }
        }
    }

    #[test]
    fn sweep_orders_and_aborts() {
        let values: Vec<f64> = (2..=12).map(f64::from).collect();
        let points = sweep(&GameSpec::npd(2, 0.3, 0.1), Param::N, &values).unwrap();
        assert_eq!(points.len(), 11);
        let lambdas: Vec<f64> = points.iter().map(|p| p.prediction.equilibrium.value()).collect();
        for w in lambdas.windows(2) {
            assert!(w[1] <= w[0]);
            if w[0] > 0.0 && w[1] > 0.0 {
                assert!(w[1] < w[0]);
            }
        }
        assert_eq!(*lambdas.last().unwrap(), 0.0);

        let err = sweep(&GameSpec::pgg(4, 0.5), Param::N, &[4.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::SweepPoint { value, .. } if value == 2.0));
    }

    #[test]
    fn pgg_sweep_non_decreasing() {
        let values: Vec<f64> = (3..=40).map(f64::from).collect();
        let points = sweep(&GameSpec::pgg(3, 0.5), Param::N, &values).unwrap();
        for w in points.windows(2) {
            assert!(w[1].prediction.equilibrium.value() >= w[0].prediction.equilibrium.value());
        }
    }

    #[test]
    fn capped_schedule_peaks_inside() {
        let schedule = BenefitSchedule::Capped {
            slope: 0.5,
            cap: 10.0,
        };
        let ns: Vec<usize> = (3..=80).collect();
        let points = sweep_schedule(&schedule, &ns).unwrap();
        let values: Vec<f64> = points.iter().map(|p| p.prediction.equilibrium.value()).collect();
        let (arg, _) = values
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        assert_eq!(ns[arg], 20);
        for w in values[arg..].windows(2) {
            assert!(w[1] <= w[0]);
        }
    }
}
