//! Social-preference utilities (Fehr–Schmidt, Charness–Rabin) and the
//! parameter thresholds at which a player stops defecting from full
//! cooperation.

mod comparison;
mod population;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::GameSpec;

pub use comparison::{
    classify_effect, model_comparison, ComparisonSweeps, Effect, FreeParameters, ModelKind,
    ModelRow, NpdSweep, PggSweep,
};
pub use population::{
    analytic_mu, monte_carlo_mu, mu_fraction, FsBeta, MuEstimate, PopulationSpec, Sampler,
    Uniform,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PreferenceModel {
    #[serde(rename = "fs")]
    FehrSchmidt,
    #[serde(rename = "cr1")]
    CharnessRabin,
    #[serde(rename = "cr2")]
    CharnessRabin2,
}

impl fmt::Display for PreferenceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PreferenceModel::FehrSchmidt => "FS",
            PreferenceModel::CharnessRabin => "CR1",
            PreferenceModel::CharnessRabin2 => "CR2",
        })
    }
}

/// Per-agent social-preference parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model")]
pub enum PreferenceParams {
    /// `alpha` weighs disadvantageous inequity, `beta` advantageous inequity.
    #[serde(rename = "fs")]
    FehrSchmidt { alpha: f64, beta: f64 },
    /// `alpha` is the weight on own payoff, `1 - alpha` on total welfare.
    #[serde(rename = "cr1")]
    CharnessRabin { alpha: f64 },
    /// `alpha` is the weight on the social term, `delta` splits it between
    /// the minimum payoff and total welfare.
    #[serde(rename = "cr2")]
    CharnessRabin2 { alpha: f64, delta: f64 },
}

impl PreferenceParams {
    pub fn model(&self) -> PreferenceModel {
        match self {
            PreferenceParams::FehrSchmidt { .. } => PreferenceModel::FehrSchmidt,
            PreferenceParams::CharnessRabin { .. } => PreferenceModel::CharnessRabin,
            PreferenceParams::CharnessRabin2 { .. } => PreferenceModel::CharnessRabin2,
        }
    }

    pub fn validate(self) -> Result<Self> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::out_of_range(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        match self {
            PreferenceParams::FehrSchmidt { alpha, beta } => {
                if !(beta >= 0.0 && beta <= alpha) || !alpha.is_finite() {
                    return Err(Error::out_of_range(format!(
                        "Fehr-Schmidt needs 0 <= beta <= alpha, got alpha={alpha}, beta={beta}"
                    )));
                }
            }
            PreferenceParams::CharnessRabin { alpha } => unit("alpha", alpha)?,
            PreferenceParams::CharnessRabin2 { alpha, delta } => {
                unit("alpha", alpha)?;
                unit("delta", delta)?;
            }
        }
        Ok(self)
    }
}

fn check_focal(payoffs: &[f64], focal: usize) -> Result<()> {
    if payoffs.is_empty() {
        return Err(Error::Empty("payoff vector"));
    }
    if payoffs.len() < 2 {
        return Err(Error::out_of_range("utility needs at least two players"));
    }
    if focal >= payoffs.len() {
        return Err(Error::FocalOutOfRange {
            focal,
            len: payoffs.len(),
        });
    }
    Ok(())
}

/// Fehr–Schmidt inequity-averse utility of `focal`.
pub fn fs_utility(alpha: f64, beta: f64, payoffs: &[f64], focal: usize) -> Result<f64> {
    check_focal(payoffs, focal)?;
    let own = payoffs[focal];
    let (mut envy, mut guilt) = (0.0, 0.0);
    for (j, &u) in payoffs.iter().enumerate() {
        if j != focal {
            envy += (u - own).max(0.0);
            guilt += (own - u).max(0.0);
        }
    }
    let others = (payoffs.len() - 1) as f64;
    Ok(own - alpha / others * envy - beta / others * guilt)
}

/// Which players the one-parameter Charness–Rabin welfare term sums over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WelfareSum {
    /// All players, the focal one included.
    #[default]
    IncludingSelf,
    OthersOnly,
}

/// Charness–Rabin utility. CR1 uses `alpha u_i + (1 - alpha) sum_j u_j`;
/// CR2 uses `(1 - alpha) u_i + alpha (delta min_j u_j + (1 - delta) sum_j u_j)`.
pub fn cr_utility(params: &PreferenceParams, payoffs: &[f64], focal: usize) -> Result<f64> {
    match *params {
        PreferenceParams::CharnessRabin { alpha } => {
            cr1_utility_with(alpha, payoffs, focal, WelfareSum::IncludingSelf)
        }
        PreferenceParams::CharnessRabin2 { alpha, delta } => {
            check_focal(payoffs, focal)?;
            let total: f64 = payoffs.iter().sum();
            let lowest = payoffs.iter().copied().fold(f64::INFINITY, f64::min);
            Ok((1.0 - alpha) * payoffs[focal] + alpha * (delta * lowest + (1.0 - delta) * total))
        }
        PreferenceParams::FehrSchmidt { .. } => Err(Error::Unsupported(
            "cr_utility needs Charness-Rabin parameters".into(),
        )),
    }
}

pub fn cr1_utility_with(
    alpha: f64,
    payoffs: &[f64],
    focal: usize,
    welfare: WelfareSum,
) -> Result<f64> {
    check_focal(payoffs, focal)?;
    let mut total: f64 = payoffs.iter().sum();
    if welfare == WelfareSum::OthersOnly {
        total -= payoffs[focal];
    }
    Ok(alpha * payoffs[focal] + (1.0 - alpha) * total)
}

/// Utility under any of the three models.
pub fn utility(params: &PreferenceParams, payoffs: &[f64], focal: usize) -> Result<f64> {
    match *params {
        PreferenceParams::FehrSchmidt { alpha, beta } => fs_utility(alpha, beta, payoffs, focal),
        _ => cr_utility(params, payoffs, focal),
    }
}

/// Reference profile a unilateral defection from full cooperation is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Compare against everyone cooperating.
    #[default]
    VersusCooperation,
    /// Compare against everyone defecting.
    VersusAllDefect,
}

/// Monetary payoff vectors of the profiles the cooperation predicates
/// compare. Player 0 is the deviator.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationProfiles {
    pub cooperation: Vec<f64>,
    pub unilateral_defection: Vec<f64>,
    pub all_defect: Vec<f64>,
}

pub fn deviation_profiles(spec: &GameSpec) -> Result<DeviationProfiles> {
    let spec = spec.validate()?;
    if matches!(spec, GameSpec::Bertrand { .. }) {
        return Err(Error::Unsupported(
            "cooperation predicates are defined for the PGG and NPD".into(),
        ));
    }
    let n = spec.n();
    let coop = spec.welfare_action();
    let defect = spec.nash_action();
    let mut deviation = vec![coop; n];
    deviation[0] = defect;
    Ok(DeviationProfiles {
        cooperation: spec.payoffs(&vec![coop; n])?,
        unilateral_defection: spec.payoffs(&deviation)?,
        all_defect: spec.payoffs(&vec![defect; n])?,
    })
}

/// `a <= b` up to a relative rounding allowance; ties count as cooperative.
pub(crate) fn weakly_at_most(a: f64, b: f64) -> bool {
    a <= b + 1e-12 * a.abs().max(b.abs()).max(1.0)
}

impl DeviationProfiles {
    /// Direct utility comparison: does the deviator weakly prefer the reference profile?
    pub fn prefers_cooperation(
        &self,
        params: &PreferenceParams,
        comparison: Comparison,
    ) -> Result<bool> {
        let reference = match comparison {
            Comparison::VersusCooperation => &self.cooperation,
            Comparison::VersusAllDefect => &self.all_defect,
        };
        let deviate = utility(params, &self.unilateral_defection, 0)?;
        let stay = utility(params, reference, 0)?;
        Ok(weakly_at_most(deviate, stay))
    }
}

/// Convenience wrapper around [`DeviationProfiles::prefers_cooperation`].
pub fn prefers_cooperation(
    params: &PreferenceParams,
    spec: &GameSpec,
    comparison: Comparison,
) -> Result<bool> {
    deviation_profiles(spec)?.prefers_cooperation(params, comparison)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtLeast,
    AtMost,
}

/// Closed-form cooperation condition on a single model parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub model: PreferenceModel,
    pub parameter: &'static str,
    pub bound: Bound,
    pub value: f64,
}

impl Threshold {
    pub fn admits_value(&self, x: f64) -> bool {
        match self.bound {
            Bound::AtLeast => weakly_at_most(self.value, x),
            Bound::AtMost => weakly_at_most(x, self.value),
        }
    }

    pub fn admits(&self, params: &PreferenceParams) -> Result<bool> {
        let x = match (*params, self.model) {
            (PreferenceParams::FehrSchmidt { beta, .. }, PreferenceModel::FehrSchmidt) => beta,
            (PreferenceParams::CharnessRabin { alpha }, PreferenceModel::CharnessRabin) => alpha,
            _ => {
                return Err(Error::Unsupported(format!(
                    "threshold for {} applied to {} parameters",
                    self.model,
                    params.model()
                )))
            }
        };
        Ok(self.admits_value(x))
    }
}

enum Dilemma {
    Npd { n: f64, b: f64, c: f64 },
    Pgg { n: f64, gamma: f64 },
}

fn dilemma(spec: &GameSpec) -> Result<Dilemma> {
    let spec = spec.validate()?;
    let n = spec.n() as f64;
    match spec {
        GameSpec::Npd { b, c, .. } => Ok(Dilemma::Npd { n, b, c }),
        GameSpec::Pgg { gamma, .. } => Ok(Dilemma::Pgg { n, gamma }),
        GameSpec::GeneralPgg { .. } => Ok(Dilemma::Pgg {
            n,
            gamma: spec.marginal_return().expect("public goods variant"),
        }),
        GameSpec::Bertrand { .. } => Err(Error::Unsupported(
            "cooperation thresholds are defined for the PGG and NPD".into(),
        )),
    }
}

/// Parameter bound under which unilateral defection from full cooperation
/// does not raise utility. Two-parameter CR has no single threshold; use
/// [`cr2_margin`] for it.
pub fn cooperation_threshold(model: PreferenceModel, spec: &GameSpec) -> Result<Threshold> {
    cooperation_threshold_with(model, spec, WelfareSum::IncludingSelf)
}

pub fn cooperation_threshold_with(
    model: PreferenceModel,
    spec: &GameSpec,
    welfare: WelfareSum,
) -> Result<Threshold> {
    let game = dilemma(spec)?;
    let (parameter, bound, value) = match (model, game) {
        (PreferenceModel::FehrSchmidt, Dilemma::Npd { n, b, c }) => {
            ("beta", Bound::AtLeast, c * (n - 1.0) / (b + c * (n - 1.0)))
        }
        (PreferenceModel::FehrSchmidt, Dilemma::Pgg { gamma, .. }) => {
            ("beta", Bound::AtLeast, 1.0 - gamma)
        }
        (PreferenceModel::CharnessRabin, Dilemma::Npd { b, c, .. }) => {
            let value = match welfare {
                WelfareSum::IncludingSelf => 1.0 - c / b,
                WelfareSum::OthersOnly => b / (b + c),
            };
            ("alpha", Bound::AtMost, value)
        }
        (PreferenceModel::CharnessRabin, Dilemma::Pgg { n, gamma }) => {
            let value = match welfare {
                WelfareSum::IncludingSelf => (gamma * n - 1.0) / (gamma * (n - 1.0)),
                WelfareSum::OthersOnly => gamma * (n - 1.0) / (gamma * (n - 2.0) + 1.0),
            };
            ("alpha", Bound::AtMost, value)
        }
        (PreferenceModel::CharnessRabin2, _) => {
            return Err(Error::Unsupported(
                "two-parameter Charness-Rabin has no single-parameter threshold".into(),
            ))
        }
    };
    Ok(Threshold {
        model,
        parameter,
        bound,
        value,
    })
}

/// Coefficients `(a, b)` with `U(cooperate) - U(defect) = a + b * delta`
/// for two-parameter Charness–Rabin at weight `alpha`.
pub fn cr2_margin_coefficients(alpha: f64, spec: &GameSpec) -> Result<(f64, f64)> {
    Ok(match dilemma(spec)? {
        Dilemma::Npd { n, b, c } => (
            -(1.0 - alpha) * c + alpha * (b - c),
            alpha * b / (n - 1.0) - alpha * (b - c),
        ),
        Dilemma::Pgg { n, gamma } => (
            (1.0 - alpha) * (gamma - 1.0) + alpha * (gamma * n - 1.0),
            alpha * gamma - alpha * (gamma * n - 1.0),
        ),
    })
}

/// Closed-form utility gain of staying cooperative over defecting alone, CR2.
pub fn cr2_margin(alpha: f64, delta: f64, spec: &GameSpec) -> Result<f64> {
    let (a, b) = cr2_margin_coefficients(alpha, spec)?;
    Ok(a + b * delta)
}

/// Closed-form cooperation predicate (unilateral defection vs full cooperation).
pub fn closed_form_cooperates(params: &PreferenceParams, spec: &GameSpec) -> Result<bool> {
    match *params {
        PreferenceParams::CharnessRabin2 { alpha, delta } => {
            Ok(cr2_margin(alpha, delta, spec)? >= -1e-12)
        }
        _ => cooperation_threshold(params.model(), spec)?.admits(params),
    }
}
