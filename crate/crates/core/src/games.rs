//! Highly symmetric social dilemmas and their monetary payoffs.
//!
//! Contributions in the public goods variants are fractions of the
//! endowment and payoffs are in endowment units (`y = 1`); use
//! [`GameSpec::scale`] to convert to the currency the game was stated in.
//! Prisoner's dilemma actions are cooperation probabilities, Bertrand
//! actions are prices in `[low, high]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Pgg,
    Npd,
    Bertrand,
    GeneralPgg,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Pgg => "pgg",
            Variant::Npd => "npd",
            Variant::Bertrand => "bertrand",
            Variant::GeneralPgg => "general-pgg",
        })
    }
}

/// A parameterized game. Construct freely, then call [`GameSpec::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum GameSpec {
    /// Public goods game with marginal return `gamma`.
    Pgg { n: usize, gamma: f64, endowment: f64 },
    /// N-person prisoner's dilemma: a cooperator pays `c` to give `b`
    /// split among the other `n - 1` players.
    Npd { n: usize, b: f64, c: f64 },
    /// Bertrand competition with price floor `low` and reservation value `high`.
    Bertrand { n: usize, low: f64, high: f64 },
    /// Public goods game whose pool is multiplied by `b_n / n`.
    GeneralPgg { n: usize, b_n: f64 },
}

impl GameSpec {
    pub fn pgg(n: usize, gamma: f64) -> Self {
        GameSpec::Pgg {
            n,
            gamma,
            endowment: 1.0,
        }
    }

    pub fn npd(n: usize, b: f64, c: f64) -> Self {
        GameSpec::Npd { n, b, c }
    }

    pub fn bertrand(n: usize, low: f64, high: f64) -> Self {
        GameSpec::Bertrand { n, low, high }
    }

    pub fn general_pgg(n: usize, b_n: f64) -> Self {
        GameSpec::GeneralPgg { n, b_n }
    }

    pub fn variant(&self) -> Variant {
        match self {
            GameSpec::Pgg { .. } => Variant::Pgg,
            GameSpec::Npd { .. } => Variant::Npd,
            GameSpec::Bertrand { .. } => Variant::Bertrand,
            GameSpec::GeneralPgg { .. } => Variant::GeneralPgg,
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            GameSpec::Pgg { n, .. }
            | GameSpec::Npd { n, .. }
            | GameSpec::Bertrand { n, .. }
            | GameSpec::GeneralPgg { n, .. } => n,
        }
    }

    /// Checks every parameter bound and returns the spec unchanged.
    pub fn validate(self) -> Result<Self> {
        let n = self.n();
        if n < 2 {
            return Err(Error::out_of_range(format!("n must be at least 2, got {n}")));
        }
        let nf = n as f64;
        match self {
            GameSpec::Pgg {
                gamma, endowment, ..
            } => {
                if !(gamma > 1.0 / nf) {
                    return Err(Error::out_of_range(format!(
                        "gamma must exceed 1/n = {}, got {gamma}",
                        1.0 / nf
                    )));
                }
                if !(gamma < 1.0) {
                    return Err(Error::out_of_range(format!(
                        "gamma must be below 1, got {gamma}"
                    )));
                }
                if !(endowment > 0.0) || !endowment.is_finite() {
                    return Err(Error::out_of_range(format!(
                        "endowment must be positive, got {endowment}"
                    )));
                }
            }
            GameSpec::Npd { b, c, .. } => {
                if !(c > 0.0) || !c.is_finite() {
                    return Err(Error::out_of_range(format!("c must be positive, got {c}")));
                }
                if !(b > c) || !b.is_finite() {
                    return Err(Error::out_of_range(format!(
                        "b must exceed c = {c}, got {b}"
                    )));
                }
            }
            GameSpec::Bertrand { low, high, .. } => {
                if !(low >= 0.0) || !low.is_finite() {
                    return Err(Error::out_of_range(format!(
                        "low must be non-negative, got {low}"
                    )));
                }
                if !(high > low) || !high.is_finite() {
                    return Err(Error::out_of_range(format!(
                        "high must exceed low = {low}, got {high}"
                    )));
                }
                if !(high > 1.0) {
                    return Err(Error::out_of_range(format!(
                        "high must exceed 1, got {high}"
                    )));
                }
            }
            GameSpec::GeneralPgg { b_n, .. } => {
                if !(b_n > 1.0) {
                    return Err(Error::out_of_range(format!(
                        "b_n must exceed 1, got {b_n}"
                    )));
                }
                if !(b_n < nf) {
                    return Err(Error::out_of_range(format!(
                        "b_n must be below n = {n}, got {b_n}"
                    )));
                }
            }
        }
        Ok(self)
    }

    /// Closed interval of admissible actions.
    pub fn action_bounds(&self) -> (f64, f64) {
        match *self {
            GameSpec::Bertrand { low, high, .. } => (low, high),
            _ => (0.0, 1.0),
        }
    }

    /// Per-unit return of the public pool for the two public goods variants.
    pub fn marginal_return(&self) -> Option<f64> {
        match *self {
            GameSpec::Pgg { gamma, .. } => Some(gamma),
            GameSpec::GeneralPgg { n, b_n } => Some(b_n / n as f64),
            _ => None,
        }
    }

    /// Currency units per normalized unit (the endowment for the PGG, 1 otherwise).
    pub fn scale(&self) -> f64 {
        match *self {
            GameSpec::Pgg { endowment, .. } => endowment,
            _ => 1.0,
        }
    }

    /// The unique symmetric Nash action.
    pub fn nash_action(&self) -> f64 {
        match *self {
            GameSpec::Bertrand { low, .. } => low,
            _ => 0.0,
        }
    }

    /// The unique symmetric welfare-maximizing action.
    pub fn welfare_action(&self) -> f64 {
        match *self {
            GameSpec::Bertrand { high, .. } => high,
            _ => 1.0,
        }
    }

    pub fn check_action(&self, value: f64) -> Result<()> {
        let (low, high) = self.action_bounds();
        if value >= low && value <= high {
            Ok(())
        } else {
            Err(Error::ActionOutOfRange { value, low, high })
        }
    }

    /// Payoff of a focal player playing `own` against `others` (length `n - 1`).
    ///
    /// Prisoner's dilemma actions may be mixed; the payoff is then the
    /// expectation, which is linear in every player's cooperation probability.
    pub fn payoff(&self, own: f64, others: &[f64]) -> Result<f64> {
        if others.len() + 1 != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n() - 1,
                got: others.len(),
            });
        }
        self.check_action(own)?;
        for &a in others {
            self.check_action(a)?;
        }
        Ok(self.payoff_unchecked(own, others))
    }

    /// Payoff vector of a full profile.
    ///
    /// Aggregates are summed in sorted order, so permuting the profile
    /// permutes the payoffs bit for bit.
    pub fn payoffs(&self, profile: &[f64]) -> Result<Vec<f64>> {
        if profile.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: profile.len(),
            });
        }
        for &a in profile {
            self.check_action(a)?;
        }
        let mut sorted = profile.to_vec();
        sorted.sort_by(f64::total_cmp);
        let total: f64 = sorted.iter().sum();
        let n = self.n() as f64;
        Ok(match *self {
            GameSpec::Pgg { gamma, .. } => profile.iter().map(|&x| 1.0 - x + gamma * total).collect(),
            GameSpec::GeneralPgg { b_n, .. } => {
                profile.iter().map(|&x| 1.0 - x + b_n / n * total).collect()
            }
            GameSpec::Npd { b, c, .. } => profile
                .iter()
                .map(|&x| b * (total - x) / (n - 1.0) - c * x)
                .collect(),
            GameSpec::Bertrand { .. } => {
                let lowest = sorted[0];
                let ties = sorted.iter().filter(|&&p| p == lowest).count();
                profile
                    .iter()
                    .map(|&p| if p == lowest { lowest / ties as f64 } else { 0.0 })
                    .collect()
            }
        })
    }

    pub(crate) fn payoff_unchecked(&self, own: f64, others: &[f64]) -> f64 {
        match *self {
            GameSpec::Pgg { gamma, .. } => {
                let pool = own + others.iter().sum::<f64>();
                1.0 - own + gamma * pool
            }
            GameSpec::GeneralPgg { n, b_n } => {
                let pool = own + others.iter().sum::<f64>();
                1.0 - own + b_n / n as f64 * pool
            }
            GameSpec::Npd { n, b, c } => {
                let cooperators: f64 = others.iter().sum();
                b * cooperators / (n - 1) as f64 - c * own
            }
            GameSpec::Bertrand { .. } => {
                let lowest = others.iter().copied().fold(own, f64::min);
                if own > lowest {
                    0.0
                } else {
                    let ties = 1 + others.iter().filter(|&&p| p == lowest).count();
                    lowest / ties as f64
                }
            }
        }
    }

    /// Expected payoff when all `n` players independently play `action`.
    ///
    /// For the prisoner's dilemma this is the explicit binomial mixture over
    /// the number of co-defectors.
    pub fn expected_symmetric_payoff(&self, action: SymmetricAction) -> f64 {
        let x = action.value();
        match *self {
            GameSpec::Pgg { n, gamma, .. } => 1.0 - x + gamma * n as f64 * x,
            GameSpec::GeneralPgg { b_n, .. } => 1.0 - x + b_n * x,
            GameSpec::Bertrand { n, .. } => x / n as f64,
            GameSpec::Npd { n, b, c } => {
                let m = n - 1;
                let mf = m as f64;
                let mut cooperating = 0.0;
                let mut defecting = 0.0;
                for k in 0..=m {
                    let weight = codefector_pmf(m, k, x);
                    let share = b * (m - k) as f64 / mf;
                    cooperating += weight * (share - c);
                    defecting += weight * share;
                }
                x * cooperating + (1.0 - x) * defecting
            }
        }
    }

    /// Named numeric parameters, `n` first.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![("n", self.n() as f64)];
        match *self {
            GameSpec::Pgg {
                gamma, endowment, ..
            } => out.extend([("gamma", gamma), ("endowment", endowment)]),
            GameSpec::Npd { b, c, .. } => out.extend([("b", b), ("c", c)]),
            GameSpec::Bertrand { low, high, .. } => out.extend([("low", low), ("high", high)]),
            GameSpec::GeneralPgg { b_n, .. } => out.push(("b_n", b_n)),
        }
        out
    }

    /// Returns a copy with one parameter replaced.
    pub fn with_param(&self, param: Param, value: f64) -> Result<Self> {
        let mut spec = *self;
        let as_count = || -> Result<usize> {
            if value.fract() == 0.0 && value >= 0.0 {
                Ok(value as usize)
            } else {
                Err(Error::out_of_range(format!(
                    "n must be a whole number, got {value}"
                )))
            }
        };
        match (&mut spec, param) {
            (
                GameSpec::Pgg { n, .. }
                | GameSpec::Npd { n, .. }
                | GameSpec::Bertrand { n, .. }
                | GameSpec::GeneralPgg { n, .. },
                Param::N,
            ) => *n = as_count()?,
            (GameSpec::Pgg { gamma, .. }, Param::Gamma) => *gamma = value,
            (GameSpec::Pgg { endowment, .. }, Param::Endowment) => *endowment = value,
            (GameSpec::Npd { b, .. }, Param::B) => *b = value,
            (GameSpec::Npd { c, .. }, Param::C) => *c = value,
            (GameSpec::Bertrand { low, .. }, Param::Low) => *low = value,
            (GameSpec::Bertrand { high, .. }, Param::High) => *high = value,
            (GameSpec::GeneralPgg { b_n, .. }, Param::BN) => *b_n = value,
            (s, p) => {
                return Err(Error::Unsupported(format!(
                    "{} has no parameter {p}",
                    s.variant()
                )))
            }
        }
        Ok(spec)
    }
}

/// Probability that exactly `k` of `m` independent players defect when
/// each cooperates with probability `lambda`.
fn codefector_pmf(m: usize, k: usize, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return if k == m { 1.0 } else { 0.0 };
    }
    if lambda >= 1.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let ln = ln_binomial(m as u64, k as u64)
        + (m - k) as f64 * lambda.ln()
        + k as f64 * (1.0 - lambda).ln();
    ln.exp()
}

/// A symmetric action validated against its game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymmetricAction(f64);

impl SymmetricAction {
    pub fn new(spec: &GameSpec, value: f64) -> Result<Self> {
        spec.check_action(value)?;
        Ok(SymmetricAction(value))
    }

    pub(crate) fn new_unchecked(value: f64) -> Self {
        SymmetricAction(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Game parameters that can be varied in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    N,
    Gamma,
    Endowment,
    B,
    C,
    Low,
    High,
    BN,
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Param::N => "n",
            Param::Gamma => "gamma",
            Param::Endowment => "endowment",
            Param::B => "b",
            Param::C => "c",
            Param::Low => "low",
            Param::High => "high",
            Param::BN => "b_n",
        })
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "n" => Param::N,
            "gamma" => Param::Gamma,
            "endowment" => Param::Endowment,
            "b" => Param::B,
            "c" => Param::C,
            "low" => Param::Low,
            "high" => Param::High,
            "b_n" | "b-n" | "bn" => Param::BN,
            other => return Err(Error::Unsupported(format!("unknown parameter {other}"))),
        })
    }
}
