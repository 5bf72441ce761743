//! Qualitative group-size effects of each model on the PGG and the NPD.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::population::{mu_fraction, PopulationSpec};
use super::PreferenceModel;
use crate::coopeq::solve;
use crate::error::{Error, Result};
use crate::games::GameSpec;

/// Differences below this are treated as no change.
const EFFECT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "FS")]
    Fs,
    #[serde(rename = "CR1")]
    Cr1,
    #[serde(rename = "CR2")]
    Cr2,
    #[serde(rename = "CE")]
    Ce,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Fs, ModelKind::Cr1, ModelKind::Cr2, ModelKind::Ce];

    pub fn free_parameters(self) -> FreeParameters {
        match self {
            ModelKind::Fs | ModelKind::Cr2 => FreeParameters::Two,
            ModelKind::Cr1 => FreeParameters::One,
            ModelKind::Ce => FreeParameters::None,
        }
    }

    pub fn preference_model(self) -> Option<PreferenceModel> {
        match self {
            ModelKind::Fs => Some(PreferenceModel::FehrSchmidt),
            ModelKind::Cr1 => Some(PreferenceModel::CharnessRabin),
            ModelKind::Cr2 => Some(PreferenceModel::CharnessRabin2),
            ModelKind::Ce => None,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fs" => Ok(ModelKind::Fs),
            "cr1" => Ok(ModelKind::Cr1),
            "cr2" => Ok(ModelKind::Cr2),
            "ce" => Ok(ModelKind::Ce),
            other => Err(Error::Unsupported(format!("unknown model {other}"))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Fs => "FS",
            ModelKind::Cr1 => "CR1",
            ModelKind::Cr2 => "CR2",
            ModelKind::Ce => "CE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Effect {
    None,
    Positive,
    Negative,
    NonMonotone,
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Effect::None => "none",
            Effect::Positive => "positive",
            Effect::Negative => "negative",
            Effect::NonMonotone => "non-monotone",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeParameters {
    None,
    One,
    Two,
}

impl fmt::Display for FreeParameters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FreeParameters::None => "none",
            FreeParameters::One => "one",
            FreeParameters::Two => "two",
        })
    }
}

/// Sign of the trend of `values` along the sweep.
pub fn classify_effect(values: &[f64]) -> Effect {
    let (mut up, mut down) = (false, false);
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d > EFFECT_TOLERANCE {
            up = true;
        } else if d < -EFFECT_TOLERANCE {
            down = true;
        }
    }
    match (up, down) {
        (false, false) => Effect::None,
        (true, false) => Effect::Positive,
        (false, true) => Effect::Negative,
        (true, true) => Effect::NonMonotone,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PggSweep {
    pub gamma: f64,
    pub ns: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NpdSweep {
    pub b: f64,
    pub c: f64,
    pub ns: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSweeps {
    pub pgg: PggSweep,
    pub npd: NpdSweep,
}

impl Default for ComparisonSweeps {
    /// Group sizes spanning the small and large conditions of both studies.
    fn default() -> Self {
        ComparisonSweeps {
            pgg: PggSweep {
                gamma: 0.5,
                ns: (4..=40).collect(),
            },
            npd: NpdSweep {
                b: 0.3,
                c: 0.1,
                ns: (2..=11).collect(),
            },
        }
    }
}

impl ComparisonSweeps {
    fn games(&self) -> Result<(Vec<GameSpec>, Vec<GameSpec>)> {
        let distinct = |ns: &[usize]| {
            let mut v = ns.to_vec();
            v.sort_unstable();
            v.dedup();
            v.len()
        };
        if distinct(&self.pgg.ns) < 2 || distinct(&self.npd.ns) < 2 {
            return Err(Error::DegenerateSweep(
                "each sweep needs at least two distinct group sizes".into(),
            ));
        }
        let pgg = self
            .pgg
            .ns
            .iter()
            .map(|&n| GameSpec::pgg(n, self.pgg.gamma).validate())
            .collect::<Result<Vec<_>>>()?;
        let npd = self
            .npd
            .ns
            .iter()
            .map(|&n| GameSpec::npd(n, self.npd.b, self.npd.c).validate())
            .collect::<Result<Vec<_>>>()?;
        Ok((pgg, npd))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRow {
    pub model: ModelKind,
    pub pgg: Effect,
    pub npd: Effect,
    pub free_parameters: FreeParameters,
    /// Cooperation measure along the PGG sweep (share of cooperators, or
    /// the CE contribution fraction).
    pub pgg_measure: Vec<f64>,
    pub npd_measure: Vec<f64>,
}

/// Evaluates each model's cooperation measure along both sweeps and reports
/// the direction of the group-size effect.
///
/// `population` supplies the parameter distribution for a preference model;
/// it is not consulted for CE.
pub fn model_comparison<F>(
    sweeps: &ComparisonSweeps,
    models: &[ModelKind],
    mut population: F,
) -> Result<Vec<ModelRow>>
where
    F: FnMut(PreferenceModel) -> PopulationSpec,
{
    let (pgg, npd) = sweeps.games()?;
    let mut rows = Vec::with_capacity(models.len());
    for &model in models {
        let (pgg_measure, npd_measure) = match model.preference_model() {
            Some(pm) => {
                let pop = population(pm);
                let measure = |games: &[GameSpec]| -> Result<Vec<f64>> {
                    games
                        .iter()
                        .map(|g| mu_fraction(&pop, g).map(|m| m.analytic))
                        .collect()
                };
                (measure(&pgg)?, measure(&npd)?)
            }
            None => {
                let measure = |games: &[GameSpec]| -> Result<Vec<f64>> {
                    games
                        .iter()
                        .map(|g| solve(g).map(|p| p.equilibrium.value()))
                        .collect()
                };
                (measure(&pgg)?, measure(&npd)?)
            }
        };
        rows.push(ModelRow {
            model,
            pgg: classify_effect(&pgg_measure),
            npd: classify_effect(&npd_measure),
            free_parameters: model.free_parameters(),
            pgg_measure,
            npd_measure,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify() {
        assert_eq!(classify_effect(&[0.5, 0.5, 0.5]), Effect::None);
        assert_eq!(classify_effect(&[0.0, 0.0, 0.2, 0.3]), Effect::Positive);
        assert_eq!(classify_effect(&[0.5, 0.1, 0.0, 0.0]), Effect::Negative);
        assert_eq!(classify_effect(&[0.0, 0.3, 0.1]), Effect::NonMonotone);
    }

    #[test]
    fn degenerate_sweep_rejected() {
        let mut sweeps = ComparisonSweeps::default();
        sweeps.npd.ns = vec![5, 5];
        let err = model_comparison(&sweeps, &[ModelKind::Ce], |m| {
            PopulationSpec::default_for(m, 100, 1)
        })
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateSweep(_)));
    }

    #[test]
    fn default_rows() {
        let rows = model_comparison(&ComparisonSweeps::default(), &ModelKind::ALL, |m| {
            PopulationSpec::default_for(m, 20_000, 2015)
        })
        .unwrap();
        let summary: Vec<(ModelKind, Effect, Effect, FreeParameters)> = rows
            .iter()
            .map(|r| (r.model, r.pgg, r.npd, r.free_parameters))
            .collect();
        assert_eq!(
            summary,
            vec![
                (ModelKind::Fs, Effect::None, Effect::Negative, FreeParameters::Two),
                (ModelKind::Cr1, Effect::Positive, Effect::None, FreeParameters::One),
                (ModelKind::Cr2, Effect::Positive, Effect::Negative, FreeParameters::Two),
                (ModelKind::Ce, Effect::Positive, Effect::Negative, FreeParameters::None),
            ]
        );
    }
}
