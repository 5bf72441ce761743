//! Populations of preference parameters and the share of them that
//! cooperates.
//!
//! The share is computed twice: from the closed-form thresholds
//! integrated against the parameter distribution, and by counting the
//! direct utility predicate over seeded samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    closed_form_cooperates, cooperation_threshold, cr2_margin_coefficients, deviation_profiles,
    Bound, Comparison, DeviationProfiles, PreferenceModel, PreferenceParams,
};
use crate::error::{Error, Result};
use crate::games::GameSpec;

/// Midpoints per dimension for numerical integration.
const QUADRATURE_POINTS: usize = 4000;
const GRID_POINTS_2D: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uniform {
    pub low: f64,
    pub high: f64,
}

impl Uniform {
    pub fn new(low: f64, high: f64) -> Self {
        Uniform { low, high }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.low.is_finite() && self.high.is_finite() && self.low <= self.high {
            Ok(())
        } else {
            Err(Error::out_of_range(format!(
                "{name}: need low <= high, got [{}, {}]",
                self.low, self.high
            )))
        }
    }

    fn width(&self) -> f64 {
        self.high - self.low
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        self.low + self.width() * rng.gen::<f64>()
    }

    /// `P(X >= t)`.
    fn mass_at_least(&self, t: f64) -> f64 {
        if self.width() == 0.0 {
            return if self.low >= t { 1.0 } else { 0.0 };
        }
        ((self.high - t) / self.width()).clamp(0.0, 1.0)
    }

    /// `P(X <= t)`.
    fn mass_at_most(&self, t: f64) -> f64 {
        if self.width() == 0.0 {
            return if self.low <= t { 1.0 } else { 0.0 };
        }
        ((t - self.low) / self.width()).clamp(0.0, 1.0)
    }

    fn midpoints(&self, count: usize) -> impl Iterator<Item = f64> + '_ {
        let step = self.width() / count as f64;
        (0..count).map(move |k| self.low + step * (k as f64 + 0.5))
    }
}

/// How Fehr–Schmidt `beta` is drawn so that `beta <= alpha` holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FsBeta {
    /// `beta = alpha * U[0, 1]`.
    Scaled,
    /// `beta` uniform; `alpha` is raised to `beta` when drawn below it.
    Uniform { low: f64, high: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Sampler {
    Fs { alpha: Uniform, beta: FsBeta },
    Cr1 { alpha: Uniform },
    Cr2 { alpha: Uniform, delta: Uniform },
    /// A finite population, sampled with replacement.
    Explicit { points: Vec<PreferenceParams> },
}

impl Sampler {
    pub fn default_for(model: PreferenceModel) -> Self {
        match model {
            PreferenceModel::FehrSchmidt => Sampler::Fs {
                alpha: Uniform::new(0.0, 2.0),
                beta: FsBeta::Scaled,
            },
            PreferenceModel::CharnessRabin => Sampler::Cr1 {
                alpha: Uniform::new(0.0, 1.0),
            },
            PreferenceModel::CharnessRabin2 => Sampler::Cr2 {
                alpha: Uniform::new(0.0, 1.0),
                delta: Uniform::new(0.0, 1.0),
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let unit = |u: &Uniform, name: &str| {
            u.validate(name)?;
            if u.low < 0.0 || u.high > 1.0 {
                return Err(Error::out_of_range(format!("{name} must lie in [0, 1]")));
            }
            Ok(())
        };
        match self {
            Sampler::Fs { alpha, beta } => {
                alpha.validate("alpha")?;
                if alpha.low < 0.0 {
                    return Err(Error::out_of_range("alpha must be non-negative"));
                }
                if let FsBeta::Uniform { low, high } = *beta {
                    let u = Uniform::new(low, high);
                    u.validate("beta")?;
                    if low < 0.0 {
                        return Err(Error::out_of_range("beta must be non-negative"));
                    }
                }
            }
            Sampler::Cr1 { alpha } => unit(alpha, "alpha")?,
            Sampler::Cr2 { alpha, delta } => {
                unit(alpha, "alpha")?;
                unit(delta, "delta")?;
            }
            Sampler::Explicit { points } => {
                if points.is_empty() {
                    return Err(Error::Empty("explicit population"));
                }
                for p in points {
                    p.validate()?;
                }
            }
        }
        Ok(())
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> PreferenceParams {
        match self {
            Sampler::Fs { alpha, beta } => {
                let a = alpha.sample(rng);
                match *beta {
                    FsBeta::Scaled => PreferenceParams::FehrSchmidt {
                        alpha: a,
                        beta: a * rng.gen::<f64>(),
                    },
                    FsBeta::Uniform { low, high } => {
                        let b = Uniform::new(low, high).sample(rng);
                        PreferenceParams::FehrSchmidt {
                            alpha: a.max(b),
                            beta: b,
                        }
                    }
                }
            }
            Sampler::Cr1 { alpha } => PreferenceParams::CharnessRabin {
                alpha: alpha.sample(rng),
            },
            Sampler::Cr2 { alpha, delta } => PreferenceParams::CharnessRabin2 {
                alpha: alpha.sample(rng),
                delta: delta.sample(rng),
            },
            Sampler::Explicit { points } => points[rng.gen_range(0..points.len())],
        }
    }
}

/// A population of agents: a parameter distribution, a sample size and a seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationSpec {
    pub sampler: Sampler,
    pub sample_count: usize,
    pub seed: u64,
    #[serde(default)]
    pub comparison: Comparison,
}

impl PopulationSpec {
    pub fn new(sampler: Sampler, sample_count: usize, seed: u64) -> Self {
        PopulationSpec {
            sampler,
            sample_count,
            seed,
            comparison: Comparison::default(),
        }
    }

    pub fn default_for(model: PreferenceModel, sample_count: usize, seed: u64) -> Self {
        Self::new(Sampler::default_for(model), sample_count, seed)
    }

    /// Parses the TOML population schema (see README).
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: PopulationSpec = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })?;
        spec.validate()
    }

    pub fn validate(self) -> Result<Self> {
        if self.sample_count == 0 {
            return Err(Error::Empty("population sample"));
        }
        self.sampler.validate()?;
        Ok(self)
    }

    pub fn model(&self) -> Option<PreferenceModel> {
        match &self.sampler {
            Sampler::Fs { .. } => Some(PreferenceModel::FehrSchmidt),
            Sampler::Cr1 { .. } => Some(PreferenceModel::CharnessRabin),
            Sampler::Cr2 { .. } => Some(PreferenceModel::CharnessRabin2),
            Sampler::Explicit { points } => {
                let first = points.first()?.model();
                points.iter().all(|p| p.model() == first).then_some(first)
            }
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Cooperating share of a population, by both routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    pub analytic: f64,
    pub monte_carlo: f64,
    pub sample_count: usize,
    pub seed: u64,
    /// Allowed disagreement, `2 / sqrt(sample_count)`.
    pub bound: f64,
}

/// Share of the population for which staying cooperative is weakly
/// preferred. Fails if the two routes disagree by more than `2/sqrt(samples)`.
pub fn mu_fraction(pop: &PopulationSpec, spec: &GameSpec) -> Result<MuEstimate> {
    let pop = pop.clone().validate()?;
    let analytic = analytic_mu(&pop, spec)?;
    let monte_carlo = monte_carlo_mu(&pop, spec)?;
    let bound = 2.0 / (pop.sample_count as f64).sqrt();
    if (analytic - monte_carlo).abs() > bound {
        return Err(Error::EstimateMismatch {
            analytic,
            monte_carlo,
            bound,
        });
    }
    Ok(MuEstimate {
        analytic,
        monte_carlo,
        sample_count: pop.sample_count,
        seed: pop.seed,
        bound,
    })
}

/// Seeded count of the direct utility predicate.
pub fn monte_carlo_mu(pop: &PopulationSpec, spec: &GameSpec) -> Result<f64> {
    let pop = pop.clone().validate()?;
    let profiles = deviation_profiles(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(pop.seed);
    let mut hits = 0usize;
    for _ in 0..pop.sample_count {
        let params = pop.sampler.sample(&mut rng);
        if profiles.prefers_cooperation(&params, pop.comparison)? {
            hits += 1;
        }
    }
    Ok(hits as f64 / pop.sample_count as f64)
}

/// Population mass satisfying the closed-form predicate.
pub fn analytic_mu(pop: &PopulationSpec, spec: &GameSpec) -> Result<f64> {
    let pop = pop.clone().validate()?;
    if pop.comparison == Comparison::VersusAllDefect {
        return grid_mass(&pop, &deviation_profiles(spec)?);
    }
    match &pop.sampler {
        Sampler::Explicit { points } => {
            let mut hits = 0usize;
            for p in points {
                if closed_form_cooperates(p, spec)? {
                    hits += 1;
                }
            }
            Ok(hits as f64 / points.len() as f64)
        }
        Sampler::Fs { alpha, beta } => {
            let t = cooperation_threshold(PreferenceModel::FehrSchmidt, spec)?;
            debug_assert_eq!(t.bound, Bound::AtLeast);
            Ok(match *beta {
                FsBeta::Uniform { low, high } => Uniform::new(low, high).mass_at_least(t.value),
                FsBeta::Scaled => scaled_mass_at_least(alpha, t.value),
            })
        }
        Sampler::Cr1 { alpha } => {
            let t = cooperation_threshold(PreferenceModel::CharnessRabin, spec)?;
            debug_assert_eq!(t.bound, Bound::AtMost);
            Ok(alpha.mass_at_most(t.value))
        }
        Sampler::Cr2 { alpha, delta } => {
            let mut total = 0.0;
            let count = if alpha.width() == 0.0 { 1 } else { QUADRATURE_POINTS };
            for a in alpha.midpoints(count) {
                let a = if alpha.width() == 0.0 { alpha.low } else { a };
                let (intercept, slope) = cr2_margin_coefficients(a, spec)?;
                total += linear_mass_nonnegative(delta, intercept, slope);
            }
            Ok(total / count as f64)
        }
    }
}

/// `P(alpha * W >= t)` for `alpha ~ U[low, high]`, `W ~ U[0, 1]`.
fn scaled_mass_at_least(alpha: &Uniform, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if alpha.width() == 0.0 {
        return if alpha.low > 0.0 {
            (1.0 - t / alpha.low).max(0.0)
        } else {
            0.0
        };
    }
    let m = alpha.low.max(t);
    if m >= alpha.high {
        return 0.0;
    }
    ((alpha.high - m) - t * (alpha.high / m).ln()) / alpha.width()
}

/// `P(a + b * X >= 0)` for `X` uniform.
fn linear_mass_nonnegative(x: &Uniform, a: f64, b: f64) -> f64 {
    if b == 0.0 {
        return if a >= 0.0 { 1.0 } else { 0.0 };
    }
    let root = -a / b;
    if b > 0.0 {
        x.mass_at_least(root)
    } else {
        x.mass_at_most(root)
    }
}

/// Midpoint-grid integral of the direct predicate over the distribution.
fn grid_mass(pop: &PopulationSpec, profiles: &DeviationProfiles) -> Result<f64> {
    let comparison = pop.comparison;
    let hit = |p: PreferenceParams| -> Result<f64> {
        Ok(if profiles.prefers_cooperation(&p, comparison)? {
            1.0
        } else {
            0.0
        })
    };
    let grid = |u: &Uniform| -> Vec<f64> {
        if u.width() == 0.0 {
            vec![u.low]
        } else {
            u.midpoints(GRID_POINTS_2D).collect()
        }
    };
    let mut total = 0.0;
    let mut cells = 0usize;
    match &pop.sampler {
        Sampler::Explicit { points } => {
            for &p in points {
                total += hit(p)?;
                cells += 1;
            }
        }
        Sampler::Cr1 { alpha } => {
            let alphas: Vec<f64> = if alpha.width() == 0.0 {
                vec![alpha.low]
            } else {
                alpha.midpoints(QUADRATURE_POINTS).collect()
            };
            for a in alphas {
                total += hit(PreferenceParams::CharnessRabin { alpha: a })?;
                cells += 1;
            }
        }
        Sampler::Cr2 { alpha, delta } => {
            for &a in &grid(alpha) {
                for &d in &grid(delta) {
                    total += hit(PreferenceParams::CharnessRabin2 { alpha: a, delta: d })?;
                    cells += 1;
                }
            }
        }
        Sampler::Fs { alpha, beta } => {
            let unit = Uniform::new(0.0, 1.0);
            let second = match *beta {
                FsBeta::Scaled => unit,
                FsBeta::Uniform { low, high } => Uniform::new(low, high),
            };
            for &a in &grid(alpha) {
                for &x in &grid(&second) {
                    let params = match *beta {
                        FsBeta::Scaled => PreferenceParams::FehrSchmidt {
                            alpha: a,
                            beta: a * x,
                        },
                        FsBeta::Uniform { .. } => PreferenceParams::FehrSchmidt {
                            alpha: a.max(x),
                            beta: x,
                        },
                    };
                    total += hit(params)?;
                    cells += 1;
                }
            }
        }
    }
    Ok(total / cells as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fs_uniform_beta_example() {
        let pop = PopulationSpec::new(
            Sampler::Fs {
                alpha: Uniform::new(0.0, 1.0),
                beta: FsBeta::Uniform { low: 0.0, high: 1.0 },
            },
            20_000,
            11,
        );
        let mu = mu_fraction(&pop, &GameSpec::npd(2, 0.3, 0.1)).unwrap();
        assert_abs_diff_eq!(mu.analytic, 0.75, epsilon = 1e-12);
        assert!((mu.monte_carlo - 0.75).abs() < 0.02);
    }

    #[test]
    fn threshold_below_support_gives_one() {
        // FS/PGG threshold is 1 - gamma = 0.1; every beta in [0.2, 0.9] clears it.
        let pop = PopulationSpec::new(
            Sampler::Fs {
                alpha: Uniform::new(1.0, 2.0),
                beta: FsBeta::Uniform { low: 0.2, high: 0.9 },
            },
            1000,
            5,
        );
        let mu = mu_fraction(&pop, &GameSpec::pgg(4, 0.9)).unwrap();
        assert_eq!(mu.analytic, 1.0);
        assert_eq!(mu.monte_carlo, 1.0);
    }

    #[test]
    fn cr1_uniform_share_is_constant_in_n() {
        let pop = PopulationSpec::default_for(PreferenceModel::CharnessRabin, 10_000, 3);
        let first = mu_fraction(&pop, &GameSpec::npd(2, 0.3, 0.1)).unwrap();
        assert_abs_diff_eq!(first.analytic, 2.0 / 3.0, epsilon = 1e-12);
        for n in 3..30 {
            let mu = mu_fraction(&pop, &GameSpec::npd(n, 0.3, 0.1)).unwrap();
            assert_eq!(mu.analytic.to_bits(), first.analytic.to_bits());
        }
    }

    #[test]
    fn scaled_fs_mass_matches_numeric_integral() {
        let alpha = Uniform::new(0.0, 2.0);
        for t in [0.0, 0.1, 0.25, 0.7, 1.5, 1.99, 2.5] {
            let mut numeric = 0.0;
            let k = 200_000;
            for a in alpha.midpoints(k) {
                numeric += (1.0 - t / a).max(0.0);
            }
            numeric /= k as f64;
            assert_abs_diff_eq!(scaled_mass_at_least(&alpha, t), numeric, epsilon = 1e-5);
        }
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let spec = GameSpec::npd(5, 0.3, 0.1);
        for model in [
            PreferenceModel::FehrSchmidt,
            PreferenceModel::CharnessRabin,
            PreferenceModel::CharnessRabin2,
        ] {
            let pop = PopulationSpec::default_for(model, 5000, 99);
            let a = monte_carlo_mu(&pop, &spec).unwrap();
            let b = monte_carlo_mu(&pop, &spec).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
            let other = PopulationSpec { seed: 100, ..pop };
            // Different seeds are allowed to coincide, but should not for 5000 draws.
            assert_ne!(monte_carlo_mu(&other, &spec).unwrap().to_bits(), a.to_bits());
        }
    }

    #[test]
    fn routes_agree_for_default_populations() {
        for model in [
            PreferenceModel::FehrSchmidt,
            PreferenceModel::CharnessRabin,
            PreferenceModel::CharnessRabin2,
        ] {
            let pop = PopulationSpec::default_for(model, 20_000, 1);
            for spec in [
                GameSpec::npd(2, 0.3, 0.1),
                GameSpec::npd(11, 0.3, 0.1),
                GameSpec::pgg(4, 0.5),
                GameSpec::pgg(40, 0.5),
            ] {
                mu_fraction(&pop, &spec).unwrap();
            }
        }
    }

    #[test]
    fn all_defect_reference_is_available() {
        let mut pop = PopulationSpec::default_for(PreferenceModel::FehrSchmidt, 20_000, 2);
        pop.comparison = Comparison::VersusAllDefect;
        let mu = mu_fraction(&pop, &GameSpec::npd(2, 0.3, 0.1)).unwrap();
        assert!(mu.analytic > 0.0 && mu.analytic < 1.0);

        // CR1 against all-defect never cooperates in the NPD: defecting alone
        // strictly raises both own payoff and welfare above zero.
        let mut pop = PopulationSpec::default_for(PreferenceModel::CharnessRabin, 1000, 2);
        pop.comparison = Comparison::VersusAllDefect;
        let mu = mu_fraction(&pop, &GameSpec::npd(6, 0.3, 0.1)).unwrap();
        assert_eq!(mu.analytic, 0.0);
        assert_eq!(mu.monte_carlo, 0.0);
    }

    #[test]
    fn explicit_population() {
        let pop = PopulationSpec::new(
            Sampler::Explicit {
                points: vec![
                    PreferenceParams::CharnessRabin { alpha: 0.1 },
                    PreferenceParams::CharnessRabin { alpha: 0.5 },
                    PreferenceParams::CharnessRabin { alpha: 0.9 },
                    PreferenceParams::CharnessRabin { alpha: 1.0 },
                ],
            },
            4000,
            8,
        );
        let mu = mu_fraction(&pop, &GameSpec::npd(3, 0.3, 0.1)).unwrap();
        assert_eq!(mu.analytic, 0.5);
    }

    #[test]
    fn zero_samples_rejected() {
        let pop = PopulationSpec::default_for(PreferenceModel::CharnessRabin, 0, 1);
        assert_eq!(
            mu_fraction(&pop, &GameSpec::npd(2, 0.3, 0.1)),
            Err(Error::Empty("population sample"))
        );
    }

    #[test]
    fn toml_schema() {
        let text = r#"
sample_count = 5000
seed = 17
comparison = "versus_cooperation"

[sampler]
model = "fs"
alpha = { low = 0.0, high = 3.0 }
beta = { mode = "uniform", low = 0.0, high = 1.0 }
"#;
        let pop = PopulationSpec::from_toml_str(text).unwrap();
        assert_eq!(pop.seed, 17);
        assert_eq!(pop.model(), Some(PreferenceModel::FehrSchmidt));

        let explicit = r#"
sample_count = 100
seed = 1
[sampler]
model = "explicit"
[[sampler.points]]
model = "cr1"
alpha = 0.4
"#;
        let pop = PopulationSpec::from_toml_str(explicit).unwrap();
        assert_eq!(pop.model(), Some(PreferenceModel::CharnessRabin));

        let bad = "sample_count = 0\nseed = 1\n[sampler]\nmodel = \"cr1\"\nalpha = { low = 0.0, high = 1.0 }\n";
        assert!(PopulationSpec::from_toml_str(bad).is_err());
        let malformed = "sample_count = \"many\"\n";
        assert!(matches!(
            PopulationSpec::from_toml_str(malformed),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
