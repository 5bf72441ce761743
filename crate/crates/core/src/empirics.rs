//! One-shot decision data: per-condition summaries and the two-sample
//! rank-sum test.
//!
//! Input is delimited text with a header. Required columns are
//! `condition`, `variant` (`pgg` or `npd`) and `decision`; an optional
//! `endowment` column overrides the default maximum contribution per row,
//! and any other column is kept as opaque metadata. Prisoner's dilemma
//! decisions may be written `C`/`D`, `1`/`0` or `cooperate`/`defect`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::games::Variant;

/// Decisions of every subject in one condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionDataset {
    pub condition: String,
    pub variant: Variant,
    /// Maximum contribution (PGG only).
    pub endowment: f64,
    /// Contributions in currency units, or 1 for cooperate and 0 for defect.
    pub decisions: Vec<f64>,
    pub metadata: Vec<BTreeMap<String, String>>,
}

impl DecisionDataset {
    pub fn validate(&self) -> Result<()> {
        if self.decisions.is_empty() {
            return Err(Error::Empty("decision dataset"));
        }
        match self.variant {
            Variant::Pgg => {
                if !(self.endowment > 0.0) {
                    return Err(Error::out_of_range(format!(
                        "endowment must be positive, got {}",
                        self.endowment
                    )));
                }
                if let Some(&d) = self
                    .decisions
                    .iter()
                    .find(|&&d| !(0.0..=self.endowment).contains(&d))
                {
                    return Err(Error::out_of_range(format!(
                        "contribution {d} outside [0, {}]",
                        self.endowment
                    )));
                }
            }
            Variant::Npd => {
                if let Some(&d) = self.decisions.iter().find(|&&d| d != 0.0 && d != 1.0) {
                    return Err(Error::out_of_range(format!(
                        "cooperation decision must be 0 or 1, got {d}"
                    )));
                }
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "decision data for {other} games"
                )))
            }
        }
        Ok(())
    }
}

fn parse_variant(s: &str) -> Option<Variant> {
    match s.to_ascii_lowercase().as_str() {
        "pgg" => Some(Variant::Pgg),
        "npd" => Some(Variant::Npd),
        _ => None,
    }
}

fn parse_cooperation(s: &str) -> Option<f64> {
    match s.to_ascii_lowercase().as_str() {
        "c" | "1" | "cooperate" => Some(1.0),
        "d" | "0" | "defect" => Some(0.0),
        _ => None,
    }
}

/// Reads decision records, grouped by condition in order of first appearance.
pub fn read_datasets<R: Read>(reader: R, default_endowment: f64) -> Result<Vec<DecisionDataset>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.is_empty() {
        return Err(Error::Empty("decision file"));
    }
    let column = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let missing = |name: &str| Error::Parse {
        line: 1,
        message: format!("missing column {name}"),
    };
    let cond_col = column("condition").ok_or_else(|| missing("condition"))?;
    let var_col = column("variant").ok_or_else(|| missing("variant"))?;
    let dec_col = column("decision").ok_or_else(|| missing("decision"))?;
    let end_col = column("endowment");

    let mut out: Vec<DecisionDataset> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let fail = |message: String| Error::Parse { line, message };
        let condition = record[cond_col].to_string();
        let variant = parse_variant(&record[var_col])
            .ok_or_else(|| fail(format!("unknown variant {:?}", &record[var_col])))?;
        let endowment = match end_col.map(|c| &record[c]) {
            Some(s) if !s.is_empty() => s
                .parse::<f64>()
                .map_err(|_| fail(format!("bad endowment {s:?}")))?,
            _ => default_endowment,
        };
        let raw = &record[dec_col];
        let decision = match variant {
            Variant::Npd => parse_cooperation(raw)
                .ok_or_else(|| fail(format!("bad cooperation decision {raw:?}")))?,
            _ => {
                let x: f64 = raw
                    .parse()
                    .map_err(|_| fail(format!("bad contribution {raw:?}")))?;
                if !(0.0..=endowment).contains(&x) {
                    return Err(fail(format!("contribution {x} outside [0, {endowment}]")));
                }
                x
            }
        };
        let metadata: BTreeMap<String, String> = headers
            .iter()
            .zip(record.iter())
            .enumerate()
            .filter(|(i, _)| ![cond_col, var_col, dec_col].contains(i) && Some(*i) != end_col)
            .map(|(_, (h, v))| (h.to_string(), v.to_string()))
            .collect();

        let idx = match out.iter().position(|d| d.condition == condition) {
            Some(i) => i,
            None => {
                out.push(DecisionDataset {
                    condition: condition.clone(),
                    variant,
                    endowment,
                    decisions: Vec::new(),
                    metadata: Vec::new(),
                });
                out.len() - 1
            }
        };
        let ds = &mut out[idx];
        if ds.variant != variant {
            return Err(fail(format!("condition {condition} mixes game variants")));
        }
        if ds.endowment != endowment {
            return Err(fail(format!("condition {condition} mixes endowments")));
        }
        ds.decisions.push(decision);
        ds.metadata.push(metadata);
    }
    if out.is_empty() {
        return Err(Error::Empty("decision file"));
    }
    Ok(out)
}

/// Writes datasets in the format [`read_datasets`] accepts.
pub fn write_datasets<W: Write>(writer: W, datasets: &[DecisionDataset]) -> Result<()> {
    let mut meta_keys: Vec<String> = datasets
        .iter()
        .flat_map(|d| d.metadata.iter().flat_map(|m| m.keys().cloned()))
        .collect();
    meta_keys.sort();
    meta_keys.dedup();
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["condition", "variant", "decision", "endowment"];
    header.extend(meta_keys.iter().map(String::as_str));
    w.write_record(&header).map_err(csv_io)?;
    for d in datasets {
        for (i, &x) in d.decisions.iter().enumerate() {
            let decision = match d.variant {
                Variant::Npd => if x == 1.0 { "C" } else { "D" }.to_string(),
                _ => x.to_string(),
            };
            let mut row = vec![
                d.condition.clone(),
                d.variant.to_string(),
                decision,
                d.endowment.to_string(),
            ];
            for k in &meta_keys {
                row.push(
                    d.metadata
                        .get(i)
                        .and_then(|m| m.get(k))
                        .cloned()
                        .unwrap_or_default(),
                );
            }
            w.write_record(&row).map_err(csv_io)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Descriptive statistics of one condition. Percentages are in `[0, 100]`.
/// For prisoner's dilemma data the mean and SEM are in percentage points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub condition: String,
    pub variant: Variant,
    pub n_subjects: usize,
    pub pct_free_riders: Option<f64>,
    pub pct_full_contributors: Option<f64>,
    pub pct_cooperators: Option<f64>,
    pub mean: f64,
    pub sem: f64,
}

pub fn summarize(data: &DecisionDataset) -> Result<ConditionSummary> {
    data.validate()?;
    let n = data.decisions.len();
    let nf = n as f64;
    let pct = |pred: &dyn Fn(f64) -> bool| {
        100.0 * data.decisions.iter().filter(|&&x| pred(x)).count() as f64 / nf
    };
    let scale = if data.variant == Variant::Npd { 100.0 } else { 1.0 };
    let mean = data.decisions.iter().sum::<f64>() / nf;
    let sem = if n > 1 {
        let ss: f64 = data.decisions.iter().map(|x| (x - mean).powi(2)).sum();
        (ss / (nf - 1.0)).sqrt() / nf.sqrt()
    } else {
        0.0
    };
    let (free, full, coop) = match data.variant {
        Variant::Npd => (None, None, Some(pct(&|x| x == 1.0))),
        _ => (
            Some(pct(&|x| x == 0.0)),
            Some(pct(&|x| x == data.endowment)),
            None,
        ),
    };
    Ok(ConditionSummary {
        condition: data.condition.clone(),
        variant: data.variant,
        n_subjects: n,
        pct_free_riders: free,
        pct_full_contributors: full,
        pct_cooperators: coop,
        mean: mean * scale,
        sem: sem * scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankSumResult {
    /// Mann–Whitney U of the first sample.
    pub u: f64,
    /// Mann–Whitney U of the second sample; `u + u_other = |a| |b|`.
    pub u_other: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub method: PValueMethod,
}

/// Largest sample size for which the exact null distribution is used.
pub const EXACT_MAX_SIZE: usize = 8;

/// Midranks (1-based) of the pooled sample and the tie group sizes.
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

/// Number of orderings of `m` first-sample and `n` second-sample values
/// giving each `U` in `0..=m n`.
pub fn u_distribution(m: usize, n: usize) -> Vec<f64> {
    // counts[i][j][u]: arrangements of i first-sample and j second-sample
    // values. The largest value either belongs to the first sample, in
    // which case it beats all j others, or to the second.
    let mut counts = vec![vec![Vec::<f64>::new(); n + 1]; m + 1];
    for i in 0..=m {
        for j in 0..=n {
            let mut c = vec![0.0; i * j + 1];
            if i == 0 || j == 0 {
                c[0] = 1.0;
            } else {
                for (u, slot) in c.iter_mut().enumerate() {
                    let with_first = if u >= j {
                        counts[i - 1][j].get(u - j).copied().unwrap_or(0.0)
                    } else {
                        0.0
                    };
                    let with_second = counts[i][j - 1].get(u).copied().unwrap_or(0.0);
                    *slot = with_first + with_second;
                }
            }
            counts[i][j] = c;
        }
    }
    counts[m][n].clone()
}

/// Two-sided Mann–Whitney rank-sum test.
///
/// Exact when both samples have at most [`EXACT_MAX_SIZE`] values and
/// there are no ties; otherwise the normal approximation with
/// tie-corrected variance and a continuity correction of one half.
pub fn rank_sum(a: &[f64], b: &[f64]) -> Result<RankSumResult> {
    rank_sum_with(a, b, false)
}

/// Rank-sum test that always uses the normal approximation.
pub fn rank_sum_normal(a: &[f64], b: &[f64]) -> Result<RankSumResult> {
    rank_sum_with(a, b, true)
}

fn rank_sum_with(a: &[f64], b: &[f64], force_normal: bool) -> Result<RankSumResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("rank-sum sample"));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::out_of_range("rank-sum samples must be finite"));
    }
    let (m, n) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let rank_a: f64 = ranks[..m].iter().sum();
    let u = rank_a - (m * (m + 1)) as f64 / 2.0;
    let mn = (m * n) as f64;
    let u_other = mn - u;
    let tied = ties.iter().any(|&t| t > 1);

    if !force_normal && !tied && m <= EXACT_MAX_SIZE && n <= EXACT_MAX_SIZE {
        let dist = u_distribution(m, n);
        let total: f64 = dist.iter().sum();
        let k = u.round() as usize;
        let lower: f64 = dist[..=k].iter().sum::<f64>() / total;
        let upper: f64 = dist[k..].iter().sum::<f64>() / total;
        return Ok(RankSumResult {
            u,
            u_other,
            p_value: (2.0 * lower.min(upper)).min(1.0),
            method: PValueMethod::Exact,
        });
    }

    let big_n = (m + n) as f64;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>();
    let variance = mn / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
    let p_value = if variance <= 0.0 {
        1.0
    } else {
        let z = ((u - mn / 2.0).abs() - 0.5).max(0.0) / variance.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        (2.0 * normal.sf(z)).min(1.0)
    };
    Ok(RankSumResult {
        u,
        u_other,
        p_value,
        method: PValueMethod::Normal,
    })
}

/// Recipe for one synthetic condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SyntheticCondition {
    /// Whole-unit contributions: a share contributes nothing, a share
    /// everything, the rest an interior amount chosen so that the expected
    /// mean is `mean`.
    Pgg {
        label: String,
        subjects: usize,
        free_share: f64,
        full_share: f64,
        mean: f64,
    },
    Npd {
        label: String,
        subjects: usize,
        cooperate_share: f64,
    },
}

/// Conditions shaped like the small and large public goods conditions.
pub fn default_synthetic_pgg() -> Vec<SyntheticCondition> {
    vec![
        SyntheticCondition::Pgg {
            label: "S".into(),
            subjects: 62,
            free_share: 0.4838,
            full_share: 0.3064,
            mean: 3.92,
        },
        SyntheticCondition::Pgg {
            label: "L".into(),
            subjects: 66,
            free_share: 0.2121,
            full_share: 0.6060,
            mean: 6.91,
        },
    ]
}

/// Conditions shaped like the small and large prisoner's dilemma conditions.
pub fn default_synthetic_npd() -> Vec<SyntheticCondition> {
    vec![
        SyntheticCondition::Npd {
            label: "S".into(),
            subjects: 75,
            cooperate_share: 0.4133,
        },
        SyntheticCondition::Npd {
            label: "L".into(),
            subjects: 78,
            cooperate_share: 0.2564,
        },
    ]
}

/// Draws a dataset per condition from a seeded generator. PGG endowments
/// must be whole numbers of at least 2.
pub fn synthetic_datasets(
    conditions: &[SyntheticCondition],
    endowment: f64,
    seed: u64,
) -> Result<Vec<DecisionDataset>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(conditions.len());
    for cond in conditions {
        let ds = match cond {
            SyntheticCondition::Pgg {
                label,
                subjects,
                free_share,
                full_share,
                mean,
            } => {
                if endowment.fract() != 0.0 || endowment < 2.0 {
                    return Err(Error::out_of_range(format!(
                        "synthetic endowment must be a whole number >= 2, got {endowment}"
                    )));
                }
                let interior = 1.0 - free_share - full_share;
                if !(0.0..=1.0).contains(free_share)
                    || !(0.0..=1.0).contains(full_share)
                    || interior < 0.0
                {
                    return Err(Error::out_of_range("free and full shares must sum to at most 1"));
                }
                let slots = endowment as u32 - 2;
                let mid_mean = if interior > 0.0 {
                    (mean - full_share * endowment) / interior
                } else {
                    1.0
                };
                let q = if slots > 0 {
                    ((mid_mean - 1.0) / slots as f64).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let decisions = (0..*subjects)
                    .map(|_| {
                        let r: f64 = rng.gen();
                        if r < *free_share {
                            0.0
                        } else if r < free_share + full_share {
                            endowment
                        } else {
                            1.0 + (0..slots).filter(|_| rng.gen_bool(q)).count() as f64
                        }
                    })
                    .collect();
                DecisionDataset {
                    condition: label.clone(),
                    variant: Variant::Pgg,
                    endowment,
                    decisions,
                    metadata: vec![BTreeMap::new(); *subjects],
                }
            }
            SyntheticCondition::Npd {
                label,
                subjects,
                cooperate_share,
            } => {
                if !(0.0..=1.0).contains(cooperate_share) {
                    return Err(Error::out_of_range("cooperation share must lie in [0, 1]"));
                }
                let decisions = (0..*subjects)
                    .map(|_| rng.gen_bool(*cooperate_share) as u8 as f64)
                    .collect();
                DecisionDataset {
                    condition: label.clone(),
                    variant: Variant::Npd,
                    endowment,
                    decisions,
                    metadata: vec![BTreeMap::new(); *subjects],
                }
            }
        };
        if ds.decisions.is_empty() {
            return Err(Error::Empty("synthetic condition"));
        }
        out.push(ds);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pgg(decisions: &[f64]) -> DecisionDataset {
        DecisionDataset {
            condition: "x".into(),
            variant: Variant::Pgg,
            endowment: 10.0,
            decisions: decisions.to_vec(),
            metadata: vec![BTreeMap::new(); decisions.len()],
        }
    }

    #[test]
    fn summary_fixture() {
        let s = summarize(&pgg(&[0.0, 0.0, 10.0, 10.0, 5.0, 5.0, 5.0, 5.0])).unwrap();
        assert_eq!(s.mean, 5.0);
        assert_abs_diff_eq!(s.sem, 1.3363, epsilon = 1e-4);
        assert_eq!(s.pct_free_riders, Some(25.0));
        assert_eq!(s.pct_full_contributors, Some(25.0));
        assert_eq!(s.pct_cooperators, None);
    }

    #[test]
    fn summary_trivial_cases() {
        let s = summarize(&pgg(&[0.0; 5])).unwrap();
        assert_eq!((s.pct_free_riders, s.mean, s.sem), (Some(100.0), 0.0, 0.0));
        let npd = DecisionDataset {
            variant: Variant::Npd,
            ..pgg(&[1.0, 1.0, 0.0, 0.0])
        };
        assert_eq!(summarize(&npd).unwrap().pct_cooperators, Some(50.0));
        assert_eq!(summarize(&pgg(&[])).unwrap_err(), Error::Empty("decision dataset"));
    }

    #[test]
    fn rank_sum_examples() {
        let r = rank_sum(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(r.u, 0.0);
        assert_eq!(r.method, PValueMethod::Exact);
        assert_abs_diff_eq!(r.p_value, 1.0 / 3.0, epsilon = 1e-15);
        let same = [1.0, 2.0, 2.0, 5.0];
        let r = rank_sum(&same, &same).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.u, 8.0);
        assert!(rank_sum(&[], &[1.0]).is_err());
    }

    #[test]
    fn u_distribution_sums_to_binomial() {
        for m in 1..=8 {
            for n in 1..=8 {
                let d = u_distribution(m, n);
                let total: f64 = d.iter().sum();
                let expect = (0..m).fold(1.0, |acc, i| acc * (m + n - i) as f64 / (i + 1) as f64);
                assert_abs_diff_eq!(total, expect.round(), epsilon = 1e-9);
                for u in 0..d.len() {
                    assert_eq!(d[u], d[d.len() - 1 - u]);
                }
            }
        }
    }

    #[test]
    fn parse_and_group() {
        let text = "condition,variant,decision,age\nS,pgg,3,20\nL,pgg,10,31\nS,pgg,0,44\n";
        let ds = read_datasets(text.as_bytes(), 10.0).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds[0].condition, "S");
        assert_eq!(ds[0].decisions, vec![3.0, 0.0]);
        assert_eq!(ds[0].metadata[1]["age"], "44");
        let npd = "condition,variant,decision\nS,npd,C\nS,npd,defect\nS,npd,1\n";
        let ds = read_datasets(npd.as_bytes(), 10.0).unwrap();
        assert_eq!(ds[0].decisions, vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let text = "condition,variant,decision\nS,pgg,3\nS,pgg,11\n";
        assert!(matches!(
            read_datasets(text.as_bytes(), 10.0).unwrap_err(),
            Error::Parse { line: 3, .. }
        ));
        let text = "condition,variant,decision\nS,npd,maybe\n";
        assert!(matches!(
            read_datasets(text.as_bytes(), 10.0).unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        assert!(matches!(
            read_datasets("condition,variant\n".as_bytes(), 10.0).unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert_eq!(
            read_datasets("condition,variant,decision\n".as_bytes(), 10.0).unwrap_err(),
            Error::Empty("decision file")
        );
    }

    #[test]
    fn synthetic_round_trip_and_determinism() {
        let a = synthetic_datasets(&default_synthetic_pgg(), 10.0, 3).unwrap();
        let b = synthetic_datasets(&default_synthetic_pgg(), 10.0, 3).unwrap();
        assert_eq!(a, b);
        let mut buf = Vec::new();
        write_datasets(&mut buf, &a).unwrap();
        let back = read_datasets(buf.as_slice(), 10.0).unwrap();
        assert_eq!(back.len(), 2);
        for (x, y) in a.iter().zip(&back) {
            assert_eq!(x.decisions, y.decisions);
        }
    }

    #[test]
    fn synthetic_groups_differ() {
        let ds = synthetic_datasets(&default_synthetic_pgg(), 10.0, 2015).unwrap();
        let s = summarize(&ds[0]).unwrap();
        let l = summarize(&ds[1]).unwrap();
        assert!(s.mean < l.mean);
        assert!(rank_sum(&ds[0].decisions, &ds[1].decisions).unwrap().p_value < 0.01);
    }

    proptest! {
        #[test]
        fn label_symmetry(
            a in prop::collection::vec(0u8..12, 1..15),
            b in prop::collection::vec(0u8..12, 1..15),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let ab = rank_sum(&a, &b).unwrap();
            let ba = rank_sum(&b, &a).unwrap();
            prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
            prop_assert_eq!(ab.u, ba.u_other);
            prop_assert_eq!(ab.u + ab.u_other, (a.len() * b.len()) as f64);
        }

        #[test]
        fn shifting_the_larger_sample_up_does_not_raise_p(
            a in prop::collection::vec(0.0f64..1.0, 2..12),
            b in prop::collection::vec(0.0f64..1.0, 2..12),
            shift in 0.0f64..1.0,
        ) {
            let ab = rank_sum(&a, &b).unwrap();
            prop_assume!(ab.u_other >= ab.u);
            let moved: Vec<f64> = b.iter().map(|x| x + shift).collect();
            let after = rank_sum(&a, &moved).unwrap();
            prop_assert!(after.u_other >= ab.u_other);
            prop_assert!(after.p_value <= ab.p_value + 1e-12);
        }
    }
}
