use serde::{Deserialize, Serialize};

use super::SpectrumResult;
use crate::error::{Error, Result};

/// Default width of the outlier fence, in interquartile ranges.
pub const OUTLIER_IQR_MULTIPLIER: f64 = 3.0;
/// Default clustering tolerance for degenerate gaps, eV.
pub const DEGENERACY_TOL: f64 = 0.05;
/// Multiplet pattern of the seven gaps at Γ.
pub const GAMMA_MULTIPLICITIES: [usize; 3] = [3, 1, 3];

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation; zero for fewer than two values.
fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Flags samples outside `median ± multiplier·IQR`.
///
/// Fewer than four samples cannot support a quartile estimate and yield an
/// all-false mask. A zero IQR flags nothing.
pub fn detect_outliers(samples: &[f64], multiplier: f64) -> Vec<bool> {
    if samples.len() < 4 {
        log::warn!("outlier detection needs at least 4 samples, got {}; nothing flagged", samples.len());
        return vec![false; samples.len()];
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    if iqr <= 0.0 {
        return vec![false; samples.len()];
    }
    let median = quantile(&sorted, 0.5);
    samples.iter().map(|x| (x - median).abs() > multiplier * iqr).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapStatistics {
    pub index: usize,
    pub samples: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub outliers: Vec<bool>,
    /// Mean and spread of the unflagged samples, when filtering was requested.
    pub filtered_mean: Option<f64>,
    pub filtered_std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStatistics {
    pub trials: usize,
    pub gaps: Vec<GapStatistics>,
    pub filtered: bool,
    /// Trials that produced fewer gaps than expected.
    pub shortfall_trials: usize,
}

impl TrialStatistics {
    pub fn means(&self) -> Vec<f64> {
        self.gaps.iter().map(|g| g.mean).collect()
    }

    pub fn stds(&self) -> Vec<f64> {
        self.gaps.iter().map(|g| g.std).collect()
    }
}

/// Per-gap statistics across trials, in input order.
///
/// Gap `i` collects the `i`-th sorted gap of each trial that has one. With
/// `outlier_multiplier` set, each gap also carries the statistics of its
/// unflagged samples.
pub fn aggregate_trials(results: &[SpectrumResult], outlier_multiplier: Option<f64>) -> Result<TrialStatistics> {
    let first = results.first().ok_or_else(|| Error::input("no trials to aggregate"))?;
    if let Some(other) = results.iter().find(|r| !r.metadata.same_run(&first.metadata)) {
        return Err(Error::input(format!(
            "trial metadata differs: {:?} vs {:?}",
            first.metadata.k, other.metadata.k
        )));
    }
    let width = results.iter().map(|r| r.gaps.len()).max().unwrap_or(0);
    let gaps = (0..width)
        .map(|index| {
            let samples: Vec<f64> = results.iter().filter_map(|r| r.gaps.get(index).copied()).collect();
            let (outliers, filtered_mean, filtered_std) = match outlier_multiplier {
                Some(mult) => {
                    let mask = detect_outliers(&samples, mult);
                    let kept: Vec<f64> = samples.iter().zip(&mask).filter(|(_, &o)| !o).map(|(x, _)| *x).collect();
                    (mask, Some(mean(&kept)), Some(std_dev(&kept)))
                }
                None => (vec![false; samples.len()], None, None),
            };
            GapStatistics { index, mean: mean(&samples), std: std_dev(&samples), samples, outliers, filtered_mean, filtered_std }
        })
        .collect();
    Ok(TrialStatistics {
        trials: results.len(),
        gaps,
        filtered: outlier_multiplier.is_some(),
        shortfall_trials: results.iter().filter(|r| r.shortfall).count(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Grouping {
    Multiplicities(Vec<usize>),
    Tolerance(f64),
}

impl Default for Grouping {
    fn default() -> Self {
        Grouping::Multiplicities(GAMMA_MULTIPLICITIES.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedGaps {
    /// `(start, len)` of each group in the input.
    pub groups: Vec<(usize, usize)>,
    pub means: Vec<f64>,
    /// Input with every gap replaced by its group mean.
    pub values: Vec<f64>,
}

/// Averages runs of (nearly) degenerate gaps.
///
/// Groups come either from an explicit multiplicity pattern or by chaining
/// sorted gaps whose neighbours lie within the tolerance.
pub fn group_degenerate(gaps: &[f64], grouping: &Grouping) -> Result<GroupedGaps> {
    let sizes: Vec<usize> = match grouping {
        Grouping::Multiplicities(m) => {
            if m.iter().sum::<usize>() != gaps.len() || m.contains(&0) {
                return Err(Error::input(format!("multiplicities {m:?} do not partition {} gaps", gaps.len())));
            }
            m.clone()
        }
        Grouping::Tolerance(tol) => {
            if !(tol.is_finite() && *tol >= 0.0) {
                return Err(Error::input(format!("bad clustering tolerance {tol}")));
            }
            let mut sizes = Vec::new();
            for (i, g) in gaps.iter().enumerate() {
                match sizes.last_mut() {
                    Some(size) if i > 0 && (g - gaps[i - 1]).abs() <= *tol => *size += 1,
                    _ => sizes.push(1),
                }
            }
            sizes
        }
    };
    let mut groups = Vec::with_capacity(sizes.len());
    let mut means = Vec::with_capacity(sizes.len());
    let mut values = Vec::with_capacity(gaps.len());
    let mut start = 0;
    for len in sizes {
        let m = mean(&gaps[start..start + len]);
        groups.push((start, len));
        means.push(m);
        values.extend(std::iter::repeat_n(m, len));
        start += len;
    }
    Ok(GroupedGaps { groups, means, values })
}
