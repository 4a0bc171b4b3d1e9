//! Tabular preprocessing: imputation, normalization, reshaping, splitting.
//!
//! The model consumes one row per recorded time instant: five sensor
//! channels plus the timestamp, in the fixed feature order
//! `[ch1, ch2, ch3, ch4, ch5, time_s]`. Imputation and normalization
//! statistics are fitted on the training partition only and reused verbatim
//! for test and prediction data; splits assign whole trials to one side so
//! correlated rows never leak across the boundary.

mod io;

pub use io::{
    read_dataset_csv, read_feature_rows_csv, read_stats, stats_to_string, write_dataset_csv,
    write_stats, DATASET_HEADER, STATS_MAGIC,
};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::FeatureMap;

pub const FEATURE_COUNT: usize = 6;
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = ["ch1", "ch2", "ch3", "ch4", "ch5", "time_s"];

/// Number of structural state conditions in the benchmark catalogue.
pub const STATE_COUNT: u8 = 17;

/// Ground-truth label for a state id: 1-9 undamaged (0), 10-17 damaged (1).
pub fn label_for_state(state: u8) -> Option<u8> {
    match state {
        1..=9 => Some(0),
        10..=17 => Some(1),
        _ => None,
    }
}

/// One recorded time instant of one trial. `None` cells are missing values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    pub state: u8,
    pub trial: u32,
    pub sample_idx: u32,
    /// Feature values in `[ch1..ch5, time_s]` order.
    pub features: [Option<f64>; FEATURE_COUNT],
    pub label: u8,
}

impl SampleRow {
    pub fn time_s(&self) -> Option<f64> {
        self.features[5]
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleTable {
    pub rows: Vec<SampleRow>,
}

impl SampleTable {
    pub fn new(rows: Vec<SampleRow>) -> Self {
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Validate the dataset invariants: known state ids, Table-1-consistent
    /// binary labels, and time stamps in [0, 25.6) when present.
    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            let expected = label_for_state(row.state).ok_or_else(|| {
                Error::Data(format!("row {i}: unknown state id {}", row.state))
            })?;
            if row.label > 1 {
                return Err(Error::Data(format!(
                    "row {i}: non-binary label {}",
                    row.label
                )));
            }
            if row.label != expected {
                return Err(Error::Data(format!(
                    "row {i}: state {} must carry label {expected}, got {}",
                    row.state, row.label
                )));
            }
            if let Some(t) = row.time_s() {
                if !(0.0..25.6).contains(&t) {
                    return Err(Error::Data(format!(
                        "row {i}: time {t} s outside [0, 25.6)"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Per-feature mean of the observed (non-missing) values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImputeStats {
    pub means: [f64; FEATURE_COUNT],
}

/// Per-feature min/max over the fitting partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormStats {
    pub min: [f64; FEATURE_COUNT],
    pub max: [f64; FEATURE_COUNT],
}

pub fn fit_imputer(table: &SampleTable) -> Result<ImputeStats> {
    let mut sums = [0.0; FEATURE_COUNT];
    let mut counts = [0usize; FEATURE_COUNT];
    for row in &table.rows {
        for (j, cell) in row.features.iter().enumerate() {
            if let Some(v) = cell {
                sums[j] += v;
                counts[j] += 1;
            }
        }
    }
    let mut means = [0.0; FEATURE_COUNT];
    for j in 0..FEATURE_COUNT {
        if counts[j] == 0 {
            return Err(Error::Data(format!(
                "feature `{}` has no observed values to impute from",
                FEATURE_NAMES[j]
            )));
        }
        means[j] = sums[j] / counts[j] as f64;
        if !means[j].is_finite() {
            return Err(Error::Data(format!(
                "feature `{}` mean is not finite",
                FEATURE_NAMES[j]
            )));
        }
    }
    Ok(ImputeStats { means })
}

/// Fill missing cells with the fitted means; observed cells are unchanged.
pub fn apply_imputer(table: &SampleTable, stats: &ImputeStats) -> SampleTable {
    let rows = table
        .rows
        .iter()
        .map(|row| {
            let mut row = row.clone();
            for (cell, mean) in row.features.iter_mut().zip(stats.means) {
                if cell.is_none() {
                    *cell = Some(mean);
                }
            }
            row
        })
        .collect();
    SampleTable::new(rows)
}

pub fn fit_normalizer(table: &SampleTable) -> Result<NormStats> {
    let mut min = [f64::INFINITY; FEATURE_COUNT];
    let mut max = [f64::NEG_INFINITY; FEATURE_COUNT];
    for (i, row) in table.rows.iter().enumerate() {
        for (j, cell) in row.features.iter().enumerate() {
            let v = cell.ok_or_else(|| {
                Error::Usage(format!(
                    "normalizer fitted on unimputed table: row {i} feature `{}` missing",
                    FEATURE_NAMES[j]
                ))
            })?;
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    if table.rows.is_empty() {
        return Err(Error::Usage("cannot fit normalizer on an empty table".into()));
    }
    Ok(NormStats { min, max })
}

/// Min/max scaling `(x - min) / (max - min)`. A degenerate feature
/// (max == min) maps to 0. Values outside the fitted range are allowed and
/// land outside [0, 1].
pub fn apply_normalizer(table: &SampleTable, stats: &NormStats) -> SampleTable {
    let rows = table
        .rows
        .iter()
        .map(|row| {
            let mut row = row.clone();
            for (j, cell) in row.features.iter_mut().enumerate() {
                if let Some(v) = cell {
                    let range = stats.max[j] - stats.min[j];
                    *v = if range == 0.0 {
                        0.0
                    } else {
                        (*v - stats.min[j]) / range
                    };
                }
            }
            row
        })
        .collect();
    SampleTable::new(rows)
}

/// Reshape a complete, normalized row into the network's (6, 1) input.
/// Feature order is `[ch1, ch2, ch3, ch4, ch5, time_s]`; the convolution
/// kernel spans adjacent features, so this order is part of the model
/// contract.
pub fn reshape_sample(row: &SampleRow) -> Result<FeatureMap> {
    let mut values = Vec::with_capacity(FEATURE_COUNT);
    for (j, cell) in row.features.iter().enumerate() {
        let v = cell.ok_or_else(|| {
            Error::Data(format!(
                "cannot reshape row with missing feature `{}` (impute first)",
                FEATURE_NAMES[j]
            ))
        })?;
        values.push(v);
    }
    FeatureMap::from_single_channel(values)
}

/// How to partition a table: by whole trials, stratified per state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.7,
            seed: 0,
        }
    }
}

/// Stratified trial-atomic split. Within each state the trial ids are
/// shuffled with the seeded generator and the first
/// `round(fraction * n)` trials (clamped so both sides stay non-empty) go
/// to train. A state with fewer than two trials goes entirely to train with
/// a warning.
pub fn split(table: &SampleTable, spec: &SplitSpec) -> Result<(SampleTable, SampleTable)> {
    if table.is_empty() {
        return Err(Error::Usage("cannot split an empty table".into()));
    }
    if !(0.0..=1.0).contains(&spec.train_fraction) {
        return Err(Error::Config(format!(
            "train fraction must be in [0, 1], got {}",
            spec.train_fraction
        )));
    }

    // state -> sorted unique trial ids, states in ascending order.
    let mut states: Vec<u8> = table.rows.iter().map(|r| r.state).collect();
    states.sort_unstable();
    states.dedup();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train_trials: std::collections::BTreeSet<(u8, u32)> = std::collections::BTreeSet::new();

    for &state in &states {
        let mut trials: Vec<u32> = table
            .rows
            .iter()
            .filter(|r| r.state == state)
            .map(|r| r.trial)
            .collect();
        trials.sort_unstable();
        trials.dedup();

        if trials.len() < 2 {
            log::warn!(
                "state {state} has {} trial(s); assigning every row to the training partition",
                trials.len()
            );
            for t in trials {
                train_trials.insert((state, t));
            }
            continue;
        }

        trials.shuffle(&mut rng);
        let n = trials.len();
        let n_train = ((spec.train_fraction * n as f64).round() as usize).clamp(1, n - 1);
        for &t in &trials[..n_train] {
            train_trials.insert((state, t));
        }
    }

    let mut train_rows = Vec::new();
    let mut test_rows = Vec::new();
    for row in &table.rows {
        if train_trials.contains(&(row.state, row.trial)) {
            train_rows.push(row.clone());
        } else {
            test_rows.push(row.clone());
        }
    }
    Ok((SampleTable::new(train_rows), SampleTable::new(test_rows)))
}
