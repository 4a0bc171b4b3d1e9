//! Physics surrogate for the three-story bumper-gap benchmark.
//!
//! The structure is modeled as a 4-DOF shear building: base plate plus three
//! floors, each a lumped mass, coupled by story stiffnesses from four
//! parallel aluminium columns in fixed-fixed bending. The base rides on a
//! soft grounding spring that stands in for the rails and keeps the
//! rigid-body-like mode well below the 20 Hz lower edge of the excitation
//! band. Damage is a one-sided penalty contact between the top floor and the
//! floor below it: a suspended column meets a bumper once their relative
//! displacement exceeds the configured gap.
//!
//! Trials reproduce the benchmark's acquisition chain: band-limited random
//! base force, internal integration at 2560 Hz, anti-alias filtering, and
//! decimation to 8192 samples at 320 Hz over 25.6 s.

mod calibration;
mod dataset;
mod excitation;
mod integrate;
mod modal;

pub use calibration::{
    build_params, calibrate_baseline, state_by_id, state_catalogue, CalibrationRecord,
    MassLocation, StateCondition, BUMPER_STIFFNESS_FACTOR, SHAKER_NEWTONS_PER_VOLT,
    SHAKER_VOLTS_RMS,
};
pub use dataset::{generate_dataset, write_trial_csv, DatasetConfig, TRIAL_HEADER};
pub use excitation::{generate_excitation, ExcitationConfig};
pub use integrate::{simulate_response, simulate_trial, RawResponse, STANDARD_GRAVITY_MS2};
pub use modal::{chain_frequencies, chain_matrices, modal_analysis, modal_report, ModalResult};

use crate::error::{Error, Result};

pub const DOF: usize = 4;
pub const STORY_COUNT: usize = 3;

/// One-sided contact between the top floor and the floor below: engages when
/// `x4 - x3` exceeds the gap, with a stiff penalty spring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bumper {
    pub gap_m: f64,
    pub stiffness_n_per_m: f64,
}

/// Physical parameters of the 4-DOF surrogate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureParams {
    /// Lumped masses in kg: base, floor 1, floor 2, floor 3.
    pub masses: [f64; DOF],
    /// Story stiffnesses in N/m: base-floor1, floor1-floor2, floor2-floor3.
    pub story_stiffness: [f64; STORY_COUNT],
    /// Soft spring from ground to the base plate (rail surrogate), N/m.
    pub ground_stiffness: f64,
    /// Rayleigh damping `C = a0*M + a1*K`.
    pub rayleigh_a0: f64,
    pub rayleigh_a1: f64,
    pub bumper: Option<Bumper>,
}

impl StructureParams {
    pub fn validate(&self) -> Result<()> {
        for (i, m) in self.masses.iter().enumerate() {
            if !(*m > 0.0) {
                return Err(Error::Config(format!("mass {} must be positive, got {m}", i + 1)));
            }
        }
        for (i, k) in self.story_stiffness.iter().enumerate() {
            if !(*k > 0.0) {
                return Err(Error::Config(format!(
                    "story stiffness {} must be positive, got {k}",
                    i + 1
                )));
            }
        }
        if !(self.ground_stiffness > 0.0) {
            return Err(Error::Config(format!(
                "ground stiffness must be positive, got {}",
                self.ground_stiffness
            )));
        }
        if let Some(b) = &self.bumper {
            if b.gap_m < 0.0 || !(b.stiffness_n_per_m > 0.0) {
                return Err(Error::Config(format!(
                    "bumper needs gap >= 0 and positive stiffness, got gap {} and k {}",
                    b.gap_m, b.stiffness_n_per_m
                )));
            }
        }
        Ok(())
    }

    /// Same structure with the contact removed; used for the linear
    /// reference runs damage severity is measured against.
    pub fn without_bumper(&self) -> Self {
        Self {
            bumper: None,
            ..*self
        }
    }

    /// Spring chain from the ground up: `[ground, story1, story2, story3]`.
    pub fn spring_chain(&self) -> [f64; DOF] {
        [
            self.ground_stiffness,
            self.story_stiffness[0],
            self.story_stiffness[1],
            self.story_stiffness[2],
        ]
    }
}

/// One simulated experiment: the applied force channel and four acceleration
/// channels at 320 Hz, 8192 samples each.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub state: u8,
    pub trial: u32,
    pub seed: u64,
    /// Channel 1: applied base force in N.
    pub force_n: Vec<f64>,
    /// Channels 2-5: accelerations in g for base and floors 1-3.
    pub accel_g: [Vec<f64>; DOF],
}

impl TrialRecord {
    pub fn len(&self) -> usize {
        self.force_n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.force_n.is_empty()
    }

    pub fn time_s(&self, sample_idx: usize) -> f64 {
        sample_idx as f64 / excitation::OUTPUT_RATE_HZ
    }

    pub fn is_finite(&self) -> bool {
        self.force_n.iter().all(|v| v.is_finite())
            && self.accel_g.iter().all(|ch| ch.iter().all(|v| v.is_finite()))
    }
}
