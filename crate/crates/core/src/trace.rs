//! Per-update optimization records.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gates::GateKind;
use crate::two_gate::PairingStrategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Fraxis,
    Fqs,
    Tgf,
    Tgfqs,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 4] = [
        OptimizerKind::Fraxis,
        OptimizerKind::Fqs,
        OptimizerKind::Tgf,
        OptimizerKind::Tgfqs,
    ];

    pub fn gate_kind(self) -> GateKind {
        match self {
            OptimizerKind::Fraxis | OptimizerKind::Tgf => GateKind::Axis,
            OptimizerKind::Fqs | OptimizerKind::Tgfqs => GateKind::Quaternion,
        }
    }

    pub fn is_two_gate(self) -> bool {
        matches!(self, OptimizerKind::Tgf | OptimizerKind::Tgfqs)
    }

    /// Tomography evaluations for one update (one gate, or one pair).
    pub fn tomography_per_update(self) -> u64 {
        let single = self.gate_kind().num_insertions() as u64;
        if self.is_two_gate() {
            single * single
        } else {
            single
        }
    }

    /// The single-gate optimizer a two-gate optimizer extends.
    pub fn baseline(self) -> OptimizerKind {
        match self {
            OptimizerKind::Tgf => OptimizerKind::Fraxis,
            OptimizerKind::Tgfqs => OptimizerKind::Fqs,
            other => other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Fraxis => "fraxis",
            OptimizerKind::Fqs => "fqs",
            OptimizerKind::Tgf => "tgf",
            OptimizerKind::Tgfqs => "tgfqs",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        OptimizerKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::config(format!("unknown optimizer {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateRecord {
    /// 1-based, counting gate updates (single-gate) or pair updates.
    pub update_index: usize,
    /// 1-based iteration the update belongs to.
    pub iteration: usize,
    /// Gate indices touched by this update.
    pub sites: Vec<usize>,
    /// Noise-free cost of the parameters after the update.
    pub cost: f64,
    /// Cost value carried forward for acceptance decisions (noisy in shot mode).
    pub tracked_cost: f64,
    /// Measured cost of the proposed parameters.
    pub candidate_cost: f64,
    /// Value the local model predicted for the proposal.
    pub model_cost: f64,
    pub accepted: bool,
    pub tomography_evals: u64,
    pub tracking_evals: u64,
    /// Evaluations since the start of the run, this update included.
    pub cumulative_evals: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub run_id: usize,
    pub seed: u64,
    pub optimizer: OptimizerKind,
    pub strategy: Option<PairingStrategy>,
    pub initial_cost: f64,
    pub initial_tracked_cost: f64,
    pub initial_tracking_evals: u64,
    pub records: Vec<UpdateRecord>,
    /// Noise-free cost after each completed iteration.
    pub iteration_costs: Vec<f64>,
}

impl RunTrace {
    pub fn new(run_id: usize, seed: u64, optimizer: OptimizerKind, strategy: Option<PairingStrategy>) -> Self {
        Self {
            run_id,
            seed,
            optimizer,
            strategy,
            initial_cost: f64::NAN,
            initial_tracked_cost: f64::NAN,
            initial_tracking_evals: 0,
            records: Vec::new(),
            iteration_costs: Vec::new(),
        }
    }

    pub fn final_cost(&self) -> f64 {
        self.records.last().map_or(self.initial_cost, |r| r.cost)
    }

    pub fn total_evals(&self) -> u64 {
        self.records
            .last()
            .map_or(self.initial_tracking_evals, |r| r.cumulative_evals)
    }
}
