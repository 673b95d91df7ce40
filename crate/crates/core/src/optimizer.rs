//! The sweep state shared by all four optimizers and the run driver.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::{run_circuit, AnsatzSpec, Circuit, GateSite, ParameterSet};
use crate::cost::{CostFunction, EvalKind, Evaluator};
use crate::error::{Error, Result};
use crate::gates::UnitQuaternion;
use crate::pauli::Shots;
use crate::single_gate::single_gate_sweep;
use crate::statevector::StateVector;
use crate::trace::{OptimizerKind, RunTrace, UpdateRecord};
use crate::two_gate::{two_gate_sweep, MinimizerSettings, PairingStrategy};

/// Independent random streams of one run. Each is a ChaCha20 generator on
/// the run seed with its own stream id, so e.g. the pairing sequence does not
/// depend on whether shot noise is drawn.
#[derive(Debug, Clone)]
pub struct RunStreams {
    pub init: ChaCha20Rng,
    pub pairing: ChaCha20Rng,
    pub shots: ChaCha20Rng,
    pub minimizer: ChaCha20Rng,
}

pub(crate) const STREAM_INIT: u64 = 1;
pub(crate) const STREAM_PAIRING: u64 = 2;
pub(crate) const STREAM_SHOTS: u64 = 3;
pub(crate) const STREAM_MINIMIZER: u64 = 4;
pub(crate) const STREAM_TARGET: u64 = 5;

pub(crate) fn stream(seed: u64, id: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

impl RunStreams {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            init: stream(seed, STREAM_INIT),
            pairing: stream(seed, STREAM_PAIRING),
            shots: stream(seed, STREAM_SHOTS),
            minimizer: stream(seed, STREAM_MINIMIZER),
        }
    }
}

/// Current parameters, the counting evaluator and the trace being written.
///
/// The tracked cost is the measured value every acceptance compares against;
/// in exact mode it is the true cost, in shot mode a noisy estimate. The
/// noise-free cost of the current parameters is recorded alongside it.
pub struct SweepContext<'a> {
    spec: AnsatzSpec,
    circuit: Circuit,
    params: ParameterSet,
    evaluator: Evaluator<'a>,
    trace: RunTrace,
    tracked: f64,
    current: f64,
    iteration: usize,
}

impl<'a> SweepContext<'a> {
    /// Measures the starting parameters once (a tracking evaluation).
    pub fn new(
        spec: AnsatzSpec,
        params: ParameterSet,
        mut evaluator: Evaluator<'a>,
        mut trace: RunTrace,
    ) -> Result<Self> {
        if evaluator.cost().num_qubits() != spec.num_qubits() {
            return Err(Error::shape(format!(
                "cost acts on {} qubits, ansatz has {}",
                evaluator.cost().num_qubits(),
                spec.num_qubits()
            )));
        }
        let state = run_circuit(&spec, &params)?;
        let tracked = evaluator.measure(&state, EvalKind::Tracking)?;
        let current = true_cost(&evaluator, &state, tracked)?;
        trace.initial_cost = current;
        trace.initial_tracked_cost = tracked;
        trace.initial_tracking_evals = evaluator.tracking_evals();
        Ok(Self {
            circuit: Circuit::new(&spec),
            spec,
            params,
            evaluator,
            trace,
            tracked,
            current,
            iteration: 0,
        })
    }

    pub fn spec(&self) -> &AnsatzSpec {
        &self.spec
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn evaluator(&self) -> &Evaluator<'a> {
        &self.evaluator
    }

    pub fn trace(&self) -> &RunTrace {
        &self.trace
    }

    pub fn tracked_cost(&self) -> f64 {
        self.tracked
    }

    /// Noise-free cost of the current parameters.
    pub fn current_cost(&self) -> f64 {
        self.current
    }

    pub fn into_parts(self) -> (ParameterSet, RunTrace) {
        (self.params, self.trace)
    }

    pub(crate) fn parts_mut(&mut self) -> (&Circuit, &ParameterSet, &mut Evaluator<'a>) {
        (&self.circuit, &self.params, &mut self.evaluator)
    }

    pub fn begin_iteration(&mut self) {
        self.iteration += 1;
    }

    pub fn end_iteration(&mut self) {
        self.trace.iteration_costs.push(self.current);
    }

    /// Measures the parameters with `proposal` substituted and keeps them if
    /// the measured cost is strictly below the tracked cost. Tomography spent
    /// since `tomo_before` is charged to this update.
    pub(crate) fn propose(
        &mut self,
        proposal: &[(GateSite, UnitQuaternion)],
        model_cost: f64,
        tomo_before: u64,
    ) -> Result<bool> {
        let mut candidate = self.params.clone();
        for &(site, q) in proposal {
            candidate.set(site, q);
        }
        let mut state = StateVector::zero(self.spec.num_qubits())?;
        self.circuit.apply_range(&mut state, &candidate, 0..self.circuit.len());
        let candidate_cost = self.evaluator.measure(&state, EvalKind::Tracking)?;
        let accepted = candidate_cost < self.tracked;
        if accepted {
            self.params = candidate;
            self.tracked = candidate_cost;
            self.current = true_cost(&self.evaluator, &state, candidate_cost)?;
        }
        let tomography_evals = self.evaluator.tomography_evals() - tomo_before;
        self.trace.records.push(UpdateRecord {
            update_index: self.trace.records.len() + 1,
            iteration: self.iteration,
            sites: proposal.iter().map(|(s, _)| s.index()).collect(),
            cost: self.current,
            tracked_cost: self.tracked,
            candidate_cost,
            model_cost,
            accepted,
            tomography_evals,
            tracking_evals: 1,
            cumulative_evals: self.evaluator.total_evals(),
        });
        Ok(accepted)
    }
}

fn true_cost(evaluator: &Evaluator<'_>, state: &StateVector, measured: f64) -> Result<f64> {
    if evaluator.shots().is_exact() {
        Ok(measured)
    } else {
        evaluator.cost().exact(state)
    }
}

/// What to run: optimizer, pairing (two-gate only), iterations and shots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub optimizer: OptimizerKind,
    pub strategy: Option<PairingStrategy>,
    pub iterations: usize,
    pub shots: Shots,
    #[serde(default)]
    pub minimizer: MinimizerSettings,
}

impl RunSettings {
    pub fn new(optimizer: OptimizerKind, iterations: usize) -> Self {
        Self {
            optimizer,
            strategy: optimizer.is_two_gate().then_some(PairingStrategy::Random),
            iterations,
            shots: Shots::Exact,
            minimizer: MinimizerSettings::default(),
        }
    }

    pub fn with_strategy(mut self, strategy: PairingStrategy) -> Self {
        self.strategy = Some(strategy);
        self
    }

    pub fn with_shots(mut self, shots: Shots) -> Self {
        self.shots = shots;
        self
    }

    pub fn validate(&self, spec: &AnsatzSpec) -> Result<()> {
        if self.optimizer.is_two_gate() {
            if self.strategy.is_none() {
                return Err(Error::config(format!(
                    "{} needs a pairing strategy",
                    self.optimizer
                )));
            }
            if spec.num_gates() % 2 != 0 {
                return Err(Error::config("two-gate optimizers need an even gate count"));
            }
        } else if self.strategy.is_some() {
            return Err(Error::config(format!(
                "{} does not take a pairing strategy",
                self.optimizer
            )));
        }
        Ok(())
    }
}

/// Random initial parameters of the optimizer's gate kind.
pub fn initial_params(spec: &AnsatzSpec, optimizer: OptimizerKind, rng: &mut ChaCha20Rng) -> ParameterSet {
    let kind = optimizer.gate_kind();
    let quats = (0..spec.num_gates()).map(|_| kind.random(rng).canonical()).collect();
    ParameterSet::new(spec, quats).expect("one parameter per gate")
}

/// One full optimization run from random initial parameters.
pub fn optimize(
    spec: &AnsatzSpec,
    cost: &CostFunction,
    settings: &RunSettings,
    run_id: usize,
    seed: u64,
) -> Result<(ParameterSet, RunTrace)> {
    settings.validate(spec)?;
    let mut streams = RunStreams::from_seed(seed);
    let params = initial_params(spec, settings.optimizer, &mut streams.init);
    let evaluator = Evaluator::new(cost, settings.shots, streams.shots.clone())?;
    let trace = RunTrace::new(run_id, seed, settings.optimizer, settings.strategy);
    let mut ctx = SweepContext::new(*spec, params, evaluator, trace)?;
    for _ in 0..settings.iterations {
        match (settings.optimizer, settings.strategy) {
            (OptimizerKind::Fraxis | OptimizerKind::Fqs, _) => {
                single_gate_sweep(&mut ctx, settings.optimizer.gate_kind())?
            }
            (OptimizerKind::Tgf | OptimizerKind::Tgfqs, Some(strategy)) => two_gate_sweep(
                &mut ctx,
                settings.optimizer.gate_kind(),
                strategy,
                &settings.minimizer,
                &mut streams.pairing,
                &mut streams.minimizer,
            )?,
            _ => unreachable!("validated above"),
        }
    }
    Ok(ctx.into_parts())
}
