//! Black-box access to a sealed plant.
//!
//! [`BlackBoxPlant`] owns the true plant but only ever returns closed-loop
//! trajectories for a caller-supplied policy, plus scalar gain estimates
//! computed from such trajectories. The model-free cost is the power-iteration
//! estimate of the closed-loop gain from `(w̃, d)` to `(ṽ, e)`.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hinf::{l2gain_power_iteration, PowerIterConfig, SimulationOperator};
use crate::lti::{self, Signal, StateSpace};
use crate::musyn::{build_augmented_plant, io, AugmentedPlant, AugmentedPolicy, ChannelDims, PartitionedPlant, SENTINEL};

pub const DEFAULT_GUARD: f64 = 1e9;
pub const DEFAULT_PROBE_HORIZON: usize = 2000;

pub struct BlackBoxPlant {
    hidden: AugmentedPlant,
    horizon: usize,
    probe_horizon: usize,
    guard: f64,
}

/// Everything about the harness that may be shown to the optimizer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PublicState {
    pub channels: ChannelDims,
    pub horizon: usize,
    pub probe_horizon: usize,
    pub guard: f64,
}

impl Serialize for BlackBoxPlant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.public_state().serialize(s)
    }
}

impl std::fmt::Debug for BlackBoxPlant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlackBoxPlant").field("public", &self.public_state()).finish_non_exhaustive()
    }
}

impl BlackBoxPlant {
    pub fn new(plant: PartitionedPlant) -> Result<Self> {
        Ok(Self {
            hidden: build_augmented_plant(&plant)?,
            horizon: 500,
            probe_horizon: DEFAULT_PROBE_HORIZON,
            guard: DEFAULT_GUARD,
        })
    }

    /// Loads a plant file and seals it.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::new(io::load_plant(path)?)
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    pub fn with_probe_horizon(mut self, probe_horizon: usize) -> Self {
        self.probe_horizon = probe_horizon;
        self
    }

    pub fn channel_dims(&self) -> ChannelDims {
        self.hidden.base_dims()
    }

    pub fn default_horizon(&self) -> usize {
        self.horizon
    }

    pub fn public_state(&self) -> PublicState {
        PublicState {
            channels: self.channel_dims(),
            horizon: self.horizon,
            probe_horizon: self.probe_horizon,
            guard: self.guard,
        }
    }

    fn closed_loop(&self, policy: &AugmentedPolicy) -> Result<StateSpace> {
        self.hidden.closed_loop(policy)
    }

    /// Forward closed-loop response from `(w̃, d)` to `(ṽ, e)`, zero initial state.
    pub fn bb_simulate(&self, policy: &AugmentedPolicy, input: &Signal) -> Result<Signal> {
        lti::simulate_guarded(&self.closed_loop(policy)?, input, self.guard)
    }

    /// Adjoint of the finite-horizon map applied to `output`.
    pub fn bb_simulate_adjoint(&self, policy: &AugmentedPolicy, output: &Signal) -> Result<Signal> {
        let adj = lti::transpose_system(&self.closed_loop(policy)?);
        Ok(lti::simulate_guarded(&adj, &output.time_reversed(), self.guard)?.time_reversed())
    }

    /// Impulse experiments on every input channel. Fails if the simulator
    /// blows up, or if the response energy has not decayed by the last
    /// quarter of the probe.
    fn probe_stability(&self, sys: &StateSpace) -> Result<()> {
        let n = self.probe_horizon;
        // Inject the impulse through B and watch the simulator's own signals.
        let watch = StateSpace::new(
            sys.a().clone(),
            sys.b().clone(),
            crate::linalg::vstack(sys.c(), &DMatrix::identity(sys.n_x(), sys.n_x())),
            crate::linalg::vstack(sys.d(), &DMatrix::zeros(sys.n_x(), sys.n_in())),
        )?;
        for ch in 0..sys.n_in() {
            let out = lti::simulate_guarded(&watch, &Signal::impulse(sys.n_in(), n, ch), self.guard)?;
            let energy = |from: usize, to: usize| -> f64 {
                (from..to).map(|t| out.at(t).iter().map(|v| v * v).sum::<f64>()).sum()
            };
            let third = energy(n / 2, 3 * n / 4);
            let last = energy(3 * n / 4, n);
            if third > 0.0 && last >= third * (1.0 - 1e-6) {
                return Err(Error::Divergence { guard: self.guard });
            }
        }
        Ok(())
    }

    /// Power-iteration estimate of `J(K_c)`; the sentinel when the loop is
    /// ill-posed or the experiments diverge.
    pub fn model_free_cost(&self, policy: &AugmentedPolicy, cfg: &PowerIterConfig) -> f64 {
        self.estimate(policy, cfg, false).unwrap_or(SENTINEL)
    }

    /// Power-iteration estimate of `‖(zI - A_cl)⁻¹‖∞` from state-injection
    /// experiments run inside the simulator; only the scalar leaves.
    pub fn model_free_stability_gain(&self, policy: &AugmentedPolicy, cfg: &PowerIterConfig) -> f64 {
        self.estimate(policy, cfg, true).unwrap_or(SENTINEL)
    }

    /// Upper bound on `‖(zI - A_cl)⁻¹‖∞` from the state-injection impulse
    /// responses `A_cl^k e_i` (see [`crate::musyn::stab_upper_bound`]); `None`
    /// when the responses have not decayed enough for the bound to apply.
    pub fn stability_gain_bound(&self, policy: &AugmentedPolicy) -> Option<f64> {
        let cl = self.closed_loop(policy).ok()?;
        crate::musyn::stab_upper_bound(cl.a())
    }

    fn estimate(&self, policy: &AugmentedPolicy, cfg: &PowerIterConfig, state_map: bool) -> Result<f64> {
        let cl = self.closed_loop(policy)?;
        self.probe_stability(&cl)?;
        let sys = if state_map {
            let n = cl.n_x();
            if n == 0 {
                return Ok(0.0);
            }
            StateSpace::new(cl.a().clone(), DMatrix::identity(n, n), DMatrix::identity(n, n), DMatrix::zeros(n, n))?
        } else {
            cl
        };
        let est = l2gain_power_iteration(&SimulationOperator::new(sys, self.guard), cfg)?;
        Ok(if est.value.is_finite() { est.value.min(SENTINEL) } else { SENTINEL })
    }
}
