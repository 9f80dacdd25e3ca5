//! The μ-synthesis policy-optimization layer.
//!
//! A plant `G` with inputs `(w, d, u)` and outputs `(v, e, y)` is turned into
//! an augmented plant `G_c` such that closing it with the block-diagonal
//! augmented controller `K_c = blkdiag(K, D̃, D̃)` realizes the scaled closed
//! loop `D F_l(G, K) D⁻¹`. The controller and the D-scale are then tuned
//! together as a single parameter vector.

mod augment;
mod cost;
mod generate;
pub mod io;
mod policy;

pub use augment::{build_augmented_controller, build_augmented_plant, scaled_closedloop_direct, AugmentedPlant};
pub use cost::{
    cost_j, cost_jc, cost_terms, stab_upper_bound, t_stab_norm, CostMode, CostTerms, PolicyObjective, RegularizationConfig, SENTINEL,
};
pub use generate::{default_init, random_plant};
pub use policy::{AugmentedPolicy, ControllerParams, DScaleParams, PolicyLayout, SCALE_RCOND};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lti::StateSpace;

/// Channel split of a plant: inputs `(w, d, u)`, outputs `(v, e, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDims {
    pub n_w: usize,
    pub n_d: usize,
    pub n_u: usize,
    pub n_v: usize,
    pub n_e: usize,
    pub n_y: usize,
}

impl ChannelDims {
    /// Every channel one-dimensional.
    pub fn siso() -> Self {
        Self { n_w: 1, n_d: 1, n_u: 1, n_v: 1, n_e: 1, n_y: 1 }
    }
    pub fn n_in(&self) -> usize {
        self.n_w + self.n_d + self.n_u
    }
    pub fn n_out(&self) -> usize {
        self.n_v + self.n_e + self.n_y
    }
    /// Size of the performance input `(w, d)`.
    pub fn n_perf_in(&self) -> usize {
        self.n_w + self.n_d
    }
    /// Size of the performance output `(v, e)`.
    pub fn n_perf_out(&self) -> usize {
        self.n_v + self.n_e
    }

    /// Policy layout for a controller of order `n_k` and D-scale of order `n_dscale`.
    pub fn layout(&self, n_k: usize, n_dscale: usize) -> PolicyLayout {
        PolicyLayout { n_k, n_dscale, n_u: self.n_u, n_y: self.n_y, n_v: self.n_v }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedPlant {
    sys: StateSpace,
    dims: ChannelDims,
}

impl PartitionedPlant {
    pub fn new(sys: StateSpace, dims: ChannelDims) -> Result<Self> {
        if dims.n_in() != sys.n_in() || dims.n_out() != sys.n_out() {
            return Err(Error::Dimension(format!(
                "channel split {}x{} does not match system {}x{}",
                dims.n_out(),
                dims.n_in(),
                sys.n_out(),
                sys.n_in()
            )));
        }
        if dims.n_u == 0 || dims.n_y == 0 {
            return Err(Error::Dimension("control input and measurement need at least one channel".into()));
        }
        Ok(Self { sys, dims })
    }

    pub fn sys(&self) -> &StateSpace {
        &self.sys
    }
    pub fn dims(&self) -> ChannelDims {
        self.dims
    }
}

/// The static example `G = [[R, U], [V, 0]]` with `R = [[-1, 1], [0, 1]]`,
/// `U = [0; 1]`, `V = [1, 0]`; closing it with `u = Q y` gives `R + U Q V`.
pub fn doyle_plant() -> PartitionedPlant {
    let d = nalgebra::DMatrix::from_row_slice(3, 3, &[-1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
    PartitionedPlant::new(StateSpace::static_gain(d).expect("static plant"), ChannelDims::siso())
        .expect("consistent dims")
}
