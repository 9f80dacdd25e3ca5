use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{AugmentedPolicy, ChannelDims, ControllerParams, DScaleParams, PartitionedPlant};
use crate::error::{Error, Result};
use crate::lti::{self, StateSpace};

/// Seeded random stable plant: a standard-normal `A` rescaled to spectral
/// radius `rho_target`, all other blocks i.i.d. standard normal.
pub fn random_plant(n_x: usize, dims: ChannelDims, rho_target: f64, seed: u64) -> Result<PartitionedPlant> {
    if !(rho_target > 0.0 && rho_target < 1.0) {
        return Err(Error::Domain(format!("rho_target {rho_target} outside (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = |r: usize, c: usize| DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(&mut rng));
    let mut a: DMatrix<f64> = normal(n_x, n_x);
    let b = normal(n_x, dims.n_in());
    let c = normal(dims.n_out(), n_x);
    let d = normal(dims.n_out(), dims.n_in());
    if n_x > 0 {
        let rho = lti::matrix_spectral_radius(&a)?;
        if rho == 0.0 {
            return Err(Error::NumericalFailure("drawn state matrix is nilpotent".into()));
        }
        a *= rho_target / rho;
    }
    PartitionedPlant::new(StateSpace::new(a, b, c, d)?, dims)
}

/// Zero controller of order `n_k` with an identity D-scale of order
/// `n_dscale`; feasible whenever the plant itself is stable.
pub fn default_init(plant: &PartitionedPlant, n_k: usize, n_dscale: usize) -> Result<AugmentedPolicy> {
    let rho = lti::spectral_radius(plant.sys())?;
    if rho >= 1.0 {
        return Err(Error::NeedsStabilizingInit { rho });
    }
    let dims = plant.dims();
    AugmentedPolicy::new(ControllerParams::zeros(n_k, dims.n_u, dims.n_y), DScaleParams::identity(n_dscale, dims.n_v))
}
