use nalgebra::DMatrix;

use super::{AugmentedPolicy, ChannelDims, ControllerParams, DScaleParams, PartitionedPlant};
use crate::error::{Error, Result};
use crate::linalg::block_diag;
use crate::lti::{self, StateSpace};

/// `G_c` together with the channel split of the plant it was built from.
///
/// Inputs of `G_c` are `(w̃, d | u, p₁, p₂)` and outputs `(ṽ, e | y, q₁, q₂)`,
/// where `p₁ = D̃ q₁` closes the input-side scaling `(w, d) = D⁻¹(w̃, d)` and
/// `p₂ = D̃ q₂` the output-side scaling `(ṽ, e) = D (v, e)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedPlant {
    gc: PartitionedPlant,
    base: ChannelDims,
}

impl AugmentedPlant {
    pub fn plant(&self) -> &PartitionedPlant {
        &self.gc
    }
    pub fn sys(&self) -> &StateSpace {
        self.gc.sys()
    }
    /// Channel split of the original plant.
    pub fn base_dims(&self) -> ChannelDims {
        self.base
    }

    /// `F_l(G_c, K_c)`; fails on a singular D-scale or an ill-posed loop.
    pub fn closed_loop(&self, policy: &AugmentedPolicy) -> Result<StateSpace> {
        let layout = policy.layout();
        if layout.n_u != self.base.n_u || layout.n_y != self.base.n_y || layout.n_v != self.base.n_v {
            return Err(Error::Dimension("policy does not match plant channels".into()));
        }
        policy.dscale.check_invertible()?;
        let kc = build_augmented_controller(policy, &self.base)?;
        lti::lft_lower(self.gc.sys(), &kc)
    }
}

/// `G_c = L G R + S` with
///
/// ```text
///       [ I 0 ]                                    [ 0 0  0 I ]
///   L = [ 0 I ]    R = [ I 0 -I 0 ]            S = [ 0 0  0 0 ]
///       [ 0 0 ]        [ 0 I  0 0 ]                [ I 0 -I 0 ]
///       [ I 0 ]                                    [ 0 0  0 0 ]
/// ```
///
/// where `G` is read as a 2×2 block map from `((w, d), u)` to `((v, e), y)`.
pub fn build_augmented_plant(plant: &PartitionedPlant) -> Result<AugmentedPlant> {
    let dims = plant.dims();
    if dims.n_v != dims.n_w {
        return Err(Error::Dimension(format!(
            "uncertainty channel must be square, got n_v = {} and n_w = {}",
            dims.n_v, dims.n_w
        )));
    }
    let nwi = dims.n_perf_in();
    let nzo = dims.n_perf_out();
    let (nu, ny) = (dims.n_u, dims.n_y);
    let n_in_c = nwi + nu + nwi + nzo;
    let n_out_c = nzo + ny + nwi + nzo;

    let mut r = DMatrix::zeros(nwi + nu, n_in_c);
    r.view_mut((0, 0), (nwi, nwi)).fill_with_identity();
    r.view_mut((0, nwi + nu), (nwi, nwi)).fill_with_identity();
    r.view_mut((0, nwi + nu), (nwi, nwi)).neg_mut();
    r.view_mut((nwi, nwi), (nu, nu)).fill_with_identity();

    let mut l = DMatrix::zeros(n_out_c, nzo + ny);
    l.view_mut((0, 0), (nzo, nzo)).fill_with_identity();
    l.view_mut((nzo, nzo), (ny, ny)).fill_with_identity();
    l.view_mut((nzo + ny + nwi, 0), (nzo, nzo)).fill_with_identity();

    let mut s = DMatrix::zeros(n_out_c, n_in_c);
    s.view_mut((0, nwi + nu + nwi), (nzo, nzo)).fill_with_identity();
    s.view_mut((nzo + ny, 0), (nwi, nwi)).fill_with_identity();
    s.view_mut((nzo + ny, nwi + nu), (nwi, nwi)).fill_with_identity();
    s.view_mut((nzo + ny, nwi + nu), (nwi, nwi)).neg_mut();

    let gr = lti::right_multiply_const(plant.sys(), &r)?;
    let lgr = lti::left_multiply_const(&l, &gr)?;
    let gc = lti::add_const_feedthrough(&lgr, &s)?;
    let gc_dims = ChannelDims { n_u: nu + nwi + nzo, n_y: ny + nwi + nzo, ..dims };
    Ok(AugmentedPlant { gc: PartitionedPlant::new(gc, gc_dims)?, base: dims })
}

/// `D̃` padded with `pad` zero channels: `(A_D, [B_D 0], [C_D; 0], [[D_D - I, 0], [0, 0]])`.
fn dtilde_blocks(ds: &DScaleParams, pad: usize) -> [DMatrix<f64>; 4] {
    let n_dscale = ds.order();
    let n_v = ds.d_d.nrows();
    let mut b = DMatrix::zeros(n_dscale, n_v + pad);
    b.view_mut((0, 0), (n_dscale, n_v)).copy_from(&ds.b_d);
    let mut c = DMatrix::zeros(n_v + pad, n_dscale);
    c.view_mut((0, 0), (n_v, n_dscale)).copy_from(&ds.c_d);
    let mut d = DMatrix::zeros(n_v + pad, n_v + pad);
    d.view_mut((0, 0), (n_v, n_v)).copy_from(&(&ds.d_d - DMatrix::identity(n_v, n_v)));
    [ds.a_d.clone(), b, c, d]
}

/// `K_c = blkdiag(K, D̃, D̃)`. The first `D̃` copy is padded to the `(w, d)`
/// channel and the second to `(v, e)`.
pub fn build_augmented_controller(policy: &AugmentedPolicy, dims: &ChannelDims) -> Result<StateSpace> {
    policy.validate()?;
    if policy.dscale.d_d.nrows() != dims.n_w || dims.n_w != dims.n_v {
        return Err(Error::Dimension("D-scale size must equal n_w = n_v".into()));
    }
    let k = &policy.ctrl;
    let [ai, bi, ci, di] = dtilde_blocks(&policy.dscale, dims.n_d);
    let [ao, bo, co, d_o] = dtilde_blocks(&policy.dscale, dims.n_e);
    StateSpace::new(
        block_diag(&[&k.a_k, &ai, &ao]),
        block_diag(&[&k.b_k, &bi, &bo]),
        block_diag(&[&k.c_k, &ci, &co]),
        block_diag(&[&k.d_k, &di, &d_o]),
    )
}

fn controller_system(k: &ControllerParams) -> Result<StateSpace> {
    StateSpace::new(k.a_k.clone(), k.b_k.clone(), k.c_k.clone(), k.d_k.clone())
}

/// `blkdiag(sys, I_pad)`.
fn pad_identity(sys: &StateSpace, pad: usize) -> Result<StateSpace> {
    if pad == 0 {
        return Ok(sys.clone());
    }
    let n = sys.n_x();
    StateSpace::new(
        sys.a().clone(),
        block_diag(&[sys.b(), &DMatrix::zeros(0, pad)]),
        block_diag(&[sys.c(), &DMatrix::zeros(pad, 0)]),
        block_diag(&[sys.d(), &DMatrix::identity(pad, pad)]),
    )
    .map(|s| {
        debug_assert_eq!(s.n_x(), n);
        s
    })
}

/// Builds `D_full F_l(G, K) D_full⁻¹` directly by series composition, with
/// `D_full = blkdiag(D, I)` on the performance channels.
pub fn scaled_closedloop_direct(
    plant: &PartitionedPlant,
    k: &ControllerParams,
    d: &DScaleParams,
) -> Result<StateSpace> {
    let dims = plant.dims();
    if d.d_d.nrows() != dims.n_w || dims.n_w != dims.n_v {
        return Err(Error::Dimension("D-scale size must equal n_w = n_v".into()));
    }
    d.check_invertible()?;
    let f = lti::lft_lower(plant.sys(), &controller_system(k)?)?;

    let dss = StateSpace::new(d.a_d.clone(), d.b_d.clone(), d.c_d.clone(), d.d_d.clone())?;
    let dinv_d = d.d_d.clone().try_inverse().ok_or(Error::SingularScale { rcond: 0.0 })?;
    let dinv = StateSpace::new(
        &d.a_d - &d.b_d * &dinv_d * &d.c_d,
        &d.b_d * &dinv_d,
        -(&dinv_d * &d.c_d),
        dinv_d,
    )?;
    let left = pad_identity(&dss, dims.n_e)?;
    let right = pad_identity(&dinv, dims.n_d)?;
    lti::series(&lti::series(&right, &f)?, &left)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hinf::hinf_norm;
    use crate::linalg::sigma_max;
    use crate::musyn::doyle_plant;
    use approx::assert_relative_eq;

    #[test]
    fn doyle_augmented_controller() {
        let dims = ChannelDims::siso();
        let p = AugmentedPolicy::new(
            ControllerParams::static_gain(DMatrix::from_element(1, 1, 5.0)),
            DScaleParams::static_scale(DMatrix::from_element(1, 1, 4.0)),
        )
        .unwrap();
        let kc = build_augmented_controller(&p, &dims).unwrap();
        assert_eq!(kc.n_x(), 0);
        let mut expected = DMatrix::zeros(5, 5);
        expected[(0, 0)] = 5.0;
        expected[(1, 1)] = 3.0;
        expected[(3, 3)] = 3.0;
        assert_eq!(kc.d(), &expected);
    }

    #[test]
    fn identity_scale_gives_zero_feedthrough() {
        let p = AugmentedPolicy::new(ControllerParams::zeros(0, 1, 1), DScaleParams::identity(0, 1)).unwrap();
        let kc = build_augmented_controller(&p, &ChannelDims::siso()).unwrap();
        assert!(kc.d().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn augmented_controller_state_dimension() {
        let p = AugmentedPolicy::new(ControllerParams::zeros(3, 1, 1), DScaleParams::identity(1, 1)).unwrap();
        assert_eq!(build_augmented_controller(&p, &ChannelDims::siso()).unwrap().n_x(), 5);
    }

    #[test]
    fn doyle_scaled_norm_matches_constant_matrix() {
        let gc = build_augmented_plant(&doyle_plant()).unwrap();
        let (q, d) = (2.0, 3.0);
        let p = AugmentedPolicy::new(
            ControllerParams::static_gain(DMatrix::from_element(1, 1, q)),
            DScaleParams::static_scale(DMatrix::from_element(1, 1, d)),
        )
        .unwrap();
        let cl = gc.closed_loop(&p).unwrap();
        let m = DMatrix::from_row_slice(2, 2, &[-1.0, d, q / d, 1.0]);
        assert_relative_eq!(hinf_norm(&cl).unwrap().value, sigma_max(&m), max_relative = 1e-12);
    }

    #[test]
    fn direct_route_on_doyle_points() {
        let plant = doyle_plant();
        let at = |q: f64, d: f64| {
            let s = scaled_closedloop_direct(
                &plant,
                &ControllerParams::static_gain(DMatrix::from_element(1, 1, q)),
                &DScaleParams::static_scale(DMatrix::from_element(1, 1, d)),
            )
            .unwrap();
            hinf_norm(&s).unwrap().value
        };
        assert_relative_eq!(at(0.0, 1.0), ((3.0 + 5f64.sqrt()) / 2.0).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(at(72.0, 72f64.sqrt()), 73f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn non_square_uncertainty_rejected() {
        let sys = StateSpace::static_gain(DMatrix::zeros(3, 4)).unwrap();
        let dims = ChannelDims { n_w: 2, n_d: 1, n_u: 1, n_v: 1, n_e: 1, n_y: 1 };
        let plant = PartitionedPlant::new(sys, dims).unwrap();
        assert!(build_augmented_plant(&plant).is_err());
    }
}
