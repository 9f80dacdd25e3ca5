//! The augmented plant closes the loop with controller and D-scale in one
//! lower LFT. Compare it with the direct series construction.

use musynth::hinf::hinf_norm;
use musynth::lti;
use musynth::musyn::{build_augmented_plant, scaled_closedloop_direct, random_plant, AugmentedPolicy, ChannelDims, ControllerParams, DScaleParams};
use nalgebra::DMatrix;

fn main() -> musynth::Result<()> {
    let dims = ChannelDims { n_w: 2, n_d: 1, n_u: 1, n_v: 2, n_e: 1, n_y: 2 };
    let plant = random_plant(4, dims, 0.6, 5)?;
    let aug = build_augmented_plant(&plant)?;
    println!("G has {} states, {} inputs, {} outputs", plant.sys().n_x(), plant.sys().n_in(), plant.sys().n_out());
    println!("G_c has {} states, {} inputs, {} outputs", aug.sys().n_x(), aug.sys().n_in(), aug.sys().n_out());

    let ctrl = ControllerParams::static_gain(DMatrix::from_row_slice(1, 2, &[0.05, -0.03]));
    let mut dscale = DScaleParams::identity(1, 2);
    dscale.d_d = DMatrix::from_row_slice(2, 2, &[1.4, 0.1, -0.2, 0.8]);
    dscale.a_d[(0, 0)] = 0.3;
    dscale.b_d[(0, 0)] = 0.5;
    dscale.c_d[(1, 0)] = 0.4;
    let policy = AugmentedPolicy::new(ctrl.clone(), dscale.clone())?;
    println!("policy vector has {} entries", policy.flatten().len());

    let via_lft = aug.closed_loop(&policy)?;
    let direct = scaled_closedloop_direct(&plant, &ctrl, &dscale)?;
    println!("closed-loop spectral radius {:.6}", lti::spectral_radius(&via_lft)?);
    println!("||via LFT||   {:.10}", hinf_norm(&via_lft)?.value);
    println!("||direct||    {:.10}", hinf_norm(&direct)?.value);
    Ok(())
}
