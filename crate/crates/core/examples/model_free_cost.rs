//! Cost evaluation from closed-loop experiments only. The black-box plant
//! exposes simulation and adjoint simulation; its matrices stay hidden.

use musynth::harness::BlackBoxPlant;
use musynth::hinf::PowerIterConfig;
use musynth::lti::Signal;
use musynth::musyn::{cost_j, default_init, random_plant, ChannelDims, CostMode};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> musynth::Result<()> {
    let plant = random_plant(5, ChannelDims::siso(), 0.8, 3)?;
    let bb = BlackBoxPlant::new(plant.clone())?;
    println!("public view: {:?}", bb.public_state());

    let mut policy = default_init(&plant, 1, 1)?;
    policy.ctrl.d_k = DMatrix::from_element(1, 1, 0.1);

    // ⟨y, T u⟩ = ⟨Tᵀ y, u⟩ over the experiment horizon.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut draw = |dim: usize, n: usize| {
        Signal::from_flat(dim, (0..dim * n).map(|_| StandardNormal.sample(&mut rng)).collect()).unwrap()
    };
    let u = draw(2, 200);
    let y = draw(2, 200);
    let lhs = y.dot(&bb.bb_simulate(&policy, &u)?);
    let rhs = bb.bb_simulate_adjoint(&policy, &y)?.dot(&u);
    println!("adjoint check  {lhs:.10} vs {rhs:.10}");

    let exact = cost_j(&plant, &policy, CostMode::Exact);
    println!("J exact        {exact:.6}");
    for horizon in [100, 300, 1000] {
        let cfg = PowerIterConfig { horizon, ..Default::default() };
        let mf = bb.model_free_cost(&policy, &cfg);
        println!("J model-free N={horizon:<5} {mf:.6} ({:+.3}%)", 100.0 * (mf / exact - 1.0));
    }
    Ok(())
}
