//! H∞ norm of a random stable system two ways: the frequency-sweep oracle
//! and finite-horizon power iteration, cold and warm started.

use musynth::hinf::{hinf_norm, FiniteHorizonOperator, l2gain_power_iteration, l2gain_power_iteration_from, PowerIterConfig, SimulationOperator};
use musynth::lti::Signal;
use musynth::musyn::{random_plant, ChannelDims};

fn main() -> musynth::Result<()> {
    let sys = random_plant(6, ChannelDims::siso(), 0.9, 11)?.sys().clone();

    let exact = hinf_norm(&sys)?;
    println!("oracle          {:.6} at omega {:.4}", exact.value, exact.omega_peak);

    let op = SimulationOperator::new(sys, 1e150);
    for horizon in [50, 200, 500] {
        let cfg = PowerIterConfig { horizon, ..Default::default() };
        let est = l2gain_power_iteration(&op, &cfg)?;
        println!("power N={horizon:<4}    {:.6} ({} iterations, {:.2}% below)", est.value, est.iterations_used, 100.0 * (1.0 - est.value / exact.value));
    }

    // Each longer experiment resumes from the previous maximizing input.
    let mut u = Signal::impulse(op.input_dim(), 1, 0);
    for horizon in [25, 50, 100, 200, 400] {
        let cfg = PowerIterConfig { horizon, ..Default::default() };
        let (est, next) = l2gain_power_iteration_from(&op, &cfg, &u)?;
        println!("warm N={horizon:<4}     {:.6}", est.value);
        u = next;
    }
    Ok(())
}
