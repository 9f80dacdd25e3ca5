//! Structured synthesis on a seeded random plant with both optimizers,
//! scoring the returned policies with the model afterwards.
//!
//! Usage: `cargo run --release --example synth_random [seed] [budget]`

use musynth::cli::{load_or_generate, synthesize, Algo, ExperimentConfig, Mode};

fn main() -> musynth::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(6, |s| s.parse().expect("seed"));
    let budget: u64 = args.next().map_or(1500, |s| s.parse().expect("budget"));

    let mut cfg = ExperimentConfig::defaults_for("synth");
    cfg.n_k = 2;
    cfg.random_plant.rho_target = 0.97;
    cfg.random_plant.seed = seed;
    cfg.nds.max_iters = usize::MAX;
    cfg.nds.max_evals = Some(budget);
    cfg.nds.rng_seed = seed;
    cfg.zo.n_iters = 1_000_000;
    cfg.zo.max_evals = Some(budget);
    cfg.zo.rng_seed = seed;
    let plant = load_or_generate(&cfg)?;

    for algo in [Algo::Nds, Algo::Zo] {
        cfg.algo = algo;
        cfg.mode = Mode::Exact;
        let r = synthesize(&plant, &cfg)?;
        println!(
            "{algo:?}: J_c {:.4} -> {:.4} ({:.1}% lower), closed-loop rho {:.4}, {} calls",
            r.initial_exact_jc,
            r.final_exact_jc,
            100.0 * (1.0 - r.final_exact_jc / r.initial_exact_jc),
            r.final_spectral_radius,
            r.oracle_calls
        );
    }
    Ok(())
}
