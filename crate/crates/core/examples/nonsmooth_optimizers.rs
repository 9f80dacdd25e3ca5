//! NDS and smoothed zeroth-order descent on a nonsmooth test function,
//! plus a look at the min-norm element of a small convex hull.

use musynth::nds::{min_norm_in_hull, run_nds, NdsConfig};
use musynth::objective::{from_fn, CountingObjective};
use musynth::zosm::{run_zo, ZoConfig};

fn main() -> musynth::Result<()> {
    // max(|x1|, 2|x2 - 1|) + 0.1‖x‖², kinked along two lines.
    let f = |x: &[f64]| x[0].abs().max(2.0 * (x[1] - 1.0).abs()) + 0.1 * (x[0] * x[0] + x[1] * x[1]);
    let x0 = [3.0, -2.0];

    let obj = CountingObjective::new(from_fn(2, f));
    let nds = run_nds(&obj, &x0, &NdsConfig { max_iters: 500, ..NdsConfig::default() })?;
    println!(
        "NDS  x = ({:.5}, {:.5})  f = {:.6}  {:?} after {} calls",
        nds.final_x[0],
        nds.final_x[1],
        nds.final_cost(),
        nds.termination,
        obj.calls()
    );

    let obj = CountingObjective::new(from_fn(2, f));
    let zo = run_zo(&obj, &x0, &ZoConfig { eta: 0.02, delta: 1e-3, n_iters: 3000, rng_seed: 1, ..ZoConfig::default() })?;
    let x = zo.output();
    println!("ZO   x = ({:.5}, {:.5})  f = {:.6}  after {} calls", x[0], x[1], zo.output_cost(), obj.calls());

    let hull = vec![vec![1.0, 2.0], vec![-1.0, 2.0], vec![0.0, 3.0]];
    println!("min-norm point of conv{{(1,2), (-1,2), (0,3)}}: {:?}", min_norm_in_hull(&hull, 1e-12));
    Ok(())
}
