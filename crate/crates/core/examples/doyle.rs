//! Doyle's static example: DK iteration stalls at √73 while both
//! derivative-free searches head for the infimum 1.

use musynth::baseline::{run_dk_doyle, DoyleObjective, DOYLE_START};
use musynth::cli::ExperimentConfig;
use musynth::nds::run_nds;
use musynth::objective::CountingObjective;
use musynth::zosm::run_zo;

fn main() -> musynth::Result<()> {
    let cfg = ExperimentConfig::defaults_for("doyle");
    let x0 = DOYLE_START.to_vec();

    let dk = run_dk_doyle(DOYLE_START, cfg.doyle.dk_rounds)?;
    let end = dk.final_point();
    println!("DK   (Q, d) = ({:.4}, {:.4})  objective {:.6}  (sqrt 73 = {:.6})", end.q, end.d, dk.final_objective(), 73f64.sqrt());

    let f = CountingObjective::new(DoyleObjective);
    let zo = run_zo(&f, &x0, &cfg.zo)?;
    let x = zo.output();
    println!("ZO   (Q, d) = ({:.4}, {:.4})  objective {:.6}  calls {}", x[0], x[1], zo.output_cost(), f.calls());

    let f = CountingObjective::new(DoyleObjective);
    let nds = run_nds(&f, &x0, &cfg.nds)?;
    println!("NDS  (Q, d) = ({:.4}, {:.4})  objective {:.6}  calls {}", nds.final_x[0], nds.final_x[1], nds.final_cost(), f.calls());
    Ok(())
}
