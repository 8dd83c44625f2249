//! Wave breaking under the cubic (modified CH) flow.
//!
//! Strong solutions with non-positive constants persist exactly as long as
//! `inf u_x` and `inf (m u_x)` stay bounded below. Steep data with a deep
//! negative slope drives both monitors down until the adaptive step
//! collapses; the run then stops with a `BlowUpSuspected` status and the
//! verdict couples the threshold crossing with that collapse.
//!
//! ```bash
//! cargo run --release --example wave_breaking
//! ```

use gch::evolve::{run, RunStatus, SimConfig};
use gch::grid::{Field, Grid};
use gch::invariants::{blowup_verdict, BlowUpVerdict};
use gch::GchParams;

fn main() -> gch::Result<()> {
    let params = GchParams::modified_camassa_holm();
    let grid = Grid::new(2048, 40.0)?;

    // antisymmetric profile with a steep negative slope at the origin
    let u0 = Field::from_fn(&grid, |x| -8.0 * x / 1.2 * (-x * x / (2.0 * 1.2 * 1.2)).exp());

    let mut config = SimConfig::new(params, 1.0);
    config.record_every = 1;
    config.dt_min = 1.05e-4;

    let traj = run(&u0, &config)?;
    match traj.status {
        RunStatus::Completed => println!("run completed to t = {}", traj.final_time()),
        RunStatus::BlowUpSuspected { t_stop, reason } => {
            println!("run stopped at t = {t_stop:.5} ({reason:?})")
        }
    }

    println!("\n{:>10} {:>12} {:>12}", "t", "min u_x", "min m*u_x");
    let stride = (traj.diagnostics.len() / 12).max(1);
    for d in traj.diagnostics.iter().step_by(stride) {
        println!("{:>10.5} {:>12.2} {:>12.2}", d.t, d.min_ux, d.min_mux);
    }
    let last = traj.diagnostics.last().unwrap();
    println!("{:>10.5} {:>12.2} {:>12.2}  <- stop", last.t, last.min_ux, last.min_mux);

    let threshold = 1e3;
    let verdict = blowup_verdict(&traj, &params, threshold);
    println!("\nverdict at threshold {threshold:.0e}: {verdict:?}");

    // the criterion is proved only for non-positive constants
    let mixed = GchParams::new(1.0, -1.0);
    let calm = run(&Field::zeros(&grid), &SimConfig::new(mixed, 0.01))?;
    assert_eq!(blowup_verdict(&calm, &mixed, threshold), BlowUpVerdict::Inapplicable);
    println!("positive-k1 run reports: {:?}", blowup_verdict(&calm, &mixed, threshold));
    Ok(())
}
