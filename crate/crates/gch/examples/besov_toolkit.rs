//! Dyadic frequency analysis of grid fields.
//!
//! Splits a field into Littlewood-Paley blocks, checks the partition of
//! unity and reconstruction, and compares the discrete Besov norm
//! `B^s_{2,2}` against the Sobolev multiplier norm `H^s` (equivalent, with a
//! construction-dependent constant).
//!
//! ```bash
//! cargo run --release --example besov_toolkit
//! ```

use gch::grid::{Field, Grid};
use gch::littlewood_paley::{
    besov_norm, block_weights, lp_block, low_cutoff, sobolev_norm, BesovIndex, DyadicPartition,
};

fn main() -> gch::Result<()> {
    let grid = Grid::new(512, std::f64::consts::TAU)?;
    let part = DyadicPartition::for_grid(&grid);
    println!(
        "grid n = {}, k_nyquist = {:.1}, q_max = {}, coverage |xi| <= {:.1}",
        grid.n_points(),
        grid.wavenumbers()[grid.n_points() / 2].abs(),
        part.q_max(),
        part.coverage()
    );

    // a two-scale field: slow carrier plus a high wave packet
    let u = Field::from_fn(&grid, |x| {
        x.cos() + 0.5 * (24.0 * x).cos() * (-x * x / 0.25).exp()
    });

    let idx = BesovIndex::new(2.0, 2.0, 2.0)?;
    println!("\nper-block weights 2^(qs) |Delta_q u|_L2 for s = 2:");
    for (q, w) in block_weights(&u, &idx, &part) {
        println!("  q = {q:>2}: {w:.6e}");
    }

    let mut recon = Field::zeros(&grid);
    for q in -1..=part.q_max() {
        recon = recon.scaled_add(1.0, &lp_block(&u, q, &part)?);
    }
    println!("reconstruction defect: {:.3e}", recon.max_abs_diff(&u));

    let s3 = low_cutoff(&u, 3, &part)?;
    println!("low cutoff S_3 keeps {:.4} of the field's max", s3.max_abs() / u.max_abs());

    let mut worst = 0.0_f64;
    for &k in grid.wavenumbers() {
        worst = worst.max(part.partition_residual(k));
    }
    println!("partition-of-unity residual over the grid: {worst:.3e}");

    println!("\n{:>4} {:>14} {:>14} {:>10}", "s", "B^s_22", "H^s", "ratio");
    for s in [1.0, 2.0, 3.0] {
        let b = besov_norm(&u, &BesovIndex::new(s, 2.0, 2.0)?, &part);
        let h = sobolev_norm(&u, s);
        println!("{s:>4} {b:>14.6e} {h:>14.6e} {:>10.4}", b / h);
    }
    Ok(())
}
