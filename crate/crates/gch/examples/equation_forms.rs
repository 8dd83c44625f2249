//! The right-hand side in its three equivalent forms.
//!
//! Conservative and transport forms give the momentum tendency `m_t`; the
//! nonlocal form gives the velocity tendency `u_t`, related through the
//! Helmholtz operator `m_t = (1 - d^2/dx^2) u_t`. With dealiased products
//! the three agree to rounding on band-limited fields.
//!
//! ```bash
//! cargo run --release --example equation_forms
//! ```

use gch::equation::{rhs_conservative, rhs_nonlocal, rhs_transport};
use gch::grid::{helmholtz_apply, Field, Grid};
use gch::GchParams;

fn main() -> gch::Result<()> {
    let grid = Grid::new(2048, 40.0)?;
    let u = Field::from_fn(&grid, |x| 0.8 / x.cosh());

    println!("u = 0.8 sech(x), n = {}, L = {}", grid.n_points(), grid.length());
    println!("{:<14} {:>14} {:>14}", "(k1, k2)", "|cons-trans|", "|cons-H(nonl)|");
    for (k1, k2) in [(0.0, -2.0), (-2.0, 0.0), (-2.0, -2.0), (1.0, 1.0)] {
        let p = GchParams::new(k1, k2);
        let cons = rhs_conservative(&u, &p);
        let trans = rhs_transport(&u, &p);
        let nonlocal = helmholtz_apply(&rhs_nonlocal(&u, &p));
        println!(
            "({k1:>4}, {k2:>4}) {:>14.3e} {:>14.3e}",
            cons.max_abs_diff(&trans),
            cons.max_abs_diff(&nonlocal)
        );
    }

    // the equation is linear in its parameters
    let p_full = GchParams::new(-1.7, 0.9);
    let full = rhs_conservative(&u, &p_full);
    let split = rhs_conservative(&u, &GchParams::new(-1.7, 0.0))
        .scaled_add(1.0, &rhs_conservative(&u, &GchParams::new(0.0, 0.9)));
    println!("parameter linearity defect: {:.3e}", full.max_abs_diff(&split));
    Ok(())
}
