//! The `cell-check` subcommand: solve one ladder cell perturbatively and
//! print the coordinates alongside the back-substitution residuals.

use crate::args::CellCheckArgs;
use crate::error::Result;
use crate::output::fmt;
use slrf_core::rnc::{
    cell_length_residuals, solve_cell_perturbative, tangent_continuity_residual, CellLegs,
};

pub fn cell_check(args: &CellCheckArgs) -> Result<()> {
    let legs = CellLegs {
        l_xo: args.l_xo,
        l_xp: args.l_xp,
        l_xm: args.l_xm,
        ds_p: args.ds_p,
        ds_m: args.ds_m,
    };
    let cell = solve_cell_perturbative(legs, args.ricci)?;
    println!("x_b = {}", fmt(cell.x_b));
    println!("y_b = {}", fmt(cell.y_b));
    println!("x_f = {}", fmt(cell.x_f));
    println!("y_f = {}", fmt(cell.y_f));
    let [bc, ef, ab, af] = cell_length_residuals(&cell);
    println!("residual_bc = {}", fmt(bc));
    println!("residual_ef = {}", fmt(ef));
    println!("residual_ab = {}", fmt(ab));
    println!("residual_af = {}", fmt(af));
    println!(
        "tangent_continuity_residual = {}",
        fmt(tangent_continuity_residual(&cell))
    );
    Ok(())
}
