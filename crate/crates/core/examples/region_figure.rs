//! Rasterize the feasibility region over `[0, 7] x [0, 6]` and write it as
//! CSV and SVG (shaded cells, boundary curve families, diagonal).
//!
//! Run: `cargo run --example region_figure`
//! Outputs `region.csv` and `region.svg` in the working directory.

use poisson_thin::region;

fn main() -> poisson_thin::Result<()> {
    let step = 0.05; // use 0.01 for the full-resolution figure
    let grid = region::region_raster(7.0, 6.0, step)?;
    let curves = region::boundary_curves(7.0, 6.0, step)?;

    std::fs::write("region.csv", region::write_csv(&grid))?;
    std::fs::write("region.svg", region::write_svg(&grid, &curves))?;

    let feasible = grid
        .cells
        .iter()
        .flatten()
        .filter(|c| matches!(c, Some(w) if w.feasible))
        .count();
    let total = grid.cells.iter().flatten().filter(|c| c.is_some()).count();
    println!("wrote region.csv and region.svg ({feasible} of {total} cells feasible)");
    Ok(())
}
