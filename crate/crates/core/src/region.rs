//! The feasibility region in the `(lambda, mu)` plane: grid rasterization,
//! the boundary curve families, and CSV / SVG emitters.
//!
//! The region `{(lambda, mu) : a thinning exists}` is closed, lies strictly
//! above the diagonal, and is bounded by two interleaved curve families:
//! the cdf family `P(X <= k+1) = P(Y <= k)` and the pmf family
//! `P(X = k) = P(Y = k)`, with X, Y Poisson of means lambda and mu.

use crate::error::{Result, ThinError};
use crate::poisson::{self, FeasibilityWitness, IntensityPair};

/// A rectangular raster of feasibility verdicts. Cells exist only where
/// `lambda > mu`.
#[derive(Debug, Clone)]
pub struct RegionGrid {
    pub lambda_axis: Vec<f64>,
    pub mu_axis: Vec<f64>,
    /// `cells[i][j]` is the verdict at `(lambda_axis[i], mu_axis[j])`, or
    /// `None` when `lambda <= mu`.
    pub cells: Vec<Vec<Option<FeasibilityWitness>>>,
}

fn axis(max: f64, step: f64) -> Vec<f64> {
    let n = (max / step).floor() as usize;
    (1..=n).map(|i| i as f64 * step).collect()
}

/// Evaluate the feasibility predicate on a `step`-spaced grid.
pub fn region_raster(lambda_max: f64, mu_max: f64, step: f64) -> Result<RegionGrid> {
    if !(step > 0.0 && lambda_max > step && mu_max > 0.0) {
        return Err(ThinError::Domain(format!(
            "degenerate region ranges: lambda_max {lambda_max}, mu_max {mu_max}, step {step}"
        )));
    }
    let lambda_axis = axis(lambda_max, step);
    let mu_axis = axis(mu_max, step);
    let mut cells = Vec::with_capacity(lambda_axis.len());
    for &l in &lambda_axis {
        let mut row = Vec::with_capacity(mu_axis.len());
        for &m in &mu_axis {
            if l > m {
                let pair = IntensityPair::unit(l, m)?;
                row.push(Some(poisson::feasible_ii(&pair)?));
            } else {
                row.push(None);
            }
        }
        cells.push(row);
    }
    Ok(RegionGrid {
        lambda_axis,
        mu_axis,
        cells,
    })
}

/// The two boundary curve families, as polylines of `(lambda, mu)` points.
#[derive(Debug, Clone)]
pub struct BoundaryCurves {
    /// Solutions of `P(X <= k+1) = P(Y <= k)`, one polyline per k.
    pub cdf_family: Vec<(u32, Vec<(f64, f64)>)>,
    /// Solutions of `P(X = k) = P(Y = k)` with `lambda > max(k, mu)`.
    pub pmf_family: Vec<(u32, Vec<(f64, f64)>)>,
}

/// Bisection for the decreasing function `f` on `[lo, hi]`.
fn bisect<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The lambda on the cdf-family curve for a given k and mu, if any below
/// `lambda_cap`.
pub fn cdf_curve_lambda(k: u32, mu: f64, lambda_cap: f64) -> Result<Option<f64>> {
    let f = |l: f64| {
        Ok(poisson::poisson_ln_cdf(mu, k as u64)? - poisson::poisson_ln_cdf(l, k as u64 + 1)?)
    };
    // f rises in lambda (P(X <= k+1) falls) and f(mu) <= 0; expand the
    // bracket until the sign flips
    let mut hi = (mu + 1.0).max(1.0);
    while f(hi)? < 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Ok(None);
        }
    }
    let l = bisect(|x| f(x).map(|v| -v), mu.max(1e-12), hi)?;
    Ok((l <= lambda_cap).then_some(l))
}

/// The lambda on the pmf-family curve for a given k >= 1 and mu < k, if any
/// below `lambda_cap`. For `mu >= k` the curve has no branch above the
/// diagonal.
pub fn pmf_curve_lambda(k: u32, mu: f64, lambda_cap: f64) -> Result<Option<f64>> {
    let kf = k as f64;
    if k == 0 || mu >= kf {
        return Ok(None);
    }
    // solve k ln(l) - l = k ln(mu) - mu on the decreasing branch l > k
    let target = kf * mu.ln() - mu;
    let g = |l: f64| Ok(kf * l.ln() - l - target);
    let mut hi = kf + 1.0;
    while g(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Ok(None);
        }
    }
    let l = bisect(g, kf, hi)?;
    Ok((l <= lambda_cap).then_some(l))
}

/// Trace both curve families over a mu grid.
pub fn boundary_curves(lambda_max: f64, mu_max: f64, step: f64) -> Result<BoundaryCurves> {
    let mus = axis(mu_max, step);
    let mut cdf_family = Vec::new();
    for k in 0..=5u32 {
        let mut line = Vec::new();
        for &mu in &mus {
            if let Some(l) = cdf_curve_lambda(k, mu, lambda_max)? {
                line.push((l, mu));
            }
        }
        if !line.is_empty() {
            cdf_family.push((k, line));
        }
    }
    let mut pmf_family = Vec::new();
    for k in 1..=4u32 {
        let mut line = Vec::new();
        for &mu in &mus {
            if let Some(l) = pmf_curve_lambda(k, mu, lambda_max)? {
                line.push((l, mu));
            }
        }
        if !line.is_empty() {
            pmf_family.push((k, line));
        }
    }
    Ok(BoundaryCurves {
        cdf_family,
        pmf_family,
    })
}

// ---------------------------------------------------------------------------
// emitters
// ---------------------------------------------------------------------------

/// CSV rows `lambda,mu,feasible,k` for every cell with `lambda > mu`; the k
/// column holds the witness when feasible and the blocking k otherwise.
pub fn write_csv(grid: &RegionGrid) -> String {
    let mut out = String::from("lambda,mu,feasible,k\n");
    for (i, &l) in grid.lambda_axis.iter().enumerate() {
        for (j, &m) in grid.mu_axis.iter().enumerate() {
            if let Some(w) = &grid.cells[i][j] {
                let k = if w.feasible {
                    w.k.unwrap_or(0)
                } else {
                    w.blocking_k.unwrap_or(0)
                };
                out.push_str(&format!("{l:.6},{m:.6},{},{k}\n", w.feasible));
            }
        }
    }
    out
}

const SVG_W: f64 = 700.0;
const SVG_H: f64 = 600.0;
const MARGIN: f64 = 50.0;

/// Render the region and curves: shaded cells for feasible pairs, the
/// cdf-family curves in red, the pmf-family in blue, and the diagonal.
/// Lambda runs along x, mu along y (origin bottom-left).
pub fn write_svg(grid: &RegionGrid, curves: &BoundaryCurves) -> String {
    let lmax = grid.lambda_axis.last().copied().unwrap_or(1.0);
    let mmax = grid.mu_axis.last().copied().unwrap_or(1.0);
    let x = |l: f64| MARGIN + l / lmax * (SVG_W - 2.0 * MARGIN);
    let y = |m: f64| SVG_H - MARGIN - m / mmax * (SVG_H - 2.0 * MARGIN);
    let step_l = grid.lambda_axis.first().copied().unwrap_or(0.1);
    let step_m = grid.mu_axis.first().copied().unwrap_or(0.1);
    let cw = (x(step_l) - x(0.0)).abs().max(1.0);
    let ch = (y(0.0) - y(step_m)).abs().max(1.0);

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
         viewBox=\"0 0 {SVG_W} {SVG_H}\">\n<rect width=\"{SVG_W}\" height=\"{SVG_H}\" \
         fill=\"white\"/>\n"
    );
    // shaded feasible cells
    for (i, &l) in grid.lambda_axis.iter().enumerate() {
        for (j, &m) in grid.mu_axis.iter().enumerate() {
            if matches!(&grid.cells[i][j], Some(w) if w.feasible) {
                svg.push_str(&format!(
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
                     fill=\"#c8c8c8\"/>\n",
                    x(l) - cw,
                    y(m),
                    cw,
                    ch
                ));
            }
        }
    }
    // diagonal mu = lambda
    let diag_end = lmax.min(mmax);
    svg.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" \
         stroke-dasharray=\"4 3\"/>\n",
        x(0.0),
        y(0.0),
        x(diag_end),
        y(diag_end)
    ));
    let polyline = |pts: &[(f64, f64)], color: &str| {
        let coords: Vec<String> = pts
            .iter()
            .map(|&(l, m)| format!("{:.2},{:.2}", x(l), y(m)))
            .collect();
        format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            coords.join(" ")
        )
    };
    for (_, pts) in &curves.cdf_family {
        svg.push_str(&polyline(pts, "red"));
    }
    for (_, pts) in &curves.pmf_family {
        svg.push_str(&polyline(pts, "blue"));
    }
    // axes
    svg.push_str(&format!(
        "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{2:.2}\" y2=\"{1:.2}\" stroke=\"black\"/>\n\
         <line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{3:.2}\" stroke=\"black\"/>\n",
        x(0.0),
        y(0.0),
        x(lmax),
        y(mmax)
    ));
    for t in 0..=(lmax.floor() as u32) {
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{t}</text>\n",
            x(t as f64),
            y(0.0) + 16.0
        ));
    }
    for t in 0..=(mmax.floor() as u32) {
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{t}</text>\n",
            x(0.0) - 6.0,
            y(t as f64) + 4.0
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raster_matches_known_cells() {
        let g = region_raster(2.0, 1.0, 0.05).unwrap();
        let li = g.lambda_axis.iter().position(|&l| (l - 1.45).abs() < 1e-9).unwrap();
        let j7 = g.mu_axis.iter().position(|&m| (m - 0.7).abs() < 1e-9).unwrap();
        let j6 = g.mu_axis.iter().position(|&m| (m - 0.6).abs() < 1e-9).unwrap();
        assert!(g.cells[li][j7].unwrap().feasible);
        assert!(!g.cells[li][j6].unwrap().feasible);
        // diagonal and below: absent
        let l1 = g.lambda_axis.iter().position(|&l| (l - 1.0).abs() < 1e-9).unwrap();
        let m1 = g.mu_axis.iter().position(|&m| (m - 1.0).abs() < 1e-9).unwrap();
        assert!(g.cells[l1][m1].is_none());
    }

    #[test]
    fn csv_row_count_is_cells_above_diagonal() {
        let g = region_raster(1.0, 1.0, 0.25).unwrap();
        let csv = write_csv(&g);
        let expected: usize = g
            .cells
            .iter()
            .map(|row| row.iter().filter(|c| c.is_some()).count())
            .sum();
        assert_eq!(csv.lines().count(), expected + 1); // + header
    }

    #[test]
    fn cdf_curve_lies_on_its_equation() {
        for &(k, mu) in &[(0u32, 0.3), (1, 0.7), (2, 1.5), (4, 3.0)] {
            let l = cdf_curve_lambda(k, mu, 100.0).unwrap().unwrap();
            let lhs = poisson::poisson_cdf(l, k as u64 + 1).unwrap();
            let rhs = poisson::poisson_cdf(mu, k as u64).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "k = {k}, mu = {mu}: {lhs} vs {rhs}");
            assert!(l > mu);
        }
    }

    #[test]
    fn cdf_curve_k0_closed_form() {
        // k = 0: P(X <= 1) = P(Y = 0), i.e. e^{-l}(1 + l) = e^{-mu}
        let mu = 0.01;
        let l = cdf_curve_lambda(0, mu, 10.0).unwrap().unwrap();
        assert!(((-l).exp() * (1.0 + l) - (-mu as f64).exp()).abs() < 1e-9);
        // this is also the critical intensity for small mu
        let lc = poisson::lambda_c(mu, 1.0, 1e-9).unwrap();
        assert!((l - lc).abs() < 1e-6, "curve {l} vs lambda_c {lc}");
    }

    #[test]
    fn pmf_curve_lies_on_its_equation() {
        for &(k, mu) in &[(1u32, 0.4), (2, 1.0), (3, 2.0), (4, 3.5)] {
            let l = pmf_curve_lambda(k, mu, 100.0).unwrap().unwrap();
            let lhs = poisson::poisson_pmf(l, k as u64).unwrap();
            let rhs = poisson::poisson_pmf(mu, k as u64).unwrap();
            assert!(
                (lhs - rhs).abs() < 1e-8,
                "k = {k}, mu = {mu}: {lhs} vs {rhs}"
            );
            assert!(l > k as f64);
        }
        // no branch above the diagonal once mu >= k
        assert!(pmf_curve_lambda(2, 2.5, 100.0).unwrap().is_none());
    }

    #[test]
    fn svg_contains_layers() {
        let g = region_raster(3.0, 2.0, 0.25).unwrap();
        let c = boundary_curves(3.0, 2.0, 0.25).unwrap();
        let svg = write_svg(&g, &c);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("stroke=\"red\""));
        assert!(svg.contains("stroke=\"blue\""));
        assert!(svg.contains("fill=\"#c8c8c8\""));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
