//! The acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (visible with `--nocapture`) and asserting the verdict.
//!
//! Run with `cargo test --test acceptance -- --nocapture`.

use poisson_thin::point::{BoxSpec, CirclePoint, CirclePointSet, EuclideanPointSet, PointSet, UnitPoint};
use poisson_thin::verify::rng::Stream;
use poisson_thin::{circle, coupling, deletion, poisson, region, thin, verify, IntensityPair};

fn verdict(name: &str, pass: bool, detail: &str) {
    println!(
        "{} criterion {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {name} failed: {detail}");
}

fn rand_pair(s: &mut Stream) -> (f64, f64) {
    // lambda in (0, 20], mu < lambda
    let lambda = (s.next_f64() * 20.0).max(1e-3);
    let mu = (s.next_f64() * lambda).max(1e-4).min(lambda * 0.999_999);
    (lambda, mu)
}

#[test]
fn criterion_01_paper_example_pair() {
    let a = poisson::feasible_ii(&IntensityPair::unit(1.45, 0.7).unwrap()).unwrap();
    let b = poisson::feasible_ii(&IntensityPair::unit(1.45, 0.6).unwrap()).unwrap();
    let pass = a.feasible && a.k == Some(1) && !b.feasible && b.blocking_k == Some(0);
    verdict(
        "1 (example pair)",
        pass,
        &format!("(1.45,0.7) -> {a:?}; (1.45,0.6) -> {b:?}"),
    );
}

#[test]
fn criterion_02_condition_equivalence() {
    let mut s = Stream::new(0xACCE_01, 2);
    let mut mismatches = 0u32;
    for _ in 0..10_000 {
        let (l, m) = rand_pair(&mut s);
        let pair = IntensityPair::unit(l, m).unwrap();
        let ii = poisson::feasible_ii(&pair).unwrap();
        let iii = poisson::feasible_iii(&pair).unwrap();
        if ii.feasible != iii.feasible {
            mismatches += 1;
        }
    }
    verdict(
        "2 (ii = iii equivalence)",
        mismatches == 0,
        &format!("{mismatches} verdict mismatches on 10^4 random pairs"),
    );
}

#[test]
fn criterion_03_mono_lemma() {
    let tol = poisson::LOG_TIE_TOL;
    let log_le = |a: f64, b: f64| a <= b + tol;
    let mut s = Stream::new(0xACCE_01, 3);
    let mut violations = 0u64;
    for _ in 0..10_000 {
        let (l, m) = rand_pair(&mut s);
        // stream ln pmf and linear cdfs over k = 0..=202
        let mut cx = 0.0f64;
        let mut cy = 0.0f64;
        let mut px = Vec::with_capacity(203);
        let mut fx = Vec::with_capacity(203);
        let mut py = Vec::with_capacity(203);
        let mut fy = Vec::with_capacity(203);
        for k in 0..=202u64 {
            let lx = poisson::poisson_ln_pmf(l, k).unwrap();
            let ly = poisson::poisson_ln_pmf(m, k).unwrap();
            cx += lx.exp();
            cy += ly.exp();
            px.push(lx);
            py.push(ly);
            fx.push(cx.min(1.0).ln());
            fy.push(cy.min(1.0).ln());
        }
        for k in 0..=200usize {
            // part (i): P(X=k+1) <= P(Y=k+1) forces P(X=k) <= P(Y=k)
            if log_le(px[k + 1], py[k + 1]) && !log_le(px[k], py[k]) {
                violations += 1;
            }
            // part (ii): P(X<=k+1) <= P(Y<=k) forces P(X<=k+2) <= P(Y<=k+1)
            if log_le(fx[k + 1], fy[k]) && !log_le(fx[k + 2], fy[k + 1]) {
                violations += 1;
            }
        }
    }
    verdict(
        "3 (mono lemma)",
        violations == 0,
        &format!("{violations} implication violations, k <= 200, 10^4 pairs"),
    );
}

#[test]
fn criterion_04_threshold_bound() {
    let mut bad = Vec::new();
    for &mu in &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0] {
        let w = poisson::feasible_ii(&IntensityPair::unit(mu + 1.0, mu).unwrap()).unwrap();
        if !w.feasible {
            bad.push(mu);
        }
    }
    let lc100 = poisson::lambda_c(100.0, 1.0, 1e-6).unwrap();
    let pass = bad.is_empty() && lc100 - 100.0 >= 0.8;
    verdict(
        "4 (mu + 1 threshold)",
        pass,
        &format!("infeasible at mu in {bad:?}; lambda_c(100) - 100 = {:.4}", lc100 - 100.0),
    );
}

#[test]
fn criterion_05_monotonicity() {
    let mut s = Stream::new(0xACCE_01, 5);
    let mut checked = 0u32;
    let mut failures = 0u32;
    while checked < 1_000 {
        let (l, m) = rand_pair(&mut s);
        let pair = IntensityPair::unit(l, m).unwrap();
        if !poisson::feasible_ii(&pair).unwrap().feasible {
            continue;
        }
        checked += 1;
        let lp = l + s.next_f64() * 5.0 + 1e-9;
        let up = poisson::feasible_ii(&IntensityPair::unit(lp, m).unwrap()).unwrap();
        let ray =
            poisson::feasible_ii(&IntensityPair::unit(lp, lp * m / l).unwrap()).unwrap();
        if !up.feasible || !ray.feasible {
            failures += 1;
        }
    }
    verdict(
        "5 (monotone in lambda and along rays)",
        failures == 0,
        &format!("{failures} failures on 10^3 feasible pairs"),
    );
}

#[test]
fn criterion_06_deletion_measure_oracle() {
    let mut s = Stream::new(0xACCE_01, 6);
    let samples = 100_000u64;
    let mut worst = 0.0f64;
    let mut failures = 0u32;
    for n in 2..=6usize {
        let p = 1.0 / n as f64;
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        for _ in 0..50 {
            let pts: Vec<UnitPoint> = (0..n - 1).map(|_| UnitPoint(s.next_u128())).collect();
            let b = PointSet::new(pts).unwrap();
            let est = deletion::r_set_measure(&b, samples);
            let dev = (est - p).abs() / se;
            worst = worst.max(dev);
            if dev > 3.0 {
                failures += 1;
            }
        }
    }
    verdict(
        "6 (deletion measure 1/n)",
        failures == 0,
        &format!("{failures} of 250 sets beyond 3 SE (worst {worst:.2} SE)"),
    );
}

#[test]
fn criterion_07_arc_set_measure() {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let mut s = Stream::new(0xACCE_01, 7);
    let mut failures = 0u32;
    for n in 2..=10usize {
        let target = BigRational::new(BigInt::from(1), BigInt::from(n as u64));
        for _ in 0..100 {
            let pts: Vec<CirclePoint> =
                (0..n - 1).map(|_| CirclePoint(s.next_u128())).collect();
            let b = CirclePointSet::new(pts).unwrap();
            if circle::t_set(&b).unwrap().measure() != target {
                failures += 1;
            }
        }
    }
    verdict(
        "7 (arc set measure exactly 1/n)",
        failures == 0,
        &format!("{failures} of 900 sets off the exact value"),
    );
}

#[test]
fn criterion_08_end_to_end_distribution() {
    let mut all = Vec::new();
    for &(l, m) in &[(2.0, 1.0), (1.45, 0.7), (5.5, 4.5)] {
        let config = verify::TrialConfig {
            trials: 100_000,
            seed: 0xE2E_5EED,
            lambda: l,
            mu: m,
            volume: 1.0,
            variant: verify::Variant::Unit,
            significance: 0.01,
        };
        let report = verify::certify(&config).unwrap();
        let failed: Vec<String> = report
            .tests
            .iter()
            .filter(|t| !t.pass)
            .map(|t| t.name.clone())
            .collect();
        all.push((l, m, report.overall_pass, failed));
    }
    let pass = all.iter().all(|(_, _, p, _)| *p);
    verdict(
        "8 (end-to-end distribution)",
        pass,
        &format!("{all:?}"),
    );
}

#[test]
fn criterion_09_mixture_identity() {
    let mut worst = 0.0f64;
    for &(l, m) in &[(2.0, 1.0), (1.45, 0.7), (5.5, 4.5)] {
        let k = poisson::require_feasible(&IntensityPair::unit(l, m).unwrap()).unwrap();
        let plan = coupling::build_plan(l, m, k).unwrap();
        let trunc = plan.truncation();
        let mut mix = vec![0.0; trunc + 1];
        for n in 0..=trunc {
            let q = coupling::conditional_law(&plan, n).unwrap();
            for (j, &mass) in q.masses().iter().enumerate() {
                if j <= trunc {
                    mix[j] += plan.x_pmf()[n] * mass;
                }
            }
        }
        let tv: f64 = (0..=trunc)
            .map(|j| (mix[j] - plan.y_pmf(j)).abs())
            .sum::<f64>()
            / 2.0;
        worst = worst.max(tv);
    }
    verdict(
        "9 (coupling mixture identity)",
        worst < 1e-9,
        &format!("worst total variation {worst:.3e}"),
    );
}

#[test]
fn criterion_10_circle_equivariance() {
    let mut s = Stream::new(0xACCE_01, 10);
    let mut failures = 0u32;
    for t in 0..1_000u32 {
        let n = 1 + (t as usize % 9);
        let pts: Vec<CirclePoint> = (0..n).map(|_| CirclePoint(s.next_u128())).collect();
        let set = CirclePointSet::new(pts).unwrap();
        let base = thin::thin_circle(&set, 2.0, 1.0).unwrap();
        for _ in 0..10 {
            let theta = CirclePoint(s.next_u128());
            let rotated = thin::thin_circle(&set.rotate(theta), 2.0, 1.0).unwrap();
            if rotated.kept != base.kept.rotate(theta) || rotated.degenerate != base.degenerate
            {
                failures += 1;
            }
        }
    }
    verdict(
        "10 (circle equivariance)",
        failures == 0,
        &format!("{failures} of 10^4 rotation checks broke bit-exact commutation"),
    );
}

#[test]
fn criterion_11_tiling() {
    let region = BoxSpec::new(vec![0.0], vec![20.0]).unwrap();
    // per-tile effective means: volume 2 cubes at (1.5, 1.0) mean (3, 2)
    let per_tile = poisson::feasible_ii(&IntensityPair::new(1.5, 1.0, 2.0).unwrap()).unwrap();

    let mut s = Stream::new(0xACCE_01, 11);
    let pts: Vec<Vec<UnitPoint>> = (0..60).map(|_| vec![UnitPoint(s.next_u128())]).collect();
    let p = EuclideanPointSet::from_fractions(1, pts.clone()).unwrap();
    let out = thin::tile_thin(&p, &region, 1.5, 1.0).unwrap();
    // tiles have length 2: indices of a 20-length region fall in 0..10
    let tiles_ok = out.occupied_cubes <= 10 && out.infeasible_cubes.is_empty();

    // locality: replace the points of one tile (fractions in [0.7, 0.8), the
    // eighth tile); all other tiles' survivors must be byte-identical
    let in_tile8 = |f: &UnitPoint| (0.7..0.8).contains(&f.to_f64());
    let mut perturbed: Vec<Vec<UnitPoint>> = pts
        .iter()
        .filter(|fr| !in_tile8(&fr[0]))
        .cloned()
        .collect();
    // fresh points inside tile 8 only: fraction in [0.7, 0.8)
    for _ in 0..9 {
        let f = 0.7 + s.next_f64() * 0.1;
        perturbed.push(vec![UnitPoint::from_f64(f).unwrap()]);
    }
    let p2 = EuclideanPointSet::from_fractions(1, perturbed).unwrap();
    let out2 = thin::tile_thin(&p2, &region, 1.5, 1.0).unwrap();
    let outside = |o: &thin::TileOutcome| -> Vec<Vec<UnitPoint>> {
        o.kept
            .fractions()
            .iter()
            .filter(|fr| !in_tile8(&fr[0]))
            .cloned()
            .collect()
    };
    let locality_ok = outside(&out) == outside(&out2);

    let pass = per_tile.feasible && tiles_ok && locality_ok;
    verdict(
        "11 (tiling)",
        pass,
        &format!(
            "per-tile (3,2) feasible = {}, occupied = {}, locality = {locality_ok}",
            per_tile.feasible, out.occupied_cubes
        ),
    );
}

#[test]
fn criterion_12_region_raster() {
    let grid = region::region_raster(7.0, 6.0, 0.01).unwrap();
    let find = |axis: &[f64], v: f64| axis.iter().position(|&x| (x - v).abs() < 1e-9).unwrap();
    let li = find(&grid.lambda_axis, 1.45);
    let feas_07 = grid.cells[li][find(&grid.mu_axis, 0.7)].unwrap().feasible;
    let infeas_06 = !grid.cells[li][find(&grid.mu_axis, 0.6)].unwrap().feasible;

    // the half-plane lambda >= mu + 1 is entirely feasible
    let mut half_plane_ok = true;
    for (i, &l) in grid.lambda_axis.iter().enumerate() {
        for (j, &m) in grid.mu_axis.iter().enumerate() {
            if l >= m + 1.0 - 1e-9 {
                if let Some(w) = &grid.cells[i][j] {
                    if !w.feasible {
                        half_plane_ok = false;
                    }
                }
            }
        }
    }

    // non-monotone notches: columns (fixed lambda) where feasibility is not
    // monotone in mu, appearing near half-integer lambda
    let mut notch_lambdas = Vec::new();
    for (i, &l) in grid.lambda_axis.iter().enumerate() {
        // ascending mu: an infeasible cell followed by a feasible one means
        // feasibility is not monotone in mu at this lambda
        let mut seen_infeasible_below = false;
        let mut notch = false;
        for j in 0..grid.mu_axis.len() {
            match &grid.cells[i][j] {
                Some(w) if !w.feasible => seen_infeasible_below = true,
                Some(w) if w.feasible && seen_infeasible_below => notch = true,
                _ => {}
            }
        }
        if notch {
            notch_lambdas.push(l);
        }
    }
    let notches_ok = notch_lambdas.iter().any(|&l| (l - 1.45).abs() < 0.1)
        && notch_lambdas.iter().any(|&l| (l - 2.5).abs() < 0.2);

    let pass = feas_07 && infeas_06 && half_plane_ok && notches_ok;
    verdict(
        "12 (region raster)",
        pass,
        &format!(
            "(1.45,0.7) feasible = {feas_07}, (1.45,0.6) infeasible = {infeas_06}, \
             half-plane = {half_plane_ok}, notch columns = {}",
            notch_lambdas.len()
        ),
    );
}
