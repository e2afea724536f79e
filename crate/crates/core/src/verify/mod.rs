//! Monte Carlo certification of the thinning maps.
//!
//! The suite samples Poisson processes, pushes them through a thinning
//! variant, and checks every distributional claim: output counts are
//! Poisson with the target mean (chi-square), surviving points are
//! conditionally uniform (KS of order statistics against Beta laws), the
//! subset and determinism guarantees hold exactly, circle thinning commutes
//! with rotations, and the small-n deletion oracles agree with their exact
//! values.
//!
//! All randomness is counter-based and keyed by `(seed, trial)`: the same
//! `TrialConfig` yields a bit-identical `TestReport` at any thread count.

pub mod rng;
pub mod stats;

use crate::circle;
use crate::coupling;
use crate::deletion;
use crate::error::{Result, ThinError};
use crate::point::{BoxSpec, CirclePoint, CirclePointSet, EuclideanPointSet, PointSet, UnitPoint};
use crate::poisson::{self, IntensityPair};
use crate::thin;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use rng::Stream;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Which thinning variant the suite exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Unit,
    Box,
    Circle,
    Tiled,
}

fn default_volume() -> f64 {
    1.0
}

fn default_significance() -> f64 {
    0.01
}

/// Configuration of one suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trials: u64,
    pub seed: u64,
    pub lambda: f64,
    pub mu: f64,
    #[serde(default = "default_volume")]
    pub volume: f64,
    pub variant: Variant,
    #[serde(default = "default_significance")]
    pub significance: f64,
}

impl TrialConfig {
    /// The shipped headline configuration: `(2, 1)` on the unit interval,
    /// 100k trials, significance 0.01.
    pub fn headline() -> TrialConfig {
        TrialConfig {
            trials: 100_000,
            seed: 0x0A11_D0_5EED,
            lambda: 2.0,
            mu: 1.0,
            volume: 1.0,
            variant: Variant::Unit,
            significance: 0.01,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(ThinError::Domain("trials must be >= 1".into()));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(ThinError::Domain(format!(
                "significance must lie in (0, 1), got {}",
                self.significance
            )));
        }
        Ok(())
    }
}

/// One line of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub name: String,
    pub statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub pass: bool,
}

impl TestResult {
    fn exact(name: &str, failures: u64) -> TestResult {
        TestResult {
            name: name.to_string(),
            statistic: failures as f64,
            p_value: None,
            pass: failures == 0,
        }
    }

    fn statistical(name: String, ts: stats::TestStat, significance: f64) -> TestResult {
        TestResult {
            name,
            statistic: ts.statistic,
            p_value: Some(ts.p_value),
            pass: ts.p_value > significance,
        }
    }
}

/// The aggregated verdict of one suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub config: TrialConfig,
    pub tests: Vec<TestResult>,
    pub overall_pass: bool,
}

// ---------------------------------------------------------------------------
// sampling
// ---------------------------------------------------------------------------

/// Sample a Poisson process of intensity `lambda` on a space of volume
/// `vol`: a Poisson(lambda * vol) count of i.i.d. 128-bit uniform points.
pub fn sample_process(lambda: f64, vol: f64, stream: &mut Stream) -> Result<PointSet> {
    let n = stream.next_poisson(lambda * vol);
    let mut pts = BTreeSet::new();
    while (pts.len() as u64) < n {
        pts.insert(UnitPoint(stream.next_u128()));
    }
    PointSet::new(pts.into_iter().collect())
}

fn sample_circle(mean: f64, stream: &mut Stream) -> Result<CirclePointSet> {
    let n = stream.next_poisson(mean);
    let mut pts = BTreeSet::new();
    while (pts.len() as u64) < n {
        pts.insert(CirclePoint(stream.next_u128()));
    }
    CirclePointSet::new(pts.into_iter().collect())
}

fn sample_euclidean(mean: f64, dim: usize, stream: &mut Stream) -> Result<EuclideanPointSet> {
    let n = stream.next_poisson(mean);
    let mut coords = Vec::with_capacity(n as usize);
    for _ in 0..n {
        coords.push((0..dim).map(|_| UnitPoint(stream.next_u128())).collect());
    }
    EuclideanPointSet::from_fractions(dim, coords)
}

// ---------------------------------------------------------------------------
// the suite
// ---------------------------------------------------------------------------

const MAX_COUNT_BIN: usize = 96;
const DETERMINISM_TRIALS: u64 = 100;
const EQUIVARIANCE_TRIALS: u64 = 50;
const ORDER_STAT_MAX_M: usize = 3;
const ORDER_STAT_MIN_SAMPLES: usize = 50;

#[derive(Clone)]
struct TrialOutcome {
    n_out: usize,
    subset_ok: bool,
    deterministic: bool,
    equivariant: bool,
    degenerate: bool,
    /// First-coordinate uniforms of the survivors, sorted, when the output
    /// count is small enough for the order-statistic tests.
    order_stats: Option<Vec<f64>>,
}

fn run_trial(
    config: &TrialConfig,
    plan: &coupling::CouplingPlan,
    trial: u64,
) -> Result<TrialOutcome> {
    let mut stream = Stream::new(config.seed, trial);
    let (le, me) = (config.lambda * config.volume, config.mu * config.volume);
    let check_det = trial < DETERMINISM_TRIALS;
    let check_eq = trial < EQUIVARIANCE_TRIALS;

    let (n_out, subset_ok, deterministic, equivariant, degenerate, uniforms): (
        usize,
        bool,
        bool,
        bool,
        bool,
        Vec<f64>,
    ) = match config.variant {
        Variant::Unit => {
            let input = sample_process(config.lambda, config.volume, &mut stream)?;
            let out = thin::thin_unit_planned(&input, plan)?;
            let det = !check_det || thin::thin_unit_planned(&input, plan)? == out;
            let us = out.iter().map(|p| p.to_f64()).collect();
            (out.len(), out.is_subset_of(&input), det, true, false, us)
        }
        Variant::Box => {
            let bx = BoxSpec::new(vec![0.0, 0.0], vec![config.volume, 1.0])?;
            let input = sample_euclidean(le, 2, &mut stream)?;
            let out = thin::thin_box(&input, &bx, config.lambda, config.mu)?;
            let det = !check_det
                || thin::thin_box(&input, &bx, config.lambda, config.mu)? == out;
            let subset = out
                .fractions()
                .iter()
                .all(|fr| input.fractions().contains(fr));
            let us = out.fractions().iter().map(|fr| fr[0].to_f64()).collect();
            (out.len(), subset, det, true, false, us)
        }
        Variant::Circle => {
            let input = sample_circle(le, &mut stream)?;
            let out = thin::thin_circle(&input, le, me)?;
            let det = !check_det || thin::thin_circle(&input, le, me)? == out;
            let eq = !check_eq || {
                let theta = CirclePoint(stream.next_u128());
                let rotated = thin::thin_circle(&input.rotate(theta), le, me)?;
                rotated.kept == out.kept.rotate(theta)
            };
            let us = out.kept.points().iter().map(|p| p.to_f64()).collect();
            (
                out.kept.len(),
                out.kept.is_subset_of(&input),
                det,
                eq,
                out.degenerate,
                us,
            )
        }
        Variant::Tiled => {
            let region = BoxSpec::new(vec![0.0], vec![config.volume])?;
            let input = sample_euclidean(le, 1, &mut stream)?;
            let out = thin::tile_thin(&input, &region, config.lambda, config.mu)?;
            let det = !check_det
                || thin::tile_thin(&input, &region, config.lambda, config.mu)? == out;
            let subset = out
                .kept
                .fractions()
                .iter()
                .all(|fr| input.fractions().contains(fr));
            let degen = !out.infeasible_cubes.is_empty();
            let us = out
                .kept
                .fractions()
                .iter()
                .map(|fr| fr[0].to_f64())
                .collect();
            (out.kept.len(), subset, det, true, degen, us)
        }
    };

    let order_stats = if (1..=ORDER_STAT_MAX_M).contains(&n_out) && !degenerate {
        let mut v = uniforms;
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Some(v)
    } else {
        None
    };
    Ok(TrialOutcome {
        n_out,
        subset_ok,
        deterministic,
        equivariant,
        degenerate,
        order_stats,
    })
}

fn small_n_oracles(significance: f64) -> Vec<TestResult> {
    let mut out = Vec::new();
    // exact arc-set measure on the circle: T has measure exactly 1/n
    let mut exact_fail = 0u64;
    let mut x = 0xBEEF_u64;
    for n in 2..=6usize {
        let pts: Vec<CirclePoint> = (0..n - 1)
            .map(|_| {
                x = deletion::mix64(x);
                let hi = x;
                x = deletion::mix64(x);
                CirclePoint(((hi as u128) << 64) | x as u128)
            })
            .collect();
        let b = CirclePointSet::new(pts).expect("distinct");
        let t = circle::t_set(&b).expect("valid survivor set");
        let target = BigRational::new(BigInt::one(), BigInt::from(n as u64));
        if t.measure() != target {
            exact_fail += 1;
        }
    }
    out.push(TestResult::exact("t_set_measure_exact", exact_fail));

    // interval deletion: the estimated measure of the set that deletes back
    // to B is 1/n, within stratified-sampling error
    let samples = 40_000u64;
    let mut worst = 0.0f64;
    let mut pass = true;
    for n in 2..=5usize {
        let pts: Vec<UnitPoint> = (0..n - 1)
            .map(|_| {
                x = deletion::mix64(x);
                let hi = x;
                x = deletion::mix64(x);
                UnitPoint(((hi as u128) << 64) | x as u128)
            })
            .collect();
        let b = PointSet::new(pts).expect("distinct");
        let est = deletion::r_set_measure(&b, samples);
        let p = 1.0 / n as f64;
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        let err = (est - p).abs();
        worst = worst.max(err / se);
        if err > 4.0 * se + 1e-3 {
            pass = false;
        }
    }
    out.push(TestResult {
        name: "r_set_measure_oracle".to_string(),
        statistic: worst,
        p_value: None,
        pass,
    });
    let _ = significance;
    out
}

/// Run the full suite once. Fails early (with the blocking k) when the
/// configured pair is infeasible for its volume.
pub fn run_suite(config: &TrialConfig) -> Result<TestReport> {
    config.validate()?;
    let pair = IntensityPair::new(config.lambda, config.mu, config.volume)?;
    poisson::require_feasible(&pair)?;
    // build the coupling tables once; every trial reuses them
    let (le, me) = pair.effective_means();
    let k = poisson::require_feasible(&pair)?;
    let plan = coupling::build_plan(le, me, k)?;

    let threads = std::env::var("THIN_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ThinError::Internal(format!("thread pool: {e}")))?;

    let outcomes: Vec<TrialOutcome> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, &plan, t))
            .collect::<Result<Vec<_>>>()
    })?;

    // aggregate (order-independent: histograms and sorted multisets)
    let mut hist = vec![0u64; MAX_COUNT_BIN + 1];
    let mut subset_fail = 0u64;
    let mut det_fail = 0u64;
    let mut eq_fail = 0u64;
    let mut degenerate = 0u64;
    let mut order: Vec<Vec<Vec<f64>>> = (1..=ORDER_STAT_MAX_M)
        .map(|m| vec![Vec::new(); m])
        .collect();
    let mut clean_trials = 0u64;
    for o in &outcomes {
        if o.degenerate {
            degenerate += 1;
        } else {
            hist[o.n_out.min(MAX_COUNT_BIN)] += 1;
            clean_trials += 1;
        }
        if !o.subset_ok {
            subset_fail += 1;
        }
        if !o.deterministic {
            det_fail += 1;
        }
        if !o.equivariant {
            eq_fail += 1;
        }
        if let Some(os) = &o.order_stats {
            let m = os.len();
            for (i, &v) in os.iter().enumerate() {
                order[m - 1][i].push(v);
            }
        }
    }

    let mut tests = Vec::new();
    tests.push(TestResult::statistical(
        "count_chi_square".to_string(),
        stats::chi_square_poisson(&hist, me, clean_trials)?,
        config.significance,
    ));
    for m in 1..=ORDER_STAT_MAX_M {
        for i in 1..=m {
            let samples = &mut order[m - 1][i - 1];
            let name = format!("order_stat_ks_m{m}_i{i}");
            if samples.len() < ORDER_STAT_MIN_SAMPLES {
                tests.push(TestResult {
                    name,
                    statistic: samples.len() as f64,
                    p_value: None,
                    pass: true, // too few conditioning events to test
                });
                continue;
            }
            let (a, b) = (i as f64, (m + 1 - i) as f64);
            let ts = stats::ks_test(samples, |x| {
                stats::beta_cdf(a, b, x).unwrap_or(f64::NAN)
            })?;
            tests.push(TestResult::statistical(name, ts, config.significance));
        }
    }
    tests.push(TestResult::exact("subset_exact", subset_fail));
    tests.push(TestResult::exact("determinism_exact", det_fail));
    if config.variant == Variant::Circle {
        tests.push(TestResult::exact("rotation_equivariance_exact", eq_fail));
        tests.push(TestResult {
            name: "degenerate_tie_rate".to_string(),
            statistic: degenerate as f64,
            p_value: None,
            pass: degenerate == 0, // ties have probability zero for i.i.d. angles
        });
    }
    tests.extend(small_n_oracles(config.significance));

    let overall_pass = tests.iter().all(|t| t.pass);
    Ok(TestReport {
        config: config.clone(),
        tests,
        overall_pass,
    })
}

/// Run the suite with the fixed retry discipline: a correct implementation
/// fails any single test with probability at most the significance level, so
/// one failing run is re-run once on a derived seed; two consecutive
/// failures are red.
pub fn certify(config: &TrialConfig) -> Result<TestReport> {
    let first = run_suite(config)?;
    if first.overall_pass {
        return Ok(first);
    }
    let mut retry = config.clone();
    retry.seed = deletion::mix64(config.seed ^ 0x5EC0_4D_7B1A1);
    run_suite(&retry)
}
