//! Statistical tests used by the certification suite: chi-square with tail
//! pooling, Kolmogorov-Smirnov against an arbitrary continuous cdf, and the
//! Beta cdf for order-statistic checks.

use crate::error::{Result, ThinError};
use crate::poisson;
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

/// Result of one statistical test.
#[derive(Debug, Clone, Copy)]
pub struct TestStat {
    pub statistic: f64,
    pub p_value: f64,
}

/// Chi-square goodness of fit of observed counts against Poisson(mean).
///
/// `observed[j]` is the number of trials with count j. Bins are pooled from
/// both ends until every expected count is at least 5; the top pooled bin
/// absorbs the infinite tail.
pub fn chi_square_poisson(observed: &[u64], mean: f64, trials: u64) -> Result<TestStat> {
    if trials == 0 {
        return Err(ThinError::Domain("chi-square needs trials >= 1".into()));
    }
    let n = trials as f64;
    // expected mass per raw bin, the last raw bin holding the tail
    let top = observed.len().max((mean + 10.0 * mean.sqrt()) as usize + 2);
    let mut expected: Vec<f64> = (0..top)
        .map(|j| Ok(n * poisson::poisson_pmf(mean, j as u64)?))
        .collect::<Result<_>>()?;
    let tail = n - expected.iter().sum::<f64>();
    expected.push(tail.max(0.0));
    let mut obs: Vec<f64> = (0..=top)
        .map(|j| *observed.get(j).unwrap_or(&0) as f64)
        .collect();
    // anything at or beyond the tail bin piles into it
    obs[top] += observed.iter().skip(top + 1).sum::<u64>() as f64;

    // pool adjacent bins until every expected >= 5
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (o, e) in obs.iter().zip(&expected) {
        acc.0 += o;
        acc.1 += e;
        if acc.1 >= 5.0 {
            pooled.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.1 > 0.0 {
        // leftover tail: merge into the last pooled bin
        match pooled.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => pooled.push(acc),
        }
    }
    if pooled.len() < 2 {
        return Err(ThinError::Domain(
            "too few trials for a chi-square bin layout".into(),
        ));
    }
    let stat: f64 = pooled
        .iter()
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let df = (pooled.len() - 1) as f64;
    let chi = ChiSquared::new(df)
        .map_err(|e| ThinError::Internal(format!("chi-square df {df}: {e}")))?;
    Ok(TestStat {
        statistic: stat,
        p_value: 1.0 - chi.cdf(stat),
    })
}

/// Asymptotic Kolmogorov distribution tail `P(K > t)` with the finite-sample
/// correction of the effective sample size.
pub fn kolmogorov_p(d: f64, n: usize) -> f64 {
    if n == 0 || d <= 0.0 {
        return 1.0;
    }
    let sn = (n as f64).sqrt();
    let t = d * (sn + 0.12 + 0.11 / sn);
    let mut p = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * t * t).exp();
        p += if j % 2 == 1 { 2.0 * term } else { -2.0 * term };
        if term < 1e-18 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// One-sample KS test of `samples` against the continuous cdf `f`.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &mut [f64], f: F) -> Result<TestStat> {
    let n = samples.len();
    if n == 0 {
        return Err(ThinError::Domain("KS test needs samples".into()));
    }
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let fx = f(x);
        d = d.max(fx - i as f64 / nf).max((i + 1) as f64 / nf - fx);
    }
    Ok(TestStat {
        statistic: d,
        p_value: kolmogorov_p(d, n),
    })
}

/// The cdf of Beta(a, b), for order-statistic checks: the i-th of m uniform
/// order statistics is Beta(i, m + 1 - i).
pub fn beta_cdf(a: f64, b: f64, x: f64) -> Result<f64> {
    let beta = Beta::new(a, b)
        .map_err(|e| ThinError::Internal(format!("beta({a}, {b}): {e}")))?;
    Ok(beta.cdf(x.clamp(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::rng::Stream;

    #[test]
    fn chi_square_accepts_true_law() {
        // exact expected counts: statistic 0, p-value 1... instead feed a
        // genuine Poisson sample
        let mean = 2.0;
        let trials = 50_000u64;
        let mut hist = vec![0u64; 32];
        for t in 0..trials {
            let mut s = Stream::new(123, t);
            let k = s.next_poisson(mean) as usize;
            if k < hist.len() {
                hist[k] += 1;
            }
        }
        let ts = chi_square_poisson(&hist, mean, trials).unwrap();
        assert!(ts.p_value > 0.001, "p = {}", ts.p_value);
    }

    #[test]
    fn chi_square_rejects_wrong_law() {
        let mean = 2.0;
        let trials = 50_000u64;
        let mut hist = vec![0u64; 32];
        for t in 0..trials {
            let mut s = Stream::new(123, t);
            let k = s.next_poisson(2.5) as usize;
            if k < hist.len() {
                hist[k] += 1;
            }
        }
        let ts = chi_square_poisson(&hist, mean, trials).unwrap();
        assert!(ts.p_value < 1e-6, "p = {}", ts.p_value);
    }

    #[test]
    fn kolmogorov_known_values() {
        // P(K > 1.36 / (sqrt n correction)) ~ 0.05 is the classic quantile;
        // check the raw asymptotic series at t = 1.36
        let mut p = 0.0;
        for j in 1..50 {
            let jf = j as f64;
            let s = (-2.0 * jf * jf * 1.36f64 * 1.36).exp();
            p += if j % 2 == 1 { 2.0 * s } else { -2.0 * s };
        }
        assert!((p - 0.0505).abs() < 0.002, "p = {p}");
    }

    #[test]
    fn ks_accepts_uniform_rejects_skewed() {
        let n = 5_000;
        let mut s = Stream::new(5, 0);
        let mut unif: Vec<f64> = (0..n).map(|_| s.next_f64()).collect();
        let ts = ks_test(&mut unif, |x| x).unwrap();
        assert!(ts.p_value > 0.001, "uniform p = {}", ts.p_value);

        let mut skew: Vec<f64> = (0..n).map(|_| s.next_f64().powi(2)).collect();
        let ts = ks_test(&mut skew, |x| x).unwrap();
        assert!(ts.p_value < 1e-8, "skewed p = {}", ts.p_value);
    }

    #[test]
    fn beta_cdf_uniform_case() {
        // Beta(1,1) is uniform
        assert!((beta_cdf(1.0, 1.0, 0.3).unwrap() - 0.3).abs() < 1e-12);
        // median of Beta(2,2) is 0.5
        assert!((beta_cdf(2.0, 2.0, 0.5).unwrap() - 0.5).abs() < 1e-12);
    }
}
