//! The monotone coupling of Poisson counts used by the thinning engine.
//!
//! For an intensity pair satisfying the feasibility condition with witness k,
//! the input count X and output count Y are coupled through a single uniform
//! U: `X = F_X^-1(U)`, `V = F_V^-1(U)`, `Y = X` on `{X <= k}` and `Y = V` on
//! `{X > k}`, where V carries the mass function
//!
//! ```text
//! m(0)   = P(Y=0) - P(X=0) + P(X <= k)
//! m(j)   = P(Y=j) - P(X=j)            for 1 <= j <= k
//! m(j)   = P(Y=j)                     for j > k
//! ```
//!
//! `W := (X-1) 1{X>k}` stochastically dominates V, which makes the coupling
//! monotone: X = Y on `{X <= k}` and X > Y on `{X > k}`. The conditional laws
//! `Q_n` of Y given `X = n` fall out of the shared-uniform realization as
//! push-forwards of U restricted to `[F_X(n-1), F_X(n))`.

use crate::error::{Result, ThinError};
use crate::poisson::{self, IntensityPair};
use serde::{Deserialize, Serialize};

/// Tail mass allowed to be cut from a truncated law.
pub const TAIL_TOL: f64 = 1e-12;

/// Negative dust tolerated from floating-point cancellation before clamping.
const CLAMP_TOL: f64 = 1e-14;

/// A finite probability vector indexed from 0, with a record of where the
/// underlying infinite law was truncated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteLaw {
    masses: Vec<f64>,
    /// Index at which an infinite support was cut, and the folded tail mass.
    pub tail_cut: Option<(usize, f64)>,
}

impl DiscreteLaw {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(ThinError::Domain("law must have nonempty support".into()));
        }
        let mut sum = 0.0;
        for (j, &m) in masses.iter().enumerate() {
            if !(m >= 0.0) {
                return Err(ThinError::Domain(format!("mass at {j} is negative: {m}")));
            }
            sum += m;
        }
        if sum > 1.0 + TAIL_TOL {
            return Err(ThinError::Domain(format!("masses sum to {sum} > 1")));
        }
        Ok(DiscreteLaw {
            masses,
            tail_cut: None,
        })
    }

    pub fn point_mass(at: usize) -> Self {
        let mut masses = vec![0.0; at + 1];
        masses[at] = 1.0;
        DiscreteLaw {
            masses,
            tail_cut: None,
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn support_len(&self) -> usize {
        self.masses.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Generalized inverse cdf: the smallest j with `u < F(j)`.
    pub fn quantile(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (j, &m) in self.masses.iter().enumerate() {
            acc += m;
            if u < acc {
                return j;
            }
        }
        self.masses.len() - 1
    }

    pub fn cdf_table(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.masses
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect()
    }
}

/// True iff `w` stochastically dominates `v`: `F_W(j) <= F_V(j)` for every j
/// up to the common truncation.
pub fn dominance_check(w_law: &DiscreteLaw, v_law: &DiscreteLaw) -> bool {
    let n = w_law.support_len().max(v_law.support_len());
    let mut fw = 0.0;
    let mut fv = 0.0;
    for j in 0..n {
        fw += w_law.masses.get(j).copied().unwrap_or(0.0);
        fv += v_law.masses.get(j).copied().unwrap_or(0.0);
        if fw > fv + TAIL_TOL {
            return false;
        }
    }
    true
}

/// Precomputed coupling tables for one `(lambda_eff, mu_eff, k)`.
#[derive(Debug, Clone)]
pub struct CouplingPlan {
    pub lambda_eff: f64,
    pub mu_eff: f64,
    pub k: u32,
    /// The mass function m (law of V).
    pub v_law: DiscreteLaw,
    x_pmf: Vec<f64>,
    x_cdf: Vec<f64>,
    v_cdf: Vec<f64>,
}

impl CouplingPlan {
    pub fn truncation(&self) -> usize {
        self.x_pmf.len() - 1
    }

    pub fn x_pmf(&self) -> &[f64] {
        &self.x_pmf
    }

    pub fn y_pmf(&self, j: usize) -> f64 {
        // reconstruct P(Y=j) from the m branches
        let k = self.k as usize;
        if j == 0 {
            let px_le_k: f64 = self.x_pmf.iter().take(k + 1).sum();
            self.v_law.masses()[0] + self.x_pmf[0] - px_le_k
        } else if j <= k {
            self.v_law.masses()[j] + self.x_pmf[j]
        } else {
            self.v_law.masses().get(j).copied().unwrap_or(0.0)
        }
    }
}

/// Build the coupling tables; fails if condition (ii) does not hold at
/// `(lambda_eff, mu_eff, k)`, and loudly if an internal identity that the
/// feasibility condition guarantees (m >= 0, dominance of W over V) breaks.
pub fn build_plan(lambda_eff: f64, mu_eff: f64, k: u32) -> Result<CouplingPlan> {
    let pair = IntensityPair::unit(lambda_eff, mu_eff)?;
    if pair.lambda <= pair.mu {
        return Err(ThinError::Domain(
            "coupling requires lambda_eff > mu_eff".into(),
        ));
    }
    if !condition_ii_holds(lambda_eff, mu_eff, k)? {
        return Err(ThinError::Domain(format!(
            "condition (ii) fails at (lambda {lambda_eff}, mu {mu_eff}, k {k})"
        )));
    }

    // truncate both laws where the X cdf clears 1 - TAIL_TOL (X has the
    // heavier tail), with slack for the k-window
    let mut trunc = k as usize + 1;
    loop {
        if poisson::poisson_cdf(lambda_eff, trunc as u64)? > 1.0 - TAIL_TOL {
            break;
        }
        trunc += 1;
    }

    let mut x_pmf: Vec<f64> = (0..=trunc)
        .map(|j| poisson::poisson_pmf(lambda_eff, j as u64))
        .collect::<Result<_>>()?;
    let mut y_pmf: Vec<f64> = (0..=trunc)
        .map(|j| poisson::poisson_pmf(mu_eff, j as u64))
        .collect::<Result<_>>()?;
    // fold tails into the last atom
    let x_tail = (1.0 - x_pmf.iter().sum::<f64>()).max(0.0);
    let y_tail = (1.0 - y_pmf.iter().sum::<f64>()).max(0.0);
    *x_pmf.last_mut().unwrap() += x_tail;
    *y_pmf.last_mut().unwrap() += y_tail;

    let ku = k as usize;
    let px_le_k: f64 = x_pmf.iter().take(ku + 1).sum();
    let mut m = vec![0.0; trunc + 1];
    for j in 0..=trunc {
        let raw = if j == 0 {
            y_pmf[0] - x_pmf[0] + px_le_k
        } else if j <= ku {
            y_pmf[j] - x_pmf[j]
        } else {
            y_pmf[j]
        };
        if raw < -CLAMP_TOL {
            return Err(ThinError::Internal(format!(
                "m({j}) = {raw} < 0 at (lambda {lambda_eff}, mu {mu_eff}, k {k}); \
                 condition (ii) should force nonnegativity"
            )));
        }
        m[j] = raw.max(0.0);
    }
    let total: f64 = m.iter().sum();
    if (total - 1.0).abs() > TAIL_TOL * 10.0 {
        return Err(ThinError::Internal(format!(
            "masses of m sum to {total}, expected 1"
        )));
    }
    for v in m.iter_mut() {
        *v /= total;
    }

    let mut v_law = DiscreteLaw::new(m)?;
    v_law.tail_cut = Some((trunc, y_tail));

    let x_cdf: Vec<f64> = {
        let mut acc = 0.0;
        x_pmf
            .iter()
            .map(|p| {
                acc += p;
                acc.min(1.0)
            })
            .collect()
    };
    let v_cdf = v_law.cdf_table();

    // dominance of W = (X-1) 1{X>k} over V: F_W(j) = P(X<=k) for j < k,
    // F_X(j+1) for j >= k
    for j in 0..=trunc {
        let fw = if j < ku {
            px_le_k
        } else {
            x_cdf.get(j + 1).copied().unwrap_or(1.0)
        };
        if fw > v_cdf[j] + TAIL_TOL * 10.0 {
            return Err(ThinError::Internal(format!(
                "dominance F_W({j}) = {fw} > F_V({j}) = {}; the feasibility \
                 condition should rule this out",
                v_cdf[j]
            )));
        }
    }

    Ok(CouplingPlan {
        lambda_eff,
        mu_eff,
        k,
        v_law,
        x_pmf,
        x_cdf,
        v_cdf,
    })
}

fn condition_ii_holds(lambda_eff: f64, mu_eff: f64, k: u32) -> Result<bool> {
    let tol = poisson::LOG_TIE_TOL;
    let pmf_ok = poisson::poisson_ln_pmf(lambda_eff, k as u64)?
        <= poisson::poisson_ln_pmf(mu_eff, k as u64)? + tol;
    let cdf_ok = poisson::poisson_ln_cdf(lambda_eff, k as u64 + 1)?
        <= poisson::poisson_ln_cdf(mu_eff, k as u64)? + tol;
    Ok(pmf_ok && cdf_ok)
}

/// The conditional law `Q_n` of the output count given input count n.
///
/// For `n <= k` this is the point mass at n; for `n > k` it is the
/// push-forward of the shared uniform restricted to `[F_X(n-1), F_X(n))`
/// through the inverse cdf of V. Its support lies in `{0, ..., n-1}`.
pub fn conditional_law(plan: &CouplingPlan, n: usize) -> Result<DiscreteLaw> {
    let k = plan.k as usize;
    if n <= k {
        return Ok(DiscreteLaw::point_mass(n));
    }
    let trunc = plan.truncation();
    // inputs beyond the truncation share the folded top atom's u-interval
    let nc = n.min(trunc);
    let u_lo = if nc == 0 { 0.0 } else { plan.x_cdf[nc - 1] };
    let u_hi = if nc == trunc { 1.0 } else { plan.x_cdf[nc] };
    let width = u_hi - u_lo;
    if width <= 0.0 {
        // count so deep in the tail that its pmf underflowed; V is pinned to
        // its upper quantile there
        let j = plan.v_cdf.iter().position(|&f| f >= u_lo).unwrap_or(trunc);
        return Ok(DiscreteLaw::point_mass(j.min(n - 1)));
    }
    let mut masses = vec![0.0; n];
    let mut spill = 0.0;
    for j in 0..=trunc {
        let f_lo = if j == 0 { 0.0 } else { plan.v_cdf[j - 1] };
        let f_hi = if j == trunc { 1.0 } else { plan.v_cdf[j] };
        let overlap = (f_hi.min(u_hi) - f_lo.max(u_lo)).max(0.0);
        if overlap > 0.0 {
            if j < n {
                masses[j] = overlap / width;
            } else {
                spill += overlap / width;
            }
        }
    }
    // dominance forbids genuine mass at or above n; what remains is
    // rounding dust from tail intervals of width comparable to TAIL_TOL,
    // which can be a large fraction of a tiny u-interval. Judge it by
    // absolute probability and fold it into the top admissible value.
    if spill * width > 1e-9 {
        return Err(ThinError::Internal(format!(
            "Q_{n} places mass {} at or above n; dominance should forbid it",
            spill * width
        )));
    }
    masses[n - 1] += spill;
    let total: f64 = masses.iter().sum();
    if total <= 0.0 {
        return Err(ThinError::Internal(format!("Q_{n} came out empty")));
    }
    for v in masses.iter_mut() {
        *v /= total;
    }
    DiscreteLaw::new(masses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::poisson_pmf;

    #[test]
    fn m_branches_at_paper_example() {
        let plan = build_plan(1.45, 0.7, 1).unwrap();
        let m = plan.v_law.masses();
        let p_y0 = poisson_pmf(0.7, 0).unwrap();
        let p_x0 = poisson_pmf(1.45, 0).unwrap();
        let p_x_le_1 = p_x0 + poisson_pmf(1.45, 1).unwrap();
        assert!((m[0] - (p_y0 - p_x0 + p_x_le_1)).abs() < 1e-12);
        // third branch verbatim for j > k
        for j in 2..10 {
            assert!(
                (m[j] - poisson_pmf(0.7, j as u64).unwrap()).abs() < 1e-12,
                "m({j})"
            );
        }
        assert!((plan.v_law.total_mass() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn plan_rejects_invalid_inputs() {
        // (1.45, 0.6) is infeasible at every k; k = 0 fails condition (ii)
        assert!(build_plan(1.45, 0.6, 0).is_err());
        // wrong witness for a feasible pair
        assert!(build_plan(1.45, 0.7, 0).is_err());
        assert!(build_plan(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn dominance_basics() {
        let a = DiscreteLaw::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert!(dominance_check(&a, &a));
        // Poisson(2) dominates Poisson(1)
        let p2 = DiscreteLaw::new((0..40).map(|j| poisson_pmf(2.0, j).unwrap()).collect()).unwrap();
        let p1 = DiscreteLaw::new((0..40).map(|j| poisson_pmf(1.0, j).unwrap()).collect()).unwrap();
        assert!(dominance_check(&p2, &p1));
        assert!(!dominance_check(&p1, &p2));
    }

    #[test]
    fn conditional_law_support() {
        let plan = build_plan(2.0, 1.0, 1).unwrap();
        // n <= k: point mass at n
        let q0 = conditional_law(&plan, 0).unwrap();
        assert_eq!(q0.quantile(0.5), 0);
        let q1 = conditional_law(&plan, 1).unwrap();
        assert_eq!(q1.masses()[1], 1.0);
        // n > k: support within {0..n-1}
        for n in 2..12 {
            let q = conditional_law(&plan, n).unwrap();
            assert!(q.support_len() <= n);
            assert!((q.total_mass() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn mixture_identity() {
        for &(l, mu, k) in &[(1.45, 0.7, 1u32), (2.0, 1.0, 1), (5.5, 4.5, 5), (101.0, 100.0, 100)]
        {
            let k = if condition_ii_holds(l, mu, k).unwrap() {
                k
            } else {
                crate::poisson::require_feasible(&IntensityPair::unit(l, mu).unwrap()).unwrap()
            };
            let plan = build_plan(l, mu, k).unwrap();
            let trunc = plan.truncation();
            let mut mix = vec![0.0; trunc + 1];
            for n in 0..=trunc {
                let q = conditional_law(&plan, n).unwrap();
                let px = plan.x_pmf()[n];
                for (j, &mj) in q.masses().iter().enumerate() {
                    if j <= trunc {
                        mix[j] += px * mj;
                    }
                }
            }
            let tv: f64 = (0..=trunc)
                .map(|j| (mix[j] - plan.y_pmf(j)).abs())
                .sum::<f64>()
                / 2.0;
            assert!(tv < 1e-9, "TV {tv} at ({l}, {mu})");
        }
    }

    #[test]
    fn quantile_inverse_cdf() {
        let law = DiscreteLaw::new(vec![0.25, 0.25, 0.5]).unwrap();
        assert_eq!(law.quantile(0.0), 0);
        assert_eq!(law.quantile(0.2499), 0);
        assert_eq!(law.quantile(0.25), 1);
        assert_eq!(law.quantile(0.9999), 2);
    }
}
