//! Counter-based random streams for the Monte Carlo harness.
//!
//! Every draw is a pure hash of `(seed, trial, index)`, so streams can be
//! split across trials and consumed in parallel with no sequencing
//! dependence; a given `(seed, trial)` always replays the same stream. Only
//! the harness uses randomness — the thinning maps never do.

use crate::poisson::ln_factorial;

/// Two-word mix built from the SplitMix64 finalizer, applied twice with the
/// second word injected between rounds.
fn mix2(a: u64, b: u64) -> u64 {
    crate::deletion::mix64(crate::deletion::mix64(a).wrapping_add(b ^ 0xD1B5_4A32_D192_ED03))
}

/// A counter-based stream keyed by `(seed, trial)`.
#[derive(Debug, Clone)]
pub struct Stream {
    key: u64,
    counter: u64,
}

impl Stream {
    pub fn new(seed: u64, trial: u64) -> Stream {
        Stream {
            key: mix2(seed, trial),
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let c = self.counter;
        self.counter += 1;
        mix2(self.key, c)
    }

    pub fn next_u128(&mut self) -> u128 {
        ((self.next_u64() as u128) << 64) | self.next_u64() as u128
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A Poisson draw: sequential inversion for small means, transformed
    /// rejection (PTRS) above.
    pub fn next_poisson(&mut self, mean: f64) -> u64 {
        assert!(mean > 0.0 && mean.is_finite());
        if mean <= 30.0 {
            self.poisson_inversion(mean)
        } else {
            self.poisson_ptrs(mean)
        }
    }

    fn poisson_inversion(&mut self, mean: f64) -> u64 {
        let mut u = self.next_f64();
        let mut p = (-mean).exp();
        let mut k = 0u64;
        while u >= p {
            u -= p;
            k += 1;
            p *= mean / k as f64;
            if k > 1000 {
                break; // p underflowed; u was in the far tail
            }
        }
        k
    }

    fn poisson_ptrs(&mut self, mean: f64) -> u64 {
        let b = 0.931 + 2.53 * mean.sqrt();
        let a = -0.059 + 0.024_83 * b;
        let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        let vr = 0.9277 - 3.6224 / (b - 2.0);
        let ln_mean = mean.ln();
        loop {
            let u = self.next_f64() - 0.5;
            let v = self.next_f64();
            let us = 0.5 - u.abs();
            let kf = ((2.0 * a / us + b) * u + mean + 0.43).floor();
            if us >= 0.07 && v <= vr {
                return kf as u64;
            }
            if kf < 0.0 || (us < 0.013 && v > us) {
                continue;
            }
            let k = kf as u64;
            let lhs = (v * inv_alpha / (a / (us * us) + b)).ln();
            if lhs <= kf * ln_mean - mean - ln_factorial(k) {
                return k;
            }
        }
    }
}
