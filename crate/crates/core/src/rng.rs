//! Deterministic counter-based random numbers for the Monte Carlo engine.
//!
//! Each draw is a pure function of (seed, stream, counter) through the
//! SplitMix64 output permutation, so any shot can be generated
//! independently of every other. Substreams are keyed by shot index, which
//! makes results identical under any thread partitioning. Not
//! cryptographic.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based generator: the n-th output for a given (seed, stream) key
/// is `mix(key + n·GOLDEN)` — the SplitMix64 sequence.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    /// Root stream for a seed.
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    /// Independent substream `stream` of `seed` (one per Monte Carlo shot).
    pub fn substream(seed: u64, stream: u64) -> Self {
        let key = mix(mix(seed ^ GOLDEN).wrapping_add(mix(stream.wrapping_mul(0xD605_BBB5_8C8A_BC2D) ^ 0x2545_F491_4F6C_DD1D)));
        Self { key, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform strictly inside (0, 1); safe for log/tan transforms.
    #[inline]
    pub fn next_open_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.next_open_f64();
        let u2 = self.next_open_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Zero-centered Lorentzian (Cauchy) deviate with half width at half
    /// maximum `hwhm`.
    pub fn lorentzian(&mut self, hwhm: f64) -> f64 {
        hwhm * (std::f64::consts::PI * (self.next_open_f64() - 0.5)).tan()
    }

    /// Poisson deviate. Knuth multiplication below mean 64, Hörmann's
    /// transformed rejection (PTRS) above.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        assert!(mean.is_finite() && mean >= 0.0, "Poisson mean must be ≥ 0");
        if mean == 0.0 {
            return 0;
        }
        if mean < 64.0 {
            let limit = (-mean).exp();
            let mut k = 0u64;
            let mut p = 1.0;
            loop {
                p *= self.next_open_f64();
                if p <= limit {
                    return k;
                }
                k += 1;
            }
        }
        self.poisson_ptrs(mean)
    }

    fn poisson_ptrs(&mut self, mu: f64) -> u64 {
        let b = 0.931 + 2.53 * mu.sqrt();
        let a = -0.059 + 0.02483 * b;
        let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        let v_r = 0.9277 - 3.6224 / (b - 2.0);
        let ln_mu = mu.ln();
        loop {
            let u = self.next_open_f64() - 0.5;
            let v = self.next_open_f64();
            let us = 0.5 - u.abs();
            let k = ((2.0 * a / us + b) * u + mu + 0.43).floor();
            if us >= 0.07 && v <= v_r {
                return k as u64;
            }
            if k < 0.0 || (us < 0.013 && v > us) {
                continue;
            }
            let accept = (v * inv_alpha / (a / (us * us) + b)).ln();
            if accept <= k * ln_mu - mu - ln_factorial(k as u64) {
                return k as u64;
            }
        }
    }
}

/// ln(k!) — exact summation for small k, Stirling series beyond.
fn ln_factorial(k: u64) -> f64 {
    if k < 16 {
        (2..=k).map(|i| (i as f64).ln()).sum()
    } else {
        let x = (k + 1) as f64;
        (x - 0.5) * x.ln() - x + 0.5 * (std::f64::consts::TAU).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
            + 1.0 / (1260.0 * x.powi(5))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let a: Vec<u64> = {
            let mut r = CounterRng::substream(42, 7);
            (0..32).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = CounterRng::substream(42, 7);
            (0..32).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn substreams_differ() {
        let mut r0 = CounterRng::substream(1, 0);
        let mut r1 = CounterRng::substream(1, 1);
        let mut r2 = CounterRng::substream(2, 0);
        let x0 = r0.next_u64();
        assert_ne!(x0, r1.next_u64());
        assert_ne!(x0, r2.next_u64());
    }

    #[test]
    fn uniform_mean_and_range() {
        let mut r = CounterRng::new(123);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let u = r.next_f64();
            assert!((0.0..1.0).contains(&u));
            sum += u;
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "uniform mean {mean}");
    }

    #[test]
    fn poisson_moments_small_mean() {
        let mut r = CounterRng::new(7);
        let mu = 3.2;
        let n = 200_000;
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..n {
            let k = r.poisson(mu) as f64;
            s += k;
            s2 += k * k;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        // 5σ statistical windows.
        assert!((mean - mu).abs() < 5.0 * (mu / n as f64).sqrt(), "mean {mean}");
        assert!((var - mu).abs() / mu < 0.03, "var {var}");
    }

    #[test]
    fn poisson_moments_large_mean_ptrs_path() {
        let mut r = CounterRng::new(99);
        let mu = 200.0;
        let n = 100_000;
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..n {
            let k = r.poisson(mu) as f64;
            s += k;
            s2 += k * k;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!((mean - mu).abs() < 5.0 * (mu / n as f64).sqrt(), "mean {mean}");
        assert!((var - mu).abs() / mu < 0.03, "var {var}");
    }

    #[test]
    fn poisson_zero_mean() {
        let mut r = CounterRng::new(1);
        assert_eq!(r.poisson(0.0), 0);
    }

    #[test]
    fn lorentzian_median_and_quartiles() {
        let mut r = CounterRng::new(5);
        let hwhm = 2.0;
        let n = 100_000;
        let mut below_med = 0usize;
        let mut within_hwhm = 0usize;
        for _ in 0..n {
            let x = r.lorentzian(hwhm);
            if x < 0.0 {
                below_med += 1;
            }
            if x.abs() < hwhm {
                within_hwhm += 1;
            }
        }
        // Median 0; P(|x| < hwhm) = 1/2 for a Cauchy distribution.
        assert!((below_med as f64 / n as f64 - 0.5).abs() < 0.01);
        assert!((within_hwhm as f64 / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn normal_moments() {
        let mut r = CounterRng::new(11);
        let n = 100_000;
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..n {
            let z = r.standard_normal();
            s += z;
            s2 += z * z;
        }
        assert!((s / n as f64).abs() < 0.02);
        assert!((s2 / n as f64 - 1.0).abs() < 0.02);
    }

    #[test]
    fn ln_factorial_against_direct() {
        let direct: f64 = (2..=20u64).map(|i| (i as f64).ln()).sum();
        assert!((ln_factorial(20) - direct).abs() < 1e-9);
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
    }
}
