//! Rejection-sampling estimator for `vol(B^n_{p,q})`.
//!
//! Every Lorentz ball sits inside the cube `[-1, 1]^n` (the first rearranged
//! entry never exceeds the norm), so uniform cube samples suffice for any
//! `(p, q)`.
//!
//! Samples are drawn in fixed chunks of [`CHUNK`] points; chunk `i` uses the
//! ChaCha8 stream `i` of the seed. Hit counts are summed, so the estimate is
//! the same whatever the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::norm::{BallTester, Params};

/// Largest dimension accepted; acceptance rates beyond it are too small.
pub const MAX_MC_DIMENSION: usize = 20;
pub const MIN_SAMPLES: u64 = 1_000;
/// Below this many hits the normal approximation is unreliable.
pub const LOW_HITS: u64 = 100;
const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    samples: u64,
    seed: u64,
    confidence: f64,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64, confidence: f64) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(Error::InvalidMcConfig("at least 1000 samples are required"));
        }
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(Error::InvalidMcConfig("confidence must lie in (0, 1)"));
        }
        Ok(McConfig {
            samples,
            seed,
            confidence,
        })
    }

    pub fn with_samples(samples: u64, seed: u64) -> Result<Self> {
        Self::new(samples, seed, 0.99)
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    /// Two-sided normal quantile for the configured confidence.
    pub fn z(&self) -> f64 {
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        normal.inverse_cdf(0.5 + self.confidence / 2.0)
    }
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 1_000_000,
            seed: 0,
            confidence: 0.99,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub volume: f64,
    pub ci_half_width: f64,
    pub hits: u64,
    pub samples: u64,
    pub confidence: f64,
}

impl McEstimate {
    fn from_hits(hits: u64, samples: u64, scale: f64, cfg: &McConfig) -> Self {
        let ph = hits as f64 / samples as f64;
        McEstimate {
            volume: scale * ph,
            ci_half_width: cfg.z() * scale * (ph * (1.0 - ph) / samples as f64).sqrt(),
            hits,
            samples,
            confidence: cfg.confidence,
        }
    }

    pub fn low_hits(&self) -> bool {
        self.hits < LOW_HITS
    }

    /// Text of the low-hit warning, if it applies.
    pub fn warning(&self) -> Option<String> {
        self.low_hits().then(|| {
            format!(
                "only {} hits in {} samples; the confidence interval is unreliable",
                self.hits, self.samples
            )
        })
    }

    pub fn contains(&self, value: f64) -> bool {
        (self.volume - value).abs() <= self.ci_half_width
    }
}

fn check(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    if n > MAX_MC_DIMENSION {
        return Err(Error::DimensionTooLarge {
            n,
            max: MAX_MC_DIMENSION,
        });
    }
    Ok(())
}

fn count_chunk(tester: &BallTester, cfg: &McConfig, chunk: u64, signed: bool) -> u64 {
    let start = chunk * CHUNK;
    let len = CHUNK.min(cfg.samples - start);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(chunk);
    let n = tester.dimension();
    let mut x = vec![0.0f64; n];
    let mut hits = 0;
    for _ in 0..len {
        for xi in x.iter_mut() {
            let u: f64 = rng.random();
            *xi = if signed { 2.0 * u - 1.0 } else { u };
        }
        if tester.contains_in_place(&mut x) {
            hits += 1;
        }
    }
    hits
}

fn count_hits(n: usize, params: Params, cfg: &McConfig, signed: bool) -> u64 {
    let tester = BallTester::new(n, params);
    let chunks = cfg.samples.div_ceil(CHUNK);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..chunks)
            .into_par_iter()
            .map(|c| count_chunk(&tester, cfg, c, signed))
            .sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks)
            .map(|c| count_chunk(&tester, cfg, c, signed))
            .sum()
    }
}

/// Estimate of the full-ball volume from uniform samples on `[-1, 1]^n`.
pub fn mc_volume(n: usize, params: Params, cfg: &McConfig) -> Result<McEstimate> {
    check(n)?;
    let hits = count_hits(n, params, cfg, true);
    Ok(McEstimate::from_hits(
        hits,
        cfg.samples,
        2f64.powi(n as i32),
        cfg,
    ))
}

/// Estimate of the positive-orthant volume from uniform samples on `[0, 1]^n`.
pub fn mc_positive_orthant(n: usize, params: Params, cfg: &McConfig) -> Result<McEstimate> {
    check(n)?;
    let hits = count_hits(n, params, cfg, false);
    Ok(McEstimate::from_hits(hits, cfg.samples, 1.0, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(McConfig::with_samples(999, 0).is_err());
        assert!(McConfig::new(1000, 0, 1.0).is_err());
        assert!(McConfig::new(1000, 0, 0.0).is_err());
        assert!(McConfig::new(1000, 0, f64::NAN).is_err());
        let z = McConfig::default().z();
        assert!((z - 2.575_829_303_549).abs() < 1e-9, "{z}");
    }

    #[test]
    fn guards() {
        let cfg = McConfig::with_samples(1000, 1).unwrap();
        let w = Params::weak(1.0).unwrap();
        assert!(matches!(
            mc_volume(21, w, &cfg),
            Err(Error::DimensionTooLarge { .. })
        ));
        assert!(mc_volume(0, w, &cfg).is_err());
        assert!(mc_volume(20, w, &cfg).is_ok());
    }

    #[test]
    fn reproducible() {
        let cfg = McConfig::with_samples(200_003, 42).unwrap();
        let p = Params::new(1.0, 2.0).unwrap();
        let a = mc_volume(4, p, &cfg).unwrap();
        let b = mc_volume(4, p, &cfg).unwrap();
        assert_eq!(a, b);
        let other = mc_volume(4, p, &McConfig::with_samples(200_003, 43).unwrap()).unwrap();
        assert_ne!(a.hits, other.hits);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn thread_count_does_not_matter() {
        let cfg = McConfig::with_samples(300_001, 9).unwrap();
        let p = Params::new(2.0, 1.0).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mc_volume(5, p, &cfg).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn cube_is_hit_every_time() {
        let cfg = McConfig::with_samples(100_000, 3).unwrap();
        let cube = Params::weak(f64::INFINITY).unwrap();
        let e = mc_volume(5, cube, &cfg).unwrap();
        assert_eq!(e.hits, e.samples);
        assert_eq!(e.volume, 32.0);
        assert_eq!(e.ci_half_width, 0.0);
    }

    #[test]
    fn one_dimensional_orthant() {
        let cfg = McConfig::with_samples(10_000, 5).unwrap();
        for params in [Params::weak(1.0).unwrap(), Params::new(0.5, 3.0).unwrap()] {
            let e = mc_positive_orthant(1, params, &cfg).unwrap();
            assert_eq!(e.volume, 1.0);
        }
    }

    #[test]
    fn low_hit_warning() {
        let cfg = McConfig::with_samples(1000, 9).unwrap();
        let e = mc_volume(20, Params::lebesgue(1.0).unwrap(), &cfg).unwrap();
        assert!(e.low_hits());
        assert!(e.warning().is_some());
    }

    #[test]
    fn orthant_estimates_match_exact_values() {
        let cfg = McConfig::with_samples(2_000_000, 11).unwrap();
        let w = Params::weak(1.0).unwrap();
        let e = mc_positive_orthant(2, w, &cfg).unwrap();
        assert!(e.contains(0.75), "{e:?}");
        let e = mc_positive_orthant(4, w, &cfg).unwrap();
        assert!(e.contains(0.231_047_45), "{e:?}");
    }
}
