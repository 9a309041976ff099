//! Volume sequences in the dimension: `vol^{1/n}` against its predicted
//! growth and the weak-to-strong volume ratio `R_{p,n}`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::mc::{mc_volume, McConfig};
use crate::norm::Params;
use crate::precision::{Arith, PrecisionContext};
use crate::volume::weak::{binomial, weak_positive_table};
use crate::volume::{q1_log_table, vol_lebesgue, Method};

/// Largest `n_max` accepted when the sequence needs Monte Carlo.
pub const MC_SEQUENCE_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequencePoint {
    pub n: usize,
    /// `vol(B^n_{p,q})^{1/n}`.
    pub raw: f64,
    /// `raw` times the predicted growth factor.
    pub normalized: f64,
    pub method: Method,
    /// Relative error bound of the volume (relative CI half-width for Monte
    /// Carlo); `raw` carries about `rel_error / n`.
    pub rel_error: f64,
    pub flagged: bool,
}

/// Relative error of `exp(log)` when `log` is a correctly rounded double.
fn log_rounding(log: f64) -> f64 {
    f64::EPSILON * log.abs().max(1.0)
}

/// Growth factor that should make `vol^{1/n}` bounded above and below.
fn normalizer(params: Params, n: usize) -> Result<f64> {
    let (p, q) = (params.p(), params.q());
    if p.is_finite() {
        Ok((n as f64).powf(1.0 / p))
    } else if q == 1.0 {
        Ok((n as f64 + 1.0).ln())
    } else if q.is_infinite() {
        Ok(1.0)
    } else {
        Err(Error::Unsupported(format!(
            "no growth law is known for p = inf, q = {q}"
        )))
    }
}

/// Natural logs of full-ball volumes for `n = 1..=n_max`, with the method
/// and precision flag of each.
fn log_volumes(
    params: Params,
    n_max: usize,
    ctx: &PrecisionContext,
    mc: &McConfig,
) -> Result<Vec<(f64, Method, f64, bool)>> {
    let (p, q) = (params.p(), params.q());
    match Method::resolve(params) {
        Method::ProductQ1 => Ok(q1_log_table(n_max, p, ctx)?
            .into_iter()
            .enumerate()
            .map(|(i, l)| {
                let rel = ctx.unit_roundoff() * (8 * i + 24) as f64 + log_rounding(l);
                (l, Method::ProductQ1, rel, false)
            })
            .collect()),
        Method::Dirichlet => (1..=n_max)
            .map(|n| {
                vol_lebesgue(n, p).map(|v| {
                    (
                        v.log_value,
                        Method::Dirichlet,
                        v.error_bound / v.value,
                        false,
                    )
                })
            })
            .collect(),
        Method::Recursion => {
            let table = weak_positive_table(n_max, p, ctx)?;
            Ok((1..=n_max)
                .map(|n| {
                    let v = &table[n];
                    let log = v.value.ln_f64() + n as f64 * std::f64::consts::LN_2;
                    (
                        log,
                        Method::Recursion,
                        v.rel_error_bound + log_rounding(log),
                        v.flagged(),
                    )
                })
                .collect())
        }
        _ => {
            if n_max > MC_SEQUENCE_LIMIT {
                return Err(Error::Unsupported(format!(
                    "p = {p}, q = {q} has no exact engine; Monte Carlo sequences stop at n = {MC_SEQUENCE_LIMIT}"
                )));
            }
            (1..=n_max)
                .map(|n| {
                    let e = mc_volume(n, params, mc)?;
                    Ok((
                        e.volume.ln(),
                        Method::MonteCarlo,
                        e.ci_half_width / e.volume,
                        e.low_hits(),
                    ))
                })
                .collect()
        }
    }
}

/// `vol(B^n_{p,q})^{1/n}` for `n = 1..=n_max` together with the normalised
/// value: times `n^{1/p}` for finite `p`, times `log(n + 1)` for
/// `(p, q) = (inf, 1)`, unscaled for the cube.
pub fn root_volume_sequence(
    params: Params,
    n_max: usize,
    ctx: &PrecisionContext,
    mc: &McConfig,
) -> Result<Vec<SequencePoint>> {
    if n_max == 0 {
        return Err(Error::DimensionTooSmall { n: 0, min: 1 });
    }
    normalizer(params, 1)?;
    let logs = log_volumes(params, n_max, ctx, mc)?;
    logs.into_iter()
        .enumerate()
        .map(|(i, (log, method, rel_error, flagged))| {
            let n = i + 1;
            let raw = (log / n as f64).exp();
            Ok(SequencePoint {
                n,
                raw,
                normalized: raw * normalizer(params, n)?,
                method,
                rel_error,
                flagged,
            })
        })
        .collect()
}

/// `max / min` of the normalised column.
pub fn window_ratio(points: &[SequencePoint]) -> f64 {
    let (lo, hi) = points.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), s| {
        (lo.min(s.normalized), hi.max(s.normalized))
    });
    hi / lo
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub n: usize,
    /// `R_{p,n} = vol(B^n_{p,inf}) / vol(B^n_p)`.
    pub ratio: f64,
    /// `R_{p,n+1} / R_{p,n}`.
    pub growth: f64,
    /// Box-family lower bound on `R_{p,n}` (even `n`, `p <= 2`).
    pub lower_bound: Option<f64>,
    /// Relative error bound of `ratio`.
    pub rel_error: f64,
    pub flagged: bool,
}

/// `R_{p,n}` for `n = 1..=n_max`, from the recursion and Dirichlet's formula.
pub fn ratio_sequence(p: f64, n_max: usize, ctx: &PrecisionContext) -> Result<Vec<RatioPoint>> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::param("p", p, "the volume ratio needs 0 < p < inf"));
    }
    if n_max == 0 {
        return Err(Error::DimensionTooSmall { n: 0, min: 1 });
    }
    let table = weak_positive_table(n_max + 1, p, ctx)?;
    let mut ratios = Vec::with_capacity(n_max + 1);
    for (n, weak) in table.iter().enumerate().skip(1) {
        // both balls are [-1, 1] on the line
        let r = if n == 1 {
            (1.0, 0.0)
        } else {
            let leb = vol_lebesgue(n, p)?;
            let log = weak.value.ln_f64() + n as f64 * std::f64::consts::LN_2 - leb.log_value;
            let rel = weak.rel_error_bound + leb.error_bound / leb.value + log_rounding(log);
            (log.exp(), rel)
        };
        ratios.push(r);
    }
    (1..=n_max)
        .map(|n| {
            let lower_bound = if n % 2 == 0 && p <= 2.0 {
                Some(ratio_lower_bound(p, n, ctx)?)
            } else {
                None
            };
            Ok(RatioPoint {
                n,
                ratio: ratios[n - 1].0,
                growth: ratios[n].0 / ratios[n - 1].0,
                lower_bound,
                rel_error: ratios[n - 1].1,
                flagged: table[n].flagged(),
            })
        })
        .collect()
}

/// Lower bound on `R_{p,n}` from the subset of `B^n_{p,inf}` whose `n/2`
/// largest coordinates sit in `[ (i+1)^{-1/p}, i^{-1/p} ]` and whose other
/// coordinates lie below `n^{-1/p}`:
///
/// `Gamma(1+n/p) / Gamma(1+1/p)^n * C(n, n/2) * (n/2)! *
///  prod_{i<=n/2} ((i+1)^{1/p} - i^{1/p}) / (i^{1/p} (i+1)^{1/p}) * n^{-n/(2p)}`.
pub fn ratio_lower_bound(p: f64, n: usize, ctx: &PrecisionContext) -> Result<f64> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::param(
            "p",
            p,
            "the box-family bound needs 0 < p <= 2",
        ));
    }
    if n == 0 || n % 2 == 1 {
        return Err(Error::Unsupported(format!(
            "the box-family bound is only available for even n (got {n})"
        )));
    }
    let half = n / 2;
    let mut ar = Arith::new(ctx);
    let inv_p = ar.reciprocal_index(p);
    // log of (n/2)! * prod (i^{-1/p} - (i+1)^{-1/p}) * n^{-n/(2p)}
    let mut log = ar.zero();
    let neg = inv_p.neg();
    let mut prev = ar.one(); // 1^{-1/p}
    for i in 1..=half {
        let next = ar.int_pow(i as u64 + 1, &neg);
        let width = ar.sub(&prev, &next);
        let l = ar.ln(&ar.mul(&width, &ar.int(i as u64)));
        log = ar.add(&log, &l);
        prev = next;
    }
    let ln_n = ar.ln(&ar.int(n as u64));
    let tail = ar.mul(&ar.mul(&ln_n, &inv_p), &ar.int(half as u64));
    log = ar.sub(&log, &tail);
    ar.check(&log)?;
    let log = crate::precision::bigfloat_to_f64(&log);
    let choose = (binomial(n, half) as f64).ln();
    let gammas = ln_gamma(1.0 + n as f64 / p) - n as f64 * ln_gamma(1.0 + 1.0 / p);
    Ok((gammas + choose + log).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn cross_polytope_sequence() {
        let s = root_volume_sequence(
            Params::lebesgue(1.0).unwrap(),
            40,
            &ctx(),
            &McConfig::default(),
        )
        .unwrap();
        assert_eq!(s[0].normalized, 2.0);
        // independent: (2^n / n!)^{1/n} n from a factorial product
        let fact10: f64 = (1..=10).map(|k| k as f64).product();
        let direct = (1024.0 / fact10).powf(0.1) * 10.0;
        assert_relative_eq!(s[9].normalized, direct, max_relative = 1e-12);
        assert_relative_eq!(s[9].normalized, 4.416_25, epsilon = 1e-5);
        // increasing towards 2e
        assert!(s.windows(2).all(|w| w[0].normalized < w[1].normalized));
        assert!(s[39].normalized < 2.0 * std::f64::consts::E);
        assert!(s[39].normalized > 5.0);
    }

    #[test]
    fn log_law_start() {
        let s = root_volume_sequence(
            Params::new(f64::INFINITY, 1.0).unwrap(),
            3,
            &ctx(),
            &McConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(s[0].normalized, 2.0 * 2f64.ln(), max_relative = 1e-14);
        assert_eq!(s[0].method, Method::ProductQ1);
    }

    #[test]
    fn unsupported_sequences() {
        let mc = McConfig::with_samples(1000, 0).unwrap();
        let mixed = Params::new(1.0, 2.0).unwrap();
        assert!(root_volume_sequence(mixed, 11, &ctx(), &mc).is_err());
        assert!(root_volume_sequence(mixed, 3, &ctx(), &mc).is_ok());
        let odd = Params::new(f64::INFINITY, 2.0).unwrap();
        assert!(root_volume_sequence(odd, 3, &ctx(), &mc).is_err());
    }

    #[test]
    fn ratio_examples() {
        let r = ratio_sequence(1.0, 3, &ctx()).unwrap();
        assert_eq!(r[0].ratio, 1.0);
        assert_relative_eq!(r[1].ratio, 1.5, max_relative = 1e-14);
        assert_relative_eq!(r[2].ratio, 49.0 / 18.0, max_relative = 1e-14);
        assert_relative_eq!(r[1].growth, 49.0 / 27.0, max_relative = 1e-14);
        assert!(r[0].lower_bound.is_none());
        assert!(ratio_sequence(f64::INFINITY, 3, &ctx()).is_err());
    }

    #[test]
    fn lower_bound_small_case() {
        // per orthant: two arrangements of [1/2, 1] x [0, 1/2], area 1/2;
        // four orthants give 2, and vol(B_1^2) = 2
        assert_relative_eq!(
            ratio_lower_bound(1.0, 2, &ctx()).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        assert!(ratio_lower_bound(1.0, 3, &ctx()).is_err());
        assert!(ratio_lower_bound(2.5, 4, &ctx()).is_err());
    }

    #[test]
    fn lower_bound_matches_box_volume() {
        // independent evaluation of the box family volume in double precision
        for &p in &[0.5, 1.0, 1.5, 2.0] {
            for n in [2usize, 4, 6, 8] {
                let h = n / 2;
                let mut boxes = 1.0;
                for i in 1..=h {
                    boxes *= (i as f64).powf(-1.0 / p) - (i as f64 + 1.0).powf(-1.0 / p);
                }
                boxes *= (n as f64).powf(-1.0 / p).powi(h as i32);
                let arrangements: f64 = (1..=n).map(|k| k as f64).product::<f64>()
                    / (1..=h).map(|k| k as f64).product::<f64>();
                let full = 2f64.powi(n as i32) * arrangements * boxes;
                let expected = full / vol_lebesgue(n, p).unwrap().value;
                assert_relative_eq!(
                    ratio_lower_bound(p, n, &ctx()).unwrap(),
                    expected,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn ratios_dominate_bounds() {
        for &p in &[0.5, 1.0, 2.0] {
            for r in ratio_sequence(p, 20, &ctx()).unwrap() {
                assert!(r.ratio >= 1.0, "{r:?}");
                if let Some(lb) = r.lower_bound {
                    assert!(lb <= r.ratio * (1.0 + 1e-12), "{r:?}");
                }
            }
        }
    }

    #[test]
    fn exponential_growth_at_p1() {
        for r in ratio_sequence(1.0, 14, &ctx()).unwrap().iter().skip(4) {
            assert!(r.growth >= 1.1, "{r:?}");
        }
    }
}
