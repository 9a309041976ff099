//! Exact and Monte Carlo volumes of Lorentz unit balls `B^n_{p,q}`.

pub mod compositions;
pub mod table;
pub mod weak;

use astro_float::BigFloat;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::mc::{mc_volume, McConfig};
use crate::norm::Params;
use crate::precision::{Arith, HighPrecision, PrecisionContext};

pub use compositions::{
    enumerate_compositions, enumerate_compositions_capped, Composition, Compositions,
    DEFAULT_COMPOSITION_CAP,
};
pub use table::{volume_table, ColumnMax, TableColumn, VolumeTable};
pub use weak::{
    v_integral, vol_weak_positive_explicit, vol_weak_positive_explicit_partial_sums,
    vol_weak_positive_integral, vol_weak_positive_recursive, weak_positive_table,
    weak_positive_table_adaptive, Conditioning, ExactValue, WeightVector,
};

/// How a volume was (or should be) computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Auto,
    Recursion,
    Explicit,
    Integral,
    ProductQ1,
    Dirichlet,
    MonteCarlo,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Recursion => "recursion",
            Method::Explicit => "explicit",
            Method::Integral => "integral",
            Method::ProductQ1 => "product-q1",
            Method::Dirichlet => "dirichlet",
            Method::MonteCarlo => "monte-carlo",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Some(match s {
            "auto" => Method::Auto,
            "recursion" => Method::Recursion,
            "explicit" => Method::Explicit,
            "integral" => Method::Integral,
            "product-q1" | "q1" | "product" => Method::ProductQ1,
            "dirichlet" => Method::Dirichlet,
            "monte-carlo" | "mc" => Method::MonteCarlo,
            _ => return None,
        })
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Method::MonteCarlo | Method::Auto)
    }

    /// The method `Auto` resolves to for `params`.
    pub fn resolve(params: Params) -> Method {
        if params.q() == 1.0 {
            Method::ProductQ1
        } else if params.is_lebesgue() {
            Method::Dirichlet
        } else if params.is_weak() && params.p().is_finite() {
            Method::Recursion
        } else {
            Method::MonteCarlo
        }
    }

    fn check_applicable(&self, params: Params) -> Result<()> {
        let (p, q) = (params.p(), params.q());
        let reason = match self {
            Method::Recursion | Method::Explicit | Method::Integral
                if !(q.is_infinite() && p.is_finite()) =>
            {
                "requires q = inf and p < inf"
            }
            Method::ProductQ1 if q != 1.0 => "requires q = 1",
            Method::Dirichlet if p != q => "requires p = q",
            _ => return Ok(()),
        };
        Err(Error::MethodNotApplicable {
            method: self.name(),
            p,
            q,
            reason,
        })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A reported volume.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeResult {
    pub value: f64,
    /// Natural log of the volume, rounded from working precision.
    pub log_value: f64,
    pub method: Method,
    pub n: usize,
    pub params: Params,
    /// Rounding bound for exact methods; CI half-width for Monte Carlo.
    pub error_bound: f64,
    /// Mantissa bits the value was computed with (53 for double precision
    /// paths and Monte Carlo).
    pub precision_bits: usize,
    /// Set when an alternating sum lost more digits than the working
    /// precision can absorb.
    pub conditioning: Option<Conditioning>,
    /// Monte Carlo details when `method` is Monte Carlo.
    pub mc: Option<crate::mc::McEstimate>,
}

impl VolumeResult {
    pub fn precision_flagged(&self) -> bool {
        self.conditioning.map(|c| c.flagged()).unwrap_or(false)
    }
}

fn result_from_high(
    v: &HighPrecision,
    rel_err: f64,
    method: Method,
    n: usize,
    params: Params,
    conditioning: Option<Conditioning>,
) -> VolumeResult {
    let value = v.to_f64();
    VolumeResult {
        value,
        log_value: v.ln_f64(),
        method,
        n,
        params,
        error_bound: value * (rel_err + f64::EPSILON / 2.0),
        precision_bits: v.bits(),
        conditioning,
        mc: None,
    }
}

/// `kappa_p(k)` at working precision.
pub fn kappa_high(p: f64, k: usize, ctx: &PrecisionContext) -> HighPrecision {
    let mut ar = Arith::new(ctx);
    let table = kappa_table(&mut ar, p, k);
    ar.wrap(table[k - 1].clone())
}

fn kappa_table(ar: &mut Arith, p: f64, k_max: usize) -> Vec<BigFloat> {
    let exponent = ar.sub(&ar.reciprocal_index(p), &ar.one());
    let mut acc = ar.zero();
    (1..=k_max)
        .map(|j| {
            let term = ar.int_pow(j as u64, &exponent);
            acc = ar.add(&acc, &term);
            acc.clone()
        })
        .collect()
}

/// `log vol(B^n_{p,1})` for `n = 1..=n_max`, rounded from working precision.
pub(crate) fn q1_log_table(n_max: usize, p: f64, ctx: &PrecisionContext) -> Result<Vec<f64>> {
    Params::new(p, 1.0)?;
    let mut ar = Arith::new(ctx);
    let kappas = kappa_table(&mut ar, p, n_max);
    let ln2 = ar.ln(&ar.int(2));
    let mut log = ar.zero();
    let mut out = Vec::with_capacity(n_max);
    for kap in &kappas {
        let lk = ar.ln(kap);
        let l = ar.sub(&ln2, &lk);
        log = ar.add(&log, &l);
        ar.check(&log)?;
        out.push(crate::precision::bigfloat_to_f64(&log));
    }
    Ok(out)
}

/// `vol(B^n_{p,1}) = 2^n prod_{k=1}^n 1/kappa_p(k)`, accumulated in logs.
pub fn vol_q1(n: usize, p: f64, ctx: &PrecisionContext) -> Result<VolumeResult> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    let params = Params::new(p, 1.0)?;
    let mut ar = Arith::new(ctx);
    let kappas = kappa_table(&mut ar, p, n);
    let ln2 = ar.ln(&ar.int(2));
    let mut log = ar.mul(&ar.int(n as u64), &ln2);
    for kap in &kappas {
        let l = ar.ln(kap);
        log = ar.sub(&log, &l);
    }
    let value = ar.exp(&log);
    ar.check(&value)?;
    let rel = ctx.unit_roundoff() * (8 * n + 16) as f64;
    let mut out = result_from_high(&ar.wrap(value), rel, Method::ProductQ1, n, params, None);
    out.log_value = crate::precision::bigfloat_to_f64(&log);
    Ok(out)
}

/// Dirichlet's formula `vol(B^n_p) = 2^n Gamma(1 + 1/p)^n / Gamma(1 + n/p)` in
/// double precision log-Gamma form; `p = inf` is the cube.
pub fn vol_lebesgue(n: usize, p: f64) -> Result<VolumeResult> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    let params = Params::lebesgue(p)?;
    let nf = n as f64;
    if p.is_infinite() {
        return Ok(VolumeResult {
            value: 2f64.powi(n as i32),
            log_value: nf * std::f64::consts::LN_2,
            method: Method::Dirichlet,
            n,
            params,
            error_bound: 0.0,
            precision_bits: 53,
            conditioning: None,
            mc: None,
        });
    }
    let g1 = ln_gamma(1.0 + 1.0 / p);
    let g2 = ln_gamma(1.0 + nf / p);
    let log_value = nf * std::f64::consts::LN_2 + nf * g1 - g2;
    let value = log_value.exp();
    // absolute error of the log carries over as relative error of the value
    let log_err =
        4.0 * f64::EPSILON * (nf * std::f64::consts::LN_2 + nf * g1.abs() + g2.abs() + nf + 2.0);
    Ok(VolumeResult {
        value,
        log_value,
        method: Method::Dirichlet,
        n,
        params,
        error_bound: value * (log_err + f64::EPSILON),
        precision_bits: 53,
        conditioning: None,
        mc: None,
    })
}

/// Full weak-ball volume `2^n vol(B^{n,+}_{p,inf})` from a positive-orthant
/// value.
pub(crate) fn weak_full_ball(
    positive: &ExactValue,
    n: usize,
    params: Params,
    method: Method,
) -> VolumeResult {
    let ar = Arith::new(&PrecisionContext::new(positive.value.bits()).expect("bits >= 53"));
    let scale = ar.powi(&ar.int(2), n);
    let full = ar.wrap(ar.mul(positive.value.as_bigfloat(), &scale));
    result_from_high(
        &full,
        positive.rel_error_bound,
        method,
        n,
        params,
        Some(positive.conditioning),
    )
}

/// Volume of `B^n_{p,q}` by the requested method; `Auto` picks the cheapest
/// exact method available and falls back to Monte Carlo with `mc`.
pub fn vol_ball(
    n: usize,
    params: Params,
    method: Method,
    ctx: &PrecisionContext,
    mc: &McConfig,
) -> Result<VolumeResult> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    let method = match method {
        Method::Auto => Method::resolve(params),
        m => m,
    };
    method.check_applicable(params)?;
    let p = params.p();
    match method {
        Method::Recursion => {
            let v = vol_weak_positive_recursive(n, p, ctx)?;
            Ok(weak_full_ball(&v, n, params, method))
        }
        Method::Explicit => {
            let v = vol_weak_positive_explicit(n, p, ctx)?;
            Ok(weak_full_ball(&v, n, params, method))
        }
        Method::Integral => {
            let v = vol_weak_positive_integral(n, p, ctx)?;
            Ok(weak_full_ball(&v, n, params, method))
        }
        Method::ProductQ1 => vol_q1(n, p, ctx),
        Method::Dirichlet => vol_lebesgue(n, p),
        Method::MonteCarlo => {
            let est = mc_volume(n, params, mc)?;
            Ok(VolumeResult {
                value: est.volume,
                log_value: est.volume.ln(),
                method,
                n,
                params,
                error_bound: est.ci_half_width,
                precision_bits: 53,
                conditioning: None,
                mc: Some(est),
            })
        }
        Method::Auto => unreachable!("resolved above"),
    }
}
