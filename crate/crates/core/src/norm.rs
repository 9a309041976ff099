//! Lorentz quasi-norms on `R^n` and the quantities built directly on them.
//!
//! For `0 < p, q <= inf` the quasi-norm of `x` is computed from its
//! non-increasing rearrangement `x*`:
//!
//! * `q < inf`: `(sum_k k^(q/p - 1) (x*_k)^q)^(1/q)`
//! * `q = inf`: `max_k k^(1/p) x*_k`
//!
//! `p = q` gives the usual `l_p` (quasi-)norm and `p = inf` is allowed for
//! every `q`, in which case the weights become `k^(-1/q)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The summability pair `(p, q)`. Either index may be `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    p: f64,
    q: f64,
}

impl Params {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        check_index("p", p)?;
        check_index("q", q)?;
        Ok(Params { p, q })
    }

    /// The Lebesgue pair `(p, p)`.
    pub fn lebesgue(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    /// The weak Lebesgue pair `(p, inf)`.
    pub fn weak(p: f64) -> Result<Self> {
        Self::new(p, f64::INFINITY)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn is_weak(&self) -> bool {
        self.q.is_infinite()
    }

    pub fn is_lebesgue(&self) -> bool {
        self.p == self.q
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", ExtendedReal(self.p), ExtendedReal(self.q))
    }
}

fn check_index(name: &'static str, v: f64) -> Result<()> {
    if v.is_nan() {
        return Err(Error::param(name, v, "must not be NaN"));
    }
    if v <= 0.0 {
        return Err(Error::param(name, v, "must be positive"));
    }
    Ok(())
}

/// A positive real or `+inf`, printed and parsed with the literal `inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedReal(pub f64);

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for ExtendedReal {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "∞" => return Ok(ExtendedReal(f64::INFINITY)),
            _ => {}
        }
        // Allow simple fractions like 1/2.
        if let Some((a, b)) = t.split_once('/') {
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| format!("invalid number `{s}`"))?;
            let b: f64 = b
                .trim()
                .parse()
                .map_err(|_| format!("invalid number `{s}`"))?;
            return Ok(ExtendedReal(a / b));
        }
        t.parse::<f64>()
            .map(ExtendedReal)
            .map_err(|_| format!("invalid number `{s}` (use a positive real or `inf`)"))
    }
}

/// A point of `R^n` with finite entries, `n >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Vector {
    entries: Vec<f64>,
}

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidVector("length must be at least 1"));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidVector("entries must be finite"));
        }
        Ok(Vector { entries })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.entries.iter().map(|v| v * factor).collect())
    }

    /// `l_1` distance to another vector of the same length.
    pub fn l1_distance(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

/// Absolute values sorted in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct RearrangedVector {
    entries: Vec<f64>,
}

impl RearrangedVector {
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn rearrange(x: &Vector) -> RearrangedVector {
    let mut entries: Vec<f64> = x.entries.iter().map(|v| v.abs()).collect();
    sort_descending(&mut entries);
    RearrangedVector { entries }
}

#[inline]
pub(crate) fn sort_descending(values: &mut [f64]) {
    // Stable, and entries are finite so total_cmp agrees with the usual order.
    values.sort_by(|a, b| b.total_cmp(a));
}

pub fn lorentz_norm(x: &Vector, params: Params) -> f64 {
    norm_of_rearranged(&rearrange(x).entries, params)
}

/// Norm of an already rearranged sequence.
pub(crate) fn norm_of_rearranged(star: &[f64], params: Params) -> f64 {
    let (p, q) = (params.p, params.q);
    if q.is_infinite() {
        if p.is_infinite() {
            return star.first().copied().unwrap_or(0.0);
        }
        let inv_p = 1.0 / p;
        return star
            .iter()
            .enumerate()
            .map(|(i, &v)| ((i + 1) as f64).powf(inv_p) * v)
            .fold(0.0, f64::max);
    }
    let exponent = q / p - 1.0;
    let mut sum = 0.0;
    for (i, &v) in star.iter().enumerate() {
        if v == 0.0 {
            break;
        }
        sum += ((i + 1) as f64).powf(exponent) * v.powf(q);
    }
    sum.powf(1.0 / q)
}

/// Unit ball membership, boundary included, no tolerance.
pub fn in_ball(x: &Vector, params: Params) -> bool {
    lorentz_norm(x, params) <= 1.0
}

/// Membership tester with the rearrangement weights precomputed for a fixed
/// dimension. Gives the same answer as [`in_ball`] and is what the Monte Carlo
/// sampler calls in its inner loop.
#[derive(Debug, Clone)]
pub struct BallTester {
    params: Params,
    weights: Vec<f64>,
}

impl BallTester {
    pub fn new(n: usize, params: Params) -> Self {
        let (p, q) = (params.p, params.q);
        let weights = (1..=n)
            .map(|k| {
                let k = k as f64;
                if q.is_infinite() {
                    if p.is_infinite() {
                        1.0
                    } else {
                        k.powf(1.0 / p)
                    }
                } else {
                    k.powf(q / p - 1.0)
                }
            })
            .collect();
        BallTester { params, weights }
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    /// Norm of `scratch`, which is overwritten with its rearrangement.
    pub fn norm_in_place(&self, scratch: &mut [f64]) -> f64 {
        debug_assert_eq!(scratch.len(), self.weights.len());
        for v in scratch.iter_mut() {
            *v = v.abs();
        }
        sort_descending(scratch);
        let q = self.params.q;
        if q.is_infinite() {
            return scratch
                .iter()
                .zip(&self.weights)
                .map(|(v, w)| w * v)
                .fold(0.0, f64::max);
        }
        let mut sum = 0.0;
        for (&v, &w) in scratch.iter().zip(&self.weights) {
            if v == 0.0 {
                break;
            }
            sum += w * v.powf(q);
        }
        sum.powf(1.0 / q)
    }

    pub fn contains_in_place(&self, scratch: &mut [f64]) -> bool {
        self.norm_in_place(scratch) <= 1.0
    }
}

/// `kappa_p(k) = sum_{j=1}^k j^(1/p - 1)` in double precision; `p = inf`
/// gives the harmonic numbers.
pub fn kappa(p: f64, k: usize) -> f64 {
    assert!(k >= 1, "kappa requires k >= 1");
    let e = if p.is_infinite() { -1.0 } else { 1.0 / p - 1.0 };
    (1..=k).map(|j| (j as f64).powf(e)).sum()
}

/// Smallest known constant `c` with `B_{p,q} ⊂ c B_{p,r}` for `q <= r`,
/// independent of the dimension.
pub fn embedding_constant(p: f64, q: f64, r: f64) -> Result<f64> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::param("p", p, "must be a positive finite real"));
    }
    check_index("q", q)?;
    check_index("r", r)?;
    if q > r {
        return Err(Error::param("q", q, "must not exceed r"));
    }
    if q <= p || q == r {
        return Ok(1.0);
    }
    let to_weak = (q / p).powf(1.0 / q);
    if r.is_infinite() {
        Ok(to_weak)
    } else {
        Ok(to_weak.powf((r - q) / r))
    }
}
