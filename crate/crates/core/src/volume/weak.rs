//! Volume of the positive part of the weak Lebesgue ball `B^{n,+}_{p,inf}`,
//! `0 < p < inf`, by three independent exact routes:
//!
//! * the inclusion-exclusion recursion over lower dimensions,
//! * the explicit alternating sum over integer compositions of `n`,
//! * `n! V^(0)(n, a)` with `a_j = j^(-1/p)`, where `V^(m)` is the iterated
//!   integral over the cone `a_j >= x_1 >= ... >= x_n >= 0` weighted by
//!   `x_1^m`, evaluated through its own recursion over suffixes of `a`.
//!
//! All three are alternating sums whose partial sums grow far beyond the
//! result. Each engine carries a forward rounding-error bound alongside the
//! value and reports the cancellation it saw, so the caller can tell when
//! the working precision was not enough.

use astro_float::BigFloat;
use num_bigint::BigUint;

use super::compositions::{binomial_u128, enumerate_compositions_capped, DEFAULT_COMPOSITION_CAP};
use crate::error::{Error, Result};
use crate::precision::{Arith, HighPrecision, Mag, PrecisionContext};

/// Bits of headroom kept below the mantissa width before a result is
/// flagged as precision-limited.
pub const FLAG_HEADROOM_BITS: usize = 20;

/// Precision report for one exact value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conditioning {
    /// `log2(max partial-sum magnitude / |result|)`, worst over every
    /// alternating sum that fed the value.
    pub cancellation_bits: f64,
    /// `log2(relative error bound / unit roundoff)`: how far rounding errors
    /// were amplified on their way through lower dimensions.
    pub amplification_bits: f64,
    pub mantissa_bits: usize,
}

impl Conditioning {
    pub fn flagged(&self) -> bool {
        let limit = (self.mantissa_bits - FLAG_HEADROOM_BITS) as f64;
        self.cancellation_bits > limit || self.amplification_bits > limit
    }
}

/// Full-precision output of an exact engine.
#[derive(Debug, Clone)]
pub struct ExactValue {
    pub value: HighPrecision,
    /// Bound on the relative rounding error of `value` (may underflow to 0
    /// at very high precision).
    pub rel_error_bound: f64,
    pub conditioning: Conditioning,
}

impl ExactValue {
    pub fn flagged(&self) -> bool {
        self.conditioning.flagged()
    }
}

/// Running maximum of `|partial sum|` and `|term|` for one alternating sum.
struct Tracker {
    peak: Mag,
}

impl Tracker {
    fn new() -> Self {
        Tracker { peak: Mag::zero() }
    }

    fn observe(&mut self, magnitude: &Mag) {
        self.peak = std::mem::replace(&mut self.peak, Mag::zero()).max(magnitude.clone());
    }

    fn cancellation_bits(&self, result: &Mag) -> f64 {
        if self.peak.is_zero() {
            return 0.0;
        }
        (self.peak.log2() - result.log2()).max(0.0)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_infinite() {
        return Err(Error::MethodNotApplicable {
            method: "weak-ball engine",
            p,
            q: f64::INFINITY,
            reason: "for p = inf the weak ball is the cube; use the dirichlet path",
        });
    }
    if p.is_nan() || p <= 0.0 {
        return Err(Error::param("p", p, "must be positive"));
    }
    Ok(())
}

fn exact_value(
    ar: &Arith,
    value: BigFloat,
    abs_err: &Mag,
    cancellation_bits: f64,
    ctx: &PrecisionContext,
) -> ExactValue {
    let mag = Mag::of(&value);
    let rel = abs_err.ratio(&mag);
    let u_log2 = -(ctx.mantissa_bits() as f64);
    let amplification_bits = if abs_err.is_zero() {
        0.0
    } else {
        (abs_err.log2() - mag.log2() - u_log2).max(0.0)
    };
    ExactValue {
        value: ar.wrap(value),
        rel_error_bound: rel,
        conditioning: Conditioning {
            cancellation_bits,
            amplification_bits,
            mantissa_bits: ctx.mantissa_bits(),
        },
    }
}

fn add_signed(ar: &Arith, sum: &BigFloat, term: &BigFloat, positive: bool) -> BigFloat {
    if positive {
        ar.add(sum, term)
    } else {
        ar.sub(sum, term)
    }
}

/// Positive-orthant weak-ball volumes for every dimension `0..=n_max`,
/// computed bottom-up by inclusion-exclusion. Entries 0 and 1 are exactly 1.
pub fn weak_positive_table(
    n_max: usize,
    p: f64,
    ctx: &PrecisionContext,
) -> Result<Vec<ExactValue>> {
    check_p(p)?;
    let mut ar = Arith::new(ctx);
    let u = Mag::unit_roundoff(ctx.mantissa_bits());
    let neg_inv_p = ar.reciprocal_index(p).neg();

    let mut values: Vec<BigFloat> = vec![ar.one(), ar.one()];
    let mut magnitudes = vec![Mag::one(), Mag::one()];
    let mut abs_err = vec![Mag::zero(), Mag::zero()];
    let mut worst = vec![0.0f64, 0.0];

    for n in 2..=n_max {
        // t = n^{-1/p}
        let t = ar.int_pow(n as u64, &neg_inv_p);
        let mut t_pow = ar.one();
        let mut binom = BigUint::from(1u32);
        let mut sum = ar.zero();
        let mut tracker = Tracker::new();
        let mut err = Mag::zero();
        for j in 1..=n {
            t_pow = ar.mul(&t_pow, &t);
            binom = binom * BigUint::from(n - j + 1) / BigUint::from(j);
            let coeff = ar.mul(&ar.biguint(&binom), &t_pow);
            let term = ar.mul(&coeff, &values[n - j]);
            let coeff_mag = Mag::of(&coeff);
            let term_mag = coeff_mag.mul(&magnitudes[n - j]);
            sum = add_signed(&ar, &sum, &term, j % 2 == 1);
            tracker.observe(&term_mag);
            tracker.observe(&Mag::of(&sum));
            // rounding in the power, the product and the accumulation, plus
            // the error already carried by the lower-dimensional value
            let local = term_mag.mul(&u).mul(&Mag::int(j + n + 6));
            err = err.add(&local).add(&coeff_mag.mul(&abs_err[n - j]));
        }
        ar.check(&sum)?;
        let mag = Mag::of(&sum);
        let bits = tracker.cancellation_bits(&mag);
        worst.push(bits.max(worst[n - 1]));
        values.push(sum);
        magnitudes.push(mag);
        abs_err.push(err);
    }
    values.truncate(n_max + 1);

    Ok(values
        .into_iter()
        .enumerate()
        .map(|(n, v)| exact_value(&ar, v, &abs_err[n], worst[n], ctx))
        .collect())
}

/// `vol(B^{n,+}_{p,inf})` by the inclusion-exclusion recursion.
pub fn vol_weak_positive_recursive(n: usize, p: f64, ctx: &PrecisionContext) -> Result<ExactValue> {
    let mut table = weak_positive_table(n, p, ctx)?;
    Ok(table.swap_remove(n))
}

/// Upper limit for [`weak_positive_table_adaptive`].
pub const MAX_ADAPTIVE_BITS: usize = 1 << 15;

/// [`weak_positive_table`], doubling the working precision until no entry is
/// flagged. Returns the table and the precision that was finally used.
pub fn weak_positive_table_adaptive(
    n_max: usize,
    p: f64,
    ctx: &PrecisionContext,
) -> Result<(Vec<ExactValue>, PrecisionContext)> {
    let mut ctx = *ctx;
    loop {
        let table = weak_positive_table(n_max, p, &ctx)?;
        if !table.iter().any(ExactValue::flagged) || ctx.mantissa_bits() >= MAX_ADAPTIVE_BITS {
            return Ok((table, ctx));
        }
        ctx = ctx.with_bits(ctx.mantissa_bits() * 2);
    }
}

/// Powers `m^(-k/p)` for `1 <= k <= m <= n`, indexed `[m][k]`.
fn power_table(ar: &mut Arith, n: usize, p: f64) -> Vec<Vec<BigFloat>> {
    let neg_inv_p = ar.reciprocal_index(p).neg();
    let mut table = vec![Vec::new()];
    for m in 1..=n {
        let t = ar.int_pow(m as u64, &neg_inv_p);
        let mut row = Vec::with_capacity(m + 1);
        row.push(ar.one());
        for k in 1..=m {
            let next = ar.mul(&row[k - 1], &t);
            row.push(next);
        }
        table.push(row);
    }
    table
}

/// `vol(B^{n,+}_{p,inf})` by the explicit sum over compositions `k` of `n`:
/// `sum (-1)^(n + len k) multinomial(n; k) prod_l (n - k_1 - ... - k_{l-1})^(-k_l/p)`.
pub fn vol_weak_positive_explicit(n: usize, p: f64, ctx: &PrecisionContext) -> Result<ExactValue> {
    vol_weak_positive_explicit_capped(n, p, ctx, DEFAULT_COMPOSITION_CAP)
}

pub fn vol_weak_positive_explicit_capped(
    n: usize,
    p: f64,
    ctx: &PrecisionContext,
    cap: usize,
) -> Result<ExactValue> {
    check_p(p)?;
    let compositions = enumerate_compositions_capped(n, cap)?;
    let mut ar = Arith::new(ctx);
    let u = Mag::unit_roundoff(ctx.mantissa_bits());
    let powers = power_table(&mut ar, n, p);
    let per_term = u.mul(&Mag::int(2 * n + 4));

    let mut sum = ar.zero();
    let mut tracker = Tracker::new();
    let mut err = Mag::zero();
    for c in compositions {
        let mut term = BigFloat::from_u128(c.multinomial(), ar.bits());
        let mut rest = n;
        for &k in c.parts() {
            term = ar.mul(&term, &powers[rest][k]);
            rest -= k;
        }
        let mag = Mag::of(&term);
        sum = add_signed(&ar, &sum, &term, (n + c.length()).is_multiple_of(2));
        tracker.observe(&mag);
        tracker.observe(&Mag::of(&sum));
        err = err.add(&mag.mul(&per_term));
    }
    // accumulation over 2^(n-1) terms
    err = err.add(&tracker.peak.mul(&u).mul(&Mag::int(n)));
    finish(&ar, sum, &tracker, &err, ctx)
}

/// The same sum written over partial sums `0 = m_0 < ... < m_j = n`:
/// `n! sum (-1)^(n+j) prod_l (n - m_l)^(-(m_{l+1} - m_l)/p) / (m_{l+1} - m_l)!`.
pub fn vol_weak_positive_explicit_partial_sums(
    n: usize,
    p: f64,
    ctx: &PrecisionContext,
) -> Result<ExactValue> {
    check_p(p)?;
    let compositions = enumerate_compositions_capped(n, DEFAULT_COMPOSITION_CAP)?;
    let mut ar = Arith::new(ctx);
    let u = Mag::unit_roundoff(ctx.mantissa_bits());
    let powers = power_table(&mut ar, n, p);
    let mut inv_fact = vec![ar.one()];
    for d in 1..=n {
        let next = ar.div(&inv_fact[d - 1], &ar.int(d as u64));
        inv_fact.push(next);
    }
    let per_term = u.mul(&Mag::int(3 * n + 4));

    let mut sum = ar.zero();
    let mut tracker = Tracker::new();
    let mut err = Mag::zero();
    for c in compositions {
        let m = c.partial_sums();
        let mut term = ar.one();
        for w in m.windows(2) {
            let d = w[1] - w[0];
            term = ar.mul(&term, &powers[n - w[0]][d]);
            term = ar.mul(&term, &inv_fact[d]);
        }
        let mag = Mag::of(&term);
        sum = add_signed(&ar, &sum, &term, (n + c.length()).is_multiple_of(2));
        tracker.observe(&mag);
        tracker.observe(&Mag::of(&sum));
        err = err.add(&mag.mul(&per_term));
    }
    err = err.add(&tracker.peak.mul(&u).mul(&Mag::int(n)));
    let n_fact: BigUint = (1..=n as u64).map(BigUint::from).product();
    let scale = ar.biguint(&n_fact);
    let sum = ar.mul(&sum, &scale);
    let scale_mag = Mag::of(&scale);
    let mut scaled = Tracker::new();
    scaled.observe(&tracker.peak.mul(&scale_mag));
    let err = err.mul(&scale_mag).add(&Mag::of(&sum).mul(&u));
    finish(&ar, sum, &scaled, &err, ctx)
}

fn finish(
    ar: &Arith,
    sum: BigFloat,
    tracker: &Tracker,
    abs_err: &Mag,
    ctx: &PrecisionContext,
) -> Result<ExactValue> {
    ar.check(&sum)?;
    let bits = tracker.cancellation_bits(&Mag::of(&sum));
    Ok(exact_value(ar, sum, abs_err, bits, ctx))
}

/// A strictly decreasing positive vector `a_1 > ... > a_n > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    kind: WeightKind,
}

#[derive(Debug, Clone, PartialEq)]
enum WeightKind {
    Explicit(Vec<f64>),
    /// `a_j = j^(-1/p)`, materialised at working precision.
    Power {
        n: usize,
        p: f64,
    },
}

impl WeightVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidWeights("entries must be positive and finite"));
        }
        if entries.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidWeights("entries must be strictly decreasing"));
        }
        Ok(WeightVector {
            kind: WeightKind::Explicit(entries),
        })
    }

    /// The weights `a_j = j^(-1/p)`, `j = 1..=n`, that describe `B^{n,+}_{p,inf}`.
    pub fn lorentz(n: usize, p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::param("p", p, "must be a positive finite real"));
        }
        Ok(WeightVector {
            kind: WeightKind::Power { n, p },
        })
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            WeightKind::Explicit(e) => e.len(),
            WeightKind::Power { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entries rounded to `f64`.
    pub fn to_f64_vec(&self) -> Vec<f64> {
        match &self.kind {
            WeightKind::Explicit(e) => e.clone(),
            WeightKind::Power { n, p } => (1..=*n).map(|j| (j as f64).powf(-1.0 / p)).collect(),
        }
    }

    fn materialise(&self, ar: &mut Arith) -> Vec<BigFloat> {
        match &self.kind {
            WeightKind::Explicit(e) => e.iter().map(|&a| ar.float(a)).collect(),
            WeightKind::Power { n, p } => {
                let neg_inv_p = ar.reciprocal_index(*p).neg();
                (1..=*n).map(|j| ar.int_pow(j as u64, &neg_inv_p)).collect()
            }
        }
    }
}

/// `V^(m)(n, a)` through the recursion
/// `V^(m)(n, a) = sum_i (-1)^(i+1) a_i^(m+i) m!/(m+i)! V^(0)(n-i, (a_{i+1}, ..., a_n))`
/// with `V^(0)(0, ()) = 1`, memoised over suffixes of `a`.
pub fn v_integral(m: usize, a: &WeightVector, ctx: &PrecisionContext) -> Result<ExactValue> {
    let mut ar = Arith::new(ctx);
    let u = Mag::unit_roundoff(ctx.mantissa_bits());
    let w = a.materialise(&mut ar);
    let n = w.len();

    // suffix[s] = V^(0)(n - s, a[s..]) for s = n, n-1, ..., 0
    let mut inv_fact = vec![ar.one()];
    for d in 1..=n {
        let next = ar.div(&inv_fact[d - 1], &ar.int(d as u64));
        inv_fact.push(next);
    }
    let mut suffix: Vec<BigFloat> = vec![ar.zero(); n + 1];
    let mut suffix_mag = vec![Mag::zero(); n + 1];
    let mut suffix_err = vec![Mag::zero(); n + 1];
    suffix[n] = ar.one();
    suffix_mag[n] = Mag::one();
    let mut worst = 0.0f64;
    for s in (0..n).rev() {
        let len = n - s;
        let mut sum = ar.zero();
        let mut tracker = Tracker::new();
        let mut err = Mag::zero();
        for i in 1..=len {
            let coeff = ar.mul(&ar.powi(&w[s + i - 1], i), &inv_fact[i]);
            let term = ar.mul(&coeff, &suffix[s + i]);
            let coeff_mag = Mag::of(&coeff);
            let mag = coeff_mag.mul(&suffix_mag[s + i]);
            sum = add_signed(&ar, &sum, &term, i % 2 == 1);
            tracker.observe(&mag);
            tracker.observe(&Mag::of(&sum));
            let local = mag.mul(&u).mul(&Mag::int(2 * i + len + 6));
            err = err.add(&local).add(&coeff_mag.mul(&suffix_err[s + i]));
        }
        ar.check(&sum)?;
        suffix_mag[s] = Mag::of(&sum);
        worst = worst.max(tracker.cancellation_bits(&suffix_mag[s]));
        suffix_err[s] = err;
        suffix[s] = sum;
    }

    if m == 0 {
        return Ok(exact_value(
            &ar,
            suffix.swap_remove(0),
            &suffix_err[0],
            worst,
            ctx,
        ));
    }

    // Top level with the x_1^m weight: m!/(m+i)! = 1 / ((m+1)...(m+i)).
    let mut sum = ar.zero();
    let mut tracker = Tracker::new();
    let mut err = Mag::zero();
    let mut rising = BigUint::from(1u32);
    for i in 1..=n {
        rising *= BigUint::from(m + i);
        let coeff = ar.div(&ar.powi(&w[i - 1], m + i), &ar.biguint(&rising));
        let term = ar.mul(&coeff, &suffix[i]);
        let coeff_mag = Mag::of(&coeff);
        let mag = coeff_mag.mul(&suffix_mag[i]);
        sum = add_signed(&ar, &sum, &term, i % 2 == 1);
        tracker.observe(&mag);
        tracker.observe(&Mag::of(&sum));
        let local = mag.mul(&u).mul(&Mag::int(2 * (m + i) + n + 6));
        err = err.add(&local).add(&coeff_mag.mul(&suffix_err[i]));
    }
    ar.check(&sum)?;
    worst = worst.max(tracker.cancellation_bits(&Mag::of(&sum)));
    Ok(exact_value(&ar, sum, &err, worst, ctx))
}

/// `vol(B^{n,+}_{p,inf}) = n! V^(0)(n, a^(p))`.
pub fn vol_weak_positive_integral(n: usize, p: f64, ctx: &PrecisionContext) -> Result<ExactValue> {
    check_p(p)?;
    let v = v_integral(0, &WeightVector::lorentz(n, p)?, ctx)?;
    let ar = Arith::new(ctx);
    let n_fact: BigUint = (1..=n as u64).map(BigUint::from).product();
    let scaled = ar.mul(v.value.as_bigfloat(), &ar.biguint(&n_fact));
    Ok(ExactValue {
        value: ar.wrap(scaled),
        rel_error_bound: v.rel_error_bound + 2.0 * ctx.unit_roundoff(),
        conditioning: v.conditioning,
    })
}

/// Exact small binomial, shared with the asymptotics module.
pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    binomial_u128(n, k)
}
