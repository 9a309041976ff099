//! Configurable-precision arithmetic for the exact volume engines.
//!
//! Every exact formula is an alternating sum with heavy cancellation, so all
//! of it runs on [`astro_float::BigFloat`] at a caller-chosen mantissa width
//! and is rounded to `f64` only when reported.

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word};
use num_bigint::BigUint;

use crate::error::{Error, Result};

pub const DEFAULT_MANTISSA_BITS: usize = 256;
pub const MIN_MANTISSA_BITS: usize = 53;

const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionContext {
    mantissa_bits: usize,
}

impl PrecisionContext {
    pub fn new(mantissa_bits: usize) -> Result<Self> {
        if mantissa_bits < MIN_MANTISSA_BITS {
            return Err(Error::InvalidPrecision {
                bits: mantissa_bits,
                min: MIN_MANTISSA_BITS,
            });
        }
        Ok(PrecisionContext { mantissa_bits })
    }

    pub fn mantissa_bits(&self) -> usize {
        self.mantissa_bits
    }

    /// Unit roundoff `2^-bits`.
    pub fn unit_roundoff(&self) -> f64 {
        pow2(-(self.mantissa_bits as i32))
    }

    pub(crate) fn with_bits(&self, bits: usize) -> Self {
        PrecisionContext {
            mantissa_bits: bits.max(MIN_MANTISSA_BITS),
        }
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            mantissa_bits: DEFAULT_MANTISSA_BITS,
        }
    }
}

/// A positive or negative real held at full working precision.
#[derive(Debug, Clone)]
pub struct HighPrecision {
    value: BigFloat,
    bits: usize,
}

impl HighPrecision {
    pub(crate) fn new(value: BigFloat, bits: usize) -> Self {
        HighPrecision { value, bits }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn as_bigfloat(&self) -> &BigFloat {
        &self.value
    }

    /// Nearest `f64`.
    pub fn to_f64(&self) -> f64 {
        bigfloat_to_f64(&self.value)
    }

    /// Natural logarithm, computed at full precision before rounding.
    pub fn ln_f64(&self) -> f64 {
        let mut cc = consts();
        bigfloat_to_f64(&self.value.ln(self.bits, RM, &mut cc))
    }

    pub fn is_positive(&self) -> bool {
        self.value.is_positive() && !self.value.is_zero()
    }

    /// `|self - other| / |other|`, evaluated at full precision.
    pub fn relative_difference(&self, other: &HighPrecision) -> f64 {
        let p = self.bits.max(other.bits);
        let diff = self.value.sub(&other.value, p, RM).abs();
        bigfloat_to_f64(&diff.div(&other.value.abs(), p, RM))
    }

    /// Decimal rendering with all working digits.
    pub fn to_decimal_string(&self) -> String {
        self.value.to_string()
    }
}

pub(crate) fn consts() -> Consts {
    Consts::new().expect("astro-float constants cache")
}

/// Working state for one computation: precision plus the constants cache
/// that `ln`/`exp` need.
pub(crate) struct Arith {
    p: usize,
    cc: Consts,
}

impl Arith {
    pub(crate) fn new(ctx: &PrecisionContext) -> Self {
        Arith {
            p: ctx.mantissa_bits,
            cc: consts(),
        }
    }

    pub(crate) fn bits(&self) -> usize {
        self.p
    }

    pub(crate) fn wrap(&self, v: BigFloat) -> HighPrecision {
        HighPrecision::new(v, self.p)
    }

    pub(crate) fn zero(&self) -> BigFloat {
        BigFloat::from_u64(0, self.p)
    }

    pub(crate) fn one(&self) -> BigFloat {
        BigFloat::from_u64(1, self.p)
    }

    pub(crate) fn int(&self, v: u64) -> BigFloat {
        BigFloat::from_u64(v, self.p)
    }

    pub(crate) fn float(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.p)
    }

    /// Exact conversion of an arbitrary integer (precision widened if needed).
    pub(crate) fn biguint(&self, v: &BigUint) -> BigFloat {
        let digits = v.to_u64_digits();
        let p = self.p.max(64 * digits.len() + 64);
        let shift = BigFloat::from_u128(1u128 << 64, p);
        let mut acc = BigFloat::from_u64(0, p);
        for d in digits.iter().rev() {
            acc = acc
                .mul(&shift, p, RM)
                .add(&BigFloat::from_u64(*d, p), p, RM);
        }
        if p == self.p {
            acc
        } else {
            // Round once to working precision.
            let mut r = acc;
            r.set_precision(self.p, RM).ok();
            r
        }
    }

    pub(crate) fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    pub(crate) fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    pub(crate) fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    pub(crate) fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    pub(crate) fn powi(&self, a: &BigFloat, n: usize) -> BigFloat {
        if n == 0 {
            return self.one();
        }
        a.powi(n, self.p, RM)
    }

    pub(crate) fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.p, RM, &mut self.cc)
    }

    pub(crate) fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.p, RM, &mut self.cc)
    }

    /// `base^exponent = exp(exponent * ln base)` for a positive integer base.
    pub(crate) fn int_pow(&mut self, base: u64, exponent: &BigFloat) -> BigFloat {
        if base == 1 {
            return self.one();
        }
        let l = self.ln(&self.int(base));
        let t = self.mul(&l, exponent);
        self.exp(&t)
    }

    /// `1/p` at working precision; `p = inf` maps to zero.
    pub(crate) fn reciprocal_index(&self, p: f64) -> BigFloat {
        if p.is_infinite() {
            self.zero()
        } else {
            self.div(&self.one(), &self.float(p))
        }
    }

    pub(crate) fn check(&self, v: &BigFloat) -> Result<()> {
        if v.is_nan() {
            return Err(Error::Arithmetic(format!("{:?}", v.err())));
        }
        Ok(())
    }
}

/// Non-negative magnitude for error bookkeeping: 64-bit mantissa, unbounded
/// exponent, every operation rounded up so bounds stay bounds.
#[derive(Debug, Clone)]
pub(crate) struct Mag(BigFloat);

const MAG_BITS: usize = 64;

impl Mag {
    pub(crate) fn zero() -> Self {
        Mag(BigFloat::from_u64(0, MAG_BITS))
    }

    pub(crate) fn one() -> Self {
        Mag(BigFloat::from_u64(1, MAG_BITS))
    }

    pub(crate) fn of(v: &BigFloat) -> Self {
        let mut a = v.abs();
        a.set_precision(MAG_BITS, RoundingMode::Up).ok();
        Mag(a)
    }

    pub(crate) fn int(v: usize) -> Self {
        Mag(BigFloat::from_u64(v as u64, MAG_BITS))
    }

    /// `2^-bits`.
    pub(crate) fn unit_roundoff(bits: usize) -> Self {
        let mut one = BigFloat::from_u64(1, MAG_BITS);
        one.set_exponent(1 - bits as i32);
        Mag(one)
    }

    pub(crate) fn add(&self, o: &Mag) -> Mag {
        Mag(self.0.add(&o.0, MAG_BITS, RoundingMode::Up))
    }

    pub(crate) fn mul(&self, o: &Mag) -> Mag {
        Mag(self.0.mul(&o.0, MAG_BITS, RoundingMode::Up))
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub(crate) fn max(self, o: Mag) -> Mag {
        if o.0 > self.0 {
            o
        } else {
            self
        }
    }

    /// `log2` of the magnitude; `-inf` for zero.
    pub(crate) fn log2(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        if self.0.is_inf() || self.0.is_nan() {
            return f64::INFINITY;
        }
        let e = self.0.exponent().unwrap_or(0) as f64;
        let mut frac = self.0.clone();
        frac.set_exponent(0);
        bigfloat_to_f64(&frac).log2() + e
    }

    /// `self / o` as `f64`; infinite when `o` is zero and `self` is not.
    pub(crate) fn ratio(&self, o: &Mag) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        if o.0.is_zero() {
            return f64::INFINITY;
        }
        bigfloat_to_f64(&self.0.div(&o.0, MAG_BITS, RoundingMode::Up))
    }
}

/// Round a `BigFloat` to the nearest `f64` (ties to even).
pub fn bigfloat_to_f64(v: &BigFloat) -> f64 {
    if v.is_nan() {
        return f64::NAN;
    }
    if v.is_inf_pos() {
        return f64::INFINITY;
    }
    if v.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if v.is_zero() {
        return 0.0;
    }
    let (words, _, sign, exponent, _) = match v.as_raw_parts() {
        Some(parts) => parts,
        None => return f64::NAN,
    };
    let (top, sticky) = top_64_bits(words);
    // Fold lower bits into the last place so the single u64 -> f64 rounding
    // below is correct.
    let top = if sticky { top | 1 } else { top };
    let magnitude = scale_by_pow2(top as f64, exponent as i64 - 64);
    match sign {
        Sign::Pos => magnitude,
        Sign::Neg => -magnitude,
    }
}

fn top_64_bits(words: &[Word]) -> (u64, bool) {
    let word_bits = Word::BITS as usize;
    let per = 64 / word_bits;
    let len = words.len();
    let mut top: u64 = 0;
    for i in 0..per {
        let w = if len > i { words[len - 1 - i] } else { 0 };
        top |= w << (64 - word_bits * (i + 1));
    }
    let sticky = words[..len.saturating_sub(per)].iter().any(|&w| w != 0);
    (top, sticky)
}

fn scale_by_pow2(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= pow2(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= pow2(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * pow2(e as i32)
}

/// `2^e` for `-1074 <= e <= 1023`, exact.
pub(crate) fn pow2(e: i32) -> f64 {
    if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else if e >= -1074 {
        f64::from_bits(1u64 << (e + 1074))
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::new(52).is_err());
        assert!(PrecisionContext::new(53).is_ok());
        assert_eq!(PrecisionContext::default().mantissa_bits(), 256);
    }

    #[test]
    fn f64_round_trip() {
        for &f in &[
            1.0,
            0.75,
            -3.0,
            1e-300,
            1.234_567_890_123_456_7e200,
            f64::MIN_POSITIVE,
            std::f64::consts::PI,
        ] {
            let b = BigFloat::from_f64(f, 256);
            assert_eq!(bigfloat_to_f64(&b), f, "{f}");
        }
    }

    #[test]
    fn subnormal_results() {
        let ctx = PrecisionContext::default();
        let a = Arith::new(&ctx);
        let tiny = a.div(&a.one(), &a.powi(&a.int(2), 1074));
        assert_eq!(bigfloat_to_f64(&tiny), 5e-324);
        let below = a.div(&a.one(), &a.powi(&a.int(2), 1080));
        assert_eq!(bigfloat_to_f64(&below), 0.0);
    }

    #[test]
    fn conversion_rounds_to_nearest() {
        let ctx = PrecisionContext::default();
        let a = Arith::new(&ctx);
        let third = a.div(&a.one(), &a.int(3));
        assert_eq!(bigfloat_to_f64(&third), 1.0 / 3.0);
        let x = a.div(&a.int(2), &a.int(7));
        assert_eq!(bigfloat_to_f64(&x), 2.0 / 7.0);
    }

    #[test]
    fn biguint_conversion_is_exact() {
        let ctx = PrecisionContext::default();
        let a = Arith::new(&ctx);
        let big: BigUint = (1..=30u32).map(BigUint::from).product();
        let f = a.biguint(&big);
        assert_eq!(
            f.to_string(),
            BigFloat::from_u128(265252859812191058636308480000000, 256).to_string()
        );
    }

    #[test]
    fn magnitudes_keep_their_range() {
        let tiny = Mag::unit_roundoff(4096);
        assert_eq!(tiny.log2(), -4096.0);
        let a = tiny.mul(&Mag::int(3));
        assert!((a.log2() - (-4096.0 + 3f64.log2())).abs() < 1e-12);
        assert_eq!(a.ratio(&tiny), 3.0);
        assert_eq!(Mag::zero().log2(), f64::NEG_INFINITY);
        assert_eq!(Mag::one().add(&Mag::one()).log2(), 1.0);
        let third = Arith::new(&PrecisionContext::default());
        let t = Mag::of(&third.div(&third.one(), &third.int(3)));
        assert!(t.ratio(&Mag::one()) >= 1.0 / 3.0);
    }

    #[test]
    fn pow2_exact() {
        assert_eq!(pow2(0), 1.0);
        assert_eq!(pow2(-1), 0.5);
        assert_eq!(pow2(10), 1024.0);
        assert_eq!(pow2(-1074), 5e-324);
    }
}
