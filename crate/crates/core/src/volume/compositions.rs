//! Integer compositions of `n`: ordered tuples of positive integers summing
//! to `n`, and their partial-sum form `0 = m_0 < m_1 < ... < m_j = n`.

use crate::error::{Error, Result};

/// Default upper limit on `n` for full enumeration (`2^(n-1)` items).
pub const DEFAULT_COMPOSITION_CAP: usize = 24;
/// Multinomials are held in `u128`, exact up to `34!`.
pub const MAX_COMPOSITION_CAP: usize = 34;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition {
    parts: Vec<usize>,
    n: usize,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Unsupported(
                "a composition needs at least one part".into(),
            ));
        }
        if parts.contains(&0) {
            return Err(Error::Unsupported(
                "composition parts must be positive".into(),
            ));
        }
        let n = parts.iter().sum();
        Ok(Composition { parts, n })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of parts.
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    /// `(0, k_1, k_1 + k_2, ..., n)`.
    pub fn partial_sums(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        let mut acc = 0;
        out.push(0);
        for &k in &self.parts {
            acc += k;
            out.push(acc);
        }
        out
    }

    /// Inverse of [`Composition::partial_sums`].
    pub fn from_partial_sums(m: &[usize]) -> Result<Self> {
        if m.len() < 2 || m[0] != 0 {
            return Err(Error::Unsupported("partial sums must start at 0".into()));
        }
        if m.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Unsupported(
                "partial sums must strictly increase".into(),
            ));
        }
        Self::new(m.windows(2).map(|w| w[1] - w[0]).collect())
    }

    /// `n! / (k_1! ... k_j!)`, exact.
    pub fn multinomial(&self) -> u128 {
        multinomial(self.n, &self.parts)
    }
}

pub(crate) fn multinomial(n: usize, parts: &[usize]) -> u128 {
    // Build as a product of binomials to keep intermediates small.
    let mut acc: u128 = 1;
    let mut placed = 0usize;
    for &k in parts {
        placed += k;
        acc *= binomial_u128(placed, k);
    }
    debug_assert_eq!(placed, n);
    acc
}

pub(crate) fn binomial_u128(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Lexicographic stream over all compositions of `n`.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Option<Vec<usize>>,
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let parts = self.current.take()?;
        let out = Composition {
            n: parts.iter().sum(),
            parts: parts.clone(),
        };
        self.current = successor(parts);
        Some(out)
    }
}

/// Lexicographic successor: `(.., a, b) -> (.., a + 1, 1, ..., 1)` with
/// `b - 1` trailing ones.
fn successor(mut parts: Vec<usize>) -> Option<Vec<usize>> {
    if parts.len() < 2 {
        return None;
    }
    let b = parts.pop().expect("len >= 2");
    *parts.last_mut().expect("len >= 1") += 1;
    parts.extend(std::iter::repeat_n(1, b - 1));
    Some(parts)
}

pub fn enumerate_compositions(n: usize) -> Result<Compositions> {
    enumerate_compositions_capped(n, DEFAULT_COMPOSITION_CAP)
}

pub fn enumerate_compositions_capped(n: usize, cap: usize) -> Result<Compositions> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    let cap = cap.min(MAX_COMPOSITION_CAP);
    if n > cap {
        return Err(Error::CompositionCapExceeded {
            n,
            cap,
            count: 2f64.powi(n as i32 - 1),
        });
    }
    Ok(Compositions {
        current: Some(vec![1; n]),
    })
}
