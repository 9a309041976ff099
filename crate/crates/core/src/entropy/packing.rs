//! Layered dyadic vectors that are small in `l_{1,inf}` and far apart in
//! `l_1`: `x^j = sum_{l = mu..nu} 4^{-l} chi(T~^l_j)`, where the `T~^l_j` are
//! the coding sets of size `4^l` with all lower levels removed.
//!
//! Entries are multiples of `4^{-nu}`, so every norm and distance below is
//! evaluated exactly in integer units of `4^{-nu}`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::code::{code_target, construct_code_with_budget, default_budget, IndexSetFamily};
use crate::error::{Error, Result};
use crate::norm::Vector;

/// Largest family for which all pairwise distances are checked.
pub const MAX_PACKING: usize = 4096;

#[derive(Debug, Clone, Serialize)]
pub struct PackingFamily {
    pub n: usize,
    pub mu: u32,
    pub nu: u32,
    pub vectors: Vec<Vector>,
    /// `levels[j][l - mu]` is `T~^l_j`.
    pub levels: Vec<Vec<Vec<usize>>>,
    /// `max_j ||x^j||_{1,inf}`.
    pub weak_norm_bound: f64,
    /// `min_{i != j} ||x^i - x^j||_1` (infinite for a single vector).
    pub min_pairwise_l1: f64,
    /// The same two numbers in units of `4^{-nu}`.
    pub weak_norm_units: u64,
    pub min_pairwise_l1_units: Option<u64>,
    pub disjoint: bool,
    pub level_sizes_ok: bool,
}

impl PackingFamily {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `4^nu`, the number of units in 1.
    pub fn scale(&self) -> u64 {
        4u64.pow(self.nu)
    }

    /// `||x^j||_{1,inf} <= 4/3`, checked as `3 * units <= 4 * 4^nu`.
    pub fn weak_norm_ok(&self) -> bool {
        3 * self.weak_norm_units <= 4 * self.scale()
    }

    /// `||x^i - x^j||_1 >= (nu - mu + 1)/8`, checked as
    /// `8 * units >= (nu - mu + 1) * 4^nu`.
    pub fn separation_ok(&self) -> bool {
        match self.min_pairwise_l1_units {
            None => true,
            Some(d) => 8 * d >= (self.nu - self.mu + 1) as u64 * self.scale(),
        }
    }

    pub fn guarantees_hold(&self) -> bool {
        self.weak_norm_ok() && self.separation_ok() && self.disjoint && self.level_sizes_ok
    }
}

/// Largest `nu >= 1` with `12 * 4^nu <= n`.
pub fn max_level(n: usize) -> Option<u32> {
    let mut nu = 0u32;
    while 12u128 * 4u128.pow(nu + 1) <= n as u128 {
        nu += 1;
    }
    (nu >= 1).then_some(nu)
}

/// `M = ceil((n / 4^{mu+1})^{4^mu / 2})`, if it stays below [`MAX_PACKING`].
pub fn packing_size(n: usize, mu: u32) -> Option<usize> {
    let k = 4usize.checked_pow(mu)?;
    code_target(n, k).filter(|&m| m <= MAX_PACKING)
}

fn level_seed(seed: u64, level: u32) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(level as u64 + 1);
    rng.next_u64()
}

/// Build `x^1, .., x^M`, `M = ceil((n/4^{mu+1})^{4^mu/2})`, from one coding
/// family per level `mu..=nu`, and certify the norm and separation bounds.
pub fn build_packing(n: usize, mu: u32, nu: u32, seed: u64) -> Result<PackingFamily> {
    if mu < 1 || nu < mu {
        return Err(Error::Unsupported(format!(
            "levels must satisfy 1 <= mu <= nu (got mu = {mu}, nu = {nu})"
        )));
    }
    if 12u128 * 4u128.pow(nu) > n as u128 {
        return Err(Error::Unsupported(format!(
            "12 * 4^nu = {} exceeds n = {n}",
            12u128 * 4u128.pow(nu)
        )));
    }
    let m = packing_size(n, mu).ok_or_else(|| Error::FamilyTooLarge {
        required: (n as f64 / 4f64.powi(mu as i32 + 1)).powf(4f64.powi(mu as i32) / 2.0),
        limit: MAX_PACKING,
    })?;

    let families: Vec<IndexSetFamily> = (mu..=nu)
        .map(|l| {
            let k = 4usize.pow(l);
            construct_code_with_budget(n, k, m, level_seed(seed, l), default_budget(m))
        })
        .collect::<Result<_>>()?;

    let depth = (nu - mu + 1) as usize;
    let mut levels = Vec::with_capacity(m);
    let mut units: Vec<Vec<u64>> = Vec::with_capacity(m);
    let mut disjoint = true;
    let mut level_sizes_ok = true;
    for j in 0..m {
        let mut taken = vec![false; n];
        let mut x = vec![0u64; n];
        let mut tilde = Vec::with_capacity(depth);
        for (d, fam) in families.iter().enumerate() {
            let l = mu + d as u32;
            let t: Vec<usize> = fam.sets[j].iter().copied().filter(|&u| !taken[u]).collect();
            let size = 4usize.pow(l);
            // |T~^mu| = 4^mu, and 3 |T~^l| >= 2 * 4^l above it
            level_sizes_ok &= if d == 0 {
                t.len() == size
            } else {
                3 * t.len() >= 2 * size
            };
            for &u in &t {
                disjoint &= x[u] == 0;
                x[u] = 4u64.pow(nu - l);
            }
            for &u in &fam.sets[j] {
                taken[u] = true;
            }
            tilde.push(t);
        }
        levels.push(tilde);
        units.push(x);
    }

    let weak_norm_units = units.iter().map(|x| weak_units(x)).max().unwrap_or(0);
    let mut min_l1: Option<u64> = None;
    for i in 0..m {
        for j in 0..i {
            let d: u64 = units[i]
                .iter()
                .zip(&units[j])
                .map(|(a, b)| a.abs_diff(*b))
                .sum();
            min_l1 = Some(min_l1.map_or(d, |c| c.min(d)));
        }
    }
    let scale = 4f64.powi(nu as i32);
    let vectors = units
        .iter()
        .map(|x| Vector::new(x.iter().map(|&u| u as f64 / scale).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(PackingFamily {
        n,
        mu,
        nu,
        vectors,
        levels,
        weak_norm_bound: weak_norm_units as f64 / scale,
        min_pairwise_l1: min_l1.map_or(f64::INFINITY, |d| d as f64 / scale),
        weak_norm_units,
        min_pairwise_l1_units: min_l1,
        disjoint,
        level_sizes_ok,
    })
}

/// `max_k k x*_k` for a non-negative integer vector.
fn weak_units(x: &[u64]) -> u64 {
    let mut s = x.to_vec();
    s.sort_unstable_by(|a, b| b.cmp(a));
    s.iter()
        .enumerate()
        .map(|(i, &v)| (i as u64 + 1) * v)
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::{lorentz_norm, Params};

    #[test]
    fn levels() {
        assert_eq!(max_level(47), None);
        assert_eq!(max_level(48), Some(1));
        assert_eq!(max_level(191), Some(1));
        assert_eq!(max_level(192), Some(2));
        assert_eq!(packing_size(192, 1), Some(144));
        assert_eq!(packing_size(48, 1), Some(9));
    }

    #[test]
    fn single_level() {
        let f = build_packing(48, 1, 1, 2).unwrap();
        assert_eq!(f.len(), 9);
        assert!(f.guarantees_hold(), "{f:?}");
        assert_eq!(f.weak_norm_bound, 1.0);
        let w = Params::weak(1.0).unwrap();
        for x in &f.vectors {
            assert_eq!(lorentz_norm(x, w), 1.0);
            assert_eq!(x.entries().iter().filter(|&&v| v == 0.25).count(), 4);
        }
        assert!(f.min_pairwise_l1 >= 0.125);
    }

    #[test]
    fn two_levels() {
        let f = build_packing(192, 1, 2, 7).unwrap();
        assert_eq!(f.len(), 144);
        assert!(f.weak_norm_ok() && f.separation_ok());
        assert!(f.weak_norm_bound <= 4.0 / 3.0);
        assert!(f.min_pairwise_l1 >= 0.25);
        assert!(f.disjoint && f.level_sizes_ok);
        // an independent check in floating point on dyadic entries (exact)
        let w = Params::weak(1.0).unwrap();
        for (i, x) in f.vectors.iter().enumerate() {
            assert!(lorentz_norm(x, w) <= 4.0 / 3.0);
            for y in &f.vectors[..i] {
                assert!(x.l1_distance(y) >= 0.25);
            }
        }
        for tilde in &f.levels {
            assert!(tilde[0].iter().all(|u| !tilde[1].contains(u)));
            assert_eq!(tilde[0].len(), 4);
            assert!(3 * tilde[1].len() >= 32);
        }
    }

    #[test]
    fn rejects_infeasible_levels() {
        assert!(build_packing(191, 1, 2, 0).is_err());
        assert!(build_packing(192, 0, 1, 0).is_err());
        assert!(build_packing(192, 2, 1, 0).is_err());
    }

    #[test]
    fn weak_units_direct() {
        assert_eq!(weak_units(&[1, 4, 4, 0]), 8);
        assert_eq!(weak_units(&[]), 0);
    }
}
