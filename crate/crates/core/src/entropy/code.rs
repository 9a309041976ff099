//! Families of `k`-subsets of `{0, .., n-1}` with small pairwise
//! intersections, built by randomised greedy search and then verified.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest family the quadratic verification is asked to handle.
pub const MAX_FAMILY: usize = 50_000;

/// A family of index sets; indices are zero-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexSetFamily {
    pub n: usize,
    pub k: usize,
    /// Each set sorted increasingly.
    pub sets: Vec<Vec<usize>>,
    /// `ceil((n / (4k))^{k/2})`.
    pub target: usize,
    pub certified: bool,
}

/// Result of checking a family against the three coding-set properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodeReport {
    pub count_ok: bool,
    pub sizes_ok: bool,
    pub max_intersection: usize,
    pub intersections_ok: bool,
}

impl CodeReport {
    pub fn all_ok(&self) -> bool {
        self.count_ok && self.sizes_ok && self.intersections_ok
    }
}

/// Bitset over `{0, .., n-1}`.
#[derive(Debug, Clone)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    pub(crate) fn from_indices(n: usize, idx: &[usize]) -> Self {
        let mut w = vec![0u64; n.div_ceil(64)];
        for &i in idx {
            w[i / 64] |= 1 << (i % 64);
        }
        Bits(w)
    }

    pub(crate) fn intersection(&self, o: &Bits) -> usize {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
}

/// Pairwise intersections must stay strictly below `k/2`.
fn intersection_limit(k: usize) -> usize {
    // largest integer < k/2
    (k - 1) / 2
}

/// `ceil((n / (4k))^{k/2})`, or `None` when it exceeds [`MAX_FAMILY`].
pub fn code_target(n: usize, k: usize) -> Option<usize> {
    let t = (n as f64 / (4.0 * k as f64)).powf(k as f64 / 2.0);
    if t > MAX_FAMILY as f64 {
        return None;
    }
    // guard against powf landing a hair above an exact integer
    let r = t.round();
    let t = if (t - r).abs() <= 1e-9 * r.max(1.0) {
        r
    } else {
        t.ceil()
    };
    Some(t.max(1.0) as usize)
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::param("k", 0.0, "must be positive"));
    }
    if k > n {
        return Err(Error::param("k", k as f64, "must not exceed n"));
    }
    Ok(())
}

impl IndexSetFamily {
    /// Direct check of the size, intersection and cardinality properties.
    pub fn verify(&self) -> CodeReport {
        let sizes_ok = self.sets.iter().all(|s| {
            s.len() == self.k && s.windows(2).all(|w| w[0] < w[1]) && s.iter().all(|&i| i < self.n)
        });
        let bits: Vec<Bits> = self
            .sets
            .iter()
            .map(|s| Bits::from_indices(self.n, s))
            .collect();
        let mut max_intersection = 0;
        for i in 0..bits.len() {
            for j in 0..i {
                max_intersection = max_intersection.max(bits[i].intersection(&bits[j]));
            }
        }
        let bound = (self.n as f64 / (4.0 * self.k as f64)).powf(self.k as f64 / 2.0);
        CodeReport {
            count_ok: self.sets.len() >= self.target
                && self.sets.len() as f64 >= bound * (1.0 - 1e-12),
            sizes_ok,
            max_intersection,
            intersections_ok: self.sets.len() < 2 || 2 * max_intersection < self.k,
        }
    }
}

/// Default number of rejected draws tolerated before giving up.
pub fn default_budget(target: usize) -> usize {
    1000 * target + 10_000
}

/// Greedy randomised construction: draw uniform `k`-subsets and keep those
/// meeting every kept set in fewer than `k/2` points, until the target
/// count is reached.
pub fn construct_code(n: usize, k: usize, seed: u64) -> Result<IndexSetFamily> {
    check_nk(n, k)?;
    let target = code_target(n, k).ok_or_else(|| Error::FamilyTooLarge {
        required: (n as f64 / (4.0 * k as f64)).powf(k as f64 / 2.0),
        limit: MAX_FAMILY,
    })?;
    construct_code_with_budget(n, k, target, seed, default_budget(target))
}

/// [`construct_code`] with an explicit target size and draw budget.
pub fn construct_code_with_budget(
    n: usize,
    k: usize,
    target: usize,
    seed: u64,
    max_rejections: usize,
) -> Result<IndexSetFamily> {
    check_nk(n, k)?;
    if target > MAX_FAMILY {
        return Err(Error::FamilyTooLarge {
            required: target as f64,
            limit: MAX_FAMILY,
        });
    }
    let limit = intersection_limit(k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets = Vec::with_capacity(target);
    let mut bits: Vec<Bits> = Vec::with_capacity(target);
    let mut rejections = 0;
    while sets.len() < target {
        let mut cand: Vec<usize> = sample(&mut rng, n, k).into_vec();
        cand.sort_unstable();
        let b = Bits::from_indices(n, &cand);
        if bits.iter().all(|o| b.intersection(o) <= limit) {
            sets.push(cand);
            bits.push(b);
        } else {
            rejections += 1;
            if rejections > max_rejections {
                let achieved = sets.len();
                let partial = IndexSetFamily {
                    n,
                    k,
                    sets,
                    target,
                    certified: false,
                };
                return Err(Error::ConstructionExhausted {
                    achieved,
                    target,
                    partial: Box::new(partial),
                });
            }
        }
    }
    let mut family = IndexSetFamily {
        n,
        k,
        sets,
        target,
        certified: false,
    };
    family.certified = family.verify().all_ok();
    Ok(family)
}
