//! Greedy separated sets in `l_1` and the empirical covering radii they give.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mc::MAX_MC_DIMENSION;
use crate::norm::{BallTester, Params, Vector};

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Indices of a greedy maximal subset whose pairwise `l_1` distances all
/// exceed `eps`, scanning `points` in order.
pub fn greedy_separated_indices(points: &[Vector], eps: f64) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    for (i, x) in points.iter().enumerate() {
        if kept
            .iter()
            .all(|&j| l1(x.entries(), points[j].entries()) > eps)
        {
            kept.push(i);
        }
    }
    kept
}

/// A maximal `eps`-separated subset of `points` in `l_1`. Every input point
/// lies within `eps` of some returned point.
pub fn greedy_separated_set(points: &[Vector], eps: f64) -> Vec<Vector> {
    greedy_separated_indices(points, eps)
        .into_iter()
        .map(|i| points[i].clone())
        .collect()
}

/// `count` uniform points of `B^n_{p,q}` by rejection from the cube.
pub fn sample_ball(n: usize, params: Params, count: usize, seed: u64) -> Result<Vec<Vector>> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    if n > MAX_MC_DIMENSION {
        return Err(Error::DimensionTooLarge {
            n,
            max: MAX_MC_DIMENSION,
        });
    }
    let tester = BallTester::new(n, params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut x = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    while out.len() < count {
        for xi in x.iter_mut() {
            *xi = 2.0 * rng.random::<f64>() - 1.0;
        }
        scratch.copy_from_slice(&x);
        if tester.contains_in_place(&mut scratch) {
            out.push(Vector::new(x.clone())?);
        }
    }
    Ok(out)
}

/// Smallest `eps` (to bisection accuracy) whose greedy `eps`-net of the
/// cloud needs at most `budget` points.
pub fn covering_radius_estimate(points: &[Vector], budget: usize) -> f64 {
    if points.len() <= budget {
        return 0.0;
    }
    let diameter_bound = points
        .iter()
        .map(|x| 2.0 * x.entries().iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let (mut lo, mut hi) = (0.0, diameter_bound);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if greedy_separated_indices(points, mid).len() <= budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
