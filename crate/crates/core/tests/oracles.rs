mod common;

use common::quadrature_volume;
use lorentz_volume::{mc_volume, vol_ball, McConfig, Method, Params, PrecisionContext};

fn auto(n: usize, p: f64, q: f64) -> f64 {
    vol_ball(
        n,
        Params::new(p, q).unwrap(),
        Method::Auto,
        &PrecisionContext::default(),
        &McConfig::default(),
    )
    .unwrap()
    .value
}

#[test]
fn quadrature_matches_closed_forms() {
    for n in 1..=6 {
        let factorial: f64 = (1..=n).map(|k| k as f64).product();
        let q1 = quadrature_volume(n, 1.0, 1.0);
        assert!(
            (q1 / (2f64.powi(n as i32) / factorial) - 1.0).abs() < 1e-9,
            "n={n}"
        );
    }
    assert!((quadrature_volume(2, 2.0, 2.0) / std::f64::consts::PI - 1.0).abs() < 1e-9);
    // (1,2), n = 2: x_1^2 + 2 x_2^2 <= 1 on |x_2| <= |x_1| has area 2 sqrt2 atan(sqrt2)
    let expected = 2.0 * 2f64.sqrt() * 2f64.sqrt().atan();
    assert!((quadrature_volume(2, 1.0, 2.0) / expected - 1.0).abs() < 1e-9);
}

#[test]
fn exact_engines_match_quadrature() {
    for (p, q) in [(2.0, 1.0), (0.5, 1.0), (3.0, 3.0), (1.5, 1.0)] {
        for n in [2usize, 5, 8] {
            let e = auto(n, p, q);
            let r = quadrature_volume(n, p, q);
            assert!((e / r - 1.0).abs() < 1e-8, "p={p} q={q} n={n}: {e} vs {r}");
        }
    }
}

#[test]
fn monte_carlo_matches_quadrature_off_the_exact_grid() {
    let cfg = McConfig::with_samples(2_000_000, 5).unwrap();
    for (p, q) in [(1.0, 2.0), (2.0, 3.0), (0.7, 1.5)] {
        for n in [2usize, 3, 5] {
            let est = mc_volume(n, Params::new(p, q).unwrap(), &cfg).unwrap();
            let r = quadrature_volume(n, p, q);
            // 99% interval widened to 4.5 sigma so nine checks stay far from flaky
            let sigma = est.ci_half_width / cfg.z();
            assert!(
                (est.volume - r).abs() < 4.5 * sigma,
                "p={p} q={q} n={n}: {est:?} vs {r}"
            );
        }
    }
}

#[test]
fn weak_engines_match_f64_recursion_at_small_n() {
    for p in [0.5, 1.0, 2.0, 7.0] {
        for n in 1..=8 {
            let e = auto(n, p, f64::INFINITY);
            let r = 2f64.powi(n as i32) * common::weak_positive_f64(n, p);
            assert!((e / r - 1.0).abs() < 1e-10, "p={p} n={n}");
        }
    }
}
