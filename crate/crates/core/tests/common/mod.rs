//! Reference values computed without any of the crate's volume engines.

#![allow(dead_code)]

use statrs::function::gamma::ln_gamma;

/// `vol(B^n_{p,q})` for finite `q` by nested quadrature.
///
/// With `F(x) = sum_k k^{q/p-1} x_k^q` on the cone `x_1 >= .. >= x_n >= 0`,
/// `F` is `q`-homogeneous, so `vol{F <= 1} = int e^{-F} / Gamma(1 + n/q)`.
/// The cone integral is evaluated innermost-first as cumulative trapezoid
/// sums on `[0, T]`, and two grid sizes are combined by Richardson
/// extrapolation.
pub fn quadrature_volume(n: usize, p: f64, q: f64) -> f64 {
    let coarse = cone_integral(n, p, q, 1 << 15);
    let fine = cone_integral(n, p, q, 1 << 16);
    let cone = (4.0 * fine - coarse) / 3.0;
    let log = cone.ln() + n as f64 * std::f64::consts::LN_2 + ln_gamma(n as f64 + 1.0)
        - ln_gamma(1.0 + n as f64 / q);
    log.exp()
}

fn cone_integral(n: usize, p: f64, q: f64, steps: usize) -> f64 {
    let t_max = 45f64.powf(1.0 / q);
    let h = t_max / steps as f64;
    let grid: Vec<f64> = (0..=steps).map(|i| i as f64 * h).collect();
    let mut inner = vec![1.0; steps + 1];
    for k in (1..=n).rev() {
        let w = (k as f64).powf(q / p - 1.0);
        let f: Vec<f64> = grid
            .iter()
            .zip(&inner)
            .map(|(&s, &g)| (-w * s.powf(q)).exp() * g)
            .collect();
        let mut acc = 0.0;
        inner[0] = 0.0;
        for i in 1..=steps {
            acc += 0.5 * h * (f[i - 1] + f[i]);
            inner[i] = acc;
        }
    }
    inner[steps]
}

/// `vol(B^{n,+}_{1,inf})` by the weak-ball recursion in `f64`, for small `n`.
pub fn weak_positive_f64(n: usize, p: f64) -> f64 {
    let mut v = vec![1.0f64];
    for m in 1..=n {
        let mut s = 0.0;
        let mut b = 1.0;
        for j in 1..=m {
            b = b * (m - j + 1) as f64 / j as f64;
            let t = b * (m as f64).powf(-(j as f64) / p) * v[m - j];
            s += if j % 2 == 1 { t } else { -t };
        }
        v.push(s);
    }
    v[n]
}
