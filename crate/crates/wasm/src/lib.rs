//! Browser bindings. Each operation has a plain Rust form returning JSON (or
//! bytes), used by native tests, and a `wasm_bindgen` export that maps errors
//! to `JsError`.

use lorentz_volume::asymptotics::ratio_sequence;
use lorentz_volume::volume::volume_table;
use lorentz_volume::{BallTester, McConfig, Method, Params, PrecisionContext};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest dimension the page may request from the exact engines.
pub const MAX_DIMENSION: usize = 120;
/// Largest side of the membership raster.
pub const MAX_RESOLUTION: usize = 1024;

#[derive(Serialize)]
struct CurvePoint {
    n: usize,
    value: f64,
    log_value: f64,
    method: Method,
    error_bound: f64,
    flagged: bool,
}

#[derive(Serialize)]
struct RatioRow {
    n: usize,
    ratio: f64,
    growth: f64,
    lower_bound: Option<f64>,
    flagged: bool,
}

fn context(bits: usize) -> Result<PrecisionContext, String> {
    PrecisionContext::new(bits).map_err(|e| e.to_string())
}

fn check_dimension(n_max: usize) -> Result<(), String> {
    if n_max > MAX_DIMENSION {
        return Err(format!(
            "n_max = {n_max} exceeds the page limit of {MAX_DIMENSION}"
        ));
    }
    Ok(())
}

/// `vol(B^n_{p,q})` for `n = 1..=n_max` as a JSON array. Pairs without an
/// exact engine use Monte Carlo with `samples` draws.
pub fn volume_curve_json(
    p: f64,
    q: f64,
    n_max: usize,
    bits: usize,
    samples: u64,
) -> Result<String, String> {
    check_dimension(n_max)?;
    let ctx = context(bits)?;
    let mc = McConfig::with_samples(samples, 1).map_err(|e| e.to_string())?;
    let table = volume_table(&[p], q, n_max, &ctx, &mc).map_err(|e| e.to_string())?;
    let points: Vec<CurvePoint> = table.columns[0]
        .values
        .iter()
        .map(|v| CurvePoint {
            n: v.n,
            value: v.value,
            log_value: v.log_value,
            method: v.method,
            error_bound: v.error_bound,
            flagged: v.precision_flagged(),
        })
        .collect();
    serde_json::to_string(&points).map_err(|e| e.to_string())
}

/// `R_{p,n}`, its growth factor and the box lower bound as a JSON array.
pub fn ratio_growth_json(p: f64, n_max: usize, bits: usize) -> Result<String, String> {
    check_dimension(n_max)?;
    let ctx = context(bits)?;
    let rows: Vec<RatioRow> = ratio_sequence(p, n_max, &ctx)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|r| RatioRow {
            n: r.n,
            ratio: r.ratio,
            growth: r.growth,
            lower_bound: r.lower_bound,
            flagged: r.flagged,
        })
        .collect();
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

/// Row-major `resolution x resolution` mask of `B^2_{p,q}` over `[-1, 1]^2`
/// (pixel centres, top row is `y = 1`): 1 inside, 0 outside.
pub fn ball_mask_bytes(p: f64, q: f64, resolution: usize) -> Result<Vec<u8>, String> {
    if resolution == 0 || resolution > MAX_RESOLUTION {
        return Err(format!("resolution must be in 1..={MAX_RESOLUTION}"));
    }
    let params = Params::new(p, q).map_err(|e| e.to_string())?;
    let tester = BallTester::new(2, params);
    let h = 2.0 / resolution as f64;
    let mut mask = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        let y = 1.0 - (i as f64 + 0.5) * h;
        for j in 0..resolution {
            let x = -1.0 + (j as f64 + 0.5) * h;
            let mut scratch = [x, y];
            mask.push(tester.contains_in_place(&mut scratch) as u8);
        }
    }
    Ok(mask)
}

#[wasm_bindgen(js_name = volumeCurve)]
pub fn volume_curve(
    p: f64,
    q: f64,
    n_max: usize,
    bits: usize,
    samples: f64,
) -> Result<String, JsError> {
    volume_curve_json(p, q, n_max, bits, samples as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = ratioGrowth)]
pub fn ratio_growth(p: f64, n_max: usize, bits: usize) -> Result<String, JsError> {
    ratio_growth_json(p, n_max, bits).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = ballMask)]
pub fn ball_mask(p: f64, q: f64, resolution: usize) -> Result<Vec<u8>, JsError> {
    ball_mask_bytes(p, q, resolution).map_err(|e| JsError::new(&e))
}
