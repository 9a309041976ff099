use lorentz_volume::asymptotics::{ratio_sequence, root_volume_sequence, window_ratio};
use lorentz_volume::entropy::{
    self, build_packing, code_target, construct_code, construct_code_with_budget,
    entropy_bound_curve, max_level, IndexSetFamily, LowerSource,
};
use lorentz_volume::volume::volume_table;
use lorentz_volume::{
    vol_ball, Error, ExtendedReal, McConfig, Params, PrecisionContext, VolumeResult,
};
use serde_json::Value;

use crate::args::{AsymptoticsArgs, EntropyArgs, McArgs, RatioArgs, TableArgs, VolumeArgs};
use crate::record::{num, opt_num, OutputRecord, Row, RowBuilder};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_CONSTRUCTION: i32 = 4;

/// A failed command: exit status, message, and whatever was computed.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    pub partial: Option<Box<OutputRecord>>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ConstructionExhausted { .. } => EXIT_CONSTRUCTION,
            Error::Arithmetic(_) => EXIT_PRECISION,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
            partial: None,
        }
    }
}

/// A finished record and whether any of its values is precision-flagged.
pub struct Done {
    pub record: OutputRecord,
    pub flagged: bool,
}

fn index(x: f64) -> Value {
    if x.is_finite() {
        num(x)
    } else {
        Value::from(ExtendedReal(x).to_string())
    }
}

fn mc_config(a: &McArgs) -> Result<McConfig, Failure> {
    Ok(McConfig::new(a.samples, a.seed, a.confidence)?)
}

fn mc_inputs(rec: &mut OutputRecord, a: &McArgs) {
    rec.input("samples", a.samples);
    rec.input("seed", a.seed);
    rec.input("confidence", num(a.confidence));
}

fn volume_row(v: &VolumeResult) -> Row {
    let mc = v.mc.as_ref();
    RowBuilder::new()
        .set("n", v.n)
        .set("p", index(v.params.p()))
        .set("q", index(v.params.q()))
        .set("method", v.method.name())
        .float("value", v.value)
        .float("error_bound", v.error_bound)
        .float("log_value", v.log_value)
        .set("precision_bits", v.precision_bits)
        .set("flagged", v.precision_flagged())
        .set("hits", mc.map_or(Value::Null, |e| e.hits.into()))
        .set("samples", mc.map_or(Value::Null, |e| e.samples.into()))
        .set("confidence", opt_num(mc.map(|e| e.confidence)))
        .build()
}

fn volume_warnings(v: &VolumeResult, out: &mut Vec<String>) {
    let at = format!("n={}, (p,q)={}", v.n, v.params);
    if let Some(c) = v.conditioning.filter(|c| c.flagged()) {
        out.push(format!(
            "{at}: precision flagged ({:.0} bits of cancellation, {:.0} bits of error growth, {} bits used)",
            c.cancellation_bits, c.amplification_bits, c.mantissa_bits
        ));
    }
    if let Some(w) = v.mc.as_ref().and_then(|e| e.warning()) {
        out.push(format!("{at}: {w}"));
    }
}

pub fn volume(a: &VolumeArgs, ctx: &PrecisionContext) -> Result<Done, Failure> {
    let mc = mc_config(&a.mc)?;
    let mut rec = OutputRecord::new("volume");
    rec.input("n", a.n.clone());
    rec.input("p", Value::Array(a.p.iter().map(|&p| index(p)).collect()));
    rec.input("q", Value::Array(a.q.iter().map(|&q| index(q)).collect()));
    rec.input("method", a.method.name());
    rec.input("bits", ctx.mantissa_bits());
    mc_inputs(&mut rec, &a.mc);
    let mut flagged = false;
    for &n in &a.n {
        for &p in &a.p {
            for &q in &a.q {
                let v = vol_ball(n, Params::new(p, q)?, a.method, ctx, &mc)?;
                flagged |= v.precision_flagged();
                volume_warnings(&v, &mut rec.warnings);
                rec.results.push(volume_row(&v));
            }
        }
    }
    Ok(Done {
        record: rec,
        flagged,
    })
}

pub fn table(a: &TableArgs, ctx: &PrecisionContext) -> Result<Done, Failure> {
    let mc = mc_config(&a.mc)?;
    let mut rec = OutputRecord::new("table");
    rec.input(
        "p_list",
        Value::Array(a.p_list.iter().map(|&p| index(p)).collect()),
    );
    rec.input("n_max", a.n_max);
    rec.input("q", index(a.q));
    rec.input("bits", ctx.mantissa_bits());
    mc_inputs(&mut rec, &a.mc);
    let t = volume_table(&a.p_list, a.q, a.n_max, ctx, &mc)?;
    let mut flagged = false;
    for n in 1..=t.n_max {
        for col in &t.columns {
            let v = &col.values[n - 1];
            flagged |= v.precision_flagged();
            volume_warnings(v, &mut rec.warnings);
            rec.results.push(
                RowBuilder::new()
                    .set("n", n)
                    .set("p", index(col.params.p()))
                    .set("q", index(col.params.q()))
                    .set("method", v.method.name())
                    .float("value", v.value)
                    .float("error_bound", v.error_bound)
                    .set("flagged", v.precision_flagged())
                    .build(),
            );
        }
    }
    let maxima: Vec<Value> = t
        .maxima()
        .iter()
        .map(|m| {
            Value::Object(
                RowBuilder::new()
                    .set("p", index(m.p))
                    .set("argmax", m.argmax)
                    .float("max", m.max)
                    .build(),
            )
        })
        .collect();
    rec.meta("maxima", maxima);
    Ok(Done {
        record: rec,
        flagged,
    })
}

pub fn asymptotics(a: &AsymptoticsArgs, ctx: &PrecisionContext) -> Result<Done, Failure> {
    let mc = mc_config(&a.mc)?;
    let params = Params::new(a.p, a.q)?;
    let mut rec = OutputRecord::new("asymptotics");
    rec.input("p", index(a.p));
    rec.input("q", index(a.q));
    rec.input("n_max", a.n_max);
    rec.input("bits", ctx.mantissa_bits());
    mc_inputs(&mut rec, &a.mc);
    let seq = root_volume_sequence(params, a.n_max, ctx, &mc)?;
    let normalizer = if a.p.is_finite() {
        format!("n^(1/{})", ExtendedReal(a.p))
    } else if a.q == 1.0 {
        "log(n+1)".to_string()
    } else {
        "1".to_string()
    };
    let mut flagged = false;
    for s in &seq {
        flagged |= s.flagged;
        if s.flagged {
            rec.warnings
                .push(format!("n={}: value flagged ({})", s.n, s.method));
        }
        rec.results.push(
            RowBuilder::new()
                .set("n", s.n)
                .float("raw", s.raw)
                .float("normalized", s.normalized)
                .set("method", s.method.name())
                .float("rel_error", s.rel_error)
                .set("flagged", s.flagged)
                .build(),
        );
    }
    rec.meta("normalizer", normalizer);
    rec.meta("window_ratio", num(window_ratio(&seq)));
    Ok(Done {
        record: rec,
        flagged,
    })
}

pub fn ratio(a: &RatioArgs, ctx: &PrecisionContext) -> Result<Done, Failure> {
    let mut rec = OutputRecord::new("ratio");
    rec.input("p", index(a.p));
    rec.input("n_max", a.n_max);
    rec.input("bits", ctx.mantissa_bits());
    let seq = ratio_sequence(a.p, a.n_max, ctx)?;
    let mut flagged = false;
    for r in &seq {
        flagged |= r.flagged;
        if r.flagged {
            rec.warnings.push(format!("n={}: ratio flagged", r.n));
        }
        rec.results.push(
            RowBuilder::new()
                .set("n", r.n)
                .float("ratio", r.ratio)
                .float("growth", r.growth)
                .set("lower_bound", opt_num(r.lower_bound))
                .set("method", "recursion/dirichlet")
                .float("rel_error", r.rel_error)
                .set("flagged", r.flagged)
                .build(),
        );
    }
    Ok(Done {
        record: rec,
        flagged,
    })
}

fn family_row(f: &IndexSetFamily) -> Row {
    let r = f.verify();
    RowBuilder::new()
        .set("n", f.n)
        .set("k", f.k)
        .set("sets", f.sets.len())
        .set("target", f.target)
        .set("max_intersection", r.max_intersection)
        .set("count_ok", r.count_ok)
        .set("sizes_ok", r.sizes_ok)
        .set("intersections_ok", r.intersections_ok)
        .set("certified", f.certified)
        .build()
}

fn family_meta(rec: &mut OutputRecord, f: &IndexSetFamily) {
    rec.meta("index_base", 0);
    rec.meta(
        "family",
        Value::Array(f.sets.iter().map(|s| Value::from(s.clone())).collect()),
    );
}

fn exhausted(mut rec: OutputRecord, e: Error) -> Failure {
    let message = e.to_string();
    if let Error::ConstructionExhausted { partial, .. } = &e {
        rec.results.push(family_row(partial));
        family_meta(&mut rec, partial);
    }
    rec.warnings.push(message.clone());
    let mut f = Failure::from(e);
    f.partial = Some(Box::new(rec));
    f
}

pub fn entropy(a: &EntropyArgs, ctx: &PrecisionContext) -> Result<Done, Failure> {
    let mut rec = OutputRecord::new("entropy");
    rec.input("n", a.n);
    rec.input("seed", a.seed);
    if a.construct {
        if let Some(k) = a.k {
            rec.input("k", k);
            let built = match a.budget {
                None => construct_code(a.n, k, a.seed),
                Some(budget) => {
                    rec.input("budget", budget);
                    code_target(a.n, k)
                        .ok_or(Error::FamilyTooLarge {
                            required: (a.n as f64 / (4.0 * k as f64)).powf(k as f64 / 2.0),
                            limit: entropy::code::MAX_FAMILY,
                        })
                        .and_then(|t| construct_code_with_budget(a.n, k, t, a.seed, budget))
                }
            };
            let f = match built {
                Ok(f) => f,
                Err(e) => return Err(exhausted(rec, e)),
            };
            rec.results.push(family_row(&f));
            family_meta(&mut rec, &f);
            return Ok(Done {
                record: rec,
                flagged: false,
            });
        }
        let Some(mu) = a.mu else {
            return Err(Failure {
                code: EXIT_USAGE,
                message: "--construct needs --k (coding sets) or --mu (packing)".into(),
                partial: None,
            });
        };
        let nu = match a.nu.or_else(|| max_level(a.n)) {
            Some(nu) => nu,
            None => {
                return Err(Failure {
                    code: EXIT_USAGE,
                    message: format!("no packing level fits: 12 * 4^nu <= {} has no nu >= 1", a.n),
                    partial: None,
                })
            }
        };
        rec.input("mu", mu);
        rec.input("nu", nu);
        let f = match build_packing(a.n, mu, nu, a.seed) {
            Ok(f) => f,
            Err(e) => return Err(exhausted(rec, e)),
        };
        rec.results.push(
            RowBuilder::new()
                .set("n", f.n)
                .set("mu", f.mu)
                .set("nu", f.nu)
                .set("vectors", f.len())
                .float("weak_norm_bound", f.weak_norm_bound)
                .float("min_pairwise_l1", f.min_pairwise_l1)
                .set("unit", format!("4^-{}", f.nu))
                .set("weak_norm_units", f.weak_norm_units)
                .set("min_pairwise_l1_units", f.min_pairwise_l1_units)
                .set("weak_norm_ok", f.weak_norm_ok())
                .set("separation_ok", f.separation_ok())
                .set("disjoint", f.disjoint)
                .set("level_sizes_ok", f.level_sizes_ok)
                .build(),
        );
        rec.meta("index_base", 0);
        rec.meta(
            "levels",
            serde_json::to_value(&f.levels).expect("index lists serialise"),
        );
        return Ok(Done {
            record: rec,
            flagged: false,
        });
    }

    let k_max = a.k_max.unwrap_or(4 * a.n as u64);
    rec.input("k_max", k_max);
    rec.input("bits", ctx.mantissa_bits());
    let c = entropy_bound_curve(a.n, k_max, ctx)?;
    for p in &c.points {
        let (mu, nu) = p.packing_levels.unzip();
        rec.results.push(
            RowBuilder::new()
                .set("k", p.k)
                .float("lower", p.lower)
                .float("upper", p.upper)
                .set(
                    "lower_source",
                    match p.lower_source {
                        LowerSource::Volume => "volume",
                        LowerSource::Packing => "packing",
                    },
                )
                .set("mu", mu)
                .set("nu", nu)
                .set("support_size", p.support_size)
                .build(),
        );
    }
    rec.meta("c1", num(c.c1));
    rec.meta("c2", num(c.c2));
    rec.meta("frozen_c1", num(entropy::FROZEN_C1));
    rec.meta("frozen_c2", num(entropy::FROZEN_C2));
    rec.meta("constants_raised", c.constants_raised);
    rec.meta("packing_constant", num(entropy::bounds::PACKING_CONSTANT));
    rec.meta("volume_ratio_root", num(c.volume_ratio_root));
    rec.meta("gamma", c.gamma);
    rec.meta("precision_bits", c.precision_bits);
    if c.constants_raised {
        rec.warnings.push(format!(
            "shape constants raised to C1 = {}, C2 = {} to stay above the lower bound",
            c.c1, c.c2
        ));
    }
    Ok(Done {
        record: rec,
        flagged: false,
    })
}
