//! Volumes over a grid of dimensions and indices `p`, one column per `p`.

use serde::Serialize;

use super::weak::weak_positive_table;
use super::{vol_ball, weak_full_ball, Method, VolumeResult};
use crate::error::{Error, Result};
use crate::mc::McConfig;
use crate::norm::Params;
use crate::precision::PrecisionContext;

#[derive(Debug, Clone)]
pub struct TableColumn {
    pub params: Params,
    /// Entry `i` is dimension `i + 1`.
    pub values: Vec<VolumeResult>,
}

impl TableColumn {
    /// Dimension with the largest volume (first one on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if v.log_value > self.values[best].log_value {
                best = i;
            }
        }
        best + 1
    }
}

#[derive(Debug, Clone)]
pub struct VolumeTable {
    pub n_max: usize,
    pub columns: Vec<TableColumn>,
}

/// Summary row used by front ends.
#[derive(Debug, Clone, Serialize)]
pub struct ColumnMax {
    pub p: f64,
    pub argmax: usize,
    pub max: f64,
}

impl VolumeTable {
    pub fn maxima(&self) -> Vec<ColumnMax> {
        self.columns
            .iter()
            .map(|c| {
                let a = c.argmax();
                ColumnMax {
                    p: c.params.p(),
                    argmax: a,
                    max: c.values[a - 1].value,
                }
            })
            .collect()
    }
}

/// `vol(B^n_{p,q})` for `n = 1..=n_max` and every `p` in `ps`. Weak balls
/// share one bottom-up recursion per column.
pub fn volume_table(
    ps: &[f64],
    q: f64,
    n_max: usize,
    ctx: &PrecisionContext,
    mc: &McConfig,
) -> Result<VolumeTable> {
    if n_max == 0 {
        return Err(Error::DimensionTooSmall { n: 0, min: 1 });
    }
    let columns = ps
        .iter()
        .map(|&p| {
            let params = Params::new(p, q)?;
            let values = if Method::resolve(params) == Method::Recursion {
                let table = weak_positive_table(n_max, p, ctx)?;
                (1..=n_max)
                    .map(|n| weak_full_ball(&table[n], n, params, Method::Recursion))
                    .collect()
            } else {
                (1..=n_max)
                    .map(|n| vol_ball(n, params, Method::Auto, ctx, mc))
                    .collect::<Result<Vec<_>>>()?
            };
            Ok(TableColumn { params, values })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VolumeTable { n_max, columns })
}
