use std::io::Write;

use anyhow::anyhow;
use parsearch_core::allocation::{mean_ratio, ratio_bounds, sweep, CostModel, CostModelKind};

use crate::Failure;

pub struct IaOptions {
    pub b: f64,
    pub w_max: u64,
    pub e: f64,
    pub model: CostModelKind,
    pub spare_reuse: bool,
}

/// Writes the bounds and summary as `#` comment lines, then one CSV row per
/// minimal width.
pub fn iasim(o: &IaOptions, out: &mut dyn Write) -> Result<(), Failure> {
    let usage = |e: anyhow::Error| Failure::Usage(e);
    let (worst, avg) = ratio_bounds(o.b).map_err(|e| usage(e.into()))?;
    if o.w_max == 0 {
        return Err(usage(anyhow!("--wmax must be at least 1")));
    }
    let model = CostModel { kind: o.model, spare_reuse: o.spare_reuse && o.model == CostModelKind::Discrete };
    let rows = sweep(o.b, o.w_max, o.e, model).map_err(|e| usage(e.into()))?;
    let max = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let mean_of_ratios = rows.iter().map(|r| r.ratio).sum::<f64>() / rows.len() as f64;
    let io = |e: std::io::Error| Failure::Usage(e.into());
    writeln!(out, "# bounds b={} worst={:.3} average={:.3}", o.b, worst, avg).map_err(io)?;
    writeln!(
        out,
        "# model={} E={} spare_reuse={} W_plus=1..{}",
        o.model, o.e, model.spare_reuse, o.w_max
    )
    .map_err(io)?;
    writeln!(
        out,
        "# max_ratio={:.4} mean_ratio={:.4} mean_of_ratios={:.4}",
        max,
        mean_ratio(&rows),
        mean_of_ratios
    )
    .map_err(io)?;
    let mut csv = csv::Writer::from_writer(out);
    for r in &rows {
        csv.serialize(r).map_err(|e| usage(e.into()))?;
    }
    csv.flush().map_err(io)?;
    Ok(())
}
