//! Metric maximization along one axis: 64-point coarse scan to bracket the
//! maximum, then golden-section refinement to an axis tolerance of 1e-6.

use crate::commands::{eval_cells, fmt_g17, point_at};
use crate::config::Resolved;
use crate::fail::CliError;

const SCAN_POINTS: usize = 64;
const AXIS_TOL: f64 = 1e-6;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PeakMetric {
    FTot,
    PdQd,
    FP,
    FPow,
}

impl PeakMetric {
    fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "F_tot" => Ok(PeakMetric::FTot),
            "PdQd" => Ok(PeakMetric::PdQd),
            "F_p" => Ok(PeakMetric::FP),
            "F_pow" => Ok(PeakMetric::FPow),
            other => Err(CliError::usage(format!(
                "unknown peak metric '{other}' (expected F_tot, PdQd, F_p or F_pow)"
            ))),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            PeakMetric::FTot => "F_tot",
            PeakMetric::PdQd => "PdQd",
            PeakMetric::FP => "F_p",
            PeakMetric::FPow => "F_pow",
        }
    }
}

pub fn run(cfg: &Resolved) -> Result<(), CliError> {
    let (axis, from, to) = cfg.range()?;
    let metric = PeakMetric::parse(cfg.metric.as_deref().unwrap_or("F_tot"))?;
    let needs_recycled = metric == PeakMetric::FPow;

    let eval = |x: f64| -> Result<Option<f64>, CliError> {
        let point = point_at(cfg, Some((axis, x)))?;
        let cells = eval_cells(&point, needs_recycled, cfg.fd_step)?;
        let value = match metric {
            PeakMetric::FTot => cells.f_tot,
            PeakMetric::PdQd => Some(cells.pd_qd),
            PeakMetric::FP => cells.f_p,
            PeakMetric::FPow => cells.recycled.and_then(|r| r.f_pow),
        };
        Ok(value)
    };
    let eval_required = |x: f64| -> Result<f64, CliError> {
        eval(x)?.ok_or_else(|| {
            CliError::numerical(format!("metric {} undefined at {}={x}", metric.name(), axis.name()))
        })
    };

    // Coarse scan.
    let mut best: Option<(usize, f64, f64)> = None;
    let mut xs = Vec::with_capacity(SCAN_POINTS);
    for k in 0..SCAN_POINTS {
        let x = from + (to - from) * k as f64 / (SCAN_POINTS - 1) as f64;
        xs.push(x);
        if let Some(v) = eval(x)? {
            if !v.is_finite() {
                return Err(CliError::numerical(format!(
                    "metric {} is not finite at {}={x}",
                    metric.name(),
                    axis.name()
                )));
            }
            if best.map_or(true, |(_, _, b)| v > b) {
                best = Some((k, x, v));
            }
        }
    }
    let (k_best, x_best, v_best) = best.ok_or_else(|| {
        CliError::usage(format!(
            "no interior maximum: metric {} is undefined across the whole bracket",
            metric.name()
        ))
    })?;

    let spacing = (to - from) / (SCAN_POINTS - 1) as f64;
    let (x_peak, v_peak, width, boundary) = if k_best == 0 || k_best == SCAN_POINTS - 1 {
        // Maximum sits on the bracket edge; report it as such.
        (x_best, v_best, spacing, true)
    } else {
        let (mut a, mut b) = (xs[k_best - 1], xs[k_best + 1]);
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = eval_required(c)?;
        let mut fd = eval_required(d)?;
        while b - a > AXIS_TOL {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = eval_required(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = eval_required(d)?;
            }
        }
        let x = 0.5 * (a + b);
        (x, eval_required(x)?, b - a, false)
    };

    let line = format!(
        "peak axis={} x={} value={} metric={} bracket_width={} boundary={}\n",
        axis.name(),
        fmt_g17(x_peak),
        fmt_g17(v_peak),
        metric.name(),
        fmt_g17(width),
        boundary
    );
    crate::commands::write_output(cfg, &line)
}
