//! Row evaluation and emission shared by `ledger`, `recycle` and `sweep`.

use psmet_core::{
    classical_fisher_two_outcome, conditional_qfi, f_pow_approx, f_pow_exact, joint_qfi,
    postselect_prob, postselect_prob_derivative, recycled_distribution, Branch, CouplingSpec,
    Error, MeterSpec, MirrorSpec, SelectionSpec,
};

use crate::config::{Axis, Format, Resolved};
use crate::fail::CliError;

#[derive(Debug, Clone, Copy)]
pub struct Point {
    pub sel: SelectionSpec,
    pub meter: MeterSpec,
    pub g: CouplingSpec,
    pub mirror: MirrorSpec,
}

/// Recycled-cavity columns; `None` renders as an empty cell.
#[derive(Debug, Clone, Copy)]
pub struct RecycledCells {
    pub p_c: f64,
    pub p_b: f64,
    pub f_c: Option<f64>,
    pub f_b: Option<f64>,
    pub f_pow: Option<f64>,
    pub f_pow_approx: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct Cells {
    pub p_d: f64,
    pub p_r: f64,
    pub q_d: Option<f64>,
    pub q_r: Option<f64>,
    pub pd_qd: f64,
    pub pr_qr: f64,
    pub f_p: Option<f64>,
    pub f_tot: Option<f64>,
    pub q_j: f64,
    pub recycled: Option<RecycledCells>,
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Build the parameter point with one axis value substituted.
pub fn point_at(cfg: &Resolved, axis_override: Option<(Axis, f64)>) -> Result<Point, CliError> {
    let mut n = cfg.n;
    let mut g = cfg.g;
    let mut theta_f = cfg.theta_f;
    let mut r = cfg.r;
    let mut phases = (cfg.phi_i, cfg.phi_f);
    if let Some((axis, x)) = axis_override {
        match axis {
            Axis::ThetaF => theta_f = x,
            Axis::Phi0 => phases = (x, 0.0),
            Axis::G => g = x,
            Axis::R => r = x,
            Axis::N => n = x,
        }
    }
    Ok(Point {
        sel: SelectionSpec::new(cfg.theta_i, phases.0, theta_f, phases.1)?,
        meter: MeterSpec::from_mean_photons(n)?,
        g: CouplingSpec::new(g)?,
        mirror: MirrorSpec::new(r, cfg.cavity_phase)?,
    })
}

/// Evaluate every cell at one point. Degenerate branches and singular limits
/// become empty cells; anything else aborts the run.
pub fn eval_cells(point: &Point, with_recycled: bool, fd_step: f64) -> Result<Cells, CliError> {
    let dist = postselect_prob(&point.sel, &point.meter, point.g)?;
    let branch_qfi = |branch: Branch| -> Result<Option<f64>, CliError> {
        match conditional_qfi(&point.sel, &point.meter, point.g, branch) {
            Ok(q) => Ok(Some(q)),
            Err(Error::DegenerateBranch { .. }) => Ok(None),
            Err(e) => Err(e.into()),
        }
    };
    let q_d = branch_qfi(Branch::Accept)?;
    let q_r = branch_qfi(Branch::Reject)?;
    let pd_qd = q_d.map_or(0.0, |q| dist.p_d * q);
    let pr_qr = q_r.map_or(0.0, |q| dist.p_r * q);
    let f_p = match postselect_prob_derivative(&point.sel, &point.meter, point.g)
        .and_then(|dp| classical_fisher_two_outcome(dist.p_d, dp))
    {
        Ok(f) => Some(f),
        Err(Error::SingularLimit(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let f_tot = f_p.map(|f| pd_qd + pr_qr + f);
    let q_j = joint_qfi(&point.sel, &point.meter);

    let recycled = if with_recycled {
        let rec = recycled_distribution(&point.sel, &point.meter, point.g, &point.mirror)?;
        let split = match f_pow_exact(&point.sel, &point.meter, point.g, &point.mirror, fd_step) {
            Ok(ledger) => Some(ledger),
            Err(Error::DegenerateBranch { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let approx = match f_pow_approx(point.meter.mean_photons(), point.g.g(), point.mirror.r()) {
            Ok(v) => Some(v),
            Err(Error::SingularApproximation(_)) => None,
            Err(e) => return Err(e.into()),
        };
        Some(RecycledCells {
            p_c: rec.p_c,
            p_b: rec.p_b,
            f_c: split.map(|l| l.f_c),
            f_b: split.map(|l| l.f_b),
            f_pow: split.map(|l| l.f_pow),
            f_pow_approx: approx,
        })
    } else {
        None
    };

    Ok(Cells { p_d: dist.p_d, p_r: dist.p_r, q_d, q_r, pd_qd, pr_qr, f_p, f_tot, q_j, recycled })
}

pub fn header(format: Format, with_recycled: bool) -> String {
    let sep = format.separator();
    let mut cols = vec!["axis", "P_d", "P_r", "Q_d", "Q_r", "PdQd", "PrQr", "F_p", "F_tot", "Q_j"];
    if with_recycled {
        cols.extend(["P_c", "P_b", "F_c", "F_b", "F_pow", "F_pow_approx"]);
    }
    cols.join(&sep.to_string())
}

pub fn render_row(axis_value: f64, cells: &Cells, format: Format) -> String {
    let sep = format.separator().to_string();
    let opt = |v: Option<f64>| v.map(fmt_g17).unwrap_or_default();
    let mut fields = vec![
        fmt_g17(axis_value),
        fmt_g17(cells.p_d),
        fmt_g17(cells.p_r),
        opt(cells.q_d),
        opt(cells.q_r),
        fmt_g17(cells.pd_qd),
        fmt_g17(cells.pr_qr),
        opt(cells.f_p),
        opt(cells.f_tot),
        fmt_g17(cells.q_j),
    ];
    if let Some(rec) = &cells.recycled {
        fields.extend([
            fmt_g17(rec.p_c),
            fmt_g17(rec.p_b),
            opt(rec.f_c),
            opt(rec.f_b),
            opt(rec.f_pow),
            opt(rec.f_pow_approx),
        ]);
    }
    fields.join(&sep)
}

/// Does the sweep/ledger metric set ask for the recycled columns?
pub fn metric_includes_recycled(metric: Option<&str>) -> Result<bool, CliError> {
    match metric {
        None => Ok(false),
        Some(s) => {
            let mut recycled = false;
            for part in s.split(',') {
                match part.trim() {
                    "ledger" => {}
                    "recycled" => recycled = true,
                    other => {
                        return Err(CliError::usage(format!(
                            "unknown metric '{other}' (expected ledger and/or recycled)"
                        )))
                    }
                }
            }
            Ok(recycled)
        }
    }
}

/// Send finished output to the file from the config, or stdout.
pub fn write_output(cfg: &Resolved, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `ledger` and `recycle`: a single row at the configured point.
pub fn run_single(cfg: &Resolved, force_recycled: bool) -> Result<(), CliError> {
    let with_recycled = force_recycled || metric_includes_recycled(cfg.metric.as_deref())?;
    let point = point_at(cfg, None)?;
    let cells = eval_cells(&point, with_recycled, cfg.fd_step)?;
    let mut text = header(cfg.format, with_recycled);
    text.push('\n');
    text.push_str(&render_row(cfg.g, &cells, cfg.format));
    text.push('\n');
    write_output(cfg, &text)
}

/// `sweep`: uniformly spaced rows over the configured axis range.
pub fn run_sweep(cfg: &Resolved) -> Result<(), CliError> {
    let (axis, from, to) = cfg.range()?;
    let with_recycled = metric_includes_recycled(cfg.metric.as_deref())?;
    let mut text = header(cfg.format, with_recycled);
    text.push('\n');
    for k in 0..cfg.steps {
        let x = from + (to - from) * k as f64 / (cfg.steps - 1) as f64;
        let point = point_at(cfg, Some((axis, x)))?;
        let cells = eval_cells(&point, with_recycled, cfg.fd_step)?;
        text.push_str(&render_row(x, &cells, cfg.format));
        text.push('\n');
    }
    write_output(cfg, &text)
}
