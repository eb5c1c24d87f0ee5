use serde::Serialize;
use serde_json::json;

use marangoni::center_manifold::{build_manifold_table, ManifoldOptions};
use marangoni::eigenfunctions::{branches, critical_mode, Residuals};
use marangoni::geometry::{assemble_field, wavenumber};
use marangoni::linear_stability::{critical_marangoni, growth_rate, marginal_curve, marginal_minimum};
use marangoni::products::ProjectionCoefficient;
use marangoni::reduced_dynamics::{integrate, portrait, ReducedSystem};
use marangoni::transition::{classify, logspace, sweep, Classification};
use marangoni::{CriticalResult, EigenPair, Field3D, ManifoldTable, ModeIndex, StabilityParams, TransitionType, Wave};

use crate::args::{Command, Common};
use crate::config::RunConfig;
use crate::output::{num, Sink};
use crate::svg::{line_plot, Series};
use crate::CliError;

pub fn dispatch(cmd: &Command, cfg: &RunConfig, common: &Common, out: &mut Sink) -> Result<(), CliError> {
    match cmd {
        Command::Curve { alpha, svg } => curve(cfg, alpha, *svg, out),
        Command::Critical => critical(cfg, out),
        Command::Modes { branches, points } => modes(cfg, *branches, *points, out),
        Command::Coeffs => coeffs(cfg, out),
        Command::Classify => classify_cmd(cfg, out),
        Command::Simulate { y0, duration, dt, grid } => simulate(cfg, y0.as_deref(), *duration, *dt, *grid, out),
        Command::Pattern { modes, grid } => pattern(cfg, modes, grid, out),
        Command::Sweep { svg } => sweep_cmd(cfg, common, *svg, out),
    }
}

fn options(cfg: &RunConfig) -> ManifoldOptions {
    ManifoldOptions {
        l_max: cfg.l_max,
        quad_order: cfg.quad_order,
        ..ManifoldOptions::default()
    }
}

/// `min:max:count` with 0 < min < max and count ≥ 2.
pub fn parse_alpha_range(s: &str) -> Result<(f64, f64, usize), CliError> {
    let bad = || CliError::Config(format!("alpha range must be min:max:count, got '{s}'"));
    let p: Vec<&str> = s.split(':').collect();
    if p.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = p[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = p[1].trim().parse().map_err(|_| bad())?;
    let n: usize = p[2].trim().parse().map_err(|_| bad())?;
    if !(lo > 0.0) {
        return Err(CliError::Config(format!("alpha must be positive; alpha = {lo} has no marginal state")));
    }
    if !(hi > lo) || n < 2 || !hi.is_finite() {
        return Err(CliError::Config(format!("need 0 < min < max and count >= 2, got '{s}'")));
    }
    Ok((lo, hi, n))
}

fn curve(cfg: &RunConfig, alpha: &str, svg: bool, out: &mut Sink) -> Result<(), CliError> {
    let (lo, hi, n) = parse_alpha_range(alpha)?;
    let mut series = Vec::new();
    for &bi in &cfg.bi {
        let pts = marginal_curve(lo, hi, n, bi)?;
        out.csv(
            &format!("curve_Bi{bi}.csv"),
            "alpha,lambda",
            pts.iter().map(|(a, l)| format!("{a:.8e},{l:.8e}")),
        )?;
        series.push(Series {
            label: format!("Bi = {bi}"),
            points: pts,
        });
    }
    if svg {
        out.text("curve.svg", &line_plot("Marginal stability", "alpha", "lambda", &series, false))?;
    }
    Ok(())
}

fn critical(cfg: &RunConfig, out: &mut Sink) -> Result<(), CliError> {
    let g = cfg.geometry()?;
    let bi = cfg.bi0();
    let c = critical_marangoni(&g, bi)?;
    let (astar, lstar) = marginal_minimum(bi)?;
    warn_near(&c);
    out.json(
        "critical.json",
        &json!({
            "box": cfg.box_spec.to_string(),
            "l1": g.l1(),
            "l2": g.l2(),
            "bi": bi,
            "lambda_c": c.lambda_c,
            "alpha_c": c.alpha_c,
            "critical_set": c.critical_set,
            "near_degenerate": c.near_degenerate,
            "layer_minimum": { "alpha": astar, "lambda": lstar },
        }),
    )
}

fn warn_near(c: &CriticalResult) {
    if !c.near_degenerate.is_empty() {
        let w: Vec<String> = c.near_degenerate.iter().map(|w| w.to_string()).collect();
        eprintln!("warning: waves within 1e-4 of critical: {}", w.join(" "));
    }
}

#[derive(Serialize)]
struct ProfileTable {
    z: Vec<f64>,
    w: Vec<f64>,
    dw: Vec<f64>,
    theta: Vec<f64>,
    w_adjoint: Vec<f64>,
    theta_adjoint: Vec<f64>,
}

#[derive(Serialize)]
struct ModeRecord {
    index: ModeIndex,
    alpha: f64,
    beta: f64,
    closed_form: bool,
    pairing_z: f64,
    residuals: Residuals<f64>,
    profile: ProfileTable,
}

fn record(index: ModeIndex, p: &EigenPair, closed_form: bool, points: usize) -> ModeRecord {
    let z: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    let s: Vec<_> = z.iter().map(|&z| p.profile.sample(z)).collect();
    let a: Vec<_> = z.iter().map(|&z| p.adjoint_profile.sample(z)).collect();
    ModeRecord {
        index,
        alpha: p.alpha,
        beta: p.beta,
        closed_form,
        pairing_z: p.pairing_z,
        residuals: p.residuals,
        profile: ProfileTable {
            w: s.iter().map(|v| v.w).collect(),
            dw: s.iter().map(|v| v.dw).collect(),
            theta: s.iter().map(|v| v.theta).collect(),
            w_adjoint: a.iter().map(|v| v.w).collect(),
            theta_adjoint: a.iter().map(|v| v.theta).collect(),
            z,
        },
    }
}

fn modes(cfg: &RunConfig, count: usize, points: usize, out: &mut Sink) -> Result<(), CliError> {
    if count == 0 || points < 2 {
        return Err(CliError::Config("need at least one branch and two sample points".into()));
    }
    let g = cfg.geometry()?;
    let (pr, bi) = (cfg.pr0(), cfg.bi0());
    let c = critical_marangoni(&g, bi)?;
    warn_near(&c);
    let params = StabilityParams::new(pr, bi, c.lambda_c)?;
    let mut records = Vec::new();
    for m in &c.critical_set {
        let a = wavenumber(m.wave, &g);
        records.push(record(*m, &critical_mode(a, bi, pr)?, true, points));
        for (k, p) in branches(a, &params, count)?.iter().enumerate() {
            let idx = ModeIndex {
                wave: m.wave,
                branch: k as u32 + 1,
            };
            records.push(record(idx, p, false, points));
        }
    }
    out.json(
        "modes.json",
        &json!({
            "box": cfg.box_spec.to_string(),
            "pr": pr,
            "bi": bi,
            "lambda_c": c.lambda_c,
            "alpha_c": c.alpha_c,
            "modes": records,
        }),
    )
}

fn table(cfg: &RunConfig) -> Result<ManifoldTable, CliError> {
    let g = cfg.geometry()?;
    let c = critical_marangoni(&g, cfg.bi0())?;
    warn_near(&c);
    let t = build_manifold_table(&g, &c.critical_set, cfg.pr0(), cfg.bi0(), &options(cfg))?;
    warn_table(&t);
    Ok(t)
}

fn warn_table(t: &ManifoldTable) {
    if !t.converged() {
        eprintln!(
            "warning: stable sums not converged at l_max = {} (largest tail ratio {:.3e})",
            t.l_max,
            t.max_tail()
        );
    }
}

fn coeffs(cfg: &RunConfig, out: &mut Sink) -> Result<(), CliError> {
    let t = table(cfg)?;
    out.csv(
        "projections.csv",
        ProjectionCoefficient::<f64>::CSV_HEADER,
        t.projections.iter().map(|p| p.to_string()),
    )?;
    out.json("manifold.json", &t)
}

struct Supercritical {
    class: Classification<f64>,
    table: ManifoldTable,
    lambda: f64,
    beta: f64,
}

fn supercritical(cfg: &RunConfig) -> Result<Supercritical, CliError> {
    let g = cfg.geometry()?;
    let (pr, bi) = (cfg.pr0(), cfg.bi0());
    let (class, table) = classify(&g, pr, bi, &options(cfg))?;
    warn_table(&table);
    let lambda = table.lambda + cfg.lambda_offset;
    let alpha = wavenumber(table.critical[0].wave, &g);
    let beta = growth_rate(&StabilityParams::new(pr, bi, lambda)?, alpha, 1)?;
    Ok(Supercritical {
        class,
        table,
        lambda,
        beta,
    })
}

fn classify_cmd(cfg: &RunConfig, out: &mut Sink) -> Result<(), CliError> {
    let s = supercritical(cfg)?;
    let kind = s.class.transition_type();
    let detail = match &s.class {
        Classification::Single(r) => json!({ "amplitude": r.amplitude(s.beta) }),
        Classification::Hex(h) => json!({ "steady_states": h.steady_states(s.beta)? }),
    };
    out.json(
        "classify.json",
        &json!({
            "box": cfg.box_spec.to_string(),
            "pr": cfg.pr0(),
            "bi": cfg.bi0(),
            "lambda_c": s.table.lambda,
            "lambda": s.lambda,
            "beta": s.beta,
            "transition_type": kind.to_string(),
            "classification": s.class,
            "supercritical": detail,
            "converged": s.table.converged(),
            "max_tail": s.table.max_tail(),
            "quadrature_change": s.table.quadrature_change,
        }),
    )?;
    println!("{kind}");
    if kind == TransitionType::Inconclusive {
        return Err(CliError::Degenerate("classifier below 1e-10; higher-order terms required".into()));
    }
    Ok(())
}

fn parse_pair(s: &str) -> Result<[f64; 2], CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("expected two numbers a,b, got '{s}'")))?;
    match v.as_slice() {
        [a, b] if a.is_finite() && b.is_finite() => Ok([*a, *b]),
        _ => Err(CliError::Config(format!("expected two numbers a,b, got '{s}'"))),
    }
}

fn simulate(
    cfg: &RunConfig,
    y0: Option<&str>,
    duration: Option<f64>,
    dt: Option<f64>,
    grid: usize,
    out: &mut Sink,
) -> Result<(), CliError> {
    let s = supercritical(cfg)?;
    if s.beta == 0.0 {
        return Err(CliError::Config("lambda offset gives beta = 0; nothing to integrate".into()));
    }
    let rate = s.beta.abs();
    let duration = duration.unwrap_or(20.0 / rate);
    let dt = dt.unwrap_or(0.05 / rate);
    if !(duration > 0.0 && dt > 0.0 && dt <= duration) {
        return Err(CliError::Config(format!("need 0 < dt <= duration, got dt = {dt}, duration = {duration}")));
    }
    let (sys, start) = match &s.class {
        Classification::Single(r) => {
            let scale = (rate / r.c_i.abs()).sqrt();
            (ReducedSystem::single(s.beta, r.c_i), [0.1 * scale, 0.0])
        }
        Classification::Hex(h) => {
            let scale = (rate / h.coefficients.b2.abs()).sqrt();
            (h.system(s.beta)?, [0.3 * scale, 0.2 * scale])
        }
    };
    let y0 = match y0 {
        Some(t) => parse_pair(t)?,
        None => start,
    };
    let traj = integrate(&sys, y0, duration, dt)?;
    if traj.escaped {
        eprintln!("warning: trajectory left the amplitude window and was stopped");
    }
    out.csv(
        "trajectory.csv",
        "t,yI,yJ",
        traj.t.iter().zip(&traj.y).map(|(t, y)| format!("{},{},{}", num(*t), num(y[0]), num(y[1]))),
    )?;
    if let Classification::Hex(_) = s.class {
        if grid < 2 {
            return Err(CliError::Config("basin grid needs at least 2 points per axis".into()));
        }
        let p = portrait(&sys, grid)?;
        out.csv(
            "basin.csv",
            "yI0,yJ0,label",
            p.basin_samples
                .iter()
                .map(|b| format!("{},{},{}", num(b.y0[0]), num(b.y0[1]), b.label)),
        )?;
        out.json("portrait.json", &p)?;
    }
    Ok(())
}

/// `ix,iy:amplitude`.
pub fn parse_mode(s: &str) -> Result<(Wave, f64), CliError> {
    let bad = || CliError::Config(format!("mode must be ix,iy:amplitude, got '{s}'"));
    let (idx, amp) = s.split_once(':').ok_or_else(bad)?;
    let (ix, iy) = idx.split_once(',').ok_or_else(bad)?;
    let ix: u32 = ix.trim().parse().map_err(|_| bad())?;
    let iy: u32 = iy.trim().parse().map_err(|_| bad())?;
    let amp: f64 = amp.trim().parse().map_err(|_| bad())?;
    if !amp.is_finite() {
        return Err(bad());
    }
    if ix == 0 && iy == 0 {
        return Err(CliError::Config("index (0,0) carries no flow; pick ix + iy > 0".into()));
    }
    Ok((Wave::new(ix, iy), amp))
}

fn pattern(cfg: &RunConfig, specs: &[String], grid: &str, out: &mut Sink) -> Result<(), CliError> {
    let g = cfg.geometry()?;
    let (pr, bi) = (cfg.pr0(), cfg.bi0());
    let dims: Vec<usize> = grid
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("grid must be nx,ny,nz, got '{grid}'")))?;
    let [nx, ny, nz] = dims[..] else {
        return Err(CliError::Config(format!("grid must be nx,ny,nz, got '{grid}'")));
    };
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(CliError::Config("grid sizes must be positive".into()));
    }
    let combo: Vec<(Wave, f64)> = if specs.is_empty() {
        // Critical set with weights 2, 1, 1, …: the hexagonal cell on the
        // hex box, the roll on a single-mode box.
        let c = critical_marangoni(&g, bi)?;
        c.critical_set
            .iter()
            .enumerate()
            .map(|(k, m)| (m.wave, if k == 0 && c.critical_set.len() > 1 { 2.0 } else { 1.0 }))
            .collect()
    } else {
        specs.iter().map(|s| parse_mode(s)).collect::<Result<_, _>>()?
    };
    let mut field = Field3D::zero(&g);
    for (w, amp) in &combo {
        let m = critical_mode(wavenumber(*w, &g), bi, pr)?;
        field = field.plus(&assemble_field(&m.profile, *w, &g)?.scaled(*amp))?;
    }
    out.csv(
        "pattern.csv",
        "x,y,z,u,v,w,theta",
        field.grid(nx, ny, nz).into_iter().map(|(p, s)| {
            [p[0], p[1], p[2], s.u, s.v, s.w, s.theta]
                .iter()
                .map(|v| num(*v))
                .collect::<Vec<_>>()
                .join(",")
        }),
    )
}

fn sweep_cmd(cfg: &RunConfig, common: &Common, svg: bool, out: &mut Sink) -> Result<(), CliError> {
    let g = cfg.geometry()?;
    let prs = if common.pr_defaulted() {
        logspace(-1.0, 2.0, 13)
    } else {
        cfg.pr.clone()
    };
    let rows = sweep(&g, &prs, &cfg.bi, &options(cfg));
    let mut errors = Vec::new();
    let mut single = Vec::new();
    let mut hex = Vec::new();
    for (pr, bi, r) in rows {
        match r {
            Ok(Classification::Single(s)) => single.push((pr, bi, s.c_i)),
            Ok(Classification::Hex(h)) => hex.push((pr, bi, h.coefficients, h.transition_type)),
            Err(e) => errors.push(format!("Pr={pr} Bi={bi}: {e}")),
        }
    }
    let mut series: Vec<Series> = Vec::new();
    let mut push = |bi: f64, pr: f64, y: f64| match series.iter_mut().find(|s| s.label == format!("Bi = {bi}")) {
        Some(s) => s.points.push((pr, y)),
        None => series.push(Series {
            label: format!("Bi = {bi}"),
            points: vec![(pr, y)],
        }),
    };
    let ylabel = if !hex.is_empty() {
        out.csv(
            "sweep.csv",
            "Pr,Bi,a1,a2,a3,b1,b2,b3,type",
            hex.iter().map(|(pr, bi, c, t)| {
                format!(
                    "{pr},{bi},{},{},{},{},{},{},{t}",
                    num(c.a1),
                    num(c.a2),
                    num(c.a3),
                    num(c.b1),
                    num(c.b2),
                    num(c.b3)
                )
            }),
        )?;
        hex.iter().for_each(|(pr, bi, c, _)| push(*bi, *pr, c.b2));
        "b2"
    } else {
        out.csv(
            "sweep.csv",
            "Pr,Bi,c_I",
            single.iter().map(|(pr, bi, c)| format!("{pr},{bi},{}", num(*c))),
        )?;
        single.iter().for_each(|(pr, bi, c)| push(*bi, *pr, *c));
        "c_I"
    };
    if !hex.is_empty() && !single.is_empty() {
        errors.push("critical-set shape changed across the grid; single-mode rows omitted".into());
    }
    if svg {
        out.text("sweep.svg", &line_plot(&format!("{ylabel} against Pr"), "Pr", ylabel, &series, true))?;
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(errors.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_ranges() {
        assert_eq!(parse_alpha_range("0.5:6:200").unwrap(), (0.5, 6.0, 200));
        assert!(matches!(parse_alpha_range("0:6:10"), Err(CliError::Config(_))));
        assert!(parse_alpha_range("2:1:10").is_err());
        assert!(parse_alpha_range("1:2:1").is_err());
        assert!(parse_alpha_range("1:2").is_err());
    }

    #[test]
    fn mode_specs() {
        let (w, a) = parse_mode("1,2:-0.5").unwrap();
        assert_eq!((w.ix, w.iy, a), (1, 2, -0.5));
        assert!(parse_mode("0,0:1").is_err());
        assert!(parse_mode("1:1").is_err());
        assert!(parse_mode("1,1:nan").is_err());
    }

    #[test]
    fn pairs() {
        assert_eq!(parse_pair("0.1,-2").unwrap(), [0.1, -2.0]);
        assert!(parse_pair("1").is_err());
        assert!(parse_pair("1,2,3").is_err());
    }
}
