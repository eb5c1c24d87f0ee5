//! Transition type at the critical Marangoni number from the reduced
//! coefficients.

use rayon::prelude::*;
use serde::Serialize;

use crate::center_manifold::{build_manifold_table, build_with_modes, critical_pairs, ManifoldOptions, ManifoldTable};
use crate::error::{Error, Result};
use crate::geometry::{wavenumber, BoxGeometry, ModeIndex};
use crate::linear_stability::{critical_marangoni, growth_rate, StabilityParams};
use crate::reduced_dynamics::{leading_states, Eigenvalue, HexCoefficients, ReducedSystem};
use crate::scalar::Real;

/// Below this magnitude a classifier is treated as zero.
pub const DEGENERATE_LIMIT: f64 = 1e-10;
pub const CROSS_CHECK_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TransitionType {
    /// continuous
    TypeI,
    /// jump
    TypeII,
    /// mixed
    TypeIII,
    /// classifier below threshold; higher-order terms needed
    Inconclusive,
}

impl std::fmt::Display for TransitionType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TransitionType::TypeI => "Type-I",
            TransitionType::TypeII => "Type-II",
            TransitionType::TypeIII => "Type-III",
            TransitionType::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleModeReport<T> {
    pub index: ModeIndex,
    pub lambda_c: T,
    pub pr: T,
    pub bi: T,
    pub c_i: T,
    /// Q_I[I,I]; vanishes by the selection rule.
    pub quadratic: T,
    pub transition_type: TransitionType,
    pub l_max: usize,
    pub max_tail: T,
}

impl<T: Real> SingleModeReport<T> {
    /// √(−β/c_I) for a Type-I transition past critical, else None.
    pub fn amplitude(&self, beta: T) -> Option<T> {
        let r = -beta / self.c_i;
        (self.transition_type == TransitionType::TypeI && beta > T::zero() && r > T::zero()).then(|| r.sqrt())
    }
}

/// c_I from a single-mode table; negative means a continuous transition.
pub fn single_mode_classifier<T: Real>(table: &ManifoldTable<T>) -> Result<SingleModeReport<T>> {
    if table.critical.len() != 1 {
        return Err(Error::Shape(format!(
            "single-mode classifier needs one critical mode, got {}; use the hex classifier",
            table.critical.len()
        )));
    }
    let c = table.reduced.c(0, 0, 0, 0);
    let transition_type = if c.abs() < T::lit(DEGENERATE_LIMIT) {
        TransitionType::Inconclusive
    } else if c < T::zero() {
        TransitionType::TypeI
    } else {
        TransitionType::TypeII
    };
    Ok(SingleModeReport {
        index: table.critical[0],
        lambda_c: table.lambda,
        pr: table.pr,
        bi: table.bi,
        c_i: c,
        quadratic: table.reduced.q(0, 0, 0),
        transition_type,
        l_max: table.l_max,
        max_tail: table.max_tail(),
    })
}

/// Bifurcated amplitude at Marangoni number `lambda` from the first-branch
/// growth rate.
pub fn bifurcated_amplitude<T: Real>(geom: &BoxGeometry<T>, report: &SingleModeReport<T>, lambda: T) -> Result<Option<T>> {
    let params = StabilityParams::new(report.pr, report.bi, lambda)?;
    let beta = growth_rate(&params, wavenumber(report.index.wave, geom), 1)?;
    Ok(report.amplitude(beta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    /// a₁ > 0
    Standard,
    /// a₁ < 0: mirror image about the y_I axis
    Reflected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateReport<T> {
    pub label: String,
    pub leading: [T; 2],
    pub refined: Option<[T; 2]>,
    pub eigenvalues_leading: [T; 2],
    pub eigenvalues_refined: Option<Vec<Eigenvalue<T>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HexReport<T> {
    pub i: ModeIndex,
    pub j: ModeIndex,
    pub lambda_c: T,
    pub pr: T,
    pub bi: T,
    pub coefficients: HexCoefficients<T>,
    pub identity_residuals: [T; 3],
    pub identity_limit: T,
    pub transition_type: TransitionType,
    pub orientation: Orientation,
    pub l_max: usize,
    pub max_tail: T,
}

impl<T: Real> HexReport<T> {
    pub fn system(&self, beta: T) -> Result<ReducedSystem<T>> {
        ReducedSystem::hex(beta, self.coefficients)
    }

    /// Leading-order ±R, H₁, H₂ with their predicted spectra, and the
    /// fixed points of the truncated system nearest to them.
    pub fn steady_states(&self, beta: T) -> Result<Vec<StateReport<T>>> {
        let h = &self.coefficients;
        let sys = self.system(beta)?;
        let two = T::lit(2.0);
        Ok(leading_states(h, beta)
            .into_iter()
            .map(|(label, y)| {
                let ev = if label.ends_with('R') {
                    let sgn = if label.starts_with('+') { T::one() } else { -T::one() };
                    [
                        sgn * h.a1 * (-beta / h.b2).sqrt() + beta * (T::one() - h.a3 / h.b2),
                        -two * beta,
                    ]
                } else {
                    [two * beta, -beta]
                };
                let refined = refine(&sys, y);
                StateReport {
                    label,
                    leading: y,
                    refined,
                    eigenvalues_leading: ev,
                    eigenvalues_refined: refined.map(|r| sys.eigenvalues(r)),
                }
            })
            .collect())
    }
}

fn refine<T: Real>(sys: &ReducedSystem<T>, mut y: [T; 2]) -> Option<[T; 2]> {
    for _ in 0..100 {
        let f = sys.rhs(y);
        let m = sys.jacobian(y);
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det == T::zero() {
            return None;
        }
        let dx = (f[0] * m[1][1] - f[1] * m[0][1]) / det;
        let dy = (m[0][0] * f[1] - m[1][0] * f[0]) / det;
        y = [y[0] - dx, y[1] - dy];
        if (dx * dx + dy * dy).sqrt() <= T::lit(4.0) * T::epsilon() * (y[0].abs() + y[1].abs()).max(T::min_positive_value()) {
            break;
        }
    }
    let f = sys.rhs(y);
    ((f[0] * f[0] + f[1] * f[1]).sqrt() < T::lit(1e-10)).then_some(y)
}

/// a₁..b₃ from a two-mode table, identities checked, type from sign of b₂.
pub fn hex_classifier<T: Real>(geom: &BoxGeometry<T>, table: &ManifoldTable<T>) -> Result<HexReport<T>> {
    if table.critical.len() != 2 {
        return Err(Error::Shape(format!(
            "hex classifier needs two critical modes, got {}",
            table.critical.len()
        )));
    }
    let (i, j) = (table.critical[0], table.critical[1]);
    let ok = i.wave.ix != 0 && j.wave.ix == 0 && j.wave.iy == 2 * i.wave.iy && geom.hex_compatible(i.wave.ix, i.wave.iy);
    if !ok {
        return Err(Error::Shape(format!(
            "critical pair {} {} is not a hexagonal pair on this box",
            i.wave, j.wave
        )));
    }
    let h = HexCoefficients::from_reduced(&table.reduced)?;
    h.check_identities()?;
    let degenerate = T::lit(DEGENERATE_LIMIT);
    let transition_type = if h.b2.abs() < degenerate || h.a1.abs() < degenerate {
        TransitionType::Inconclusive
    } else if h.b2 < T::zero() {
        TransitionType::TypeIII
    } else {
        TransitionType::TypeII
    };
    Ok(HexReport {
        i,
        j,
        lambda_c: table.lambda,
        pr: table.pr,
        bi: table.bi,
        coefficients: h,
        identity_residuals: h.identity_residuals(),
        identity_limit: T::lit(crate::reduced_dynamics::IDENTITY_LIMIT) * h.scale(),
        transition_type,
        orientation: if h.a1 < T::zero() { Orientation::Reflected } else { Orientation::Standard },
        l_max: table.l_max,
        max_tail: table.max_tail(),
    })
}

/// c_J from the single-mode machinery applied to the second critical mode,
/// with the same options; returns (c_J, |b₂ − c_J|).
pub fn cross_check_b2<T: Real>(
    geom: &BoxGeometry<T>,
    report: &HexReport<T>,
    opts: &ManifoldOptions,
) -> Result<(T, T)> {
    let mut o = opts.clone();
    o.auto_escalate = false;
    o.l_max = report.l_max;
    let t = build_manifold_table(geom, &[report.j], report.pr, report.bi, &o)?;
    let c = single_mode_classifier(&t)?.c_i;
    Ok((c, (c - report.coefficients.b2).abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Classification<T> {
    Single(SingleModeReport<T>),
    Hex(HexReport<T>),
}

impl<T: Real> Classification<T> {
    pub fn transition_type(&self) -> TransitionType {
        match self {
            Classification::Single(r) => r.transition_type,
            Classification::Hex(r) => r.transition_type,
        }
    }
}

/// Critical set, table and classifier in one go.
pub fn classify<T: Real>(geom: &BoxGeometry<T>, pr: T, bi: T, opts: &ManifoldOptions) -> Result<(Classification<T>, ManifoldTable<T>)> {
    let crit = critical_marangoni(geom, bi)?;
    let table = build_manifold_table(geom, &crit.critical_set, pr, bi, opts)?;
    let c = match crit.critical_set.len() {
        1 => Classification::Single(single_mode_classifier(&table)?),
        2 => Classification::Hex(hex_classifier(geom, &table)?),
        n => {
            return Err(Error::Shape(format!(
                "critical set of size {n} is outside the single-mode and hexagonal cases"
            )))
        }
    };
    Ok((c, table))
}

/// Classification with every critical eigenfunction scaled by `s`.
pub fn classify_rescaled<T: Real>(
    geom: &BoxGeometry<T>,
    pr: T,
    bi: T,
    s: T,
    opts: &ManifoldOptions,
) -> Result<Classification<T>> {
    let crit = critical_marangoni(geom, bi)?;
    let modes: Vec<_> = critical_pairs(geom, &crit.critical_set, pr, bi)?
        .into_iter()
        .map(|(i, p)| (i, p.rescaled(s)))
        .collect();
    let table = build_with_modes(geom, &modes, pr, bi, opts)?;
    Ok(match modes.len() {
        1 => Classification::Single(single_mode_classifier(&table)?),
        _ => Classification::Hex(hex_classifier(geom, &table)?),
    })
}

/// Parallel classification over a (Pr, Bi) grid, in input order.
pub fn sweep<T: Real>(
    geom: &BoxGeometry<T>,
    prs: &[T],
    bis: &[T],
    opts: &ManifoldOptions,
) -> Vec<(T, T, Result<Classification<T>>)> {
    let grid: Vec<(T, T)> = prs.iter().flat_map(|&p| bis.iter().map(move |&b| (p, b))).collect();
    grid.par_iter()
        .map(|&(p, b)| (p, b, classify(geom, p, b, opts).map(|c| c.0)))
        .collect()
}

/// `n` points log-spaced on [10^lo, 10^hi].
pub fn logspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let ten = T::lit(10.0);
    if n == 1 {
        return vec![ten.powf(lo)];
    }
    (0..n)
        .map(|k| ten.powf(lo + (hi - lo) * T::count(k) / T::count(n - 1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logspace_endpoints() {
        let v = logspace(-1.0f64, 2.0, 13);
        assert_eq!(v.len(), 13);
        assert!((v[0] - 0.1).abs() < 1e-15 && (v[12] - 100.0).abs() < 1e-12);
        assert!((v[4] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn amplitude_only_for_type_one() {
        let mut r = SingleModeReport {
            index: ModeIndex::new(1, 0, 1).unwrap(),
            lambda_c: 79.8f64,
            pr: 1.0,
            bi: 0.0,
            c_i: -0.5,
            quadratic: 0.0,
            transition_type: TransitionType::TypeI,
            l_max: 10,
            max_tail: 0.0,
        };
        assert!((r.amplitude(0.02).unwrap() - 0.2).abs() < 1e-15);
        assert!(r.amplitude(-0.02).is_none());
        r.transition_type = TransitionType::TypeII;
        r.c_i = 0.5;
        assert!(r.amplitude(0.02).is_none());
    }
}
