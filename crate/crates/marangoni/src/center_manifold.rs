//! Quadratic center-manifold approximation and the reduced coefficients it
//! feeds.
//!
//! For critical modes L, M and a stable target (K,k),
//! Φ_LM,(K,k) = −½⟨G(φ_L,φ_M) + G(φ_M,φ_L), φ*_(K,k)⟩ / (β_(K,k)·⟨φ_(K,k), φ*_(K,k)⟩),
//! stored once per unordered {L,M}. The reduced equations are
//! dy_I/dt = β y_I + Σ Q_I[J,K] y_J y_K + Σ C_I[J,L,M] y_J y_L y_M
//! with ordered sums over critical indices.

use rayon::prelude::*;
use serde::Serialize;

use crate::eigenfunctions::{branches, critical_mode, EigenPair};
use crate::error::{Error, Result};
use crate::geometry::{wavenumber, BoxGeometry, ModeIndex, Wave};
use crate::linear_stability::{marginal_marangoni, StabilityParams};
use crate::products::{InteractionSet, ModeData, ProductEngine, ProjectionCoefficient, DEFAULT_QUAD_ORDER};
use crate::scalar::Real;

pub const DEFAULT_L_MAX: usize = 10;
pub const ESCALATED_L_MAX: usize = 20;
pub const RESONANCE_LIMIT: f64 = 1e-10;
pub const TAIL_LIMIT: f64 = 1e-8;
pub const DECAY_RATIO: f64 = 0.9;
pub const QUADRATURE_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifoldOptions {
    pub l_max: usize,
    /// Rebuild with `ESCALATED_L_MAX` branches when a tail check fails.
    pub auto_escalate: bool,
    pub quad_order: usize,
    /// Recompute at twice the quadrature order; keep the finer result if
    /// any reduced coefficient moves by more than `QUADRATURE_LIMIT`.
    pub check_quadrature: bool,
}

impl Default for ManifoldOptions {
    fn default() -> Self {
        ManifoldOptions {
            l_max: DEFAULT_L_MAX,
            auto_escalate: true,
            quad_order: DEFAULT_QUAD_ORDER,
            check_quadrature: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ManifoldCoefficient<T> {
    pub i: ModeIndex,
    pub j: ModeIndex,
    pub k: ModeIndex,
    pub beta_k: T,
    pub value: T,
    /// Tail estimate of the sum this entry belongs to.
    pub tail: T,
}

/// Convergence of one branch sum Σ_k over a fixed source pair and target wave.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumDiagnostic<T> {
    pub i: ModeIndex,
    pub j: ModeIndex,
    pub wave: Wave,
    pub terms: usize,
    /// max over reduced coefficients of |last term| / |partial sum|.
    pub tail: T,
    pub converged: bool,
    /// |Φ| ratio of successive branches stays below 0.9 beyond the third.
    pub geometric: bool,
}

/// Reduced quadratic and cubic coefficients, indexed by position in the
/// critical list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reduced<T> {
    pub n: usize,
    /// Q[i][j][k]
    pub quadratic: Vec<T>,
    /// C[i][j][l][m]
    pub cubic: Vec<T>,
}

impl<T: Real> Reduced<T> {
    fn zeros(n: usize) -> Self {
        Reduced {
            n,
            quadratic: vec![T::zero(); n * n * n],
            cubic: vec![T::zero(); n * n * n * n],
        }
    }

    pub fn q(&self, i: usize, j: usize, k: usize) -> T {
        self.quadratic[(i * self.n + j) * self.n + k]
    }

    pub fn c(&self, i: usize, j: usize, l: usize, m: usize) -> T {
        self.cubic[((i * self.n + j) * self.n + l) * self.n + m]
    }

    fn all(&self) -> impl Iterator<Item = T> + '_ {
        self.quadratic.iter().chain(self.cubic.iter()).copied()
    }

    /// max relative change against `other`, scaled by the largest entry.
    pub fn max_relative_change(&self, other: &Self) -> T {
        let scale = self.all().map(|v| v.abs()).fold(T::zero(), T::max);
        if scale == T::zero() {
            return T::zero();
        }
        self.all()
            .zip(other.all())
            .map(|(a, b)| (a - b).abs() / scale)
            .fold(T::zero(), T::max)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifoldTable<T> {
    pub critical: Vec<ModeIndex>,
    pub lambda: T,
    pub pr: T,
    pub bi: T,
    pub l_max: usize,
    pub quad_order: usize,
    pub entries: Vec<ManifoldCoefficient<T>>,
    pub diagnostics: Vec<SumDiagnostic<T>>,
    pub reduced: Reduced<T>,
    /// Largest β among the stable targets (negative).
    pub beta_margin: T,
    /// Relative change of the reduced coefficients under quadrature doubling.
    pub quadrature_change: Option<T>,
    /// ⟨φ_I, φ_I*⟩ for each critical mode.
    pub pairings: Vec<T>,
    /// G(a, b, t*)/⟨t, t*⟩ for ordered critical sources and every critical
    /// or stable target that they reach.
    pub projections: Vec<ProjectionCoefficient<T>>,
}

impl<T: Real> ManifoldTable<T> {
    pub fn converged(&self) -> bool {
        self.diagnostics.iter().all(|d| d.converged)
    }

    pub fn max_tail(&self) -> T {
        self.diagnostics.iter().map(|d| d.tail).fold(T::zero(), T::max)
    }
}

/// Φ for one source pair and target, with the resonance guard.
pub fn manifold_coefficient<T: Real>(
    engine: &ProductEngine<T>,
    l: &ModeData<T>,
    m: &ModeData<T>,
    k: &ModeData<T>,
) -> Result<T> {
    parts(engine, l, m, k).map(|p| p.phi)
}

struct Parts<T> {
    phi: T,
    /// G(l, m, k*)/⟨k, k*⟩ and G(m, l, k*)/⟨k, k*⟩.
    lm: T,
    ml: T,
}

fn parts<T: Real>(engine: &ProductEngine<T>, l: &ModeData<T>, m: &ModeData<T>, k: &ModeData<T>) -> Result<Parts<T>> {
    if k.beta.abs() < T::lit(RESONANCE_LIMIT) {
        return Err(Error::Resonant(k.beta.to_f64_lossy()));
    }
    let (glm, gml) = (engine.trilinear(l, m, k), engine.trilinear(m, l, k));
    if glm == T::zero() && gml == T::zero() {
        let z = T::zero();
        return Ok(Parts { phi: z, lm: z, ml: z });
    }
    let p = engine.inner_product(k, k);
    if p == T::zero() || !p.is_finite() {
        return Err(Error::ZeroPairing(p.to_f64_lossy()));
    }
    Ok(Parts {
        phi: -(glm + gml) / (T::lit(2.0) * k.beta * p),
        lm: glm / p,
        ml: gml / p,
    })
}

/// Critical modes from the closed-form marginal solution; all must share a
/// wavenumber.
pub fn critical_pairs<T: Real>(
    geom: &BoxGeometry<T>,
    critical: &[ModeIndex],
    pr: T,
    bi: T,
) -> Result<Vec<(ModeIndex, EigenPair<T>)>> {
    if critical.is_empty() {
        return Err(Error::Shape("empty critical set".into()));
    }
    let a0 = wavenumber(critical[0].wave, geom);
    critical
        .iter()
        .map(|&m| {
            let a = wavenumber(m.wave, geom);
            if (a - a0).abs() > T::lit(1e-12) * a0 {
                return Err(Error::Shape(format!(
                    "critical wavenumbers differ: {} vs {}",
                    a, a0
                )));
            }
            if m.branch != 1 {
                return Err(Error::Shape(format!("critical mode {} is not on branch 1", m.wave)));
            }
            Ok((m, critical_mode(a, bi, pr)?))
        })
        .collect()
}

/// Table at λ = λ(α_c) for the given critical set.
pub fn build_manifold_table<T: Real>(
    geom: &BoxGeometry<T>,
    critical: &[ModeIndex],
    pr: T,
    bi: T,
    opts: &ManifoldOptions,
) -> Result<ManifoldTable<T>> {
    let modes = critical_pairs(geom, critical, pr, bi)?;
    build_with_modes(geom, &modes, pr, bi, opts)
}

/// As [`build_manifold_table`] with caller-supplied critical eigenpairs
/// (e.g. rescaled ones).
pub fn build_with_modes<T: Real>(
    geom: &BoxGeometry<T>,
    critical: &[(ModeIndex, EigenPair<T>)],
    pr: T,
    bi: T,
    opts: &ManifoldOptions,
) -> Result<ManifoldTable<T>> {
    if opts.l_max == 0 {
        return Err(Error::InvalidInput("l_max must be at least 1".into()));
    }
    let table = build_once(geom, critical, pr, bi, opts.l_max, opts)?;
    if opts.auto_escalate && !table.converged() && opts.l_max < ESCALATED_L_MAX {
        return build_once(geom, critical, pr, bi, ESCALATED_L_MAX, opts);
    }
    Ok(table)
}

struct Target<T> {
    index: ModeIndex,
    pair: EigenPair<T>,
}

fn build_once<T: Real>(
    geom: &BoxGeometry<T>,
    critical: &[(ModeIndex, EigenPair<T>)],
    pr: T,
    bi: T,
    l_max: usize,
    opts: &ManifoldOptions,
) -> Result<ManifoldTable<T>> {
    let alpha_c = critical[0].1.alpha;
    let lambda = marginal_marangoni(alpha_c, bi)?;
    let params = StabilityParams::new(pr, bi, lambda)?;
    let crit_waves: Vec<Wave> = critical.iter().map(|c| c.0.wave).collect();
    let set = InteractionSet::new(&crit_waves);

    // Stable targets per wave, computed once.
    let waves: Vec<Wave> = set.members.iter().copied().collect();
    let per_wave: Vec<Vec<Target<T>>> = waves
        .par_iter()
        .map(|&w| stable_targets(geom, w, &crit_waves, &params, l_max))
        .collect::<Result<Vec<_>>>()?;
    let targets: Vec<&Target<T>> = per_wave.iter().flatten().collect();
    let beta_margin = targets
        .iter()
        .map(|t| t.pair.beta)
        .fold(T::neg_infinity(), T::max);
    if let Some(t) = targets.iter().find(|t| t.pair.beta.abs() < T::lit(RESONANCE_LIMIT)) {
        return Err(Error::Resonant(t.pair.beta.to_f64_lossy()));
    }

    let assemble = |order: usize| -> Result<Assembly<T>> {
        let engine = ProductEngine::new(*geom, order)?;
        let crit: Vec<ModeData<T>> = critical.iter().map(|(i, p)| engine.mode(*i, p)).collect();
        let data: Vec<ModeData<T>> = targets
            .par_iter()
            .map(|t| engine.mode(t.index, &t.pair))
            .collect();
        assemble(&engine, &crit, &data)
    };
    let coarse = assemble(opts.quad_order)?;
    let (chosen, order, change) = if opts.check_quadrature {
        let fine = assemble(2 * opts.quad_order)?;
        let change = coarse.reduced.max_relative_change(&fine.reduced);
        if change > T::lit(QUADRATURE_LIMIT) {
            (fine, 2 * opts.quad_order, Some(change))
        } else {
            (coarse, opts.quad_order, Some(change))
        }
    } else {
        (coarse, opts.quad_order, None)
    };
    Ok(ManifoldTable {
        critical: critical.iter().map(|c| c.0).collect(),
        lambda,
        pr,
        bi,
        l_max,
        quad_order: order,
        entries: chosen.entries,
        diagnostics: chosen.diagnostics,
        reduced: chosen.reduced,
        beta_margin,
        quadrature_change: change,
        pairings: chosen.pairings,
        projections: chosen.projections,
    })
}

/// Branches 1..=l_max of `wave`, minus the critical branch.
fn stable_targets<T: Real>(
    geom: &BoxGeometry<T>,
    wave: Wave,
    critical: &[Wave],
    params: &StabilityParams<T>,
    l_max: usize,
) -> Result<Vec<Target<T>>> {
    let alpha = wavenumber(wave, geom);
    let skip_first = critical.contains(&wave);
    let pairs = branches(alpha, params, l_max)?;
    Ok(pairs
        .into_iter()
        .enumerate()
        .filter(|(k, _)| !(skip_first && *k == 0))
        .map(|(k, pair)| Target {
            index: ModeIndex {
                wave,
                branch: k as u32 + 1,
            },
            pair,
        })
        .collect())
}

struct Assembly<T> {
    entries: Vec<ManifoldCoefficient<T>>,
    diagnostics: Vec<SumDiagnostic<T>>,
    reduced: Reduced<T>,
    pairings: Vec<T>,
    projections: Vec<ProjectionCoefficient<T>>,
}

fn assemble<T: Real>(
    engine: &ProductEngine<T>,
    crit: &[ModeData<T>],
    targets: &[ModeData<T>],
) -> Result<Assembly<T>> {
    let n = crit.len();
    let pairings: Vec<T> = crit.iter().map(|c| engine.inner_product(c, c)).collect();
    for p in &pairings {
        if *p == T::zero() || !p.is_finite() {
            return Err(Error::ZeroPairing(p.to_f64_lossy()));
        }
    }
    let mut red = Reduced::zeros(n);
    let mut projections = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let q = engine.trilinear(&crit[j], &crit[k], &crit[i]) / pairings[i];
                red.quadratic[(i * n + j) * n + k] = q;
                projections.push(ProjectionCoefficient {
                    source_a: crit[j].index,
                    source_b: crit[k].index,
                    target: crit[i].index,
                    value: q,
                });
            }
        }
    }

    // H_{J,(K,k),I} = ⟨G(φ_J,φ_K) + G(φ_K,φ_J), φ_I*⟩/⟨φ_I,φ_I*⟩, per target.
    let couplings: Vec<Vec<T>> = targets
        .par_iter()
        .map(|t| {
            let mut h = vec![T::zero(); n * n];
            for (i, ci) in crit.iter().enumerate() {
                for (j, cj) in crit.iter().enumerate() {
                    let g = engine.trilinear(cj, t, ci) + engine.trilinear(t, cj, ci);
                    h[j * n + i] = if g == T::zero() { g } else { g / pairings[i] };
                }
            }
            h
        })
        .collect();

    let mut entries = Vec::new();
    let mut diagnostics = Vec::new();
    for l in 0..n {
        for m in l..n {
            let reach = InteractionSet::pair(crit[l].index.wave, crit[m].index.wave);
            let found: Vec<(usize, Parts<T>)> = targets
                .par_iter()
                .enumerate()
                .filter(|(_, t)| reach.contains(&t.index.wave))
                .map(|(ti, t)| parts(engine, &crit[l], &crit[m], t).map(|v| (ti, v)))
                .collect::<Result<Vec<_>>>()?;
            for (ti, p) in &found {
                let sources = if l == m { vec![(l, m, p.lm)] } else { vec![(l, m, p.lm), (m, l, p.ml)] };
                for (a, b, value) in sources {
                    projections.push(ProjectionCoefficient {
                        source_a: crit[a].index,
                        source_b: crit[b].index,
                        target: targets[*ti].index,
                        value,
                    });
                }
            }
            let phis: Vec<(usize, T)> = found.iter().map(|(ti, p)| (*ti, p.phi)).collect();
            let mut by_wave: Vec<Wave> = phis.iter().map(|(ti, _)| targets[*ti].index.wave).collect();
            by_wave.dedup();
            for wave in by_wave {
                let series: Vec<(usize, T)> = phis
                    .iter()
                    .copied()
                    .filter(|(ti, _)| targets[*ti].index.wave == wave)
                    .collect();
                let mut tail = T::zero();
                for i in 0..n {
                    for j in 0..n {
                        let terms: Vec<T> = series
                            .iter()
                            .map(|(ti, phi)| couplings[*ti][j * n + i] * *phi)
                            .collect();
                        let sum: T = terms.iter().copied().sum();
                        let last = terms.last().copied().unwrap_or(T::zero()).abs();
                        if last > T::zero() {
                            let t = if sum == T::zero() { T::infinity() } else { last / sum.abs() };
                            tail = tail.max(t);
                        }
                    }
                }
                let mags: Vec<T> = series.iter().map(|(_, v)| v.abs()).filter(|v| *v > T::zero()).collect();
                let geometric = mags
                    .windows(2)
                    .skip(2)
                    .all(|w| w[1] < T::lit(DECAY_RATIO) * w[0]);
                diagnostics.push(SumDiagnostic {
                    i: crit[l].index,
                    j: crit[m].index,
                    wave,
                    terms: series.len(),
                    tail,
                    converged: tail < T::lit(TAIL_LIMIT),
                    geometric,
                });
                for (ti, value) in &series {
                    entries.push(ManifoldCoefficient {
                        i: crit[l].index,
                        j: crit[m].index,
                        k: targets[*ti].index,
                        beta_k: targets[*ti].beta,
                        value: *value,
                        tail,
                    });
                }
            }
            // C_I[J,L,M] = Σ_(K,k) H_{J,(K,k),I} Φ_LM,(K,k); symmetric in (L,M).
            for (ti, phi) in &phis {
                for i in 0..n {
                    for j in 0..n {
                        let v = couplings[*ti][j * n + i] * *phi;
                        red.cubic[((i * n + j) * n + l) * n + m] += v;
                        if l != m {
                            red.cubic[((i * n + j) * n + m) * n + l] += v;
                        }
                    }
                }
            }
        }
    }
    Ok(Assembly {
        entries,
        diagnostics,
        reduced: red,
        pairings,
        projections,
    })
}
