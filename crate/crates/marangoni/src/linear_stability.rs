//! Marginal stability, critical Marangoni number over the box lattice,
//! growth rates and the transversality of the critical crossing.

use serde::Serialize;

use crate::eigenfunctions::{critical_mode, general_mode, real_spectrum};
use crate::error::{Error, Result};
use crate::geometry::{wavenumber, BoxGeometry, ModeIndex, Wave};
use crate::numerics::{bisect, golden_min};
use crate::scalar::Real;

/// Prandtl, Biot and Marangoni numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityParams<T> {
    pr: T,
    bi: T,
    lambda: T,
}

impl<T: Real> StabilityParams<T> {
    pub fn new(pr: T, bi: T, lambda: T) -> Result<Self> {
        if !(pr > T::zero() && pr.is_finite()) {
            return Err(Error::InvalidInput(format!("Pr must be positive, got {pr}")));
        }
        if !(bi >= T::zero() && bi.is_finite()) {
            return Err(Error::InvalidInput(format!("Bi must be nonnegative, got {bi}")));
        }
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("lambda must be positive, got {lambda}")));
        }
        Ok(StabilityParams { pr, bi, lambda })
    }

    pub fn pr(&self) -> T {
        self.pr
    }

    pub fn bi(&self) -> T {
        self.bi
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: T) -> Result<Self> {
        Self::new(self.pr, self.bi, lambda)
    }
}

const SERIES_BELOW: f64 = 1.0;
const SERIES_TERMS: usize = 16;

/// λ(α) = 8α(α cosh α + Bi sinh α)(α − cosh α sinh α)/(α³ cosh α − sinh³ α).
///
/// Series for α < 1 (both factors vanish to high order at 0), exponentially
/// scaled hyperbolics above.
pub fn marginal_marangoni<T: Real>(alpha: T, bi: T) -> Result<T> {
    if !(alpha > T::zero()) || alpha.is_nan() {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    if !(bi >= T::zero() && bi.is_finite()) {
        return Err(Error::InvalidInput(format!("Bi must be nonnegative, got {bi}")));
    }
    let eight = T::lit(8.0);
    let value = if alpha < T::lit(SERIES_BELOW) {
        let a2 = alpha * alpha;
        // (α − cosh α sinh α)/α³ = −Σ_{n≥1} 2^{2n} α^{2n−2}/(2n+1)!
        let mut num = T::zero();
        let mut term = T::lit(4.0) / T::lit(6.0);
        for n in 1..SERIES_TERMS {
            num -= term;
            let k = T::count(2 * n + 2) * T::count(2 * n + 3);
            term = term * T::lit(4.0) * a2 / k;
        }
        // (α³ cosh α − sinh³ α)/α⁷ = Σ_{m≥3} [1/(2m−2)! − (3^{2m+1}−3)/(4(2m+1)!)] α^{2m−6}
        let mut den = T::zero();
        let mut fact_even = T::count(24); // (2m−2)! at m = 3
        let mut fact_odd = T::count(5040); // (2m+1)! at m = 3
        let mut pow3 = T::count(2187); // 3^{2m+1}
        let mut apow = T::one();
        for m in 3..(3 + SERIES_TERMS) {
            let cm = T::one() / fact_even - (pow3 - T::lit(3.0)) / (T::lit(4.0) * fact_odd);
            den += cm * apow;
            apow *= a2;
            fact_even = fact_even * T::count(2 * m - 1) * T::count(2 * m);
            fact_odd = fact_odd * T::count(2 * m + 2) * T::count(2 * m + 3);
            pow3 *= T::lit(9.0);
        }
        let (sh, ch) = (alpha.sinh(), alpha.cosh());
        eight * alpha * (alpha * ch + bi * sh) * num / (den * a2 * a2)
    } else {
        let e = (-T::lit(2.0) * alpha).exp();
        let ch = (T::one() + e) / T::lit(2.0);
        let sh = (T::one() - e) / T::lit(2.0);
        let a3 = alpha * alpha * alpha;
        eight * alpha * (alpha * ch + bi * sh) * (alpha * e - ch * sh) / (a3 * ch * e - sh * sh * sh)
    };
    if !value.is_finite() {
        return Err(Error::Overflow {
            alpha: alpha.to_f64_lossy(),
            bound: T::max_value().cbrt().to_f64_lossy() / 8.0,
        });
    }
    Ok(value)
}

/// `n` uniform samples of the marginal curve; checks a single interior
/// minimum (or monotone ends).
pub fn marginal_curve<T: Real>(alpha_min: T, alpha_max: T, n: usize, bi: T) -> Result<Vec<(T, T)>> {
    if !(alpha_min > T::zero() && alpha_min < alpha_max) || n < 2 {
        return Err(Error::InvalidInput(format!(
            "need 0 < alpha_min < alpha_max and n >= 2 (got {alpha_min}, {alpha_max}, {n})"
        )));
    }
    let span = alpha_max - alpha_min;
    let pts = (0..n)
        .map(|i| {
            let a = alpha_min + span * T::count(i) / T::count(n - 1);
            marginal_marangoni(a, bi).map(|l| (a, l))
        })
        .collect::<Result<Vec<_>>>()?;
    let imin = (0..n)
        .min_by(|&i, &j| pts[i].1.partial_cmp(&pts[j].1).expect("finite"))
        .expect("nonempty");
    let down = pts[..=imin].windows(2).all(|w| w[1].1 < w[0].1);
    let up = pts[imin..].windows(2).all(|w| w[1].1 > w[0].1);
    if !(down && up) {
        return Err(Error::Numerical("marginal curve is not unimodal".into()));
    }
    Ok(pts)
}

/// Continuous minimum of λ(α): (α*, λ*).
pub fn marginal_minimum<T: Real>(bi: T) -> Result<(T, T)> {
    marginal_marangoni(T::one(), bi)?;
    let f = |a: T| marginal_marangoni(a, bi).unwrap_or(T::infinity());
    Ok(golden_min(f, T::lit(0.1), T::lit(20.0), T::lit(1e-10)))
}

/// Lattice minimum of the marginal Marangoni number on a box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalResult<T> {
    pub lambda_c: T,
    pub alpha_c: T,
    /// Indices within relative 1e-9 of the minimum, branch 1.
    pub critical_set: Vec<ModeIndex>,
    /// Further indices within relative 1e-4 (caller may warn).
    pub near_degenerate: Vec<Wave>,
}

const CRITICAL_TOL: f64 = 1e-9;
const NEAR_TOL: f64 = 1e-4;

/// Minimizes λ(α_I) over all I ≠ (0,0).
///
/// The search is exhaustive: λ(α) is unimodal and unbounded at both ends, so
/// after one pass every index with λ below the best value found has α below
/// the right root of λ(α) = best, and all such indices are enumerated.
pub fn critical_marangoni<T: Real>(geom: &BoxGeometry<T>, bi: T) -> Result<CriticalResult<T>> {
    let (astar, _) = marginal_minimum(bi)?;
    let cap = |a: T, l: T| (a * l / T::PI()).floor().to_u32().unwrap_or(u32::MAX);
    let scan = |amax: T| -> Result<Vec<(Wave, T, T)>> {
        let mut out = Vec::new();
        for ix in 0..=cap(amax, geom.l1()) {
            for iy in 0..=cap(amax, geom.l2()) {
                let w = Wave::new(ix, iy);
                if w.is_uniform() {
                    continue;
                }
                let a = wavenumber(w, geom);
                if a <= amax {
                    out.push((w, a, marginal_marangoni(a, bi)?));
                }
            }
        }
        Ok(out)
    };
    let reach = T::lit(2.0) * astar + T::PI() / geom.l1().min(geom.l2());
    let first = scan(reach)?;
    let best = first
        .iter()
        .map(|c| c.2)
        .fold(T::infinity(), T::min);
    let target = best * (T::one() + T::lit(NEAR_TOL) * T::lit(2.0));
    let mut hi = reach.max(astar * T::lit(2.0));
    while marginal_marangoni(hi, bi)? <= target {
        hi = hi * T::lit(2.0);
    }
    let aub = bisect(
        |a: T| marginal_marangoni(a, bi).unwrap_or(T::infinity()) - target,
        astar,
        hi,
        T::lit(1e-12) * hi,
    ) * (T::one() + T::lit(1e-9));
    let all = scan(aub.max(reach))?;
    let lambda_c = all.iter().map(|c| c.2).fold(T::infinity(), T::min);
    let mut set: Vec<(Wave, T)> = all
        .iter()
        .filter(|c| c.2 <= lambda_c * (T::one() + T::lit(CRITICAL_TOL)))
        .map(|c| (c.0, c.1))
        .collect();
    set.sort_by(|a, b| b.0.ix.cmp(&a.0.ix).then(a.0.iy.cmp(&b.0.iy)));
    let mut near: Vec<Wave> = all
        .iter()
        .filter(|c| {
            c.2 > lambda_c * (T::one() + T::lit(CRITICAL_TOL))
                && c.2 <= lambda_c * (T::one() + T::lit(NEAR_TOL))
        })
        .map(|c| c.0)
        .collect();
    near.sort();
    Ok(CriticalResult {
        lambda_c,
        alpha_c: set[0].1,
        critical_set: set
            .iter()
            .map(|(w, _)| ModeIndex { wave: *w, branch: 1 })
            .collect(),
        near_degenerate: near,
    })
}

/// β on `branch` (1 = largest) at wavenumber `alpha`.
pub fn growth_rate<T: Real>(params: &StabilityParams<T>, alpha: T, branch: usize) -> Result<T> {
    if branch == 0 {
        return Err(Error::InvalidInput("branch index starts at 1".into()));
    }
    let roots = real_spectrum(alpha, params, branch)?;
    let beta = roots[branch - 1];
    general_mode(alpha, beta, params)?;
    Ok(beta)
}

/// dβ/dλ of the first branch at the marginal Marangoni number of `wave`.
///
/// Equals −Pr·Θ(1)·DW*(1)/⟨φ,φ*⟩ with the z-part of the pairing; the box
/// factors cancel. Positive for every α > 0.
pub fn growth_derivative_at_critical<T: Real>(
    geom: &BoxGeometry<T>,
    bi: T,
    pr: T,
    wave: Wave,
) -> Result<T> {
    let alpha = wavenumber(wave, geom);
    let m = critical_mode(alpha, bi, pr)?;
    let s = m.profile.sample(T::one());
    let a = m.adjoint_profile.sample(T::one());
    Ok(-pr * s.theta * a.dw / m.pairing_z)
}

/// (L1L2/4)·(sinh³α − α³cosh α)²/(sinh α (α cosh α + Bi sinh α)), the
/// closed-form value of (L1L2/4)·Θ(1)·DW*(1) for the marginal mode.
pub fn boundary_product<T: Real>(geom: &BoxGeometry<T>, bi: T, wave: Wave) -> T {
    let a = wavenumber(wave, geom);
    let (sh, ch) = (a.sinh(), a.cosh());
    let d = sh * sh * sh - a * a * a * ch;
    geom.area() / T::lit(4.0) * d * d / (sh * (a * ch + bi * sh))
}
