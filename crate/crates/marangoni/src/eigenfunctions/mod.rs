//! Eigenmodes and adjoint eigenmodes of the linearized problem.
//!
//! Three cases: horizontally uniform modes (`α = 0`), the marginal mode
//! (`β = 0`, closed form) and general modes on any real branch. General modes
//! are built from divided differences of entire kernels (see
//! [`crate::kernel`]), which covers the Pr = 1 and small-β corners where the
//! closed forms in [`appendix`] degenerate.

pub mod appendix;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{divided, point};
use crate::linear_stability::{marginal_marangoni, StabilityParams};
use crate::numerics::{bisect, chebyshev_points, null_vector as null_space, Quadrature};
use crate::profile::{HypPoly, KernelProfile, ProfileSample, VerticalProfile, SEAM};
use crate::scalar::Real;

const RESIDUAL_POINTS: usize = 200;
const PAIRING_ORDER: usize = 64;
const ODE_LIMIT: f64 = 1e-8;
const BC_LIMIT: f64 = 1e-10;
const SECULAR_LIMIT: f64 = 1e-9;
const SCAN_STEP: f64 = 0.005;
const BETA_MAX_START: f64 = 1e3;
const BETA_MAX_LIMIT: f64 = 1e7;
/// Largest last-pivot ratio accepted as a rank drop in the seam system.
const TWO_SIDED_RANK: f64 = 1e-6;

/// Sup-norm residuals of a constructed eigenpair, each relative to the
/// magnitude of the terms involved.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Residuals<T> {
    pub ode: T,
    pub ode_adjoint: T,
    pub boundary: T,
    pub boundary_adjoint: T,
    /// |λ + D²W(1)/(α²Θ(1))| / λ.
    pub secular: T,
}

/// Constants that pin down each case.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeConstants<T> {
    Uniform {
        rho: T,
    },
    Marginal {
        theta1: T,
        c: T,
        theta1_star: T,
        w_star: [T; 3],
    },
    General {
        eta2: T,
        mu2: T,
        primal: [T; 3],
        adjoint: [T; 3],
    },
}

/// Growth rate, vertical profiles of mode and adjoint, and the z-part of
/// their pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<T> {
    pub alpha: T,
    pub beta: T,
    pub profile: VerticalProfile<T>,
    pub adjoint_profile: VerticalProfile<T>,
    /// ∫ (DW·DW*/α² + W·W* + Θ·Θ*) dz, or ∫ Θ·Θ* dz when α = 0. Multiply by
    /// the horizontal factor of the wave to get the pairing over the box.
    pub pairing_z: T,
    pub residuals: Residuals<T>,
    pub constants: ModeConstants<T>,
}

impl<T: Real> EigenPair<T> {
    /// Copy with both profiles multiplied by `s > 0`.
    pub fn rescaled(&self, s: T) -> Self {
        let mut out = self.clone();
        out.profile = self.profile.scaled(s);
        out.pairing_z = self.pairing_z * s;
        out
    }
}

/// ρ_l, the (l+1)-th positive root of ρ + Bi·tan ρ = 0.
pub fn zero_mode_rho<T: Real>(l: usize, bi: T) -> T {
    let lo = T::PI() * (T::lit(0.5) + T::count(l));
    if bi == T::zero() {
        return lo;
    }
    let hi = T::PI() * (T::one() + T::count(l));
    // ρ cos ρ + Bi sin ρ has the same roots without the poles of tan.
    bisect(
        |r: T| r * r.cos() + bi * r.sin(),
        lo,
        hi,
        T::epsilon() * hi * T::lit(4.0),
    )
}

/// Horizontally uniform mode θ = sin(ρ_l z), β = −ρ_l²; self-adjoint.
pub fn zero_mode<T: Real>(l: usize, bi: T) -> Result<EigenPair<T>> {
    if bi < T::zero() || !bi.is_finite() {
        return Err(Error::InvalidInput(format!("Bi must be nonnegative, got {bi}")));
    }
    let rho = zero_mode_rho(l, bi);
    let profile = VerticalProfile::Sine { rho };
    let q = Quadrature::gauss_legendre(PAIRING_ORDER);
    let pairing_z = q.integrate(
        &q.nodes
            .iter()
            .map(|&z| {
                let s = (rho * z).sin();
                s * s
            })
            .collect::<Vec<_>>(),
    );
    Ok(EigenPair {
        alpha: T::zero(),
        beta: -rho * rho,
        adjoint_profile: profile.clone(),
        profile,
        pairing_z,
        residuals: Residuals::default(),
        constants: ModeConstants::Uniform { rho },
    })
}

/// Marginal (β = 0) mode and adjoint from the closed forms.
pub fn critical_mode<T: Real>(alpha: T, bi: T, pr: T) -> Result<EigenPair<T>> {
    if !(alpha > T::zero()) || !(pr > T::zero()) || bi < T::zero() {
        return Err(Error::InvalidInput(format!(
            "critical mode needs alpha > 0, Pr > 0, Bi >= 0 (got {alpha}, {pr}, {bi})"
        )));
    }
    let lambda = marginal_marangoni(alpha, bi)?;
    let (sh, ch) = (alpha.sinh(), alpha.cosh());
    let one = T::one();
    let a2 = alpha * alpha;
    let denom = (alpha * ch + bi * sh) * sh;
    if !denom.is_finite() || denom == T::zero() {
        return Err(Error::Overflow {
            alpha: alpha.to_f64_lossy(),
            bound: (T::max_value().ln() / T::lit(2.0)).to_f64_lossy(),
        });
    }
    let theta1 = ((one + bi) * alpha * (ch * sh + alpha) + (one + bi + a2) * sh * sh) / denom;
    let c = alpha * ch / sh - one;
    let w1 = -sh * (alpha * ch + sh);
    let w2 = -(T::lit(2.0) * a2 * ch * ch - alpha * ch * sh - (one + a2) * sh * sh);
    let w3 = alpha * (alpha - ch * sh);
    let theta1_star = T::lit(8.0) * pr * w3;
    let four = T::lit(4.0);
    let profile = VerticalProfile::Hyperbolic {
        w: HypPoly {
            alpha,
            p: [four * a2, four * a2 * c, T::zero()],
            q: [T::zero(), -four * a2 * alpha, T::zero()],
        },
        theta: HypPoly {
            alpha,
            p: [theta1, c, a2],
            q: [T::zero(), -T::lit(3.0) * alpha, -alpha * c],
        },
    };
    let adjoint_profile = VerticalProfile::Hyperbolic {
        w: HypPoly {
            alpha,
            p: [w1, w2, w3],
            q: [T::zero(), -alpha * w1, T::zero()],
        },
        theta: HypPoly {
            alpha,
            p: [theta1_star, T::zero(), T::zero()],
            q: [T::zero(); 3],
        },
    };
    let nodes = [a2, a2, a2];
    let residuals = residuals(&profile, &adjoint_profile, nodes, pr, bi, lambda);
    let pairing_z = pairing_z(alpha, &profile, &adjoint_profile, PAIRING_ORDER);
    let pair = EigenPair {
        alpha,
        beta: T::zero(),
        profile,
        adjoint_profile,
        pairing_z,
        residuals,
        constants: ModeConstants::Marginal {
            theta1,
            c,
            theta1_star,
            w_star: [w1, w2, w3],
        },
    };
    check_residuals(&pair)?;
    Ok(pair)
}

/// Mode on a real branch `beta` of the secular relation at `params`.
pub fn general_mode<T: Real>(alpha: T, beta: T, params: &StabilityParams<T>) -> Result<EigenPair<T>> {
    if !(alpha > T::zero()) || !beta.is_finite() {
        return Err(Error::InvalidInput(format!(
            "general mode needs alpha > 0 and finite beta (got {alpha}, {beta})"
        )));
    }
    let (pr, bi, lambda) = (params.pr(), params.bi(), params.lambda());
    let nodes = nodes(alpha, beta, pr);
    let primal = orient(null_vector(&primal_rows(nodes, bi, lambda, alpha * alpha), [0, 1]));
    let adjoint = orient(null_vector(&adjoint_rows(nodes, pr, bi, lambda), [0, 1]));
    let coupling = alpha * alpha / pr;
    let a2l = alpha * alpha * lambda;
    let near = KernelProfile {
        nodes,
        coeffs: primal,
        adjoint: false,
        coupling,
        far: None,
    };
    let kp = two_sided(near, |s| [s.w, s.dtheta + bi * s.theta, s.d2w + a2l * s.theta]);
    let near = KernelProfile {
        nodes,
        coeffs: adjoint,
        adjoint: true,
        coupling,
        far: None,
    };
    let ka = two_sided(near, |s| [s.w, s.d2w, s.dtheta + bi * s.theta + lambda * pr * s.dw]);
    let (primal, adjoint) = (kp.coeffs, ka.coeffs);
    let profile = VerticalProfile::Kernel(kp);
    let adjoint_profile = VerticalProfile::Kernel(ka);
    let residuals = residuals(&profile, &adjoint_profile, nodes, pr, bi, lambda);
    let pairing_z = pairing_z(alpha, &profile, &adjoint_profile, PAIRING_ORDER);
    let pair = EigenPair {
        alpha,
        beta,
        profile,
        adjoint_profile,
        pairing_z,
        residuals,
        constants: ModeConstants::General {
            eta2: nodes[1],
            mu2: nodes[2],
            primal,
            adjoint,
        },
    };
    check_residuals(&pair)?;
    Ok(pair)
}

/// Adds the far representation to a near-side kernel profile.
///
/// Unknowns are the three near coefficients and the six far ones; the
/// equations are agreement of W…D³W, Θ, DΘ at the seam and the three z = 1
/// conditions `bc` on the far side. Keeps the profile one-sided when the
/// system is not numerically rank-deficient.
fn two_sided<T: Real>(mut k: KernelProfile<T>, bc: impl Fn(&ProfileSample<T>) -> [T; 3]) -> KernelProfile<T> {
    let m = T::lit(SEAM);
    let unit = |j: usize| {
        let mut e = [T::zero(); 6];
        e[j] = T::one();
        e
    };
    let jet = |s: ProfileSample<T>| [s.w, s.dw, s.d2w, s.d3w, s.theta, s.dtheta];
    let near: Vec<[T; 6]> = [0, 2, 5].iter().map(|&j| jet(k.general(unit(j), m))).collect();
    let far: Vec<ProfileSample<T>> = (0..6).map(|j| k.general(unit(j), T::one() - m).reflected()).collect();
    let ends: Vec<[T; 3]> = (0..6).map(|j| bc(&k.general(unit(j), T::zero()).reflected())).collect();
    let mut rows = Vec::with_capacity(9);
    for c in 0..6 {
        let mut r: Vec<T> = near.iter().map(|v| v[c]).collect();
        r.extend(far.iter().map(|s| -jet(*s)[c]));
        rows.push(r);
    }
    for c in 0..3 {
        let mut r = vec![T::zero(); 3];
        r.extend(ends.iter().map(|e| e[c]));
        rows.push(r);
    }
    let Some((v, ratio)) = null_space(rows) else {
        return k;
    };
    if !(ratio < T::lit(TWO_SIDED_RANK)) {
        return k;
    }
    let dot = (0..3).fold(T::zero(), |a, i| a + v[i] * k.coeffs[i]);
    let n = (0..3).fold(T::zero(), |a, i| a + v[i] * v[i]).sqrt();
    if dot == T::zero() || n == T::zero() {
        return k;
    }
    let f = if dot > T::zero() { T::one() / n } else { -T::one() / n };
    k.coeffs = [v[0] * f, v[1] * f, v[2] * f];
    k.far = Some([v[3] * f, v[4] * f, v[5] * f, v[6] * f, v[7] * f, v[8] * f]);
    k
}

/// First `count` real branches at wavenumber `alpha` (uniform modes when
/// `alpha = 0`), ordered by decreasing β.
pub fn branches<T: Real>(alpha: T, params: &StabilityParams<T>, count: usize) -> Result<Vec<EigenPair<T>>> {
    if alpha == T::zero() {
        return (0..count).map(|l| zero_mode(l, params.bi())).collect();
    }
    real_spectrum(alpha, params, count)?
        .into_iter()
        .map(|b| general_mode(alpha, b, params))
        .collect()
}

fn nodes<T: Real>(alpha: T, beta: T, pr: T) -> [T; 3] {
    let a2 = alpha * alpha;
    [a2, a2 + beta / pr, a2 + beta]
}

/// Boundary rows at z = 1 acting on (W''(0), W'''(0), Θ'(0)):
/// W(1), DΘ(1) + Bi Θ(1), D²W(1) + α²λΘ(1).
fn primal_rows<T: Real>(nodes: [T; 3], bi: T, lambda: T, a2: T) -> [[T; 3]; 3] {
    let one = T::one();
    let k2 = divided(&nodes[..2], one);
    let k3 = divided(&nodes, one);
    let km = point(nodes[2], one);
    let al = a2 * lambda;
    [
        [k2.f[0], k2.g[0], T::zero()],
        [-(k3.g[1] + bi * k3.f[0]), -(k3.f[0] + bi * k3.g[0]), km.f[0] + bi * km.g[0]],
        [k2.f[1] - al * k3.f[0], k2.g[1] - al * k3.g[0], al * km.g[0]],
    ]
}

/// Adjoint rows: W*(1), D²W*(1), DΘ*(1) + Bi Θ*(1) + λ Pr DW*(1).
fn adjoint_rows<T: Real>(nodes: [T; 3], pr: T, bi: T, lambda: T) -> [[T; 3]; 3] {
    let one = T::one();
    let k2 = divided(&nodes[..2], one);
    let k3 = divided(&nodes, one);
    let km = point(nodes[2], one);
    let cp = nodes[0] / pr;
    let lp = lambda * pr;
    [
        [k2.f[0], k2.g[0], cp * k3.g[0]],
        [k2.f[1], k2.g[1], cp * k3.g[1]],
        [
            lp * k2.g[1],
            lp * k2.f[0],
            lp * cp * k3.f[0] + km.f[0] + bi * km.g[0],
        ],
    ]
}

fn cross<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm<T: Real>(v: [T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Null vector of a rank-2 3×3 system; prefers the `preferred` row pair and
/// falls back to the best-conditioned pair.
fn null_vector<T: Real>(rows: &[[T; 3]; 3], preferred: [usize; 2]) -> [T; 3] {
    let rel = |i: usize, j: usize| {
        let c = cross(rows[i], rows[j]);
        let d = norm(rows[i]) * norm(rows[j]);
        let r = if d > T::zero() { norm(c) / d } else { T::zero() };
        (r, c)
    };
    let (r0, c0) = rel(preferred[0], preferred[1]);
    let mut best = (r0, c0);
    if r0 < T::lit(1e-6) {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let cand = rel(i, j);
            if cand.0 > best.0 {
                best = cand;
            }
        }
    }
    let n = norm(best.1);
    best.1.map(|x| x / n)
}

/// Fixes the sign so the largest component is positive.
fn orient<T: Real>(v: [T; 3]) -> [T; 3] {
    let mut k = 0;
    for i in 1..3 {
        if v[i].abs() > v[k].abs() {
            k = i;
        }
    }
    if v[k] < T::zero() {
        v.map(|x| -x)
    } else {
        v
    }
}

/// Determinant of the boundary system; its real zeros are the growth rates.
pub fn secular_determinant<T: Real>(alpha: T, beta: T, params: &StabilityParams<T>) -> T {
    let n = nodes(alpha, beta, params.pr());
    let r = primal_rows(n, params.bi(), params.lambda(), alpha * alpha);
    let c = cross(r[0], r[1]);
    r[2][0] * c[0] + r[2][1] * c[1] + r[2][2] * c[2]
}

/// First `count` real roots β of the secular relation, decreasing.
///
/// Bracketing runs on s = sign(β)√|β| from β = 1e3·min(1, Pr) down, the
/// lower end growing tenfold from −1e3 until enough roots are found. The
/// upper end stays put: positive growth rates are small, and once β/Pr
/// passes 1e3 the determinant is dominated by cancellation between
/// exponentials of size e^√(β/Pr).
/// Roots closer than 1e-10 are left in scan order.
pub fn real_spectrum<T: Real>(alpha: T, params: &StabilityParams<T>, count: usize) -> Result<Vec<T>> {
    if !(alpha > T::zero()) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    let det = |b: T| secular_determinant(alpha, b, params);
    let step = T::lit(SCAN_STEP);
    let mut beta_max = T::lit(BETA_MAX_START);
    let top = T::lit(BETA_MAX_START) * params.pr().min(T::one());
    let mut roots = Vec::new();
    loop {
        roots.clear();
        let smax = top.sqrt();
        let smin = -beta_max.sqrt();
        let mut j = 0usize;
        let sq = |s: T| s * s.abs();
        let mut s_prev = smax;
        let mut f_prev = det(sq(s_prev));
        while roots.len() < count {
            let s = smax - (T::count(j) + T::lit(0.5)) * step;
            j += 1;
            if s < smin {
                break;
            }
            let f = det(sq(s));
            if f == T::zero() {
                roots.push(sq(s));
            } else if (f < T::zero()) != (f_prev < T::zero()) && f_prev != T::zero() {
                let (lo, hi) = (sq(s), sq(s_prev));
                let tol = T::lit(1e-12).max(T::lit(4.0) * T::epsilon() * lo.abs().max(hi.abs()));
                roots.push(bisect(det, lo, hi, tol));
            }
            s_prev = s;
            f_prev = f;
        }
        if roots.len() >= count {
            roots.truncate(count);
            return Ok(roots);
        }
        if beta_max >= T::lit(BETA_MAX_LIMIT) {
            return Err(Error::RootNotFound {
                alpha: alpha.to_f64_lossy(),
                found: roots.len(),
                wanted: count,
                lo: -beta_max.to_f64_lossy(),
                hi: top.to_f64_lossy(),
            });
        }
        beta_max = beta_max * T::lit(10.0);
    }
}

/// ∫ (DW·DW*/α² + W·W* + Θ·Θ*) dz with an `order`-point rule.
pub fn pairing_z<T: Real>(alpha: T, p: &VerticalProfile<T>, a: &VerticalProfile<T>, order: usize) -> T {
    let q = Quadrature::gauss_legendre(order);
    let a2 = alpha * alpha;
    let vals: Vec<T> = q
        .nodes
        .iter()
        .map(|&z| {
            let s = p.sample(z);
            let t = a.sample(z);
            let vel = if a2 > T::zero() {
                s.dw * t.dw / a2 + s.w * t.w
            } else {
                T::zero()
            };
            vel + s.theta * t.theta
        })
        .collect();
    q.integrate(&vals)
}

fn residuals<T: Real>(
    profile: &VerticalProfile<T>,
    adjoint: &VerticalProfile<T>,
    nodes: [T; 3],
    pr: T,
    bi: T,
    lambda: T,
) -> Residuals<T> {
    let [xa, xe, xm] = nodes;
    let zs: Vec<T> = chebyshev_points(RESIDUAL_POINTS);
    let ps: Vec<ProfileSample<T>> = zs.iter().map(|&z| profile.sample(z)).collect();
    let qs: Vec<ProfileSample<T>> = zs.iter().map(|&z| adjoint.sample(z)).collect();
    let sup = |f: &dyn Fn(&ProfileSample<T>) -> T, v: &[ProfileSample<T>]| {
        v.iter().map(|s| f(s).abs()).fold(T::zero(), T::max)
    };
    let (mut r1, mut s1, mut r2, mut s2) = (T::zero(), T::zero(), T::zero(), T::zero());
    for s in &ps {
        let t = [s.d4w, -(xa + xe) * s.d2w, xa * xe * s.w];
        r1 = r1.max((t[0] + t[1] + t[2]).abs());
        s1 = s1.max(t.iter().fold(T::zero(), |m, x| m.max(x.abs())));
        let u = [s.d2theta, -xm * s.theta, s.w];
        r2 = r2.max((u[0] + u[1] + u[2]).abs());
        s2 = s2.max(u.iter().fold(T::zero(), |m, x| m.max(x.abs())));
    }
    let (mut r3, mut s3, mut r4, mut s4) = (T::zero(), T::zero(), T::zero(), T::zero());
    for s in &qs {
        let t = [s.d4w, -(xa + xe) * s.d2w, xa * xe * s.w, -xa / pr * s.theta];
        r3 = r3.max((t[0] + t[1] + t[2] + t[3]).abs());
        s3 = s3.max(t.iter().fold(T::zero(), |m, x| m.max(x.abs())));
        let u = [s.d2theta, -xm * s.theta];
        r4 = r4.max((u[0] + u[1]).abs());
        s4 = s4.max(u.iter().fold(T::zero(), |m, x| m.max(x.abs())));
    }
    let ratio = |r: T, s: T| if s > T::zero() { r / s } else { r };
    let scale_p = [
        sup(&|s| s.w, &ps),
        sup(&|s| s.dw, &ps),
        sup(&|s| s.d2w, &ps),
        sup(&|s| s.theta, &ps),
        sup(&|s| s.dtheta, &ps),
    ]
    .into_iter()
    .fold(T::zero(), T::max);
    let scale_q = [
        sup(&|s| s.w, &qs),
        sup(&|s| s.dw, &qs),
        sup(&|s| s.d2w, &qs),
        sup(&|s| s.theta, &qs),
        sup(&|s| s.dtheta, &qs),
    ]
    .into_iter()
    .fold(T::zero(), T::max);
    let (p0, p1) = (&ps[0], &ps[ps.len() - 1]);
    let (q0, q1) = (&qs[0], &qs[qs.len() - 1]);
    let a2 = xa;
    let bc_p = [
        p0.w,
        p0.dw,
        p0.theta,
        p1.w,
        p1.dtheta + bi * p1.theta,
        (p1.d2w + a2 * lambda * p1.theta) / (T::one() + a2 * lambda),
    ]
    .into_iter()
    .fold(T::zero(), |m, x| m.max(x.abs()));
    let bc_q = [
        q0.w,
        q0.dw,
        q0.theta,
        q1.w,
        q1.d2w,
        (q1.dtheta + bi * q1.theta + lambda * pr * q1.dw) / (T::one() + lambda * pr),
    ]
    .into_iter()
    .fold(T::zero(), |m, x| m.max(x.abs()));
    let secular = if a2 > T::zero() && p1.theta != T::zero() {
        ((lambda + p1.d2w / (a2 * p1.theta)) / lambda).abs()
    } else {
        T::zero()
    };
    Residuals {
        ode: ratio(r1, s1).max(ratio(r2, s2)),
        ode_adjoint: ratio(r3, s3).max(ratio(r4, s4)),
        boundary: ratio(bc_p, scale_p),
        boundary_adjoint: ratio(bc_q, scale_q),
        secular,
    }
}

fn check_residuals<T: Real>(p: &EigenPair<T>) -> Result<()> {
    let r = &p.residuals;
    let checks = [
        ("mode ODE", r.ode, ODE_LIMIT),
        ("adjoint ODE", r.ode_adjoint, ODE_LIMIT),
        ("mode boundary", r.boundary, BC_LIMIT),
        ("adjoint boundary", r.boundary_adjoint, BC_LIMIT),
        ("secular relation", r.secular, SECULAR_LIMIT),
    ];
    for (what, value, limit) in checks {
        if !(value.to_f64_lossy() <= limit) {
            return Err(Error::Residual {
                what: what.into(),
                value: value.to_f64_lossy(),
                limit,
            });
        }
    }
    if p.pairing_z == T::zero() || !p.pairing_z.is_finite() {
        return Err(Error::ZeroPairing(p.pairing_z.to_f64_lossy()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pr: f64, bi: f64, lambda: f64) -> StabilityParams<f64> {
        StabilityParams::new(pr, bi, lambda).unwrap()
    }

    #[test]
    fn zero_mode_roots() {
        let m = zero_mode(0, 0.0f64).unwrap();
        assert!((m.beta + std::f64::consts::PI.powi(2) / 4.0).abs() < 1e-14);
        let r3 = zero_mode_rho(3, 0.0f64);
        assert!((r3 - 3.5 * std::f64::consts::PI).abs() < 1e-14);
        let r = zero_mode_rho(0, 5.0f64);
        assert!(r > std::f64::consts::FRAC_PI_2 && r < std::f64::consts::PI);
        assert!((r + 5.0 * r.tan()).abs() < 1e-12);
    }

    #[test]
    fn critical_mode_boundary_and_residuals() {
        let a = 2.0 * std::f64::consts::PI / 3.0;
        let m = critical_mode(a, 0.0, 1.0).unwrap();
        let lc = marginal_marangoni(a, 0.0).unwrap();
        let s = m.profile.sample(1.0);
        assert!((s.d2w + a * a * lc * s.theta).abs() < 1e-9 * s.d2w.abs());
        assert!(m.residuals.ode < 1e-8 && m.residuals.boundary < 1e-10);
        assert!(m.pairing_z != 0.0);
    }

    #[test]
    fn marginal_branch_has_zero_growth() {
        let a = 2.0;
        let lc = marginal_marangoni(a, 0.0).unwrap();
        let b = real_spectrum(a, &params(1.0, 0.0, lc), 3).unwrap();
        assert!(b[0].abs() < 1e-7, "{b:?}");
        assert!(b[1] < 0.0 && b[2] < b[1]);
    }

    #[test]
    fn general_mode_at_unit_prandtl() {
        let a = 2.0;
        let lc = marginal_marangoni(a, 0.0).unwrap();
        let p = params(1.0, 0.0, lc);
        let b = real_spectrum(a, &p, 2).unwrap()[1];
        let m = general_mode(a, b, &p).unwrap();
        assert!(m.residuals.ode < 1e-8, "{:?}", m.residuals);
        assert!(m.pairing_z.abs() > 0.0);
    }

    #[test]
    fn general_mode_near_zero_beta_matches_critical() {
        let a = 2.0;
        let pr = 0.7;
        let crit = critical_mode(a, 0.0, pr).unwrap();
        let beta = -1e-6;
        // Marangoni number for which beta is an eigenvalue of the branch.
        let n = nodes(a, beta, pr);
        let r = primal_rows(n, 0.0, 0.0, a * a);
        let v = null_vector(&r, [0, 1]);
        let s1 = VerticalProfile::Kernel(KernelProfile {
            nodes: n,
            coeffs: v,
            adjoint: false,
            coupling: a * a / pr,
            far: None,
        })
        .sample(1.0);
        let lam = -s1.d2w / (a * a * s1.theta);
        let g = general_mode(a, beta, &params(pr, 0.0, lam)).unwrap();
        let zs = [0.2, 0.5, 0.8, 1.0];
        let ratio = crit.profile.sample(0.5).w / g.profile.sample(0.5).w;
        for z in zs {
            let c = crit.profile.sample(z);
            let s = g.profile.sample(z);
            assert!((c.w - ratio * s.w).abs() < 1e-3 * c.w.abs().max(1e-3), "W at {z}");
            assert!((c.theta - ratio * s.theta).abs() < 1e-3 * c.theta.abs().max(1.0), "T at {z}");
        }
    }

    #[test]
    fn two_sided_profile_is_continuous_at_the_seam() {
        let a = 3.0 * std::f64::consts::PI;
        let p = params(1.3, 0.5, 80.0);
        for m in branches(a, &p, 3).unwrap() {
            for prof in [&m.profile, &m.adjoint_profile] {
                let VerticalProfile::Kernel(k) = prof else { panic!("kernel profile expected") };
                let far = k.far.expect("far side built");
                let lo = k.general(k.near(), SEAM);
                let hi = k.general(far, 1.0 - SEAM).reflected();
                let scale = [lo.w, lo.dw, lo.d2w, lo.d3w, lo.theta, lo.dtheta]
                    .iter()
                    .fold(0.0f64, |x, v| x.max(v.abs()));
                for (u, v) in [(lo.w, hi.w), (lo.d2w, hi.d2w), (lo.d3w, hi.d3w), (lo.theta, hi.theta), (lo.dtheta, hi.dtheta)] {
                    assert!((u - v).abs() < 1e-10 * scale, "{u} vs {v}");
                }
            }
            assert!(m.residuals.boundary_adjoint < 1e-14, "{:?}", m.residuals);
        }
    }
}
