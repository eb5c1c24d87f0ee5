//! Vertical profiles W(z), Θ(z) with the derivatives the solvers need.

use crate::kernel::{divided, point};
use crate::scalar::Real;

/// W and Θ with derivatives at one height.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProfileSample<T> {
    pub w: T,
    pub dw: T,
    pub d2w: T,
    pub d3w: T,
    pub d4w: T,
    pub theta: T,
    pub dtheta: T,
    pub d2theta: T,
}

impl<T: Real> ProfileSample<T> {
    /// The same sample seen from ζ = 1 − z: odd derivatives change sign.
    pub fn reflected(self) -> Self {
        ProfileSample {
            dw: -self.dw,
            d3w: -self.d3w,
            dtheta: -self.dtheta,
            ..self
        }
    }

    fn axpy(&mut self, a: T, o: &Self) {
        self.w += a * o.w;
        self.dw += a * o.dw;
        self.d2w += a * o.d2w;
        self.d3w += a * o.d3w;
        self.d4w += a * o.d4w;
        self.theta += a * o.theta;
        self.dtheta += a * o.dtheta;
        self.d2theta += a * o.d2theta;
    }
}

/// `P(z) sinh(αz) + Q(z) cosh(αz)` with quadratic `P`, `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypPoly<T> {
    pub alpha: T,
    pub p: [T; 3],
    pub q: [T; 3],
}

impl<T: Real> HypPoly<T> {
    pub fn derivative(&self) -> Self {
        let a = self.alpha;
        let two = T::lit(2.0);
        HypPoly {
            alpha: a,
            p: [self.p[1] + a * self.q[0], two * self.p[2] + a * self.q[1], a * self.q[2]],
            q: [self.q[1] + a * self.p[0], two * self.q[2] + a * self.p[1], a * self.p[2]],
        }
    }

    pub fn eval(&self, z: T) -> T {
        let pz = self.p[0] + z * (self.p[1] + z * self.p[2]);
        let qz = self.q[0] + z * (self.q[1] + z * self.q[2]);
        pz * (self.alpha * z).sinh() + qz * (self.alpha * z).cosh()
    }

    /// Value and first four derivatives.
    pub fn jet(&self, z: T) -> [T; 5] {
        let mut out = [T::zero(); 5];
        let mut h = self.clone();
        for slot in out.iter_mut() {
            *slot = h.eval(z);
            h = h.derivative();
        }
        out
    }
}

/// Height where the near and far representations of a kernel profile meet.
pub const SEAM: f64 = 0.5;

/// Kernel-based profile: combination of divided differences over the
/// nodes `[α², η², μ²]` (see [`crate::kernel`]).
///
/// Near z = 0 the profile is the three-parameter family that already meets
/// the z = 0 conditions. Every member grows like e^{αz}, so the physical
/// combination cancels near z = 1 and loses about log₁₀(α²e^α) digits
/// there. When `far` is set, heights above [`SEAM`] are evaluated instead
/// from the general solution in ζ = 1 − z, whose coefficients meet the
/// z = 1 conditions directly and match the near side at the seam.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelProfile<T> {
    pub nodes: [T; 3],
    pub coeffs: [T; 3],
    pub adjoint: bool,
    /// α²/Pr, the forcing of W* by Θ* in the adjoint system.
    pub coupling: T,
    /// `[P₀, P₁, Q₀, Q₁, R, S]` of [`KernelProfile::general`] in ζ = 1 − z.
    pub far: Option<[T; 6]>,
}

impl<T: Real> KernelProfile<T> {
    pub fn sample(&self, z: T) -> ProfileSample<T> {
        match self.far {
            Some(c) if z > T::lit(SEAM) => self.general(c, T::one() - z).reflected(),
            _ => self.general(self.near(), z),
        }
    }

    /// Near coefficients in the layout of [`KernelProfile::general`].
    pub fn near(&self) -> [T; 6] {
        let [a, b, c] = self.coeffs;
        let o = T::zero();
        [a, o, b, o, o, c]
    }

    /// Member of the six-dimensional solution space at height `s`.
    ///
    /// With two-node kernels f, g, three-node kernels F, G and single-node
    /// kernels at μ², the mode is W = P₀f₀ + P₁f₁ + Q₀g₀ + Q₁g₁,
    /// Θ = −(P₀F₀ + P₁F₁ + Q₀G₀ + Q₁G₁) + R cosh μs + S sinh(μs)/μ; the
    /// adjoint is Θ* = R cosh μs + S sinh(μs)/μ, W* = (α²/Pr)(R F₀ + S G₀) +
    /// P₀f₀ + P₁f₁ + Q₀g₀ + Q₁g₁.
    pub fn general(&self, c: [T; 6], s: T) -> ProfileSample<T> {
        let [xa, xe, xm] = self.nodes;
        let two = divided(&[xa, xe], s);
        let three = divided(&[xa, xe, xm], s);
        let one = point(xm, s);
        let (f, g, ff, gg) = (two.f, two.g, three.f, three.g);
        // x³ on two nodes reduces through (x − α²)(x − η²) = 0.
        let f3 = (xa + xe) * f[2] - xa * xe * f[1];
        let g3 = (xa + xe) * g[2] - xa * xe * g[1];
        let [p0, p1, q0, q1, r, t] = c;
        let w = [
            p0 * f[0] + p1 * f[1] + q0 * g[0] + q1 * g[1],
            p0 * g[1] + p1 * g[2] + q0 * f[0] + q1 * f[1],
            p0 * f[1] + p1 * f[2] + q0 * g[1] + q1 * g[2],
            p0 * g[2] + p1 * g3 + q0 * f[1] + q1 * f[2],
            p0 * f[2] + p1 * f3 + q0 * g[2] + q1 * g3,
        ];
        let hom = [r * one.f[0] + t * one.g[0], r * one.g[1] + t * one.f[0], r * one.f[1] + t * one.g[1]];
        if !self.adjoint {
            let forced = [
                p0 * ff[0] + p1 * ff[1] + q0 * gg[0] + q1 * gg[1],
                p0 * gg[1] + p1 * gg[2] + q0 * ff[0] + q1 * ff[1],
                p0 * ff[1] + p1 * ff[2] + q0 * gg[1] + q1 * gg[2],
            ];
            ProfileSample {
                w: w[0],
                dw: w[1],
                d2w: w[2],
                d3w: w[3],
                d4w: w[4],
                theta: hom[0] - forced[0],
                dtheta: hom[1] - forced[1],
                d2theta: hom[2] - forced[2],
            }
        } else {
            let k = self.coupling;
            let forced = [
                r * ff[0] + t * gg[0],
                r * gg[1] + t * ff[0],
                r * ff[1] + t * gg[1],
                r * gg[2] + t * ff[1],
                r * ff[2] + t * gg[2],
            ];
            ProfileSample {
                w: w[0] + k * forced[0],
                dw: w[1] + k * forced[1],
                d2w: w[2] + k * forced[2],
                d3w: w[3] + k * forced[3],
                d4w: w[4] + k * forced[4],
                theta: hom[0],
                dtheta: hom[1],
                d2theta: hom[2],
            }
        }
    }
}

/// Evaluable vertical profile of an eigenmode or adjoint eigenmode.
#[derive(Debug, Clone, PartialEq)]
pub enum VerticalProfile<T> {
    /// Closed form `P sinh + Q cosh` for W and Θ (critical modes).
    Hyperbolic { w: HypPoly<T>, theta: HypPoly<T> },
    /// Divided-difference form (general modes).
    Kernel(KernelProfile<T>),
    /// W ≡ 0, Θ = sin(ρz) (horizontally uniform modes).
    Sine { rho: T },
    /// Linear combination of profiles.
    Combination(Vec<(T, VerticalProfile<T>)>),
}

impl<T: Real> VerticalProfile<T> {
    pub fn sample(&self, z: T) -> ProfileSample<T> {
        match self {
            VerticalProfile::Hyperbolic { w, theta } => {
                let jw = w.jet(z);
                let h = theta.clone();
                let d1 = h.derivative();
                let d2 = d1.derivative();
                ProfileSample {
                    w: jw[0],
                    dw: jw[1],
                    d2w: jw[2],
                    d3w: jw[3],
                    d4w: jw[4],
                    theta: h.eval(z),
                    dtheta: d1.eval(z),
                    d2theta: d2.eval(z),
                }
            }
            VerticalProfile::Kernel(k) => k.sample(z),
            VerticalProfile::Sine { rho } => {
                let (s, c) = (*rho * z).sin_cos();
                ProfileSample {
                    theta: s,
                    dtheta: *rho * c,
                    d2theta: -*rho * *rho * s,
                    ..Default::default()
                }
            }
            VerticalProfile::Combination(parts) => {
                let mut out = ProfileSample::default();
                for (a, p) in parts {
                    out.axpy(*a, &p.sample(z));
                }
                out
            }
        }
    }

    /// Profile multiplied by `s`.
    pub fn scaled(&self, s: T) -> Self {
        VerticalProfile::Combination(vec![(s, self.clone())])
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        VerticalProfile::Combination(vec![(a, self.clone()), (b, other.clone())])
    }

    /// False only when W vanishes identically by construction.
    pub fn has_velocity(&self) -> bool {
        match self {
            VerticalProfile::Sine { .. } => false,
            VerticalProfile::Combination(parts) => parts
                .iter()
                .any(|(a, p)| *a != T::zero() && p.has_velocity()),
            _ => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyp_poly_derivative_matches_finite_difference() {
        let h = HypPoly {
            alpha: 2.0f64,
            p: [0.3, -1.2, 0.7],
            q: [1.0, 0.5, -0.25],
        };
        let z = 0.41;
        let e = 1e-5;
        let fd = (h.eval(z + e) - h.eval(z - e)) / (2.0 * e);
        assert!((h.jet(z)[1] - fd).abs() < 1e-8);
    }

    #[test]
    fn sine_profile_has_no_velocity() {
        let p = VerticalProfile::Sine { rho: 1.5f64 };
        assert!(!p.has_velocity());
        let s = p.sample(0.3);
        assert_eq!(s.w, 0.0);
        assert!((s.theta - (0.45f64).sin()).abs() < 1e-15);
    }
}
