//! Closed-form general modes in terms of η, μ, k, b and w₁…w₄.
//!
//! Kept as an independent evaluator for cross-checks. The forms vanish
//! identically at Pr = 1 and lose precision as β → 0; use
//! [`super::general_mode`] for computation.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Values of W, DW, D²W, Θ, DΘ at one height (complex in general; real up to
/// a constant phase for real β).
#[derive(Debug, Clone, Copy)]
pub struct ClosedSample<T> {
    pub w: Complex<T>,
    pub dw: Complex<T>,
    pub d2w: Complex<T>,
    pub theta: Complex<T>,
    pub dtheta: Complex<T>,
}

#[derive(Debug, Clone)]
pub struct ClosedFormMode<T> {
    alpha: T,
    beta: T,
    pr: T,
    pub eta: Complex<T>,
    pub mu: Complex<T>,
    pub k: Complex<T>,
    pub b: Complex<T>,
    pub w: [Complex<T>; 4],
    theta_star: Complex<T>,
}

fn c<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// sinh(κz), cosh(κz) and their first two z-derivatives.
fn hyp<T: Real>(kappa: Complex<T>, z: T) -> ([Complex<T>; 3], [Complex<T>; 3]) {
    let (s, ch) = ((kappa * z).sinh(), (kappa * z).cosh());
    let k2 = kappa * kappa;
    ([s, kappa * ch, k2 * s], [ch, kappa * s, k2 * ch])
}

impl<T: Real> ClosedFormMode<T> {
    pub fn new(alpha: T, beta: T, pr: T, bi: T) -> Result<Self> {
        let a = c(alpha);
        let eta = c(alpha * alpha + beta / pr).sqrt();
        let mu = c(alpha * alpha + beta).sqrt();
        let one = c(T::one());
        let kden = eta * alpha.sinh() - a * eta.sinh();
        if kden.norm() == T::zero() {
            return Err(Error::Numerical("closed form degenerate: eta = alpha".into()));
        }
        let k = (eta.cosh() - alpha.cosh()) / kden;
        let prc = c(pr);
        let mut m = ClosedFormMode {
            alpha,
            beta,
            pr,
            eta,
            mu,
            k,
            b: Complex::new(T::zero(), T::zero()),
            w: [one; 4],
            theta_star: one,
        };
        // b from DΘ(1) + Bi Θ(1) = 0, Θ affine in b.
        let t0 = m.primal(T::one());
        let (sm, cm) = (mu.sinh(), mu.cosh());
        let slope = mu * cm + sm * bi;
        if slope.norm() == T::zero() {
            return Err(Error::Numerical("closed form: b undetermined".into()));
        }
        m.b = -(t0.dtheta + t0.theta * bi) / slope;
        let (sa, ca) = (c(alpha.sinh()), c(alpha.cosh()));
        let (se, ce, smu) = (eta.sinh(), eta.cosh(), mu.sinh());
        let pm1 = prc - one;
        m.w = [
            pm1 * eta * ce * smu + ca * (mu * se - prc * eta * smu),
            eta * ce * sa - a * ca * se,
            pm1 * a * se * smu + sa * (mu * se - prc * eta * smu),
            prc * a * ca * smu - ce * (mu * sa + pm1 * a * smu),
        ];
        m.theta_star = pm1 * (beta * beta) / (alpha * alpha) * (eta * sa * ce - a * ca * se);
        Ok(m)
    }

    pub fn primal(&self, z: T) -> ClosedSample<T> {
        let one = c(T::one());
        let prc = c(self.pr);
        let a = c(self.alpha);
        let (sa, ca) = hyp(a, z);
        let (se, ce) = hyp(self.eta, z);
        let (sm, cm) = hyp(self.mu, z);
        let pre = (prc - one) * self.beta;
        let ke = self.k * self.eta;
        let ka = self.k * a;
        let w = |i: usize| pre * (-ke * sa[i] - ca[i] + ka * se[i] + ce[i]);
        let th = |i: usize| {
            (one - prc) * (ke * sa[i] + ca[i]) + prc * (ka * se[i] + ce[i]) + self.b * sm[i] - cm[i]
        };
        ClosedSample {
            w: w(0),
            dw: w(1),
            d2w: w(2),
            theta: th(0),
            dtheta: th(1),
        }
    }

    pub fn adjoint(&self, z: T) -> ClosedSample<T> {
        let a = c(self.alpha);
        let (sa, ca) = hyp(a, z);
        let (se, ce) = hyp(self.eta, z);
        let (sm, _) = hyp(self.mu, z);
        let w = &self.w;
        let ws = |i: usize| w[0] * sa[i] + w[1] * sm[i] + w[2] * (ce[i] - ca[i]) + w[3] * se[i];
        ClosedSample {
            w: ws(0),
            dw: ws(1),
            d2w: ws(2),
            theta: self.theta_star * sm[0],
            dtheta: self.theta_star * sm[1],
        }
    }

    /// λ recovered from −D²W(1)/(α²Θ(1)).
    pub fn secular_lambda(&self) -> Complex<T> {
        let s = self.primal(T::one());
        -s.d2w / (s.theta * (self.alpha * self.alpha))
    }
}
