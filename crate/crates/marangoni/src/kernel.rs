//! Divided differences in `x = s²` of the entire kernels `cosh(s z)` and
//! `sinh(s z)/s`.
//!
//! Every vertical eigenfunction is a combination of these divided differences
//! over the nodes α², η², μ². They stay finite and smooth when nodes coincide
//! (Pr = 1, β = 0), and are real for real nodes of either sign.

use num_complex::Complex;

use crate::scalar::Real;

/// Kernel values multiplied by powers of the node variable:
/// `f[j] = x^j cosh(√x z)`, `g[j] = x^j sinh(√x z)/√x`, `j = 0, 1, 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernels<T> {
    pub f: [T; 3],
    pub g: [T; 3],
}

impl<T: Real> Kernels<T> {
    fn zero() -> Self {
        Kernels {
            f: [T::zero(); 3],
            g: [T::zero(); 3],
        }
    }

    fn sub_div(self, other: Self, d: T) -> Self {
        let mut out = Self::zero();
        for j in 0..3 {
            out.f[j] = (self.f[j] - other.f[j]) / d;
            out.g[j] = (self.g[j] - other.g[j]) / d;
        }
        out
    }
}

const SPLIT_RATIO: f64 = 0.5;
const CONTOUR_POINTS: usize = 32;
const SERIES_TERMS: usize = 14;

fn series_real<T: Real>(t: T, z: T) -> (T, T) {
    let mut f = T::zero();
    let mut g = T::zero();
    let mut term = T::one();
    for n in 0..SERIES_TERMS {
        let a = T::count(2 * n + 1);
        f += term;
        g += term / a;
        term = term * t / (a * T::count(2 * n + 2));
    }
    (f, g * z)
}

fn base_real<T: Real>(x: T, z: T) -> (T, T) {
    let t = x * z * z;
    if t.abs() <= T::one() {
        return series_real(t, z);
    }
    if x > T::zero() {
        let s = x.sqrt();
        ((s * z).cosh(), (s * z).sinh() / s)
    } else {
        let s = (-x).sqrt();
        ((s * z).cos(), (s * z).sin() / s)
    }
}

fn base_complex<T: Real>(x: Complex<T>, z: T) -> (Complex<T>, Complex<T>) {
    let t = x * (z * z);
    if t.norm() <= T::one() {
        let mut f = Complex::new(T::zero(), T::zero());
        let mut g = f;
        let mut term = Complex::new(T::one(), T::zero());
        for n in 0..SERIES_TERMS {
            let a = T::count(2 * n + 1);
            f += term;
            g += term / a;
            term = term * t / (a * T::count(2 * n + 2));
        }
        return (f, g * z);
    }
    let s = x.sqrt();
    let w = s * z;
    (w.cosh(), w.sinh() / s)
}

/// Kernel values at a single node.
pub fn point<T: Real>(x: T, z: T) -> Kernels<T> {
    let (f0, g0) = base_real(x, z);
    Kernels {
        f: [f0, x * f0, x * x * f0],
        g: [g0, x * g0, x * x * g0],
    }
}

fn scale<T: Real>(center: T, z: T) -> T {
    if z == T::zero() {
        return T::infinity();
    }
    (center.abs().sqrt() / z).max(T::one() / (z * z))
}

/// Divided difference of every kernel over `nodes` (one to three nodes).
pub fn divided<T: Real>(nodes: &[T], z: T) -> Kernels<T> {
    assert!(!nodes.is_empty() && nodes.len() <= 4);
    let mut buf = [T::zero(); 4];
    buf[..nodes.len()].copy_from_slice(nodes);
    let sorted = &mut buf[..nodes.len()];
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
    recurse(sorted, z)
}

fn recurse<T: Real>(nodes: &[T], z: T) -> Kernels<T> {
    let n = nodes.len();
    if n == 1 {
        return point(nodes[0], z);
    }
    let spread = nodes[n - 1] - nodes[0];
    let center = nodes.iter().copied().sum::<T>() / T::count(n);
    let r = scale(center, z);
    if spread > T::lit(SPLIT_RATIO) * r {
        let hi = recurse(&nodes[1..], z);
        let lo = recurse(&nodes[..n - 1], z);
        return hi.sub_div(lo, spread);
    }
    let radius = (spread / T::lit(SPLIT_RATIO)).max(r.min(center.abs().max(T::one())));
    contour(nodes, center, radius, z)
}

fn contour<T: Real>(nodes: &[T], center: T, radius: T, z: T) -> Kernels<T> {
    let mut acc_f = [Complex::new(T::zero(), T::zero()); 3];
    let mut acc_g = acc_f;
    let step = T::TAU() / T::count(CONTOUR_POINTS);
    for j in 0..CONTOUR_POINTS {
        let th = step * (T::count(j) + T::lit(0.5));
        let e = Complex::new(th.cos(), th.sin()) * radius;
        let x = e + center;
        let mut denom = Complex::new(T::one(), T::zero());
        for &xi in nodes {
            denom *= x - xi;
        }
        let w = e / denom;
        let (f, g) = base_complex(x, z);
        let mut p = w;
        for k in 0..3 {
            acc_f[k] += f * p;
            acc_g[k] += g * p;
            p *= x;
        }
    }
    let nf = T::count(CONTOUR_POINTS);
    Kernels {
        f: [acc_f[0].re / nf, acc_f[1].re / nf, acc_f[2].re / nf],
        g: [acc_g[0].re / nf, acc_g[1].re / nf, acc_g[2].re / nf],
    }
}
