//! Quadrature rules, scalar root/minimum search, and a small null-space
//! solver.

use crate::scalar::Real;

/// Gauss–Legendre rule mapped to [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Quadrature<T> {
    /// `n`-point rule on [0, 1], nodes ascending.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let one = T::one();
        let two = T::lit(2.0);
        let nf = T::count(n);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (T::PI() * (T::count(i) + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
            let mut dp = one;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= T::epsilon() * T::lit(4.0) {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != T::zero() {
                dp = d;
            }
            let w = two / ((one - x * x) * dp * dp);
            // x_i descends from near +1; store mapped nodes ascending.
            nodes[n - 1 - i] = (one + x) / two;
            nodes[i] = (one - x) / two;
            weights[n - 1 - i] = w / two;
            weights[i] = w / two;
        }
        Quadrature { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of sampled values.
    pub fn integrate(&self, values: &[T]) -> T {
        self.weights.iter().zip(values).map(|(&w, &v)| w * v).sum()
    }
}

fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::count(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let nf = T::count(n);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// `n` Chebyshev–Lobatto points on [0, 1], endpoints included.
pub fn chebyshev_points<T: Real>(n: usize) -> Vec<T> {
    assert!(n >= 2);
    let last = T::count(n - 1);
    (0..n)
        .map(|j| (T::one() - (T::PI() * T::count(j) / last).cos()) / T::lit(2.0))
        .collect()
}

/// Bisection on a bracket with `f(a)` and `f(b)` of opposite sign.
pub fn bisect<T: Real, F: FnMut(T) -> T>(mut f: F, mut a: T, mut b: T, tol: T) -> T {
    let mut fa = f(a);
    if fa == T::zero() {
        return a;
    }
    for _ in 0..400 {
        let m = (a + b) / T::lit(2.0);
        if (b - a).abs() <= tol || m == a || m == b {
            return m;
        }
        let fm = f(m);
        if fm == T::zero() {
            return m;
        }
        if (fm < T::zero()) == (fa < T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    (a + b) / T::lit(2.0)
}

/// Golden-section minimum of a unimodal function on [a, b]. Stops at `tol`
/// or a few ulps of the bracket, whichever is wider.
pub fn golden_min<T: Real, F: FnMut(T) -> T>(mut f: F, mut a: T, mut b: T, tol: T) -> (T, T) {
    let g = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..400 {
        if (b - a).abs() <= tol.max(T::lit(4.0) * T::epsilon() * (a.abs() + b.abs())) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / T::lit(2.0);
    (x, f(x))
}

/// Null vector of a square matrix of rank n−1 by Gaussian elimination with
/// full pivoting after row and column equilibration.
///
/// Returns the unit vector and the ratio of the last pivot to the one before
/// it; a ratio near one means the matrix is not numerically singular, a
/// ratio near zero that the null space is well defined.
pub fn null_vector<T: Real>(mut m: Vec<Vec<T>>) -> Option<(Vec<T>, T)> {
    let n = m.len();
    if n < 2 || m.iter().any(|r| r.len() != n) {
        return None;
    }
    for row in m.iter_mut() {
        let s = row.iter().fold(T::zero(), |a, x| a.max(x.abs()));
        if s > T::zero() {
            row.iter_mut().for_each(|x| *x = *x / s);
        }
    }
    let mut cs = vec![T::one(); n];
    for (j, c) in cs.iter_mut().enumerate() {
        let s = m.iter().fold(T::zero(), |a, r| a.max(r[j].abs()));
        if s > T::zero() {
            *c = s;
            m.iter_mut().for_each(|r| r[j] = r[j] / s);
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pivots = vec![T::zero(); n];
    for k in 0..n {
        let (mut bi, mut bj, mut best) = (k, k, -T::one());
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, x) in row.iter().enumerate().skip(k) {
                if x.abs() > best {
                    (bi, bj, best) = (i, j, x.abs());
                }
            }
        }
        m.swap(k, bi);
        for r in m.iter_mut() {
            r.swap(k, bj);
        }
        perm.swap(k, bj);
        pivots[k] = m[k][k];
        if k + 1 == n || pivots[k] == T::zero() {
            continue;
        }
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            if f != T::zero() {
                for j in k..n {
                    let v = m[k][j];
                    m[i][j] -= f * v;
                }
            }
        }
    }
    if pivots[n - 2] == T::zero() {
        return None;
    }
    let mut x = vec![T::zero(); n];
    x[n - 1] = T::one();
    for k in (0..n - 1).rev() {
        let mut acc = T::zero();
        for j in k + 1..n {
            acc += m[k][j] * x[j];
        }
        x[k] = -acc / m[k][k];
    }
    let mut out = vec![T::zero(); n];
    for (k, &p) in perm.iter().enumerate() {
        out[p] = x[k] / cs[p];
    }
    let norm = out.iter().fold(T::zero(), |a, v| a + *v * *v).sqrt();
    if !(norm > T::zero() && norm.is_finite()) {
        return None;
    }
    out.iter_mut().for_each(|v| *v = *v / norm);
    Some((out, (pivots[n - 1] / pivots[n - 2]).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let q = Quadrature::<f64>::gauss_legendre(8);
        for p in 0..16 {
            let vals: Vec<f64> = q.nodes.iter().map(|z| z.powi(p)).collect();
            let exact = 1.0 / (p as f64 + 1.0);
            assert!((q.integrate(&vals) - exact).abs() < 1e-14, "degree {p}");
        }
    }

    #[test]
    fn nodes_ascend_and_weights_sum() {
        for n in [1, 2, 5, 64, 128] {
            let q = Quadrature::<f64>::gauss_legendre(n);
            assert!(q.nodes.windows(2).all(|w| w[0] < w[1]));
            let s: f64 = q.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn single_precision_rule() {
        let q = Quadrature::<f32>::gauss_legendre(16);
        let vals: Vec<f32> = q.nodes.iter().map(|z| z.sin()).collect();
        assert!((q.integrate(&vals) - (1.0 - 1f32.cos())).abs() < 1e-6);
    }

    #[test]
    fn bisect_and_golden() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        let (x, _) = golden_min(|x: f64| (x - 0.3).powi(2), -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn null_vector_of_rank_deficient_matrix() {
        // third row = row0 + 2 row1, badly scaled columns
        let m = vec![
            vec![1.0f64, 2e6, -3.0],
            vec![0.5, -1e6, 4.0],
            vec![2.0, 0.0, 5.0],
        ];
        let (v, ratio) = null_vector(m.clone()).unwrap();
        for r in &m {
            let s: f64 = r.iter().zip(&v).map(|(a, b)| a * b).sum();
            let scale: f64 = r.iter().zip(&v).map(|(a, b)| (a * b).abs()).sum();
            assert!(s.abs() < 1e-14 * scale);
        }
        assert!(ratio < 1e-14);
    }
}
