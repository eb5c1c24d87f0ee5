//! Truncated amplitude equations and their phase portraits.
//!
//! Single mode: dy/dt = β y + c y³.
//! Hex pair:    dy_I/dt = β y_I + a₁ y_I y_J + y_I (a₂ y_I² + a₃ y_J²),
//!              dy_J/dt = β y_J + b₁ y_I² + y_J (b₂ y_J² + b₃ y_I²).

use rayon::prelude::*;
use serde::Serialize;

use crate::center_manifold::Reduced;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const IDENTITY_LIMIT: f64 = 1e-8;
pub const STEP_TOLERANCE: f64 = 1e-10;
pub const ESCAPE_RADIUS: f64 = 1e6;
pub const RESIDUAL_LIMIT: f64 = 1e-10;
pub const HETEROCLINIC_OFFSET: f64 = 1e-6;
pub const HETEROCLINIC_BALL: f64 = 1e-4;
pub const BASIN_PROBE_RADIUS: f64 = 0.1;
pub const RAY_EXCLUSION: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HexCoefficients<T> {
    pub a1: T,
    pub a2: T,
    pub a3: T,
    pub b1: T,
    pub b2: T,
    pub b3: T,
}

impl<T: Real> HexCoefficients<T> {
    /// Reads the six coefficients from a two-mode table (I first, J second).
    pub fn from_reduced(r: &Reduced<T>) -> Result<Self> {
        if r.n != 2 {
            return Err(Error::Shape(format!("hex coefficients need two critical modes, got {}", r.n)));
        }
        Ok(HexCoefficients {
            a1: r.q(0, 1, 0) + r.q(0, 0, 1),
            b1: r.q(1, 0, 0),
            a2: r.c(0, 0, 0, 0),
            a3: r.c(0, 0, 1, 1) + r.c(0, 1, 0, 1) + r.c(0, 1, 1, 0),
            b2: r.c(1, 1, 1, 1),
            b3: r.c(1, 1, 0, 0) + r.c(1, 0, 1, 0) + r.c(1, 0, 0, 1),
        })
    }

    /// max(|a₁|, |b₂|, 1)
    pub fn scale(&self) -> T {
        self.a1.abs().max(self.b2.abs()).max(T::one())
    }

    /// |a₁ − 4b₁|, |a₃ − 2b₃|, |4a₂ − a₃ − b₂|.
    pub fn identity_residuals(&self) -> [T; 3] {
        let four = T::lit(4.0);
        [
            (self.a1 - four * self.b1).abs(),
            (self.a3 - T::lit(2.0) * self.b3).abs(),
            (four * self.a2 - self.a3 - self.b2).abs(),
        ]
    }

    pub fn check_identities(&self) -> Result<()> {
        let limit = T::lit(IDENTITY_LIMIT) * self.scale();
        for (name, r) in ["a1 - 4 b1", "a3 - 2 b3", "4 a2 - a3 - b2"]
            .iter()
            .zip(self.identity_residuals())
        {
            if !(r < limit) {
                return Err(Error::IdentityViolation {
                    name: name.to_string(),
                    value: r.to_f64_lossy(),
                    limit: limit.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SystemKind<T> {
    SingleMode { c: T },
    Hex(HexCoefficients<T>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedSystem<T> {
    pub kind: SystemKind<T>,
    pub beta: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue<T> {
    pub re: T,
    pub im: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    Attractor,
    Repeller,
    Saddle,
    Degenerate,
}

impl<T: Real> ReducedSystem<T> {
    pub fn single(beta: T, c: T) -> Self {
        ReducedSystem {
            kind: SystemKind::SingleMode { c },
            beta,
        }
    }

    /// Hex system; the coefficient identities must hold.
    pub fn hex(beta: T, coeffs: HexCoefficients<T>) -> Result<Self> {
        coeffs.check_identities()?;
        Ok(ReducedSystem {
            kind: SystemKind::Hex(coeffs),
            beta,
        })
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            SystemKind::SingleMode { .. } => 1,
            SystemKind::Hex(_) => 2,
        }
    }

    pub fn rhs(&self, y: [T; 2]) -> [T; 2] {
        let b = self.beta;
        match self.kind {
            SystemKind::SingleMode { c } => [b * y[0] + c * y[0] * y[0] * y[0], T::zero()],
            SystemKind::Hex(h) => {
                let (i, j) = (y[0], y[1]);
                [
                    b * i + h.a1 * i * j + i * (h.a2 * i * i + h.a3 * j * j),
                    b * j + h.b1 * i * i + j * (h.b2 * j * j + h.b3 * i * i),
                ]
            }
        }
    }

    pub fn jacobian(&self, y: [T; 2]) -> [[T; 2]; 2] {
        let b = self.beta;
        let three = T::lit(3.0);
        let two = T::lit(2.0);
        match self.kind {
            SystemKind::SingleMode { c } => [[b + three * c * y[0] * y[0], T::zero()], [T::zero(), T::zero()]],
            SystemKind::Hex(h) => {
                let (i, j) = (y[0], y[1]);
                [
                    [
                        b + h.a1 * j + three * h.a2 * i * i + h.a3 * j * j,
                        h.a1 * i + two * h.a3 * i * j,
                    ],
                    [
                        two * h.b1 * i + two * h.b3 * i * j,
                        b + three * h.b2 * j * j + h.b3 * i * i,
                    ],
                ]
            }
        }
    }

    /// Jacobian eigenvalues (one for the single-mode system).
    pub fn eigenvalues(&self, y: [T; 2]) -> Vec<Eigenvalue<T>> {
        let m = self.jacobian(y);
        if self.dim() == 1 {
            return vec![Eigenvalue {
                re: m[0][0],
                im: T::zero(),
            }];
        }
        let half = T::lit(0.5);
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let disc = tr * tr * T::lit(0.25) - det;
        if disc >= T::zero() {
            let s = disc.sqrt();
            // larger first; the smaller via det/larger avoids cancellation
            let l1 = if tr >= T::zero() { tr * half + s } else { tr * half - s };
            let l2 = if l1 != T::zero() { det / l1 } else { T::zero() };
            let (hi, lo) = if l1 >= l2 { (l1, l2) } else { (l2, l1) };
            vec![Eigenvalue { re: hi, im: T::zero() }, Eigenvalue { re: lo, im: T::zero() }]
        } else {
            let s = (-disc).sqrt();
            vec![
                Eigenvalue { re: tr * half, im: s },
                Eigenvalue { re: tr * half, im: -s },
            ]
        }
    }

    pub fn classify(&self, y: [T; 2]) -> Stability {
        let ev = self.eigenvalues(y);
        let tol = T::lit(1e-12) * self.beta.abs().max(T::lit(1e-300));
        if ev.iter().any(|e| e.re.abs() <= tol) {
            Stability::Degenerate
        } else if ev.iter().all(|e| e.re < T::zero()) {
            Stability::Attractor
        } else if ev.iter().all(|e| e.re > T::zero()) {
            Stability::Repeller
        } else {
            Stability::Saddle
        }
    }

    fn norm(y: [T; 2]) -> T {
        (y[0] * y[0] + y[1] * y[1]).sqrt()
    }

    fn rk4(&self, y: [T; 2], h: T) -> [T; 2] {
        let add = |a: [T; 2], b: [T; 2], s: T| [a[0] + s * b[0], a[1] + s * b[1]];
        let half = h * T::lit(0.5);
        let k1 = self.rhs(y);
        let k2 = self.rhs(add(y, k1, half));
        let k3 = self.rhs(add(y, k2, half));
        let k4 = self.rhs(add(y, k3, h));
        let six = T::lit(6.0);
        [
            y[0] + h / six * (k1[0] + T::lit(2.0) * (k2[0] + k3[0]) + k4[0]),
            y[1] + h / six * (k1[1] + T::lit(2.0) * (k2[1] + k3[1]) + k4[1]),
        ]
    }

    /// Advances by exactly `span` with step doubling; `h` carries the step
    /// size between calls. Returns None on step-size collapse.
    fn advance(&self, mut y: [T; 2], span: T, h: &mut T) -> Option<[T; 2]> {
        let tol = T::lit(STEP_TOLERANCE);
        let mut left = span;
        let mut guard = 0usize;
        while left > T::zero() {
            guard += 1;
            if guard > 1_000_000 {
                return None;
            }
            let step = h.min(left);
            let full = self.rk4(y, step);
            let halfway = self.rk4(y, step * T::lit(0.5));
            let two = self.rk4(halfway, step * T::lit(0.5));
            let err = Self::norm([two[0] - full[0], two[1] - full[1]]) / T::lit(15.0);
            let bound = tol * T::one().max(Self::norm(y));
            if err <= bound || step < T::lit(1e-14) * span.max(T::one()) {
                if !(two[0].is_finite() && two[1].is_finite()) {
                    return Some(two);
                }
                y = two;
                left -= step;
                let grow = if err == T::zero() {
                    T::lit(2.0)
                } else {
                    (T::lit(0.9) * (bound / err).powf(T::lit(0.2))).min(T::lit(2.0))
                };
                *h = step * grow.max(T::one());
            } else {
                *h = step * T::lit(0.5).max(T::lit(0.9) * (bound / err).powf(T::lit(0.2)));
            }
        }
        Some(y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory<T> {
    pub t: Vec<T>,
    pub y: Vec<[T; 2]>,
    /// |y| passed the escape radius; the samples stop there.
    pub escaped: bool,
}

/// RK4 with step-doubling error control (local tolerance 1e-10), sampled
/// every `dt` up to `duration`.
pub fn integrate<T: Real>(system: &ReducedSystem<T>, y0: [T; 2], duration: T, dt: T) -> Result<Trajectory<T>> {
    if !(dt > T::zero()) || !(duration >= T::zero()) {
        return Err(Error::InvalidInput(format!("need dt > 0 and duration >= 0 (got {dt}, {duration})")));
    }
    let mut out = Trajectory {
        t: vec![T::zero()],
        y: vec![y0],
        escaped: false,
    };
    let mut y = y0;
    let mut h = dt;
    let steps = (duration / dt).ceil().to_usize().unwrap_or(0);
    for n in 1..=steps {
        let t = (T::count(n) * dt).min(duration);
        let span = t - out.t[out.t.len() - 1];
        y = system
            .advance(y, span, &mut h)
            .ok_or_else(|| Error::Numerical("step size collapsed".into()))?;
        let big = !(y[0].is_finite() && y[1].is_finite()) || ReducedSystem::norm(y) > T::lit(ESCAPE_RADIUS);
        out.t.push(t);
        out.y.push(y);
        if big {
            out.escaped = true;
            break;
        }
    }
    Ok(out)
}

/// Slopes k of the invariant lines y_I = k·y_J. The quadratic and cubic
/// parts must agree on k² = a₁/b₁ = (b₂ − a₃)/(a₂ − b₃).
pub fn straight_line_orbits<T: Real>(system: &ReducedSystem<T>) -> Result<Vec<T>> {
    let h = match system.kind {
        SystemKind::Hex(h) => h,
        SystemKind::SingleMode { .. } => {
            return Err(Error::Shape("straight-line orbits need the hex system".into()))
        }
    };
    h.check_identities()?;
    let quad = h.a1 / h.b1;
    let cubic = (h.b2 - h.a3) / (h.a2 - h.b3);
    if !(quad > T::zero()) || (quad - cubic).abs() > T::lit(IDENTITY_LIMIT) * quad.abs().max(T::one()) {
        return Err(Error::IdentityViolation {
            name: "invariant-line slope".into(),
            value: (quad - cubic).abs().to_f64_lossy(),
            limit: IDENTITY_LIMIT,
        });
    }
    let k = quad.sqrt();
    Ok(vec![-k, T::zero(), k])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyState<T> {
    pub label: String,
    pub location: [T; 2],
    pub residual: T,
    pub eigenvalues: Vec<Eigenvalue<T>>,
    pub stability: Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Connection {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BasinLabel {
    State(String),
    Departed,
    Undetermined,
}

impl std::fmt::Display for BasinLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BasinLabel::State(s) => f.write_str(s),
            BasinLabel::Departed => f.write_str("departed"),
            BasinLabel::Undetermined => f.write_str("undetermined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasinSample<T> {
    pub y0: [T; 2],
    pub label: BasinLabel,
}

/// Seed-grid dichotomy: inside the attracting sector every orbit ends on
/// the bifurcated arc, outside every orbit leaves the departure ball.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dichotomy {
    pub inside: usize,
    pub inside_on_arc: usize,
    pub outside: usize,
    pub outside_departed: usize,
    pub excluded: usize,
}

impl Dichotomy {
    pub fn holds(&self) -> bool {
        self.inside == self.inside_on_arc && self.outside == self.outside_departed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasePortrait<T> {
    pub beta: T,
    /// Steady states within the window radius.
    pub steady_states: Vec<SteadyState<T>>,
    /// Steady states of the truncated polynomial beyond the window (not
    /// part of the small-amplitude picture).
    pub far_field: Vec<SteadyState<T>>,
    pub window_radius: T,
    pub departure_radius: T,
    pub connections: Vec<Connection>,
    pub basin_samples: Vec<BasinSample<T>>,
    /// Measured half-opening of the attracting sector below each H ray
    /// (angle from the y_I axis), left and right.
    pub basin_angle: Option<[T; 2]>,
    pub dichotomy: Option<Dichotomy>,
    pub newton_failures: usize,
}

struct Context<'a, T> {
    sys: &'a ReducedSystem<T>,
    states: &'a [SteadyState<T>],
    departure: T,
    capture: T,
    horizon: T,
}

impl<T: Real> Context<'_, T> {
    /// Follows an orbit until it settles on a known state or leaves the
    /// departure ball.
    fn fate(&self, y0: [T; 2]) -> BasinLabel {
        let stride = T::one() / self.sys.beta.abs().max(T::lit(1e-12)) * T::lit(0.05);
        let mut y = y0;
        let mut h = stride;
        let mut t = T::zero();
        while t < self.horizon {
            match self.sys.advance(y, stride, &mut h) {
                Some(v) => y = v,
                None => return BasinLabel::Undetermined,
            }
            t += stride;
            if !(y[0].is_finite() && y[1].is_finite()) || ReducedSystem::norm(y) > self.departure {
                return BasinLabel::Departed;
            }
            for s in self.states {
                let d = ReducedSystem::norm([y[0] - s.location[0], y[1] - s.location[1]]);
                if d < self.capture && s.stability == Stability::Attractor {
                    return BasinLabel::State(s.label.clone());
                }
            }
        }
        // Slow approach to a saddle along its stable manifold.
        for s in self.states {
            let d = ReducedSystem::norm([y[0] - s.location[0], y[1] - s.location[1]]);
            if d < self.capture {
                return BasinLabel::State(s.label.clone());
            }
        }
        BasinLabel::Undetermined
    }
}

fn newton<T: Real>(sys: &ReducedSystem<T>, mut y: [T; 2]) -> Option<[T; 2]> {
    for _ in 0..200 {
        let f = sys.rhs(y);
        let m = sys.jacobian(y);
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        let dx = (f[0] * m[1][1] - f[1] * m[0][1]) / det;
        let dy = (m[0][0] * f[1] - m[1][0] * f[0]) / det;
        y = [y[0] - dx, y[1] - dy];
        if !(y[0].is_finite() && y[1].is_finite()) {
            return None;
        }
        let scale = T::one().max(ReducedSystem::<T>::norm(y));
        if (dx * dx + dy * dy).sqrt() <= T::lit(4.0) * T::epsilon() * scale {
            break;
        }
    }
    let r = sys.rhs(y);
    if ReducedSystem::<T>::norm(r) < T::lit(RESIDUAL_LIMIT) {
        Some(y)
    } else {
        None
    }
}

/// Leading-order roll and hexagon states: ±R = ±(0, √(β/−b₂)),
/// H_i = (β/a₁)(2(−1)^i, −1).
pub fn leading_states<T: Real>(h: &HexCoefficients<T>, beta: T) -> Vec<(String, [T; 2])> {
    let mut out = Vec::new();
    let r2 = -beta / h.b2;
    if r2 > T::zero() {
        let r = r2.sqrt();
        out.push(("+R".to_string(), [T::zero(), r]));
        out.push(("-R".to_string(), [T::zero(), -r]));
    }
    let s = beta / h.a1;
    out.push(("H1".to_string(), [-T::lit(2.0) * s, -s]));
    out.push(("H2".to_string(), [T::lit(2.0) * s, -s]));
    out
}

/// Steady states, heteroclinic connections and basins of the hex system.
pub fn portrait<T: Real>(system: &ReducedSystem<T>, grid: usize) -> Result<PhasePortrait<T>> {
    let h = match system.kind {
        SystemKind::Hex(h) => h,
        SystemKind::SingleMode { .. } => return Err(Error::Shape("portrait needs the hex system".into())),
    };
    let beta = system.beta;
    if beta == T::zero() {
        return Err(Error::InvalidInput("portrait needs beta != 0".into()));
    }
    let two = T::lit(2.0);
    let r_amp = (beta.abs() / h.b2.abs()).sqrt();
    let h_amp = T::lit(5.0).sqrt() * beta.abs() / h.a1.abs();
    let window = two * r_amp.max(h_amp);

    // Newton from the invariant rays and a dense grid.
    let slopes = straight_line_orbits(system)?;
    let mut seeds: Vec<[T; 2]> = Vec::new();
    let ray_r = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0, 4.0];
    for &k in &slopes {
        let d = ReducedSystem::norm([k, T::one()]);
        for &r in &ray_r {
            for sgn in [T::one(), -T::one()] {
                let t = sgn * T::lit(r) * window / d;
                seeds.push([k * t, t]);
            }
        }
    }
    let g = grid.clamp(2, 400);
    for a in 0..g {
        for b in 0..g {
            let x = (T::count(2 * a + 1) / T::count(g) - T::one()) * T::lit(3.0) * window;
            let y = (T::count(2 * b + 1) / T::count(g) - T::one()) * T::lit(3.0) * window;
            seeds.push([x, y]);
        }
    }
    seeds.push([T::zero(), T::zero()]);
    let found: Vec<Option<[T; 2]>> = seeds.par_iter().map(|&s| newton(system, s)).collect();
    let newton_failures = found.iter().filter(|f| f.is_none()).count();
    let mut roots: Vec<[T; 2]> = Vec::new();
    let merge = T::lit(1e-8) * window.max(T::one());
    for y in found.into_iter().flatten() {
        if !roots
            .iter()
            .any(|r| ReducedSystem::norm([r[0] - y[0], r[1] - y[1]]) < merge)
        {
            roots.push(y);
        }
    }
    roots.sort_by(|a, b| {
        ReducedSystem::norm(*a)
            .partial_cmp(&ReducedSystem::norm(*b))
            .expect("finite")
            .then(a[0].partial_cmp(&b[0]).expect("finite"))
    });

    let predictions = leading_states(&h, beta);
    let mut steady_states = Vec::new();
    let mut far_field = Vec::new();
    for (n, y) in roots.iter().enumerate() {
        let norm = ReducedSystem::norm(*y);
        let label = if norm <= merge {
            "O".to_string()
        } else {
            predictions
                .iter()
                .filter(|(_, p)| {
                    ReducedSystem::norm([p[0] - y[0], p[1] - y[1]]) < T::lit(0.5) * ReducedSystem::norm(*p)
                })
                .map(|(l, _)| l.clone())
                .next()
                .unwrap_or_else(|| format!("S{n}"))
        };
        let state = SteadyState {
            label,
            location: *y,
            residual: ReducedSystem::norm(system.rhs(*y)),
            eigenvalues: system.eigenvalues(*y),
            stability: system.classify(*y),
        };
        if norm <= window {
            steady_states.push(state);
        } else {
            far_field.push(state);
        }
    }

    let departure = two * r_amp.max(h_amp);
    let arc_scale = steady_states
        .iter()
        .map(|s| ReducedSystem::norm(s.location))
        .fold(T::zero(), T::max)
        .max(T::lit(1e-300));
    let ctx = Context {
        sys: system,
        states: &steady_states,
        departure,
        capture: T::lit(1e-3) * arc_scale,
        horizon: T::lit(400.0) / beta.abs(),
    };

    // Heteroclinics from the unstable directions of each saddle.
    let mut connections = Vec::new();
    for s in steady_states.iter().filter(|s| s.stability == Stability::Saddle) {
        let m = system.jacobian(s.location);
        let lam = s.eigenvalues.iter().map(|e| e.re).fold(T::neg_infinity(), T::max);
        // (m − λ)v = 0
        let v = if (m[0][1]).abs() + (m[0][0] - lam).abs() > (m[1][0]).abs() + (m[1][1] - lam).abs() {
            [m[0][1], lam - m[0][0]]
        } else {
            [lam - m[1][1], m[1][0]]
        };
        let vn = ReducedSystem::norm(v);
        for sgn in [T::one(), -T::one()] {
            let off = sgn * T::lit(HETEROCLINIC_OFFSET) / vn;
            let y0 = [s.location[0] + off * v[0], s.location[1] + off * v[1]];
            if let Some(to) = connect(system, y0, &steady_states, &s.label, departure) {
                connections.push(Connection {
                    from: s.label.clone(),
                    to,
                });
            }
        }
    }

    // Basin samples on a cell-centred grid over the departure square.
    let half = r_amp.max(h_amp);
    let n = grid.clamp(2, 400);
    let pts: Vec<[T; 2]> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| {
            let x = (T::count(2 * a + 1) / T::count(n) - T::one()) * half;
            let y = (T::count(2 * b + 1) / T::count(n) - T::one()) * half;
            [x, y]
        })
        .collect();
    let labels: Vec<BasinLabel> = pts.par_iter().map(|&p| ctx.fate(p)).collect();
    let basin_samples: Vec<BasinSample<T>> = pts
        .iter()
        .zip(labels)
        .map(|(p, label)| BasinSample { y0: *p, label })
        .collect();

    let attracting_sector = h.b2 < T::zero() && beta > T::zero();
    let (basin_angle, dichotomy) = if attracting_sector {
        (Some(basin_angle(&ctx, &h)), Some(dichotomy(&h, &basin_samples)))
    } else {
        (None, None)
    };

    Ok(PhasePortrait {
        beta,
        steady_states,
        far_field,
        window_radius: window,
        departure_radius: departure,
        connections,
        basin_samples,
        basin_angle,
        dichotomy,
        newton_failures,
    })
}

fn connect<T: Real>(
    sys: &ReducedSystem<T>,
    mut y: [T; 2],
    states: &[SteadyState<T>],
    from: &str,
    departure: T,
) -> Option<String> {
    let stride = T::lit(0.05) / sys.beta.abs();
    let mut h = stride;
    let horizon = T::lit(2000.0) / sys.beta.abs();
    let mut t = T::zero();
    let mut left_start = false;
    while t < horizon {
        y = sys.advance(y, stride, &mut h)?;
        t += stride;
        if !(y[0].is_finite() && y[1].is_finite()) || ReducedSystem::norm(y) > departure {
            return None;
        }
        for s in states {
            let d = ReducedSystem::norm([y[0] - s.location[0], y[1] - s.location[1]]);
            if s.label == from {
                if d > T::lit(10.0) * T::lit(HETEROCLINIC_BALL) {
                    left_start = true;
                }
                continue;
            }
            if d < T::lit(HETEROCLINIC_BALL) && left_start {
                return Some(s.label.clone());
            }
        }
    }
    None
}

/// Mirror for a₁ < 0: the picture flips about the y_I axis (y_J → −y_J).
fn orientation<T: Real>(h: &HexCoefficients<T>) -> T {
    if h.a1 < T::zero() {
        -T::one()
    } else {
        T::one()
    }
}

/// ω-limit on the bifurcated arc {−R, H₁, H₂}.
fn on_arc(label: &BasinLabel) -> bool {
    matches!(label, BasinLabel::State(s) if s == "-R" || s == "H1" || s == "H2")
}

/// Bisection in angle at radius 0.1 between the sector centre and the
/// y_I axis, on both sides.
fn basin_angle<T: Real>(ctx: &Context<'_, T>, h: &HexCoefficients<T>) -> [T; 2] {
    let o = orientation(h);
    let r = T::lit(BASIN_PROBE_RADIUS).min(T::lit(0.5) * ctx.departure);
    let inside = |phi: T| on_arc(&ctx.fate([r * phi.cos(), o * r * phi.sin()]));
    let pi = T::PI();
    let centre = T::lit(1.5) * pi;
    let mut out = [T::zero(); 2];
    for (n, edge) in [pi, T::lit(2.0) * pi].into_iter().enumerate() {
        let (mut a, mut b) = (centre, edge);
        for _ in 0..30 {
            let m = (a + b) * T::lit(0.5);
            if inside(m) {
                a = m;
            } else {
                b = m;
            }
        }
        let phi = (a + b) * T::lit(0.5);
        out[n] = (phi - edge).abs();
    }
    out
}

fn dichotomy<T: Real>(h: &HexCoefficients<T>, samples: &[BasinSample<T>]) -> Dichotomy {
    let o = orientation(h);
    let theta = T::lit(0.5).atan();
    let pi = T::PI();
    let (lo, hi) = (pi + theta, T::lit(2.0) * pi - theta);
    let mut d = Dichotomy {
        inside: 0,
        inside_on_arc: 0,
        outside: 0,
        outside_departed: 0,
        excluded: 0,
    };
    for s in samples {
        let (x, y) = (s.y0[0], o * s.y0[1]);
        let mut phi = y.atan2(x);
        if phi < T::zero() {
            phi += T::lit(2.0) * pi;
        }
        // The H rays bound the sector; the positive y_J axis (stable
        // manifold of +R) also separates fates.
        let near = [lo, hi, T::lit(0.5) * pi]
            .iter()
            .any(|&b| (phi - b).abs() < T::lit(RAY_EXCLUSION));
        if near {
            d.excluded += 1;
            continue;
        }
        if phi > lo && phi < hi {
            d.inside += 1;
            if on_arc(&s.label) {
                d.inside_on_arc += 1;
            }
        } else {
            d.outside += 1;
            if s.label == BasinLabel::Departed {
                d.outside_departed += 1;
            }
        }
    }
    d
}
