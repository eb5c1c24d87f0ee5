//! Pairings and quadratic interaction coefficients over the box.
//!
//! Every field component is a vertical profile times a product of one trig
//! factor in x and one in y. Horizontal integrals are resolved exactly from
//! the wave indices (selection rules give literal zeros); vertical integrals
//! use Gauss-Legendre quadrature on [0,1].

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::eigenfunctions::EigenPair;
use crate::error::{Error, Result};
use crate::geometry::{BoxGeometry, ModeIndex, Wave};
use crate::numerics::Quadrature;
use crate::scalar::Real;

pub const DEFAULT_QUAD_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Sin,
    Cos,
}

impl Trig {
    fn flip(self) -> Self {
        match self {
            Trig::Sin => Trig::Cos,
            Trig::Cos => Trig::Sin,
        }
    }
}

/// ∫₀ᴸ Π trig_i(π n_i x / L) dx for three factors.
///
/// Expands each factor into exponentials; only combinations with
/// Σ σ_i n_i = 0 survive when the number of sines is even, so the result is
/// an exact multiple of L/4 (or zero).
pub fn trig_integral<T: Real>(kinds: [Trig; 3], n: [u32; 3], len: T) -> T {
    let sines = kinds.iter().filter(|&&k| k == Trig::Sin).count();
    let mut even = 0i64;
    let mut odd = T::zero();
    for mask in 0..8u32 {
        let sigma = |i: usize| if mask >> i & 1 == 0 { 1i64 } else { -1i64 };
        let m: i64 = (0..3).map(|i| sigma(i) * n[i] as i64).sum();
        let sign: i64 = (0..3)
            .filter(|&i| kinds[i] == Trig::Sin)
            .map(sigma)
            .product();
        if sines % 2 == 0 {
            if m == 0 {
                even += sign;
            }
        } else if m % 2 != 0 {
            // i^{-k}·(−2L/(iπm)) with k odd
            let phase = if (sines + 1) / 2 % 2 == 0 { -1.0 } else { 1.0 };
            odd += T::lit(phase * 2.0 * sign as f64) / (T::PI() * T::lit(m as f64));
        }
    }
    if sines % 2 == 0 {
        let phase = if sines / 2 % 2 == 0 { 1 } else { -1 };
        T::lit((phase * even) as f64) * len / T::lit(8.0)
    } else {
        odd * len / T::lit(8.0)
    }
}

/// Horizontal wave indices reachable from the critical set by one quadratic
/// interaction: {(|Ix ± Jx|, |Iy ± Jy|)}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InteractionSet {
    pub members: BTreeSet<Wave>,
}

impl InteractionSet {
    pub fn new(critical: &[Wave]) -> Self {
        let mut members = BTreeSet::new();
        for a in critical {
            for b in critical {
                for sx in [1i64, -1] {
                    for sy in [1i64, -1] {
                        members.insert(Wave::from_signed(
                            a.ix as i64 + sx * b.ix as i64,
                            a.iy as i64 + sy * b.iy as i64,
                        ));
                    }
                }
            }
        }
        InteractionSet { members }
    }

    /// Waves reachable from the single pair (a, b).
    pub fn pair(a: Wave, b: Wave) -> BTreeSet<Wave> {
        let mut out = BTreeSet::new();
        for sx in [1i64, -1] {
            for sy in [1i64, -1] {
                out.insert(Wave::from_signed(
                    a.ix as i64 + sx * b.ix as i64,
                    a.iy as i64 + sy * b.iy as i64,
                ));
            }
        }
        out
    }

    pub fn contains(&self, w: Wave) -> bool {
        self.members.contains(&w)
    }
}

/// A mode sampled at the quadrature nodes, with its adjoint.
#[derive(Debug, Clone)]
pub struct ModeData<T> {
    pub index: ModeIndex,
    pub beta: T,
    kx: T,
    ky: T,
    a2: T,
    velocity: bool,
    /// w, dw, d2w, θ, dθ
    primal: Vec<[T; 5]>,
    /// w*, dw*, θ*
    adjoint: Vec<[T; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Comp {
    U,
    V,
    W,
    Theta,
}

const COMPS: [Comp; 4] = [Comp::U, Comp::V, Comp::W, Comp::Theta];

impl<T: Real> ModeData<T> {
    fn kinds(c: Comp) -> [Trig; 2] {
        match c {
            Comp::U => [Trig::Sin, Trig::Cos],
            Comp::V => [Trig::Cos, Trig::Sin],
            Comp::W | Comp::Theta => [Trig::Cos, Trig::Cos],
        }
    }

    fn exists(&self, c: Comp) -> bool {
        match c {
            Comp::U => self.velocity && self.kx != T::zero(),
            Comp::V => self.velocity && self.ky != T::zero(),
            Comp::W => self.velocity,
            Comp::Theta => true,
        }
    }

    /// (value, z-derivative) of the primal component at node `q`.
    fn primal_at(&self, c: Comp, q: usize) -> (T, T) {
        let s = &self.primal[q];
        match c {
            Comp::U => {
                let f = -self.kx / self.a2;
                (f * s[1], f * s[2])
            }
            Comp::V => {
                let f = -self.ky / self.a2;
                (f * s[1], f * s[2])
            }
            Comp::W => (s[0], s[1]),
            Comp::Theta => (s[3], s[4]),
        }
    }

    fn adjoint_at(&self, c: Comp, q: usize) -> T {
        let s = &self.adjoint[q];
        match c {
            Comp::U => -self.kx / self.a2 * s[1],
            Comp::V => -self.ky / self.a2 * s[1],
            Comp::W => s[0],
            Comp::Theta => s[2],
        }
    }

    fn wave_n(&self, axis: usize) -> u32 {
        if axis == 0 {
            self.index.wave.ix
        } else {
            self.index.wave.iy
        }
    }

    fn k(&self, axis: usize) -> T {
        if axis == 0 {
            self.kx
        } else {
            self.ky
        }
    }
}

/// Gauss-Legendre rule plus box; evaluates pairings and interaction terms.
#[derive(Debug, Clone)]
pub struct ProductEngine<T> {
    geom: BoxGeometry<T>,
    quad: Quadrature<T>,
}

impl<T: Real> ProductEngine<T> {
    pub fn new(geom: BoxGeometry<T>, order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidInput(format!("quadrature order {order} < 2")));
        }
        Ok(ProductEngine {
            geom,
            quad: Quadrature::gauss_legendre(order),
        })
    }

    pub fn geometry(&self) -> &BoxGeometry<T> {
        &self.geom
    }

    pub fn order(&self) -> usize {
        self.quad.len()
    }

    /// Samples `pair` (belonging to `index`) at the quadrature nodes.
    pub fn mode(&self, index: ModeIndex, pair: &EigenPair<T>) -> ModeData<T> {
        let (kx, ky) = self.geom.components(index.wave);
        let primal = self
            .quad
            .nodes
            .iter()
            .map(|&z| {
                let s = pair.profile.sample(z);
                [s.w, s.dw, s.d2w, s.theta, s.dtheta]
            })
            .collect();
        let adjoint = self
            .quad
            .nodes
            .iter()
            .map(|&z| {
                let s = pair.adjoint_profile.sample(z);
                [s.w, s.dw, s.theta]
            })
            .collect();
        ModeData {
            index,
            beta: pair.beta,
            kx,
            ky,
            a2: kx * kx + ky * ky,
            velocity: !index.wave.is_uniform() && pair.profile.has_velocity(),
            primal,
            adjoint,
        }
    }

    fn horizontal(&self, kinds: [[Trig; 2]; 3], n: [[u32; 3]; 2]) -> T {
        let hx = trig_integral([kinds[0][0], kinds[1][0], kinds[2][0]], n[0], self.geom.l1());
        if hx == T::zero() {
            return hx;
        }
        hx * trig_integral([kinds[0][1], kinds[1][1], kinds[2][1]], n[1], self.geom.l2())
    }

    /// ⟨φ_a, φ_b*⟩ over the box.
    pub fn inner_product(&self, a: &ModeData<T>, b: &ModeData<T>) -> T {
        self.pairing_with(a, b, |c, q| b.adjoint_at(c, q), T::one(), T::one())
    }

    /// Energy pairing of two primal modes: Pr⁻¹·velocity + temperature.
    pub fn energy_inner(&self, a: &ModeData<T>, b: &ModeData<T>, pr: T) -> T {
        self.pairing_with(a, b, |c, q| b.primal_at(c, q).0, T::one() / pr, T::one())
    }

    fn pairing_with<F: Fn(Comp, usize) -> T>(
        &self,
        a: &ModeData<T>,
        b: &ModeData<T>,
        test: F,
        wv: T,
        wt: T,
    ) -> T {
        let mut total = T::zero();
        for c in COMPS {
            if !a.exists(c) || !b.exists(c) {
                continue;
            }
            let k = ModeData::<T>::kinds(c);
            let h = self.horizontal(
                [k, k, [Trig::Cos, Trig::Cos]],
                [[a.wave_n(0), b.wave_n(0), 0], [a.wave_n(1), b.wave_n(1), 0]],
            );
            if h == T::zero() {
                continue;
            }
            let vals: Vec<T> = (0..self.quad.len())
                .map(|q| a.primal_at(c, q).0 * test(c, q))
                .collect();
            let w = if c == Comp::Theta { wt } else { wv };
            total += w * h * self.quad.integrate(&vals);
        }
        total
    }

    /// ⟨G(φ_a, φ_b), φ_c*⟩ with G(φ, φ̃) = −((u·∇)ũ, (u·∇)θ̃). The pressure
    /// part of the projection drops out against the solenoidal adjoint.
    pub fn trilinear(&self, a: &ModeData<T>, b: &ModeData<T>, c: &ModeData<T>) -> T {
        self.trilinear_with(a, b, c, |m, comp, q| m.adjoint_at(comp, q), T::one(), T::one())
    }

    /// ⟨G(φ_a, φ_b), φ_c⟩ in the energy pairing.
    pub fn energy_trilinear(&self, a: &ModeData<T>, b: &ModeData<T>, c: &ModeData<T>, pr: T) -> T {
        self.trilinear_with(
            a,
            b,
            c,
            |m, comp, q| m.primal_at(comp, q).0,
            T::one() / pr,
            T::one(),
        )
    }

    fn trilinear_with<F: Fn(&ModeData<T>, Comp, usize) -> T>(
        &self,
        a: &ModeData<T>,
        b: &ModeData<T>,
        c: &ModeData<T>,
        test: F,
        wv: T,
        wt: T,
    ) -> T {
        let mut total = T::zero();
        let n = |m: &ModeData<T>| [m.wave_n(0), m.wave_n(1)];
        let (na, nb, nc) = (n(a), n(b), n(c));
        for comp in COMPS {
            if !b.exists(comp) || !c.exists(comp) {
                continue;
            }
            let wgt = if comp == Comp::Theta { wt } else { wv };
            for (dir, adv) in [(0usize, Comp::U), (1, Comp::V), (2, Comp::W)] {
                if !a.exists(adv) {
                    continue;
                }
                let mut kb = ModeData::<T>::kinds(comp);
                let mut fac = T::one();
                if dir < 2 {
                    // d/dx sin = k cos, d/dx cos = −k sin
                    fac = if kb[dir] == Trig::Sin { b.k(dir) } else { -b.k(dir) };
                    kb[dir] = kb[dir].flip();
                    if fac == T::zero() {
                        continue;
                    }
                }
                let h = self.horizontal(
                    [ModeData::<T>::kinds(adv), kb, ModeData::<T>::kinds(comp)],
                    [[na[0], nb[0], nc[0]], [na[1], nb[1], nc[1]]],
                );
                if h == T::zero() {
                    continue;
                }
                let vals: Vec<T> = (0..self.quad.len())
                    .map(|q| {
                        let (bv, bdz) = b.primal_at(comp, q);
                        let db = if dir == 2 { bdz } else { bv };
                        a.primal_at(adv, q).0 * db * test(c, comp, q)
                    })
                    .collect();
                total -= wgt * fac * h * self.quad.integrate(&vals);
            }
        }
        total
    }

    /// ⟨G(φ_a, φ_b), φ_c*⟩ / ⟨φ_c, φ_c*⟩.
    pub fn projection(&self, a: &ModeData<T>, b: &ModeData<T>, c: &ModeData<T>) -> Result<T> {
        let p = self.inner_product(c, c);
        if p.abs() < T::lit(1e-300).max(T::min_positive_value()) || !p.is_finite() {
            return Err(Error::ZeroPairing(p.to_f64_lossy()));
        }
        Ok(self.trilinear(a, b, c) / p)
    }

    /// |⟨G(φ,φ), φ⟩| in the energy pairing for φ = Σ cᵢ·modeᵢ, and ‖φ‖³.
    pub fn energy_annihilation(&self, combo: &[(T, &ModeData<T>)], pr: T) -> (T, T) {
        let mut cubic = T::zero();
        let mut norm2 = T::zero();
        for (ca, a) in combo {
            for (cb, b) in combo {
                norm2 += *ca * *cb * self.energy_inner(a, b, pr);
                for (cc, c) in combo {
                    cubic += *ca * *cb * *cc * self.energy_trilinear(a, b, c, pr);
                }
            }
        }
        (cubic.abs(), norm2.abs().sqrt().powi(3))
    }
}

/// One normalized interaction coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionCoefficient<T> {
    pub source_a: ModeIndex,
    pub source_b: ModeIndex,
    pub target: ModeIndex,
    pub value: T,
}

impl<T: Real> ProjectionCoefficient<T> {
    pub const CSV_HEADER: &'static str = "Ia,Ja,Ka,Ib,Jb,Kb,It,Jt,Kt,value";
}

impl<T: Real> fmt::Display for ProjectionCoefficient<T> {
    /// CSV row, 12 significant digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = |i: &ModeIndex| format!("{},{},{}", i.wave.ix, i.wave.iy, i.branch);
        write!(
            f,
            "{},{},{},{:.11e}",
            m(&self.source_a),
            m(&self.source_b),
            m(&self.target),
            self.value.to_f64_lossy()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_table_matches_quadrature() {
        let l = 1.7f64;
        let q = Quadrature::<f64>::gauss_legendre(200);
        let f = |k: Trig, n: u32, x: f64| {
            let a = std::f64::consts::PI * n as f64 * x / l;
            match k {
                Trig::Sin => a.sin(),
                Trig::Cos => a.cos(),
            }
        };
        let kinds = [Trig::Sin, Trig::Cos];
        for &k0 in &kinds {
            for &k1 in &kinds {
                for &k2 in &kinds {
                    for n in [[1u32, 2, 3], [2, 2, 0], [1, 1, 1], [3, 1, 4], [0, 0, 0], [2, 1, 2]] {
                        let exact = trig_integral([k0, k1, k2], n, l);
                        let vals: Vec<f64> = q
                            .nodes
                            .iter()
                            .map(|&t| {
                                let x = t * l;
                                l * f(k0, n[0], x) * f(k1, n[1], x) * f(k2, n[2], x)
                            })
                            .collect();
                        let num = q.integrate(&vals);
                        assert!((exact - num).abs() < 1e-12, "{k0:?}{k1:?}{k2:?} {n:?}: {exact} {num}");
                    }
                }
            }
        }
    }

    #[test]
    fn interaction_set_single_mode_collapses() {
        let s = InteractionSet::new(&[Wave::new(1, 0)]);
        let m: Vec<Wave> = s.members.iter().copied().collect();
        assert_eq!(m, vec![Wave::new(0, 0), Wave::new(2, 0)]);
        let h = InteractionSet::new(&[Wave::new(2, 1), Wave::new(0, 2)]);
        for w in [(0, 0), (4, 2), (4, 0), (0, 2), (2, 1), (2, 3), (0, 4)] {
            assert!(h.contains(Wave::new(w.0, w.1)), "{w:?}");
        }
        assert_eq!(h.members.len(), 7);
    }
}
