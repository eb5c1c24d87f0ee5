//! Box geometry, wave lattice, mode identity and 3D field reconstruction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::VerticalProfile;
use crate::scalar::Real;

/// Horizontal extent of the box Ω = (0,L1)×(0,L2)×(0,1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxGeometry<T> {
    l1: T,
    l2: T,
}

impl<T: Real> BoxGeometry<T> {
    pub fn new(l1: T, l2: T) -> Result<Self> {
        if !(l1 > T::zero() && l1.is_finite() && l2 > T::zero() && l2.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "box lengths must be positive and finite, got {l1} x {l2}"
            )));
        }
        Ok(BoxGeometry { l1, l2 })
    }

    /// Box with `L1 = 2·L2/√3`, on which (2,1) and (0,2) share a wavenumber.
    pub fn hexagonal(l2: T) -> Result<Self> {
        Self::new(T::lit(2.0) * l2 / T::lit(3.0).sqrt(), l2)
    }

    pub fn l1(&self) -> T {
        self.l1
    }

    pub fn l2(&self) -> T {
        self.l2
    }

    pub fn area(&self) -> T {
        self.l1 * self.l2
    }

    /// L1/L2 = Ix/(Iy·√3) to relative 1e-12.
    pub fn hex_compatible(&self, ix: u32, iy: u32) -> bool {
        if iy == 0 {
            return false;
        }
        let target = T::from_u32(ix).unwrap() / (T::from_u32(iy).unwrap() * T::lit(3.0).sqrt());
        let ratio = self.l1 / self.l2;
        (ratio - target).abs() <= T::lit(1e-12) * target.abs().max(ratio.abs())
    }

    /// Horizontal wave components (π Ix/L1, π Iy/L2).
    pub fn components(&self, wave: Wave) -> (T, T) {
        (
            T::PI() * T::from_u32(wave.ix).unwrap() / self.l1,
            T::PI() * T::from_u32(wave.iy).unwrap() / self.l2,
        )
    }
}

/// Horizontal wave pair (Ix, Iy).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Wave {
    pub ix: u32,
    pub iy: u32,
}

impl Wave {
    pub const fn new(ix: u32, iy: u32) -> Self {
        Wave { ix, iy }
    }

    /// Construction from signed indices; the mode depends on |Ix|, |Iy| only.
    pub fn from_signed(ix: i64, iy: i64) -> Self {
        Wave {
            ix: ix.unsigned_abs() as u32,
            iy: iy.unsigned_abs() as u32,
        }
    }

    pub fn is_uniform(&self) -> bool {
        self.ix == 0 && self.iy == 0
    }
}

impl std::fmt::Display for Wave {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.ix, self.iy)
    }
}

/// Wave pair plus vertical branch index `k ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ModeIndex {
    pub wave: Wave,
    pub branch: u32,
}

impl ModeIndex {
    pub fn new(ix: u32, iy: u32, branch: u32) -> Result<Self> {
        if branch == 0 {
            return Err(Error::InvalidInput("branch index starts at 1".into()));
        }
        Ok(ModeIndex {
            wave: Wave::new(ix, iy),
            branch,
        })
    }
}

/// α = π √((Ix/L1)² + (Iy/L2)²).
pub fn wavenumber<T: Real>(wave: Wave, geom: &BoxGeometry<T>) -> T {
    let (kx, ky) = geom.components(wave);
    kx.hypot(ky)
}

/// Velocity and temperature at a point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FieldSample<T> {
    pub u: T,
    pub v: T,
    pub w: T,
    pub theta: T,
}

#[derive(Debug, Clone, PartialEq)]
struct FieldPart<T> {
    amp: T,
    kx: T,
    ky: T,
    profile: VerticalProfile<T>,
}

/// Superposition of separated modes; evaluable anywhere in the box.
#[derive(Debug, Clone, PartialEq)]
pub struct Field3D<T> {
    geom: BoxGeometry<T>,
    parts: Vec<FieldPart<T>>,
}

/// Places a vertical profile on the horizontal pattern of `wave`.
pub fn assemble_field<T: Real>(
    profile: &VerticalProfile<T>,
    wave: Wave,
    geom: &BoxGeometry<T>,
) -> Result<Field3D<T>> {
    if wave.is_uniform() && profile.has_velocity() {
        return Err(Error::InvalidInput(
            "index (0,0) carries no velocity; W must vanish identically".into(),
        ));
    }
    let (kx, ky) = geom.components(wave);
    Ok(Field3D {
        geom: *geom,
        parts: vec![FieldPart {
            amp: T::one(),
            kx,
            ky,
            profile: profile.clone(),
        }],
    })
}

impl<T: Real> Field3D<T> {
    pub fn zero(geom: &BoxGeometry<T>) -> Self {
        Field3D {
            geom: *geom,
            parts: Vec::new(),
        }
    }

    pub fn geometry(&self) -> &BoxGeometry<T> {
        &self.geom
    }

    pub fn scaled(mut self, s: T) -> Self {
        for p in &mut self.parts {
            p.amp *= s;
        }
        self
    }

    /// `self + other`; both must live on the same box.
    pub fn plus(mut self, other: &Self) -> Result<Self> {
        if self.geom != other.geom {
            return Err(Error::InvalidInput("fields live on different boxes".into()));
        }
        self.parts.extend(other.parts.iter().cloned());
        Ok(self)
    }

    pub fn sample(&self, x: T, y: T, z: T) -> FieldSample<T> {
        let mut out = FieldSample::default();
        for p in &self.parts {
            let s = p.profile.sample(z);
            let (sx, cx) = (p.kx * x).sin_cos();
            let (sy, cy) = (p.ky * y).sin_cos();
            let a2 = p.kx * p.kx + p.ky * p.ky;
            if a2 > T::zero() {
                out.u += -p.amp * p.kx / a2 * s.dw * sx * cy;
                out.v += -p.amp * p.ky / a2 * s.dw * cx * sy;
                out.w += p.amp * s.w * cx * cy;
            }
            out.theta += p.amp * s.theta * cx * cy;
        }
        out
    }

    /// Analytic ∂x u + ∂y v + ∂z w.
    pub fn divergence(&self, x: T, y: T, z: T) -> T {
        let mut d = T::zero();
        for p in &self.parts {
            let a2 = p.kx * p.kx + p.ky * p.ky;
            if a2 == T::zero() {
                continue;
            }
            let s = p.profile.sample(z);
            let c = (p.kx * x).cos() * (p.ky * y).cos();
            d += p.amp * s.dw * c * (T::one() - (p.kx * p.kx + p.ky * p.ky) / a2);
        }
        d
    }

    /// Samples on a uniform grid including the box faces, x slowest.
    pub fn grid(&self, nx: usize, ny: usize, nz: usize) -> Vec<([T; 3], FieldSample<T>)> {
        let axis = |n: usize, len: T| -> Vec<T> {
            if n == 1 {
                return vec![T::zero()];
            }
            (0..n).map(|i| len * T::count(i) / T::count(n - 1)).collect()
        };
        let xs = axis(nx, self.geom.l1);
        let ys = axis(ny, self.geom.l2);
        let zs = axis(nz, T::one());
        let mut out = Vec::with_capacity(nx * ny * nz);
        for &x in &xs {
            for &y in &ys {
                for &z in &zs {
                    out.push(([x, y, z], self.sample(x, y, z)));
                }
            }
        }
        out
    }
}
