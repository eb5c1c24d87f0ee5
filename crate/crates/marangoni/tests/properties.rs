use std::sync::OnceLock;

use proptest::prelude::*;

use marangoni::center_manifold::{build_manifold_table, ManifoldOptions};
use marangoni::eigenfunctions::branches;
use marangoni::geometry::{assemble_field, wavenumber};
use marangoni::linear_stability::{critical_marangoni, marginal_marangoni, marginal_minimum};
use marangoni::products::{trig_integral, Trig};
use marangoni::reduced_dynamics::{HexCoefficients, ReducedSystem};
use marangoni::transition::hex_classifier;
use marangoni::{BoxGeometry, HexReport, ManifoldTable, StabilityParams, Wave};

fn hex_table() -> &'static (ManifoldTable, HexReport) {
    static CELL: OnceLock<(ManifoldTable, HexReport)> = OnceLock::new();
    CELL.get_or_init(|| {
        let g = BoxGeometry::hexagonal(3.02).unwrap();
        let crit = critical_marangoni(&g, 0.0).unwrap();
        let opts = ManifoldOptions {
            l_max: 6,
            auto_escalate: false,
            check_quadrature: false,
            ..ManifoldOptions::default()
        };
        let t = build_manifold_table(&g, &crit.critical_set, 1.0, 0.0, &opts).unwrap();
        let h = hex_classifier(&g, &t).unwrap();
        (t, h)
    })
}

fn trig() -> impl Strategy<Value = Trig> {
    prop_oneof![Just(Trig::Sin), Just(Trig::Cos)]
}

// Composite Simpson on a fine grid; exact enough for the low orders drawn.
fn simpson(f: impl Fn(f64) -> f64, len: f64) -> f64 {
    let n = 6000;
    let h = len / n as f64;
    let mut s = f(0.0) + f(len);
    for k in 1..n {
        s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trig_table_matches_quadrature(
        kinds in [trig(), trig(), trig()],
        n in [0u32..7, 0u32..7, 0u32..7],
        len in 0.5f64..4.0,
    ) {
        let f = |x: f64| {
            (0..3).map(|i| {
                let a = std::f64::consts::PI * n[i] as f64 * x / len;
                match kinds[i] { Trig::Sin => a.sin(), Trig::Cos => a.cos() }
            }).product::<f64>()
        };
        let exact = trig_integral(kinds, n, len);
        prop_assert!((exact - simpson(f, len)).abs() < 1e-9 * len);
    }

    #[test]
    fn marginal_curve_bounded_below_and_increasing_in_biot(alpha in 0.05f64..15.0, bi in 0.0f64..20.0) {
        let (_, lstar) = marginal_minimum(bi).unwrap();
        let l = marginal_marangoni(alpha, bi).unwrap();
        prop_assert!(l >= lstar * (1.0 - 1e-12));
        prop_assert!(marginal_marangoni(alpha, bi + 0.5).unwrap() > l);
    }

    #[test]
    fn hex_system_reflection_equivariant(
        c in prop::array::uniform6(-5.0f64..5.0),
        beta in -0.1f64..0.1,
        y in prop::array::uniform2(-1.0f64..1.0),
    ) {
        let h = HexCoefficients { a1: c[0], a2: c[1], a3: c[2], b1: c[3], b2: c[4], b3: c[5] };
        let sys = ReducedSystem { kind: marangoni::reduced_dynamics::SystemKind::Hex(h), beta };
        let f = sys.rhs(y);
        let g = sys.rhs([-y[0], y[1]]);
        prop_assert!((g[0] + f[0]).abs() <= 1e-15 * (1.0 + f[0].abs()));
        prop_assert!((g[1] - f[1]).abs() <= 1e-15 * (1.0 + f[1].abs()));
    }

    #[test]
    fn computed_hex_system_keeps_lines_invariant(t in -0.05f64..0.05, beta in -0.02f64..0.02, sign in prop::bool::ANY) {
        let (_, rep) = hex_table();
        let sys = rep.system(beta).unwrap();
        let k = if sign { 2.0 } else { -2.0 };
        let f = sys.rhs([k * t, t]);
        prop_assert!((f[0] - k * f[1]).abs() <= 1e-10 * (f[0].abs() + f[1].abs()).max(1e-300));
    }

    #[test]
    fn mode_fields_are_solenoidal(
        ix in 0u32..5, iy in 0u32..5, branch in 0usize..3,
        x in 0.0f64..1.0, y in 0.0f64..1.0, z in 0.0f64..1.0,
    ) {
        prop_assume!(ix + iy > 0);
        let g = BoxGeometry::new(1.5, 1.0).unwrap();
        let w = Wave::new(ix, iy);
        let p = StabilityParams::new(1.3, 0.5, 80.0).unwrap();
        let b = branches(wavenumber(w, &g), &p, 3).unwrap();
        let f = assemble_field(&b[branch].profile, w, &g).unwrap();
        let scale = f.sample(x * 1.5, y, z).w.abs().max(b[branch].profile.sample(0.5).dw.abs());
        prop_assert!(f.divergence(x * 1.5, y, z).abs() <= 1e-12 * scale.max(1.0));
    }
}

#[test]
fn cubic_coefficients_symmetric_in_last_pair() {
    let (t, _) = hex_table();
    let r = &t.reduced;
    for i in 0..2 {
        for j in 0..2 {
            for l in 0..2 {
                for m in 0..2 {
                    let (a, b) = (r.c(i, j, l, m), r.c(i, j, m, l));
                    assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300));
                }
            }
        }
    }
}

#[test]
fn manifold_coefficients_symmetric_in_sources() {
    let (t, _) = hex_table();
    for e in &t.entries {
        if let Some(o) = t.entries.iter().find(|o| o.i == e.j && o.j == e.i && o.k == e.k) {
            assert!((o.value - e.value).abs() <= 1e-12 * e.value.abs().max(1e-300));
        }
    }
}
