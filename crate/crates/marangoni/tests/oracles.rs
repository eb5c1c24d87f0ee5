//! Checks against values computed independently of the library: an
//! extended-precision evaluation of the closed-form modes, elementary
//! integrals, and direct time integration.

use std::sync::OnceLock;

use marangoni::center_manifold::ManifoldOptions;
use marangoni::eigenfunctions::appendix::ClosedFormMode;
use marangoni::eigenfunctions::{branches, general_mode, pairing_z, real_spectrum, zero_mode, zero_mode_rho};
use marangoni::geometry::wavenumber;
use marangoni::linear_stability::{critical_marangoni, growth_rate, marginal_minimum};
use marangoni::reduced_dynamics::{integrate, ReducedSystem};
use marangoni::transition::{classify, classify_rescaled, Classification};
use marangoni::{BoxGeometry, HexReport, StabilityParams, Wave};

fn params(pr: f64, bi: f64, lambda: f64) -> StabilityParams {
    StabilityParams::new(pr, bi, lambda).unwrap()
}

fn hex_box() -> BoxGeometry {
    BoxGeometry::hexagonal(3.02).unwrap()
}

fn roll_box() -> BoxGeometry {
    BoxGeometry::new(1.5, 1.0).unwrap()
}

fn quick() -> ManifoldOptions {
    ManifoldOptions {
        l_max: 6,
        auto_escalate: false,
        check_quadrature: false,
        ..ManifoldOptions::default()
    }
}

fn hex_report() -> &'static HexReport {
    static CELL: OnceLock<HexReport> = OnceLock::new();
    CELL.get_or_init(|| match classify(&hex_box(), 1.0, 0.0, &quick()).unwrap().0 {
        Classification::Hex(h) => h,
        Classification::Single(_) => panic!("hex box gave a single mode"),
    })
}

// Marangoni numbers at which β is a growth rate, from a 40-digit
// evaluation of the closed-form mode: (α, Pr, Bi, β, λ).
const SECULAR_ORACLE: [(f64, f64, f64, f64, f64); 3] = [
    (2.1, 2.3, 1.5, -3.7, 73.08579972398032),
    (2.1, 2.3, 1.5, 0.8, 149.93752967350292),
    (1.7, 0.3, 0.0, -12.5, 63.082605376323678),
];

#[test]
fn spectrum_contains_extended_precision_roots() {
    for (a, pr, bi, beta, lam) in SECULAR_ORACLE {
        let spec = real_spectrum(a, &params(pr, bi, lam), 8).unwrap();
        let best = spec.iter().map(|b| (b - beta).abs()).fold(f64::INFINITY, f64::min);
        assert!(best < 1e-8 * beta.abs().max(1.0), "beta {beta} not in {spec:?}");
    }
}

#[test]
fn zero_mode_pairing_closed_form() {
    for bi in [0.0f64, 0.3, 5.0] {
        for l in 0..4 {
            let m = zero_mode(l, bi).unwrap();
            let rho = zero_mode_rho(l, bi);
            let exact = 0.5 - (2.0 * rho).sin() / (4.0 * rho);
            assert!((m.pairing_z - exact).abs() < 1e-13, "l={l} Bi={bi}");
            assert!((m.beta + rho * rho).abs() < 1e-12);
        }
    }
}

#[test]
fn branches_are_biorthogonal() {
    for (pr, bi) in [(1.0, 0.0), (0.3, 1.0), (7.0, 2.0)] {
        let a = 2.4;
        let p = params(pr, bi, 85.0);
        let b = branches(a, &p, 4).unwrap();
        for (j, pj) in b.iter().enumerate() {
            for (k, pk) in b.iter().enumerate() {
                if j == k {
                    continue;
                }
                let cross = pairing_z(a, &pj.profile, &pk.adjoint_profile, 96);
                let scale = (pj.pairing_z * pk.pairing_z).abs().sqrt();
                assert!(cross.abs() < 1e-9 * scale, "Pr={pr} j={j} k={k}: {cross:e} vs {scale:e}");
            }
        }
    }
}

#[test]
fn closed_form_profiles_are_proportional() {
    let (a, pr, bi) = (2.1, 2.3, 1.5);
    let p = params(pr, bi, 73.08579972398032);
    for beta in real_spectrum(a, &p, 4).unwrap().into_iter().skip(1) {
        let m = general_mode(a, beta, &p).unwrap();
        let cf = ClosedFormMode::new(a, beta, pr, bi).unwrap();
        let zr = 0.6;
        let ratio = cf.primal(zr).w / m.profile.sample(zr).w;
        let aratio = cf.adjoint(zr).w / m.adjoint_profile.sample(zr).w;
        for z in [0.15, 0.4, 0.85, 1.0] {
            let (c, s) = (cf.primal(z), m.profile.sample(z));
            let tol = 1e-8 * ratio.norm();
            assert!((c.w - ratio * s.w).norm() < tol * s.w.abs().max(1e-2), "W beta={beta} z={z}");
            assert!((c.theta - ratio * s.theta).norm() < tol * s.theta.abs().max(1e-2), "T beta={beta} z={z}");
            let (ca, sa) = (cf.adjoint(z), m.adjoint_profile.sample(z));
            let atol = 1e-8 * aratio.norm();
            assert!((ca.w - aratio * sa.w).norm() < atol * sa.w.abs().max(1e-2), "W* beta={beta} z={z}");
        }
        assert!((cf.secular_lambda().re / 73.08579972398032 - 1.0).abs() < 1e-9);
    }
}

#[test]
fn single_precision_instantiation() {
    let (alpha, lam) = marginal_minimum(0.0f32).unwrap();
    assert!((lam - 79.6067).abs() < 1e-2, "{lam}");
    assert!((alpha - 1.9929).abs() < 1e-2, "{alpha}");
    let g = marangoni::geometry::BoxGeometry::<f32>::new(1.5, 1.0).unwrap();
    let c = critical_marangoni(&g, 0.0f32).unwrap();
    assert_eq!(c.critical_set.len(), 1);
    assert!((c.lambda_c - 79.8268).abs() < 1e-2);
}

#[test]
fn roll_amplitude_matches_time_integration() {
    let g = roll_box();
    let (cls, _) = classify(&g, 1.0, 0.0, &quick()).unwrap();
    let Classification::Single(rep) = cls else { panic!("roll box gave hex") };
    let lam = rep.lambda_c + 0.5;
    let beta = growth_rate(&params(1.0, 0.0, lam), wavenumber(rep.index.wave, &g), 1).unwrap();
    let amp = rep.amplitude(beta).unwrap();
    let sys = ReducedSystem::single(beta, rep.c_i);
    let t = integrate(&sys, [0.1 * amp, 0.0], 40.0 / beta, 0.05 / beta).unwrap();
    let end = t.y.last().unwrap()[0];
    assert!((end / amp - 1.0).abs() < 1e-3, "{end} vs {amp}");
}

#[test]
fn classification_is_invariant_under_rescaling() {
    let opts = quick();
    let roll = roll_box();
    let base = match classify_rescaled(&roll, 1.0, 0.0, 1.0, &opts).unwrap() {
        Classification::Single(r) => r,
        _ => unreachable!(),
    };
    let h = hex_report();
    for s in [0.5, 2.0, 10.0] {
        let Classification::Single(r) = classify_rescaled(&roll, 1.0, 0.0, s, &opts).unwrap() else { unreachable!() };
        assert_eq!(r.transition_type, base.transition_type);
        assert!((r.c_i / (s * s) / base.c_i - 1.0).abs() < 1e-9, "s={s}");
        let Classification::Hex(x) = classify_rescaled(&hex_box(), 1.0, 0.0, s, &opts).unwrap() else { unreachable!() };
        assert_eq!(x.transition_type, h.transition_type);
        let (c0, c1) = (h.coefficients, x.coefficients);
        assert!((c1.b2 / (c1.a1 * c1.a1) / (c0.b2 / (c0.a1 * c0.a1)) - 1.0).abs() < 1e-9, "s={s}");
        assert!((c1.a1 / s / c0.a1 - 1.0).abs() < 1e-9, "s={s}");
    }
}

fn sorted_re(v: &[marangoni::reduced_dynamics::Eigenvalue<f64>]) -> Vec<f64> {
    let mut r: Vec<f64> = v.iter().map(|e| e.re).collect();
    r.sort_by(f64::total_cmp);
    r
}

fn deviation(rep: &HexReport, beta: f64, label: &str) -> f64 {
    let s = rep.steady_states(beta).unwrap().into_iter().find(|s| s.label == label).unwrap();
    let got = sorted_re(s.eigenvalues_refined.as_ref().unwrap());
    let mut want = s.eigenvalues_leading.to_vec();
    want.sort_by(f64::total_cmp);
    got.iter().zip(&want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max)
}

#[test]
fn hexagon_spectrum_deviation_is_second_order() {
    let rep = hex_report();
    for label in ["H1", "H2"] {
        let (d2, d3) = (deviation(rep, 1e-2, label), deviation(rep, 1e-3, label));
        let ratio = d2 / d3;
        assert!((50.0..200.0).contains(&ratio), "{label}: {d2:e} {d3:e}");
        assert!(d3 < 1e2 * 1e-6, "{label}: {d3:e}");
    }
}

#[test]
fn roll_state_spectrum_matches_leading_order() {
    let rep = hex_report();
    for label in ["+R", "-R"] {
        for beta in [1e-3, 1e-2] {
            let d = deviation(rep, beta, label);
            assert!(d < 10.0 * beta.powf(1.5), "{label} beta={beta}: {d:e}");
        }
    }
}

#[test]
fn classification_is_continuous_across_unit_prandtl() {
    let g = roll_box();
    let c = |pr: f64| match classify(&g, pr, 0.0, &quick()).unwrap().0 {
        Classification::Single(r) => r.c_i,
        _ => unreachable!(),
    };
    let mid = c(1.0);
    for pr in [1.0 - 1e-6, 1.0 + 1e-6] {
        assert!((c(pr) / mid - 1.0).abs() < 1e-4, "Pr={pr}");
    }
}

#[test]
fn hex_waves_share_a_wavenumber() {
    let g = hex_box();
    let a = wavenumber(Wave::new(2, 1), &g);
    assert!((a - wavenumber(Wave::new(0, 2), &g)).abs() < 1e-14);
}
