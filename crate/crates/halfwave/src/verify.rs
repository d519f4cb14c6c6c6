//! Runtime verification suites: every internal cross-check in the library
//! as a named pass/fail item with its measured residual, aggregated by the
//! `halfwave verify` subcommand. All randomized draws come from a seeded
//! generator, so a report is a pure function of (suite, seed, tolerances).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dirac::{
    build_matrices, epsilon_over_m_quantized, nonrelativistic_limit_check, ode_residual,
    perturbed_residual, phi_closed, phi_integral, phi_pole_fields, radial_eigenfunction,
    spectrum_table, CouplingParams, FINE_STRUCTURE_CONST,
};
use crate::inverse::{
    operator_image, reconstruct, roundtrip_check, ReconstructionWavelet,
};
use crate::profile::{PowerExpTerm, RadialProfile};
use crate::special::{
    gamma, hyp1f1_terminating, hyp2f1_terminating, ln_gamma, pochhammer, principal_power,
};
use crate::transform::{
    agamma_constant, agamma_inner_product, apply_euler_operator, bergman_weighted_integral,
    decay_exponent_estimate, decay_exponent_windowed, derivative_field, forward_transform,
    forward_transform_quadrature, l2_norm_radial, radial_inner_product, CoefficientField,
    PoleTerm, TransformOrder,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    SpecialFunctions,
    Transform,
    Inverse,
    Dirac,
    All,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::SpecialFunctions => "special_functions",
            Suite::Transform => "transform",
            Suite::Inverse => "inverse",
            Suite::Dirac => "dirac",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn bounded(suite: &'static str, name: &'static str, residual: f64, tolerance: f64) -> Self {
        Self {
            suite,
            name,
            residual,
            tolerance,
            passed: residual.is_finite() && residual <= tolerance,
        }
    }

    /// A check that must *exceed* a floor (sensitivity probes).
    fn at_least(suite: &'static str, name: &'static str, residual: f64, floor: f64) -> Self {
        Self {
            suite,
            name,
            residual,
            tolerance: floor,
            passed: residual.is_finite() && residual >= floor,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub quadrature_rel: f64,
    pub verify_rel: f64,
    /// fault injection: evaluate the eigen-spinor residual at a 1%-detuned
    /// energy, which must make the dirac suite fail
    pub perturb_epsilon: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            quadrature_rel: 1e-8,
            verify_rel: 1e-6,
            perturb_epsilon: false,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn rel_c(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

const ALPHA: f64 = FINE_STRUCTURE_CONST;

pub fn run(suite: Suite, cfg: &VerifyConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    match suite {
        Suite::SpecialFunctions => special_suite(cfg, &mut checks),
        Suite::Transform => transform_suite(cfg, &mut checks),
        Suite::Inverse => inverse_suite(cfg, &mut checks),
        Suite::Dirac => dirac_suite(cfg, &mut checks),
        Suite::All => {
            special_suite(cfg, &mut checks);
            transform_suite(cfg, &mut checks);
            inverse_suite(cfg, &mut checks);
            dirac_suite(cfg, &mut checks);
        }
    }
    checks
}

fn special_suite(cfg: &VerifyConfig, out: &mut Vec<Check>) {
    const S: &str = "special_functions";

    let mut worst = ln_gamma(1.0).map(|v| v.abs()).unwrap_or(f64::INFINITY);
    worst = worst.max(ln_gamma(2.0).map(|v| v.abs()).unwrap_or(f64::INFINITY));
    worst = worst.max(rel(ln_gamma(0.5).unwrap_or(f64::NAN), 0.5723649429247001));
    worst = worst.max(rel(ln_gamma(0.1).unwrap_or(f64::NAN), 2.2527126517342060));
    out.push(Check::bounded(S, "ln_gamma_pinned_values", worst, 1e-14));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x01);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x: f64 = rng.gen_range(0.1..30.0);
        worst = worst.max(rel(
            gamma(x + 1.0).unwrap_or(f64::NAN),
            x * gamma(x).unwrap_or(f64::NAN),
        ));
    }
    out.push(Check::bounded(S, "gamma_recurrence", worst, 1e-13));

    let mut worst = rel_c(
        principal_power(Complex64::new(2.0, 0.0), -1.3).unwrap_or_default(),
        Complex64::new(0.4061261981781178, 0.0),
    );
    worst = worst.max(rel_c(
        principal_power(Complex64::new(1.0, 1.0), 0.5).unwrap_or_default(),
        Complex64::new(1.0986841134678100, 0.4550898605622273),
    ));
    out.push(Check::bounded(S, "principal_power_pinned_values", worst, 1e-14));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x02);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let w = Complex64::new(rng.gen_range(0.01..10.0), rng.gen_range(-10.0..10.0));
        let (s1, s2) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let lhs = principal_power(w, s1 + s2).unwrap_or_default();
        let rhs = principal_power(w, s1).unwrap_or_default()
            * principal_power(w, s2).unwrap_or_default();
        worst = worst.max(rel_c(lhs, rhs));
    }
    out.push(Check::bounded(S, "power_exponent_multiplicativity", worst, 1e-13));

    let worst = (pochhammer(3.0, 2) - 12.0)
        .abs()
        .max((pochhammer(1.0, 4) - 24.0).abs())
        .max((pochhammer(0.37, 0) - 1.0).abs());
    out.push(Check::bounded(S, "pochhammer_products", worst, 1e-15));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x03);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(0..12u32);
        let g2 = rng.gen_range(0.1..6.0);
        let zero = Complex64::new(0.0, 0.0);
        worst = worst.max(
            (hyp2f1_terminating(n, g2, zero).unwrap_or_default() - Complex64::new(1.0, 0.0))
                .norm(),
        );
        worst = worst
            .max((hyp1f1_terminating(n, g2 + 1.0, 0.0).unwrap_or(f64::NAN) - 1.0).abs());
    }
    out.push(Check::bounded(S, "terminating_series_unit_at_zero", worst, 1e-15));

    let one = Complex64::new(1.0, 0.0);
    let mut worst = rel_c(
        hyp2f1_terminating(1, 1.0, one).unwrap_or_default(),
        Complex64::new(0.5, 0.0),
    );
    worst = worst.max(rel_c(
        hyp2f1_terminating(2, 2.0, one).unwrap_or_default(),
        Complex64::new(1.0 / 6.0, 0.0),
    ));
    worst = worst.max(
        hyp1f1_terminating(1, 2.0, 2.0)
            .map(|v| v.abs())
            .unwrap_or(f64::INFINITY),
    );
    worst = worst.max(rel(
        hyp1f1_terminating(2, 3.0, 1.0).unwrap_or(f64::NAN),
        5.0 / 12.0,
    ));
    out.push(Check::bounded(S, "terminating_series_pinned_values", worst, 1e-13));

    // Kummer recurrence in the degree against the direct finite sums; the
    // deviation is measured against the series' condition scale (sum of
    // term magnitudes), since the alternating sum cancels heavily at
    // large q
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x04);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let c: f64 = rng.gen_range(0.5..5.0);
        let q: f64 = rng.gen_range(0.0..30.0);
        let n = rng.gen_range(1..10u32);
        let prev = hyp1f1_terminating(n - 1, c, q).unwrap_or(f64::NAN);
        let curr = hyp1f1_terminating(n, c, q).unwrap_or(f64::NAN);
        let next = hyp1f1_terminating(n + 1, c, q).unwrap_or(f64::NAN);
        let nf = n as f64;
        let recurrence = ((2.0 * nf + c - q) * curr - nf * prev) / (c + nf);
        let mut magnitude_sum = 1.0;
        let mut term = 1.0f64;
        for k in 0..=n {
            term *= (k as f64 - (n + 1) as f64) / ((c + k as f64) * (k as f64 + 1.0)) * q;
            magnitude_sum += term.abs();
        }
        let scale = next.abs().max(magnitude_sum * 1e-3).max(1e-30);
        worst = worst.max((next - recurrence).abs() / scale);
    }
    out.push(Check::bounded(S, "confluent_recurrence_vs_direct_sum", worst, 1e-12));
}

fn transform_suite(cfg: &VerifyConfig, out: &mut Vec<Check>) {
    const S: &str = "transform";

    // quadrature path against the closed form, the spec-scale draw set
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x10);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g = rng.gen_range(0.1..2.0);
        let p = rng.gen_range(0.1..3.0);
        let a = rng.gen_range(0.1..10.0);
        let b = rng.gen_range(-50.0..50.0);
        let term = PowerExpTerm::new(
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            p,
            Complex64::new(rng.gen_range(0.8..2.0), rng.gen_range(-0.5..0.5)),
        )
        .unwrap();
        let f = RadialProfile::from_terms(vec![term]);
        let order = TransformOrder::new(g).unwrap();
        let zbar = Complex64::new(b, -a);
        let closed = forward_transform(&f, order, zbar).unwrap_or_default();
        let quad = forward_transform_quadrature(&f, order, zbar).unwrap_or_default();
        worst = worst.max(rel_c(quad, closed));
    }
    out.push(Check::bounded(S, "quadrature_vs_closed_form", worst, cfg.quadrature_rel));

    // discrete contour integral around a rectangle in the lower half-plane
    let f = RadialProfile::from_terms(vec![
        PowerExpTerm::real(1.0, 0.7, 1.0).unwrap(),
        PowerExpTerm::new(Complex64::new(0.4, -0.2), 1.6, Complex64::new(1.5, 0.4)).unwrap(),
    ]);
    let order = TransformOrder::new(0.6).unwrap();
    let corners = [
        Complex64::new(-2.0, -3.0),
        Complex64::new(2.0, -3.0),
        Complex64::new(2.0, -0.5),
        Complex64::new(-2.0, -0.5),
    ];
    let mut contour = Complex64::new(0.0, 0.0);
    let mut perimeter = 0.0;
    let mut max_abs = 0.0f64;
    for i in 0..4 {
        let start = corners[i];
        let seg = corners[(i + 1) % 4] - corners[i];
        perimeter += seg.norm();
        max_abs = max_abs.max(forward_transform(&f, order, start).unwrap_or_default().norm());
        let (side, _) = crate::quadrature::integrate_adaptive(
            &|t| forward_transform(&f, order, start + seg * t).unwrap_or_default() * seg,
            0.0,
            1.0,
            1e-13,
        );
        contour += side;
    }
    out.push(Check::bounded(
        S,
        "analyticity_contour_integral",
        contour.norm() / (perimeter * max_abs),
        1e-8,
    ));

    // decay along the translation axis at fixed dilation; the 1e-6 target
    // needs a pole exponent gamma + p above ~1.7 at |b| = 1e4
    let f = RadialProfile::power_exp(1.0, 1.0, 1.0).unwrap();
    let order = TransformOrder::new(0.8).unwrap();
    let at_zero = forward_transform(&f, order, Complex64::new(0.0, -1.0))
        .map(|v| v.norm())
        .unwrap_or(f64::NAN);
    let mut monotone = true;
    let mut prev = f64::INFINITY;
    let mut last = f64::NAN;
    for k in 0..16 {
        let b = 10f64.powf(1.0 + 3.0 * k as f64 / 15.0);
        let v = forward_transform(&f, order, Complex64::new(b, -1.0))
            .map(|v| v.norm())
            .unwrap_or(f64::NAN);
        if !(v < prev) {
            monotone = false;
        }
        prev = v;
        last = v;
    }
    let ratio = if monotone { last / at_zero } else { 1.0 };
    out.push(Check::bounded(S, "translation_decay", ratio, 1e-6));

    // derivative field against a central finite difference
    let zbar = Complex64::new(0.4, -2.0);
    let h = 1e-5;
    let fd = (forward_transform(&f, order, zbar + h).unwrap_or_default()
        - forward_transform(&f, order, zbar - h).unwrap_or_default())
        / (2.0 * h);
    let d = derivative_field(&f, order, zbar).unwrap_or_default();
    out.push(Check::bounded(S, "derivative_vs_finite_difference", rel_c(d, fd), 1e-8));

    // Euler operator dual-path agreement at random points
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x11);
    let mut worst = 0.0f64;
    for _ in 0..4 {
        let zbar = Complex64::new(rng.gen_range(-3.0..3.0), -rng.gen_range(0.5..3.0));
        let direct = forward_transform(&f.q_times_derivative().unwrap(), order, zbar)
            .unwrap_or_default();
        let mapped = match apply_euler_operator(&f, order, zbar) {
            Ok(_) => {
                // internal assertion passed; measure the residual explicitly
                let field = forward_transform(&f, order, zbar).unwrap_or_default();
                let dfield = derivative_field(&f, order, zbar).unwrap_or_default();
                -(zbar * dfield + (order.gamma() + 1.0) * field)
            }
            Err(_) => Complex64::new(f64::NAN, 0.0),
        };
        worst = worst.max(rel_c(mapped, direct));
    }
    out.push(Check::bounded(S, "euler_operator_dual_path", worst, 1e-10));

    // pinned radial norms
    let e = RadialProfile::power_exp(1.0, 1.0, 1.0).unwrap();
    let root = RadialProfile::power_exp(1.0, 0.5, 1.0).unwrap();
    let worst = rel(l2_norm_radial(&e).unwrap_or(f64::NAN), 0.25)
        .max(rel(l2_norm_radial(&root).unwrap_or(f64::NAN), 0.25));
    out.push(Check::bounded(S, "radial_norm_closed_forms", worst, 1e-13));

    // Bergman-weighted isometry on the dense family, n <= 4
    let order = TransformOrder::new(0.6).unwrap();
    let alpha = 0.25;
    let mut worst = 0.0f64;
    for n in 0..=4u32 {
        let f = RadialProfile::power_exp(1.0, alpha + n as f64, 1.0).unwrap();
        let lhs = bergman_weighted_integral(&f, order).unwrap_or(f64::NAN);
        let rhs = l2_norm_radial(&f).unwrap_or(f64::NAN);
        worst = worst.max(rel(lhs, rhs));
    }
    out.push(Check::bounded(S, "half_plane_isometry_dense_family", worst, 1e-3));

    // inner-product proportionality constant (the order+1 variant)
    let mut worst = 0.0f64;
    for g in [0.4, 0.8] {
        let order = TransformOrder::new(g).unwrap();
        let constant = agamma_constant(g).unwrap_or(f64::NAN);
        let psi0 = RadialProfile::power_exp(1.0, 0.0, 1.0).unwrap();
        let psi1 = RadialProfile::power_exp(1.0, 1.0, 1.0).unwrap();
        let pairing = agamma_inner_product(&psi0, &psi1, order).unwrap_or_default();
        let radial = radial_inner_product(&psi0, &psi1).unwrap_or_default();
        worst = worst.max(rel_c(pairing, radial * constant));
    }
    out.push(Check::bounded(S, "inner_product_proportionality", worst, 1e-3));

    // decay exponent estimator on pole fields
    let single = CoefficientField::Poles(vec![PoleTerm::new(
        Complex64::new(1.0, 0.0),
        1.3,
        Complex64::new(0.0, 1.0),
    )
    .unwrap()]);
    let pair = CoefficientField::Poles(vec![
        PoleTerm::new(Complex64::new(1.0, 0.0), 1.3, Complex64::new(0.0, 1.0)).unwrap(),
        PoleTerm::new(Complex64::new(2.0, 0.0), 2.3, Complex64::new(0.5, 2.0)).unwrap(),
    ]);
    let worst = (decay_exponent_estimate(&single, -std::f64::consts::FRAC_PI_2)
        .unwrap_or(f64::NAN)
        + 1.3)
        .abs()
        .max((decay_exponent_estimate(&pair, -2.0).unwrap_or(f64::NAN) + 1.3).abs());
    out.push(Check::bounded(S, "decay_exponent_estimate", worst, 0.01));

    // bitwise order independence of grid evaluation
    let order = TransformOrder::new(0.9).unwrap();
    let points: Vec<Complex64> = (0..64)
        .map(|i| Complex64::new(-3.0 + 0.1 * i as f64, -0.4 - 0.05 * i as f64))
        .collect();
    let forward: Vec<Complex64> = points
        .iter()
        .map(|&z| forward_transform(&f, order, z).unwrap_or_default())
        .collect();
    let mut reversed: Vec<Complex64> = points
        .iter()
        .rev()
        .map(|&z| forward_transform(&f, order, z).unwrap_or_default())
        .collect();
    reversed.reverse();
    let bitwise_equal = forward
        .iter()
        .zip(&reversed)
        .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
    out.push(Check::bounded(
        S,
        "grid_evaluation_order_independence",
        if bitwise_equal { 0.0 } else { 1.0 },
        0.5,
    ));
}

fn inverse_suite(cfg: &VerifyConfig, out: &mut Vec<Check>) {
    const S: &str = "inverse";

    let mut worst = 0.0f64;
    for g in [0.3, 0.6, 0.9, 1.5] {
        let order = TransformOrder::new(g).unwrap();
        let w = ReconstructionWavelet::new(order).unwrap();
        worst = worst.max(w.biorthogonality_defect());
    }
    out.push(Check::bounded(S, "biorthogonality_pairing", worst, 1e-10));

    // pinned single-pole inversion
    let order = TransformOrder::new(0.8).unwrap();
    let t = PoleTerm::new(
        Complex64::new(gamma(1.3).unwrap(), 0.0),
        1.3,
        Complex64::new(0.0, 1.0),
    )
    .unwrap();
    let back = crate::inverse::invert_pole_term(&t, order).unwrap();
    let worst = (back.coeff - Complex64::new(1.0, 0.0))
        .norm()
        .max((back.power - 0.5).abs())
        .max((back.rate - Complex64::new(1.0, 0.0)).norm());
    out.push(Check::bounded(S, "pole_term_inversion_pinned", worst, 1e-13));

    // hypergeometric transform pair: Gauss field -> confluent profile
    let g = 0.7;
    let two_g = 2.0 * g;
    let order = TransformOrder::new(g).unwrap();
    let mut worst = 0.0f64;
    for n in 0u32..=5 {
        let mut poles = Vec::new();
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let mut binom = 1.0;
            for j in 0..k {
                binom = binom * (n - j) as f64 / (j + 1) as f64;
            }
            poles.push(
                PoleTerm::new(
                    Complex64::new(sign * binom * two_g / (two_g + k as f64), 0.0),
                    two_g + k as f64,
                    Complex64::new(0.0, 1.0),
                )
                .unwrap(),
            );
        }
        let profile = reconstruct(&CoefficientField::Poles(poles), order).unwrap();
        let prefactor = 1.0 / gamma(two_g).unwrap();
        for &q in &[0.05f64, 0.7, 3.0, 11.0] {
            let expect = prefactor
                * q.powf(g - 1.0)
                * (-q).exp()
                * hyp1f1_terminating(n, two_g + 1.0, q).unwrap();
            let got = profile.eval(q).re;
            let scale = prefactor * q.powf(g - 1.0) * (-q).exp();
            worst = worst.max((got - expect).abs() / scale);
        }
    }
    out.push(Check::bounded(S, "gauss_to_confluent_transform_pair", worst, 1e-12));

    // round-trip identity on random term profiles across both regimes
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x20);
    let mut worst = 0.0f64;
    for g in [0.3, 0.6, 0.9] {
        let order = TransformOrder::new(g).unwrap();
        for _ in 0..67 {
            let terms: Vec<PowerExpTerm> = (0..3)
                .map(|_| {
                    PowerExpTerm::new(
                        Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
                        rng.gen_range(0.2..3.0),
                        Complex64::new(rng.gen_range(0.5..2.0), rng.gen_range(-0.5..0.5)),
                    )
                    .unwrap()
                })
                .collect();
            let f = RadialProfile::from_terms(terms);
            worst = worst.max(roundtrip_check(&f, order).unwrap_or(f64::INFINITY));
        }
    }
    out.push(Check::bounded(S, "roundtrip_identity_random_profiles", worst, 1e-9));

    // operator image property on random pole fields
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x21);
    let order = TransformOrder::new(0.6).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let poles: Vec<PoleTerm> = (0..2)
            .map(|_| {
                PoleTerm::new(
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    0.6 + rng.gen_range(0.0..2.5),
                    Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.5..2.0)),
                )
                .unwrap()
            })
            .collect();
        // operator_image carries the 1e-10 internal agreement assertion
        if operator_image(&CoefficientField::Poles(poles), order).is_err() {
            worst = f64::INFINITY;
        }
    }
    out.push(Check::bounded(S, "operator_image_agreement", worst, 1e-10));

    // reconstruction linearity at the exact term level
    let t1 = PoleTerm::new(Complex64::new(1.5, 0.3), 1.7, Complex64::new(0.2, 1.0)).unwrap();
    let t2 = PoleTerm::new(Complex64::new(-0.4, 1.1), 2.4, Complex64::new(0.0, 2.0)).unwrap();
    let fa = CoefficientField::Poles(vec![t1]);
    let fb = CoefficientField::Poles(vec![t2]);
    let combined = fa
        .scaled(Complex64::new(2.0, 0.0))
        .add(&fb.scaled(Complex64::new(0.0, 1.0)))
        .unwrap();
    let rc = reconstruct(&combined, order).unwrap();
    let manual = reconstruct(&fa, order)
        .unwrap()
        .scaled(Complex64::new(2.0, 0.0))
        .add(
            &reconstruct(&fb, order)
                .unwrap()
                .scaled(Complex64::new(0.0, 1.0)),
        )
        .unwrap();
    let exact = rc
        .terms()
        .unwrap()
        .iter()
        .zip(manual.terms().unwrap())
        .all(|(a, b)| a == b);
    out.push(Check::bounded(
        S,
        "reconstruction_linearity",
        if exact { 0.0 } else { 1.0 },
        0.5,
    ));

    // loose direct-quadrature validation of the semi-analytic inverse
    let t = PoleTerm::new(
        Complex64::new(gamma(1.5).unwrap(), 0.0),
        1.5,
        Complex64::new(0.0, 1.0),
    )
    .unwrap();
    let field = CoefficientField::Poles(vec![t]);
    let order = TransformOrder::new(0.7).unwrap();
    let exact = reconstruct(&field, order).unwrap();
    let q = 1.2;
    let direct =
        crate::inverse::reconstruct_direct_quadrature(&field, order, q, 400.0).unwrap_or_default();
    out.push(Check::bounded(
        S,
        "direct_quadrature_reconstruction",
        rel_c(direct, exact.eval(q)),
        1e-2,
    ));
}

fn dirac_suite(cfg: &VerifyConfig, out: &mut Vec<Check>) {
    const S: &str = "dirac";

    // quantization identities over the physical state set
    let mut worst = 0.0f64;
    for kappa in [-3i32, -2, -1, 1, 2, 3] {
        for n in 0..=4u32 {
            if n == 0 && kappa > 0 {
                continue;
            }
            for protons in [1u32, 20, 80] {
                match CouplingParams::quantized(protons as f64 * ALPHA, kappa, n) {
                    Ok(p) => {
                        worst = worst.max((p.eta_tilde - n as f64).abs());
                        worst = worst.max((p.eta + n as f64 + 2.0 * p.gamma).abs());
                    }
                    Err(_) => worst = f64::INFINITY,
                }
            }
        }
    }
    out.push(Check::bounded(S, "quantization_condition", worst, 1e-12));

    // n = 0 selection rule: P2 = chi + |chi|
    let mut worst = 0.0f64;
    for kappa in [-3i32, -2, -1] {
        let p = CouplingParams::quantized(0.3, kappa, 0).unwrap();
        let (_, p2) = p.spinor_prefactors();
        worst = worst.max(p2.abs());
    }
    out.push(Check::bounded(S, "selection_rule_prefactor", worst, 1e-12));

    // projector algebra on random subcritical draws
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x30);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let kappa = [-3i32, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
        let lambda = rng.gen_range(0.05..0.95) * kappa.unsigned_abs() as f64;
        let eps = rng.gen_range(0.05..0.95);
        let p = CouplingParams::from_epsilon(lambda, kappa, eps).unwrap();
        if build_matrices(&p).is_err() {
            worst = f64::INFINITY;
        }
    }
    out.push(Check::bounded(S, "projector_matrix_algebra", worst, 1e-12));

    // spectrum: pinned ground state, exact degeneracy, level ordering
    let eps_ground = epsilon_over_m_quantized(ALPHA, -1, 0).unwrap_or(f64::NAN);
    let mut worst = (eps_ground - (1.0 - ALPHA * ALPHA).sqrt()).abs();
    let s = epsilon_over_m_quantized(ALPHA, -1, 1).unwrap_or(f64::NAN);
    let p = epsilon_over_m_quantized(ALPHA, 1, 1).unwrap_or(f64::NAN);
    worst = worst.max((s - p).abs());
    let rows = spectrum_table(1, 2, 2, ALPHA);
    let p12 = rows.iter().find(|r| r.term_symbol == "2P1/2").unwrap();
    let p32 = rows.iter().find(|r| r.term_symbol == "2P3/2").unwrap();
    if !(p32.epsilon_over_m > p12.epsilon_over_m) {
        worst = f64::INFINITY;
    }
    out.push(Check::bounded(S, "spectrum_identities", worst, 1e-14));

    // nonrelativistic limit: deviation over 2 lambda^4
    let mut worst = 0.0f64;
    for protons in [1u32, 5, 10] {
        let lambda = protons as f64 * ALPHA;
        for kappa in [-3i32, -2, -1, 1, 2, 3] {
            for n in 0..=4u32 {
                if (n == 0 && kappa > 0) || n + kappa.unsigned_abs() > 4 {
                    continue;
                }
                let dev = nonrelativistic_limit_check(protons, kappa, n, ALPHA)
                    .unwrap_or(f64::INFINITY);
                worst = worst.max(dev / (2.0 * lambda.powi(4)));
            }
        }
    }
    out.push(Check::bounded(S, "nonrelativistic_limit", worst, 1.0));

    // dual eigenfunction representation across the state set
    let mut worst = 0.0f64;
    for protons in [1u32, 20, 80] {
        for kappa in [-3i32, -2, -1, 1, 2, 3] {
            for n in 0..=4u32 {
                if n == 0 && kappa > 0 {
                    continue;
                }
                let p = CouplingParams::quantized(protons as f64 * ALPHA, kappa, n).unwrap();
                let z_ref = Complex64::new(0.0, -2.0);
                let closed_ref = phi_closed(&p, z_ref).unwrap();
                let integral_ref = match phi_integral(&p, z_ref) {
                    Ok(v) => v,
                    Err(_) => {
                        worst = f64::INFINITY;
                        continue;
                    }
                };
                let pick = if closed_ref[0].norm() > closed_ref[1].norm() {
                    0
                } else {
                    1
                };
                let constant = closed_ref[pick] / integral_ref[pick];
                for i in 0..20 {
                    let zbar =
                        Complex64::new(-3.0 + 6.0 * i as f64 / 19.0, -0.6 - 2.0 * i as f64 / 19.0);
                    let closed = phi_closed(&p, zbar).unwrap();
                    let integral = match phi_integral(&p, zbar) {
                        Ok(v) => v,
                        Err(_) => {
                            worst = f64::INFINITY;
                            continue;
                        }
                    };
                    let scale = closed[0].norm().max(closed[1].norm());
                    for c in 0..2 {
                        worst = worst.max((integral[c] * constant - closed[c]).norm() / scale);
                    }
                }
            }
        }
    }
    out.push(Check::bounded(S, "dual_eigenspinor_representation", worst, cfg.verify_rel));

    // forward transform of the configuration eigenspinor reproduces the
    // wavelet spinor with one shared constant
    let mut worst = 0.0f64;
    for (kappa, n, protons) in [(-1i32, 0u32, 1u32), (-1, 2, 20), (2, 1, 80), (-3, 4, 80)] {
        let p = CouplingParams::quantized(protons as f64 * ALPHA, kappa, n).unwrap();
        let spinor = radial_eigenfunction(&p).unwrap();
        let order = p.order();
        let z0 = Complex64::new(0.4, -1.1);
        let constant = forward_transform(&spinor.f, order, z0).unwrap_or_default()
            / phi_closed(&p, z0).unwrap()[0];
        for i in 0..10 {
            let zbar = Complex64::new(-2.0 + 0.45 * i as f64, -0.5 - 0.2 * i as f64);
            let phi = phi_closed(&p, zbar).unwrap();
            let tf = forward_transform(&spinor.f, order, zbar).unwrap_or_default();
            let tg = forward_transform(&spinor.g, order, zbar).unwrap_or_default();
            let scale = phi[0].norm().max(phi[1].norm()) * constant.norm();
            worst = worst.max((tf - constant * phi[0]).norm() / scale);
            worst = worst.max((tg - constant * phi[1]).norm() / scale);
        }
    }
    out.push(Check::bounded(S, "transform_consistency", worst, 1e-9));

    // eigen-spinor residual in the radial system (fault-injectable)
    let grid: Vec<f64> = (0..60)
        .map(|i| 0.05 + (25.0 - 0.05) * i as f64 / 59.0)
        .collect();
    let mut worst = 0.0f64;
    for kappa in [-3i32, -2, -1, 1, 2, 3] {
        for n in 0..=4u32 {
            if n == 0 && kappa > 0 {
                continue;
            }
            for protons in [1u32, 20, 80] {
                let p = CouplingParams::quantized(protons as f64 * ALPHA, kappa, n).unwrap();
                let spinor = radial_eigenfunction(&p).unwrap();
                let res = if cfg.perturb_epsilon {
                    perturbed_residual(&p, &spinor, &grid, 0.99)
                } else {
                    ode_residual(&p, &spinor, &grid)
                };
                worst = worst.max(res.unwrap_or(f64::INFINITY));
            }
        }
    }
    out.push(Check::bounded(S, "radial_system_residual", worst, 1e-9));

    // ... and the residual must detect a 1% energy detuning
    let p = CouplingParams::quantized(20.0 * ALPHA, -1, 1).unwrap();
    let spinor = radial_eigenfunction(&p).unwrap();
    let detuned = perturbed_residual(&p, &spinor, &grid, 0.99).unwrap_or(0.0);
    out.push(Check::at_least(S, "detuned_energy_detected", detuned, 1e-3));

    // endpoint exponent gamma - 1 of the radial eigenfunctions; the fit
    // window sits at the low end of [1e-4, 1e-2] so the e^(-q)-envelope
    // correction (~0.2 q_max per unit coefficient ratio) stays below the
    // 1e-3 tolerance
    let p = CouplingParams::quantized(80.0 * ALPHA, -1, 1).unwrap();
    let spinor = radial_eigenfunction(&p).unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..20 {
        let q = 1e-4 * 10f64.powf(i as f64 / 19.0);
        xs.push((q as f64).ln());
        ys.push(spinor.f.eval(q).norm().ln());
    }
    let nf = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let slope: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    out.push(Check::bounded(
        S,
        "endpoint_exponent",
        (slope - (p.gamma - 1.0)).abs(),
        1e-3,
    ));

    // wavelet-spinor asymptotic slope -2 gamma along two rays
    let mut worst = 0.0f64;
    for (kappa, n, protons) in [(-1i32, 1u32, 1u32), (-2, 0, 20), (1, 2, 80)] {
        let p = CouplingParams::quantized(protons as f64 * ALPHA, kappa, n).unwrap();
        let spinor = phi_pole_fields(&p).unwrap();
        for theta in [-std::f64::consts::FRAC_PI_2, -2.2] {
            let slope = decay_exponent_windowed(&spinor.upper, theta, 1e3, 1e5, 33)
                .unwrap_or(f64::NAN);
            worst = worst.max((slope + 2.0 * p.gamma).abs() / (2.0 * p.gamma));
        }
    }
    out.push(Check::bounded(S, "wavelet_spinor_asymptotics", worst, 0.01));
}

/// Render checks as aligned text lines, one per check.
pub fn render_text(checks: &[Check], cfg: &VerifyConfig) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# seed={} quadrature_rel={:e} verify_rel={:e} perturb_epsilon={}\n",
        cfg.seed, cfg.quadrature_rel, cfg.verify_rel, cfg.perturb_epsilon
    ));
    for c in checks {
        out.push_str(&format!(
            "{} {}.{}: residual={} tolerance={}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            crate::report::fmt_float(c.residual),
            crate::report::fmt_float(c.tolerance),
        ));
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    out.push_str(&format!("{passed}/{} checks passed\n", checks.len()));
    out
}

/// Render checks as a JSON document with the run configuration under meta.
pub fn render_json(checks: &[Check], cfg: &VerifyConfig) -> String {
    let doc = serde_json::json!({
        "meta": {
            "seed": cfg.seed,
            "quadrature_rel": cfg.quadrature_rel,
            "verify_rel": cfg.verify_rel,
            "perturb_epsilon": cfg.perturb_epsilon,
        },
        "checks": checks.iter().map(|c| serde_json::json!({
            "suite": c.suite,
            "name": c.name,
            "residual": if c.residual.is_finite() { serde_json::json!(c.residual) } else { serde_json::json!("infinite") },
            "tolerance": c.tolerance,
            "passed": c.passed,
        })).collect::<Vec<_>>(),
        "passed": checks.iter().all(|c| c.passed),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    text
}
