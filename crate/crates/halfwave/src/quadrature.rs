//! Quadrature machinery shared by the transform and inversion paths:
//! an adaptive Gauss–Kronrod rule for smooth complex integrands and a
//! Gauss–Jacobi rule (Golub–Welsch) for algebraic endpoint singularities.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::special::{gamma, ComplexSum};

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule
// (QUADPACK qk15 constants).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss–Kronrod 15(7) panel. Returns (K15 estimate, |K15 − G7|).
pub(crate) fn kronrod15<F>(f: &F, a: f64, b: f64) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..3 {
        let idx = 2 * j + 1;
        let dx = half * XGK[idx];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[idx];
        gauss += pair * WG[j];
    }
    for j in 0..4 {
        let idx = 2 * j;
        let dx = half * XGK[idx];
        kronrod += (f(center - dx) + f(center + dx)) * WGK[idx];
    }
    let value = kronrod * half;
    let err = (kronrod - gauss).norm() * half.abs();
    (value, err)
}

/// Adaptive integration on [a, b] down to an absolute tolerance:
/// worst-panel-first bisection with a hard panel budget, so an
/// unreachable tolerance degrades into a best-effort answer instead of
/// runaway subdivision.
pub(crate) fn integrate_adaptive<F>(f: &F, a: f64, b: f64, abs_tol: f64) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    integrate_adaptive_budget(f, a, b, abs_tol, 4000)
}

/// Same, with an explicit panel budget: pre-split oscillatory callers hand
/// each smooth sub-interval a small budget since convergence there is fast.
pub(crate) fn integrate_adaptive_budget<F>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    budget: usize,
) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let abs_tol = abs_tol.max(1e-300);
    let first = kronrod15(f, a, b);
    // panels: (err, lo, hi, value)
    let mut panels: Vec<(f64, f64, f64, Complex64)> = vec![(first.1, a, b, first.0)];
    let mut total_err = first.1;
    while total_err > abs_tol && panels.len() < budget {
        // split the worst panel (deterministic tie-break on the left edge)
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.0 > panels[worst].0 || (p.0 == panels[worst].0 && p.1 < panels[worst].1) {
                worst = i;
            }
        }
        let (err, lo, hi, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            // interval exhausted at f64 resolution
            let redo = kronrod15(f, lo, hi);
            panels.push((0.0, lo, hi, redo.0));
            total_err -= err;
            continue;
        }
        let left = kronrod15(f, lo, mid);
        let right = kronrod15(f, mid, hi);
        total_err += left.1 + right.1 - err;
        panels.push((left.1, lo, mid, left.0));
        panels.push((right.1, mid, hi, right.0));
    }
    panels.sort_by(|x, y| x.1.total_cmp(&y.1));
    let mut sum = ComplexSum::default();
    for p in &panels {
        sum.add(p.3);
    }
    (sum.value(), total_err)
}

/// Adaptive integration of an oscillatory integrand: the interval is
/// pre-split into panels no wider than pi/omega so the embedded error
/// estimate sees at most half a period per panel.
pub(crate) fn integrate_oscillatory<F>(
    f: &F,
    a: f64,
    b: f64,
    omega: f64,
    abs_tol: f64,
) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let width = b - a;
    if width <= 0.0 {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let max_panel = std::f64::consts::PI / omega.abs().max(1.0);
    let panels = (width / max_panel).ceil().max(1.0) as usize;
    let panel_tol = abs_tol / panels as f64;
    let mut sum = ComplexSum::default();
    let mut err = 0.0;
    for k in 0..panels {
        let lo = a + width * k as f64 / panels as f64;
        let hi = a + width * (k + 1) as f64 / panels as f64;
        let (value, e) = integrate_adaptive_budget(f, lo, hi, panel_tol, 64);
        sum.add(value);
        err += e;
    }
    (sum.value(), err)
}

/// Gauss–Jacobi rule on [0, 1] absorbing the weight x^beta, beta > -1.
///
/// `integrate(L, phi)` returns the nodes-and-weights approximation to
/// `\int_0^L q^beta phi(q) dq`; the singular factor lives in the weights, so
/// `phi` only needs to be smooth. Nodes come from the Golub–Welsch
/// symmetric tridiagonal eigenproblem for the Jacobi recurrence with
/// alpha = 0.
#[derive(Debug, Clone)]
pub(crate) struct JacobiRule {
    /// nodes on (0, 1), ascending
    nodes: Vec<f64>,
    /// weights including the 2^{-(beta+1)} interval map factor
    weights: Vec<f64>,
    beta: f64,
}

impl JacobiRule {
    pub(crate) fn new(degree: usize, beta: f64) -> Self {
        assert!(degree >= 2, "Jacobi rule needs at least two nodes");
        assert!(beta > -1.0, "Jacobi weight exponent must exceed -1");
        let alpha = 0.0f64;
        let mut companion = DMatrix::<f64>::zeros(degree, degree);
        let mut diag = (beta - alpha) / (2.0 + beta + alpha);
        for idx in 0..degree - 1 {
            let k = (idx + 1) as f64;
            let denom = 2.0 * k + alpha + beta;
            let off = 2.0 / denom
                * (k * (k + alpha) * (k + beta) * (k + alpha + beta)
                    / ((denom + 1.0) * (denom - 1.0)))
                    .sqrt();
            companion[(idx, idx)] = diag;
            companion[(idx, idx + 1)] = off;
            companion[(idx + 1, idx)] = off;
            diag = (beta * beta - alpha * alpha) / (denom * (denom + 2.0));
        }
        companion[(degree - 1, degree - 1)] = diag;

        let eigen = companion.symmetric_eigen();
        // total weight of (1-x)^0 (1+x)^beta over [-1, 1]
        let mu0 = 2f64.powf(alpha + beta + 1.0) * gamma(alpha + 1.0).unwrap()
            * gamma(beta + 1.0).unwrap()
            / gamma(alpha + beta + 2.0).unwrap();
        let mut pairs: Vec<(f64, f64)> = eigen
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let v = eigen.eigenvectors[(0, i)];
                (t, mu0 * v * v)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        // map t in [-1,1] to x in [0,1] with the singularity at x = 0:
        // \int_0^1 x^beta phi dx = 2^{-(beta+1)} \sum w_i phi((1+t_i)/2)
        let scale = 2f64.powf(-(beta + 1.0));
        let nodes = pairs.iter().map(|p| 0.5 * (1.0 + p.0)).collect();
        let weights = pairs.iter().map(|p| scale * p.1).collect();
        Self {
            nodes,
            weights,
            beta,
        }
    }

    pub(crate) fn integrate<F>(&self, length: f64, phi: &F) -> Complex64
    where
        F: Fn(f64) -> Complex64,
    {
        let stretch = length.powf(self.beta + 1.0);
        let mut sum = ComplexSum::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum.add(phi(x * length) * (w * stretch));
        }
        sum.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Complex64 {
        move |x| Complex64::new(f(x), 0.0)
    }

    #[test]
    fn kronrod_integrates_polynomials_exactly() {
        // degree <= 13 is exact for the embedded Gauss rule already
        let f = real(|x| 5.0 * x.powi(4) - 2.0 * x + 1.0);
        let (v, _) = kronrod15(&f, 0.0, 2.0);
        assert!((v.re - (32.0 - 4.0 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let omega = 40.0;
        let f = move |x: f64| Complex64::new(0.0, -omega * x).exp() * (-x).exp();
        let (v, _) = integrate_oscillatory(&f, 0.0, 30.0, omega, 1e-12);
        // exact: 1/(1 + i omega)
        let exact = Complex64::new(1.0, 0.0) / Complex64::new(1.0, omega);
        assert!((v - exact).norm() / exact.norm() < 1e-10);
    }

    #[test]
    fn jacobi_rule_matches_beta_integrals() {
        // \int_0^1 x^beta (1-x)^m dx = B(beta+1, m+1)
        for beta in [-0.7, -0.2, 0.0, 0.6, 1.9] {
            let rule = JacobiRule::new(24, beta);
            for m in [0.0, 1.0, 3.0] {
                let v = rule.integrate(1.0, &real(move |x| (1.0 - x).powf(m)));
                let exact = gamma(beta + 1.0).unwrap() * gamma(m + 1.0).unwrap()
                    / gamma(beta + m + 2.0).unwrap();
                assert!(
                    (v.re - exact).abs() / exact < 1e-13,
                    "beta={beta} m={m}: {v} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn jacobi_rule_scales_interval() {
        // \int_0^L q^{-1/2} e^{-q} dq = sum_k (-1)^k L^{k+1/2} / (k! (k+1/2)),
        // an independent series oracle that converges fast for L = 1
        let length = 1.0f64;
        let mut reference = 0.0;
        let mut factorial = 1.0;
        for k in 0..40 {
            let kf = k as f64;
            if k > 0 {
                factorial *= kf;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            reference += sign * length.powf(kf + 0.5) / (factorial * (kf + 0.5));
        }
        let rule = JacobiRule::new(48, -0.5);
        let v = rule.integrate(length, &real(|q| (-q).exp()));
        assert!(
            (v.re - reference).abs() < 1e-14,
            "{} vs {reference}",
            v.re
        );
    }
}
