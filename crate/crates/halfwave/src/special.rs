//! Gamma function, principal complex powers, and the terminating
//! hypergeometric series used by the closed-form transforms.
//!
//! Everything here is an exact finite computation up to rounding: the
//! hypergeometric evaluators only accept nonpositive-integer numerator
//! parameters (degree-n polynomials), where the series is a finite sum of
//! n+1 terms accumulated with compensated summation.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("ln_gamma requires a positive argument, got {0}")]
    NonPositiveArgument(f64),
    #[error("principal power base {0} lies outside the right half-plane (branch-cut hazard)")]
    BranchCutHazard(Complex64),
    #[error("lower series parameter must be positive, got {0}")]
    NonPositiveLowerParameter(f64),
    #[error("series evaluation overflowed at degree {0}")]
    SeriesOverflow(u32),
    #[error("gamma overflow for argument {0}")]
    GammaOverflow(f64),
}

/// Compensated (Neumaier) accumulator for f64 sums.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    correction: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.correction += (self.sum - t) + value;
        } else {
            self.correction += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.correction
    }
}

/// Compensated accumulator for complex sums (per-component Neumaier).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub(crate) fn add(&mut self, value: Complex64) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    pub(crate) fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

// Lanczos coefficients, g = 607/128, 15 terms (Godfrey's set). Relative error
// of the rational part is below 1e-15 across the positive axis.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEFFS: [f64; 15] = [
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    3.3994649984811888699e-5,
    4.6523628927048575665e-5,
    -9.8374475304879564677e-5,
    1.5808870322491248884e-4,
    -2.1026444172410488319e-4,
    2.1743961811521264320e-4,
    -1.6431810653676389022e-4,
    8.4418223983852743293e-5,
    -2.6190838401581408670e-5,
    3.6899182659531622704e-6,
];

const HALF_LN_TWO_PI: f64 = 0.91893853320467274178;

/// Natural log of the gamma function on the positive axis.
///
/// Integer arguments 1 and 2 return exactly 0.
pub fn ln_gamma(x: f64) -> Result<f64, SpecialError> {
    if !(x > 0.0) {
        return Err(SpecialError::NonPositiveArgument(x));
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    // Lanczos: lnGamma(x) = (x-1/2)ln(t) - t + ln(sqrt(2pi) * S(x)), t = x + g - 1/2.
    let z = x - 1.0;
    let mut series = CompensatedSum::default();
    series.add(LANCZOS_COEFFS[0]);
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series.add(c / (z + k as f64));
    }
    let t = z + LANCZOS_G + 0.5;
    Ok((z + 0.5) * t.ln() - t + HALF_LN_TWO_PI + series.value().ln())
}

/// Gamma function for positive arguments, via `ln_gamma`.
pub fn gamma(x: f64) -> Result<f64, SpecialError> {
    let lg = ln_gamma(x)?;
    if lg > 709.0 {
        return Err(SpecialError::GammaOverflow(x));
    }
    Ok(lg.exp())
}

/// Principal-branch power w^s for bases in the open right half-plane.
///
/// Every complex power taken by the closed-form transform machinery has a
/// base of the form i(z̄ − z̄₀) with Im z̄ < 0 < Im z̄₀, whose real part is
/// strictly positive, so the principal branch is globally consistent.
/// Bases with Re w ≤ 0 are rejected rather than silently evaluated.
pub fn principal_power(w: Complex64, s: f64) -> Result<Complex64, SpecialError> {
    if !(w.re > 0.0) {
        return Err(SpecialError::BranchCutHazard(w));
    }
    if s == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    // exp(s * Log w) with the principal log; atan2 is safe here since re > 0.
    let modulus = w.norm();
    let argument = w.im.atan2(w.re);
    let scale = (s * modulus.ln()).exp();
    Ok(Complex64::from_polar(scale, s * argument))
}

/// Rising factorial (x)_k = x(x+1)...(x+k-1), with (x)_0 = 1.
pub fn pochhammer(x: f64, k: u32) -> f64 {
    let mut product = 1.0;
    for j in 0..k {
        product *= x + j as f64;
    }
    product
}

fn binomial(n: u32, k: u32) -> f64 {
    // Multiplicative form; exact in f64 for the degrees used here.
    let k = k.min(n - k.min(n));
    let mut value = 1.0;
    for j in 0..k {
        value = value * (n - j) as f64 / (j + 1) as f64;
    }
    value
}

/// Terminating Gauss series ₂F₁(−n, 2γ; 2γ+1; w) as the finite sum
/// Σ_{k=0}^{n} (−1)^k C(n,k) · 2γ/(2γ+k) · w^k.
///
/// The alternating sum loses digits for n ≳ 8 when accumulated naively, so
/// the terms go through a compensated accumulator.
pub fn hyp2f1_terminating(
    n: u32,
    two_gamma: f64,
    w: Complex64,
) -> Result<Complex64, SpecialError> {
    if !(two_gamma > 0.0) {
        return Err(SpecialError::NonPositiveLowerParameter(two_gamma));
    }
    let mut sum = ComplexSum::default();
    let mut w_pow = Complex64::new(1.0, 0.0);
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign * binomial(n, k) * two_gamma / (two_gamma + k as f64);
        sum.add(w_pow * coeff);
        w_pow *= w;
    }
    let value = sum.value();
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(SpecialError::SeriesOverflow(n));
    }
    Ok(value)
}

/// Terminating confluent series ₁F₁(−n, c; q) = Σ_{k=0}^{n} (−n)_k/((c)_k k!) q^k.
pub fn hyp1f1_terminating(n: u32, c: f64, q: f64) -> Result<f64, SpecialError> {
    if !(c > 0.0) {
        return Err(SpecialError::NonPositiveLowerParameter(c));
    }
    let mut sum = CompensatedSum::default();
    let mut term = 1.0;
    sum.add(term);
    for k in 0..n {
        // term_{k+1} = term_k * (-n+k)/( (c+k)(k+1) ) * q
        term *= (k as f64 - n as f64) / ((c + k as f64) * (k as f64 + 1.0)) * q;
        sum.add(term);
    }
    let value = sum.value();
    if !value.is_finite() {
        return Err(SpecialError::SeriesOverflow(n));
    }
    Ok(value)
}

/// Which terminating hypergeometric pattern a series spec describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// ₂F₁(−n, c−1; c; w) with c = 2γ+1 (wavelet-space eigenspinors).
    Gauss,
    /// ₁F₁(−n, c; q) with c = 2γ+1 (configuration-space eigenspinors).
    Confluent,
}

/// A terminating hypergeometric series: degree, lower parameter, and kind.
///
/// Evaluation is always an exact finite sum of `degree + 1` terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminatingSeriesSpec {
    pub degree: u32,
    pub lower: f64,
    pub kind: SeriesKind,
}

impl TerminatingSeriesSpec {
    pub fn new(degree: u32, lower: f64, kind: SeriesKind) -> Result<Self, SpecialError> {
        if !(lower > 0.0) {
            return Err(SpecialError::NonPositiveLowerParameter(lower));
        }
        Ok(Self {
            degree,
            lower,
            kind,
        })
    }

    pub fn evaluate(&self, argument: Complex64) -> Result<Complex64, SpecialError> {
        match self.kind {
            SeriesKind::Gauss => hyp2f1_terminating(self.degree, self.lower - 1.0, argument),
            SeriesKind::Confluent => {
                debug_assert!(argument.im == 0.0);
                hyp1f1_terminating(self.degree, self.lower, argument.re)
                    .map(|v| Complex64::new(v, 0.0))
            }
        }
    }
}
