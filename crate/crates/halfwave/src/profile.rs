//! Configuration-space function class: finite sums of power–exponential
//! terms C q^(p−1) e^(−s q), or sampled grids with an assumed endpoint
//! power and exponential tail.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("term power must be nonnegative, got {0}")]
    NegativePower(f64),
    #[error("term rate must have positive real part, got {0}")]
    NonDecayingRate(Complex64),
    #[error("sampled grid must be strictly increasing with q_1 > 0")]
    BadGrid,
    #[error("sampled grid and value lengths differ: {grid} vs {values}")]
    LengthMismatch { grid: usize, values: usize },
    #[error("operation requires a term-list profile")]
    TermListRequired,
}

/// One power–exponential term C q^(p−1) e^(−s q).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerExpTerm {
    pub coeff: Complex64,
    /// field power p; the q-exponent in the term is p − 1
    pub power: f64,
    /// decay rate s with Re s > 0
    pub rate: Complex64,
}

impl PowerExpTerm {
    pub fn new(coeff: Complex64, power: f64, rate: Complex64) -> Result<Self, ProfileError> {
        // p = 0 is the alpha = 0 limit case q^(-1) e^(-sq); q^gamma * f stays
        // locally integrable for every gamma > 0.
        if !(power >= 0.0) {
            return Err(ProfileError::NegativePower(power));
        }
        if !(rate.re > 0.0) {
            return Err(ProfileError::NonDecayingRate(rate));
        }
        Ok(Self { coeff, power, rate })
    }

    pub fn real(coeff: f64, power: f64, rate: f64) -> Result<Self, ProfileError> {
        Self::new(
            Complex64::new(coeff, 0.0),
            power,
            Complex64::new(rate, 0.0),
        )
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        self.coeff * q.powf(self.power - 1.0) * (-self.rate * q).exp()
    }
}

/// Sampled radial profile: strictly increasing grid with q_1 > 0, values on
/// the grid, a power-law model q^(p0−1) below the grid and an exponential
/// tail beyond it. Interior evaluation uses monotone (Fritsch–Carlson)
/// cubic interpolation per component to avoid overshoot near the q→0
/// power behaviour.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    grid: Vec<f64>,
    values: Vec<Complex64>,
    endpoint_power: f64,
    tail_rate: f64,
    slopes: Vec<Complex64>,
}

fn pchip_slopes(grid: &[f64], values: &[f64]) -> Vec<f64> {
    let n = grid.len();
    if n == 1 {
        return vec![0.0];
    }
    let h: Vec<f64> = grid.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = values
        .windows(2)
        .zip(&h)
        .map(|(v, h)| (v[1] - v[0]) / h)
        .collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            // weighted harmonic mean (Fritsch–Carlson)
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // clamp endpoint slopes to preserve monotonicity of the first/last piece
    for (i, di) in [(0usize, 0usize), (n - 1, n - 2)] {
        if m[i] * delta[di] <= 0.0 {
            m[i] = 0.0;
        } else if m[i].abs() > 3.0 * delta[di].abs() {
            m[i] = 3.0 * delta[di];
        }
    }
    m
}

impl SampledProfile {
    pub fn new(
        grid: Vec<f64>,
        values: Vec<Complex64>,
        endpoint_power: f64,
        tail_rate: Option<f64>,
    ) -> Result<Self, ProfileError> {
        if grid.len() != values.len() {
            return Err(ProfileError::LengthMismatch {
                grid: grid.len(),
                values: values.len(),
            });
        }
        if grid.is_empty() || grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ProfileError::BadGrid);
        }
        if !(endpoint_power >= 0.0) {
            return Err(ProfileError::NegativePower(endpoint_power));
        }
        let tail_rate = match tail_rate {
            Some(r) if r > 0.0 => r,
            Some(_) => return Err(ProfileError::BadGrid),
            None => Self::estimate_tail_rate(&grid, &values),
        };
        let re: Vec<f64> = values.iter().map(|v| v.re).collect();
        let im: Vec<f64> = values.iter().map(|v| v.im).collect();
        let sr = pchip_slopes(&grid, &re);
        let si = pchip_slopes(&grid, &im);
        let slopes = sr
            .into_iter()
            .zip(si)
            .map(|(r, i)| Complex64::new(r, i))
            .collect();
        Ok(Self {
            grid,
            values,
            endpoint_power,
            tail_rate,
            slopes,
        })
    }

    fn estimate_tail_rate(grid: &[f64], values: &[Complex64]) -> f64 {
        let n = grid.len();
        if n >= 2 {
            let a = values[n - 2].norm();
            let b = values[n - 1].norm();
            if a > 0.0 && b > 0.0 && b < a {
                return ((a / b).ln() / (grid[n - 1] - grid[n - 2])).max(1e-3);
            }
        }
        1.0
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn endpoint_power(&self) -> f64 {
        self.endpoint_power
    }

    pub fn tail_rate(&self) -> f64 {
        self.tail_rate
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        let first = self.grid[0];
        let last = *self.grid.last().unwrap();
        if q <= first {
            return self.values[0] * (q / first).powf(self.endpoint_power - 1.0);
        }
        if q >= last {
            let tail = self.values[self.grid.len() - 1];
            return tail * (-(q - last) * self.tail_rate).exp();
        }
        let idx = match self.grid.binary_search_by(|g| g.total_cmp(&q)) {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        let h = self.grid[idx + 1] - self.grid[idx];
        let t = (q - self.grid[idx]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        self.values[idx] * h00
            + self.slopes[idx] * (h10 * h)
            + self.values[idx + 1] * h01
            + self.slopes[idx + 1] * (h11 * h)
    }
}

/// A configuration-space radial function: term list or sampled grid.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialProfile {
    Terms(Vec<PowerExpTerm>),
    Sampled(SampledProfile),
}

impl RadialProfile {
    pub fn zero() -> Self {
        RadialProfile::Terms(Vec::new())
    }

    pub fn from_terms(terms: Vec<PowerExpTerm>) -> Self {
        RadialProfile::Terms(terms)
    }

    /// Single term C q^(p−1) e^(−s q) with real data.
    pub fn power_exp(coeff: f64, power: f64, rate: f64) -> Result<Self, ProfileError> {
        Ok(RadialProfile::Terms(vec![PowerExpTerm::real(
            coeff, power, rate,
        )?]))
    }

    pub fn terms(&self) -> Result<&[PowerExpTerm], ProfileError> {
        match self {
            RadialProfile::Terms(t) => Ok(t),
            RadialProfile::Sampled(_) => Err(ProfileError::TermListRequired),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RadialProfile::Terms(t) => t.iter().all(|t| t.coeff.norm() == 0.0),
            RadialProfile::Sampled(s) => s.values.iter().all(|v| v.norm() == 0.0),
        }
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        match self {
            RadialProfile::Terms(terms) => terms.iter().map(|t| t.eval(q)).sum(),
            RadialProfile::Sampled(s) => s.eval(q),
        }
    }

    /// Smallest field power p over the terms (or the assumed endpoint power);
    /// controls the q→0 integrable singularity q^(γ+p−1).
    pub fn min_power(&self) -> f64 {
        match self {
            RadialProfile::Terms(terms) => terms
                .iter()
                .map(|t| t.power)
                .fold(f64::INFINITY, f64::min)
                .min(f64::INFINITY),
            RadialProfile::Sampled(s) => s.endpoint_power,
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        match self {
            RadialProfile::Terms(terms) => RadialProfile::Terms(
                terms
                    .iter()
                    .map(|t| PowerExpTerm {
                        coeff: t.coeff * factor,
                        ..*t
                    })
                    .collect(),
            ),
            RadialProfile::Sampled(s) => {
                let mut s = s.clone();
                for v in &mut s.values {
                    *v *= factor;
                }
                for v in &mut s.slopes {
                    *v *= factor;
                }
                RadialProfile::Sampled(s)
            }
        }
    }

    /// Term-wise sum; both profiles must be term lists.
    pub fn add(&self, other: &Self) -> Result<Self, ProfileError> {
        let mut terms = self.terms()?.to_vec();
        terms.extend_from_slice(other.terms()?);
        Ok(RadialProfile::Terms(terms))
    }

    /// Exact q·d/dq applied term-wise:
    /// C q^(p−1) e^(−sq)  ↦  C(p−1) q^(p−1) e^(−sq) − C s q^p e^(−sq).
    pub fn q_times_derivative(&self) -> Result<Self, ProfileError> {
        let mut out = Vec::new();
        for t in self.terms()? {
            if t.coeff.norm() == 0.0 {
                continue;
            }
            if t.power != 1.0 {
                out.push(PowerExpTerm {
                    coeff: t.coeff * (t.power - 1.0),
                    ..*t
                });
            }
            out.push(PowerExpTerm {
                coeff: -t.coeff * t.rate,
                power: t.power + 1.0,
                rate: t.rate,
            });
        }
        Ok(RadialProfile::Terms(out))
    }

    /// Multiplication by q (power shift by one).
    pub fn times_q(&self) -> Result<Self, ProfileError> {
        Ok(RadialProfile::Terms(
            self.terms()?
                .iter()
                .map(|t| PowerExpTerm {
                    power: t.power + 1.0,
                    ..*t
                })
                .collect(),
        ))
    }

    /// Collapse duplicate (power, rate) keys; used by exactness tests.
    pub fn canonicalized(&self) -> Result<Self, ProfileError> {
        let mut terms: Vec<PowerExpTerm> = Vec::new();
        for t in self.terms()? {
            if let Some(existing) = terms
                .iter_mut()
                .find(|e| (e.power - t.power).abs() < 1e-12 && (e.rate - t.rate).norm() < 1e-12)
            {
                existing.coeff += t.coeff;
            } else {
                terms.push(*t);
            }
        }
        terms.retain(|t| t.coeff.norm() > 0.0);
        terms.sort_by(|a, b| {
            a.power
                .total_cmp(&b.power)
                .then(a.rate.re.total_cmp(&b.rate.re))
                .then(a.rate.im.total_cmp(&b.rate.im))
        });
        Ok(RadialProfile::Terms(terms))
    }
}
