//! Holomorphic test functions: truncated Taylor series on the disc and the
//! plane, and rational functions with poles in the lower half-plane.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A complex function evaluated pointwise.
pub trait ComplexFn: Send + Sync {
    fn eval(&self, z: Complex64) -> Result<Complex64>;
}

impl<F> ComplexFn for F
where
    F: Fn(Complex64) -> Result<Complex64> + Send + Sync,
{
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        self(z)
    }
}

/// `b / (z + a + ic)^k`; the pole `-a - ic` lies in the lower half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalTerm {
    pub b: Complex64,
    pub c: f64,
    pub k: u32,
    /// Real shift `a`.
    pub a: f64,
}

impl RationalTerm {
    pub fn new(b: Complex64, c: f64, k: u32) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("rational term needs c > 0, got {c}")));
        }
        if k == 0 {
            return Err(Error::Domain("rational term needs k >= 1".into()));
        }
        Ok(RationalTerm { b, c, k, a: 0.0 })
    }

    /// `z + a + ic`.
    pub fn base(&self, z: Complex64) -> Complex64 {
        z + Complex64::new(self.a, self.c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HolomorphicFunction {
    /// `Σ aₙ zⁿ` with the radius of the function it represents.
    TaylorSeries {
        coefficients: Vec<Complex64>,
        radius: f64,
    },
    /// `Σ b_j / (z + a_j + i c_j)^{k_j}`.
    RationalHalfPlane { terms: Vec<RationalTerm> },
}

impl HolomorphicFunction {
    pub fn taylor(coefficients: Vec<Complex64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Domain(format!(
                "radius must be positive, got {radius}"
            )));
        }
        Ok(HolomorphicFunction::TaylorSeries {
            coefficients,
            radius,
        })
    }

    pub fn polynomial(coefficients: Vec<Complex64>) -> Self {
        HolomorphicFunction::TaylorSeries {
            coefficients,
            radius: f64::INFINITY,
        }
    }

    pub fn real_polynomial(coefficients: &[f64]) -> Self {
        Self::polynomial(
            coefficients
                .iter()
                .map(|&c| Complex64::new(c, 0.0))
                .collect(),
        )
    }

    pub fn monomial(n: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[n] = Complex64::new(1.0, 0.0);
        Self::polynomial(c)
    }

    /// `Σ_{n≤N} aⁿ zⁿ`, the truncation of `1/(1 - az)`.
    pub fn geometric(a: Complex64, n: usize) -> Self {
        let mut c = Vec::with_capacity(n + 1);
        let mut p = Complex64::new(1.0, 0.0);
        for _ in 0..=n {
            c.push(p);
            p *= a;
        }
        let radius = if a.norm() == 0.0 {
            f64::INFINITY
        } else {
            1.0 / a.norm()
        };
        HolomorphicFunction::TaylorSeries {
            coefficients: c,
            radius,
        }
    }

    /// `Σ_{n≤N} (az)ⁿ / n!`.
    pub fn exp_truncated(a: Complex64, n: usize) -> Self {
        let mut c = Vec::with_capacity(n + 1);
        let mut p = Complex64::new(1.0, 0.0);
        for k in 0..=n {
            if k > 0 {
                p = p * a / k as f64;
            }
            c.push(p);
        }
        Self::polynomial(c)
    }

    /// Polynomial of the given degree with coefficients uniform in `[-1,1]²`.
    pub fn random_polynomial(seed: u64, degree: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = (0..=degree)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Self::polynomial(c)
    }

    /// One to three terms with `b ∈ [-1,1]²`, `c ∈ [0.5, 2]`, `k ∈ {2, 3}`.
    pub fn random_rational(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3);
        let terms = (0..n)
            .map(|_| RationalTerm {
                b: Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                c: rng.gen_range(0.5..2.0),
                k: rng.gen_range(2..=3),
                a: rng.gen_range(-1.0..1.0),
            })
            .collect();
        HolomorphicFunction::RationalHalfPlane { terms }
    }

    pub fn rational(terms: Vec<RationalTerm>) -> Self {
        HolomorphicFunction::RationalHalfPlane { terms }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            HolomorphicFunction::TaylorSeries {
                coefficients,
                radius,
            } => {
                if radius.is_finite() && z.norm() >= *radius {
                    return Err(Error::Domain(format!(
                        "|z| = {} is outside the radius {radius}",
                        z.norm()
                    )));
                }
                Ok(horner(coefficients, z))
            }
            HolomorphicFunction::RationalHalfPlane { terms } => {
                let mut s = Complex64::new(0.0, 0.0);
                for t in terms {
                    let w = t.base(z);
                    if w.norm() == 0.0 {
                        return Err(Error::Domain(format!(
                            "pole of the rational function hit at z = {z}"
                        )));
                    }
                    s += t.b * w.powi(-(t.k as i32));
                }
                Ok(s)
            }
        }
    }

    pub fn coefficients(&self) -> Result<Vec<Complex64>> {
        match self {
            HolomorphicFunction::TaylorSeries { coefficients, .. } => Ok(coefficients.clone()),
            HolomorphicFunction::RationalHalfPlane { .. } => Err(Error::Unsupported(
                "rational half-plane functions have no Taylor coefficient model".into(),
            )),
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self {
            HolomorphicFunction::TaylorSeries { radius, .. } => Some(*radius),
            HolomorphicFunction::RationalHalfPlane { .. } => None,
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            HolomorphicFunction::TaylorSeries { coefficients, .. } => {
                Some(coefficients.len().saturating_sub(1))
            }
            HolomorphicFunction::RationalHalfPlane { .. } => None,
        }
    }

    /// Sum of two functions of the same variant.
    pub fn add(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (
                HolomorphicFunction::TaylorSeries {
                    coefficients: a,
                    radius: ra,
                },
                HolomorphicFunction::TaylorSeries {
                    coefficients: b,
                    radius: rb,
                },
            ) => {
                let n = a.len().max(b.len());
                let zero = Complex64::new(0.0, 0.0);
                let c = (0..n)
                    .map(|i| *a.get(i).unwrap_or(&zero) + *b.get(i).unwrap_or(&zero))
                    .collect();
                Ok(HolomorphicFunction::TaylorSeries {
                    coefficients: c,
                    radius: ra.min(*rb),
                })
            }
            (
                HolomorphicFunction::RationalHalfPlane { terms: a },
                HolomorphicFunction::RationalHalfPlane { terms: b },
            ) => Ok(HolomorphicFunction::RationalHalfPlane {
                terms: a.iter().chain(b).copied().collect(),
            }),
            _ => Err(Error::Unsupported(
                "cannot add a Taylor series and a rational function".into(),
            )),
        }
    }

    /// `z ↦ f(e^{iθ} z)` for Taylor series.
    pub fn rotate(&self, theta: f64) -> Result<Self> {
        let c = self.coefficients()?;
        let r = Complex64::from_polar(1.0, theta);
        let mut p = Complex64::new(1.0, 0.0);
        let rotated = c
            .into_iter()
            .map(|a| {
                let v = a * p;
                p *= r;
                v
            })
            .collect();
        HolomorphicFunction::taylor(rotated, self.radius().unwrap_or(f64::INFINITY))
    }

    /// `z ↦ f(z + a)` for real `a` (rational functions).
    pub fn translate(&self, a: f64) -> Result<Self> {
        match self {
            HolomorphicFunction::RationalHalfPlane { terms } => {
                Ok(HolomorphicFunction::RationalHalfPlane {
                    terms: terms
                        .iter()
                        .map(|t| RationalTerm { a: t.a + a, ..*t })
                        .collect(),
                })
            }
            _ => Err(Error::Unsupported(
                "translation applies to rational functions".into(),
            )),
        }
    }

    /// `Σ |b_j| / (Im z + c_j)^{k_j}`, an upper bound for `|f(z)|` when `Im z ≥ 0`.
    pub fn vertical_majorant(&self, im: f64) -> Option<f64> {
        match self {
            HolomorphicFunction::RationalHalfPlane { terms } => Some(
                terms
                    .iter()
                    .map(|t| t.b.norm() / (im + t.c).powi(t.k as i32))
                    .sum(),
            ),
            _ => None,
        }
    }
}

impl ComplexFn for HolomorphicFunction {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        HolomorphicFunction::eval(self, z)
    }
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

impl fmt::Display for HolomorphicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HolomorphicFunction::TaylorSeries { coefficients, .. } => {
                let parts: Vec<String> = coefficients.iter().map(|c| fmt_complex(*c)).collect();
                write!(f, "taylor:[{}]", parts.join(","))
            }
            HolomorphicFunction::RationalHalfPlane { terms } => {
                let parts: Vec<String> = terms
                    .iter()
                    .map(|t| {
                        if t.a == 0.0 {
                            format!("({},{},{})", fmt_complex(t.b), t.c, t.k)
                        } else {
                            format!("({},{},{},{})", fmt_complex(t.b), t.c, t.k, t.a)
                        }
                    })
                    .collect();
                write!(f, "rational:[{}]", parts.join(","))
            }
        }
    }
}

/// Shared handle to a pointwise function.
pub type SharedFn = Arc<dyn ComplexFn>;
