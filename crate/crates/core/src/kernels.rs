//! The kernels `C_ω(z) = Σ zⁿ/Δₙ` (disc), `C_ω^∞(z) = Σ zⁿ/Δₙ^∞` (plane) and
//! `C_ω(z) = ∫₀^∞ e^{itz} / I_ω(t) dt` (half-plane).

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{self, laplace_symbol, LaplaceSymbol, MomentSequence};
use crate::quadrature::{integrate_complex_maps, integrate_maps, Map, QuadOptions};
use crate::special::{cpow_neg, trigamma};
use crate::weights::{Family, Geometry, WeightFunction};

/// Largest radius at which disc evaluation is offered.
pub const DISC_RADIUS_LIMIT: f64 = 0.98;
/// Consecutive ratios below one required by the series stopping rule.
pub const STABLE_RATIOS: usize = 8;
const MAX_TERMS: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelMode {
    Series,
    Quadrature,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    /// Target error, relative to `max(1, |C(z)|)`.
    pub tol: f64,
    /// Certified radius for the series modes; defaults to 0.9 (disc) and 10 (plane).
    pub r_max: Option<f64>,
    /// Smallest admissible `Im z` for half-plane quadrature.
    pub im_floor: f64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions {
            tol: 1e-12,
            r_max: None,
            im_floor: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ClosedKernel {
    /// `(1 - z)^{-(1+α)}`.
    DiscPower { alpha: f64 },
    /// `e^{γz}`.
    PlaneExp { gamma: f64 },
    /// `(-iz)^{-(2+α)}`.
    HalfPower { alpha: f64 },
    /// `ψ₁(-iz/Δ) / (aΔ²)`, or `(-iz)^{-2}/a` without a cap.
    HalfLinear { slope: f64, cap: Option<f64> },
}

impl ClosedKernel {
    fn of(w: &WeightFunction) -> Option<Self> {
        match (w.geometry(), w.family()) {
            (Geometry::Disc, Family::Power { alpha }) => {
                Some(ClosedKernel::DiscPower { alpha: *alpha })
            }
            (Geometry::Plane, Family::ExpDecay { gamma, rho, mu }) if *rho == 1.0 && *mu == 1.0 => {
                Some(ClosedKernel::PlaneExp { gamma: *gamma })
            }
            (Geometry::HalfPlane, _) => {
                if let Some((slope, cap)) = moments::linear_profile(w) {
                    return Some(ClosedKernel::HalfLinear { slope, cap });
                }
                match w.family() {
                    Family::Power { alpha } if !w.support_end().is_finite() => {
                        Some(ClosedKernel::HalfPower { alpha: *alpha })
                    }
                    _ => None,
                }
            }
            _ => None,
        }
    }

    fn eval(&self, z: Complex64) -> Complex64 {
        let miz = Complex64::new(z.im, -z.re);
        match *self {
            ClosedKernel::DiscPower { alpha } => {
                cpow_neg(Complex64::new(1.0, 0.0) - z, 1.0 + alpha)
            }
            ClosedKernel::PlaneExp { gamma } => (z * gamma).exp(),
            ClosedKernel::HalfPower { alpha } => cpow_neg(miz, 2.0 + alpha),
            ClosedKernel::HalfLinear { slope, cap } => match cap {
                Some(d) => trigamma(miz / d) / (slope * d * d),
                None => (miz * miz).inv() / slope,
            },
        }
    }
}

#[derive(Debug, Clone)]
enum Data {
    /// `coeffs[n] = r_maxⁿ / Δₙ`; `moments` keeps the finite prefix of `Δₙ`.
    Series {
        moments: MomentSequence,
        coeffs: Vec<f64>,
        r_max: f64,
    },
    Quadrature {
        symbol: LaplaceSymbol,
    },
    Closed(ClosedKernel),
}

#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    weight: Arc<WeightFunction>,
    mode: KernelMode,
    opts: KernelOptions,
    data: Data,
}

/// Running state of the series stopping rule.
struct SeriesSum {
    sum: Complex64,
    prev_abs: f64,
    ratios: [f64; STABLE_RATIOS],
    count: usize,
    seen: usize,
}

impl SeriesSum {
    fn new() -> Self {
        SeriesSum {
            sum: Complex64::new(0.0, 0.0),
            prev_abs: f64::NAN,
            ratios: [f64::INFINITY; STABLE_RATIOS],
            count: 0,
            seen: 0,
        }
    }

    /// Add a term; returns the geometric tail bound once the rule certifies it.
    fn push(&mut self, term: Complex64, tol: f64) -> Option<f64> {
        self.sum += term;
        let a = term.norm();
        if self.seen > 0 {
            let r = if self.prev_abs > 0.0 {
                a / self.prev_abs
            } else {
                f64::INFINITY
            };
            self.ratios[self.count % STABLE_RATIOS] = r;
            self.count += 1;
        }
        self.seen += 1;
        self.prev_abs = a;
        if a == 0.0 && self.seen > 1 {
            return Some(0.0);
        }
        if self.count < STABLE_RATIOS {
            return None;
        }
        let r = self.ratios.iter().copied().fold(0.0, f64::max);
        if r >= 1.0 {
            return None;
        }
        let tail = a * r / (1.0 - r);
        (tail < tol * self.sum.norm().max(1.0)).then_some(tail)
    }
}

impl KernelEvaluator {
    /// Preferred evaluator: closed form when the family has one, else series
    /// (disc, plane) or quadrature (half-plane).
    pub fn auto(w: &WeightFunction, opts: KernelOptions) -> Result<Self> {
        if ClosedKernel::of(w).is_some() {
            return Self::new(w, KernelMode::ClosedForm, opts);
        }
        let mode = match w.geometry() {
            Geometry::HalfPlane => KernelMode::Quadrature,
            _ => KernelMode::Series,
        };
        Self::new(w, mode, opts)
    }

    pub fn new(w: &WeightFunction, mode: KernelMode, opts: KernelOptions) -> Result<Self> {
        let data = match (mode, w.geometry()) {
            (KernelMode::ClosedForm, _) => Data::Closed(ClosedKernel::of(w).ok_or_else(|| {
                Error::Unsupported(format!("no closed-form kernel for {}", w.describe()))
            })?),
            (KernelMode::Series, Geometry::Disc) => {
                let r_max = opts.r_max.unwrap_or(0.9);
                if !(r_max > 0.0 && r_max <= DISC_RADIUS_LIMIT) {
                    return Err(Error::Domain(format!(
                        "disc series evaluation is offered for r_max in (0, {DISC_RADIUS_LIMIT}], got {r_max}"
                    )));
                }
                let (moments, coeffs) = certified_moments(w, r_max, opts.tol)?;
                Data::Series {
                    moments,
                    coeffs,
                    r_max,
                }
            }
            (KernelMode::Series, Geometry::Plane) => {
                let r_max = opts.r_max.unwrap_or(10.0);
                if !(r_max > 0.0 && r_max.is_finite()) {
                    return Err(Error::Domain(format!(
                        "r_max must be positive and finite, got {r_max}"
                    )));
                }
                let (moments, coeffs) = certified_moments(w, r_max, opts.tol)?;
                Data::Series {
                    moments,
                    coeffs,
                    r_max,
                }
            }
            (KernelMode::Quadrature, Geometry::HalfPlane) => Data::Quadrature {
                symbol: laplace_symbol(w)?,
            },
            (m, g) => return Err(Error::Unsupported(format!("{m:?} kernel mode on the {g}"))),
        };
        Ok(KernelEvaluator {
            weight: Arc::new(w.clone()),
            mode,
            opts,
            data,
        })
    }

    pub fn geometry(&self) -> Geometry {
        self.weight.geometry()
    }

    pub fn weight(&self) -> &Arc<WeightFunction> {
        &self.weight
    }

    pub fn mode(&self) -> KernelMode {
        self.mode
    }

    pub fn tol(&self) -> f64 {
        self.opts.tol
    }

    /// Certified radius of a series evaluator.
    pub fn r_max(&self) -> Option<f64> {
        match &self.data {
            Data::Series { r_max, .. } => Some(*r_max),
            _ => None,
        }
    }

    pub fn moments(&self) -> Option<&MomentSequence> {
        match &self.data {
            Data::Series { moments, .. } => Some(moments),
            _ => None,
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.eval_with_error(z).map(|(v, _)| v)
    }

    /// Value and an estimate of its absolute error.
    pub fn eval_with_error(&self, z: Complex64) -> Result<(Complex64, f64)> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain(format!("non-finite argument {z}")));
        }
        match self.geometry() {
            Geometry::Disc if z.norm() >= 1.0 => {
                return Err(Error::Domain(format!(
                    "|z| = {} is outside the unit disc",
                    z.norm()
                )))
            }
            Geometry::HalfPlane if z.im <= 0.0 => {
                return Err(Error::Domain(format!("Im z = {} is not positive", z.im)))
            }
            _ => {}
        }
        match &self.data {
            Data::Closed(c) => {
                let v = c.eval(z);
                Ok((v, 4.0 * f64::EPSILON * v.norm()))
            }
            Data::Series { coeffs, r_max, .. } => {
                if z.norm() > *r_max * (1.0 + 1e-12) {
                    return Err(Error::OutsideRadius {
                        r_max: *r_max,
                        modulus: z.norm(),
                    });
                }
                sum_series(coeffs, z / *r_max, self.opts.tol).ok_or_else(|| Error::Accuracy {
                    context: format!("kernel series at z = {z} did not certify"),
                    achieved: f64::INFINITY,
                    target: self.opts.tol,
                })
            }
            Data::Quadrature { symbol } => self.half_plane_quadrature(symbol, z),
        }
    }

    fn half_plane_quadrature(
        &self,
        symbol: &LaplaceSymbol,
        z: Complex64,
    ) -> Result<(Complex64, f64)> {
        if z.im < self.opts.im_floor {
            return Err(Error::Accuracy {
                context: format!(
                    "Im z = {} below the floor {} (oscillatory regime)",
                    z.im, self.opts.im_floor
                ),
                achieved: f64::INFINITY,
                target: self.opts.tol,
            });
        }
        let tol = self.opts.tol;
        let opts = QuadOptions::rel(tol).with_abs(0.0);
        let (x, y) = (z.re, z.im);
        let mut t_star = (40.0 / y).max(1.0);
        for _ in 0..12 {
            let split =
                ((x.abs() * t_star / (8.0 * std::f64::consts::PI)).ceil() as usize).clamp(1, 4096);
            let (body, body_err) = integrate_complex_maps(
                &[Map::Linear { a: 0.0, b: t_star }],
                &[],
                &opts.with_split(split),
                |t| {
                    if t == 0.0 {
                        return Ok(Complex64::new(0.0, 0.0));
                    }
                    let i = symbol.eval(t)?;
                    Ok(Complex64::new(0.0, t * x).exp() * ((-t * y).exp() / i))
                },
            )?;
            // majorant ∫_{t*}^∞ e^{-ty} / I(t) dt of the truncated tail
            let tail = integrate_maps(
                &[Map::Upper {
                    a: t_star,
                    scale: 1.0 / y,
                }],
                &[],
                1,
                &QuadOptions::rel(1e-3).with_abs(0.0),
                |t, out| {
                    let e = (-t * y).exp();
                    out[0] = if e == 0.0 { 0.0 } else { e / symbol.eval(t)? };
                    Ok(())
                },
            )?
            .values[0];
            let scale = body.norm().max(1.0);
            if tail <= 0.25 * tol * scale {
                return Ok((body, body_err + tail));
            }
            t_star *= 2.0;
        }
        Err(Error::Accuracy {
            context: format!("half-plane kernel tail at z = {z} did not fall below tolerance"),
            achieved: f64::INFINITY,
            target: tol,
        })
    }
}

/// `Σ coeffs[n] uⁿ` with `|u| ≤ 1`.
fn sum_series(coeffs: &[f64], u: Complex64, tol: f64) -> Option<(Complex64, f64)> {
    let mut s = SeriesSum::new();
    let mut pow = Complex64::new(1.0, 0.0);
    for c in coeffs {
        if let Some(tail) = s.push(pow * *c, tol) {
            return Some((s.sum, tail));
        }
        pow *= u;
        if pow == Complex64::new(0.0, 0.0) {
            return Some((s.sum, 0.0));
        }
    }
    None
}

/// `r_maxⁿ / Δₙ` from `ln |Δₙ|`, finite while the terms themselves are.
fn scaled_coeffs(values: &[f64], logs: Option<&[f64]>, r_max: f64) -> Vec<f64> {
    let lr = r_max.ln();
    (0..values.len().max(logs.map_or(0, <[f64]>::len)))
        .map(|n| {
            let (ln_abs, sign) = match values.get(n) {
                Some(v) if v.is_finite() => (v.abs().ln(), v.signum()),
                _ => (logs.expect("log moments cover the overflow range")[n], 1.0),
            };
            sign * (n as f64 * lr - ln_abs).exp()
        })
        .collect()
}

/// Moments `Δ₀..Δ_N` with `N` doubled from 64 until the series certifies at
/// `r_max`. Plane moments past the `f64` range are carried in log form when a
/// closed form exists.
fn certified_moments(
    w: &WeightFunction,
    r_max: f64,
    tol: f64,
) -> Result<(MomentSequence, Vec<f64>)> {
    let mut n = 64;
    loop {
        let (m, coeffs) = match w.geometry() {
            Geometry::Disc => {
                let m = moments::disc_moments(w, n)?;
                let c = scaled_coeffs(&m.values, None, r_max);
                (m, c)
            }
            _ => match moments::plane_moments(w, n) {
                Ok(m) => {
                    let c = scaled_coeffs(&m.values, None, r_max);
                    (m, c)
                }
                Err(Error::Accuracy {
                    context,
                    achieved,
                    target,
                }) => {
                    let Some(logs) = moments::plane_log_moments(w, n) else {
                        return Err(Error::Accuracy {
                            context: format!("{context}; reduce r_max"),
                            achieved,
                            target,
                        });
                    };
                    let finite = logs.iter().take_while(|l| **l < 700.0).count();
                    let m = moments::plane_moments(w, finite.saturating_sub(1))?;
                    let c = scaled_coeffs(&m.values, Some(&logs), r_max);
                    (m, c)
                }
                Err(e) => return Err(e),
            },
        };
        if sum_series(&coeffs, Complex64::new(1.0, 0.0), tol).is_some() {
            return Ok((m, coeffs));
        }
        if n >= MAX_TERMS {
            return Err(Error::Accuracy {
                context: format!(
                    "kernel series not certified at r_max = {r_max} with {MAX_TERMS} moments"
                ),
                achieved: f64::INFINITY,
                target: tol,
            });
        }
        n *= 2;
    }
}

/// `|C(z)| |z|^exponent` along `Im z = im` at the given moduli.
pub fn decay_profile(
    k: &KernelEvaluator,
    im: f64,
    moduli: &[f64],
    exponent: f64,
) -> Result<Vec<f64>> {
    moduli
        .iter()
        .map(|&r| {
            let re = (r * r - im * im).max(0.0).sqrt();
            let z = Complex64::new(re, im);
            Ok(k.eval(z)?.norm() * z.norm().powf(exponent))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{make_linear_weight, make_named_weight, make_power_weight, NamedTag};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disc_power_closed_form_example() {
        let w = make_power_weight(Geometry::Disc, 1.0).unwrap();
        let k = KernelEvaluator::auto(&w, KernelOptions::default()).unwrap();
        assert!((k.eval(c(0.5, 0.0)).unwrap() - c(4.0, 0.0)).norm() < 1e-14);
        let s = KernelEvaluator::new(&w, KernelMode::Series, KernelOptions::default()).unwrap();
        assert!((s.eval(c(0.5, 0.0)).unwrap() - c(4.0, 0.0)).norm() < 1e-11);
        assert!((s.eval(c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn disc_series_matches_partial_sums() {
        let w = make_power_weight(Geometry::Disc, 2.0).unwrap();
        let k = KernelEvaluator::new(&w, KernelMode::Series, KernelOptions::default()).unwrap();
        let z = c(0.3, 0.2);
        let mut brute = c(0.0, 0.0);
        let mut p = c(1.0, 0.0);
        for n in 0..400 {
            brute += p * ((n as f64 + 1.0) * (n as f64 + 2.0) / 2.0);
            p *= z;
        }
        assert!((k.eval(z).unwrap() - brute).norm() < 1e-11);
    }

    #[test]
    fn disc_radius_guards() {
        let w = make_power_weight(Geometry::Disc, 1.0).unwrap();
        let o = KernelOptions {
            r_max: Some(0.99),
            ..Default::default()
        };
        assert!(matches!(
            KernelEvaluator::new(&w, KernelMode::Series, o),
            Err(Error::Domain(_))
        ));
        let k = KernelEvaluator::new(&w, KernelMode::Series, KernelOptions::default()).unwrap();
        assert!(matches!(
            k.eval(c(0.95, 0.0)),
            Err(Error::OutsideRadius { .. })
        ));
    }

    #[test]
    fn plane_exponential() {
        let w = make_named_weight(Geometry::Plane, NamedTag::ExpSimple).unwrap();
        let k = KernelEvaluator::new(&w, KernelMode::Series, KernelOptions::default()).unwrap();
        assert!((k.eval(c(1.0, 0.0)).unwrap().re - std::f64::consts::E).abs() < 1e-12);
        assert!((k.eval(c(-1.0, 0.0)).unwrap().re - 0.36787944117144233).abs() < 1e-12);
        let z = c(2.0, -3.0);
        assert!((k.eval(z).unwrap() - z.exp()).norm() < 1e-11 * z.exp().norm().max(1.0));
    }

    #[test]
    fn half_plane_power_examples() {
        let w = make_power_weight(Geometry::HalfPlane, 0.0).unwrap();
        let k = KernelEvaluator::auto(&w, KernelOptions::default()).unwrap();
        assert!((k.eval(c(0.0, 1.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((k.eval(c(0.0, 2.0)).unwrap() - c(0.25, 0.0)).norm() < 1e-15);
        assert!((k.eval(c(1.0, 1.0)).unwrap() - c(0.0, 0.5)).norm() < 1e-15);
        let q = KernelEvaluator::new(&w, KernelMode::Quadrature, KernelOptions::default()).unwrap();
        for z in [c(0.0, 1.0), c(1.0, 1.0), c(-2.5, 0.5)] {
            let (a, b) = (k.eval(z).unwrap(), q.eval(z).unwrap());
            assert!((a - b).norm() < 1e-9 * a.norm().max(1.0), "{z}: {a} vs {b}");
        }
        assert!(matches!(q.eval(c(1.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(q.eval(c(1.0, 0.01)), Err(Error::Accuracy { .. })));
    }

    #[test]
    fn half_plane_capped_linear_trigamma() {
        let w = make_linear_weight(0.5, Some(2.0)).unwrap();
        let k = KernelEvaluator::auto(&w, KernelOptions::default()).unwrap();
        let q = KernelEvaluator::new(&w, KernelMode::Quadrature, KernelOptions::default()).unwrap();
        for z in [c(0.0, 1.0), c(2.0, 0.5), c(-3.0, 1.5)] {
            let a = k.eval(z).unwrap();
            let expect = trigamma(c(z.im, -z.re) / 2.0) / 2.0;
            assert!((a - expect).norm() < 1e-14);
            let b = q.eval(z).unwrap();
            assert!((a - b).norm() < 1e-9 * a.norm().max(1.0), "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn plane_series_past_moment_overflow() {
        // Δₙ = Γ(1 + n/2) overflows near n = 342, well before the series certifies at r = 10
        let w = crate::weights::squash(
            &make_named_weight(Geometry::Plane, NamedTag::ExpSimple).unwrap(),
            crate::weights::SquashKind::SquareArg,
        )
        .unwrap();
        let k = KernelEvaluator::auto(&w, KernelOptions::default()).unwrap();
        assert_eq!(k.mode(), KernelMode::Series);
        // e^{x²} erfc(-x)
        let table = [
            (-1.0, 0.427583576155807),
            (0.5, 1.952360489182557),
            (2.0, 108.94090438997797),
            (6.0, 8622463094230390.0),
        ];
        for (x, exact) in table {
            let v = k.eval(c(x, 0.0)).unwrap();
            assert!(
                (v.re - exact).abs() < 1e-11 * exact.max(1.0),
                "{x}: {v} vs {exact}"
            );
        }
    }
}
