//! Area norms `‖f‖_{p,ω}` and Hardy norms on the disc and the half-plane.
//!
//! Hardy norms carry the factor `1/2π` (disc circle means and half-plane line
//! integrals alike); the value without it is reported alongside.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::ComplexFn;
use crate::quadrature::{circle_mean, integrate_maps, integrate_real, Domain, Map, QuadOptions};
use crate::weights::{Geometry, WeightFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// First angular node count; doubled until two counts agree.
    pub angular_start: usize,
    pub angular_max: usize,
    /// Rungs `r_k = 1 - 2^{-k}` (disc) or `y_k = 2^{-k}` (half-plane), `k = 1..=depth`.
    pub ladder_depth: u32,
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            angular_start: 64,
            angular_max: 1 << 14,
            ladder_depth: 40,
            tol: 1e-11,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.ladder_depth = depth;
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.angular_start.is_power_of_two() || !self.angular_max.is_power_of_two() {
            return Err(Error::Domain(
                "angular node counts must be powers of two".into(),
            ));
        }
        if self.ladder_depth == 0 || !(self.tol > 0.0) {
            return Err(Error::Domain(
                "ladder depth and tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Area,
    Hardy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormResult {
    /// Area norms: as in the defining display (with `1/2π` on the disc and
    /// plane, without it on the half-plane). Hardy norms: normalized by `1/2π`.
    pub value: f64,
    /// With the `1/2π` factor in every geometry.
    pub normalized: f64,
    /// Without the `1/2π` factor.
    pub unnormalized: f64,
    pub p: f64,
    pub space: Space,
    pub geometry: Geometry,
    pub est_rel_err: f64,
    /// `(r or y, normalized mean)` per rung for Hardy norms.
    pub ladder: Vec<(f64, f64)>,
    /// Whether the ladder means are monotone toward the boundary.
    pub monotone: Option<bool>,
}

impl NormResult {
    /// `normalized^p`.
    pub fn normalized_pow(&self) -> f64 {
        self.normalized.powf(self.p)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "norms are defined for 1 <= p < ∞, got {p}"
        )))
    }
}

/// Circle mean of `|f|^p` at radius `r` with angular doubling. When `p` is
/// not an even integer a zero of `f` near the circle leaves a cusp in `|f|^p`
/// that the trapezoid rule resolves only algebraically; adaptive quadrature
/// in `θ` takes over once doubling stalls.
fn circle_power_mean(
    f: &dyn ComplexFn,
    r: f64,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let mean = |m: usize| -> Result<f64> {
        Ok(circle_mean(m, |theta| {
            Ok(Complex64::new(
                f.eval(Complex64::from_polar(r, theta))?.norm().powf(p),
                0.0,
            ))
        })?
        .re)
    };
    let mut m = spec.angular_start;
    let mut prev = mean(m)?;
    loop {
        m *= 2;
        let next = mean(m)?;
        let diff = (next - prev).abs();
        if diff <= spec.tol * next.abs() || next == 0.0 {
            return Ok((next, diff / next.abs().max(f64::MIN_POSITIVE)));
        }
        if m >= spec.angular_max {
            let opts = QuadOptions::rel(spec.tol).with_abs(1e-300).with_split(64);
            let (v, e) = integrate_real(Domain::Finite(0.0, 2.0 * PI), &[], &opts, |theta| {
                Ok(f.eval(Complex64::from_polar(r, theta))?.norm().powf(p))
            })
            .map_err(|e| match e {
                Error::Accuracy {
                    achieved, target, ..
                } => Error::Accuracy {
                    context: format!("circle mean at r = {r}"),
                    achieved,
                    target,
                },
                other => other,
            })?;
            let mean = v / (2.0 * PI);
            return Ok((mean, e / v.abs().max(f64::MIN_POSITIVE)));
        }
        prev = next;
    }
}

/// `∫_ℝ |f(x + iy)|^p dx`.
fn line_power_integral(f: &dyn ComplexFn, y: f64, p: f64, tol: f64) -> Result<(f64, f64)> {
    let scale = 1.0 + y;
    let est = integrate_maps(
        &[Map::Lower { b: 0.0, scale }, Map::Upper { a: 0.0, scale }],
        &[],
        1,
        &QuadOptions::rel(tol).with_abs(0.0),
        |x, out| {
            out[0] = f.eval(Complex64::new(x, y))?.norm().powf(p);
            Ok(())
        },
    )?;
    Ok((est.values[0], est.max_rel_error()))
}

/// `‖f‖_{p,ω}`: `[(1/2π)∫dθ ∫|f(√u e^{iθ})|^p (-dω(u))]^{1/p}` on the disc and
/// plane, `[∫dω(v) ∫|f(x + iv/2)|^p dx]^{1/p}` on the half-plane.
pub fn area_norm(
    w: &WeightFunction,
    p: f64,
    f: &dyn ComplexFn,
    spec: &QuadratureSpec,
) -> Result<NormResult> {
    check_p(p)?;
    spec.validate()?;
    let outer = QuadOptions::rel(spec.tol).with_abs(1e-300);
    match w.geometry() {
        Geometry::Disc | Geometry::Plane => {
            let end = if w.geometry() == Geometry::Disc {
                1.0
            } else {
                f64::INFINITY
            };
            let mut worst: f64 = 0.0;
            let est = w.stieltjes(0.0, end, 1, &outer, |u, out| {
                let (m, e) = circle_power_mean(f, u.sqrt(), p, spec)?;
                worst = worst.max(e);
                out[0] = -m;
                Ok(())
            })?;
            let pow = est.values[0].max(0.0);
            let value = pow.powf(1.0 / p);
            Ok(NormResult {
                value,
                normalized: value,
                unnormalized: (2.0 * PI * pow).powf(1.0 / p),
                p,
                space: Space::Area,
                geometry: w.geometry(),
                est_rel_err: (est.max_rel_error() + worst) / p,
                ladder: Vec::new(),
                monotone: None,
            })
        }
        Geometry::HalfPlane => {
            let mut worst: f64 = 0.0;
            let inner_tol = (0.1 * spec.tol).max(1e-13);
            let est = w.stieltjes(0.0, f64::INFINITY, 1, &outer, |v, out| {
                let (s, e) = line_power_integral(f, 0.5 * v, p, inner_tol)?;
                worst = worst.max(e);
                out[0] = s;
                Ok(())
            })?;
            let pow = est.values[0].max(0.0);
            let value = pow.powf(1.0 / p);
            Ok(NormResult {
                value,
                normalized: (pow / (2.0 * PI)).powf(1.0 / p),
                unnormalized: value,
                p,
                space: Space::Area,
                geometry: Geometry::HalfPlane,
                est_rel_err: (est.max_rel_error() + worst) / p,
                ladder: Vec::new(),
                monotone: None,
            })
        }
    }
}

/// Hardy norm as the supremum of the normalized means over the ladder.
pub fn hardy_norm(
    geometry: Geometry,
    p: f64,
    f: &dyn ComplexFn,
    spec: &QuadratureSpec,
) -> Result<NormResult> {
    check_p(p)?;
    spec.validate()?;
    let rungs: Vec<f64> = (1..=spec.ladder_depth)
        .map(|k| match geometry {
            Geometry::HalfPlane => 0.5f64.powi(k as i32),
            _ => 1.0 - 0.5f64.powi(k as i32),
        })
        .collect();
    let means: Vec<(f64, f64)> = match geometry {
        Geometry::Disc => rungs
            .par_iter()
            .map(|&r| circle_power_mean(f, r, p, spec))
            .collect::<Result<_>>()?,
        Geometry::HalfPlane => {
            let tol = (0.1 * spec.tol).max(1e-13);
            rungs
                .par_iter()
                .map(|&y| line_power_integral(f, y, p, tol).map(|(v, e)| (v / (2.0 * PI), e)))
                .collect::<Result<_>>()?
        }
        Geometry::Plane => {
            return Err(Error::Unsupported(
                "Hardy norms are defined on the disc and the half-plane".into(),
            ))
        }
    };
    let slack = 1e-12;
    let monotone = means
        .windows(2)
        .all(|w| w[1].0 >= w[0].0 * (1.0 - slack) - 1e-300);
    let (best, _) = means
        .iter()
        .copied()
        .fold((0.0f64, 0.0f64), |acc, m| if m.0 > acc.0 { m } else { acc });
    let last = means.len() - 1;
    let change = if means[last].0 > 0.0 {
        (means[last].0 - means[last - 1].0).abs() / means[last].0
    } else {
        0.0
    };
    let quad_err = means.iter().map(|m| m.1).fold(0.0, f64::max);
    let value = best.powf(1.0 / p);
    Ok(NormResult {
        value,
        normalized: value,
        unnormalized: (2.0 * PI * best).powf(1.0 / p),
        p,
        space: Space::Hardy,
        geometry,
        est_rel_err: (change + quad_err) / p,
        ladder: rungs
            .iter()
            .zip(&means)
            .map(|(r, m)| (*r, m.0.powf(1.0 / p)))
            .collect(),
        monotone: Some(monotone),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{HolomorphicFunction, RationalTerm};
    use crate::weights::{make_linear_weight, make_power_weight};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disc_area_monomial() {
        let w = make_power_weight(Geometry::Disc, 1.0).unwrap();
        let n = area_norm(
            &w,
            2.0,
            &HolomorphicFunction::monomial(1),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((n.value * n.value - 0.5).abs() < 1e-12);
        let zero = HolomorphicFunction::real_polynomial(&[0.0]);
        assert_eq!(
            area_norm(&w, 2.0, &zero, &QuadratureSpec::default())
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn half_plane_area_example() {
        let w = make_linear_weight(0.5, Some(2.0)).unwrap();
        let f =
            HolomorphicFunction::rational(vec![RationalTerm::new(c(1.0, 0.0), 1.0, 2).unwrap()]);
        let n = area_norm(&w, 2.0, &f, &QuadratureSpec::default()).unwrap();
        assert!(
            (n.value * n.value - 3.0 * PI / 16.0).abs() < 1e-10,
            "{}",
            n.value
        );
        assert!((n.normalized.powi(2) - 3.0 / 32.0).abs() < 1e-10);
    }

    #[test]
    fn hardy_examples() {
        let spec = QuadratureSpec::default();
        let n = hardy_norm(
            Geometry::Disc,
            2.0,
            &HolomorphicFunction::monomial(3),
            &spec,
        )
        .unwrap();
        assert!((n.value - 1.0).abs() < 1e-10);
        assert_eq!(n.monotone, Some(true));
        let k = HolomorphicFunction::real_polynomial(&[-2.5]);
        assert!((hardy_norm(Geometry::Disc, 3.0, &k, &spec).unwrap().value - 2.5).abs() < 1e-12);
        let f =
            HolomorphicFunction::rational(vec![RationalTerm::new(c(1.0, 0.0), 1.0, 1).unwrap()]);
        let h = hardy_norm(Geometry::HalfPlane, 2.0, &f, &spec).unwrap();
        assert!((h.value - 0.5f64.sqrt()).abs() < 1e-9, "{}", h.value);
    }

    #[test]
    fn parseval() {
        let f = HolomorphicFunction::random_polynomial(11, 7);
        let sum: f64 = f.coefficients().unwrap().iter().map(|a| a.norm_sqr()).sum();
        let h = hardy_norm(Geometry::Disc, 2.0, &f, &QuadratureSpec::default()).unwrap();
        assert!((h.value * h.value - sum).abs() < 1e-10 * sum);
    }

    #[test]
    fn rejects_small_p() {
        let w = make_power_weight(Geometry::Disc, 1.0).unwrap();
        let f = HolomorphicFunction::monomial(1);
        assert!(matches!(
            area_norm(&w, 0.5, &f, &QuadratureSpec::default()),
            Err(Error::Domain(_))
        ));
        assert!(hardy_norm(Geometry::Plane, 2.0, &f, &QuadratureSpec::default()).is_err());
    }
}
