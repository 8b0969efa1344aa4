//! Moment data of a weight: `Δₙ` on the disc, `Δₙ^∞` on the plane and the
//! Laplace symbol `I_ω` on the half-plane.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_maps, integrate_maps_with_gap, smoothing_exponent, Map, QuadOptions,
};
use crate::special::{beta_moment, gamma, ln_gamma};
use crate::weights::{Family, Geometry, SquashKind, WeightFunction};

/// Relative tolerance of the moment quadratures.
pub const MOMENT_REL_TOL: f64 = 1e-12;
/// Agreement required between the two moment formulas.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentMethod {
    Auto,
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSequence {
    pub geometry: Geometry,
    /// `Δ₀ ..= Δ_N`.
    pub values: Vec<f64>,
    /// Estimated relative error per entry.
    pub accuracy: Vec<f64>,
    pub source: String,
    pub method: MomentMethod,
}

impl MomentSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min_abs(&self) -> f64 {
        self.values
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }
}

pub fn disc_moments(w: &WeightFunction, n: usize) -> Result<MomentSequence> {
    disc_moments_with(w, n, MomentMethod::Auto)
}

pub fn plane_moments(w: &WeightFunction, n: usize) -> Result<MomentSequence> {
    plane_moments_with(w, n, MomentMethod::Auto)
}

/// `Δₙ = -∫₀¹ tⁿ dω(t)`; when `ω(1) = 0` the form `n∫₀¹ x^{n-1} ω(x) dx`
/// is evaluated alongside and must agree.
pub fn disc_moments_with(
    w: &WeightFunction,
    n: usize,
    method: MomentMethod,
) -> Result<MomentSequence> {
    if w.geometry() != Geometry::Disc {
        return Err(Error::Domain(format!(
            "disc moments requested for a {} weight",
            w.geometry()
        )));
    }
    let closed = if method == MomentMethod::Quadrature {
        None
    } else {
        closed_disc(w, n)
    };
    let (values, accuracy, used) = match (closed, method) {
        (Some(v), _) => {
            let acc = vec![f64::EPSILON * (n as f64 + 1.0); v.len()];
            (v, acc, MomentMethod::ClosedForm)
        }
        (None, MomentMethod::ClosedForm) => {
            return Err(Error::Unsupported(format!(
                "no closed-form moments for {}",
                w.describe()
            )))
        }
        (None, _) => {
            let (v, a) = disc_quadrature(w, n)?;
            (v, a, MomentMethod::Quadrature)
        }
    };
    check_nonzero(&values, &accuracy)?;
    Ok(MomentSequence {
        geometry: Geometry::Disc,
        values,
        accuracy,
        source: w.describe(),
        method: used,
    })
}

fn check_nonzero(values: &[f64], accuracy: &[f64]) -> Result<()> {
    for (k, (v, a)) in values.iter().zip(accuracy).enumerate() {
        if *v == 0.0 || !v.is_finite() || *a >= 1.0 {
            return Err(Error::ClassViolation(format!(
                "Δ_{k} = {v:e} is indistinguishable from zero (relative error {a:e})"
            )));
        }
    }
    let positive = values[0] > 0.0;
    if let Some(k) = values.iter().position(|v| (*v > 0.0) != positive) {
        return Err(Error::ClassViolation(format!(
            "moment sign changes at n = {k}"
        )));
    }
    Ok(())
}

fn disc_quadrature(w: &WeightFunction, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let opts = QuadOptions::rel(MOMENT_REL_TOL).with_abs(0.0);
    let dim = n + 1;
    let w1 = w.normalization().at_end;
    let by_parts = w1.abs() <= 1e-14 && w.has_derivative();
    let stieltjes_form = if w.has_derivative() {
        // both formulas in one pass: components [0, dim) hold -tⁿω', [dim, 2dim) hold n t^{n-1} ω
        let width = if by_parts { 2 * dim } else { dim };
        let maps = w.segments(0.0, 1.0, false);
        integrate_maps_with_gap(&maps, w.kinks(), width, &opts, |t, gap, out| {
            let d = w.derivative_near(t, gap)?;
            let v = if by_parts { w.value(t)? } else { 0.0 };
            let mut pow = 1.0;
            for k in 0..dim {
                out[k] = -pow * d;
                if by_parts {
                    out[dim + k] = if k + 1 < dim {
                        (k + 1) as f64 * pow * v
                    } else {
                        0.0
                    };
                }
                pow *= t;
            }
            Ok(())
        })?
    } else {
        w.stieltjes(0.0, 1.0, dim, &opts, |t, out| {
            let mut pow = -1.0;
            for o in out.iter_mut() {
                *o = pow;
                pow *= t;
            }
            Ok(())
        })?
    };
    let values: Vec<f64> = stieltjes_form.values[..dim].to_vec();
    let accuracy: Vec<f64> = values
        .iter()
        .zip(&stieltjes_form.errors[..dim])
        .map(|(v, e)| {
            if *v != 0.0 {
                e / v.abs()
            } else {
                f64::INFINITY
            }
        })
        .collect();
    if by_parts {
        let at_zero = w.normalization().at_zero;
        for k in 0..dim {
            let other = if k == 0 {
                at_zero
            } else {
                stieltjes_form.values[dim + k - 1]
            };
            let a = values[k];
            if (a - other).abs() > CROSS_CHECK_TOL * a.abs().max(other.abs()) {
                return Err(Error::Consistency(format!(
                    "Δ_{k}: Stieltjes form {a:e} vs area form {other:e}"
                )));
            }
        }
    }
    Ok((values, accuracy))
}

fn closed_disc(w: &WeightFunction, n: usize) -> Option<Vec<f64>> {
    match w.family() {
        Family::Power { alpha } => Some(closed_disc_power(*alpha, n)),
        Family::Squashed {
            base,
            kind: SquashKind::SquareArg,
        } => match base.family() {
            Family::Power { alpha } => Some(
                (0..=n)
                    .map(|k| beta_moment(k as f64 / 2.0, *alpha))
                    .collect(),
            ),
            _ => None,
        },
        Family::VolterraSquare { base } => {
            closed_disc(base, n).map(|v| v.iter().map(|x| x * x).collect())
        }
        Family::DerivedProjection { base, p, .. } => match base.family() {
            Family::Power { alpha } => {
                // ω = α^p (1-t)^k / k with k = (α-1)p + 1
                let k = (alpha - 1.0) * p + 1.0;
                (k > 0.0).then(|| {
                    let c = alpha.powf(*p) / k;
                    closed_disc_power(k, n).into_iter().map(|x| c * x).collect()
                })
            }
            _ => None,
        },
        _ => None,
    }
}

fn closed_disc_power(alpha: f64, n: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(n + 1);
    let mut d = 1.0;
    for k in 0..=n {
        if k > 0 {
            d *= k as f64 / (k as f64 + alpha);
        }
        v.push(d);
    }
    v
}

/// `Δₙ^∞ = -∫₀^∞ tⁿ dω(t)`.
pub fn plane_moments_with(
    w: &WeightFunction,
    n: usize,
    method: MomentMethod,
) -> Result<MomentSequence> {
    if w.geometry() != Geometry::Plane {
        return Err(Error::Domain(format!(
            "plane moments requested for a {} weight",
            w.geometry()
        )));
    }
    let closed = if method == MomentMethod::Quadrature {
        None
    } else {
        closed_plane(w, n)
    };
    let (values, accuracy, used) = match (closed, method) {
        (Some(v), _) => {
            let acc = vec![64.0 * f64::EPSILON; v.len()];
            (v, acc, MomentMethod::ClosedForm)
        }
        (None, MomentMethod::ClosedForm) => {
            return Err(Error::Unsupported(format!(
                "no closed-form moments for {}",
                w.describe()
            )))
        }
        (None, _) => {
            let (v, a) = plane_quadrature(w, n)?;
            (v, a, MomentMethod::Quadrature)
        }
    };
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Accuracy {
            context: format!("plane moment Δ_{k}^∞ overflows"),
            achieved: f64::INFINITY,
            target: MOMENT_REL_TOL,
        });
    }
    check_nonzero(&values, &accuracy)?;
    Ok(MomentSequence {
        geometry: Geometry::Plane,
        values,
        accuracy,
        source: w.describe(),
        method: used,
    })
}

fn exp_decay_moment(gamma_: f64, rho: f64, mu: f64, s: f64) -> f64 {
    exp_decay_log_moment(gamma_, rho, mu, s).exp()
}

fn exp_decay_log_moment(gamma_: f64, rho: f64, mu: f64, s: f64) -> f64 {
    ln_gamma(mu + s / rho) - ln_gamma(mu) - (s / rho) * gamma_.ln()
}

/// `ln Δₙ^∞` for `n ≤ N` where a closed form exists; finite past the point
/// where `Δₙ^∞` itself overflows.
pub fn plane_log_moments(w: &WeightFunction, n: usize) -> Option<Vec<f64>> {
    if w.geometry() != Geometry::Plane {
        return None;
    }
    let exp_decay = |g: f64, rho: f64, mu: f64| {
        (0..=n)
            .map(|k| exp_decay_log_moment(g, rho, mu, k as f64))
            .collect()
    };
    match w.family() {
        Family::ExpDecay { gamma: g, rho, mu } => Some(exp_decay(*g, *rho, *mu)),
        Family::Squashed {
            base,
            kind: SquashKind::SquareArg,
        } => match base.family() {
            Family::ExpDecay { gamma: g, rho, mu } => Some(exp_decay(*g, 2.0 * rho, *mu)),
            _ => None,
        },
        Family::VolterraSquare { base } => {
            plane_log_moments(base, n).map(|v| v.iter().map(|x| 2.0 * x).collect())
        }
        _ => None,
    }
}

fn closed_plane(w: &WeightFunction, n: usize) -> Option<Vec<f64>> {
    match w.family() {
        Family::ExpDecay { gamma: g, rho, mu } => {
            if *g == 1.0 && *rho == 1.0 && *mu == 1.0 {
                let mut v = Vec::with_capacity(n + 1);
                let mut f = 1.0;
                for k in 0..=n {
                    if k > 0 {
                        f *= k as f64;
                    }
                    v.push(f);
                }
                return Some(v);
            }
            Some(
                (0..=n)
                    .map(|k| exp_decay_moment(*g, *rho, *mu, k as f64))
                    .collect(),
            )
        }
        Family::Squashed {
            base,
            kind: SquashKind::SquareArg,
        } => match base.family() {
            Family::ExpDecay { gamma: g, rho, mu } => Some(
                (0..=n)
                    .map(|k| exp_decay_moment(*g, 2.0 * rho, *mu, k as f64))
                    .collect(),
            ),
            _ => None,
        },
        Family::VolterraSquare { base } => {
            closed_plane(base, n).map(|v| v.iter().map(|x| x * x).collect())
        }
        _ => None,
    }
}

fn plane_quadrature(w: &WeightFunction, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let opts = QuadOptions::rel(MOMENT_REL_TOL).with_abs(0.0);
    let dim = n + 1;
    let run = |dim: usize, lo: usize| {
        if w.has_derivative() {
            let maps = w.segments(0.0, f64::INFINITY, false);
            integrate_maps(&maps, w.kinks(), dim, &opts, |t, out| {
                let d = -w.derivative(t)?;
                if d == 0.0 || t == 0.0 {
                    out.iter_mut().for_each(|o| *o = 0.0);
                    if t == 0.0 && lo == 0 {
                        out[0] = d;
                    }
                    return Ok(());
                }
                let (lt, ld) = (t.ln(), d.abs().ln());
                for (k, o) in out.iter_mut().enumerate() {
                    *o = d.signum() * ((k + lo) as f64 * lt + ld).exp();
                }
                Ok(())
            })
        } else {
            w.stieltjes(0.0, f64::INFINITY, dim, &opts, |t, out| {
                for (k, o) in out.iter_mut().enumerate() {
                    *o = -t.powi((k + lo) as i32);
                }
                Ok(())
            })
        }
    };
    match run(dim, 0) {
        Ok(est) => {
            let acc = est
                .values
                .iter()
                .zip(&est.errors)
                .map(|(v, e)| {
                    if *v != 0.0 {
                        e / v.abs()
                    } else {
                        f64::INFINITY
                    }
                })
                .collect();
            Ok((est.values, acc))
        }
        Err(e) => {
            // name the first moment that fails on its own
            for k in 0..dim {
                if let Err(inner) = run(1, k) {
                    let achieved = match inner {
                        Error::Accuracy { achieved, .. } => achieved,
                        _ => f64::INFINITY,
                    };
                    return Err(Error::Accuracy {
                        context: format!("plane moment Δ_{k}^∞ (divergent tail?)"),
                        achieved,
                        target: MOMENT_REL_TOL,
                    });
                }
            }
            Err(e)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Symbol {
    /// `ω = t^{1+α}`, frozen beyond `cap`.
    Power {
        alpha: f64,
        cap: Option<f64>,
    },
    Linear {
        slope: f64,
        cap: Option<f64>,
    },
    /// `I(k t)`.
    Dilated {
        inner: Box<Symbol>,
        k: f64,
    },
    Squared(Box<Symbol>),
}

impl Symbol {
    fn eval(&self, t: f64) -> f64 {
        match self {
            Symbol::Power { alpha, cap } => {
                let a1 = 1.0 + alpha;
                if a1 == 0.0 {
                    return 1.0;
                }
                let full = gamma(1.0 + a1) / t.powf(a1);
                match cap {
                    None => full,
                    Some(c) => {
                        // t∫₀^c e^{-tx} x^{a1} dx + c^{a1} e^{-ct} = Γ(1+a1) P(a1, ct) / t^{a1}
                        full * statrs::function::gamma::gamma_lr(a1, c * t)
                    }
                }
            }
            Symbol::Linear { slope, cap } => match cap {
                None => slope / t,
                Some(c) => -slope * (-c * t).exp_m1() / t,
            },
            Symbol::Dilated { inner, k } => inner.eval(k * t),
            Symbol::Squared(inner) => {
                let v = inner.eval(t);
                v * v
            }
        }
    }
}

/// The linear profile `(slope, cap)` of a half-plane weight, when it has one.
pub fn linear_profile(w: &WeightFunction) -> Option<(f64, Option<f64>)> {
    let cap = w.support_end().is_finite().then_some(w.support_end());
    match w.family() {
        Family::Linear { slope } => Some((*slope, cap)),
        Family::Power { alpha } if *alpha == 0.0 => Some((1.0, cap)),
        Family::Squashed {
            base,
            kind: SquashKind::DoubleArg,
        } => linear_profile(base).map(|(s, _)| (2.0 * s, cap)),
        Family::DerivedProjection { base, p, .. } if w.geometry() == Geometry::HalfPlane => {
            linear_profile(base).map(|(s, _)| (0.5 * s.powf(*p), cap))
        }
        _ => None,
    }
}

fn closed_symbol(w: &WeightFunction) -> Option<Symbol> {
    if let Some((slope, cap)) = linear_profile(w) {
        return Some(Symbol::Linear { slope, cap });
    }
    let cap = w.support_end().is_finite().then_some(w.support_end());
    match w.family() {
        Family::Power { alpha } => Some(Symbol::Power { alpha: *alpha, cap }),
        Family::Squashed {
            base,
            kind: SquashKind::DoubleArg,
        } => closed_symbol(base).map(|s| Symbol::Dilated {
            inner: Box::new(s),
            k: 0.5,
        }),
        Family::VolterraSquare { base } => {
            closed_symbol(base).map(|s| Symbol::Squared(Box::new(s)))
        }
        _ => None,
    }
}

/// `I_ω(t) = t ∫₀^∞ e^{-tx} ω(x) dx` for a half-plane weight.
#[derive(Debug, Clone)]
pub struct LaplaceSymbol {
    weight: Arc<WeightFunction>,
    closed: Option<Symbol>,
    pub source: String,
}

/// Abscissae where the area and Stieltjes forms of `I_ω` are compared.
pub const LAPLACE_CHECK_POINTS: [f64; 6] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

pub fn laplace_symbol(w: &WeightFunction) -> Result<LaplaceSymbol> {
    laplace_symbol_with(w, MomentMethod::Auto)
}

pub fn laplace_symbol_with(w: &WeightFunction, method: MomentMethod) -> Result<LaplaceSymbol> {
    if w.geometry() != Geometry::HalfPlane {
        return Err(Error::Domain(format!(
            "Laplace symbol requested for a {} weight",
            w.geometry()
        )));
    }
    if matches!(w.family(), Family::ExpGrowth) && !w.support_end().is_finite() {
        return Err(Error::Domain(
            "the Laplace integral of e^t - 1 diverges for t <= 1; cap the weight".into(),
        ));
    }
    let closed = match method {
        MomentMethod::Quadrature => None,
        _ => closed_symbol(w),
    };
    if method == MomentMethod::ClosedForm && closed.is_none() {
        return Err(Error::Unsupported(format!(
            "no closed-form Laplace symbol for {}",
            w.describe()
        )));
    }
    let sym = LaplaceSymbol {
        weight: Arc::new(w.clone()),
        closed,
        source: w.describe(),
    };
    if sym.closed.is_none() && w.normalization().at_zero == 0.0 {
        for t in LAPLACE_CHECK_POINTS {
            let a = sym.area_form(t)?;
            let b = sym.stieltjes_form(t)?;
            if (a - b).abs() > CROSS_CHECK_TOL * a.abs().max(b.abs()) {
                return Err(Error::Consistency(format!(
                    "I_ω({t}): area form {a:e} vs Stieltjes form {b:e}"
                )));
            }
        }
    }
    Ok(sym)
}

impl LaplaceSymbol {
    pub fn weight(&self) -> &Arc<WeightFunction> {
        &self.weight
    }

    pub fn is_closed_form(&self) -> bool {
        self.closed.is_some()
    }

    /// Parameter `Δ` of a capped linear weight `ω = a·min(t, Δ)`, if that is the profile.
    pub fn linear_profile(&self) -> Option<(f64, Option<f64>)> {
        linear_profile(&self.weight)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("I_ω(t) needs t > 0, got {t}")));
        }
        match &self.closed {
            Some(s) => Ok(s.eval(t)),
            None => {
                if self.weight.normalization().at_zero == 0.0 {
                    self.stieltjes_form(t)
                } else {
                    self.area_form(t)
                }
            }
        }
    }

    fn maps(&self, t: f64) -> Vec<Map> {
        let w = &self.weight;
        let end = w.support_end();
        if end.is_finite() {
            return w.segments(0.0, end, false);
        }
        let s = 1.0 / t;
        let first = match w.endpoint_behaviour() {
            Some(e) if e.at == 0.0 => Map::PowerLeft {
                a: 0.0,
                b: s,
                m: smoothing_exponent(e.exponent),
            },
            _ => Map::Linear { a: 0.0, b: s },
        };
        vec![first, Map::Upper { a: s, scale: s }]
    }

    fn opts() -> QuadOptions {
        QuadOptions::rel(MOMENT_REL_TOL).with_abs(1e-300)
    }

    /// `t ∫₀^∞ e^{-tx} ω(x) dx`.
    pub fn area_form(&self, t: f64) -> Result<f64> {
        let w = &self.weight;
        let est = integrate_maps(&self.maps(t), w.kinks(), 1, &Self::opts(), |x, out| {
            let e = (-t * x).exp();
            out[0] = if e == 0.0 { 0.0 } else { e * w.value(x)? };
            Ok(())
        })?;
        let end = w.support_end();
        let tail = if end.is_finite() {
            w.normalization().at_end * (-t * end).exp()
        } else {
            0.0
        };
        Ok(t * est.values[0] + tail)
    }

    /// `∫₀^∞ e^{-tx} dω(x)` (equal to the area form when `ω(0) = 0`).
    pub fn stieltjes_form(&self, t: f64) -> Result<f64> {
        let w = &self.weight;
        let est = if w.has_derivative() {
            integrate_maps(&self.maps(t), w.kinks(), 1, &Self::opts(), |x, out| {
                let e = (-t * x).exp();
                out[0] = if e == 0.0 { 0.0 } else { e * w.derivative(x)? };
                Ok(())
            })?
        } else {
            w.stieltjes(0.0, w.support_end(), 1, &Self::opts(), |x, out| {
                out[0] = (-t * x).exp();
                Ok(())
            })?
        };
        Ok(est.values[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{
        make_linear_weight, make_named_weight, make_power_weight, squash, NamedTag,
    };

    #[test]
    fn disc_power_examples() {
        let w = make_power_weight(Geometry::Disc, 1.0).unwrap();
        let m = disc_moments(&w, 2).unwrap();
        assert_eq!(m.values, vec![1.0, 0.5, 1.0 / 3.0]);
        let w2 = make_power_weight(Geometry::Disc, 2.0).unwrap();
        let q = disc_moments_with(&w2, 1, MomentMethod::Quadrature).unwrap();
        assert!((q.values[1] - 1.0 / 3.0).abs() < 1e-13);
        assert!((q.values[0] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn disc_quadrature_matches_closed_form() {
        for alpha in [0.5, 1.0, 2.0, 3.7] {
            let w = make_power_weight(Geometry::Disc, alpha).unwrap();
            let c = disc_moments_with(&w, 64, MomentMethod::ClosedForm).unwrap();
            let q = disc_moments_with(&w, 64, MomentMethod::Quadrature).unwrap();
            for (a, b) in c.values.iter().zip(&q.values) {
                assert!((a - b).abs() <= 1e-10 * a.abs(), "α={alpha}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn squashed_disc_moments() {
        let w = squash(
            &make_power_weight(Geometry::Disc, 1.0).unwrap(),
            SquashKind::SquareArg,
        )
        .unwrap();
        let c = disc_moments(&w, 10).unwrap();
        let q = disc_moments_with(&w, 10, MomentMethod::Quadrature).unwrap();
        for n in 0..=10 {
            let exact = 2.0 / (n as f64 + 2.0);
            assert!((c.values[n] - exact).abs() < 1e-14);
            assert!((q.values[n] - exact).abs() < 1e-11);
        }
    }

    #[test]
    fn plane_examples() {
        let w = make_named_weight(Geometry::Plane, NamedTag::ExpSimple).unwrap();
        assert_eq!(
            plane_moments(&w, 3).unwrap().values,
            vec![1.0, 1.0, 2.0, 6.0]
        );
        let q = plane_moments_with(&w, 20, MomentMethod::Quadrature).unwrap();
        let mut f = 1.0;
        for n in 0..=20 {
            if n > 0 {
                f *= n as f64;
            }
            assert!((q.values[n] - f).abs() <= 1e-10 * f, "n={n}");
        }
        let g = squash(&w, SquashKind::SquareArg).unwrap();
        let m = plane_moments(&g, 2).unwrap();
        assert!((m.values[1] - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
        assert!((m.values[2] - 1.0).abs() < 1e-14);
        let q = plane_moments_with(&g, 12, MomentMethod::Quadrature).unwrap();
        let c = plane_moments(&g, 12).unwrap();
        for (a, b) in c.values.iter().zip(&q.values) {
            assert!((a - b).abs() < 1e-10 * a);
        }
    }

    #[test]
    fn plane_root_growth() {
        let w = make_named_weight(Geometry::Plane, NamedTag::ExpSimple).unwrap();
        let m = plane_moments(&w, 64).unwrap();
        let roots: Vec<f64> = (1..=64).map(|n| m.values[n].powf(1.0 / n as f64)).collect();
        assert!(roots.windows(2).all(|r| r[1] > r[0]));
    }

    #[test]
    fn wrong_geometry() {
        let w = make_power_weight(Geometry::HalfPlane, 0.0).unwrap();
        assert!(matches!(disc_moments(&w, 3), Err(Error::Domain(_))));
        assert!(matches!(plane_moments(&w, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn laplace_examples() {
        let w = make_power_weight(Geometry::HalfPlane, 0.0).unwrap();
        let s = laplace_symbol(&w).unwrap();
        assert!((s.eval(3.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let w = make_power_weight(Geometry::HalfPlane, 1.0).unwrap();
        assert!((laplace_symbol(&w).unwrap().eval(1.0).unwrap() - 2.0).abs() < 1e-14);
        let w = make_linear_weight(0.5, Some(2.0)).unwrap();
        let s = laplace_symbol(&w).unwrap();
        assert!((s.eval(1.0).unwrap() - 0.43233).abs() < 1e-5);
        let q = laplace_symbol_with(&w, MomentMethod::Quadrature).unwrap();
        for t in [0.1, 1.0, 7.0] {
            assert!((q.eval(t).unwrap() - s.eval(t).unwrap()).abs() < 1e-11);
        }
    }

    #[test]
    fn laplace_quadrature_vs_power_closed_form() {
        for alpha in [-0.5, 0.0, 0.5, 2.0] {
            let w = make_power_weight(Geometry::HalfPlane, alpha).unwrap();
            let c = laplace_symbol(&w).unwrap();
            let q = laplace_symbol_with(&w, MomentMethod::Quadrature).unwrap();
            for t in [0.3, 1.0, 5.0] {
                let (a, b) = (c.eval(t).unwrap(), q.eval(t).unwrap());
                assert!((a - b).abs() < 1e-9 * a, "α={alpha} t={t}: {a} vs {b}");
            }
        }
        let w = make_power_weight(Geometry::HalfPlane, 0.5)
            .unwrap()
            .with_cap(1.5)
            .unwrap();
        let c = laplace_symbol(&w).unwrap();
        let q = laplace_symbol_with(&w, MomentMethod::Quadrature).unwrap();
        for t in [0.3, 1.0, 5.0] {
            assert!((c.eval(t).unwrap() - q.eval(t).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn laplace_rejects_unbounded_growth() {
        let w = make_named_weight(Geometry::HalfPlane, NamedTag::ExpGrowthMinusOne).unwrap();
        assert!(laplace_symbol(&w).is_err());
        assert!(laplace_symbol(&w.with_cap(2.0).unwrap()).is_ok());
        let w = make_named_weight(Geometry::HalfPlane, NamedTag::LogOnePlus).unwrap();
        let s = laplace_symbol(&w).unwrap();
        let mut prev = f64::INFINITY;
        for t in [0.1, 0.5, 1.0, 3.0] {
            let v = s.eval(t).unwrap();
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }
}
