//! Weight functions ω on the disc `[0,1]`, the plane `[0,+∞)` and the
//! upper half-plane `[0,+∞)`, together with the constructions that produce
//! new weights from old ones: Volterra squares, the weights induced by a
//! projection exponent `p`, and argument substitutions.
//!
//! Every weight is an immutable value. Composite weights hold their base in an
//! `Arc` and evaluate by quadrature of the defining integral; `Send + Sync`
//! follows from the representation.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments;
use crate::quadrature::{
    integrate_maps, integrate_maps_with_gap, smoothing_exponent, Estimate, Map, QuadOptions,
};
use crate::special::{gamma, gamma_ur};

/// Relative tolerance of the quadratures that define composite weights.
pub(crate) const INNER_REL_TOL: f64 = 1e-13;

fn inner_opts() -> QuadOptions {
    QuadOptions::rel(INNER_REL_TOL).with_abs(1e-300)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Disc,
    Plane,
    #[serde(alias = "half-plane")]
    HalfPlane,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::Disc => "disc",
            Geometry::Plane => "plane",
            Geometry::HalfPlane => "halfplane",
        })
    }
}

impl std::str::FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "disc" | "disk" => Ok(Geometry::Disc),
            "plane" => Ok(Geometry::Plane),
            "halfplane" | "half-plane" | "upper" => Ok(Geometry::HalfPlane),
            other => Err(Error::Parse(format!("unknown geometry `{other}`"))),
        }
    }
}

/// Argument substitutions used to pass from ω to ω₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SquashKind {
    /// `ω₁(x) = ω(x²)` (disc and plane).
    SquareArg,
    /// `ω₁(t) = ω(2t)` (half-plane).
    DoubleArg,
}

/// Named weights accepted by [`make_named_weight`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedTag {
    /// `e^t - 1` (half-plane).
    ExpGrowthMinusOne,
    /// `log(1 + t)` (half-plane).
    LogOnePlus,
    /// `ω'(x) = -C₀ e^{-γ x^ρ} x^{μρ-1}` normalized to `ω(0) = 1` (plane).
    ExpDecay { gamma: f64, rho: f64, mu: f64 },
    /// `e^{-t}` (plane).
    ExpSimple,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Disc: `(1-t)^α`; half-plane: `t^{1+α}`.
    Power {
        alpha: f64,
    },
    ExpDecay {
        gamma: f64,
        rho: f64,
        mu: f64,
    },
    ExpGrowth,
    Log,
    /// `slope * t` (half-plane).
    Linear {
        slope: f64,
    },
    VolterraSquare {
        base: Arc<WeightFunction>,
    },
    DerivedProjection {
        base: Arc<WeightFunction>,
        p: f64,
        eps: Option<f64>,
        /// `M_{p,ε}` for the plane construction.
        bound: Option<f64>,
    },
    Squashed {
        base: Arc<WeightFunction>,
        kind: SquashKind,
    },
    /// Piecewise linear through `(t, ω)`; a repeated `t` is a jump.
    Tabulated {
        nodes: Vec<(f64, f64)>,
    },
}

/// Recorded endpoint values: `ω(0)`, `ω(1)` or `ω(+∞)`, and `⋁ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalization {
    pub at_zero: f64,
    pub at_end: f64,
    pub total_variation: f64,
}

/// `ω'(t) ~ |t - at|^exponent` near an endpoint of the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointBehaviour {
    pub at: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    geometry: Geometry,
    family: Family,
    support_end: f64,
    declared_alpha: Option<f64>,
    normalization: Normalization,
    kinks: Vec<f64>,
    singular: Option<EndpointBehaviour>,
    tail_scale: f64,
    c0: f64,
}

fn nonneg_integer(x: f64) -> bool {
    x >= -1e-12 && (x - x.round()).abs() < 1e-12
}

fn endpoint(at: f64, exponent: f64) -> Option<EndpointBehaviour> {
    (!nonneg_integer(exponent)).then_some(EndpointBehaviour { at, exponent })
}

impl WeightFunction {
    fn raw(geometry: Geometry, family: Family) -> Self {
        let support_end = match geometry {
            Geometry::Disc => 1.0,
            _ => f64::INFINITY,
        };
        WeightFunction {
            geometry,
            family,
            support_end,
            declared_alpha: None,
            normalization: Normalization {
                at_zero: f64::NAN,
                at_end: f64::NAN,
                total_variation: f64::NAN,
            },
            kinks: Vec::new(),
            singular: None,
            tail_scale: 1.0,
            c0: 1.0,
        }
    }

    fn finish(mut self) -> Result<Self> {
        let at_zero = self.value(0.0)?;
        let at_end = match self.geometry {
            Geometry::Disc => self.value(1.0)?,
            Geometry::Plane => self.value_at_infinity(),
            Geometry::HalfPlane => {
                if self.support_end.is_finite() {
                    self.value(self.support_end)?
                } else {
                    f64::INFINITY
                }
            }
        };
        let total_variation = match &self.family {
            Family::Tabulated { nodes } => {
                let mut v: f64 = nodes.windows(2).map(|w| (w[1].1 - w[0].1).abs()).sum();
                if self.geometry == Geometry::Plane {
                    v += nodes.last().map_or(0.0, |n| n.1.abs());
                }
                v
            }
            _ => (at_end - at_zero).abs(),
        };
        self.normalization = Normalization {
            at_zero,
            at_end,
            total_variation,
        };
        Ok(self)
    }

    fn value_at_infinity(&self) -> f64 {
        match &self.family {
            Family::ExpDecay { .. } => 0.0,
            Family::DerivedProjection { .. } => 0.0,
            Family::VolterraSquare { base } => {
                let n = base.normalization;
                n.at_end * (n.at_zero - n.at_end)
            }
            Family::Squashed { base, .. } => base.normalization.at_end,
            Family::Tabulated { nodes } => nodes.last().map_or(0.0, |n| n.1),
            _ => f64::NAN,
        }
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Smallest `T` with ω constant on `[T, +∞)`; `1` on the disc.
    pub fn support_end(&self) -> f64 {
        self.support_end
    }

    /// Exponent α with `ω(t) ≍ t^{1+α}` at infinity (half-plane only).
    pub fn declared_alpha(&self) -> Option<f64> {
        self.declared_alpha
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    pub fn endpoint_behaviour(&self) -> Option<EndpointBehaviour> {
        self.singular
    }

    /// Characteristic length used when mapping `[0, +∞)` onto `[0, 1)`.
    pub fn tail_scale(&self) -> f64 {
        self.tail_scale
    }

    pub fn has_derivative(&self) -> bool {
        !matches!(self.family, Family::Tabulated { .. })
    }

    /// Override the growth exponent used for the half-plane class check.
    pub fn with_declared_alpha(mut self, alpha: f64) -> Self {
        self.declared_alpha = Some(alpha);
        self
    }

    /// Freeze a half-plane weight at `ω(Δ)` beyond `Δ`.
    pub fn with_cap(self, cap: f64) -> Result<Self> {
        if self.geometry != Geometry::HalfPlane {
            return Err(Error::Domain(
                "a cap applies to half-plane weights only".into(),
            ));
        }
        if !(cap > 0.0 && cap.is_finite()) {
            return Err(Error::Domain(format!(
                "cap must be positive and finite, got {cap}"
            )));
        }
        if !matches!(
            self.family,
            Family::Power { .. } | Family::Linear { .. } | Family::Log | Family::ExpGrowth
        ) {
            return Err(Error::Unsupported(
                "caps apply to the elementary half-plane families".into(),
            ));
        }
        let mut w = self;
        w.support_end = w.support_end.min(cap);
        w.kinks = vec![w.support_end];
        w.declared_alpha = Some(-1.0);
        w.finish()
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let ok = match self.geometry {
            Geometry::Disc => (0.0..=1.0).contains(&t),
            _ => t >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "t = {t} outside the {} weight domain",
                self.geometry
            )))
        }
    }

    /// ω(t).
    pub fn value(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        let t = t.min(self.support_end);
        match &self.family {
            Family::Power { alpha } => Ok(match self.geometry {
                Geometry::Disc => (1.0 - t).powf(*alpha),
                _ => t.powf(1.0 + alpha),
            }),
            Family::ExpDecay { gamma, rho, mu } => {
                if t == 0.0 {
                    Ok(1.0)
                } else {
                    Ok(gamma_ur(*mu, gamma * t.powf(*rho)))
                }
            }
            Family::ExpGrowth => Ok(t.exp_m1()),
            Family::Log => Ok(t.ln_1p()),
            Family::Linear { slope } => Ok(slope * t),
            Family::VolterraSquare { base } => volterra_value(self.geometry, base, t),
            Family::DerivedProjection { .. } => self.derived_value(t),
            Family::Squashed { base, kind } => match kind {
                SquashKind::SquareArg => base.value(t * t),
                SquashKind::DoubleArg => base.value(2.0 * t),
            },
            Family::Tabulated { nodes } => Ok(tabulated_value(nodes, t)),
        }
    }

    /// ω'(t); zero beyond the support end, one-sided at it.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        if t > self.support_end {
            return Ok(0.0);
        }
        match &self.family {
            Family::Power { alpha } => Ok(match self.geometry {
                Geometry::Disc => -alpha * (1.0 - t).powf(alpha - 1.0),
                _ => (1.0 + alpha) * t.powf(*alpha),
            }),
            Family::ExpDecay { gamma, rho, mu } => {
                Ok(-self.c0 * (-gamma * t.powf(*rho)).exp() * t.powf(mu * rho - 1.0))
            }
            Family::ExpGrowth => Ok(t.exp()),
            Family::Log => Ok(1.0 / (1.0 + t)),
            Family::Linear { slope } => Ok(*slope),
            Family::VolterraSquare { base } => volterra_derivative(self.geometry, base, t),
            Family::DerivedProjection { base, p, eps, .. } => match self.geometry {
                Geometry::Disc => Ok(-base.derivative(t)?.abs().powf(*p)),
                Geometry::Plane => {
                    let e = eps.unwrap_or(1.0);
                    Ok(-(-base.derivative(t)?).max(0.0).powf(p * e))
                }
                Geometry::HalfPlane => Ok(0.5 * base.derivative(0.5 * t)?.max(0.0).powf(*p)),
            },
            Family::Squashed { base, kind } => match kind {
                SquashKind::SquareArg => Ok(2.0 * t * base.derivative(t * t)?),
                SquashKind::DoubleArg => Ok(2.0 * base.derivative(2.0 * t)?),
            },
            Family::Tabulated { nodes } => Ok(tabulated_slope(nodes, t)),
        }
    }

    /// ω'(t) where `gap`, when given, is the exact `support_end - t`.
    pub(crate) fn derivative_near(&self, t: f64, gap: Option<f64>) -> Result<f64> {
        match gap {
            Some(g) if self.support_end.is_finite() && g > 0.0 => {
                let slack = 4.0 * f64::EPSILON * self.support_end.max(1.0);
                if ((self.support_end - t) - g).abs() <= slack {
                    return self.derivative_from_end(g);
                }
                self.derivative(t)
            }
            _ => self.derivative(t),
        }
    }

    /// ω'(support_end - gap), free of the cancellation in `support_end - t`
    /// for the families whose derivative is singular there.
    fn derivative_from_end(&self, gap: f64) -> Result<f64> {
        let end = self.support_end;
        match &self.family {
            Family::Power { alpha } if self.geometry == Geometry::Disc => {
                Ok(-alpha * gap.powf(alpha - 1.0))
            }
            Family::Squashed { base, kind } if base.support_end.is_finite() => match kind {
                // (1 - gap)² = 1 - gap (2 - gap) relative to the base end
                SquashKind::SquareArg if base.support_end == 1.0 && end == 1.0 => {
                    Ok(2.0 * (1.0 - gap) * base.derivative_from_end(gap * (2.0 - gap))?)
                }
                SquashKind::DoubleArg => Ok(2.0 * base.derivative_from_end(2.0 * gap)?),
                _ => self.derivative(end - gap),
            },
            Family::DerivedProjection { base, p, .. } if self.geometry == Geometry::Disc => {
                Ok(-base.derivative_from_end(gap)?.abs().powf(*p))
            }
            _ => self.derivative(end - gap),
        }
    }

    fn derived_value(&self, t: f64) -> Result<f64> {
        match self.geometry {
            Geometry::Disc => {
                if t >= 1.0 {
                    return Ok(0.0);
                }
                let est = self.integrate_derivative(t, 1.0, &inner_opts())?;
                Ok(-est)
            }
            Geometry::Plane => {
                let est = self.integrate_derivative(t, f64::INFINITY, &inner_opts())?;
                Ok(-est)
            }
            Geometry::HalfPlane => {
                if t == 0.0 {
                    return Ok(0.0);
                }
                self.integrate_derivative(0.0, t, &inner_opts())
            }
        }
    }

    fn integrate_derivative(&self, a: f64, b: f64, opts: &QuadOptions) -> Result<f64> {
        let est = self.stieltjes(a, b, 1, opts, |_, out| {
            out[0] = 1.0;
            Ok(())
        })?;
        Ok(est.values[0])
    }

    /// Grading of the tail map for weights growing like `t^{1+α}`. Integrands
    /// `f(z+it) ω'(t)` then decay like `t^{α-k}` for the smallest integer
    /// `k > 1 + α`, and `q (k - α - 1) ≥ 2` keeps the mapped tail smooth.
    fn tail_grading(&self) -> Option<u32> {
        let alpha = self.declared_alpha?;
        if self.support_end.is_finite() {
            return None;
        }
        let k = (alpha.floor() + 2.0).max(2.0);
        Some((2.0 / (k - alpha - 1.0)).ceil().clamp(1.0, 16.0) as u32)
    }

    /// Maps covering `[a, b]` (b may be `+∞`) with endpoint clustering where
    /// ω' is singular. With `clip`, the range is cut at the support end.
    pub(crate) fn segments(&self, a: f64, b: f64, clip: bool) -> Vec<Map> {
        let b = if clip { b.min(self.support_end) } else { b };
        if !(b > a) {
            return Vec::new();
        }
        let sing_at = |x: f64| {
            self.singular
                .filter(|s| s.at == x)
                .map(|s| smoothing_exponent(s.exponent))
        };
        if b.is_infinite() {
            let scale = self.tail_scale;
            let tail = |a| match self.tail_grading() {
                Some(q) => Map::UpperPower { a, scale, q },
                None => Map::Upper { a, scale },
            };
            if let Some(m) = sing_at(a) {
                let mid = a + scale;
                return vec![Map::PowerLeft { a, b: mid, m }, tail(mid)];
            }
            return vec![tail(a)];
        }
        match (sing_at(a), sing_at(b)) {
            (Some(ml), Some(mr)) => {
                let mid = 0.5 * (a + b);
                vec![
                    Map::PowerLeft { a, b: mid, m: ml },
                    Map::PowerRight { a: mid, b, m: mr },
                ]
            }
            (Some(m), None) => vec![Map::PowerLeft { a, b, m }],
            (None, Some(m)) => vec![Map::PowerRight { a, b, m }],
            (None, None) => vec![Map::Linear { a, b }],
        }
    }

    /// Riemann–Stieltjes integral `∫_a^b g(t) dω(t)` of a vector-valued `g`.
    ///
    /// Smooth weights integrate `g ω'` with the adaptive rule; tabulated
    /// weights add explicit atoms at their jumps.
    pub fn stieltjes<F>(
        &self,
        a: f64,
        b: f64,
        dim: usize,
        opts: &QuadOptions,
        mut g: F,
    ) -> Result<Estimate>
    where
        F: FnMut(f64, &mut [f64]) -> Result<()>,
    {
        if let Family::Tabulated { nodes } = &self.family {
            return tabulated_stieltjes(nodes, a, b, dim, opts, g);
        }
        let maps = self.segments(a, b, true);
        if maps.is_empty() {
            return Ok(Estimate {
                values: vec![0.0; dim],
                errors: vec![0.0; dim],
                evaluations: 0,
            });
        }
        integrate_maps_with_gap(&maps, &self.kinks, dim, opts, |t, gap, out| {
            let d = self.derivative_near(t, gap)?;
            if d == 0.0 {
                out.iter_mut().for_each(|v| *v = 0.0);
                return Ok(());
            }
            g(t, out)?;
            out.iter_mut().for_each(|v| *v *= d);
            Ok(())
        })
    }

    /// Plain integral `∫_a^b g(t) dt` using this weight's endpoint clustering and kinks.
    pub fn integrate_plain<F>(
        &self,
        a: f64,
        b: f64,
        dim: usize,
        opts: &QuadOptions,
        g: F,
    ) -> Result<Estimate>
    where
        F: FnMut(f64, &mut [f64]) -> Result<()>,
    {
        let maps = self.segments(a, b, false);
        integrate_maps(&maps, &self.kinks, dim, opts, g)
    }

    /// Sampled monotonicity check on `n` points of `[a, b]`: `+1` nondecreasing,
    /// `-1` nonincreasing (strictly when `strict`).
    pub(crate) fn is_monotone(
        &self,
        a: f64,
        b: f64,
        n: usize,
        direction: i8,
        strict: bool,
    ) -> Result<bool> {
        let mut prev = self.value(a)?;
        for k in 1..=n {
            let t = a + (b - a) * k as f64 / n as f64;
            let v = self.value(t)?;
            let d = (v - prev) * direction as f64;
            let slack = 1e-13 * prev.abs().max(v.abs()).max(1e-300);
            if d < -slack || (strict && d <= 0.0 && v.abs() > 1e-250) {
                return Ok(false);
            }
            prev = v;
        }
        Ok(true)
    }

    /// Short description in the weight grammar.
    pub fn describe(&self) -> String {
        let base = match &self.family {
            Family::Power { alpha } => format!("power:alpha={alpha}"),
            Family::ExpDecay { gamma, rho, mu } => {
                if *gamma == 1.0 && *rho == 1.0 && *mu == 1.0 {
                    "exp-simple".to_string()
                } else {
                    format!("exp-decay:gamma={gamma},rho={rho},mu={mu}")
                }
            }
            Family::ExpGrowth => "exp-growth".into(),
            Family::Log => "log1p".into(),
            Family::Linear { slope } => format!("linear:slope={slope}"),
            Family::VolterraSquare { base } => format!("volterra({})", base.describe()),
            Family::DerivedProjection { base, p, eps, .. } => match eps {
                Some(e) => format!("derived(p={p},eps={e},base={})", base.describe()),
                None => format!("derived(p={p},base={})", base.describe()),
            },
            Family::Squashed { base, kind } => match kind {
                SquashKind::SquareArg => format!("squash2({})", base.describe()),
                SquashKind::DoubleArg => format!("squashx2({})", base.describe()),
            },
            Family::Tabulated { nodes } => format!("tabulated[{} nodes]", nodes.len()),
        };
        let elementary = matches!(
            self.family,
            Family::Power { .. } | Family::Linear { .. } | Family::Log | Family::ExpGrowth
        );
        if elementary && self.geometry == Geometry::HalfPlane && self.support_end.is_finite() {
            let sep = if base.contains(':') { "," } else { ":" };
            format!("{base}{sep}cap={}", self.support_end)
        } else {
            base
        }
    }
}

fn volterra_value(geometry: Geometry, base: &WeightFunction, x: f64) -> Result<f64> {
    let opts = inner_opts();
    match geometry {
        Geometry::Disc => {
            if x >= 1.0 {
                return Ok(0.0);
            }
            if x == 0.0 {
                let n = base.normalization;
                return Ok(n.at_zero * (n.at_zero - n.at_end));
            }
            let est = base.stieltjes(x, 1.0, 1, &opts, |s, out| {
                out[0] = base.value((x / s).min(1.0))?;
                Ok(())
            })?;
            Ok(-est.values[0])
        }
        Geometry::Plane => {
            if x == 0.0 {
                let n = base.normalization;
                return Ok(n.at_zero * (n.at_zero - n.at_end));
            }
            let maps = plane_convolution_maps(base, x);
            let est = integrate_maps(&maps, &[x, 1.0], 1, &opts, |t, out| {
                let d = base.derivative(t)?;
                out[0] = if d == 0.0 {
                    0.0
                } else {
                    base.value(x / t)? * d
                };
                Ok(())
            })?;
            Ok(-est.values[0])
        }
        Geometry::HalfPlane => {
            if x == 0.0 {
                return Ok(0.0);
            }
            let breaks = convolution_breaks(base, x);
            let maps = base.segments(0.0, x, false);
            let est = integrate_maps(&maps, &breaks, 1, &opts, |t, out| {
                let d = base.derivative(t)?;
                out[0] = if d == 0.0 {
                    0.0
                } else {
                    base.value((x - t).max(0.0))? * d
                };
                Ok(())
            })?;
            Ok(est.values[0])
        }
    }
}

fn volterra_derivative(geometry: Geometry, base: &WeightFunction, x: f64) -> Result<f64> {
    let opts = inner_opts();
    match geometry {
        Geometry::Disc => {
            if x <= 0.0 || x >= 1.0 {
                // ω' may be unbounded at the endpoints; quadrature never samples them.
                return Ok(0.0);
            }
            // s = x^u keeps both 1 - s and 1 - x/s exact as -expm1(u ln x)
            let lx = x.ln();
            let mut breaks: Vec<f64> = base
                .kinks
                .iter()
                .filter(|&&k| k > 0.0 && k < 1.0)
                .flat_map(|&k| [k.ln() / lx, 1.0 - k.ln() / lx])
                .collect();
            breaks.retain(|&b| b > 0.0 && b < 1.0);
            let maps = match base.singular {
                Some(s) if s.at == 1.0 => {
                    let m = smoothing_exponent(s.exponent);
                    vec![
                        Map::PowerLeft { a: 0.0, b: 0.5, m },
                        Map::PowerRight { a: 0.5, b: 1.0, m },
                    ]
                }
                _ => vec![Map::Linear { a: 0.0, b: 1.0 }],
            };
            let near = |u: f64| {
                let gap = -(u * lx).exp_m1();
                base.derivative_near(1.0 - gap, Some(gap))
            };
            let est = integrate_maps_with_gap(&maps, &breaks, 1, &opts, |u, gap, out| {
                let v = gap.unwrap_or(1.0 - u);
                out[0] = near(u)? * near(v)? * -lx;
                Ok(())
            })?;
            Ok(-est.values[0])
        }
        Geometry::Plane => {
            if x <= 0.0 {
                return Ok(0.0);
            }
            let maps = plane_convolution_maps(base, x);
            let est = integrate_maps(&maps, &[x, 1.0], 1, &opts, |t, out| {
                let d = base.derivative(t)?;
                out[0] = if d == 0.0 {
                    0.0
                } else {
                    base.derivative(x / t)? * d / t
                };
                Ok(())
            })?;
            Ok(-est.values[0])
        }
        Geometry::HalfPlane => {
            if x <= 0.0 || x >= 2.0 * base.support_end {
                return Ok(0.0);
            }
            let breaks = convolution_breaks(base, x);
            let maps = match base.singular {
                Some(s) if s.at == 0.0 => {
                    let m = smoothing_exponent(s.exponent);
                    let mid = 0.5 * x;
                    vec![
                        Map::PowerLeft { a: 0.0, b: mid, m },
                        Map::PowerRight { a: mid, b: x, m },
                    ]
                }
                _ => vec![Map::Linear { a: 0.0, b: x }],
            };
            let est = integrate_maps(&maps, &breaks, 1, &opts, |t, out| {
                out[0] = base.derivative((x - t).max(0.0))? * base.derivative(t)?;
                Ok(())
            })?;
            Ok(est.values[0])
        }
    }
}

fn plane_convolution_maps(base: &WeightFunction, x: f64) -> Vec<Map> {
    let split = x.sqrt().max(1e-3 * base.tail_scale);
    let first = match base.singular {
        Some(s) if s.at == 0.0 => Map::PowerLeft {
            a: 0.0,
            b: split,
            m: smoothing_exponent(s.exponent),
        },
        _ => Map::Linear { a: 0.0, b: split },
    };
    vec![
        first,
        Map::Upper {
            a: split,
            scale: split.max(base.tail_scale),
        },
    ]
}

fn convolution_breaks(base: &WeightFunction, x: f64) -> Vec<f64> {
    let mut breaks: Vec<f64> = base.kinks.iter().flat_map(|&k| [k, x - k]).collect();
    breaks.retain(|&b| b > 0.0 && b < x);
    breaks
}

fn tabulated_value(nodes: &[(f64, f64)], t: f64) -> f64 {
    let i = nodes.partition_point(|n| n.0 <= t);
    if i == 0 {
        return nodes[0].1;
    }
    if i == nodes.len() {
        return nodes[i - 1].1;
    }
    let (t0, w0) = nodes[i - 1];
    let (t1, w1) = nodes[i];
    w0 + (w1 - w0) * (t - t0) / (t1 - t0)
}

fn tabulated_slope(nodes: &[(f64, f64)], t: f64) -> f64 {
    let i = nodes.partition_point(|n| n.0 <= t);
    if i == 0 || i == nodes.len() {
        return 0.0;
    }
    let (t0, w0) = nodes[i - 1];
    let (t1, w1) = nodes[i];
    (w1 - w0) / (t1 - t0)
}

fn tabulated_stieltjes<F>(
    nodes: &[(f64, f64)],
    a: f64,
    b: f64,
    dim: usize,
    opts: &QuadOptions,
    mut g: F,
) -> Result<Estimate>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    let mut values = vec![0.0; dim];
    let mut errors = vec![0.0; dim];
    let mut evaluations = 0;
    let mut buf = vec![0.0; dim];
    for w in nodes.windows(2) {
        let ((t0, w0), (t1, w1)) = (w[0], w[1]);
        if t0 == t1 {
            if t0 >= a && t0 <= b {
                g(t0, &mut buf)?;
                evaluations += 1;
                for c in 0..dim {
                    values[c] += buf[c] * (w1 - w0);
                }
            }
            continue;
        }
        let lo = t0.max(a);
        let hi = t1.min(b);
        if hi <= lo || w1 == w0 {
            continue;
        }
        let slope = (w1 - w0) / (t1 - t0);
        let est = integrate_maps(&[Map::Linear { a: lo, b: hi }], &[], dim, opts, |t, out| {
            g(t, out)?;
            out.iter_mut().for_each(|v| *v *= slope);
            Ok(())
        })?;
        evaluations += est.evaluations;
        for c in 0..dim {
            values[c] += est.values[c];
            errors[c] += est.errors[c];
        }
    }
    Ok(Estimate {
        values,
        errors,
        evaluations,
    })
}

/// Power family: `(1-t)^α` on the disc, `t^{1+α}` on the half-plane.
pub fn make_power_weight(geometry: Geometry, alpha: f64) -> Result<WeightFunction> {
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be finite, got {alpha}")));
    }
    match geometry {
        Geometry::Disc => {
            if alpha <= 0.0 {
                return Err(Error::Domain(format!(
                    "disc power weight (1-t)^alpha needs alpha > 0 so that 0 < var_δ^1 ω < ∞ with ω(1) = 0; got {alpha}"
                )));
            }
            let mut w = WeightFunction::raw(geometry, Family::Power { alpha });
            w.singular = endpoint(1.0, alpha - 1.0);
            w.finish()
        }
        Geometry::HalfPlane => {
            if alpha < -1.0 {
                return Err(Error::Domain(format!(
                    "half-plane power weight t^(1+alpha) needs alpha >= -1 (ω ≍ t^(1+α) with α ≥ -1); got {alpha}"
                )));
            }
            let mut w = WeightFunction::raw(geometry, Family::Power { alpha });
            w.singular = endpoint(0.0, alpha);
            w.declared_alpha = Some(alpha);
            w.finish()
        }
        Geometry::Plane => Err(Error::Domain(
            "the plane admits only strictly decreasing weights with finite moments; use exp-decay"
                .into(),
        )),
    }
}

/// Half-plane `ω(t) = slope * t`, optionally frozen beyond `cap`.
pub fn make_linear_weight(slope: f64, cap: Option<f64>) -> Result<WeightFunction> {
    if !(slope > 0.0 && slope.is_finite()) {
        return Err(Error::Domain(format!(
            "linear weight needs a positive slope, got {slope}"
        )));
    }
    let mut w = WeightFunction::raw(Geometry::HalfPlane, Family::Linear { slope });
    w.declared_alpha = Some(0.0);
    let w = w.finish()?;
    match cap {
        Some(c) => w.with_cap(c),
        None => Ok(w),
    }
}

pub fn make_named_weight(geometry: Geometry, tag: NamedTag) -> Result<WeightFunction> {
    match (geometry, tag) {
        (Geometry::Plane, NamedTag::ExpSimple) => exp_decay(1.0, 1.0, 1.0),
        (Geometry::Plane, NamedTag::ExpDecay { gamma, rho, mu }) => exp_decay(gamma, rho, mu),
        (Geometry::HalfPlane, NamedTag::ExpGrowthMinusOne) => {
            WeightFunction::raw(geometry, Family::ExpGrowth).finish()
        }
        (Geometry::HalfPlane, NamedTag::LogOnePlus) => {
            WeightFunction::raw(geometry, Family::Log).finish()
        }
        (g, t) => Err(Error::Domain(format!(
            "weight {t:?} is not defined on the {g}"
        ))),
    }
}

fn exp_decay(gamma_: f64, rho: f64, mu: f64) -> Result<WeightFunction> {
    if !(gamma_ > 0.0 && rho > 0.0 && mu > 0.0) {
        return Err(Error::Domain(format!(
            "exp-decay needs gamma, rho, mu > 0; got ({gamma_}, {rho}, {mu})"
        )));
    }
    let mut w = WeightFunction::raw(
        Geometry::Plane,
        Family::ExpDecay {
            gamma: gamma_,
            rho,
            mu,
        },
    );
    w.c0 = rho * gamma_.powf(mu) / gamma(mu);
    w.singular = endpoint(0.0, mu * rho - 1.0);
    w.tail_scale = gamma_.powf(-1.0 / rho);
    w.finish()
}

/// Normalizing constant `C₀` of an exp-decay weight.
pub fn exp_decay_constant(w: &WeightFunction) -> Option<f64> {
    matches!(w.family, Family::ExpDecay { .. }).then_some(w.c0)
}

/// Piecewise-linear weight through `(t, ω)` nodes; repeated abscissae are jumps.
pub fn make_tabulated_weight(geometry: Geometry, nodes: Vec<(f64, f64)>) -> Result<WeightFunction> {
    if nodes.len() < 2 {
        return Err(Error::Domain(
            "a tabulated weight needs at least two nodes".into(),
        ));
    }
    if nodes[0].0 != 0.0 {
        return Err(Error::Domain(
            "tabulated weights must start at t = 0".into(),
        ));
    }
    if nodes.iter().any(|n| !n.0.is_finite() || !n.1.is_finite()) {
        return Err(Error::Domain(
            "tabulated weight contains non-finite values".into(),
        ));
    }
    if nodes.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(Error::Domain(
            "tabulated abscissae must be nondecreasing".into(),
        ));
    }
    let last = nodes.last().map(|n| n.0).unwrap_or(0.0);
    if geometry == Geometry::Disc && last != 1.0 {
        return Err(Error::Domain(
            "disc tabulated weights must end at t = 1".into(),
        ));
    }
    let mut kinks: Vec<f64> = nodes.iter().map(|n| n.0).filter(|&t| t > 0.0).collect();
    kinks.dedup();
    let mut w = WeightFunction::raw(geometry, Family::Tabulated { nodes });
    if geometry != Geometry::Disc {
        w.support_end = last;
        w.tail_scale = last.max(1e-3);
    }
    if geometry == Geometry::HalfPlane {
        w.declared_alpha = Some(-1.0);
    }
    w.kinks = kinks;
    w.finish()
}

/// Read `(t, omega)` rows from a CSV file; a non-numeric first row is a header.
pub fn load_tabulated_csv(path: &Path, geometry: Geometry) -> Result<WeightFunction> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut nodes = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(Error::Parse(format!("row {i}: expected columns t, omega")));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(t), Ok(w)) => nodes.push((t, w)),
            _ if i == 0 => continue,
            _ => return Err(Error::Parse(format!("row {i}: non-numeric entry"))),
        }
    }
    make_tabulated_weight(geometry, nodes)
}

/// Volterra square of a weight: multiplicative self-convolution on the disc
/// and the plane, additive self-convolution on the half-plane. Its moments
/// (Laplace symbol) are the squares of those of the base.
pub fn volterra_square(w: &WeightFunction) -> Result<WeightFunction> {
    if !w.has_derivative() {
        return Err(Error::Precondition(
            "the Volterra square needs a differentiable weight".into(),
        ));
    }
    let n = w.normalization;
    let base = Arc::new(w.clone());
    match w.geometry {
        Geometry::Disc => {
            if (n.at_zero - 1.0).abs() > 1e-12 || n.at_end.abs() > 1e-12 {
                return Err(Error::Precondition(format!(
                    "disc Volterra square needs ω(0) = 1 and ω(1) = 0; got ω(0) = {}, ω(1) = {}",
                    n.at_zero, n.at_end
                )));
            }
            if !w.is_monotone(0.0, 1.0, 256, -1, false)? {
                return Err(Error::Precondition(
                    "disc Volterra square needs a nonincreasing weight".into(),
                ));
            }
            let mut out = WeightFunction::raw(Geometry::Disc, Family::VolterraSquare { base });
            out.singular = w
                .singular
                .filter(|s| s.at == 1.0)
                .and_then(|s| endpoint(1.0, 2.0 * s.exponent + 1.0));
            out.finish()
        }
        Geometry::Plane => {
            if (n.at_zero - 1.0).abs() > 1e-12 || n.at_end.abs() > 1e-12 {
                return Err(Error::Precondition(
                    "plane Volterra square needs ω(0) = 1 and ω(+∞) = 0".into(),
                ));
            }
            if !w.is_monotone(0.0, 20.0 * w.tail_scale, 256, -1, true)? {
                return Err(Error::Precondition(
                    "plane Volterra square needs ω' < 0".into(),
                ));
            }
            // -∞ < ∫ t^{-1} dω < 0 requires ω'(0+) = 0; the exp-decay family is
            // admitted without it.
            let near_zero = -w.derivative(1e-12)?;
            let admitted = matches!(w.family, Family::ExpDecay { .. });
            if near_zero > 1e-6 && !admitted {
                return Err(Error::Precondition(
                    "plane Volterra square needs a finite ∫ t^-1 dω (ω'(0+) must vanish)".into(),
                ));
            }
            let mut out = WeightFunction::raw(Geometry::Plane, Family::VolterraSquare { base });
            out.tail_scale = w.tail_scale * w.tail_scale;
            out.finish()
        }
        Geometry::HalfPlane => {
            if n.at_zero != 0.0 {
                return Err(Error::Precondition(format!(
                    "half-plane Volterra square needs ω(0) = 0; got {}",
                    n.at_zero
                )));
            }
            let probe_end = if w.support_end.is_finite() {
                w.support_end
            } else {
                20.0 * w.tail_scale
            };
            if !w.is_monotone(0.0, probe_end, 256, 1, false)? {
                return Err(Error::Precondition(
                    "half-plane Volterra square needs a nondecreasing weight".into(),
                ));
            }
            let mut out = WeightFunction::raw(Geometry::HalfPlane, Family::VolterraSquare { base });
            out.support_end = 2.0 * w.support_end;
            let mut kinks: Vec<f64> = Vec::new();
            for &a in &w.kinks {
                kinks.push(a);
                for &b in &w.kinks {
                    kinks.push(a + b);
                }
            }
            kinks.sort_by(f64::total_cmp);
            kinks.dedup();
            out.kinks = kinks;
            out.singular = w
                .singular
                .filter(|s| s.at == 0.0)
                .and_then(|s| endpoint(0.0, 2.0 * s.exponent + 1.0));
            out.tail_scale = w.tail_scale;
            out.declared_alpha = w.declared_alpha.map(|a| 1.0 + 2.0 * a);
            out.finish()
        }
    }
}

/// Weight ω induced by ω₁ and an exponent `p` for the projection bounds:
/// disc `∫_t^1 |ω₁'|^p`, plane `∫_t^∞ (-ω₁')^{pε}` (unit total mass
/// required), half-plane `ω(s) = ∫_0^{s/2} (ω₁')^p`.
pub fn derive_projection_weight(
    w1: &WeightFunction,
    p: f64,
    eps: Option<f64>,
) -> Result<WeightFunction> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!(
            "projection exponent must satisfy p >= 1, got {p}"
        )));
    }
    if !w1.has_derivative() {
        return Err(Error::Precondition(
            "derived weight needs ω₁ with a derivative".into(),
        ));
    }
    let base = Arc::new(w1.clone());
    match w1.geometry {
        Geometry::Disc => {
            let inc = w1.is_monotone(0.0, 1.0, 256, 1, true)?;
            let dec = w1.is_monotone(0.0, 1.0, 256, -1, true)?;
            if !(inc || dec) {
                return Err(Error::Precondition(
                    "ω₁ must be strictly monotone on [0,1]".into(),
                ));
            }
            let mut out = WeightFunction::raw(
                Geometry::Disc,
                Family::DerivedProjection {
                    base,
                    p,
                    eps: None,
                    bound: None,
                },
            );
            out.singular = w1.singular.and_then(|s| endpoint(s.at, p * s.exponent));
            out.kinks = w1.kinks.clone();
            out.finish()
        }
        Geometry::Plane => {
            let eps = eps.ok_or_else(|| {
                Error::Precondition("plane derived weight needs ε ∈ (0,1]".into())
            })?;
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(Error::Domain(format!("ε must lie in (0,1], got {eps}")));
            }
            if !w1.is_monotone(0.0, 20.0 * w1.tail_scale, 256, -1, true)? {
                return Err(Error::Precondition(
                    "ω₁ must be strictly decreasing on [0,+∞)".into(),
                ));
            }
            let opts = inner_opts();
            let power_integral = |expo: f64| -> Result<f64> {
                let maps = w1.segments(0.0, f64::INFINITY, false);
                let est = integrate_maps(&maps, &w1.kinks, 1, &opts, |t, out| {
                    let d = -w1.derivative(t)?;
                    out[0] = if d > 0.0 { d.powf(expo) } else { 0.0 };
                    Ok(())
                })
                .map_err(|e| Error::Precondition(format!("divergent tail integral: {e}")))?;
                Ok(est.values[0])
            };
            let mass = power_integral(p * eps)?;
            if (mass - 1.0).abs() > 1e-8 {
                return Err(Error::Precondition(format!(
                    "∫(-ω₁')^(pε) = {mass}, must equal 1 within 1e-8 (normalize ω₁ first)"
                )));
            }
            let bound = if p > 1.0 {
                let q = p / (p - 1.0);
                if q * (1.0 - eps) <= 0.0 {
                    return Err(Error::Precondition(
                        "M_{p,ε} diverges: the exponent q(1-ε) vanishes on an infinite support"
                            .into(),
                    ));
                }
                let m = power_integral(q * (1.0 - eps))?;
                if !m.is_finite() {
                    return Err(Error::Precondition("M_{p,ε} is infinite".into()));
                }
                m.powf(1.0 / q)
            } else {
                let mut sup: f64 = 0.0;
                for k in 1..=400 {
                    let t = 20.0 * w1.tail_scale * k as f64 / 400.0;
                    sup = sup.max((-w1.derivative(t)?).max(0.0).powf(1.0 - eps));
                }
                sup
            };
            let mut out = WeightFunction::raw(
                Geometry::Plane,
                Family::DerivedProjection {
                    base,
                    p,
                    eps: Some(eps),
                    bound: Some(bound),
                },
            );
            out.singular = w1
                .singular
                .and_then(|s| endpoint(s.at, p * eps * s.exponent));
            out.tail_scale = w1.tail_scale;
            out.finish()
        }
        Geometry::HalfPlane => {
            let probe_end = if w1.support_end.is_finite() {
                w1.support_end
            } else {
                20.0 * w1.tail_scale
            };
            if !w1.is_monotone(0.0, probe_end, 256, 1, true)? {
                return Err(Error::Precondition(
                    "ω₁ must be strictly increasing on its support".into(),
                ));
            }
            let mut out = WeightFunction::raw(
                Geometry::HalfPlane,
                Family::DerivedProjection {
                    base,
                    p,
                    eps: None,
                    bound: None,
                },
            );
            out.support_end = 2.0 * w1.support_end;
            out.kinks = w1.kinks.iter().map(|k| 2.0 * k).collect();
            out.singular = w1.singular.and_then(|s| endpoint(0.0, p * s.exponent));
            out.tail_scale = 2.0 * w1.tail_scale;
            out.declared_alpha = if out.support_end.is_finite() {
                Some(-1.0)
            } else {
                None
            };
            out.finish()
        }
    }
}

/// Argument substitution `ω(x²)` (disc, plane) or `ω(2t)` (half-plane).
pub fn squash(w: &WeightFunction, kind: SquashKind) -> Result<WeightFunction> {
    let ok = match kind {
        SquashKind::SquareArg => matches!(w.geometry, Geometry::Disc | Geometry::Plane),
        SquashKind::DoubleArg => w.geometry == Geometry::HalfPlane,
    };
    if !ok {
        return Err(Error::Domain(format!(
            "{kind:?} does not apply to {} weights",
            w.geometry
        )));
    }
    let mut out = WeightFunction::raw(
        w.geometry,
        Family::Squashed {
            base: Arc::new(w.clone()),
            kind,
        },
    );
    match kind {
        SquashKind::SquareArg => {
            out.support_end = w.support_end.sqrt();
            out.kinks = w.kinks.iter().map(|k| k.sqrt()).collect();
            out.singular = w.singular.and_then(|s| {
                if s.at == 0.0 {
                    endpoint(0.0, 2.0 * s.exponent + 1.0)
                } else {
                    endpoint(s.at.sqrt(), s.exponent)
                }
            });
            out.tail_scale = w.tail_scale.sqrt();
        }
        SquashKind::DoubleArg => {
            out.support_end = 0.5 * w.support_end;
            out.kinks = w.kinks.iter().map(|k| 0.5 * k).collect();
            out.singular = w.singular;
            out.tail_scale = 0.5 * w.tail_scale;
            out.declared_alpha = w.declared_alpha;
        }
    }
    out.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub id: &'static str,
    pub evidence: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightClassReport {
    pub class: &'static str,
    pub checked_conditions: Vec<ConditionCheck>,
}

impl WeightClassReport {
    /// No condition failed (inconclusive asymptotic checks count as consistent).
    pub fn passed(&self) -> bool {
        self.checked_conditions
            .iter()
            .all(|c| c.verdict != Verdict::Fail)
    }

    pub fn get(&self, id: &str) -> Option<&ConditionCheck> {
        self.checked_conditions.iter().find(|c| c.id == id)
    }
}

/// Largest `n` used for the moment conditions of the disc class.
pub const CLASS_MOMENT_MAX: usize = 128;

fn check(id: &'static str, verdict: Verdict, evidence: String) -> ConditionCheck {
    ConditionCheck {
        id,
        evidence,
        verdict,
    }
}

/// Sample the defining conditions of the weight's class.
pub fn validate_class(w: &WeightFunction) -> WeightClassReport {
    match w.geometry {
        Geometry::Disc => validate_disc(w),
        Geometry::Plane => validate_plane(w),
        Geometry::HalfPlane => validate_half_plane(w),
    }
}

fn validate_disc(w: &WeightFunction) -> WeightClassReport {
    let mut checks = Vec::new();

    // (i) 0 < var_δ^1 ω < ∞ on δ = k/64, accumulated from t = 1 backwards.
    let variation = (|| -> Result<(f64, f64)> {
        let n = 1024;
        let mut acc = 0.0;
        let mut min_var = f64::INFINITY;
        let mut prev = w.value(1.0)?;
        for k in (0..n).rev() {
            let t = k as f64 / n as f64;
            let v = w.value(t)?;
            acc += (v - prev).abs();
            prev = v;
            if k % (n / 64) == 0 {
                min_var = min_var.min(acc);
            }
        }
        Ok((min_var, acc))
    })();
    checks.push(match variation {
        Ok((min_var, total)) if min_var > 0.0 && total.is_finite() => check(
            "i-variation",
            Verdict::Pass,
            format!("min over δ of var_δ^1 ω = {min_var:.3e}, var_0^1 ω = {total:.6}"),
        ),
        Ok((min_var, total)) => check(
            "i-variation",
            Verdict::Fail,
            format!("var_δ^1 ω ranges down to {min_var:e} (total {total})"),
        ),
        Err(e) => check("i-variation", Verdict::Fail, e.to_string()),
    });

    match moments::disc_moments_with(w, CLASS_MOMENT_MAX, moments::MomentMethod::Auto) {
        Ok(m) => {
            let zero = m
                .values
                .iter()
                .enumerate()
                .skip(1)
                .find(|(_, v)| **v == 0.0);
            checks.push(match zero {
                None => check(
                    "ii-nonzero-moments",
                    Verdict::Pass,
                    format!(
                        "Δ_1..Δ_{CLASS_MOMENT_MAX} nonzero, min |Δ_n| = {:.3e}",
                        m.min_abs()
                    ),
                ),
                Some((n, _)) => check("ii-nonzero-moments", Verdict::Fail, format!("Δ_{n} = 0")),
            });
            checks.push(root_growth_check(&m.values));
        }
        Err(e) => {
            let verdict = Verdict::Fail;
            checks.push(check("ii-nonzero-moments", verdict, e.to_string()));
            checks.push(check(
                "iii-moment-growth",
                Verdict::Inconclusive,
                "moments unavailable".into(),
            ));
        }
    }
    WeightClassReport {
        class: "Omega_A(disc)",
        checked_conditions: checks,
    }
}

/// liminf |Δ_n|^{1/n} ≥ 1, probed by fitting `ln|Δ_n| ≈ a + b ln n + c n`
/// through `n = N/4, N/2, N`: `c ≥ 0` within slack is consistent.
fn root_growth_check(values: &[f64]) -> ConditionCheck {
    let n3 = values.len() - 1;
    let (n1, n2) = (n3 / 4, n3 / 2);
    let l = |n: usize| values[n].abs().ln();
    let (x1, x2, x3) = (n1 as f64, n2 as f64, n3 as f64);
    // eliminate a, then b
    let d21 = (l(n2) - l(n1), (x2.ln() - x1.ln()), x2 - x1);
    let d32 = (l(n3) - l(n2), (x3.ln() - x2.ln()), x3 - x2);
    let c = (d32.0 * d21.1 - d21.0 * d32.1) / (d32.2 * d21.1 - d21.2 * d32.1);
    let root = values[n3].abs().powf(1.0 / x3);
    let evidence =
        format!("|Δ_{n3}|^(1/{n3}) = {root:.6}, fitted exponential rate e^c with c = {c:.3e}");
    if c >= -1e-3 {
        check(
            "iii-moment-growth",
            Verdict::Inconclusive,
            format!("{evidence}; consistent (inconclusive-pass)"),
        )
    } else if c < -1e-2 {
        check("iii-moment-growth", Verdict::Fail, evidence)
    } else {
        check(
            "iii-moment-growth",
            Verdict::Inconclusive,
            format!("{evidence}; undecided"),
        )
    }
}

fn validate_plane(w: &WeightFunction) -> WeightClassReport {
    let mut checks = Vec::new();
    let span = 40.0 * w.tail_scale;
    checks.push(match w.is_monotone(0.0, span, 2000, -1, true) {
        Ok(true) => check(
            "strictly-decreasing",
            Verdict::Pass,
            format!("strictly decreasing on 2000 samples of [0, {span}]"),
        ),
        Ok(false) => check(
            "strictly-decreasing",
            Verdict::Fail,
            "monotonicity violated on the grid".into(),
        ),
        Err(e) => check("strictly-decreasing", Verdict::Fail, e.to_string()),
    });
    let w0 = w.normalization.at_zero;
    checks.push(check(
        "unit-at-origin",
        if (w0 - 1.0).abs() <= 1e-12 {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        format!("ω(0) = {w0}"),
    ));
    checks.push(match moments::plane_moments(w, 64) {
        Ok(m) if m.values.iter().all(|v| v.is_finite() && *v > 0.0) => check(
            "finite-moments",
            Verdict::Pass,
            format!("Δ_0..Δ_64 finite and positive, Δ_64 = {:.3e}", m.values[64]),
        ),
        Ok(_) => check(
            "finite-moments",
            Verdict::Fail,
            "non-finite or non-positive moment".into(),
        ),
        Err(e) => check("finite-moments", Verdict::Fail, e.to_string()),
    });
    WeightClassReport {
        class: "Omega_A(plane)",
        checked_conditions: checks,
    }
}

fn validate_half_plane(w: &WeightFunction) -> WeightClassReport {
    let mut checks = Vec::new();
    let end = if w.support_end.is_finite() {
        1.5 * w.support_end
    } else {
        50.0
    };
    checks.push(match w.is_monotone(0.0, end, 2000, 1, false) {
        Ok(true) => check(
            "i-nondecreasing",
            Verdict::Pass,
            format!("nondecreasing on [0, {end}]"),
        ),
        Ok(false) => check(
            "i-nondecreasing",
            Verdict::Fail,
            "decrease found on the grid".into(),
        ),
        Err(e) => check("i-nondecreasing", Verdict::Fail, e.to_string()),
    });

    let continuity = (|| -> Result<(f64, f64)> {
        let w0 = w.value(0.0)?;
        let scale = w.value(end.min(1.0))?.abs().max(1e-300);
        Ok((
            (w.value(1e-12)? - w0).abs() / scale,
            (w.value(1e-6)? - w0).abs() / scale,
        ))
    })();
    checks.push(match continuity {
        Ok((d12, d6)) if d12 <= 1e-4 && d12 <= d6 => check(
            "i-right-continuous-at-0",
            Verdict::Pass,
            format!("|ω(1e-12) - ω(0)| / scale = {d12:.2e}"),
        ),
        Ok((d12, _)) => check(
            "i-right-continuous-at-0",
            Verdict::Fail,
            format!("jump of relative size {d12:e} at 0"),
        ),
        Err(e) => check("i-right-continuous-at-0", Verdict::Fail, e.to_string()),
    });

    let strict = (|| -> Result<bool> {
        let mut prev = w.value(0.5)?;
        for k in 2..=40 {
            let v = w.value(0.5f64.powi(k))?;
            if !(v < prev) {
                return Ok(false);
            }
            prev = v;
        }
        Ok(true)
    })();
    checks.push(match strict {
        Ok(true) => check(
            "i-strict-near-0",
            Verdict::Pass,
            "ω(2^-k) strictly decreasing for k = 1..40".into(),
        ),
        Ok(false) => check(
            "i-strict-near-0",
            Verdict::Fail,
            "ω(2^-k) not strictly decreasing".into(),
        ),
        Err(e) => check("i-strict-near-0", Verdict::Fail, e.to_string()),
    });

    checks.push(match w.declared_alpha {
        None => check(
            "ii-power-comparability",
            Verdict::Fail,
            "no exponent α with ω ≍ t^(1+α) is declared".into(),
        ),
        Some(alpha) => {
            let t0 = if w.support_end.is_finite() {
                2.0 * w.support_end.max(1.0)
            } else {
                1e2
            };
            let t1 = t0 * 1e4;
            match (w.value(t0), w.value(t1)) {
                (Ok(a), Ok(b)) if a > 0.0 && b.is_finite() && b > 0.0 => {
                    let slope = (b.ln() - a.ln()) / (t1.ln() - t0.ln());
                    let evidence = format!(
                        "log-log slope on [{t0:.0}, {t1:.0}] = {slope:.4}, expected {}",
                        1.0 + alpha
                    );
                    if (slope - (1.0 + alpha)).abs() <= 0.05 {
                        check(
                            "ii-power-comparability",
                            Verdict::Inconclusive,
                            format!("{evidence}; consistent"),
                        )
                    } else {
                        check("ii-power-comparability", Verdict::Fail, evidence)
                    }
                }
                _ => check(
                    "ii-power-comparability",
                    Verdict::Fail,
                    "ω is not positive and finite on the probe range".into(),
                ),
            }
        }
    });
    WeightClassReport {
        class: "Omega_alpha(half-plane)",
        checked_conditions: checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(w: &WeightFunction, t: f64) -> f64 {
        let h = 1e-5 * t.max(1e-3);
        (w.value(t + h).unwrap() - w.value(t - h).unwrap()) / (2.0 * h)
    }

    #[test]
    fn disc_power_endpoints() {
        let w = make_power_weight(Geometry::Disc, 1.0).unwrap();
        assert_eq!(w.value(0.0).unwrap(), 1.0);
        assert_eq!(w.value(1.0).unwrap(), 0.0);
        let w = make_power_weight(Geometry::Disc, 0.5).unwrap();
        assert!((w.value(0.25).unwrap() - 0.75f64.sqrt()).abs() < 1e-15);
        assert!((w.value(0.25).unwrap() - 0.8660).abs() < 1e-4);
    }

    #[test]
    fn half_plane_power_lebesgue_case() {
        let w = make_power_weight(Geometry::HalfPlane, 0.0).unwrap();
        for t in [0.0, 0.3, 2.0, 17.0] {
            assert_eq!(w.value(t).unwrap(), t);
        }
    }

    #[test]
    fn out_of_range_alpha_is_rejected() {
        assert!(matches!(
            make_power_weight(Geometry::Disc, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            make_power_weight(Geometry::HalfPlane, -1.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            make_power_weight(Geometry::Plane, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn named_weights() {
        let w = make_named_weight(Geometry::Plane, NamedTag::ExpSimple).unwrap();
        assert_eq!(w.value(0.0).unwrap(), 1.0);
        assert!(w.is_monotone(0.0, 30.0, 300, -1, true).unwrap());
        let w = make_named_weight(Geometry::HalfPlane, NamedTag::LogOnePlus).unwrap();
        assert!((w.value(1.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        let w = make_named_weight(
            Geometry::Plane,
            NamedTag::ExpDecay {
                gamma: 1.0,
                rho: 1.0,
                mu: 1.0,
            },
        )
        .unwrap();
        assert!((exp_decay_constant(&w).unwrap() - 1.0).abs() < 1e-15);
        assert!((w.value(1.3).unwrap() - (-1.3f64).exp()).abs() < 1e-14);
        assert!(make_named_weight(Geometry::Disc, NamedTag::LogOnePlus).is_err());
    }

    #[test]
    fn exp_decay_constant_matches_quadrature() {
        // C₀ = (∫ e^{-γx^ρ} x^{μρ-1} dx)^{-1}
        for (g, r, m) in [(1.0, 1.0, 1.0), (2.0, 2.0, 1.0), (0.5, 1.5, 0.7)] {
            let w = make_named_weight(
                Geometry::Plane,
                NamedTag::ExpDecay {
                    gamma: g,
                    rho: r,
                    mu: m,
                },
            )
            .unwrap();
            let est = w
                .integrate_plain(0.0, f64::INFINITY, 1, &QuadOptions::rel(1e-13), |x, out| {
                    out[0] = (-g * x.powf(r)).exp() * x.powf(m * r - 1.0);
                    Ok(())
                })
                .unwrap();
            assert!((exp_decay_constant(&w).unwrap() * est.values[0] - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let disc = make_power_weight(Geometry::Disc, 1.5).unwrap();
        let weights = vec![
            disc.clone(),
            make_power_weight(Geometry::Disc, 0.5).unwrap(),
            squash(&disc, SquashKind::SquareArg).unwrap(),
            volterra_square(&make_power_weight(Geometry::Disc, 2.0).unwrap()).unwrap(),
            derive_projection_weight(&disc, 2.0, None).unwrap(),
            make_named_weight(
                Geometry::Plane,
                NamedTag::ExpDecay {
                    gamma: 1.0,
                    rho: 2.0,
                    mu: 1.0,
                },
            )
            .unwrap(),
            make_power_weight(Geometry::HalfPlane, 0.5).unwrap(),
            make_named_weight(Geometry::HalfPlane, NamedTag::LogOnePlus).unwrap(),
        ];
        for w in &weights {
            for t in [0.2, 0.45, 0.7] {
                let d = w.derivative(t).unwrap();
                let rel = (d - fd(w, t)).abs() / d.abs().max(1e-12);
                assert!(rel < 1e-6, "{}: t={t} d={d} fd={}", w.describe(), fd(w, t));
            }
        }
    }

    #[test]
    fn volterra_disc_closed_form() {
        let base = make_power_weight(Geometry::Disc, 1.0).unwrap();
        let v = volterra_square(&base).unwrap();
        assert_eq!(v.value(0.0).unwrap(), 1.0);
        assert_eq!(v.value(1.0).unwrap(), 0.0);
        for x in [0.05, 0.3, 0.5, 0.9] {
            let exact = 1.0 - x + x * f64::ln(x);
            assert!((v.value(x).unwrap() - exact).abs() < 1e-13);
            assert!((v.derivative(x).unwrap() - x.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn volterra_half_plane_capped_linear() {
        let base = make_linear_weight(1.0, Some(1.0)).unwrap();
        let v = volterra_square(&base).unwrap();
        for x in [0.1, 0.5, 1.0] {
            assert!((v.value(x).unwrap() - 0.5 * x * x).abs() < 1e-13);
        }
        assert_eq!(v.support_end(), 2.0);
        assert!((v.value(5.0).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn volterra_preconditions() {
        let w = make_power_weight(Geometry::HalfPlane, 0.0).unwrap();
        let shifted = make_named_weight(Geometry::Plane, NamedTag::ExpSimple).unwrap();
        assert!(volterra_square(&w).is_ok());
        assert!(volterra_square(&shifted).is_ok());
        let tab = make_tabulated_weight(Geometry::Disc, vec![(0.0, 1.0), (1.0, 0.0)]).unwrap();
        assert!(matches!(volterra_square(&tab), Err(Error::Precondition(_))));
        let not_unit =
            make_tabulated_weight(Geometry::HalfPlane, vec![(0.0, 1.0), (1.0, 2.0)]).unwrap();
        assert!(matches!(
            volterra_square(&not_unit),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn derived_disc_power_closed_form() {
        for alpha in [1.0, 1.5, 2.0] {
            let w1 = make_power_weight(Geometry::Disc, alpha).unwrap();
            for p in [1.0, 2.0, 3.0] {
                let w = derive_projection_weight(&w1, p, None).unwrap();
                let k = (alpha - 1.0) * p + 1.0;
                for t in [0.0f64, 0.2, 0.6, 0.95] {
                    let exact = alpha.powf(p) * (1.0 - t).powf(k) / k;
                    let got = w.value(t).unwrap();
                    assert!(
                        (got - exact).abs() <= 1e-10 * exact.max(1e-300),
                        "α={alpha} p={p} t={t}"
                    );
                }
            }
        }
    }

    #[test]
    fn derived_half_plane_linear() {
        let w1 = make_linear_weight(1.0, Some(1.0)).unwrap();
        let w = derive_projection_weight(&w1, 2.0, None).unwrap();
        assert_eq!(w.support_end(), 2.0);
        for s in [0.3, 1.0, 1.9] {
            assert!((w.value(s).unwrap() - s / 2.0).abs() < 1e-13);
        }
        assert!((w.value(7.0).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn derived_plane_requires_normalization() {
        let w1 = make_named_weight(Geometry::Plane, NamedTag::ExpSimple).unwrap();
        // (-ω₁')^{pε} = e^{-pε t} integrates to 1/(pε)
        assert!(derive_projection_weight(&w1, 2.0, Some(0.5)).is_ok());
        assert!(matches!(
            derive_projection_weight(&w1, 2.0, Some(0.25)),
            Err(Error::Precondition(_))
        ));
        assert!(derive_projection_weight(&w1, 2.0, None).is_err());
    }

    #[test]
    fn squash_substitutions() {
        let d = make_power_weight(Geometry::Disc, 1.0).unwrap();
        let s = squash(&d, SquashKind::SquareArg).unwrap();
        assert!((s.value(0.5).unwrap() - 0.75).abs() < 1e-15);
        let p = make_named_weight(Geometry::Plane, NamedTag::ExpSimple).unwrap();
        let s = squash(&p, SquashKind::SquareArg).unwrap();
        assert!((s.value(1.2).unwrap() - (-1.44f64).exp()).abs() < 1e-14);
        let h = make_linear_weight(0.5, Some(2.0)).unwrap();
        let s = squash(&h, SquashKind::DoubleArg).unwrap();
        assert_eq!(s.support_end(), 1.0);
        assert!((s.value(0.4).unwrap() - 0.4).abs() < 1e-15);
        assert!(matches!(
            squash(&h, SquashKind::SquareArg),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn class_reports() {
        let r = validate_class(&make_power_weight(Geometry::Disc, 2.0).unwrap());
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.checked_conditions.len(), 3);
        let r = validate_class(&make_named_weight(Geometry::Plane, NamedTag::ExpSimple).unwrap());
        assert!(
            r.checked_conditions
                .iter()
                .all(|c| c.verdict == Verdict::Pass),
            "{r:?}"
        );
        let t2 = make_power_weight(Geometry::HalfPlane, 1.0)
            .unwrap()
            .with_declared_alpha(0.0);
        let r = validate_class(&t2);
        assert_eq!(
            r.get("ii-power-comparability").unwrap().verdict,
            Verdict::Fail
        );
        let lin = make_linear_weight(1.0, Some(1.0)).unwrap();
        assert!(validate_class(&lin).passed());
    }

    #[test]
    fn geometric_moment_decay_fails_growth_condition() {
        // ω with Δ_n = 2^{-n}: a point mass at t = 1/2 (tabulated jump).
        let w = make_tabulated_weight(
            Geometry::Disc,
            vec![(0.0, 1.0), (0.5, 1.0), (0.5, 0.0), (1.0, 0.0)],
        )
        .unwrap();
        let r = validate_class(&w);
        assert_eq!(
            r.get("iii-moment-growth").unwrap().verdict,
            Verdict::Fail,
            "{r:?}"
        );
    }

    #[test]
    fn tabulated_csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.csv");
        std::fs::write(&path, "t,omega\n0,1\n0.5,0.5\n1,0\n").unwrap();
        let w = load_tabulated_csv(&path, Geometry::Disc).unwrap();
        assert!((w.value(0.25).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(w.derivative(0.7).unwrap(), -1.0);
    }
}
