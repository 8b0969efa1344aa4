//! One runner per scenario kind. Each returns the measured quantities that
//! are compared against the scenario tolerance, plus informational values.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{scenario_seed, ScenarioConfig, ScenarioKind};
use crate::error::{Error, Result};
use crate::functions::{ComplexFn, HolomorphicFunction};
use crate::kernels::{KernelEvaluator, KernelOptions};
use crate::moments::{
    disc_moments, disc_moments_with, laplace_symbol, laplace_symbol_with, plane_moments,
    plane_moments_with, MomentMethod,
};
use crate::norms::{area_norm, hardy_norm, QuadratureSpec};
use crate::operators::OperatorContext;
use crate::weights::{
    derive_projection_weight, squash, validate_class, volterra_square, Geometry, SquashKind,
    WeightFunction,
};

const MOMENT_IDENTITY_ORDER: usize = 32;
const LAPLACE_SAMPLES: usize = 16;
const KERNEL_POINTS: usize = 20;
const REPRESENTATION_POINTS: usize = 10;
const HALF_PLANE_REPRESENTATION_POINTS: usize = 5;
const NORMALIZATION_SLACK: f64 = 1e-10;

#[derive(Debug, Default)]
pub(crate) struct Outcome {
    /// Quantities that must not exceed the tolerance.
    pub measured: BTreeMap<String, f64>,
    pub auxiliary: BTreeMap<String, f64>,
}

/// Statement the scenario's threshold is checked against.
pub fn claim(kind: ScenarioKind, geometry: Geometry, p: Option<f64>) -> &'static str {
    use Geometry::*;
    use ScenarioKind::*;
    match (kind, geometry) {
        (MomentIdentity, HalfPlane) => {
            "the Laplace symbol of the Volterra square is the square of the base symbol"
        }
        (MomentIdentity, _) => "moments of the Volterra square are the squares of the base moments",
        (KernelIdentity, Disc) => "L_ω C_ω(z) = 1/(1 - z) on the disc",
        (KernelIdentity, Plane) => "L_ω C_ω(z) = 1/(1 - z) inside the unit disc",
        (KernelIdentity, HalfPlane) => "L_ω C_ω(z) = -1/(iz) on the upper half-plane",
        (Representation, Disc) => {
            "area integral against the weighted Cauchy kernel reproduces A^p_ω(D)"
        }
        (Representation, Plane) => {
            "area integral against the entire Cauchy-type kernel reproduces A^p_ω(C)"
        }
        (Representation, HalfPlane) => "area integral against C_ω(z - w̄) reproduces A^p_ω(G+)",
        (Isometry, Disc) => {
            "L_ω̃ is an isometry from A²_ω(D) onto H²(D) for the Volterra square ω of ω̃"
        }
        (Isometry, Plane) => {
            "L^∞_ω is an isometry from A²_ω̃(C) onto H²(D) for the Volterra square ω̃ of ω"
        }
        (Isometry, HalfPlane) => {
            "L_ω is an isometry from A²_ω̃(G+) onto H²(G+) for the Volterra square ω̃ of ω"
        }
        (ProjectionBound, Disc) => "‖L_ω₁‖ ≤ 1 from A^p_ω(D) to H^p(D) with ω₁(x) = ω(x²)",
        (ProjectionBound, Plane) => {
            "‖L^∞_ω₁‖ ≤ 1 from A^p_ω(C) to H^p(D) with ω₁(x) = ω(x²) and total variation 1"
        }
        (ProjectionBound, HalfPlane) => match p {
            Some(1.0) => "‖L_ω₁ f‖_{H¹(G+)} ≤ ‖f‖_{1,ω} with ω₁(t) = ω(2t)",
            _ => "‖L_ω₁ f‖^p_{H^p(G+)} ≤ Δ₀^{p-1} ‖f‖^p_{p,ω} for the derived weight ω of ω₁",
        },
        (Reconstruction, HalfPlane) => "f(z) = (1/2π) ∫ φ(t) C_ω₁(z - t) dt with φ = L_ω₁ f",
        (Reconstruction, _) => "f(z) = (1/2π) ∫ φ(e^{iθ}) C_ω₁(z e^{-iθ}) dθ with φ = L_ω₁ f",
    }
}

pub(crate) fn run(sc: &ScenarioConfig, seed: u64) -> Result<Outcome> {
    let w = sc.parse_weight()?;
    validated(&w)?;
    let functions = sc.expand_functions(seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario_seed(seed, &sc.id));
    match sc.kind {
        ScenarioKind::MomentIdentity => moment_identity(&w),
        ScenarioKind::KernelIdentity => kernel_identity(sc, &w, &mut rng),
        ScenarioKind::Representation => representation(sc, &w, &functions, &mut rng),
        ScenarioKind::Isometry => isometry(&w, &functions),
        ScenarioKind::ProjectionBound => projection_bound(sc, &w, &functions),
        ScenarioKind::Reconstruction => reconstruction(sc, &w, &functions),
    }
}

fn validated(w: &WeightFunction) -> Result<()> {
    let report = validate_class(w);
    if report.passed() {
        return Ok(());
    }
    let failed: Vec<String> = report
        .checked_conditions
        .iter()
        .filter(|c| c.verdict == crate::weights::Verdict::Fail)
        .map(|c| format!("{}: {}", c.id, c.evidence))
        .collect();
    Err(Error::ClassViolation(format!(
        "{} fails {}",
        w.describe(),
        failed.join("; ")
    )))
}

fn ctx_tol(tol: f64, ceiling: f64) -> f64 {
    (0.01 * tol).clamp(1e-12, ceiling)
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn moment_identity(w: &WeightFunction) -> Result<Outcome> {
    let sq = volterra_square(w)?;
    validated(&sq)?;
    let mut out = Outcome::default();
    let worst = match w.geometry() {
        Geometry::HalfPlane => {
            let base = laplace_symbol(w)?;
            let square = laplace_symbol_with(&sq, MomentMethod::Quadrature)?;
            let mut worst: f64 = 0.0;
            for k in 0..LAPLACE_SAMPLES {
                let t = 0.1 * 1.5f64.powi(k as i32);
                let b = base.eval(t)?;
                worst = worst.max(rel_err(square.eval(t)?, b * b));
            }
            out.auxiliary
                .insert("samples".into(), LAPLACE_SAMPLES as f64);
            worst
        }
        g => {
            let (base, square) = match g {
                Geometry::Disc => (
                    disc_moments(w, MOMENT_IDENTITY_ORDER)?,
                    disc_moments_with(&sq, MOMENT_IDENTITY_ORDER, MomentMethod::Quadrature)?,
                ),
                _ => (
                    plane_moments(w, MOMENT_IDENTITY_ORDER)?,
                    plane_moments_with(&sq, MOMENT_IDENTITY_ORDER, MomentMethod::Quadrature)?,
                ),
            };
            out.auxiliary
                .insert("orders".into(), (MOMENT_IDENTITY_ORDER + 1) as f64);
            base.values
                .iter()
                .zip(&square.values)
                .map(|(b, s)| rel_err(*s, b * b))
                .fold(0.0, f64::max)
        }
    };
    out.measured.insert("max_rel_err".into(), worst);
    Ok(out)
}

fn kernel_identity(
    sc: &ScenarioConfig,
    w: &WeightFunction,
    rng: &mut ChaCha8Rng,
) -> Result<Outcome> {
    let kernel = KernelEvaluator::auto(w, KernelOptions::default())?;
    let ctx = OperatorContext::with_kernel(kernel.clone(), 1e-12)?;
    let k = kernel.clone();
    let c: Arc<dyn ComplexFn> = Arc::new(move |z: Complex64| k.eval(z));
    let mut points = sc.points();
    let i = Complex64::new(0.0, 1.0);
    let mut worst: f64 = 0.0;
    match w.geometry() {
        Geometry::Disc => {
            if points.is_empty() {
                points = (0..KERNEL_POINTS).map(|_| disc_point(rng, 0.8)).collect();
            }
            for z in &points {
                let lhs = ctx.apply_l_quadrature(c.as_ref(), *z)?;
                worst = worst.max((lhs - (1.0 - z).inv()).norm());
            }
        }
        Geometry::HalfPlane => {
            if points.is_empty() {
                points = (0..KERNEL_POINTS).map(|_| half_plane_point(rng, 0.5, 3.0)).collect();
            }
            let image = ctx.apply_l_half_plane(c)?;
            for z in &points {
                worst = worst.max((image.eval(*z)? - (-(i * z).inv())).norm());
            }
        }
        Geometry::Plane => {
            return Err(Error::Unsupported(
                "the plane kernel is certified on a disc, so L^∞_ω C^∞_ω cannot be integrated along rays".into(),
            ))
        }
    }
    let mut out = Outcome::default();
    out.measured.insert("max_abs_err".into(), worst);
    out.auxiliary.insert("points".into(), points.len() as f64);
    Ok(out)
}

fn disc_point(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI))
}

fn half_plane_point(rng: &mut ChaCha8Rng, im_lo: f64, im_hi: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(im_lo..im_hi))
}

fn representation(
    sc: &ScenarioConfig,
    w: &WeightFunction,
    functions: &[(String, HolomorphicFunction)],
    rng: &mut ChaCha8Rng,
) -> Result<Outcome> {
    let ctx = OperatorContext::new(w, ctx_tol(sc.tol, 1e-7))?;
    let mut points = sc.points();
    if points.is_empty() {
        points = match w.geometry() {
            Geometry::Disc => (0..REPRESENTATION_POINTS)
                .map(|_| disc_point(rng, 0.7))
                .collect(),
            Geometry::Plane => (0..REPRESENTATION_POINTS)
                .map(|_| disc_point(rng, 2.0))
                .collect(),
            Geometry::HalfPlane => (0..HALF_PLANE_REPRESENTATION_POINTS)
                .map(|_| half_plane_point(rng, 0.5, 2.5))
                .collect(),
        };
    }
    let mut worst: f64 = 0.0;
    for (_, f) in functions {
        for z in &points {
            let v = ctx.area_reproduce(f, *z, sc.p)?;
            worst = worst.max((v - f.eval(*z)?).norm());
        }
    }
    let mut out = Outcome::default();
    out.measured.insert("max_abs_err".into(), worst);
    if w.geometry() == Geometry::Disc {
        let mut anti: f64 = 0.0;
        for m in 1..=3 {
            let g = move |z: Complex64| -> Result<Complex64> { Ok(z.conj().powu(m)) };
            for z in points.iter().take(3) {
                anti = anti.max(ctx.area_reproduce(&g, *z, sc.p)?.norm());
            }
        }
        out.measured.insert("antiholomorphic_max".into(), anti);
    }
    out.auxiliary.insert("points".into(), points.len() as f64);
    out.auxiliary
        .insert("functions".into(), functions.len() as f64);
    Ok(out)
}

fn require(cond: bool, what: &str, w: &WeightFunction) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{} must satisfy {what}",
            w.describe()
        )))
    }
}

fn hardy_geometry(g: Geometry) -> Geometry {
    match g {
        Geometry::HalfPlane => Geometry::HalfPlane,
        _ => Geometry::Disc,
    }
}

fn isometry(w: &WeightFunction, functions: &[(String, HolomorphicFunction)]) -> Result<Outcome> {
    let n = w.normalization();
    match w.geometry() {
        Geometry::Disc => require(
            (n.at_zero - 1.0).abs() <= NORMALIZATION_SLACK && n.at_end.abs() <= NORMALIZATION_SLACK,
            "ω̃(0) = 1 and ω̃(1) = 0",
            w,
        )?,
        Geometry::Plane => require(n.at_end.abs() <= NORMALIZATION_SLACK, "ω(∞) = 0", w)?,
        Geometry::HalfPlane => require(n.at_zero.abs() <= NORMALIZATION_SLACK, "ω(0) = 0", w)?,
    }
    let sq = volterra_square(w)?;
    validated(&sq)?;
    let ctx = OperatorContext::new(w, 1e-12)?;
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    let mut largest: f64 = 0.0;
    for (_, f) in functions {
        let phi = ctx.apply_l(f)?;
        let h = hardy_norm(hardy_geometry(w.geometry()), 2.0, &phi, &spec)?;
        let a = area_norm(&sq, 2.0, f, &spec)?;
        let d = (h.normalized - a.normalized).abs();
        worst = worst.max(if a.normalized > 0.0 {
            d / a.normalized
        } else {
            d
        });
        largest = largest.max(a.normalized);
    }
    let mut out = Outcome::default();
    out.measured.insert("max_rel_discrepancy".into(), worst);
    out.auxiliary.insert("max_area_norm".into(), largest);
    out.auxiliary
        .insert("functions".into(), functions.len() as f64);
    Ok(out)
}

fn projection_bound(
    sc: &ScenarioConfig,
    w: &WeightFunction,
    functions: &[(String, HolomorphicFunction)],
) -> Result<Outcome> {
    let p =
        sc.p.ok_or_else(|| Error::Precondition(format!("scenario `{}` needs p", sc.id)))?;
    let spec = QuadratureSpec::default();
    let mut out = Outcome::default();
    // (ω₁ for L, ω for the area norm, constant in front of the area norm^p)
    let (w1, omega, factor) = match w.geometry() {
        Geometry::Disc | Geometry::Plane => {
            if w.geometry() == Geometry::Plane {
                let tv = w.normalization().total_variation;
                require((tv - 1.0).abs() <= 1e-8, "total variation 1", w)?;
            }
            (squash(w, SquashKind::SquareArg)?, w.clone(), 1.0)
        }
        Geometry::HalfPlane if p == 1.0 => (squash(w, SquashKind::DoubleArg)?, w.clone(), 1.0),
        Geometry::HalfPlane => {
            let omega = derive_projection_weight(w, p, None)?;
            let delta0 = w.normalization().total_variation;
            out.auxiliary.insert("delta0".into(), delta0);
            (w.clone(), omega, delta0.powf(p - 1.0))
        }
    };
    validated(&w1)?;
    validated(&omega)?;
    let ctx = OperatorContext::new(&w1, 1e-12)?;
    let mut worst = f64::NEG_INFINITY;
    let mut statement = f64::NEG_INFINITY;
    for (_, f) in functions {
        let phi = ctx.apply_l(f)?;
        let h = hardy_norm(hardy_geometry(w.geometry()), p, &phi, &spec)?;
        let a = area_norm(&omega, p, f, &spec)?;
        let (hp, ap) = (h.normalized_pow(), a.normalized_pow());
        let ratio = if ap > 0.0 {
            hp / (factor * ap)
        } else if hp > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        worst = worst.max(ratio);
        if ap > 0.0 {
            statement = statement.max(h.normalized / (factor * a.normalized));
        }
    }
    if functions.is_empty() {
        worst = 0.0;
    }
    out.measured.insert("max_ratio_excess".into(), worst - 1.0);
    out.auxiliary.insert("max_ratio".into(), worst);
    if w.geometry() == Geometry::HalfPlane && p > 1.0 && statement.is_finite() {
        out.auxiliary
            .insert("statement_form_max_ratio".into(), statement);
    }
    out.auxiliary
        .insert("functions".into(), functions.len() as f64);
    Ok(out)
}

fn reconstruction(
    sc: &ScenarioConfig,
    w: &WeightFunction,
    functions: &[(String, HolomorphicFunction)],
) -> Result<Outcome> {
    let ctx = OperatorContext::new(w, ctx_tol(sc.tol, 1e-6))?;
    let mut points = sc.points();
    if points.is_empty() {
        let c = Complex64::new;
        points = match w.geometry() {
            Geometry::Disc => vec![
                c(0.3, 0.0),
                c(0.0, 0.5),
                c(-0.2, 0.4),
                c(0.1, -0.6),
                c(-0.5, -0.1),
            ],
            Geometry::Plane => vec![
                c(1.0, 1.0),
                c(0.5, 0.0),
                c(0.0, -0.7),
                c(-1.0, 0.3),
                c(0.8, -0.8),
            ],
            Geometry::HalfPlane => vec![
                c(0.0, 1.0),
                c(0.5, 0.8),
                c(-1.0, 1.5),
                c(0.0, 2.0),
                c(0.3, 0.6),
            ],
        };
    }
    let mut worst: f64 = 0.0;
    for (_, f) in functions {
        let phi = ctx.apply_l(f)?;
        for z in &points {
            worst = worst.max((ctx.reconstruct_boundary(&phi, *z)? - f.eval(*z)?).norm());
        }
    }
    let mut out = Outcome::default();
    out.measured.insert("max_abs_err".into(), worst);
    out.auxiliary.insert("points".into(), points.len() as f64);
    Ok(out)
}
