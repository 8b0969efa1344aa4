//! The operators `L_ω` and their inverses, boundary reconstruction and the
//! area-reproducing integrals.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::functions::{ComplexFn, HolomorphicFunction, RationalTerm};
use crate::kernels::{KernelEvaluator, KernelOptions};
use crate::moments::{self, linear_profile};
use crate::quadrature::{circle_mean, integrate_complex_maps, Map, QuadOptions};
use crate::weights::{Geometry, WeightFunction};

/// Agreement required between the coefficient and quadrature routes of `L_ω`.
pub const APPLY_CROSS_CHECK_TOL: f64 = 1e-8;
const CROSS_CHECK_POINTS: usize = 10;
const MAX_ANGULAR_NODES: usize = 1 << 16;

/// Weight, kernel and tolerances shared by the operator routines.
#[derive(Debug, Clone)]
pub struct OperatorContext {
    weight: Arc<WeightFunction>,
    kernel: KernelEvaluator,
    tol: f64,
    seed: u64,
}

/// `L_ω f` on the half-plane, evaluated pointwise.
#[derive(Clone)]
pub struct HalfPlaneImage {
    weight: Arc<WeightFunction>,
    f: Arc<dyn ComplexFn>,
    closed: Option<(f64, Option<f64>, Vec<RationalTerm>)>,
    tol: f64,
}

impl std::fmt::Debug for HalfPlaneImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HalfPlaneImage")
            .field("weight", &self.weight.describe())
            .field("closed_form", &self.closed.is_some())
            .finish()
    }
}

/// Result of [`OperatorContext::apply_l`].
#[derive(Debug, Clone)]
pub enum LImage {
    Taylor(HolomorphicFunction),
    HalfPlane(HalfPlaneImage),
}

impl ComplexFn for HalfPlaneImage {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        HalfPlaneImage::eval(self, z)
    }
}

impl ComplexFn for LImage {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            LImage::Taylor(f) => f.eval(z),
            LImage::HalfPlane(h) => h.eval(z),
        }
    }
}

impl LImage {
    pub fn taylor(&self) -> Option<&HolomorphicFunction> {
        match self {
            LImage::Taylor(f) => Some(f),
            _ => None,
        }
    }
}

impl HalfPlaneImage {
    /// `∫₀^∞ f(z + it) dω(t)` for `Im z ≥ 0`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.im < 0.0 {
            return Err(Error::Domain(format!("Im z = {} is negative", z.im)));
        }
        if let Some((slope, cap, terms)) = &self.closed {
            return Ok(linear_image(*slope, *cap, terms, z));
        }
        let opts = QuadOptions::rel(self.tol).with_abs(0.0);
        let est = self.weight.stieltjes(
            0.0,
            f64::INFINITY,
            2,
            &QuadOptions {
                joint: true,
                ..opts
            },
            |t, out| {
                let v = self.f.eval(z + Complex64::new(0.0, t))?;
                out[0] = v.re;
                out[1] = v.im;
                Ok(())
            },
        )?;
        Ok(Complex64::new(est.values[0], est.values[1]))
    }

    pub fn is_closed_form(&self) -> bool {
        self.closed.is_some()
    }
}

/// `∫₀^Δ a (w + it)^{-k} dt` summed over the terms, `w = z + shift + ic`.
fn linear_image(slope: f64, cap: Option<f64>, terms: &[RationalTerm], z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let mut s = Complex64::new(0.0, 0.0);
    for t in terms {
        let w = t.base(z);
        let v = match (t.k, cap) {
            (1, Some(d)) => ((w + i * d).ln() - w.ln()) / i,
            (k, Some(d)) => {
                let e = 1 - k as i32;
                ((w + i * d).powi(e) - w.powi(e)) / (i * e as f64)
            }
            (k, None) => w.powi(1 - k as i32) / (i * (k as f64 - 1.0)),
        };
        s += t.b * v * slope;
    }
    s
}

impl OperatorContext {
    /// Context with the preferred kernel of `w`.
    pub fn new(w: &WeightFunction, tol: f64) -> Result<Self> {
        let kopts = KernelOptions {
            tol: tol.min(1e-12),
            ..KernelOptions::default()
        };
        Self::with_kernel(KernelEvaluator::auto(w, kopts)?, tol)
    }

    pub fn with_kernel(kernel: KernelEvaluator, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Domain(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        Ok(OperatorContext {
            weight: kernel.weight().clone(),
            kernel,
            tol,
            seed: 0x5eed,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn weight(&self) -> &WeightFunction {
        &self.weight
    }

    pub fn kernel(&self) -> &KernelEvaluator {
        &self.kernel
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn geometry(&self) -> Geometry {
        self.weight.geometry()
    }

    fn moment_values(&self, n: usize) -> Result<Vec<f64>> {
        if let Some(m) = self.kernel.moments() {
            if m.len() > n {
                return Ok(m.values[..=n].to_vec());
            }
        }
        let m = match self.geometry() {
            Geometry::Disc => moments::disc_moments(&self.weight, n)?,
            Geometry::Plane => moments::plane_moments(&self.weight, n)?,
            Geometry::HalfPlane => {
                return Err(Error::Unsupported(
                    "no moment sequence on the half-plane".into(),
                ))
            }
        };
        Ok(m.values)
    }

    /// `L_ω f`: coefficients `aₙ ↦ aₙ Δₙ` on the disc and plane (cross-checked
    /// against `-∫ f(tz) dω(t)`), a pointwise Stieltjes integral on the half-plane.
    pub fn apply_l(&self, f: &HolomorphicFunction) -> Result<LImage> {
        match self.geometry() {
            Geometry::HalfPlane => {
                if let HolomorphicFunction::TaylorSeries { .. } = f {
                    return Err(Error::Unsupported(
                        "half-plane L_ω acts on rational or pointwise functions".into(),
                    ));
                }
                if let (HolomorphicFunction::RationalHalfPlane { terms }, Some(alpha)) =
                    (f, self.weight.declared_alpha())
                {
                    let k = terms.iter().map(|t| t.k).min().unwrap_or(u32::MAX) as f64;
                    if self.weight.support_end().is_infinite() && k <= 1.0 + alpha {
                        return Err(Error::Precondition(format!(
                            "∫ f(z+it) dω(t) diverges: f decays like |z|^-{k} while ω grows like t^{}",
                            1.0 + alpha
                        )));
                    }
                }
                Ok(LImage::HalfPlane(
                    self.apply_l_pointwise(Arc::new(f.clone()), Some(f)),
                ))
            }
            _ => {
                let a = f.coefficients()?;
                let delta = self.moment_values(a.len().saturating_sub(1))?;
                let b: Vec<Complex64> = a.iter().zip(&delta).map(|(a, d)| a * *d).collect();
                let image = HolomorphicFunction::taylor(b, f.radius().unwrap_or(f64::INFINITY))?;
                self.cross_check_apply(f, &image)?;
                Ok(LImage::Taylor(image))
            }
        }
    }

    /// Half-plane `L_ω` of an arbitrary pointwise function.
    pub fn apply_l_half_plane(&self, f: Arc<dyn ComplexFn>) -> Result<HalfPlaneImage> {
        if self.geometry() != Geometry::HalfPlane {
            return Err(Error::Domain(
                "pointwise L_ω is the half-plane operator".into(),
            ));
        }
        Ok(self.apply_l_pointwise(f, None))
    }

    fn apply_l_pointwise(
        &self,
        f: Arc<dyn ComplexFn>,
        known: Option<&HolomorphicFunction>,
    ) -> HalfPlaneImage {
        let closed = match (known, linear_profile(&self.weight)) {
            (Some(HolomorphicFunction::RationalHalfPlane { terms }), Some((slope, cap))) => {
                Some((slope, cap, terms.clone()))
            }
            _ => None,
        };
        HalfPlaneImage {
            weight: self.weight.clone(),
            f,
            closed,
            tol: self.tol.clamp(1e-13, 1e-10),
        }
    }

    /// Direct evaluation of `-∫ f(tz) dω(t)` over the weight's support.
    pub fn apply_l_quadrature(&self, f: &dyn ComplexFn, z: Complex64) -> Result<Complex64> {
        let opts = QuadOptions {
            joint: true,
            ..QuadOptions::rel(1e-12).with_abs(1e-15)
        };
        let end = match self.geometry() {
            Geometry::Disc => 1.0,
            Geometry::Plane => f64::INFINITY,
            Geometry::HalfPlane => {
                return Err(Error::Unsupported("use apply_l on the half-plane".into()))
            }
        };
        let est = self.weight.stieltjes(0.0, end, 2, &opts, |t, out| {
            let v = f.eval(z * t)?;
            out[0] = -v.re;
            out[1] = -v.im;
            Ok(())
        })?;
        Ok(Complex64::new(est.values[0], est.values[1]))
    }

    fn cross_check_apply(
        &self,
        f: &HolomorphicFunction,
        image: &HolomorphicFunction,
    ) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let r = match self.geometry() {
            Geometry::Disc => 0.9 * f.radius().unwrap_or(1.0).min(1.0),
            _ => 0.9 * f.radius().unwrap_or(1.0).min(1.0),
        };
        for _ in 0..CROSS_CHECK_POINTS {
            let z =
                Complex64::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
            let a = image.eval(z)?;
            let b = self.apply_l_quadrature(f, z)?;
            if (a - b).norm() > APPLY_CROSS_CHECK_TOL * a.norm().max(1.0) {
                return Err(Error::Consistency(format!(
                    "L_ω at z = {z}: coefficient route {a} vs quadrature {b}"
                )));
            }
        }
        Ok(())
    }

    /// `aₙ ↦ aₙ / Δₙ` (disc and plane).
    pub fn invert_l(&self, g: &HolomorphicFunction) -> Result<HolomorphicFunction> {
        if self.geometry() == Geometry::HalfPlane {
            return Err(Error::Unsupported(
                "the half-plane inverse is realized by reconstruct_boundary".into(),
            ));
        }
        let a = g.coefficients()?;
        let delta = self.moment_values(a.len().saturating_sub(1))?;
        let b = a.iter().zip(&delta).map(|(a, d)| a / *d).collect();
        HolomorphicFunction::taylor(b, g.radius().unwrap_or(f64::INFINITY))
    }

    /// Recover `f(z)` from boundary data `φ = L_ω f` with the kernel of this
    /// context: a circle mean of `C(z e^{-iθ}) φ(e^{iθ})` on the disc and the
    /// plane, `(1/2π)∫ C(z - t) φ(t) dt` on the half-plane.
    pub fn reconstruct_boundary(&self, phi: &dyn ComplexFn, z: Complex64) -> Result<Complex64> {
        match self.geometry() {
            Geometry::HalfPlane => self.reconstruct_half_plane(phi, z),
            _ => {
                let mut m = 64;
                let mut prev = self.circle_reconstruction(phi, z, m)?;
                loop {
                    m *= 2;
                    let next = self.circle_reconstruction(phi, z, m)?;
                    if (next - prev).norm() <= self.tol * next.norm().max(1.0) {
                        return Ok(next);
                    }
                    if m >= MAX_ANGULAR_NODES {
                        return Err(Error::Accuracy {
                            context: format!("boundary resolution at z = {z}"),
                            achieved: (next - prev).norm(),
                            target: self.tol,
                        });
                    }
                    prev = next;
                }
            }
        }
    }

    fn circle_reconstruction(
        &self,
        phi: &dyn ComplexFn,
        z: Complex64,
        m: usize,
    ) -> Result<Complex64> {
        circle_mean(m, |theta| {
            let e = Complex64::from_polar(1.0, theta);
            Ok(self.kernel.eval(z * e.conj())? * phi.eval(e)?)
        })
    }

    fn reconstruct_half_plane(&self, phi: &dyn ComplexFn, z: Complex64) -> Result<Complex64> {
        if z.im <= 0.0 {
            return Err(Error::Domain(format!("Im z = {} is not positive", z.im)));
        }
        let opts = QuadOptions::rel(self.tol.min(1e-8)).with_abs(0.0);
        let integrand = |t: f64| -> Result<Complex64> {
            Ok(self.kernel.eval(z - t)? * phi.eval(Complex64::new(t, 0.0))?)
        };
        let x = z.re;
        let mut half = 16.0f64.max(4.0 * z.im);
        let split = |w: f64| ((w / (4.0 * z.im)).ceil() as usize).clamp(1, 512);
        let (mut total, _) = integrate_complex_maps(
            &[Map::Linear {
                a: x - half,
                b: x + half,
            }],
            &[x],
            &opts.with_split(split(2.0 * half)),
            integrand,
        )?;
        for _ in 0..20 {
            let maps = [
                Map::Linear {
                    a: x - 2.0 * half,
                    b: x - half,
                },
                Map::Linear {
                    a: x + half,
                    b: x + 2.0 * half,
                },
            ];
            // the two rings cancel in part; they need accuracy only relative to the total
            let ring = opts
                .with_split(split(half))
                .with_abs(0.01 * self.tol * total.norm());
            let (inc, _) = integrate_complex_maps(&maps, &[], &ring, integrand)?;
            total += inc;
            half *= 2.0;
            if inc.norm() / (2.0 * PI) < 0.25 * self.tol * (total.norm() / (2.0 * PI)).max(1.0) {
                return Ok(total / (2.0 * PI));
            }
        }
        Err(Error::Accuracy {
            context: format!("real-line truncation at z = {z}"),
            achieved: f64::INFINITY,
            target: self.tol,
        })
    }

    /// `(1/2π) ∬ F(ζ) C(z ζ̄) dμ_ω(ζ)` (disc, plane) or
    /// `(1/2π) ∬ F(w) C(z - w̄) dμ_ω(w)` (half-plane).
    ///
    /// The plane representation is known only for `p ≥ 2`; the caller must
    /// declare the exponent of the space `F` is taken from.
    pub fn area_reproduce(
        &self,
        f: &dyn ComplexFn,
        z: Complex64,
        p: Option<f64>,
    ) -> Result<Complex64> {
        self.check_declared_p(p)?;
        self.area_integral(|w| f.eval(w), z)
    }

    /// `-conj(f(0)) + (1/π) ∬ Re f · C dμ_ω` (disc, plane) or `(1/π) ∬ Re f · C dμ_ω`.
    pub fn real_part_reproduce(
        &self,
        f: &dyn ComplexFn,
        z: Complex64,
        f0: Option<Complex64>,
        p: Option<f64>,
    ) -> Result<Complex64> {
        self.check_declared_p(p)?;
        let re = self.area_integral(|w| Ok(Complex64::new(f.eval(w)?.re, 0.0)), z)? * 2.0;
        match self.geometry() {
            Geometry::HalfPlane => Ok(re),
            _ => {
                let f0 = match f0 {
                    Some(v) => v,
                    None => f.eval(Complex64::new(0.0, 0.0))?,
                };
                Ok(re - f0.conj())
            }
        }
    }

    fn check_declared_p(&self, p: Option<f64>) -> Result<()> {
        if self.geometry() != Geometry::Plane {
            return Ok(());
        }
        match p {
            None => Err(Error::Precondition(
                "plane area representation needs the exponent p of the space to be declared".into(),
            )),
            Some(p) if p < 2.0 => Err(Error::OpenProblem(format!(
                "the area representation on the plane is not known for p = {p} < 2"
            ))),
            Some(_) => Ok(()),
        }
    }

    fn area_integral<G>(&self, g: G, z: Complex64) -> Result<Complex64>
    where
        G: Fn(Complex64) -> Result<Complex64>,
    {
        match self.geometry() {
            Geometry::HalfPlane => self.half_plane_area(&g, z),
            _ => {
                let mut m = 32;
                let mut prev = self.radial_area(&g, z, m)?;
                loop {
                    m *= 2;
                    let next = self.radial_area(&g, z, m)?;
                    if (next - prev).norm() <= self.tol * next.norm().max(1.0) {
                        return Ok(next);
                    }
                    if m >= 4096 {
                        return Err(Error::Accuracy {
                            context: format!("angular resolution of the area integral at z = {z}"),
                            achieved: (next - prev).norm(),
                            target: self.tol,
                        });
                    }
                    prev = next;
                }
            }
        }
    }

    /// `∫ [(1/2π)∫ g(√u e^{iθ}) C(z √u e^{-iθ}) dθ] (-dω(u))` with `m` angular nodes.
    fn radial_area<G>(&self, g: &G, z: Complex64, m: usize) -> Result<Complex64>
    where
        G: Fn(Complex64) -> Result<Complex64>,
    {
        let end = match (self.geometry(), self.kernel.r_max()) {
            (Geometry::Disc, Some(r)) => {
                if z.norm() > r {
                    return Err(Error::OutsideRadius {
                        r_max: r,
                        modulus: z.norm(),
                    });
                }
                1.0
            }
            (Geometry::Disc, None) => 1.0,
            (_, Some(r)) if z.norm() > 0.0 => (r / z.norm()).powi(2),
            _ => f64::INFINITY,
        };
        let opts = QuadOptions {
            joint: true,
            ..QuadOptions::rel(self.tol.clamp(1e-13, 1e-9)).with_abs(0.01 * self.tol)
        };
        let est = self.weight.stieltjes(0.0, end, 2, &opts, |u, out| {
            let rho = u.sqrt();
            let v = circle_mean(m, |theta| {
                let e = Complex64::from_polar(rho, theta);
                Ok(g(e)? * self.kernel.eval(z * e.conj())?)
            })?;
            out[0] = -v.re;
            out[1] = -v.im;
            Ok(())
        })?;
        Ok(Complex64::new(est.values[0], est.values[1]))
    }

    /// `∫₀^∞ dω(v) (1/2π) ∫_ℝ g(x + iv/2) C(z - x + iv/2) dx`.
    fn half_plane_area<G>(&self, g: &G, z: Complex64) -> Result<Complex64>
    where
        G: Fn(Complex64) -> Result<Complex64>,
    {
        let inner_opts = QuadOptions::rel(self.tol.clamp(1e-12, 1e-8)).with_abs(1e-3 * self.tol);
        let outer = QuadOptions {
            joint: true,
            ..QuadOptions::rel(self.tol.clamp(1e-11, 1e-7)).with_abs(0.01 * self.tol)
        };
        let est = self
            .weight
            .stieltjes(0.0, f64::INFINITY, 2, &outer, |v, out| {
                let y = 0.5 * v;
                let scale = z.im + y + 1.0;
                let (s, _) = integrate_complex_maps(
                    &[Map::Lower { b: z.re, scale }, Map::Upper { a: z.re, scale }],
                    &[],
                    &inner_opts,
                    |x| {
                        Ok(g(Complex64::new(x, y))?
                            * self.kernel.eval(Complex64::new(z.re - x, z.im + y))?)
                    },
                )?;
                let s = s / (2.0 * PI);
                out[0] = s.re;
                out[1] = s.im;
                Ok(())
            })?;
        Ok(Complex64::new(est.values[0], est.values[1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{make_linear_weight, make_named_weight, make_power_weight, NamedTag};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disc_apply_and_invert_examples() {
        let ctx =
            OperatorContext::new(&make_power_weight(Geometry::Disc, 1.0).unwrap(), 1e-10).unwrap();
        let z = HolomorphicFunction::monomial(1);
        let lz = ctx.apply_l(&z).unwrap();
        assert!((lz.taylor().unwrap().coefficients().unwrap()[1] - c(0.5, 0.0)).norm() < 1e-15);
        let back = ctx.invert_l(lz.taylor().unwrap()).unwrap();
        assert!((back.coefficients().unwrap()[1] - c(1.0, 0.0)).norm() < 1e-15);

        let ctx2 =
            OperatorContext::new(&make_power_weight(Geometry::Disc, 2.0).unwrap(), 1e-10).unwrap();
        let g = ctx2.invert_l(&HolomorphicFunction::monomial(2)).unwrap();
        assert!((g.coefficients().unwrap()[2] - c(6.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn plane_apply_exponential() {
        let ctx = OperatorContext::new(
            &make_named_weight(Geometry::Plane, NamedTag::ExpSimple).unwrap(),
            1e-10,
        )
        .unwrap();
        let f = HolomorphicFunction::exp_truncated(c(0.5, 0.0), 20);
        let img = ctx.apply_l(&f).unwrap();
        for (n, a) in img
            .taylor()
            .unwrap()
            .coefficients()
            .unwrap()
            .iter()
            .enumerate()
        {
            assert!((a - c(0.5f64.powi(n as i32), 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn half_plane_apply_linear_cap() {
        let w = make_linear_weight(1.0, Some(1.0)).unwrap();
        let ctx = OperatorContext::new(&w, 1e-10).unwrap();
        let f =
            HolomorphicFunction::rational(vec![RationalTerm::new(c(1.0, 0.0), 1.0, 2).unwrap()]);
        let img = ctx.apply_l(&f).unwrap();
        let quad = ctx.apply_l_half_plane(Arc::new(f.clone())).unwrap();
        for z in [c(0.0, 1.0), c(1.5, 0.2), c(-2.0, 0.0)] {
            let i = c(0.0, 1.0);
            let exact = i * ((z + 2.0 * i).inv() - (z + i).inv());
            assert!((img.eval(z).unwrap() - exact).norm() < 1e-14);
            assert!((quad.eval(z).unwrap() - exact).norm() < 1e-10);
        }
    }

    #[test]
    fn disc_reconstruction_and_reproduction() {
        let w = make_power_weight(Geometry::Disc, 1.0).unwrap();
        let ctx = OperatorContext::new(&w, 1e-10).unwrap();
        let f = HolomorphicFunction::monomial(2);
        let phi = ctx.apply_l(&f).unwrap();
        let z = c(0.0, 0.4);
        assert!((ctx.reconstruct_boundary(&phi, z).unwrap() - z * z).norm() < 1e-8);
        let f3 = HolomorphicFunction::monomial(3);
        let v = ctx.area_reproduce(&f3, c(0.5, 0.0), None).unwrap();
        assert!((v - c(0.125, 0.0)).norm() < 1e-9);
        let conj = |w: Complex64| -> Result<Complex64> { Ok(w.conj()) };
        assert!(ctx.area_reproduce(&conj, c(0.3, 0.2), None).unwrap().norm() < 1e-9);
        let modsq = |w: Complex64| -> Result<Complex64> { Ok(c(w.norm_sqr(), 0.0)) };
        assert!(
            (ctx.area_reproduce(&modsq, c(0.3, 0.2), None).unwrap() - c(0.5, 0.0)).norm() < 1e-9
        );
        let f2 = HolomorphicFunction::monomial(2);
        let z = c(0.3, 0.1);
        assert!((ctx.real_part_reproduce(&f2, z, None, None).unwrap() - z * z).norm() < 1e-8);
    }

    #[test]
    fn plane_requires_declared_exponent() {
        let ctx = OperatorContext::new(
            &make_named_weight(Geometry::Plane, NamedTag::ExpSimple).unwrap(),
            1e-9,
        )
        .unwrap();
        let f = HolomorphicFunction::monomial(2);
        let z = c(0.5, 0.5);
        assert!(matches!(
            ctx.area_reproduce(&f, z, None),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            ctx.area_reproduce(&f, z, Some(1.5)),
            Err(Error::OpenProblem(_))
        ));
        let v = ctx.area_reproduce(&f, z, Some(2.0)).unwrap();
        assert!((v - z * z).norm() < 1e-8, "{v}");
    }

    #[test]
    fn half_plane_reconstruction() {
        let w1 = make_linear_weight(1.0, Some(1.0)).unwrap();
        let ctx = OperatorContext::new(&w1, 1e-6).unwrap();
        let f =
            HolomorphicFunction::rational(vec![RationalTerm::new(c(1.0, 0.0), 1.0, 2).unwrap()]);
        let phi = ctx.apply_l(&f).unwrap();
        let v = ctx.reconstruct_boundary(&phi, c(0.0, 1.0)).unwrap();
        assert!((v - c(-0.25, 0.0)).norm() < 1e-4, "{v}");
    }

    #[test]
    fn half_plane_area_reproduction() {
        let w = make_power_weight(Geometry::HalfPlane, 0.0).unwrap();
        let ctx = OperatorContext::new(&w, 1e-7).unwrap();
        let f =
            HolomorphicFunction::rational(vec![RationalTerm::new(c(1.0, 0.0), 1.0, 2).unwrap()]);
        let z = c(0.0, 2.0);
        let expect = f.eval(z).unwrap();
        let v = ctx.area_reproduce(&f, z, None).unwrap();
        assert!((v - expect).norm() < 1e-4, "{v} vs {expect}");
        let r = ctx.real_part_reproduce(&f, z, None, None).unwrap();
        assert!((r - expect).norm() < 1e-4, "{r} vs {expect}");
    }
}
