//! Globally adaptive Gauss–Kronrod (7/15) quadrature on dyadic panels.
//!
//! Integrands are vector valued: a closure fills an output slice at every node,
//! so a whole family of integrals sharing one expensive factor (a moment
//! vector, a complex value) is computed from a single set of evaluations.
//! Every component must meet `max(abs, rel * |I_c|)` before the integral is
//! accepted. Unbounded intervals are handled by rational maps onto `[0, 1)`,
//! and integrable endpoint singularities of power type by `t = a + (b-a) s^m`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

// Kronrod abscissae; the even-indexed ones (1, 3, 5, 7) are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Number of equal panels every segment starts with.
    pub initial_split: usize,
    /// Measure every component against the Euclidean norm of the whole vector
    /// instead of its own magnitude.
    pub joint: bool,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_panels: 20_000,
            initial_split: 1,
            joint: false,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..Default::default()
        }
    }

    pub fn with_abs(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_split(mut self, n: usize) -> Self {
        self.initial_split = n.max(1);
        self
    }
}

/// Change of variables from the panel parameter `s` to the integration variable `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Map {
    /// `t = s` on `[a, b]`.
    Linear { a: f64, b: f64 },
    /// `t = a + (b - a) s^m`, `s ∈ [0, 1]`; clusters nodes at `a`.
    PowerLeft { a: f64, b: f64, m: u32 },
    /// `t = b - (b - a) (1 - s)^m`, `s ∈ [0, 1]`; clusters nodes at `b`.
    PowerRight { a: f64, b: f64, m: u32 },
    /// `t = a + scale * s / (1 - s)`, `s ∈ [0, 1)`.
    Upper { a: f64, scale: f64 },
    /// `t = b - scale * s / (1 - s)`, `s ∈ [0, 1)`.
    Lower { b: f64, scale: f64 },
    /// `t = a + scale ((1 - s)^-q - 1)`, `s ∈ [0, 1)`; for tails decaying
    /// only algebraically.
    UpperPower { a: f64, scale: f64, q: u32 },
}

impl Map {
    fn s_range(&self) -> (f64, f64) {
        match *self {
            Map::Linear { a, b } => (a, b),
            _ => (0.0, 1.0),
        }
    }

    #[inline]
    /// Node, Jacobian and, for `PowerRight`, the exact gap `b - t` (the
    /// rounded `t` cannot resolve it near `b`).
    fn apply(&self, s: f64) -> (f64, f64, Option<f64>) {
        match *self {
            Map::Linear { .. } => (s, 1.0, None),
            Map::PowerLeft { a, b, m } => {
                let sm1 = s.powi(m as i32 - 1);
                (a + (b - a) * sm1 * s, (b - a) * m as f64 * sm1, None)
            }
            Map::PowerRight { a, b, m } => {
                let r = 1.0 - s;
                let rm1 = r.powi(m as i32 - 1);
                let gap = (b - a) * rm1 * r;
                (b - gap, (b - a) * m as f64 * rm1, Some(gap))
            }
            Map::Upper { a, scale } => {
                let r = 1.0 - s;
                (a + scale * s / r, scale / (r * r), None)
            }
            Map::Lower { b, scale } => {
                let r = 1.0 - s;
                (b - scale * s / r, scale / (r * r), None)
            }
            Map::UpperPower { a, scale, q } => {
                let r = 1.0 - s;
                let rq = r.powi(-(q as i32));
                (a + scale * (rq - 1.0), scale * q as f64 * rq / r, None)
            }
        }
    }

    /// A node whose mapped position left the representable range: an
    /// infinite `t` on the unbounded maps, or a Jacobian that underflowed.
    /// Its exact contribution vanishes, so the node is skipped.
    fn collapsed(&self, t: f64, jac: f64) -> bool {
        match *self {
            Map::Linear { .. } => false,
            Map::PowerLeft { .. } | Map::PowerRight { .. } => jac == 0.0,
            Map::Upper { .. } | Map::Lower { .. } | Map::UpperPower { .. } => {
                !t.is_finite() || !jac.is_finite()
            }
        }
    }

    /// Parameter of an interior point `t`, if the map covers it.
    fn inverse(&self, t: f64) -> Option<f64> {
        let s = match *self {
            Map::Linear { a, b } => {
                if t > a && t < b {
                    t
                } else {
                    return None;
                }
            }
            Map::PowerLeft { a, b, m } => {
                if t <= a || t >= b {
                    return None;
                }
                ((t - a) / (b - a)).powf(1.0 / m as f64)
            }
            Map::PowerRight { a, b, m } => {
                if t <= a || t >= b {
                    return None;
                }
                1.0 - ((b - t) / (b - a)).powf(1.0 / m as f64)
            }
            Map::Upper { a, scale } => {
                if t <= a {
                    return None;
                }
                let u = (t - a) / scale;
                u / (1.0 + u)
            }
            Map::Lower { b, scale } => {
                if t >= b {
                    return None;
                }
                let u = (b - t) / scale;
                u / (1.0 + u)
            }
            Map::UpperPower { a, scale, q } => {
                if t <= a {
                    return None;
                }
                1.0 - (1.0 + (t - a) / scale).powf(-1.0 / q as f64)
            }
        };
        let (lo, hi) = self.s_range();
        (s > lo && s < hi).then_some(s)
    }
}

/// Common integration domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite(f64, f64),
    /// `[a, +inf)` with a characteristic length `scale`.
    Upper {
        a: f64,
        scale: f64,
    },
    /// `(-inf, +inf)` split at `center`.
    RealLine {
        center: f64,
        scale: f64,
    },
}

impl Domain {
    pub fn maps(&self) -> Vec<Map> {
        match *self {
            Domain::Finite(a, b) => vec![Map::Linear { a, b }],
            Domain::Upper { a, scale } => vec![Map::Upper { a, scale }],
            Domain::RealLine { center, scale } => vec![
                Map::Lower { b: center, scale },
                Map::Upper { a: center, scale },
            ],
        }
    }
}

/// Vector result with per-component error estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub evaluations: usize,
}

impl Estimate {
    /// Largest relative error over the components (absolute where a component vanishes).
    pub fn max_rel_error(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.errors)
            .map(|(v, e)| if *v != 0.0 { e / v.abs() } else { *e })
            .fold(0.0, f64::max)
    }
}

struct Panel {
    seg: usize,
    lo: f64,
    hi: f64,
    val: Vec<f64>,
    err: Vec<f64>,
}

#[derive(PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .partial_cmp(&other.0)
            .unwrap_or(Ordering::Equal)
            .then(other.1.cmp(&self.1))
    }
}

struct Workspace {
    fv: Vec<f64>,
    kron: Vec<f64>,
    gauss: Vec<f64>,
    resabs: Vec<f64>,
    samples: Vec<Vec<f64>>,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        Workspace {
            fv: vec![0.0; dim],
            kron: vec![0.0; dim],
            gauss: vec![0.0; dim],
            resabs: vec![0.0; dim],
            samples: vec![vec![0.0; dim]; 15],
        }
    }
}

fn eval_panel<F>(
    map: &Map,
    lo: f64,
    hi: f64,
    dim: usize,
    ws: &mut Workspace,
    f: &mut F,
) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: FnMut(f64, Option<f64>, &mut [f64]) -> Result<()>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    ws.kron.iter_mut().for_each(|v| *v = 0.0);
    ws.gauss.iter_mut().for_each(|v| *v = 0.0);
    ws.resabs.iter_mut().for_each(|v| *v = 0.0);

    for j in 0..15 {
        // j = 0..7 left nodes, 7 center, 8..14 right nodes
        let (k, sign) = if j < 7 {
            (j, -1.0)
        } else if j == 7 {
            (7, 0.0)
        } else {
            (14 - j, 1.0)
        };
        let s = center + sign * half * XGK[k];
        let (t, jac, gap) = map.apply(s);
        ws.fv.iter_mut().for_each(|v| *v = 0.0);
        let skip = map.collapsed(t, jac);
        if !skip {
            f(t, gap, &mut ws.fv)?;
        }
        let wk = WGK[k];
        let wg = if k % 2 == 1 { WG[k / 2] } else { 0.0 };
        let gauss_center = k == 7;
        for c in 0..dim {
            let y = if skip { 0.0 } else { ws.fv[c] * jac };
            if !y.is_finite() {
                return Err(Error::Accuracy {
                    context: format!("non-finite integrand at t = {t:e}"),
                    achieved: f64::INFINITY,
                    target: 0.0,
                });
            }
            ws.samples[j][c] = y;
            ws.kron[c] += wk * y;
            ws.resabs[c] += wk * y.abs();
            if gauss_center {
                ws.gauss[c] += WG[3] * y;
            } else {
                ws.gauss[c] += wg * y;
            }
        }
    }

    let mut val = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    for c in 0..dim {
        let mean = ws.kron[c] * 0.5;
        let mut resasc = 0.0;
        for j in 0..15 {
            let k = if j < 7 {
                j
            } else if j == 7 {
                7
            } else {
                14 - j
            };
            resasc += WGK[k] * (ws.samples[j][c] - mean).abs();
        }
        let resasc = resasc * half;
        let resabs = ws.resabs[c] * half;
        let mut e = ((ws.kron[c] - ws.gauss[c]) * half).abs();
        if resasc != 0.0 && e != 0.0 {
            e = resasc * (200.0 * e / resasc).powf(1.5).min(1.0);
        }
        let floor = 50.0 * f64::EPSILON * resabs;
        if floor > e {
            e = floor;
        }
        val[c] = ws.kron[c] * half;
        err[c] = e;
    }
    Ok((val, err))
}

const ROUNDING_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Integrate a `dim`-vector valued integrand over a union of mapped segments.
///
/// `breaks` are interior points (in `t`) where the integrand is known to be
/// non-smooth; the initial panels are split there.
pub fn integrate_maps<F>(
    maps: &[Map],
    breaks: &[f64],
    dim: usize,
    opts: &QuadOptions,
    mut f: F,
) -> Result<Estimate>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    integrate_maps_with_gap(maps, breaks, dim, opts, |t, _, out| f(t, out))
}

/// As [`integrate_maps`], also passing the exact gap `b - t` on
/// `PowerRight` segments.
pub fn integrate_maps_with_gap<F>(
    maps: &[Map],
    breaks: &[f64],
    dim: usize,
    opts: &QuadOptions,
    mut f: F,
) -> Result<Estimate>
where
    F: FnMut(f64, Option<f64>, &mut [f64]) -> Result<()>,
{
    let mut ws = Workspace::new(dim);
    let mut panels: Vec<Panel> = Vec::new();
    let mut total = vec![0.0; dim];
    let mut total_err = vec![0.0; dim];
    let mut evaluations = 0usize;

    for (seg, map) in maps.iter().enumerate() {
        let (lo, hi) = map.s_range();
        if hi <= lo {
            continue;
        }
        let mut cuts: Vec<f64> = breaks.iter().filter_map(|&t| map.inverse(t)).collect();
        let n = opts.initial_split.max(1);
        for i in 1..n {
            cuts.push(lo + (hi - lo) * i as f64 / n as f64);
        }
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));
        for w in cuts.windows(2) {
            let (val, err) = eval_panel(map, w[0], w[1], dim, &mut ws, &mut f)?;
            evaluations += 15;
            for c in 0..dim {
                total[c] += val[c];
                total_err[c] += err[c];
            }
            panels.push(Panel {
                seg,
                lo: w[0],
                hi: w[1],
                val,
                err,
            });
        }
    }

    let target = |tot: &[f64], c: usize| {
        let scale = if opts.joint {
            tot.iter().map(|v| v * v).sum::<f64>().sqrt()
        } else {
            tot[c].abs()
        };
        // below the per-panel rounding floor of 50ε no refinement helps
        opts.abs_tol.max(opts.rel_tol.max(ROUNDING_FLOOR) * scale)
    };
    let key_of = |p: &Panel, tot: &[f64]| {
        (0..dim)
            .map(|c| p.err[c] / target(tot, c))
            .fold(0.0, f64::max)
    };

    let mut heap: BinaryHeap<Key> = panels
        .iter()
        .enumerate()
        .map(|(i, p)| Key(key_of(p, &total), i))
        .collect();

    loop {
        let converged = (0..dim).all(|c| total_err[c] <= target(&total, c));
        if converged {
            break;
        }
        if panels.len() >= opts.max_panels {
            return Err(accuracy_failure(
                "panel budget exhausted",
                &total,
                &total_err,
                opts,
            ));
        }
        let Some(Key(_, idx)) = heap.pop() else {
            return Err(accuracy_failure(
                "no refinable panel",
                &total,
                &total_err,
                opts,
            ));
        };
        let (seg, lo, hi) = (panels[idx].seg, panels[idx].lo, panels[idx].hi);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) < 4.0 * f64::EPSILON * mid.abs().max(1e-300) {
            // Cannot be refined further; leave it out of the heap.
            if heap.is_empty() {
                return Err(accuracy_failure(
                    "panel width at rounding limit",
                    &total,
                    &total_err,
                    opts,
                ));
            }
            continue;
        }
        let map = maps[seg];
        let (lv, le) = eval_panel(&map, lo, mid, dim, &mut ws, &mut f)?;
        let (rv, re) = eval_panel(&map, mid, hi, dim, &mut ws, &mut f)?;
        evaluations += 30;
        for c in 0..dim {
            total[c] += lv[c] + rv[c] - panels[idx].val[c];
            total_err[c] = (total_err[c] + le[c] + re[c] - panels[idx].err[c]).max(0.0);
        }
        panels[idx] = Panel {
            seg,
            lo,
            hi: mid,
            val: lv,
            err: le,
        };
        heap.push(Key(key_of(&panels[idx], &total), idx));
        panels.push(Panel {
            seg,
            lo: mid,
            hi,
            val: rv,
            err: re,
        });
        let last = panels.len() - 1;
        heap.push(Key(key_of(&panels[last], &total), last));
    }

    // Re-sum to shed the drift of the incremental updates.
    let mut values = vec![0.0; dim];
    let mut errors = vec![0.0; dim];
    for p in &panels {
        for c in 0..dim {
            values[c] += p.val[c];
            errors[c] += p.err[c];
        }
    }
    Ok(Estimate {
        values,
        errors,
        evaluations,
    })
}

fn accuracy_failure(why: &str, total: &[f64], total_err: &[f64], opts: &QuadOptions) -> Error {
    let (worst, achieved) = total
        .iter()
        .zip(total_err)
        .enumerate()
        .map(|(c, (v, e))| (c, if *v != 0.0 { e / v.abs() } else { *e }))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    Error::Accuracy {
        context: format!("adaptive quadrature ({why}; worst component {worst})"),
        achieved,
        target: opts.rel_tol,
    }
}

/// Scalar integral with error estimate.
pub fn integrate_real<F>(
    domain: Domain,
    breaks: &[f64],
    opts: &QuadOptions,
    mut f: F,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let est = integrate_maps(&domain.maps(), breaks, 1, opts, |t, out| {
        out[0] = f(t)?;
        Ok(())
    })?;
    Ok((est.values[0], est.errors[0]))
}

/// Complex integral; the error is the Euclidean combination of the component errors.
pub fn integrate_complex<F>(
    domain: Domain,
    breaks: &[f64],
    opts: &QuadOptions,
    f: F,
) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    integrate_complex_maps(&domain.maps(), breaks, opts, f)
}

pub fn integrate_complex_maps<F>(
    maps: &[Map],
    breaks: &[f64],
    opts: &QuadOptions,
    mut f: F,
) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    // A joint target |I| keeps a vanishing real or imaginary part from
    // demanding absolute accuracy on its own.
    let opts = QuadOptions {
        joint: true,
        ..*opts
    };
    let est = integrate_maps(maps, breaks, 2, &opts, |t, out| {
        let v = f(t)?;
        out[0] = v.re;
        out[1] = v.im;
        Ok(())
    })?;
    Ok((
        Complex64::new(est.values[0], est.values[1]),
        est.errors[0].hypot(est.errors[1]),
    ))
}

/// Exponent `m` for the map `t = e + (b-a) s^m` that makes an endpoint
/// behaviour `|t - e|^beta` smooth (or at least C^6) in `s`.
pub fn smoothing_exponent(beta: f64) -> u32 {
    if beta <= -1.0 {
        return 1;
    }
    for m in 1..=8u32 {
        let e = m as f64 * (beta + 1.0) - 1.0;
        if e >= -1e-12 && (e - e.round()).abs() < 1e-9 {
            return m;
        }
    }
    ((7.0 / (beta + 1.0)).ceil() as u32).clamp(1, 16)
}

/// Trapezoid rule for `(1/2π) ∫_0^{2π} g(θ) dθ` with `m` equally spaced nodes.
pub fn circle_mean<F>(m: usize, mut g: F) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let h = std::f64::consts::TAU / m as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..m {
        acc += g(h * k as f64)?;
    }
    Ok(acc / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = integrate_real(
            Domain::Finite(0.0, 2.0),
            &[],
            &QuadOptions::default(),
            |x| Ok(x.powi(9)),
        )
        .unwrap();
        assert!((v - 2f64.powi(10) / 10.0).abs() < 1e-10);
    }

    #[test]
    fn semi_infinite_gamma_integral() {
        for n in [0, 5, 20] {
            let (v, _) = integrate_real(
                Domain::Upper { a: 0.0, scale: 1.0 },
                &[],
                &QuadOptions::rel(1e-13),
                |t| Ok(t.powi(n) * (-t).exp()),
            )
            .unwrap();
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            assert!((v / fact - 1.0).abs() < 1e-11, "n={n}: {v} vs {fact}");
        }
    }

    #[test]
    fn real_line_lorentzian() {
        let (v, _) = integrate_real(
            Domain::RealLine {
                center: 0.0,
                scale: 1.0,
            },
            &[],
            &QuadOptions::rel(1e-12),
            |x| Ok(1.0 / (1.0 + x * x)),
        )
        .unwrap();
        assert!((v - PI).abs() < 1e-11);
    }

    #[test]
    fn power_map_removes_sqrt_singularity() {
        let m = smoothing_exponent(-0.5);
        assert_eq!(m, 2);
        let est = integrate_maps(
            &[Map::PowerLeft { a: 0.0, b: 1.0, m }],
            &[],
            1,
            &QuadOptions::rel(1e-14),
            |t, out| {
                out[0] = t.powf(-0.5);
                Ok(())
            },
        )
        .unwrap();
        assert!((est.values[0] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn vector_components_converge_independently() {
        let est = integrate_maps(
            &[Map::Linear { a: 0.0, b: 1.0 }],
            &[],
            40,
            &QuadOptions::rel(1e-12),
            |t, out| {
                let mut p = 1.0;
                for o in out.iter_mut() {
                    *o = p;
                    p *= t;
                }
                Ok(())
            },
        )
        .unwrap();
        for (n, v) in est.values.iter().enumerate() {
            assert!((v * (n as f64 + 1.0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn breakpoints_handle_kinks() {
        let (v, _) = integrate_real(
            Domain::Finite(0.0, 3.0),
            &[1.0 / 3.0],
            &QuadOptions::rel(1e-14),
            |x| Ok((x - 1.0 / 3.0).abs()),
        )
        .unwrap();
        let exact = 0.5 * (1.0f64 / 3.0).powi(2) + 0.5 * (3.0f64 - 1.0 / 3.0).powi(2);
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn divergent_integrand_reports_accuracy_error() {
        let r = integrate_real(
            Domain::Finite(0.0, 1.0),
            &[],
            &QuadOptions {
                max_panels: 200,
                ..QuadOptions::rel(1e-12)
            },
            |x| Ok(1.0 / x),
        );
        assert!(matches!(r, Err(Error::Accuracy { .. })));
    }

    #[test]
    fn trapezoid_is_exact_for_trig_polynomials() {
        let v = circle_mean(16, |t| Ok(Complex64::from_polar(1.0, 3.0 * t) + 2.0)).unwrap();
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-14);
    }
}
