//! Real special functions, adaptive quadrature, root bracketing and a
//! small Nelder–Mead minimizer.

use std::f64::consts::{LN_2, PI};

use thiserror::Error;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("{what} outside its domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("quadrature did not converge (estimate {estimate}, error bound {error})")]
    NoConvergence { estimate: f64, error: f64 },
    #[error("no admissible value in [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },
}

/// ψ(x) = Γ′(x)/Γ(x) for real x > 0.
pub fn digamma(x: f64) -> Result<f64, NumericsError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(NumericsError::Domain { what: "digamma argument", value: x });
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Bernoulli tail: 1/12, 1/120, 1/252, 1/240, 1/132, 691/32760, 1/12
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
    Ok(acc + x.ln() - 0.5 * inv - tail)
}

fn g_inner(sigma: f64, t: f64) -> f64 {
    let r2 = sigma * sigma + t * t;
    0.5 * r2.ln() - (t.abs() + 2.0).ln() - sigma / r2
}

/// g(σ, T₀): the additive term in the digamma bound on vertical lines.
///
/// A `t0` of `f64::INFINITY` selects the closed-form majorant.
pub fn g_bound(sigma: f64, t0: f64) -> Result<f64, NumericsError> {
    if !(sigma > 0.0) {
        return Err(NumericsError::Domain { what: "sigma", value: sigma });
    }
    if t0.is_nan() || t0 < 0.0 {
        return Err(NumericsError::Domain { what: "T0", value: t0 });
    }
    let tail = 1.0 / (3.0 * sigma * sigma) - LN_2;
    if t0.is_infinite() {
        return Ok(0.5 * (sigma * sigma / 4.0 + 1.0).ln() + tail);
    }
    let f = |t: f64| g_inner(sigma, t);
    let step = 1e-3;
    let n = (t0 / step).ceil() as usize;
    let mut best_t = 0.0;
    let mut best = f(0.0);
    for i in 1..=n {
        let t = (i as f64 * step).min(t0);
        let v = f(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let lo = (best_t - step).max(0.0);
    let hi = (best_t + step).min(t0);
    let (_, refined) = golden_max(f, lo, hi, 1e-12);
    Ok(best.max(refined) + tail)
}

/// Golden-section search for a maximum of a unimodal function on [lo, hi].
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_floor: 1e-14, max_depth: 40 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.rel_tol > 0.0) {
            return Err(NumericsError::Domain { what: "relative tolerance", value: self.rel_tol });
        }
        if self.max_depth < 1 {
            return Err(NumericsError::Domain { what: "max depth", value: 0.0 });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive 7/15-point Gauss–Kronrod quadrature on [a, b].
///
/// An infinite `b` is handled by the substitution x = a + u/(1−u), u ∈ [0, 1).
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature, NumericsError> {
    spec.validate()?;
    if b.is_infinite() {
        let g = |u: f64| {
            if u >= 1.0 {
                return 0.0;
            }
            let w = 1.0 - u;
            let v = f(a + u / w) / (w * w);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        return adaptive(&g, 0.0, 1.0, spec);
    }
    adaptive(&f, a, b, spec)
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature, NumericsError> {
    // Global bisection driven by a max-error work list.
    let (v0, e0) = gauss_kronrod(f, a, b);
    let mut parts = vec![(a, b, v0, e0, 0u32)];
    let mut total = v0;
    let mut err = e0;
    let max_parts = 1usize << 16;
    loop {
        if err <= (spec.rel_tol * total.abs()).max(spec.abs_floor) {
            return Ok(Quadrature { value: total, error: err });
        }
        let (idx, _) =
            parts.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).expect("non-empty work list");
        let (lo, hi, v, e, depth) = parts.swap_remove(idx);
        if depth >= spec.max_depth || parts.len() >= max_parts {
            return Err(NumericsError::NoConvergence { estimate: total, error: err });
        }
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gauss_kronrod(f, lo, mid);
        let (v2, e2) = gauss_kronrod(f, mid, hi);
        total += v1 + v2 - v;
        err += e1 + e2 - e;
        parts.push((lo, mid, v1, e1, depth + 1));
        parts.push((mid, hi, v2, e2, depth + 1));
        if err < 0.0 {
            err = parts.iter().map(|p| p.3).sum();
        }
    }
}

/// Smallest x in [lo, hi] with F(x) > 0, located at the last sign change.
///
/// The returned point satisfies F(x*) > 0 and either x* = lo or
/// F(x* − tol) ≤ 0 up to the bracketing grid.
pub fn bisect_min_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError> {
    if !(f(hi) > 0.0) {
        return Err(NumericsError::NoRoot { lo, hi });
    }
    if f(lo) > 0.0 {
        return Ok(lo);
    }
    // Walk down from hi on a geometric-ish grid to find the last sign change.
    let n = 256;
    let mut upper = hi;
    let mut lower = lo;
    for i in 1..=n {
        let x = hi - (hi - lo) * (i as f64 / n as f64);
        if f(x) > 0.0 {
            upper = x;
        } else {
            lower = x;
            break;
        }
    }
    while upper - lower > tol {
        let mid = 0.5 * (lower + upper);
        if f(mid) > 0.0 {
            upper = mid;
        } else {
            lower = mid;
        }
    }
    Ok(upper)
}

/// Outcome of a Nelder–Mead run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Box-constrained Nelder–Mead; points are clamped into `[lower, upper]`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    step: &[f64],
    lower: &[f64],
    upper: &[f64],
    max_iter: usize,
    ftol: f64,
) -> Minimum {
    let n = start.len();
    let clamp = |x: &mut Vec<f64>| {
        for i in 0..n {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut x0 = start.to_vec();
    clamp(&mut x0);
    simplex.push((x0.clone(), eval(&x0)));
    for i in 0..n {
        let mut xi = x0.clone();
        xi[i] += step[i];
        if xi[i] > upper[i] {
            xi[i] = x0[i] - step[i];
        }
        clamp(&mut xi);
        let v = eval(&xi);
        simplex.push((xi, v));
    }
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if (worst - best).abs() <= ftol * (best.abs() + ftol) && worst.is_finite() {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in simplex.iter().take(n) {
            for i in 0..n {
                centroid[i] += x[i] / n as f64;
            }
        }
        let along = |t: f64| {
            let mut p: Vec<f64> = (0..n).map(|i| centroid[i] + t * (simplex[n].0[i] - centroid[i])).collect();
            clamp(&mut p);
            p
        };
        let xr = along(-1.0);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(-0.5);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(0.5);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for (x, v) in simplex.iter_mut().skip(1) {
                    for i in 0..n {
                        x[i] = x_best[i] + 0.5 * (x[i] - x_best[i]);
                    }
                    *v = eval(x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, iterations }
}

/// Rounding direction attached to an emitted constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    Up,
    Down,
    Exact,
}

impl Rounding {
    pub fn as_str(self) -> &'static str {
        match self {
            Rounding::Up => "up",
            Rounding::Down => "down",
            Rounding::Exact => "exact",
        }
    }
}

/// Rounds `x` to `digits` significant figures in the given direction.
pub fn round_sig(x: f64, digits: i32, dir: Rounding) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exp = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits - 1 - exp);
    let y = x * scale;
    // Tolerate representation noise so exact 4-digit inputs are stable.
    let nearest = y.round();
    let snapped = if (y - nearest).abs() < 1e-9 * y.abs().max(1.0) { nearest } else { y };
    let r = match dir {
        Rounding::Up => snapped.ceil(),
        Rounding::Down => snapped.floor(),
        Rounding::Exact => snapped.round(),
    };
    r / scale
}

/// Rounds `x` to `places` decimals in the given direction.
pub fn round_places(x: f64, places: i32, dir: Rounding) -> f64 {
    let scale = 10f64.powi(places);
    let y = x * scale;
    let nearest = y.round();
    let snapped = if (y - nearest).abs() < 1e-9 { nearest } else { y };
    let r = match dir {
        Rounding::Up => snapped.ceil(),
        Rounding::Down => snapped.floor(),
        Rounding::Exact => snapped.round(),
    };
    r / scale
}

pub(crate) fn ln_pi() -> f64 {
    PI.ln()
}
