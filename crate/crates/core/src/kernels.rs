//! Mellin kernel pairs and the weight φ_θ.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{integrate, NumericsError, QuadratureSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("invalid kernel: {0}")]
    Invalid(&'static str),
    #[error("argument {v} exceeds the bound {b}")]
    OutOfRange { v: f64, b: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// ((x^{θ(s−1)} − x^{s−1})/(s−1))²
    SquaredDifference { x: f64, theta: f64 },
    /// x^{s²+s}
    Gaussian { x: f64 },
    /// (x^s − 1)(a^s − 1)/(s² log a)
    LowerBound { x: f64, a: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<(), KernelError> {
        match *self {
            KernelSpec::SquaredDifference { x, theta } => {
                if !(x > 1.0) {
                    return Err(KernelError::Invalid("x must exceed 1"));
                }
                if !(theta > 1.0) {
                    return Err(KernelError::Invalid("theta must exceed 1"));
                }
            }
            KernelSpec::Gaussian { x } => {
                if !(x > 1.0) {
                    return Err(KernelError::Invalid("x must exceed 1"));
                }
            }
            KernelSpec::LowerBound { x, a } => {
                if !(a > 1.0 && a <= 2.0) {
                    return Err(KernelError::Invalid("a must lie in (1, 2]"));
                }
                if !(x >= a) {
                    return Err(KernelError::Invalid("x must be at least a"));
                }
            }
        }
        Ok(())
    }

    /// Real line where the inverse transform is taken; the Gaussian uses its saddle point.
    fn contour(&self, u: f64) -> f64 {
        match *self {
            KernelSpec::Gaussian { x } => 0.5 * (u.ln() / x.ln() - 1.0),
            // Both kernels are entire; lines near the removable point keep the amplitudes small.
            KernelSpec::SquaredDifference { .. } => 1.0,
            KernelSpec::LowerBound { .. } => 0.25,
        }
    }
}

const SERIES_RADIUS: f64 = 1e-4;

/// (e^{λw} − 1)/w as a power series for small |w|.
fn expm1_over(lambda: f64, w: Complex64) -> Complex64 {
    if w.norm() >= SERIES_RADIUS {
        return ((w * lambda).exp() - 1.0) / w;
    }
    let mut term = Complex64::new(lambda, 0.0);
    let mut sum = term;
    for n in 2..=6 {
        term = term * w * lambda / n as f64;
        sum += term;
    }
    sum
}

/// Evaluates the kernel at a complex point.
pub fn k_eval(spec: &KernelSpec, s: Complex64) -> Complex64 {
    match *spec {
        KernelSpec::SquaredDifference { x, theta } => {
            let lx = x.ln();
            let w = s - 1.0;
            // (e^{θλw} − e^{λw})/w = (e^{θλw}−1)/w − (e^{λw}−1)/w
            let inner = expm1_over(theta * lx, w) - expm1_over(lx, w);
            inner * inner
        }
        KernelSpec::Gaussian { x } => (x.ln() * (s * s + s)).exp(),
        KernelSpec::LowerBound { x, a } => expm1_over(x.ln(), s) * expm1_over(a.ln(), s) / a.ln(),
    }
}

/// Inverse Mellin transform (1/2πi)∫ k(s) u^{−s} ds, closed form.
pub fn k_hat(spec: &KernelSpec, u: f64) -> f64 {
    if !(u > 0.0) {
        return 0.0;
    }
    let lu = u.ln();
    match *spec {
        KernelSpec::SquaredDifference { x, theta } => {
            let lx = x.ln();
            let (lo, mid, hi) = (2.0 * lx, (theta + 1.0) * lx, 2.0 * theta * lx);
            if lu < lo || lu > hi {
                0.0
            } else if lu <= mid {
                (lu - lo) / u
            } else {
                (hi - lu) / u
            }
        }
        KernelSpec::Gaussian { x } => {
            let lx = x.ln();
            (4.0 * PI * lx).powf(-0.5) * (-(lu - lx).powi(2) / (4.0 * lx)).exp()
        }
        KernelSpec::LowerBound { x, a } => {
            let (la, lx) = (a.ln(), x.ln());
            if lu <= 0.0 || lu > la + lx {
                0.0
            } else if lu < la {
                lu / la
            } else if lu <= lx {
                1.0
            } else {
                (la + lx - lu) / la
            }
        }
    }
}

/// Numerical inverse Mellin transform along a vertical line, truncated at |t| ≤ `t_max`.
///
/// Used as an independent cross-check of [`k_hat`].
pub fn k_hat_numeric(spec: &KernelSpec, u: f64, t_max: f64) -> Result<f64, KernelError> {
    spec.validate()?;
    let c = spec.contour(u);
    let lu = u.ln();
    let integrand = |t: f64| {
        let s = Complex64::new(c, t);
        let v = k_eval(spec, s) * (-s * lu).exp();
        v.re
    };
    let q = QuadratureSpec { rel_tol: 1e-11, abs_floor: 1e-13, max_depth: 60 };
    // Split into unit panels: the integrand oscillates with frequency ~ log x.
    let panels = (t_max.ceil() as usize).max(1);
    let width = t_max / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let a = i as f64 * width;
        total += integrate(integrand, a, a + width, &q)?.value;
    }
    // real part is even in t
    Ok(total / PI)
}

/// φ_θ(v) = (θ−1)² − ((e^{−v} − e^{−θv})/v)².
pub fn phi_theta(theta: f64, v: f64) -> f64 {
    let d = theta - 1.0;
    if v == 0.0 {
        return 0.0;
    }
    let ratio = -(-v).exp() * (-d * v).exp_m1() / v;
    d * d - ratio * ratio
}

/// The linear minorant 2(θ−1)² e^{−2b} v, valid for 0 ≤ v ≤ b.
pub fn phi_lower(theta: f64, v: f64, b: f64) -> Result<f64, KernelError> {
    if v > b || v < 0.0 {
        return Err(KernelError::OutOfRange { v, b });
    }
    Ok(2.0 * (theta - 1.0).powi(2) * (-2.0 * b).exp() * v)
}
