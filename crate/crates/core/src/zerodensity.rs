//! Explicit upper bounds for zero counts of ζ_L and the annulus sums built on them.

use std::f64::consts::{E, PI};

use thiserror::Error;

use crate::numerics::{digamma, integrate, ln_pi, NumericsError, QuadratureSpec};
use crate::profiles::DegreeProfile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZeroDensityError {
    #[error("log d_L = {l} is below L0 = {l0}")]
    BelowFloor { l: f64, l0: f64 },
    #[error("degree {nl} outside [{lo}, {hi}]")]
    Degree { nl: u32, lo: u32, hi: f64 },
    #[error("{what} outside its domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A field shape (ℒ = log d_L, n_L) within a degree class.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCountContext {
    profile: DegreeProfile,
    l: f64,
    nl: u32,
}

impl ZeroCountContext {
    pub fn new(profile: DegreeProfile, l: f64, nl: u32) -> Result<Self, ZeroDensityError> {
        if l < profile.l0() {
            return Err(ZeroDensityError::BelowFloor { l, l0: profile.l0() });
        }
        let hi = profile.q0() * l;
        if nl < profile.n0() || f64::from(nl) > hi * (1.0 + 1e-12) {
            return Err(ZeroDensityError::Degree { nl, lo: profile.n0(), hi });
        }
        Ok(Self { profile, l, nl })
    }

    /// The extreme shape ℒ = ℒ₀, n_L = n₀.
    pub fn at_floor(profile: DegreeProfile) -> Self {
        let l = profile.l0();
        let nl = profile.n0();
        Self { profile, l, nl }
    }

    pub fn profile(&self) -> &DegreeProfile {
        &self.profile
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn nl(&self) -> u32 {
        self.nl
    }
}

/// Upper bound for N_L(T), the number of zeros with height in [0, T].
pub fn nl_upper(t: f64, ctx: &ZeroCountContext) -> Result<f64, ZeroDensityError> {
    if !(t >= 1.0) {
        return Err(ZeroDensityError::Domain { what: "T", value: t });
    }
    let n = f64::from(ctx.nl);
    let main = t / PI * (ctx.l + n * (t / (2.0 * PI * E)).ln());
    Ok(main + 0.296 * (ctx.l + n * t.ln()) + 3.971 * n + 3.969)
}

/// ω(α) = ½ + (𝒬₀/2) max{ψ((2+α)/2) − log π + 2/n₀, 0}.
pub fn omega(alpha: f64, p: &DegreeProfile) -> Result<f64, ZeroDensityError> {
    if !(alpha > 0.0) {
        return Err(ZeroDensityError::Domain { what: "alpha", value: alpha });
    }
    let arg = digamma(1.0 + 0.5 * alpha)? - ln_pi() + 2.0 / f64::from(p.n0());
    Ok(0.5 + 0.5 * p.q0() * arg.max(0.0))
}

/// Upper bound for n(r; 1), the zeros within r/ℒ of 1.
pub fn n_small_upper(r: f64, alpha: f64, ctx: &ZeroCountContext) -> Result<f64, ZeroDensityError> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(ZeroDensityError::Domain { what: "r", value: r });
    }
    let w = omega(alpha, &ctx.profile)?;
    let k = ((1.0 + alpha) / alpha).powi(2);
    Ok(k * (1.0 + alpha * r * w * ctx.l))
}

/// Upper bound for the annulus sum over zeros outside radius 1/(rℒ) of weight |1−ρ|⁻²-type.
pub fn annulus_sum_upper(
    r: f64,
    alpha: f64,
    n_inner: u32,
    ctx: &ZeroCountContext,
) -> Result<f64, ZeroDensityError> {
    if !(r > 0.0) || 1.0 / (r * ctx.l) > 1.0 {
        return Err(ZeroDensityError::Domain { what: "r", value: r });
    }
    let w = omega(alpha, &ctx.profile)?;
    let k = ((1.0 + alpha) / alpha).powi(2);
    Ok((k * (r * r + 2.0 * r * alpha * w) - f64::from(n_inner) * r * r) * ctx.l * ctx.l)
}

/// The integral ∫₁^∞ [(r/π) log(r/2πe) + 0.296 log r + 3.971 + 3.969/n₀] r⁻³ dr.
fn c6_integral_closed(n0: u32) -> f64 {
    (1.0 - (2.0 * PI * E).ln()) / PI + 0.296 / 4.0 + 0.5 * (3.971 + 3.969 / f64::from(n0))
}

/// c₆ = 8(1/π + 0.148 + 𝒬₀ max{0, I}).
pub fn c6_const(p: &DegreeProfile) -> f64 {
    8.0 * (1.0 / PI + 0.148 + p.q0() * c6_integral_closed(p.n0()).max(0.0))
}

/// c₆ with the integral evaluated by quadrature.
pub fn c6_const_quadrature(p: &DegreeProfile, spec: &QuadratureSpec) -> Result<f64, ZeroDensityError> {
    let n0 = f64::from(p.n0());
    let f = |r: f64| ((r / PI) * (r / (2.0 * PI * E)).ln() + 0.296 * r.ln() + 3.971 + 3.969 / n0) / r.powi(3);
    let i = integrate(f, 1.0, f64::INFINITY, spec)?.value;
    Ok(8.0 * (1.0 / PI + 0.148 + p.q0() * i.max(0.0)))
}

/// c₁₃ = 1/π + 0.296 + 𝒬₀(3.971 − log(2πe)/π) + 3.969/ℒ₀.
pub fn c13_const(p: &DegreeProfile) -> f64 {
    1.0 / PI + 0.296 + p.q0() * (3.971 - (2.0 * PI * E).ln() / PI) + 3.969 / p.l0()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::EULER_GAMMA;
    use crate::profiles::builtin_profiles;

    fn p(n0: u32) -> DegreeProfile {
        builtin_profiles().into_iter().find(|p| p.n0() == n0).unwrap()
    }

    #[test]
    fn nl_upper_at_unit_height() {
        let prof = DegreeProfile::new(2, "3").unwrap();
        let ctx = ZeroCountContext::new(prof, 3f64.ln(), 2).unwrap();
        let want = (3f64.ln() - 2.0 * (2.0 * PI * E).ln()) / PI + 0.296 * 3f64.ln() + 3.971 * 2.0 + 3.969;
        assert!((nl_upper(1.0, &ctx).unwrap() - want).abs() < 1e-12);
        assert!(nl_upper(0.5, &ctx).is_err());
        let ctx9 = ZeroCountContext::at_floor(p(9));
        assert!(nl_upper(1.0, &ctx9).unwrap() > 0.0);
    }

    #[test]
    fn omega_branches() {
        let p9 = p(9);
        let w = omega(2.56, &p9).unwrap();
        let arg = digamma(2.28).unwrap() - PI.ln() + 2.0 / 9.0;
        assert!((w - (0.5 + 0.5 * p9.q0() * arg.max(0.0))).abs() < 1e-15);
        assert_eq!(omega(0.1, &p9).unwrap(), 0.5);
        let p2 = p(2);
        let w2 = omega(2.0, &p2).unwrap();
        let arg2 = 1.0 - EULER_GAMMA - PI.ln() + 1.0;
        assert!(arg2 > 0.0);
        assert!((w2 - (0.5 + 0.5 * p2.q0() * arg2)).abs() < 1e-12);
        assert!(omega(0.0, &p2).is_err());
    }

    #[test]
    fn n_small_examples() {
        let ctx = ZeroCountContext::at_floor(p(9));
        let lim = n_small_upper(1e-12, 1.0, &ctx).unwrap();
        assert!((lim - 4.0).abs() < 1e-9);
        let at1 = n_small_upper(1.0, 1.0, &ctx).unwrap();
        let w = omega(1.0, ctx.profile()).unwrap();
        assert!((at1 - 4.0 * (1.0 + w * ctx.l())).abs() < 1e-12);
        assert!(n_small_upper(1.5, 1.0, &ctx).is_err());
    }

    #[test]
    fn annulus_examples() {
        let ctx = ZeroCountContext::at_floor(p(9));
        let a = 2.56;
        let w = omega(a, ctx.profile()).unwrap();
        let k = ((1.0 + a) / a).powi(2);
        let s0 = annulus_sum_upper(2.0, a, 0, &ctx).unwrap();
        assert!((s0 - k * (4.0 + 4.0 * a * w) * ctx.l().powi(2)).abs() < 1e-9 * s0);
        let s1 = annulus_sum_upper(2.0, a, 1, &ctx).unwrap();
        assert!((s0 - s1 - 4.0 * ctx.l().powi(2)).abs() < 1e-9 * s0);
        assert!(annulus_sum_upper(1e-3, a, 0, &ctx).is_err());
    }

    #[test]
    fn c6_worked_value_and_quadrature() {
        let p9 = p(9);
        let i = c6_integral_closed(9);
        assert!((i - (1.474518 + 1.9845 / 9.0)).abs() < 5e-5);
        assert!((c6_const(&p9) - 10.9319).abs() < 1e-3);
        for prof in builtin_profiles() {
            let q = c6_const_quadrature(&prof, &QuadratureSpec::default()).unwrap();
            assert!((q - c6_const(&prof)).abs() < 1e-8);
        }
    }

    #[test]
    fn c13_examples() {
        let p21 = p(21);
        let want =
            1.0 / PI + 0.296 + (3.971 - (2.0 * PI * E).ln() / PI) / 10f64.ln() + 3.969 / (21.0 * 10f64.ln());
        assert!((c13_const(&p21) - want).abs() < 1e-12);
        assert!(c13_const(&p(2)) > 1.0 / PI + 0.296);
        assert!((c13_const(&p(9)) - 2.47769).abs() < 1e-4);
    }

    #[test]
    fn context_bounds() {
        let p9 = p(9);
        assert!(ZeroCountContext::new(p9.clone(), p9.l0() - 1.0, 9).is_err());
        assert!(ZeroCountContext::new(p9.clone(), p9.l0(), 8).is_err());
        assert!(ZeroCountContext::new(p9.clone(), p9.l0() + 5.0, 9).is_ok());
    }
}
