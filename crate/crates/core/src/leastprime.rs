//! The least-prime exponent B: structural constants, the five case
//! inequalities, the per-degree parameter optimizer, and the lower-bound
//! density constant m.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::kernels::phi_theta;
use crate::numerics::{
    bisect_min_root, golden_max, integrate, nelder_mead, round_places, round_sig, NumericsError,
    QuadratureSpec, Rounding,
};
use crate::profiles::{delta0, DegreeProfile};
use crate::repulsion::{
    minimize_c3, repulsion_pair, PairKind, RepulsionError, RepulsionParams, SearchBox, R, R0, R1,
};
use crate::zerodensity::{c13_const, c6_const, omega, ZeroDensityError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LeastPrimeError {
    #[error("invalid parameter {what} = {value}")]
    Param { what: &'static str, value: f64 },
    #[error("c1' = {0} is not below 1")]
    C1TooLarge(f64),
    #[error("no admissible B: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Repulsion(#[from] RepulsionError),
    #[error(transparent)]
    ZeroDensity(#[from] ZeroDensityError),
}

/// The free parameters of the case analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseParams {
    pub theta_ne: f64,
    pub alpha_ne: f64,
    pub theta_m: f64,
    pub alpha_m: f64,
    pub theta_s: f64,
    pub alpha_s: f64,
    pub theta_vs: f64,
    pub alpha_vs: f64,
    pub eps1: f64,
    pub sigma1: f64,
    pub eta: f64,
    pub eps2: f64,
    pub sigma2: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
}

impl CaseParams {
    /// The published degree-9 parameter point.
    pub fn worked() -> Self {
        Self {
            theta_ne: 12.83,
            alpha_ne: 2.56,
            theta_m: 1.02,
            alpha_m: 5.85,
            theta_s: 1.02,
            alpha_s: 0.17,
            theta_vs: 1.029,
            alpha_vs: 0.67,
            eps1: 5.57,
            sigma1: 4.45,
            eta: 0.025,
            eps2: 5.97,
            sigma2: 4.5,
            kappa: 23.0,
            lambda: 0.2,
            mu: 0.1,
            nu: 1.15,
        }
    }

    pub fn validate(&self) -> Result<(), LeastPrimeError> {
        let checks: [(&'static str, f64, bool); 17] = [
            ("theta_ne", self.theta_ne, self.theta_ne > 1.0),
            ("alpha_ne", self.alpha_ne, self.alpha_ne > 0.0),
            ("theta_m", self.theta_m, self.theta_m > 1.0),
            ("alpha_m", self.alpha_m, self.alpha_m > 0.0),
            ("theta_s", self.theta_s, self.theta_s > 1.0),
            ("alpha_s", self.alpha_s, self.alpha_s > 0.0),
            ("theta_vs", self.theta_vs, self.theta_vs > 1.0),
            ("alpha_vs", self.alpha_vs, self.alpha_vs > 0.0),
            ("eps1", self.eps1, self.eps1 > 0.0),
            ("sigma1", self.sigma1, self.sigma1 >= 2.0),
            ("eta", self.eta, self.eta > 0.0 && self.eta <= 1.0),
            ("eps2", self.eps2, self.eps2 > 0.0),
            ("sigma2", self.sigma2, self.sigma2 >= 2.0),
            ("kappa", self.kappa, self.kappa >= 1.0),
            ("lambda", self.lambda, self.lambda > 0.0 && self.lambda <= 1.0),
            ("mu", self.mu, self.mu > 0.0 && self.mu <= 1.0),
            ("nu", self.nu, self.nu > 1.0 && self.nu <= 2.0),
        ];
        for (what, value, ok) in checks {
            if !ok {
                return Err(LeastPrimeError::Param { what, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Case {
    NonExceptional,
    Medium,
    Small,
    VerySmall,
    ExtremelySmall,
}

pub const CASES: [Case; 5] =
    [Case::NonExceptional, Case::Medium, Case::Small, Case::VerySmall, Case::ExtremelySmall];

impl Case {
    pub fn label(self) -> &'static str {
        match self {
            Case::NonExceptional => "non-exceptional",
            Case::Medium => "medium",
            Case::Small => "small",
            Case::VerySmall => "very-small",
            Case::ExtremelySmall => "extremely-small",
        }
    }
}

/// Admissible exponent for one case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseBound {
    pub case: Case,
    /// c₄, or c₁₂ for the extremely small case.
    pub exponent: f64,
    /// θ used (unused for the extremely small case).
    pub theta: f64,
    pub b: f64,
    pub slack: f64,
    pub feasible: bool,
}

/// θ-dependent constants of the prime-sum side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructuralConstants {
    pub alpha3: f64,
    pub w0: f64,
    pub w1: f64,
    pub c5: f64,
}

/// α₀ in the bound for the contribution of ramified primes.
pub const ALPHA0: f64 = 1.25506;

/// α₃ = 2/101 + 32.16 α₀ / log 3.
pub fn alpha3() -> f64 {
    2.0 / 101.0 + 32.16 * ALPHA0 / 3f64.ln()
}

fn v_weight(t: f64) -> f64 {
    ((0.25 + t * t).sqrt() + 1.0).ln() + 4.452 + 83.0 / 5.0
}

/// (1/π)∫₀^∞ 9/(9+4t²) dt and (1/π)∫₀^∞ v(t) 9/(9+4t²) dt.
fn base_integrals() -> Result<(f64, f64), NumericsError> {
    static CACHE: OnceLock<Result<(f64, f64), NumericsError>> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            let q = QuadratureSpec { rel_tol: 1e-12, ..QuadratureSpec::default() };
            let kern = |t: f64| 9.0 / (9.0 + 4.0 * t * t);
            let i0 = integrate(kern, 0.0, f64::INFINITY, &q)?.value / PI;
            let i1 = integrate(|t| v_weight(t) * kern(t), 0.0, f64::INFINITY, &q)?.value / PI;
            Ok((i0, i1))
        })
        .clone()
}

/// α₃, W₀, W₁ and c₅ at a given θ.
pub fn structural_constants(theta: f64) -> Result<StructuralConstants, LeastPrimeError> {
    if !(theta > 1.0) {
        return Err(LeastPrimeError::Param { what: "theta", value: theta });
    }
    let (i0, i1) = base_integrals()?;
    let q = 101f64.powf(-1.5 * (theta - 1.0));
    let pre = ((1.0 + q) / (1.0 - q)).powi(2);
    let (w0, w1) = (pre * i0, pre * i1);
    let l3 = 3f64.ln();
    let c5 = 2.0 / l3 + 4.0 / 909.0 * (w0 + 2.0 / l3 * w1);
    Ok(StructuralConstants { alpha3: alpha3(), w0, w1, c5 })
}

fn c5_of(theta: f64) -> f64 {
    structural_constants(theta).map(|s| s.c5).unwrap_or(f64::INFINITY)
}

/// 29.57(1 + Δ₀(1)).
pub fn zfr_scale(p: &DegreeProfile) -> f64 {
    R * (1.0 + delta0(1.0, p))
}

/// c₈ = 1/(1/c₂′ + 29.57(1+Δ₀(1)) log(1/c₁′)) at (ε₁, σ₁, η).
pub fn c8_of(eps1: f64, sigma1: f64, eta: f64, p: &DegreeProfile) -> Result<f64, LeastPrimeError> {
    let params = RepulsionParams::new(eps1, sigma1, eta)?;
    let (c1p, c2p) = repulsion_pair(PairKind::Strip, &params, p)?;
    if c1p >= 1.0 {
        return Err(LeastPrimeError::C1TooLarge(c1p));
    }
    Ok(1.0 / (1.0 / c2p + zfr_scale(p) * (1.0 / c1p).ln()))
}

/// c₄ = 1/(2c₈) + 0.001.
pub fn c4_exceptional(c8: f64) -> f64 {
    0.5 / c8 + 0.001
}

/// Constants shared by the exceptional cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceptionalConstants {
    pub c1p: f64,
    pub c2p: f64,
    pub c8: f64,
    pub c9: f64,
    pub c10: f64,
    /// Chosen so that c₉ = c₁₀.
    pub a: f64,
    pub c4: f64,
    pub big_c1: f64,
    pub big_c2: f64,
}

pub fn exceptional_constants(
    params: &CaseParams,
    p: &DegreeProfile,
) -> Result<ExceptionalConstants, LeastPrimeError> {
    let prime = RepulsionParams::new(params.eps1, params.sigma1, params.eta)?;
    let (c1p, c2p) = repulsion_pair(PairKind::Strip, &prime, p)?;
    if c1p >= 1.0 {
        return Err(LeastPrimeError::C1TooLarge(c1p));
    }
    let scale = zfr_scale(p);
    let c8 = 1.0 / (1.0 / c2p + scale * (1.0 / c1p).ln());
    let a = 1.0 + 1.0 / (scale * c2p * (1.0 / c1p).ln());
    let c9 = c2p * (1.0 - 1.0 / a);
    let c10 = 1.0 / (a * scale * (1.0 / c1p).ln());
    let second = RepulsionParams::new(params.eps2, params.sigma2, 0.5)?;
    let (big_c1, big_c2) = repulsion_pair(PairKind::Strip, &second, p)?;
    Ok(ExceptionalConstants { c1p, c2p, c8, c9, c10, a, c4: c4_exceptional(c8), big_c1, big_c2 })
}

/// Every named constant at one parameter point, for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub alpha3: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
    pub c9: f64,
    pub c10: f64,
    pub c11: f64,
    pub c13: f64,
    pub big_c1: f64,
    pub big_c2: f64,
    pub w0: f64,
    pub w1: f64,
    pub a: f64,
}

/// Constants at (θ, α); c₇ is evaluated at t = c₄.
pub fn derived_constants(
    params: &CaseParams,
    theta: f64,
    alpha: f64,
    p: &DegreeProfile,
) -> Result<DerivedConstants, LeastPrimeError> {
    let ctx = CaseContext::new(p);
    let ex = exceptional_constants(params, p)?;
    let s = structural_constants(theta)?;
    Ok(DerivedConstants {
        alpha3: s.alpha3,
        c5: s.c5,
        c6: ctx.c6,
        c7: ctx.c7(theta, alpha, ex.c4),
        c8: ex.c8,
        c9: ex.c9,
        c10: ex.c10,
        c11: ctx.c11(theta, alpha, ex.c4, ex.c8),
        c13: ctx.c13,
        big_c1: ex.big_c1,
        big_c2: ex.big_c2,
        w0: s.w0,
        w1: s.w1,
        a: ex.a,
    })
}

/// (c₂′/ℒ₀)(max{log(c₁′/(κC₁)²), 0} + log ℒ₀) ≤ η.
pub fn eta_condition(params: &CaseParams, p: &DegreeProfile) -> Result<bool, LeastPrimeError> {
    let ex = exceptional_constants(params, p)?;
    Ok(eta_lhs(params, &ex, p) <= params.eta)
}

fn eta_lhs(params: &CaseParams, ex: &ExceptionalConstants, p: &DegreeProfile) -> f64 {
    let l0 = p.l0();
    let kc = (params.kappa * ex.big_c1).powi(2);
    ex.c2p / l0 * ((ex.c1p / kc).ln().max(0.0) + l0.ln())
}

/// (κC₁)²/ℒ < μ/(c₄ℒ^{ν−1}) < λ/c₄ < 1/R₀, checked at ℒ = ℒ₀.
pub fn range_chain_check(params: &CaseParams, c4: f64, p: &DegreeProfile) -> Result<bool, LeastPrimeError> {
    let ex = exceptional_constants(params, p)?;
    Ok(range_chain(params, ex.big_c1, c4, p).iter().all(|&ok| ok))
}

/// The values (κC₁)²/ℒ₀, μ/(c₄ℒ₀^{ν−1}), λ/c₄ of the chain.
pub fn range_chain_values(params: &CaseParams, big_c1: f64, c4: f64, p: &DegreeProfile) -> [f64; 3] {
    let l0 = p.l0();
    [(params.kappa * big_c1).powi(2) / l0, params.mu / (c4 * l0.powf(params.nu - 1.0)), params.lambda / c4]
}

fn range_chain(params: &CaseParams, big_c1: f64, c4: f64, p: &DegreeProfile) -> [bool; 3] {
    let v = range_chain_values(params, big_c1, c4, p);
    [v[0] < v[1], v[1] < v[2], v[2] < 1.0 / R0]
}

/// Σ cᵢ e^{xᵢ}.
fn sum_exp(terms: &[(f64, f64)]) -> f64 {
    terms.iter().map(|&(c, x)| c * x.exp()).sum()
}

/// log Σ cᵢ e^{xᵢ} for positive cᵢ.
fn ln_sum_exp(terms: &[(f64, f64)]) -> f64 {
    let logs: Vec<f64> = terms.iter().filter(|t| t.0 > 0.0).map(|&(c, x)| c.ln() + x).collect();
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
}

/// Profile-level quantities reused by every case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseContext {
    pub profile: DegreeProfile,
    pub l0: f64,
    pub q0: f64,
    pub c6: f64,
    pub c13: f64,
    pub alpha3: f64,
    pub zfr_scale: f64,
}

impl CaseContext {
    pub fn new(p: &DegreeProfile) -> Self {
        Self {
            profile: p.clone(),
            l0: p.l0(),
            q0: p.q0(),
            c6: c6_const(p),
            c13: c13_const(p),
            alpha3: alpha3(),
            zfr_scale: zfr_scale(p),
        }
    }

    /// Same constants with ℒ₀ replaced; used to probe monotonicity in ℒ₀.
    pub fn with_l0(p: &DegreeProfile, l0: f64) -> Self {
        Self { l0, ..Self::new(p) }
    }

    fn omega(&self, alpha: f64) -> f64 {
        omega(alpha, &self.profile).unwrap_or(f64::INFINITY)
    }

    /// c₇(t).
    pub fn c7(&self, theta: f64, alpha: f64, t: f64) -> f64 {
        let k = ((1.0 + alpha) / alpha).powi(2);
        4.0 * (1.0 + alpha * self.omega(alpha))
            * k
            * (1.0 + ((1.0 - theta) * t / self.zfr_scale).exp()).powi(2)
    }

    /// The α-dependent factor of c₁₁.
    pub fn annulus_factor(&self, alpha: f64) -> f64 {
        let k = ((1.0 + alpha) / alpha).powi(2);
        R1 * (k * (R1 + 2.0 * alpha * self.omega(alpha)) - R1)
    }

    /// c₁₁.
    pub fn c11(&self, theta: f64, alpha: f64, c4: f64, c8: f64) -> f64 {
        (1.0 + (-(theta - 1.0) * c4 * c8 * R0.ln()).exp()).powi(2) * self.annulus_factor(alpha)
    }

    fn e0_terms(&self, theta: f64, t: f64) -> [(f64, f64); 4] {
        let l0 = self.l0;
        [
            (self.c6 / l0, 0.0),
            (R0 * R0 / (l0 * l0), -2.0 * t / R0 * l0),
            (self.q0 * self.alpha3 * (theta - 1.0) * t * l0, -t * l0),
            (c5_of(theta) / l0, -2.0 * t * l0),
        ]
    }

    fn e1_terms(&self, theta: f64, t: f64) -> [(f64, f64); 4] {
        let l0 = self.l0;
        [
            (self.c6 / l0, 0.0),
            (self.q0 * self.alpha3 * (theta - 1.0) * l0 * t, -t * l0),
            (4.0 / (l0 - 0.5).powi(2), -t * (2.0 * l0 - 1.0)),
            (c5_of(theta) / l0, -2.0 * t * l0),
        ]
    }

    /// Shared bracket of E₂ and E₃, scaled by `k`.
    fn bracket_terms(&self, theta: f64, t: f64, k: f64) -> [(f64, f64); 3] {
        let l0 = self.l0;
        [
            (k * self.q0 * self.alpha3 * (theta - 1.0) * l0 * l0 * t, -t * l0),
            (k * 4.0 / (l0 * (1.0 - 0.5 / l0).powi(2)), -t * (2.0 * l0 - 1.0)),
            (k * c5_of(theta), -2.0 * t * l0),
        ]
    }

    fn e2_terms(&self, theta: f64, t: f64, mu: f64, nu: f64) -> [(f64, f64); 3] {
        self.bracket_terms(theta, t, t * self.l0.powf(nu - 2.0) / mu)
    }

    fn e3_terms(&self, theta: f64, t: f64, kappa_c1: f64) -> [(f64, f64); 3] {
        self.bracket_terms(theta, t, 1.0 / (kappa_c1 * kappa_c1))
    }

    fn e4_terms(&self, t: f64, c3: f64) -> [(f64, f64); 3] {
        let l0 = self.l0;
        [
            (0.5 * self.c13, -(1.25 * t - c3) * l0),
            (19.17 + 5.4568 * self.q0 * l0.powf(1.5) * t.sqrt(), -(t - c3) * l0),
            (1.8292, -(2.0 * t - c3) * l0),
        ]
    }

    pub fn e0(&self, theta: f64, t: f64) -> f64 {
        sum_exp(&self.e0_terms(theta, t))
    }

    pub fn e1(&self, theta: f64, t: f64) -> f64 {
        sum_exp(&self.e1_terms(theta, t))
    }

    pub fn e2(&self, theta: f64, t: f64, mu: f64, nu: f64) -> f64 {
        sum_exp(&self.e2_terms(theta, t, mu, nu))
    }

    pub fn e3(&self, theta: f64, t: f64, kappa_c1: f64) -> f64 {
        sum_exp(&self.e3_terms(theta, t, kappa_c1))
    }

    pub fn e4(&self, t: f64, c3: f64) -> f64 {
        sum_exp(&self.e4_terms(t, c3))
    }

    /// Logarithms of E₀…E₄, finite where the values themselves underflow.
    pub fn ln_error_terms(
        &self,
        thetas: [f64; 4],
        t: [f64; 5],
        mu: f64,
        nu: f64,
        kappa_c1: f64,
        c3: f64,
    ) -> [f64; 5] {
        [
            ln_sum_exp(&self.e0_terms(thetas[0], t[0])),
            ln_sum_exp(&self.e1_terms(thetas[1], t[1])),
            ln_sum_exp(&self.e2_terms(thetas[2], t[2], mu, nu)),
            ln_sum_exp(&self.e3_terms(thetas[3], t[3], kappa_c1)),
            ln_sum_exp(&self.e4_terms(t[4], c3)),
        ]
    }

    pub fn slack_nonexceptional(&self, theta: f64, alpha: f64, t: f64) -> f64 {
        (theta - 1.0).powi(2) * t * t
            - self.c7(theta, alpha, t) * (-2.0 * t / self.zfr_scale).exp()
            - self.e0(theta, t)
    }

    pub fn slack_medium(
        &self,
        params: &CaseParams,
        theta: f64,
        alpha: f64,
        ex: &ExceptionalConstants,
    ) -> f64 {
        let c4 = ex.c4;
        phi_theta(theta, params.lambda) * c4 * c4
            - self.c11(theta, alpha, c4, ex.c8) * R0.powf(-2.0 * c4 * ex.c8)
            - self.e1(theta, c4)
    }

    pub fn slack_small(&self, params: &CaseParams, theta: f64, alpha: f64, ex: &ExceptionalConstants) -> f64 {
        let c4 = ex.c4;
        let l0 = self.l0;
        2.0 * (theta - 1.0).powi(2) * (-2.0 * params.lambda).exp() * c4.powi(3)
            - self.c11(theta, alpha, c4, ex.c8) * (params.lambda / c4).powf(2.0 * c4 * ex.c8 - 1.0)
            - self.c6 * c4 * l0.powf(params.nu - 2.0) / params.mu
            - self.e2(theta, c4, params.mu, params.nu)
    }

    pub fn slack_very_small(
        &self,
        params: &CaseParams,
        theta: f64,
        alpha: f64,
        ex: &ExceptionalConstants,
    ) -> f64 {
        let c4 = ex.c4;
        let lnu = self.l0.powf(params.nu - 1.0);
        let kc = params.kappa * ex.big_c1;
        2.0 * (theta - 1.0).powi(2) * (-2.0 * params.mu / lnu).exp() * c4.powi(3)
            - self.c11(theta, alpha, c4, ex.c8) * (params.mu / (c4 * lnu)).powf(2.0 * c4 * ex.c8 - 1.0)
            - self.c6 / (kc * kc)
            - self.e3(theta, c4, kc)
    }

    /// φ₀(t) = e^{−3(κC₁)²t/ℒ₀}(3 − 2(κC₁)²/ℒ₀²).
    pub fn phi0(&self, t: f64, kappa_c1: f64) -> f64 {
        let k2 = kappa_c1 * kappa_c1;
        (-3.0 * k2 * t / self.l0).exp() * (3.0 - 2.0 * k2 / (self.l0 * self.l0))
    }

    pub fn slack_extremely_small(
        &self,
        params: &CaseParams,
        t: f64,
        ex: &ExceptionalConstants,
        c3: f64,
    ) -> f64 {
        let kc = params.kappa * ex.big_c1;
        let base = params.kappa * params.kappa * ex.big_c1 / self.l0;
        self.phi0(t, kc) * t
            - 0.5 * self.c13 * params.kappa * params.kappa * base.powf(2.0 * t * ex.big_c2 - 2.0)
            - self.e4(t, c3)
    }
}

const C4_RANGE: (f64, f64) = (1e-3, 1e3);
/// Absolute bisection tolerance on exponents.
pub const EXPONENT_TOL: f64 = 1e-4;

fn case_nonexceptional_tol(ctx: &CaseContext, theta: f64, alpha: f64, tol: f64) -> CaseBound {
    let f = |t: f64| ctx.slack_nonexceptional(theta, alpha, t);
    match bisect_min_root(f, C4_RANGE.0, C4_RANGE.1, tol) {
        Ok(c4) => CaseBound {
            case: Case::NonExceptional,
            exponent: c4,
            theta,
            b: 2.0 * theta * c4,
            slack: f(c4),
            feasible: true,
        },
        Err(_) => CaseBound {
            case: Case::NonExceptional,
            exponent: f64::NAN,
            theta,
            b: f64::INFINITY,
            slack: f(C4_RANGE.1),
            feasible: false,
        },
    }
}

/// Minimal c₄ for the case without an exceptional zero.
pub fn case_nonexceptional(p: &DegreeProfile, theta: f64, alpha: f64) -> CaseBound {
    case_nonexceptional_tol(&CaseContext::new(p), theta, alpha, EXPONENT_TOL)
}

fn fixed_theta_bound(case: Case, theta: f64, c4: f64, slack: f64) -> CaseBound {
    CaseBound { case, exponent: c4, theta, b: 2.0 * theta * c4, slack, feasible: slack > 0.0 }
}

pub fn case_medium(p: &DegreeProfile, params: &CaseParams) -> Result<CaseBound, LeastPrimeError> {
    let ctx = CaseContext::new(p);
    let ex = exceptional_constants(params, p)?;
    let s = ctx.slack_medium(params, params.theta_m, params.alpha_m, &ex);
    Ok(fixed_theta_bound(Case::Medium, params.theta_m, ex.c4, s))
}

pub fn case_small(p: &DegreeProfile, params: &CaseParams) -> Result<CaseBound, LeastPrimeError> {
    let ctx = CaseContext::new(p);
    let ex = exceptional_constants(params, p)?;
    let s = ctx.slack_small(params, params.theta_s, params.alpha_s, &ex);
    Ok(fixed_theta_bound(Case::Small, params.theta_s, ex.c4, s))
}

pub fn case_very_small(p: &DegreeProfile, params: &CaseParams) -> Result<CaseBound, LeastPrimeError> {
    let ctx = CaseContext::new(p);
    let ex = exceptional_constants(params, p)?;
    let s = ctx.slack_very_small(params, params.theta_vs, params.alpha_vs, &ex);
    Ok(fixed_theta_bound(Case::VerySmall, params.theta_vs, ex.c4, s))
}

/// Lower end of the c₁₂ search: c₁₂ > max(1/C₂, c₃) and d₀^{c₁₂} ≥ 10¹⁰.
pub fn c12_floor(ex: &ExceptionalConstants, c3: f64, p: &DegreeProfile) -> f64 {
    (1.0 / ex.big_c2).max(c3).max(10.0 * 10f64.ln() / p.l0())
}

fn extremely_small_with(
    ctx: &CaseContext,
    params: &CaseParams,
    ex: &ExceptionalConstants,
    c3: f64,
    tol: f64,
) -> CaseBound {
    let f = |t: f64| ctx.slack_extremely_small(params, t, ex, c3);
    let lo = c12_floor(ex, c3, &ctx.profile);
    let lo = lo + tol.min(1e-9 * lo.max(1.0));
    let hi = (lo * 64.0).max(1e3);
    match bisect_min_root(f, lo, hi, tol) {
        Ok(c12) => CaseBound {
            case: Case::ExtremelySmall,
            exponent: c12,
            theta: f64::NAN,
            b: 5.0 * c12,
            slack: f(c12),
            feasible: true,
        },
        Err(_) => CaseBound {
            case: Case::ExtremelySmall,
            exponent: f64::NAN,
            theta: f64::NAN,
            b: f64::INFINITY,
            slack: f(hi),
            feasible: false,
        },
    }
}

/// Minimal c₁₂ for an exceptional zero within (κC₁)²ℒ⁻² of 1.
pub fn case_extremely_small(
    p: &DegreeProfile,
    params: &CaseParams,
    c3: f64,
) -> Result<CaseBound, LeastPrimeError> {
    let ctx = CaseContext::new(p);
    let ex = exceptional_constants(params, p)?;
    Ok(extremely_small_with(&ctx, params, &ex, c3, EXPONENT_TOL))
}

/// All five cases at a fixed parameter point plus the precondition checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub params: CaseParams,
    pub constants: ExceptionalConstants,
    pub c3: f64,
    pub eta_condition: bool,
    pub range_chain: [bool; 3],
    pub cases: [CaseBound; 5],
}

impl Evaluation {
    pub fn preconditions(&self) -> bool {
        self.eta_condition && self.range_chain.iter().all(|&b| b)
    }

    pub fn feasible(&self) -> bool {
        self.preconditions() && self.cases.iter().all(|c| c.feasible)
    }

    /// Max of the five case bounds when everything is admissible.
    pub fn overall(&self) -> Option<f64> {
        self.feasible().then(|| self.cases.iter().map(|c| c.b).fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn case(&self, case: Case) -> &CaseBound {
        self.cases.iter().find(|c| c.case == case).expect("all cases present")
    }
}

/// Evaluates every case with the θ values given in `params`.
pub fn evaluate(p: &DegreeProfile, params: &CaseParams, c3: f64) -> Result<Evaluation, LeastPrimeError> {
    params.validate()?;
    let ctx = CaseContext::new(p);
    let ex = exceptional_constants(params, p)?;
    let cases = [
        case_nonexceptional_tol(&ctx, params.theta_ne, params.alpha_ne, EXPONENT_TOL),
        fixed_theta_bound(
            Case::Medium,
            params.theta_m,
            ex.c4,
            ctx.slack_medium(params, params.theta_m, params.alpha_m, &ex),
        ),
        fixed_theta_bound(
            Case::Small,
            params.theta_s,
            ex.c4,
            ctx.slack_small(params, params.theta_s, params.alpha_s, &ex),
        ),
        fixed_theta_bound(
            Case::VerySmall,
            params.theta_vs,
            ex.c4,
            ctx.slack_very_small(params, params.theta_vs, params.alpha_vs, &ex),
        ),
        extremely_small_with(&ctx, params, &ex, c3, EXPONENT_TOL),
    ];
    Ok(Evaluation {
        params: *params,
        constants: ex,
        c3,
        eta_condition: eta_lhs(params, &ex, p) <= params.eta,
        range_chain: range_chain(params, ex.big_c1, ex.c4, p),
        cases,
    })
}

/// Max of the five case bounds; errors if any case or precondition fails.
pub fn overall_b(p: &DegreeProfile, params: &CaseParams, c3: f64) -> Result<f64, LeastPrimeError> {
    let ev = evaluate(p, params, c3)?;
    ev.overall().ok_or_else(|| {
        let failed: Vec<&str> = ev.cases.iter().filter(|c| !c.feasible).map(|c| c.case.label()).collect();
        LeastPrimeError::Infeasible(format!(
            "eta condition {}, range chain {:?}, infeasible cases {:?}",
            ev.eta_condition, ev.range_chain, failed
        ))
    })
}

/// c₃ used by the extremely small case: optimized at η = 1, rounded up.
pub fn default_c3(p: &DegreeProfile) -> f64 {
    let (c3, _, _) = minimize_c3(p, 1.0, &SearchBox::default());
    round_sig(c3, 4, Rounding::Up)
}

/// α minimizing the annulus factor of c₁₁ (the only α-dependence of the exceptional slacks).
pub fn best_alpha(ctx: &CaseContext) -> f64 {
    let f = |la: f64| -ctx.annulus_factor(la.exp());
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..=200 {
        let la = -4.0 + 8.0 * i as f64 / 200.0;
        let v = f(la);
        if v > best.0 {
            best = (v, la);
        }
    }
    let (la, v) = golden_max(f, best.1 - 0.04, best.1 + 0.04, 1e-10);
    if v >= best.0 {
        la.exp()
    } else {
        best.1.exp()
    }
}

const THETA_MAX: f64 = 50.0;
const THETA_TOL: f64 = 1e-8;

fn min_theta<F: Fn(f64) -> f64>(slack: F) -> Option<f64> {
    bisect_min_root(slack, 1.0 + 1e-9, THETA_MAX, THETA_TOL).ok()
}

/// Result of the per-degree optimization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimized {
    pub n0: u32,
    pub d0: String,
    pub params: CaseParams,
    pub evaluation: Evaluation,
    /// Full-precision overall bound.
    pub b_exact: f64,
    /// Overall bound rounded up to 4 significant digits.
    pub b: f64,
}

/// Exceptional-case parameters searched by the optimizer.
const SHARED: usize = 9;

fn shared_of(p: &CaseParams) -> [f64; SHARED] {
    [p.eps1.ln(), p.sigma1, p.eta.ln(), p.eps2.ln(), p.sigma2, p.kappa.ln(), p.lambda, p.mu.ln(), p.nu]
}

fn apply_shared(base: &CaseParams, x: &[f64]) -> CaseParams {
    CaseParams {
        eps1: x[0].exp(),
        sigma1: x[1],
        eta: x[2].exp(),
        eps2: x[3].exp(),
        sigma2: x[4],
        kappa: x[5].exp(),
        lambda: x[6],
        mu: x[7].exp(),
        nu: x[8],
        ..*base
    }
}

const SHARED_LO: [f64; SHARED] = [-4.6, 2.0, -9.2, -4.6, 2.0, 0.0, 1e-3, -9.2, 1.0 + 1e-6];
const SHARED_HI: [f64; SHARED] = [3.9, 30.0, 0.0, 3.9, 30.0, 9.2, 1.0, 0.0, 2.0];
const SHARED_STEP: [f64; SHARED] = [0.3, 0.5, 0.5, 0.3, 0.5, 0.3, 0.1, 0.3, 0.1];

struct Exceptional {
    params: CaseParams,
    b: f64,
}

/// Exceptional-case bound at a shared-parameter point, with θ minimized per case.
fn exceptional_at(
    ctx: &CaseContext,
    base: &CaseParams,
    alpha: f64,
    c3: f64,
    x: &[f64],
) -> Result<Exceptional, f64> {
    let params = apply_shared(base, x);
    if params.validate().is_err() {
        return Err(1e12);
    }
    let p = &ctx.profile;
    let ex = exceptional_constants(&params, p).map_err(|_| 1e12)?;
    // Penalize violated preconditions by how far they miss.
    let mut miss = 0.0;
    let eta_gap = eta_lhs(&params, &ex, p) - params.eta;
    if eta_gap > 0.0 {
        miss += eta_gap / params.eta;
    }
    let chain = range_chain_values(&params, ex.big_c1, ex.c4, p);
    let links = [chain[0] / chain[1], chain[1] / chain[2], chain[2] * R0];
    for r in links {
        if r >= 1.0 {
            miss += r - 1.0 + 1e-6;
        }
    }
    if miss > 0.0 {
        return Err(1e6 * (1.0 + miss));
    }
    let theta_m = min_theta(|t| ctx.slack_medium(&params, t, alpha, &ex)).ok_or(1e9)?;
    let theta_s = min_theta(|t| ctx.slack_small(&params, t, alpha, &ex)).ok_or(1e9)?;
    let theta_vs = min_theta(|t| ctx.slack_very_small(&params, t, alpha, &ex)).ok_or(1e9)?;
    let xs = extremely_small_with(ctx, &params, &ex, c3, 1e-7);
    if !xs.feasible {
        return Err(1e9);
    }
    let theta = theta_m.max(theta_s).max(theta_vs);
    let b = (2.0 * theta * ex.c4).max(xs.b);
    let params =
        CaseParams { theta_m, alpha_m: alpha, theta_s, alpha_s: alpha, theta_vs, alpha_vs: alpha, ..params };
    Ok(Exceptional { params, b })
}

fn optimize_nonexceptional(ctx: &CaseContext, start: (f64, f64)) -> (f64, f64) {
    let f = |x: &[f64]| {
        let cb = case_nonexceptional_tol(ctx, x[0], x[1].exp(), 1e-9);
        if cb.feasible {
            cb.b
        } else {
            1e9
        }
    };
    let mut best =
        nelder_mead(f, &[start.0, start.1.ln()], &[1.0, 0.3], &[1.0 + 1e-6, -4.6], &[200.0, 4.6], 600, 1e-14);
    for _ in 0..3 {
        let again = nelder_mead(f, &best.x, &[0.5, 0.1], &[1.0 + 1e-6, -4.6], &[200.0, 4.6], 600, 1e-15);
        if again.value < best.value {
            best = again;
        } else {
            break;
        }
    }
    (best.x[0], best.x[1].exp())
}

/// Minimizes the overall B for one profile starting from the degree-9 point.
pub fn optimize_b(p: &DegreeProfile, c3: f64) -> Result<Optimized, LeastPrimeError> {
    optimize_b_from(p, c3, &CaseParams::worked())
}

pub fn optimize_b_from(p: &DegreeProfile, c3: f64, start: &CaseParams) -> Result<Optimized, LeastPrimeError> {
    start.validate()?;
    let ctx = CaseContext::new(p);
    let (theta_ne, alpha_ne) = optimize_nonexceptional(&ctx, (start.theta_ne, start.alpha_ne));
    let alpha = best_alpha(&ctx);
    let base = CaseParams { theta_ne, alpha_ne, ..*start };
    let objective = |x: &[f64]| match exceptional_at(&ctx, &base, alpha, c3, x) {
        Ok(e) => e.b,
        Err(pen) => pen,
    };
    let mut x = shared_of(start).to_vec();
    for i in 0..SHARED {
        x[i] = x[i].clamp(SHARED_LO[i], SHARED_HI[i]);
    }
    let mut value = objective(&x);
    for round in 0..6 {
        let scale = 0.5f64.powi(round);
        let step: Vec<f64> = SHARED_STEP.iter().map(|s| s * scale).collect();
        let m = nelder_mead(objective, &x, &step, &SHARED_LO, &SHARED_HI, 1500, 1e-13);
        if m.value < value {
            x = m.x;
            value = m.value;
        }
        // coordinate sweep
        for i in 0..SHARED {
            let span = SHARED_STEP[i] * scale * 2.0;
            let lo = (x[i] - span).max(SHARED_LO[i]);
            let hi = (x[i] + span).min(SHARED_HI[i]);
            let g = |v: f64| {
                let mut y = x.clone();
                y[i] = v;
                -objective(&y)
            };
            let (v, fv) = golden_max(g, lo, hi, 1e-9);
            if -fv < value {
                x[i] = v;
                value = -fv;
            }
        }
    }
    let exc = exceptional_at(&ctx, &base, alpha, c3, &x).map_err(|_| {
        LeastPrimeError::Infeasible(format!("no feasible exceptional parameters for n0 = {}", p.n0()))
    })?;
    // Nudge θ up by the bisection tolerance so the fixed-θ evaluation is strictly feasible.
    let params = CaseParams {
        theta_m: exc.params.theta_m + THETA_TOL,
        theta_s: exc.params.theta_s + THETA_TOL,
        theta_vs: exc.params.theta_vs + THETA_TOL,
        ..exc.params
    };
    let evaluation = evaluate(p, &params, c3)?;
    let b_exact = evaluation.overall().ok_or_else(|| {
        LeastPrimeError::Infeasible(format!("optimized point failed re-evaluation for n0 = {}", p.n0()))
    })?;
    Ok(Optimized {
        n0: p.n0(),
        d0: p.d0_text().to_string(),
        params,
        evaluation,
        b_exact,
        b: round_sig(b_exact, 4, Rounding::Up),
    })
}

/// The published degree-9 parameters with ε₂ chosen per degree and each θ minimal.
pub fn published_recipe(p: &DegreeProfile, c3: f64) -> Result<Optimized, LeastPrimeError> {
    let start = CaseParams::worked();
    let ctx = CaseContext::new(p);
    let eval_eps2 = |le2: f64| -> Option<(CaseParams, f64)> {
        let params = CaseParams { eps2: le2.exp(), ..start };
        let ex = exceptional_constants(&params, p).ok()?;
        if eta_lhs(&params, &ex, p) > params.eta {
            return None;
        }
        if !range_chain(&params, ex.big_c1, ex.c4, p).iter().all(|&b| b) {
            return None;
        }
        let tm = min_theta(|t| ctx.slack_medium(&params, t, params.alpha_m, &ex))?;
        let ts = min_theta(|t| ctx.slack_small(&params, t, params.alpha_s, &ex))?;
        let tv = min_theta(|t| ctx.slack_very_small(&params, t, params.alpha_vs, &ex))?;
        let xs = extremely_small_with(&ctx, &params, &ex, c3, 1e-7);
        if !xs.feasible {
            return None;
        }
        let b = (2.0 * tm.max(ts).max(tv) * ex.c4).max(xs.b);
        let params = CaseParams {
            theta_m: tm + THETA_TOL,
            theta_s: ts + THETA_TOL,
            theta_vs: tv + THETA_TOL,
            ..params
        };
        Some((params, b))
    };
    let mut best: Option<(CaseParams, f64)> = None;
    for i in 0..=120 {
        let le2 = -2.0 + 6.0 * i as f64 / 120.0;
        if let Some((params, b)) = eval_eps2(le2) {
            if best.as_ref().is_none_or(|(_, bb)| b < *bb) {
                best = Some((params, b));
            }
        }
    }
    let (params, _) = best.ok_or_else(|| {
        LeastPrimeError::Infeasible(format!("published parameters infeasible for n0 = {}", p.n0()))
    })?;
    let evaluation = evaluate(p, &params, c3)?;
    let b_exact = evaluation.overall().ok_or_else(|| {
        LeastPrimeError::Infeasible(format!("published parameters infeasible for n0 = {}", p.n0()))
    })?;
    Ok(Optimized {
        n0: p.n0(),
        d0: p.d0_text().to_string(),
        params,
        evaluation,
        b_exact,
        b: round_sig(b_exact, 4, Rounding::Up),
    })
}

/// Case bounds rounded up to 4 decimals for output.
pub fn rounded_case_bounds(ev: &Evaluation) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (o, c) in out.iter_mut().zip(ev.cases.iter()) {
        *o = round_places(c.b, 4, Rounding::Up);
    }
    out
}

/// Constants entering the lower-bound density; the defaults are approximations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundConstants {
    pub c35: f64,
    pub c39: f64,
    pub c40: f64,
    pub c41: f64,
    pub c6ext: f64,
    /// Whether any value came from the approximate defaults.
    pub approximate: bool,
}

/// The c₈-type constant used inside the default c₃₅.
pub const LOWER_BOUND_C8: f64 = 1.0 / 77.0;

impl LowerBoundConstants {
    /// Approximate values for a given a.
    pub fn approximate(a: f64, c6ext: f64) -> Self {
        let c39 = 1.0 / R.sqrt();
        Self {
            c35: 2.0 / (c6ext * 3f64.ln()) * LOWER_BOUND_C8,
            c39,
            c40: a.sqrt(),
            c41: 5.7868 * c39 / c6ext * (a + 1.0) / a.ln(),
            c6ext,
            approximate: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    pub a: f64,
    pub c43: f64,
    pub m: f64,
    pub approximate: bool,
}

/// m = c₄₃(a)/a.
pub fn lower_bound_m(a: f64, k: &LowerBoundConstants) -> Result<LowerBound, LeastPrimeError> {
    if !(a > 1.0 && a <= 2.0) {
        return Err(LeastPrimeError::Param { what: "a", value: a });
    }
    let x0 = 3f64.powf(k.c6ext);
    let root = (x0 / 2.0).sqrt();
    let c43 = 0.49 * (a - 1.0) / a.ln()
        - k.c41 * (-k.c39 * root).exp()
        - (k.c35 * x0 * x0.ln() + k.c40 * x0) * (-root).exp();
    Ok(LowerBound { a, c43, m: c43 / a, approximate: k.approximate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{builtin_profiles, least_prime_profiles};

    fn p9() -> DegreeProfile {
        builtin_profiles().into_iter().find(|p| p.n0() == 9).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn alpha3_value() {
        assert!((alpha3() - 36.7595).abs() < 1e-3);
    }

    #[test]
    fn w0_limit() {
        let s = structural_constants(200.0).unwrap();
        assert!((s.w0 - 0.75).abs() < 1e-9);
        let s = structural_constants(1.02).unwrap();
        assert!(s.w0 > 0.75 && s.w1 > s.w0);
        assert!(structural_constants(1.0).is_err());
    }

    #[test]
    fn worked_c8_c4() {
        let c8 = c8_of(5.57, 4.45, 0.025, &p9()).unwrap();
        assert!(rel(c8, 0.003324331) < 1e-3);
        let c4 = c4_exceptional(c8);
        assert!(rel(c4, 150.4072) < 5e-4);
        let ex = exceptional_constants(&CaseParams::worked(), &p9()).unwrap();
        assert!(c8 < ex.c2p);
        assert!((2.0 * ex.c4 * ex.c8 - (1.0 + 0.002 * ex.c8)).abs() < 1e-12);
        assert!(rel(ex.c9, ex.c10) < 1e-12 && rel(ex.c9, ex.c8) < 1e-12);
    }

    #[test]
    fn worked_preconditions() {
        let w = CaseParams::worked();
        assert!(eta_condition(&w, &p9()).unwrap());
        let ex = exceptional_constants(&w, &p9()).unwrap();
        assert!(range_chain_check(&w, ex.c4, &p9()).unwrap());
        let bad = CaseParams { lambda: 1.0, ..w };
        assert!(!range_chain_check(&bad, 10.0, &p9()).unwrap());
        let tiny_eta = CaseParams { eta: 1e-9, ..w };
        let p2 = builtin_profiles().remove(0);
        assert!(!eta_condition(&tiny_eta, &p2).unwrap());
    }

    #[test]
    fn worked_cases() {
        let ev = evaluate(&p9(), &CaseParams::worked(), 9.831).unwrap();
        assert!(ev.preconditions());
        assert!(rel(ev.case(Case::Medium).b, 306.8307) < 5e-3);
        assert!(rel(ev.case(Case::Small).b, 306.8307) < 5e-3);
        assert!(rel(ev.case(Case::VerySmall).b, 309.5380) < 5e-3);
        assert!(rel(ev.case(Case::ExtremelySmall).b, 174.8780) < 5e-3);
        for c in &ev.cases[1..] {
            assert!(c.feasible, "{:?}", c.case);
        }
        assert!(rel(ev.overall().unwrap(), 309.5380) < 5e-3);
    }

    #[test]
    fn nonexceptional_bisection_contract() {
        let cb = case_nonexceptional(&p9(), 12.83, 2.56);
        assert!(cb.feasible && cb.slack > 0.0);
        let ctx = CaseContext::new(&p9());
        assert!(ctx.slack_nonexceptional(12.83, 2.56, cb.exponent - EXPONENT_TOL) <= 0.0);
        assert_eq!(cb.b, 2.0 * 12.83 * cb.exponent);
    }

    #[test]
    fn sharpness_probe() {
        let p = p9();
        let w = CaseParams::worked();
        let ctx = CaseContext::new(&p);
        let ex = exceptional_constants(&w, &p).unwrap();
        let shrink = |theta: f64| 0.99 * theta;
        assert!(ctx.slack_medium(&w, shrink(w.theta_m), w.alpha_m, &ex) < 0.0);
        assert!(ctx.slack_small(&w, shrink(w.theta_s), w.alpha_s, &ex) < 0.0);
        assert!(ctx.slack_very_small(&w, shrink(w.theta_vs), w.alpha_vs, &ex) < 0.0);
        let xs = case_extremely_small(&p, &w, 9.831).unwrap();
        assert!(ctx.slack_extremely_small(&w, 0.99 * xs.exponent, &ex, 9.831) < 0.0);
        let ne = case_nonexceptional(&p, 12.83, 2.56);
        assert!(ctx.slack_nonexceptional(12.83, 2.56, 0.99 * ne.exponent) < 0.0);
    }

    #[test]
    fn order_of_cases_irrelevant() {
        let ev = evaluate(&p9(), &CaseParams::worked(), 9.831).unwrap();
        let fwd = ev.cases.iter().map(|c| c.b).fold(f64::NEG_INFINITY, f64::max);
        let rev = ev.cases.iter().rev().map(|c| c.b).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(fwd, rev);
    }

    #[test]
    fn composition_rule() {
        let ev = evaluate(&p9(), &CaseParams::worked(), 9.831).unwrap();
        for c in &ev.cases {
            let want =
                if c.case == Case::ExtremelySmall { 5.0 * c.exponent } else { 2.0 * c.theta * c.exponent };
            assert_eq!(c.b, want);
        }
    }

    #[test]
    fn lower_bound_defaults() {
        let k = LowerBoundConstants::approximate(1.0001, 11.7);
        let lb = lower_bound_m(1.0001, &k).unwrap();
        assert!(lb.approximate);
        assert!(lb.m > 0.47 && lb.m < 0.50);
        let k2 = LowerBoundConstants::approximate(2.0, 11.7);
        let m2 = lower_bound_m(2.0, &k2).unwrap().m;
        assert!((m2 - 0.49 / (2.0 * 2f64.ln())).abs() < 1e-9);
        assert!(lower_bound_m(2.5, &k2).is_err());
    }

    #[test]
    fn optimizer_row_nine() {
        let p = least_prime_profiles().into_iter().find(|p| p.n0() == 9).unwrap();
        let opt = optimize_b(&p, 9.831).unwrap();
        assert!(opt.evaluation.feasible());
        assert!(opt.b <= 309.6 * 1.005);
    }
}
