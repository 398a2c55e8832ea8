//! Zero-repulsion constant pairs (c₁, c₂), (c₁′, c₂′), (c₁″, c₂″) and the
//! exceptional-zero exponent c₃.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::numerics::{digamma, g_bound, nelder_mead, round_sig, NumericsError, Rounding};
use crate::profiles::{delta0, DegreeProfile};

/// Zero-free region constant: no zeros with σ > 1 − 1/(R(ℒ + n_L log(|t|+2))).
pub const R: f64 = 29.57;
/// Radius used by the least-prime case split.
pub const R0: f64 = 20.0;
/// Enlarged zero-free box constant.
pub const R1: f64 = 1.24;
/// Fallback for the enlarged box when R₀ = 2.
pub const R1_FALLBACK: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlobalConstants {
    pub r: f64,
    pub r0: f64,
    pub r1: f64,
    pub r1_fallback: f64,
}

pub const GLOBALS: GlobalConstants = GlobalConstants { r: R, r0: R0, r1: R1, r1_fallback: R1_FALLBACK };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepulsionError {
    #[error("invalid parameter {what} = {value}")]
    Param { what: &'static str, value: f64 },
    #[error("d = {0} must exceed 1")]
    Distance(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepulsionParams {
    pub eps: f64,
    pub sigma: f64,
    pub eta: f64,
}

impl RepulsionParams {
    pub fn new(eps: f64, sigma: f64, eta: f64) -> Result<Self, RepulsionError> {
        let p = Self { eps, sigma, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), RepulsionError> {
        if !(self.eps > 0.0) {
            return Err(RepulsionError::Param { what: "eps", value: self.eps });
        }
        if !(self.sigma >= 2.0) {
            return Err(RepulsionError::Param { what: "sigma", value: self.sigma });
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(RepulsionError::Param { what: "eta", value: self.eta });
        }
        Ok(())
    }
}

/// Which zero region a pair applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    /// All heights.
    General,
    /// |t| ≤ 1.
    Strip,
    /// Real zeros.
    Real,
}

pub const KINDS: [PairKind; 3] = [PairKind::General, PairKind::Strip, PairKind::Real];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepulsionConstants {
    pub c1: f64,
    pub c2: f64,
    pub c1p: f64,
    pub c2p: f64,
    pub c1pp: f64,
    pub c2pp: f64,
    pub c3: f64,
}

/// A = (σ−1+η)², d = √(σ²+A).
pub fn geometry(params: &RepulsionParams) -> (f64, f64) {
    let a = (params.sigma - 1.0 + params.eta).powi(2);
    (a, (params.sigma * params.sigma + a).sqrt())
}

pub fn b1(d: f64, p: &DegreeProfile) -> f64 {
    let l0 = p.l0();
    1.0 + 2.0 / (l0 * (d - 1.0)) + 2.0 / (l0 * d)
}

pub fn b2(d: f64, t0: f64) -> Result<f64, RepulsionError> {
    let g = g_bound(d, t0)?.max(g_bound(d + 1.0, t0)?);
    let arg = digamma(0.5 * (d + 1.0))? + g - 2.0 * PI.ln();
    Ok(0.5 + arg.max(0.0) / (2.0 * LN_2))
}

/// ℬ(d, T₀) = (1/(d−1)) max_{δ∈[0,Δ₀(T₀)]} (b₁ + b₂δ)/(1+δ).
pub fn b_general(d: f64, t0: f64, p: &DegreeProfile) -> Result<f64, RepulsionError> {
    if !(d > 1.0) {
        return Err(RepulsionError::Distance(d));
    }
    let (x1, x2) = (b1(d, p), b2(d, t0)?);
    let dmax = delta0(t0, p);
    let far = if dmax.is_infinite() { x2 } else { (x1 + x2 * dmax) / (1.0 + dmax) };
    Ok(x1.max(far) / (d - 1.0))
}

/// ℋ(d).
pub fn h_strip(d: f64) -> Result<f64, RepulsionError> {
    let f = |x: f64| (x * x + 1.0).sqrt().ln() - x / (x * x + 1.0) + 1.0 / (3.0 * x * x);
    Ok(0.5 * digamma(0.5 * (d + 1.0))? + 0.5 * f(d).max(f(d + 1.0)) - 0.5 * (LN_2 + 2.0 * PI.ln()))
}

/// ℬ′(d), the strip |t| ≤ 1.
pub fn b_strip(d: f64, p: &DegreeProfile) -> Result<f64, RepulsionError> {
    if !(d > 1.0) {
        return Err(RepulsionError::Distance(d));
    }
    let n0 = f64::from(p.n0());
    let inner = h_strip(d)? + (4.0 * d - 2.0) / (d * (d - 1.0) * n0);
    Ok((1.0 + p.q0() * inner.max(0.0)) / (d - 1.0))
}

/// ℬ″(d), real zeros.
pub fn b_real(d: f64, p: &DegreeProfile) -> Result<f64, RepulsionError> {
    if !(d > 1.0) {
        return Err(RepulsionError::Distance(d));
    }
    let n0 = f64::from(p.n0());
    let inner = 0.5 * digamma(0.5 * (d + 1.0))? - 0.5 * PI.ln() + (2.0 * d - 1.0) / (d * (d - 1.0) * n0);
    Ok((0.5 + p.q0() * inner.max(0.0)) / (d - 1.0))
}

pub fn b_kind(kind: PairKind, d: f64, p: &DegreeProfile) -> Result<f64, RepulsionError> {
    match kind {
        PairKind::General => b_general(d, f64::INFINITY, p),
        PairKind::Strip => b_strip(d, p),
        PairKind::Real => b_real(d, p),
    }
}

/// The ratio c₁/c₂ = ε/(8(8+ε)).
pub fn pair_ratio(eps: f64) -> f64 {
    eps / (8.0 * (8.0 + eps))
}

/// (c₁, c₂) for the given region.
pub fn repulsion_pair(
    kind: PairKind,
    params: &RepulsionParams,
    p: &DegreeProfile,
) -> Result<(f64, f64), RepulsionError> {
    params.validate()?;
    let (a, d) = geometry(params);
    let b = b_kind(kind, d, p)?;
    let c2 = (params.sigma - 1.0) / (2.0 * (8.0 + params.eps) * a * b);
    Ok((pair_ratio(params.eps) * c2, c2))
}

/// c₃ from the real-zero pair: η/c₂″ + (log ℒ₀ − log c₁″)/ℒ₀.
pub fn c3_const(params: &RepulsionParams, p: &DegreeProfile) -> Result<f64, RepulsionError> {
    let (c1, c2) = repulsion_pair(PairKind::Real, params, p)?;
    Ok(c3_from_pair(c1, c2, params.eta, p))
}

pub fn c3_from_pair(c1pp: f64, c2pp: f64, eta: f64, p: &DegreeProfile) -> f64 {
    let l0 = p.l0();
    eta / c2pp + (l0.ln() - c1pp.ln()) / l0
}

/// Search box for the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchBox {
    pub eps: (f64, f64),
    pub sigma: (f64, f64),
    pub grid: usize,
    pub iterations: usize,
}

impl Default for SearchBox {
    fn default() -> Self {
        Self { eps: (1e-3, 50.0), sigma: (2.0, 30.0), grid: 20, iterations: 400 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepulsionFit {
    pub n0: u32,
    pub d0: String,
    /// Shared ε, chosen to minimize c₃.
    pub eps: f64,
    /// Per-kind σ maximizing c₂ at the shared ε.
    pub sigma: [f64; 3],
    /// σ certifying c₃.
    pub sigma_c3: f64,
    pub eta: f64,
    /// Full-precision constants.
    pub exact: RepulsionConstants,
    /// Safely rounded constants.
    pub rounded: RepulsionConstants,
}

impl RepulsionFit {
    pub fn params(&self, kind: PairKind) -> RepulsionParams {
        let i = KINDS.iter().position(|k| *k == kind).expect("known kind");
        RepulsionParams { eps: self.eps, sigma: self.sigma[i], eta: self.eta }
    }
}

fn c3_objective(x: &[f64], eta: f64, p: &DegreeProfile) -> f64 {
    let params = RepulsionParams { eps: x[0].exp(), sigma: x[1], eta };
    c3_const(&params, p).unwrap_or(f64::INFINITY)
}

/// Minimizes c₃ over (ε, σ) at fixed η: grid seed, then Nelder–Mead in (log ε, σ).
pub fn minimize_c3(p: &DegreeProfile, eta: f64, sb: &SearchBox) -> (f64, f64, f64) {
    let (le0, le1) = (sb.eps.0.ln(), sb.eps.1.ln());
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..sb.grid {
        for j in 0..sb.grid {
            let le = le0 + (le1 - le0) * i as f64 / (sb.grid - 1) as f64;
            let s = sb.sigma.0 + (sb.sigma.1 - sb.sigma.0) * j as f64 / (sb.grid - 1) as f64;
            let v = c3_objective(&[le, s], eta, p);
            if v < best.0 {
                best = (v, le, s);
            }
        }
    }
    let lo = [le0, sb.sigma.0];
    let hi = [le1, sb.sigma.1];
    let mut x = vec![best.1, best.2];
    let mut val = best.0;
    for step in [0.5, 0.05] {
        let m =
            nelder_mead(|x| c3_objective(x, eta, p), &x, &[step, 4.0 * step], &lo, &hi, sb.iterations, 1e-15);
        if m.value <= val {
            x = m.x;
            val = m.value;
        }
    }
    (val, x[0].exp(), x[1])
}

/// Maximizes c₂ of one kind over σ at fixed (ε, η).
pub fn maximize_c2(kind: PairKind, eps: f64, eta: f64, p: &DegreeProfile, sb: &SearchBox) -> (f64, f64) {
    let f = |s: f64| {
        repulsion_pair(kind, &RepulsionParams { eps, sigma: s, eta }, p)
            .map(|v| v.1)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let n = 40 * sb.grid;
    let mut best = (f64::NEG_INFINITY, sb.sigma.0);
    for j in 0..=n {
        let s = sb.sigma.0 + (sb.sigma.1 - sb.sigma.0) * j as f64 / n as f64;
        let v = f(s);
        if v > best.0 {
            best = (v, s);
        }
    }
    let m = nelder_mead(|x| -f(x[0]), &[best.1], &[0.05], &[sb.sigma.0], &[sb.sigma.1], sb.iterations, 1e-15);
    if -m.value > best.0 {
        (-m.value, m.x[0])
    } else {
        best
    }
}

/// Optimized constants for one profile at fixed η.
pub fn optimize_repulsion(p: &DegreeProfile, eta: f64) -> Result<RepulsionFit, RepulsionError> {
    optimize_repulsion_in(p, eta, &SearchBox::default())
}

pub fn optimize_repulsion_in(
    p: &DegreeProfile,
    eta: f64,
    sb: &SearchBox,
) -> Result<RepulsionFit, RepulsionError> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(RepulsionError::Param { what: "eta", value: eta });
    }
    let (c3, eps, sigma_c3) = minimize_c3(p, eta, sb);
    let fits: Vec<(f64, f64)> = KINDS.par_iter().map(|k| maximize_c2(*k, eps, eta, p, sb)).collect();
    let ratio = pair_ratio(eps);
    let exact = RepulsionConstants {
        c1: ratio * fits[0].0,
        c2: fits[0].0,
        c1p: ratio * fits[1].0,
        c2p: fits[1].0,
        c1pp: ratio * fits[2].0,
        c2pp: fits[2].0,
        c3,
    };
    let down = |x: f64| round_sig(x, 4, Rounding::Down);
    let rounded = RepulsionConstants {
        c1: down(exact.c1),
        c2: down(exact.c2),
        c1p: down(exact.c1p),
        c2p: down(exact.c2p),
        c1pp: down(exact.c1pp),
        c2pp: down(exact.c2pp),
        c3: round_sig(c3, 4, Rounding::Up),
    };
    Ok(RepulsionFit {
        n0: p.n0(),
        d0: p.d0_text().to_string(),
        eps,
        sigma: [fits[0].1, fits[1].1, fits[2].1],
        sigma_c3,
        eta,
        exact,
        rounded,
    })
}

/// Optimizes every profile in parallel, preserving input order.
pub fn optimize_all(profiles: &[DegreeProfile], eta: f64) -> Result<Vec<RepulsionFit>, RepulsionError> {
    profiles.par_iter().map(|p| optimize_repulsion(p, eta)).collect()
}

/// Whether ½(1 − 1/√5) + r ≥ rR₀/(R₀+r) + rR(R+r)/((R+r)² + r²).
pub fn zfr_enlarged_check(r0: f64, r: f64, big_r: f64) -> bool {
    let lhs = 0.5 * (1.0 - 1.0 / 5f64.sqrt()) + r;
    let rhs = r * r0 / (r0 + r) + r * big_r * (big_r + r) / ((big_r + r).powi(2) + r * r);
    lhs >= rhs
}
