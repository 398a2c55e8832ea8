//! Property suite shared by the `selfcheck` command and the test targets.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::frobenius::{
    self, cycle_type, kronecker, least_frobenius_prime, quadratic_corpus, Fp, Primes, ScanOptions, Shape,
};
use crate::kernels::{k_hat, k_hat_numeric, phi_lower, phi_theta, KernelSpec};
use crate::leastprime::{alpha3, evaluate, exceptional_constants, Case, CaseContext, CaseParams};
use crate::profiles::least_prime_profiles;
use crate::repulsion::zfr_enlarged_check;
use crate::turan::run_trials;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name: name.to_string(), passed, detail }
}

/// Kernels used for the inversion check, with their transform supports.
pub fn inversion_kernels() -> [(KernelSpec, f64, f64); 3] {
    [
        (KernelSpec::SquaredDifference { x: 3.0, theta: 1.5 }, 9.0, 27.0),
        (KernelSpec::Gaussian { x: 20.0 }, 1.0, 400.0),
        (KernelSpec::LowerBound { x: 8.0, a: 2.0 }, 1.0, 16.0),
    ]
}

/// Truncation height for the numeric inversion.
pub const INVERSION_T: f64 = 8000.0;

/// Worst |numeric − closed form| over `samples` log-cell midpoints of each support.
pub fn mellin_inversion_errors(samples: usize) -> Vec<(KernelSpec, f64)> {
    inversion_kernels()
        .iter()
        .map(|&(spec, lo, hi)| {
            let worst = (0..samples)
                .map(|i| {
                    let u = lo * (hi / lo).powf((i as f64 + 0.5) / samples as f64);
                    let n = k_hat_numeric(&spec, u, INVERSION_T).unwrap_or(f64::INFINITY);
                    (n - k_hat(&spec, u)).abs()
                })
                .fold(0.0, f64::max);
            (spec, worst)
        })
        .collect()
}

pub const PHI_THETAS: [f64; 4] = [1.02, 1.029, 2.0, 12.83];

/// Violations of monotonicity and of (θ−1)²(1−e^{−2v}) ≤ φ_θ(v) ≤ (θ−1)², plus the linear minorant.
pub fn phi_violations(points: usize) -> usize {
    let mut bad = 0;
    for &theta in &PHI_THETAS {
        let d2 = (theta - 1.0).powi(2);
        let mut prev = phi_theta(theta, 0.0);
        for i in 1..=points {
            let v = 50.0 * i as f64 / points as f64;
            let phi = phi_theta(theta, v);
            if phi < prev {
                bad += 1;
            }
            let lo = d2 * (1.0 - (-2.0 * v).exp());
            if phi < lo * (1.0 - 1e-12) || phi > d2 * (1.0 + 1e-12) {
                bad += 1;
            }
            prev = phi;
        }
        for b in [0.1, 0.2, 0.7, 2.0] {
            for i in 0..=points {
                let v = b * i as f64 / points as f64;
                if phi_lower(theta, v, b).map_or(true, |l| l > phi_theta(theta, v)) {
                    bad += 1;
                }
            }
        }
    }
    bad
}

/// Number of R on the grid where the enlarged-box inequality still holds.
pub fn zfr_holds_count(r0: f64, r_lo: f64, r_hi: f64, points: usize) -> usize {
    (0..=points)
        .filter(|&i| {
            let big_r = r_lo + (r_hi - r_lo) * i as f64 / points as f64;
            zfr_enlarged_check(r0, 0.6, big_r)
        })
        .count()
}

/// Least prime q with (d/q) = want, found by the symbol alone.
pub fn kronecker_least_prime(d: i64, want: i32) -> Option<u64> {
    Primes::up_to(frobenius::DEFAULT_CEILING).find(|&q| kronecker(d, q) == want)
}

/// Mismatches between the Frobenius scan and the Kronecker oracle for |d| ≤ height.
pub fn kronecker_mismatches(height: u64) -> Result<(usize, usize), frobenius::FrobeniusError> {
    use rayon::prelude::*;
    let corpus = quadratic_corpus(height)?;
    let bad = corpus
        .par_iter()
        .map(|field| {
            let d: i64 = i64::try_from(&field.discriminant).expect("small discriminant");
            [(0usize, 1), (1, -1)]
                .iter()
                .filter(|&&(sigma, want)| {
                    let scanned = least_frobenius_prime(field, sigma).ok().map(|r| r.p);
                    scanned != kronecker_least_prime(d, want)
                })
                .count()
        })
        .sum();
    Ok((corpus.len(), bad))
}

/// Random monic (f, p): factor degrees must sum to deg f and the factors multiply back to f.
pub fn factorization_violations(cases: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primes: Vec<u64> = Primes::up_to(2000).collect();
    let mut bad = 0;
    for _ in 0..cases {
        let n = rng.gen_range(2..=8);
        let mut coeffs: Vec<i64> = (0..n).map(|_| rng.gen_range(-20..=20)).collect();
        coeffs.push(1);
        let f = frobenius::poly::from_i64(&coeffs);
        let p = primes[rng.gen_range(0..primes.len())];
        let factors = frobenius::factor_mod_p(&f, p);
        if cycle_type(&factors).iter().sum::<usize>() != n {
            bad += 1;
            continue;
        }
        let fp = Fp::new(p);
        let mut prod = vec![1u64];
        for (h, m) in &factors {
            for _ in 0..*m {
                prod = fp.poly_mul(&prod, h);
            }
        }
        if prod != fp.reduce(&f) {
            bad += 1;
        }
    }
    bad
}

/// Error terms at ℒ₀ on a grid over [log 3, 60] must be positive and strictly decreasing (compared as logarithms).
pub fn error_term_violations(points: usize) -> usize {
    let w = CaseParams::worked();
    let p9 = least_prime_profiles().into_iter().find(|p| p.n0() == 9).expect("row 9");
    let ex = match exceptional_constants(&w, &p9) {
        Ok(ex) => ex,
        Err(_) => return usize::MAX,
    };
    let kc = w.kappa * ex.big_c1;
    let t12 = 34.97;
    let c3 = 9.831;
    let thetas = [w.theta_ne, w.theta_m, w.theta_s, w.theta_vs];
    let ts = [0.6532, ex.c4, ex.c4, ex.c4, t12];
    let terms = |l0: f64| CaseContext::with_l0(&p9, l0).ln_error_terms(thetas, ts, w.mu, w.nu, kc, c3);
    let lo = 3f64.ln();
    let mut bad = 0;
    let mut prev = terms(lo);
    for v in prev {
        if !v.is_finite() {
            bad += 1;
        }
    }
    for i in 1..=points {
        let l0 = lo + (60.0 - lo) * i as f64 / points as f64;
        let cur = terms(l0);
        for k in 0..5 {
            if !cur[k].is_finite() || !(cur[k] < prev[k]) {
                bad += 1;
            }
        }
        prev = cur;
    }
    bad
}

/// Runs every property with its default size.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    let mut out = Vec::new();

    let a3 = alpha3();
    out.push(outcome("alpha3", (a3 - 36.7595).abs() < 1e-3, format!("{a3:.7}")));

    let h2 = zfr_holds_count(2.0, 1.7, 10.0, 1000);
    let h35 = zfr_holds_count(3.5, 1.24, 10.0, 1000);
    out.push(outcome("enlarged-box", h2 == 0 && h35 == 0, format!("holds at {h2} + {h35} grid points")));

    let t = run_trials(10_000, seed);
    out.push(outcome(
        "turan-witness",
        t.failures == 0,
        format!("{} trials, {} failures, max j0 {}", t.trials, t.failures, t.max_j0),
    ));

    let inv = mellin_inversion_errors(20);
    let worst = inv.iter().map(|(_, e)| *e).fold(0.0, f64::max);
    out.push(outcome("mellin-inversion", worst <= 1e-6, format!("max error {worst:.3e}")));

    let pv = phi_violations(1000);
    out.push(outcome("phi-bounds", pv == 0, format!("{pv} violations")));

    let w = CaseParams::worked();
    let p9 = least_prime_profiles().into_iter().find(|p| p.n0() == 9).expect("row 9");
    match evaluate(&p9, &w, 9.831) {
        Ok(ev) => {
            let comp = ev.cases.iter().all(|c| {
                let want = if c.case == Case::ExtremelySmall {
                    5.0 * c.exponent
                } else {
                    2.0 * c.theta * c.exponent
                };
                c.b == want || !c.b.is_finite()
            });
            out.push(outcome("b-composition", comp, "B = 2θc₄ or 5c₁₂".into()));
        }
        Err(e) => out.push(outcome("b-composition", false, e.to_string())),
    }

    let ev = error_term_violations(200);
    out.push(outcome("error-terms-monotone", ev == 0, format!("{ev} violations")));

    let fv = factorization_violations(1000, seed);
    out.push(outcome("factor-degrees", fv == 0, format!("{fv} violations")));

    match kronecker_mismatches(10_000) {
        Ok((n, bad)) => {
            out.push(outcome("kronecker-oracle", bad == 0, format!("{n} fields, {bad} mismatches")))
        }
        Err(e) => out.push(outcome("kronecker-oracle", false, e.to_string())),
    }

    match quadratic_corpus(16) {
        Ok(c) => {
            let rep = frobenius::corpus_scan(&c, &ScanOptions::default());
            let get = |s: Shape| rep.worst.iter().find(|w| w.shape == s).map_or(f64::NAN, |w| w.value);
            let (a, b, cc) = (get(Shape::A), get(Shape::B), get(Shape::C));
            let ok = (a - 1.7712).abs() < 1e-3 && (b - 5.7997).abs() < 1e-3 && (cc - 136.06).abs() < 1e-3;
            out.push(outcome("quadratic-height-16", ok, format!("A {a:.4}, B {b:.4}, C {cc:.4}")));
        }
        Err(e) => out.push(outcome("quadratic-height-16", false, e.to_string())),
    }
    out
}
