//! Randomized invariants across modules.

use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;

use chebotarev::frobenius::poly::{from_i64, mul, ZPoly};
use chebotarev::frobenius::{
    cycle_type, factor_mod_p, frobenius_matches, least_frobenius_prime, quadratic_field, skip_reason,
    Automorphism, FieldSpec, Fp, Primes,
};
use chebotarev::leastprime::{evaluate, Case, CaseContext, CaseParams, CASES};
use chebotarev::profiles::builtin_profiles;
use chebotarev::profiles::least_prime_profiles;
use chebotarev::repulsion::{repulsion_pair, RepulsionParams, KINDS};
use chebotarev::turan::PowerSumInstance;

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 101, 997, 7919, 65521, 1_000_003, 2_147_483_647];

fn poly_add(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    let mut out: ZPoly = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect();
    while out.last().is_some_and(|c| *c == BigInt::default()) {
        out.pop();
    }
    out
}

/// p(x + k) by Horner's rule.
fn shift(p: &[BigInt], k: i64) -> ZPoly {
    let lin = from_i64(&[k, 1]);
    let mut acc: ZPoly = Vec::new();
    for c in p.iter().rev() {
        acc = poly_add(&mul(&acc, &lin), std::slice::from_ref(c));
    }
    acc
}

/// The field with root r − k: f(x + k), each g becomes g(x + k) − k.
fn shifted(field: &FieldSpec, k: i64) -> FieldSpec {
    let autos = field
        .automorphisms
        .iter()
        .map(|g| {
            let num = poly_add(&shift(&g.num, k), &[-(&g.den * BigInt::from(k))]);
            Automorphism { num, den: g.den.clone() }
        })
        .collect();
    FieldSpec::new(shift(&field.f, k), field.discriminant.clone(), autos).expect("shifted field is valid")
}

fn cyclic_cubic() -> FieldSpec {
    let autos = vec![
        Automorphism::identity(),
        Automorphism { num: from_i64(&[-2, 0, 1]), den: BigInt::from(1) },
        Automorphism { num: from_i64(&[2, -1, -1]), den: BigInt::from(1) },
    ];
    FieldSpec::new(from_i64(&[1, -3, 0, 1]), BigInt::from(81), autos).unwrap()
}

fn base_fields() -> Vec<FieldSpec> {
    vec![
        quadratic_field(-4).unwrap(),
        quadratic_field(5).unwrap(),
        quadratic_field(-23).unwrap(),
        quadratic_field(12).unwrap(),
        cyclic_cubic(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn factor_degrees_sum_to_degree(
        coeffs in prop::collection::vec(-50i64..=50, 1..9),
        pi in 0usize..SMALL_PRIMES.len(),
    ) {
        let mut c = coeffs.clone();
        c.push(1);
        let f = from_i64(&c);
        let p = SMALL_PRIMES[pi];
        let factors = factor_mod_p(&f, p);
        prop_assert_eq!(cycle_type(&factors).iter().sum::<usize>(), coeffs.len());
        let fp = Fp::new(p);
        let mut prod = vec![1u64];
        for (h, m) in &factors {
            prop_assert_eq!(fp.monic(h), h.clone());
            for _ in 0..*m {
                prod = fp.poly_mul(&prod, h);
            }
        }
        prop_assert_eq!(prod, fp.reduce(&f));
    }

    #[test]
    fn residue_degrees_invariant_under_shift(
        coeffs in prop::collection::vec(-30i64..=30, 1..7),
        k in -40i64..=40,
        pi in 0usize..SMALL_PRIMES.len(),
    ) {
        let mut c = coeffs.clone();
        c.push(1);
        let f = from_i64(&c);
        let p = SMALL_PRIMES[pi];
        let mut a = cycle_type(&factor_mod_p(&f, p));
        let mut b = cycle_type(&factor_mod_p(&shift(&f, k), p));
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn least_prime_invariant_under_shift(fi in 0usize..5, k in -25i64..=25) {
        let field = &base_fields()[fi];
        let moved = shifted(field, k);
        for sigma in 0..field.automorphisms.len() {
            let a = least_frobenius_prime(field, sigma).unwrap();
            let b = least_frobenius_prime(&moved, sigma).unwrap();
            prop_assert_eq!(a.p, b.p);
            prop_assert_eq!(a.factor_degrees, b.factor_degrees);
        }
    }

    #[test]
    fn returned_prime_is_least(d in -3000i64..=3000) {
        prop_assume!(chebotarev::frobenius::is_fundamental(d));
        let field = quadratic_field(d).unwrap();
        for sigma in 0..2 {
            let r = least_frobenius_prime(&field, sigma).unwrap();
            prop_assert!(frobenius_matches(&field, sigma, r.p).unwrap());
            for q in Primes::up_to(r.p - 1) {
                if skip_reason(&field, &field.automorphisms[sigma], q).is_none() {
                    prop_assert!(!frobenius_matches(&field, sigma, q).unwrap());
                }
            }
        }
    }

    #[test]
    fn repulsion_ratio_is_exact(eps in 0.01f64..50.0, sigma in 2.0f64..12.0, eta in 0.01f64..=1.0, row in 0usize..20) {
        let p = &builtin_profiles()[row];
        let params = RepulsionParams::new(eps, sigma, eta).unwrap();
        for kind in KINDS {
            let (c1, c2) = repulsion_pair(kind, &params, p).unwrap();
            let want = eps / (8.0 * (8.0 + eps));
            prop_assert!(((c1 / c2) - want).abs() <= 1e-14 * want);
        }
    }

    #[test]
    fn witness_indices_survive_scaling(
        pts in prop::collection::vec((0.05f64..1.0, -3.2f64..3.2), 1..40),
        scale in 0.2f64..5.0,
        ei in 0usize..4,
    ) {
        let eps = [0.1, 1.0, 5.57, 5.97][ei];
        let zs: Vec<Complex64> = pts.iter().map(|&(r, a)| Complex64::from_polar(r, a)).collect();
        let inst = PowerSumInstance::new(zs.clone(), eps).unwrap();
        let scaled = PowerSumInstance::new(zs.iter().map(|z| z * scale).collect(), eps).unwrap();
        prop_assert!((inst.m_value() - scaled.m_value()).abs() <= 1e-12 * inst.m_value());
        prop_assert!(inst.witness().is_ok());
        let (a, b) = (inst.power_sums(8), scaled.power_sums(8));
        for (j, (x, y)) in a.iter().zip(&b).enumerate() {
            let want = x * scale.powi(j as i32 + 1);
            prop_assert!((y - want).abs() <= 1e-9 * (1.0 + want.abs()) * scale.powi(j as i32 + 1));
        }
        // indices whose margin is not at rounding level must agree
        let margin = |i: &PowerSumInstance, j: usize| {
            let s = i.power_sums(j)[j - 1];
            (s - i.threshold(j)) / i.zs()[0].norm().powi(j as i32)
        };
        let robust = |j: &usize| margin(&inst, *j).abs() > 1e-9;
        let sa: Vec<usize> = inst.witness_set().into_iter().filter(robust).collect();
        let sb: Vec<usize> = scaled.witness_set().into_iter().filter(robust).collect();
        prop_assert_eq!(sa, sb);
    }

    #[test]
    fn error_terms_decrease_in_l0(l0a in 1.0986f64..60.0, gap in 0.01f64..10.0, theta in 1.5f64..15.0, t in 0.2f64..200.0) {
        let p = least_prime_profiles()[7].clone();
        let l0b = (l0a + gap).min(60.0);
        prop_assume!(l0b > l0a);
        let terms = |l0: f64| CaseContext::with_l0(&p, l0).ln_error_terms([theta; 4], [t; 5], 0.1, 1.15, 0.05, 9.831);
        let (a, b) = (terms(l0a), terms(l0b));
        // E₀ and E₁ carry L·e^{−tL}, monotone only once tL ≥ 1
        for k in 0..5 {
            if k < 2 && t * l0a < 1.0 {
                continue;
            }
            if k == 4 && t < 9.831 {
                continue;
            }
            prop_assert!(b[k].is_finite() && b[k] < a[k], "term {} at {} -> {}: {} vs {}", k, l0a, l0b, a[k], b[k]);
        }
    }

    #[test]
    fn composition_and_order(
        theta_scale in 0.95f64..1.1,
        eps2 in 3.0f64..9.0,
        kappa in 15.0f64..30.0,
    ) {
        let p = least_prime_profiles()[7].clone();
        let base = CaseParams::worked();
        let params = CaseParams {
            theta_m: base.theta_m * theta_scale,
            theta_s: base.theta_s * theta_scale,
            theta_vs: base.theta_vs * theta_scale,
            eps2,
            kappa,
            ..base
        };
        let Ok(ev) = evaluate(&p, &params, 9.831) else { return Ok(()); };
        for c in &ev.cases {
            if !c.feasible {
                continue;
            }
            let want = if c.case == Case::ExtremelySmall { 5.0 * c.exponent } else { 2.0 * c.theta * c.exponent };
            prop_assert_eq!(c.b, want);
        }
        let forward = ev.cases.iter().map(|c| c.b).fold(f64::NEG_INFINITY, f64::max);
        let backward = CASES.iter().rev().map(|&k| ev.case(k).b).fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(forward, backward);
        if let Some(b) = ev.overall() {
            prop_assert_eq!(b, forward);
        }
    }
}
