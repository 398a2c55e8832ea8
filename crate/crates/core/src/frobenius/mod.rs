//! Least prime with a prescribed Frobenius, and worst-case exponent tables over a corpus.

pub mod field;
pub mod modp;
pub mod poly;

use num_bigint::BigInt;
use num_traits::Zero;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use field::{parse_corpus, Automorphism, FieldSpec};
pub use modp::{cycle_type, factor_mod_p, Fp, Poly, DEFAULT_SEED};
pub use poly::{poly_disc, ZPoly};

use crate::numerics::EULER_GAMMA;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrobeniusError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("automorphism index {index} out of range ({count} listed)")]
    SigmaIndex { index: usize, count: usize },
    #[error("indeterminate at p = {p}: {reason}")]
    Indeterminate { p: u64, reason: SkipReason },
    #[error("no matching prime up to {ceiling}")]
    CeilingReached { ceiling: u64 },
}

/// Default search ceiling for the prime sieve.
pub const DEFAULT_CEILING: u64 = 100_000_000;

/// Why a prime was not tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SkipReason {
    /// p divides the field discriminant.
    Ramified,
    /// p divides disc(f) but not d_L: skipped, inconclusive.
    Inconclusive,
    /// p divides the automorphism's denominator.
    Denominator,
}

impl std::fmt::Display for SkipReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SkipReason::Ramified => "ramified",
            SkipReason::Inconclusive => "skipped, inconclusive",
            SkipReason::Denominator => "divides the automorphism denominator",
        })
    }
}

/// Incremental segmented sieve of Eratosthenes.
pub struct Primes {
    ceiling: u64,
    base: Vec<u64>,
    lo: u64,
    segment: Vec<u64>,
    pos: usize,
}

const SEGMENT: u64 = 1 << 15;

impl Primes {
    pub fn up_to(ceiling: u64) -> Self {
        let root = (ceiling as f64).sqrt() as u64 + 1;
        let mut mark = vec![true; root as usize + 1];
        let mut base = Vec::new();
        for i in 2..=root as usize {
            if mark[i] {
                base.push(i as u64);
                let mut j = i * i;
                while j <= root as usize {
                    mark[j] = false;
                    j += i;
                }
            }
        }
        Self { ceiling, base, lo: 2, segment: Vec::new(), pos: 0 }
    }

    fn fill(&mut self) -> bool {
        while self.lo <= self.ceiling {
            let hi = (self.lo + SEGMENT - 1).min(self.ceiling);
            let mut mark = vec![true; (hi - self.lo + 1) as usize];
            for &q in &self.base {
                if q * q > hi {
                    break;
                }
                let start = (q * q).max(self.lo.div_ceil(q) * q);
                let mut j = start;
                while j <= hi {
                    mark[(j - self.lo) as usize] = false;
                    j += q;
                }
            }
            self.segment =
                mark.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| self.lo + i as u64).collect();
            self.pos = 0;
            self.lo = hi + 1;
            if !self.segment.is_empty() {
                return true;
            }
        }
        false
    }
}

impl Iterator for Primes {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pos >= self.segment.len() && !self.fill() {
            return None;
        }
        self.pos += 1;
        Some(self.segment[self.pos - 1])
    }
}

fn divides(p: u64, x: &BigInt) -> bool {
    (x % BigInt::from(p)).is_zero()
}

/// Reason to skip p, if any.
pub fn skip_reason(field: &FieldSpec, sigma: &Automorphism, p: u64) -> Option<SkipReason> {
    if divides(p, &field.discriminant) {
        Some(SkipReason::Ramified)
    } else if divides(p, &field.poly_discriminant) {
        Some(SkipReason::Inconclusive)
    } else if divides(p, &sigma.den) {
        Some(SkipReason::Denominator)
    } else {
        None
    }
}

fn automorphism(field: &FieldSpec, index: usize) -> Result<&Automorphism, FrobeniusError> {
    field
        .automorphisms
        .get(index)
        .ok_or(FrobeniusError::SigmaIndex { index, count: field.automorphisms.len() })
}

/// Tests g ≡ x^p (mod p, h) over the irreducible factors h of f mod p.
fn match_at(field: &FieldSpec, sigma: &Automorphism, p: u64, seed: u64) -> (bool, Vec<usize>) {
    let fp = Fp::new(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
    let factors = fp.factor_with(&fp.reduce(&field.f), &mut rng);
    let dinv = fp.inv(fp.reduce_int(&sigma.den));
    let g = fp.scale(&fp.reduce(&sigma.num), dinv);
    let hit = factors.iter().any(|(h, _)| fp.rem(&g, h) == fp.powmod(&[0, 1], p, h));
    (hit, cycle_type(&factors))
}

/// Whether the Frobenius at some prime above p is the given automorphism.
pub fn frobenius_matches(field: &FieldSpec, sigma_index: usize, p: u64) -> Result<bool, FrobeniusError> {
    let sigma = automorphism(field, sigma_index)?;
    if let Some(reason) = skip_reason(field, sigma, p) {
        return Err(FrobeniusError::Indeterminate { p, reason });
    }
    Ok(match_at(field, sigma, p, DEFAULT_SEED).0)
}

/// The three exponent shapes of a prime p against |d_L|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponents {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// A = log p/log d, B = p/(log d)², C = p(log log d)²/((3e^γ/π)²(log d)²(log(2 log log d))²).
pub fn exponents(p: u64, log_d: f64) -> Exponents {
    let pf = p as f64;
    let ll = log_d.ln();
    let k = 3.0 * EULER_GAMMA.exp() / std::f64::consts::PI;
    Exponents {
        a: pf.ln() / log_d,
        b: pf / (log_d * log_d),
        c: pf * ll * ll / (k * k * log_d * log_d * (2.0 * ll).ln().powi(2)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkippedPrime {
    pub p: u64,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrobeniusResult {
    pub p: u64,
    pub factor_degrees: Vec<usize>,
    pub exponents: Exponents,
    /// Primes tested (all below p failed to match).
    pub tested: usize,
    pub skipped: Vec<SkippedPrime>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub ceiling: u64,
    pub seed: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { ceiling: DEFAULT_CEILING, seed: DEFAULT_SEED }
    }
}

/// Smallest unramified p whose Frobenius matches the automorphism.
pub fn least_frobenius_prime(
    field: &FieldSpec,
    sigma_index: usize,
) -> Result<FrobeniusResult, FrobeniusError> {
    least_frobenius_prime_with(field, sigma_index, &ScanOptions::default())
}

pub fn least_frobenius_prime_with(
    field: &FieldSpec,
    sigma_index: usize,
    opts: &ScanOptions,
) -> Result<FrobeniusResult, FrobeniusError> {
    let sigma = automorphism(field, sigma_index)?;
    let mut skipped = Vec::new();
    let mut tested = 0;
    for p in Primes::up_to(opts.ceiling) {
        if let Some(reason) = skip_reason(field, sigma, p) {
            skipped.push(SkippedPrime { p, reason });
            continue;
        }
        tested += 1;
        let (hit, factor_degrees) = match_at(field, sigma, p, opts.seed);
        if hit {
            return Ok(FrobeniusResult {
                p,
                factor_degrees,
                exponents: exponents(p, field.log_disc()),
                tested,
                skipped,
            });
        }
    }
    Err(FrobeniusError::CeilingReached { ceiling: opts.ceiling })
}

/// Kronecker symbol (a/n).
pub fn kronecker(a: i64, n: u64) -> i32 {
    if n == 0 {
        return i32::from(a.abs() == 1);
    }
    if a % 2 == 0 && n.is_multiple_of(2) {
        return 0;
    }
    let v = n.trailing_zeros();
    let mut n = n >> v;
    let mut k = 1;
    if v % 2 == 1 {
        k = [0, 1, 0, -1, 0, -1, 0, 1][a.rem_euclid(8) as usize];
    }
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            k = -k;
        }
        if a % 4 == 3 && n % 4 == 3 {
            k = -k;
        }
        let r = n % a;
        n = a;
        a = r;
    }
    if n == 1 {
        k
    } else {
        0
    }
}

fn squarefree(mut m: u64) -> bool {
    let mut q = 2;
    while q * q <= m {
        if m.is_multiple_of(q * q) {
            return false;
        }
        if m.is_multiple_of(q) {
            m /= q;
        }
        q += 1;
    }
    true
}

pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Q(√d) with the identity and the nontrivial automorphism.
pub fn quadratic_field(d: i64) -> Result<FieldSpec, FrobeniusError> {
    if !is_fundamental(d) {
        return Err(FrobeniusError::InvalidField(format!("{d} is not a fundamental discriminant")));
    }
    let (f, conj) = if d.rem_euclid(4) == 1 {
        (poly::from_i64(&[(1 - d) / 4, -1, 1]), poly::from_i64(&[1, -1]))
    } else {
        (poly::from_i64(&[-d, 0, 1]), poly::from_i64(&[0, -1]))
    };
    let conj = Automorphism { num: conj, den: BigInt::from(1) };
    FieldSpec::new(f, BigInt::from(d), vec![Automorphism::identity(), conj])
}

/// All quadratic fields with |d| ≤ height, ordered by discriminant.
pub fn quadratic_corpus(height: u64) -> Result<Vec<FieldSpec>, FrobeniusError> {
    if height < 3 {
        return Err(FrobeniusError::InvalidField(format!("height {height} is below 3")));
    }
    let h = height as i64;
    (-h..=h).filter(|&d| is_fundamental(d)).map(quadratic_field).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Shape {
    A,
    B,
    C,
}

/// One (field, automorphism) outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldRow {
    pub degree: usize,
    pub disc: String,
    pub sigma: usize,
    pub p: u64,
    pub exponents: Exponents,
    pub factor_degrees: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCase {
    pub degree: usize,
    pub shape: Shape,
    pub value: f64,
    pub disc: String,
    pub sigma: usize,
    pub p: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanFailure {
    pub degree: usize,
    pub disc: String,
    pub sigma: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub worst: Vec<WorstCase>,
    pub rows: Vec<FieldRow>,
    pub failures: Vec<ScanFailure>,
}

/// Per-degree maxima of A, B, C over every field and automorphism.
pub fn corpus_scan(corpus: &[FieldSpec], opts: &ScanOptions) -> ScanReport {
    let mut fields: Vec<&FieldSpec> = corpus.iter().collect();
    fields.sort_by(|a, b| (a.degree, &a.discriminant).cmp(&(b.degree, &b.discriminant)));
    let outcomes: Vec<Vec<Result<FieldRow, ScanFailure>>> = fields
        .par_iter()
        .map(|field| {
            (0..field.automorphisms.len())
                .map(|sigma| match least_frobenius_prime_with(field, sigma, opts) {
                    Ok(r) => Ok(FieldRow {
                        degree: field.degree,
                        disc: field.discriminant.to_string(),
                        sigma,
                        p: r.p,
                        exponents: r.exponents,
                        factor_degrees: r.factor_degrees,
                    }),
                    Err(e) => Err(ScanFailure {
                        degree: field.degree,
                        disc: field.discriminant.to_string(),
                        sigma,
                        error: e.to_string(),
                    }),
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in outcomes.into_iter().flatten() {
        match r {
            Ok(row) => rows.push(row),
            Err(f) => failures.push(f),
        }
    }
    let mut worst: Vec<WorstCase> = Vec::new();
    for row in &rows {
        for (shape, value) in
            [(Shape::A, row.exponents.a), (Shape::B, row.exponents.b), (Shape::C, row.exponents.c)]
        {
            let slot = worst.iter_mut().find(|w| w.degree == row.degree && w.shape == shape);
            let candidate = WorstCase {
                degree: row.degree,
                shape,
                value,
                disc: row.disc.clone(),
                sigma: row.sigma,
                p: row.p,
            };
            match slot {
                Some(w) if value > w.value => *w = candidate,
                Some(_) => {}
                None => worst.push(candidate),
            }
        }
    }
    ScanReport { worst, rows, failures }
}
