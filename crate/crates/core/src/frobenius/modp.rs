//! Polynomials over a prime field and their complete factorization.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Coefficients low to high, no trailing zeros.
pub type Poly = Vec<u64>;

/// Default seed for equal-degree splitting.
pub const DEFAULT_SEED: u64 = 0x5eed;

fn trim(a: &mut Poly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

/// The field with p elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp {
    p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        assert!(p >= 2, "modulus must be prime");
        Self { p }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.p as u128) as u64
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.p - b)
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "zero has no inverse");
        self.pow(a, self.p - 2)
    }

    pub fn reduce_int(&self, c: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        let r = ((c % &m) + &m) % &m;
        r.try_into().expect("residue fits")
    }

    pub fn reduce(&self, f: &[BigInt]) -> Poly {
        let mut out: Poly = f.iter().map(|c| self.reduce_int(c)).collect();
        trim(&mut out);
        out
    }

    pub fn poly_add(&self, a: &[u64], b: &[u64]) -> Poly {
        let n = a.len().max(b.len());
        let mut out: Poly =
            (0..n).map(|i| self.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0))).collect();
        trim(&mut out);
        out
    }

    pub fn poly_sub(&self, a: &[u64], b: &[u64]) -> Poly {
        let n = a.len().max(b.len());
        let mut out: Poly =
            (0..n).map(|i| self.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0))).collect();
        trim(&mut out);
        out
    }

    pub fn poly_mul(&self, a: &[u64], b: &[u64]) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        trim(&mut out);
        out
    }

    pub fn scale(&self, a: &[u64], k: u64) -> Poly {
        let mut out: Poly = a.iter().map(|&c| self.mul(c, k)).collect();
        trim(&mut out);
        out
    }

    pub fn divrem(&self, a: &[u64], b: &[u64]) -> (Poly, Poly) {
        let db = degree(b).expect("division by zero polynomial");
        let inv = self.inv(b[db]);
        let mut r = a.to_vec();
        trim(&mut r);
        let mut q = vec![0u64; r.len().saturating_sub(db)];
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let k = self.mul(r[dr], inv);
            let shift = dr - db;
            q[shift] = k;
            for (i, &c) in b.iter().enumerate() {
                r[i + shift] = self.sub(r[i + shift], self.mul(k, c));
            }
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }

    pub fn rem(&self, a: &[u64], b: &[u64]) -> Poly {
        self.divrem(a, b).1
    }

    pub fn monic(&self, a: &[u64]) -> Poly {
        match degree(a) {
            None => Vec::new(),
            Some(d) => self.scale(a, self.inv(a[d])),
        }
    }

    pub fn gcd(&self, a: &[u64], b: &[u64]) -> Poly {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    pub fn derivative(&self, a: &[u64]) -> Poly {
        let mut out: Poly =
            a.iter().enumerate().skip(1).map(|(i, &c)| self.mul(c, i as u64 % self.p)).collect();
        trim(&mut out);
        out
    }

    pub fn mulmod(&self, a: &[u64], b: &[u64], m: &[u64]) -> Poly {
        self.rem(&self.poly_mul(a, b), m)
    }

    pub fn powmod(&self, base: &[u64], e: u64, m: &[u64]) -> Poly {
        let mut result = self.rem(&[1], m);
        let mut b = self.rem(base, m);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mulmod(&result, &b, m);
            }
            b = self.mulmod(&b, &b, m);
            e >>= 1;
        }
        result
    }

    pub fn powmod_big(&self, base: &[u64], e: &BigUint, m: &[u64]) -> Poly {
        let mut result = self.rem(&[1], m);
        let b = self.rem(base, m);
        for i in (0..e.bits()).rev() {
            result = self.mulmod(&result, &result, m);
            if e.bit(i) {
                result = self.mulmod(&result, &b, m);
            }
        }
        result
    }

    /// Square-free decomposition of a monic polynomial: (factor, multiplicity).
    pub fn squarefree(&self, f: &[u64]) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        if degree(f).is_none_or(|d| d == 0) {
            return out;
        }
        let mut c = self.gcd(f, &self.derivative(f));
        let mut w = self.divrem(f, &c).0;
        let mut i = 1;
        while degree(&w).is_some_and(|d| d > 0) {
            let y = self.gcd(&w, &c);
            let z = self.divrem(&w, &y).0;
            if degree(&z).is_some_and(|d| d > 0) {
                out.push((self.monic(&z), i));
            }
            i += 1;
            w = y;
            c = self.divrem(&c, &w).0;
        }
        if degree(&c).is_some_and(|d| d > 0) {
            // c is a p-th power; over the prime field its root takes every p-th coefficient.
            let root: Poly = c.iter().step_by(self.p as usize).copied().collect();
            for (g, m) in self.squarefree(&root) {
                out.push((g, m * self.p as u32));
            }
        }
        out
    }

    /// Distinct-degree factorization of a square-free monic polynomial.
    pub fn distinct_degree(&self, f: &[u64]) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        let mut f = self.monic(f);
        let x: Poly = vec![0, 1];
        let mut h = self.rem(&x, &f);
        let mut d = 0;
        while let Some(df) = degree(&f) {
            if df < 2 * (d + 1) {
                if df > 0 {
                    out.push((f.clone(), df));
                }
                break;
            }
            d += 1;
            h = self.powmod(&h, self.p, &f);
            let g = self.gcd(&self.poly_sub(&h, &x), &f);
            if degree(&g).is_some_and(|dg| dg > 0) {
                f = self.divrem(&f, &g).0;
                h = self.rem(&h, &f);
                out.push((g, d));
            }
        }
        out
    }

    fn random_poly<R: Rng>(&self, rng: &mut R, n: usize) -> Poly {
        let mut a: Poly = (0..n).map(|_| rng.gen_range(0..self.p)).collect();
        trim(&mut a);
        a
    }

    /// Splits a product of distinct degree-d irreducibles.
    pub fn equal_degree<R: Rng>(&self, g: &[u64], d: usize, rng: &mut R) -> Vec<Poly> {
        let n = degree(g).expect("nonzero");
        if n == d {
            return vec![self.monic(g)];
        }
        let exp = (BigUint::from(self.p).pow(d as u32) - BigUint::one()) >> 1;
        loop {
            let a = self.random_poly(rng, n);
            if degree(&a).is_none_or(|da| da == 0) {
                continue;
            }
            let b = if self.p == 2 {
                // trace map onto the prime field
                let mut t = a.clone();
                let mut s = a.clone();
                for _ in 1..d {
                    t = self.mulmod(&t, &t, g);
                    s = self.poly_add(&s, &t);
                }
                s
            } else {
                self.poly_sub(&self.powmod_big(&a, &exp, g), &[1])
            };
            let h = self.gcd(g, &b);
            if let Some(dh) = degree(&h) {
                if dh > 0 && dh < n {
                    let mut out = self.equal_degree(&h, d, rng);
                    out.extend(self.equal_degree(&self.divrem(g, &h).0, d, rng));
                    return out;
                }
            }
        }
    }

    /// Complete factorization into monic irreducibles with multiplicities, sorted.
    pub fn factor_with<R: Rng>(&self, f: &[u64], rng: &mut R) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        for (s, m) in self.squarefree(&self.monic(f)) {
            for (g, d) in self.distinct_degree(&s) {
                for h in self.equal_degree(&g, d, rng) {
                    out.push((h, m));
                }
            }
        }
        out.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
        out
    }
}

/// Factorization of an integer polynomial modulo the prime p.
pub fn factor_mod_p(f: &[BigInt], p: u64) -> Vec<(Poly, u32)> {
    factor_mod_p_seeded(f, p, DEFAULT_SEED)
}

pub fn factor_mod_p_seeded(f: &[BigInt], p: u64, seed: u64) -> Vec<(Poly, u32)> {
    let fp = Fp::new(p);
    let reduced = fp.reduce(f);
    if degree(&reduced).is_none_or(|d| d == 0) {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
    fp.factor_with(&reduced, &mut rng)
}

/// The degree multiset of a factorization, sorted.
pub fn cycle_type(factors: &[(Poly, u32)]) -> Vec<usize> {
    let mut v: Vec<usize> =
        factors.iter().flat_map(|(h, m)| std::iter::repeat_n(degree(h).unwrap_or(0), *m as usize)).collect();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::poly::from_i64;

    fn eval(fp: &Fp, f: &[u64], x: u64) -> u64 {
        f.iter().rev().fold(0, |acc, &c| fp.add(fp.mul(acc, x), c))
    }

    #[test]
    fn gaussian_examples() {
        let f = from_i64(&[1, 0, 1]);
        let five = factor_mod_p(&f, 5);
        assert_eq!(five, vec![(vec![2, 1], 1), (vec![3, 1], 1)]);
        let three = factor_mod_p(&f, 3);
        assert_eq!(three, vec![(vec![1, 0, 1], 1)]);
        let two = factor_mod_p(&f, 2);
        assert_eq!(two, vec![(vec![1, 1], 2)]);
    }

    #[test]
    fn cubic_against_root_count() {
        let f = from_i64(&[-1, -1, 0, 1]);
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61] {
            let fp = Fp::new(p);
            let red = fp.reduce(&f);
            let roots = (0..p).filter(|&x| eval(&fp, &red, x) == 0).count();
            let fac = factor_mod_p(&f, p);
            assert_eq!(cycle_type(&fac).iter().sum::<usize>(), 3);
            let linear = fac.iter().filter(|(h, _)| degree(h) == Some(1)).count();
            assert_eq!(linear, roots, "p = {p}");
        }
        // 59 splits completely: x³ − x − 1 has three roots there.
        assert_eq!(cycle_type(&factor_mod_p(&f, 59)), vec![1, 1, 1]);
    }

    #[test]
    fn product_reconstructs() {
        let f = from_i64(&[6, -5, 0, 3, 0, 0, 1, 1]);
        for p in [2u64, 3, 7, 101, 1_000_003] {
            let fp = Fp::new(p);
            let mut prod: Poly = vec![1];
            for (h, m) in factor_mod_p(&f, p) {
                for _ in 0..m {
                    prod = fp.poly_mul(&prod, &h);
                }
            }
            assert_eq!(prod, fp.monic(&fp.reduce(&f)), "p = {p}");
        }
    }

    #[test]
    fn repeated_and_pth_power_factors() {
        // (x+1)^2 (x^3+x+1) over F_2, and x^3 - 1 = (x-1)^3 over F_3
        let fp = Fp::new(2);
        let f = fp.poly_mul(&fp.poly_mul(&[1, 1], &[1, 1]), &[1, 1, 0, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fac = fp.factor_with(&f, &mut rng);
        assert_eq!(fac, vec![(vec![1, 1], 2), (vec![1, 1, 0, 1], 1)]);
        let f3 = from_i64(&[-1, 0, 0, 1]);
        assert_eq!(factor_mod_p(&f3, 3), vec![(vec![2, 1], 3)]);
    }

    #[test]
    fn seeds_do_not_change_result() {
        let f = from_i64(&[1, 0, 0, 0, 0, 0, 0, 0, 1]);
        for p in [17u64, 41, 97] {
            assert_eq!(factor_mod_p_seeded(&f, p, 1), factor_mod_p_seeded(&f, p, 99));
        }
        assert_eq!(cycle_type(&factor_mod_p(&f, 17)), vec![1; 8]);
    }
}
