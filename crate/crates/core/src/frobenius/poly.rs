//! Dense integer polynomials (coefficients low to high) and the discriminant.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

pub type ZPoly = Vec<BigInt>;

pub fn trim(p: &mut ZPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Degree, or None for the zero polynomial.
pub fn degree(p: &[BigInt]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn from_i64(v: &[i64]) -> ZPoly {
    let mut p: ZPoly = v.iter().map(|&c| BigInt::from(c)).collect();
    trim(&mut p);
    p
}

pub fn derivative(p: &[BigInt]) -> ZPoly {
    let mut d: ZPoly = p.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    trim(&mut d);
    d
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn scale(a: &[BigInt], k: &BigInt) -> ZPoly {
    let mut out: ZPoly = a.iter().map(|c| c * k).collect();
    trim(&mut out);
    out
}

/// Remainder modulo a monic polynomial.
pub fn rem_monic(a: &[BigInt], m: &[BigInt]) -> ZPoly {
    let dm = degree(m).expect("nonzero modulus");
    debug_assert!(m[dm].is_one());
    let mut r = a.to_vec();
    trim(&mut r);
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let lead = r[dr].clone();
        let shift = dr - dm;
        for (i, c) in m.iter().enumerate() {
            r[i + shift] -= &lead * c;
        }
        trim(&mut r);
    }
    r
}

/// Pseudo-remainder: lc(b)^{deg a − deg b + 1} a mod b.
fn prem(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let db = degree(b).expect("nonzero divisor");
    let lb = b[db].clone();
    let mut r = a.to_vec();
    trim(&mut r);
    let mut steps = degree(&r).map_or(0, |d| d + 1).saturating_sub(db);
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let lead = r[dr].clone();
        let shift = dr - db;
        r = scale(&r, &lb);
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &lead * c;
        }
        trim(&mut r);
        steps -= 1;
    }
    if steps > 0 {
        r = scale(&r, &lb.pow(steps as u32));
    }
    r
}

fn content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Res(a, b) by the subresultant remainder sequence.
pub fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let (Some(mut da), Some(mut db)) = (degree(a), degree(b)) else {
        return BigInt::zero();
    };
    let (mut a, mut b) = (a[..=da].to_vec(), b[..=db].to_vec());
    let (ca, cb) = (content(&a), content(&b));
    a.iter_mut().for_each(|c| *c /= &ca);
    b.iter_mut().for_each(|c| *c /= &cb);
    let t = ca.pow(db as u32) * cb.pow(da as u32);
    let mut s = BigInt::one();
    if da < db {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut da, &mut db);
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
    }
    let (mut g, mut h) = (BigInt::one(), BigInt::one());
    loop {
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = prem(&a, &b);
        a = b;
        let div = &g * h.pow(delta as u32);
        b = r.iter().map(|c| c / &div).collect();
        g = a[degree(&a).unwrap()].clone();
        h = if delta == 0 { h } else { g.pow(delta as u32) / h.pow(delta as u32 - 1) };
        da = degree(&a).unwrap();
        match degree(&b) {
            None => return BigInt::zero(),
            Some(0) => {
                let lb = b[0].clone();
                let h = if da == 0 { h } else { lb.pow(da as u32) / h.pow(da as u32 - 1) };
                return s * t * h;
            }
            Some(d) => db = d,
        }
    }
}

/// disc(f) = (−1)^{n(n−1)/2} Res(f, f′) / lc(f).
pub fn poly_disc(f: &[BigInt]) -> BigInt {
    let n = degree(f).unwrap_or(0);
    if n == 0 {
        return BigInt::zero();
    }
    let r = resultant(f, &derivative(f)) / &f[n];
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

/// Σ fᵢ Gⁱ D^{n−i}, i.e. Dⁿ f(G/D), reduced modulo the monic f.
pub fn compose_scaled_rem(f: &[BigInt], g: &[BigInt], d: &BigInt) -> ZPoly {
    let n = degree(f).unwrap_or(0);
    let mut acc: ZPoly = Vec::new();
    let mut gpow: ZPoly = vec![BigInt::one()];
    for (i, fi) in f.iter().enumerate().take(n + 1) {
        if !fi.is_zero() {
            let term = scale(&gpow, &(fi * d.pow((n - i) as u32)));
            if acc.len() < term.len() {
                acc.resize(term.len(), BigInt::zero());
            }
            for (k, c) in term.into_iter().enumerate() {
                acc[k] += c;
            }
            trim(&mut acc);
        }
        gpow = rem_monic(&mul(&gpow, g), f);
    }
    rem_monic(&acc, f)
}

pub fn is_monic(f: &[BigInt]) -> bool {
    degree(f).is_some_and(|d| f[d].is_one())
}
