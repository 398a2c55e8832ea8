//! Number-field inputs: defining polynomial, discriminant and automorphisms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::poly::{compose_scaled_rem, degree, is_monic, poly_disc, trim, ZPoly};
use super::FrobeniusError;

/// An automorphism x ↦ G(x)/D with integer G and D > 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Automorphism {
    #[serde(serialize_with = "ser_poly")]
    pub num: ZPoly,
    #[serde(serialize_with = "ser_int")]
    pub den: BigInt,
}

fn ser_poly<S: serde::Serializer>(p: &ZPoly, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(p.iter().map(|c| c.to_string()))
}

fn ser_int<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl Automorphism {
    pub fn identity() -> Self {
        Self { num: vec![BigInt::zero(), BigInt::one()], den: BigInt::one() }
    }

    /// From rational coefficients, clearing to a common denominator.
    pub fn from_rationals(coeffs: &[BigRational]) -> Self {
        let den = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let mut num: ZPoly = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        trim(&mut num);
        Self { num, den }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSpec {
    pub degree: usize,
    #[serde(serialize_with = "ser_poly")]
    pub f: ZPoly,
    /// Field discriminant d_L.
    #[serde(serialize_with = "ser_int")]
    pub discriminant: BigInt,
    /// Discriminant of f, computed.
    #[serde(serialize_with = "ser_int")]
    pub poly_discriminant: BigInt,
    pub automorphisms: Vec<Automorphism>,
}

impl FieldSpec {
    /// Validates degree, monicity, |d_L| ≥ 3, squarefreeness and that each g permutes the roots.
    pub fn new(
        f: ZPoly,
        discriminant: BigInt,
        automorphisms: Vec<Automorphism>,
    ) -> Result<Self, FrobeniusError> {
        let mut f = f;
        trim(&mut f);
        let deg = degree(&f).unwrap_or(0);
        if deg < 2 {
            return Err(FrobeniusError::InvalidField(format!("degree {deg} is below 2")));
        }
        if !is_monic(&f) {
            return Err(FrobeniusError::InvalidField("polynomial is not monic".into()));
        }
        if discriminant.abs() < BigInt::from(3) {
            return Err(FrobeniusError::InvalidField(format!("|discriminant| = {} < 3", discriminant.abs())));
        }
        let pd = poly_disc(&f);
        if pd.is_zero() {
            return Err(FrobeniusError::InvalidField("polynomial has a repeated root".into()));
        }
        if !(&pd % &discriminant).is_zero() {
            return Err(FrobeniusError::InvalidField(format!(
                "field discriminant {discriminant} does not divide disc(f) = {pd}"
            )));
        }
        for (i, g) in automorphisms.iter().enumerate() {
            if !g.den.is_positive() {
                return Err(FrobeniusError::InvalidField(format!(
                    "automorphism {i}: denominator must be positive"
                )));
            }
            if !compose_scaled_rem(&f, &g.num, &g.den).is_empty() {
                return Err(FrobeniusError::InvalidField(format!(
                    "automorphism {i} does not permute the roots"
                )));
            }
        }
        Ok(Self { degree: deg, f, discriminant, poly_discriminant: pd, automorphisms })
    }

    /// log |d_L|.
    pub fn log_disc(&self) -> f64 {
        log_abs(&self.discriminant)
    }
}

/// log |x| for a big integer, exact enough for any size.
pub fn log_abs(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        let v: f64 = x.abs().to_string().parse().expect("decimal");
        return v.ln();
    }
    let shift = bits - 64;
    let top: f64 = (x.abs() >> shift).to_string().parse().expect("decimal");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator `{n}`"))?;
            let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator `{d}`"))?;
            if d.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| format!("bad coefficient `{s}`"))?;
            Ok(BigRational::from_integer(n))
        }
    }
}

fn parse_line(line: &str) -> Result<FieldSpec, String> {
    let parts: Vec<&str> = line.split(':').collect();
    if parts.len() != 4 {
        return Err(format!("expected 4 ':'-separated fields, found {}", parts.len()));
    }
    let degree: usize = parts[0].trim().parse().map_err(|_| format!("bad degree `{}`", parts[0].trim()))?;
    let disc: BigInt =
        parts[1].trim().parse().map_err(|_| format!("bad discriminant `{}`", parts[1].trim()))?;
    let f: ZPoly = parts[2]
        .split(',')
        .map(|c| c.trim().parse::<BigInt>().map_err(|_| format!("bad coefficient `{}`", c.trim())))
        .collect::<Result<_, _>>()?;
    if f.len() != degree + 1 {
        return Err(format!("degree {degree} needs {} coefficients, found {}", degree + 1, f.len()));
    }
    let mut autos = Vec::new();
    for g in parts[3].split(';').map(str::trim).filter(|g| !g.is_empty()) {
        let coeffs: Vec<BigRational> = g.split(',').map(parse_rational).collect::<Result<_, _>>()?;
        autos.push(Automorphism::from_rationals(&coeffs));
    }
    if autos.is_empty() {
        return Err("no automorphisms listed".into());
    }
    FieldSpec::new(f, disc, autos).map_err(|e| e.to_string())
}

/// Parses a corpus: `degree : discriminant : c0,c1,…,1 : g1 ; g2 ; …`, '#' comments.
pub fn parse_corpus(text: &str) -> Result<Vec<FieldSpec>, FrobeniusError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_line(line).map_err(|msg| FrobeniusError::Parse { line: i + 1, msg })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::poly::from_i64;

    #[test]
    fn parses_gaussian_and_cubic() {
        let text =
            "# fields\n2 : -4 : 1,0,1 : 0,1 ; 0,-1\n3 : 81 : 1,-3,0,1 : 0,1 ; -2,0,1 ; 2,-1,-1  # cyclic\n";
        let c = parse_corpus(text).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].poly_discriminant, BigInt::from(-4));
        assert!(c[0].automorphisms[0].is_identity());
        assert_eq!(c[1].automorphisms.len(), 3);
    }

    #[test]
    fn rational_automorphism() {
        // x² − 5 with root r and automorphism −r, written as (−2x)/2.
        let text = "2 : 5 : -5,0,1 : 0,1 ; 0,-2/2\n";
        let c = parse_corpus(text).unwrap();
        assert_eq!(c[0].automorphisms[1].den, BigInt::one());
        // 1/2 − x/3 clears to (3 − 2x)/6
        let g = Automorphism::from_rationals(&[
            BigRational::new(1.into(), 2.into()),
            BigRational::new((-1).into(), 3.into()),
        ]);
        assert_eq!(g.den, BigInt::from(6));
        assert_eq!(g.num, from_i64(&[3, -2]));
    }

    #[test]
    fn rejects_bad_lines() {
        let err = parse_corpus("2 : -4 : 1,0,1 : 0,1\n2 : -4 : 1,0,1 : 1,1\n").unwrap_err();
        assert!(matches!(err, FrobeniusError::Parse { line: 2, .. }));
        assert!(parse_corpus("2 : -4 : 1,0,2 : 0,1\n").is_err());
        assert!(parse_corpus("2 : 1 : 1,0,1 : 0,1\n").is_err());
        assert!(parse_corpus("2 : -4 : 1,0 : 0,1\n").is_err());
        assert!(parse_corpus("2 : -4 : 1,0,1\n").is_err());
        assert!(parse_corpus("2 : -7 : 1,0,1 : 0,1\n").is_err());
    }

    #[test]
    fn log_abs_large() {
        let x = BigInt::from(10).pow(400);
        assert!((log_abs(&x) - 400.0 * 10f64.ln()).abs() < 1e-9);
        assert!((log_abs(&BigInt::from(-3)) - 3f64.ln()).abs() < 1e-15);
    }
}
