//! Degree classes (n₀, d₀) and the derived ℒ₀, 𝒬₀, Δ₀.

use std::f64::consts::LN_10;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("degree {0} is below 2")]
    Degree(u32),
    #[error("discriminant floor `{0}` is not a number >= 3")]
    Floor(String),
    #[error("degree {n0} violates the Minkowski bound at d0 = {d0}")]
    Minkowski { n0: u32, d0: String },
}

/// A degree class with its discriminant floor.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeProfile {
    n0: u32,
    d0_text: String,
    d0: f64,
}

impl DegreeProfile {
    /// Builds a profile from a decimal floor such as `"2.29e7"`.
    pub fn new(n0: u32, d0: &str) -> Result<Self, ProfileError> {
        if n0 < 2 {
            return Err(ProfileError::Degree(n0));
        }
        let value: f64 = d0.trim().parse().map_err(|_| ProfileError::Floor(d0.to_string()))?;
        if !(value >= 3.0) || !value.is_finite() {
            return Err(ProfileError::Floor(d0.to_string()));
        }
        let p = Self { n0, d0_text: d0.trim().to_string(), d0: value };
        if f64::from(n0) > 2.0 * p.l0() / 3f64.ln() {
            return Err(ProfileError::Minkowski { n0, d0: p.d0_text });
        }
        Ok(p)
    }

    /// Profile for degree `n` with the generic floor d₀ = 10ⁿ.
    pub fn large_degree(n: u32) -> Result<Self, ProfileError> {
        Self::new(n, &format!("1e{n}"))
    }

    pub fn n0(&self) -> u32 {
        self.n0
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn d0_text(&self) -> &str {
        &self.d0_text
    }

    /// ℒ₀ = log d₀.
    pub fn l0(&self) -> f64 {
        self.d0.ln()
    }

    /// 𝒬₀: an upper bound for n_L / log d_L across the class.
    pub fn q0(&self) -> f64 {
        if self.n0 <= 20 {
            f64::from(self.n0) / self.l0()
        } else {
            1.0 / LN_10
        }
    }

    /// Δ₀(T₀) = 𝒬₀ log(T₀ + 2).
    pub fn delta0(&self, t0: f64) -> f64 {
        delta0(t0, self)
    }

    pub fn minkowski_ok(&self) -> bool {
        f64::from(self.n0) <= 2.0 * self.l0() / 3f64.ln()
    }
}

/// Δ₀(T₀) = 𝒬₀ log(T₀ + 2); infinite for T₀ = ∞.
pub fn delta0(t0: f64, p: &DegreeProfile) -> f64 {
    p.q0() * (t0 + 2.0).ln()
}

const TABLE1_FLOORS: [&str; 20] = [
    "400000", "239", "320", "1609", "9747", "184607", "1257728", "2.29e7", "1.56e8", "3.91e9", "2.74e10",
    "7.56e11", "5.43e12", "1.61e14", "1.17e15", "3.70e16", "2.73e17", "9.03e18", "6.74e19", "1e21",
];

/// Floors used for the least-prime exponent; rows n₀ ≤ 8 are raised.
const LEAST_PRIME_FLOORS: [&str; 7] = ["1e10", "1e10", "1e8", "1e8", "1e8", "1e8", "1e7"];

/// The 20 profiles n₀ = 2..=21 used for the repulsion constants; n₀ = 21 stands for 21+.
pub fn builtin_profiles() -> Vec<DegreeProfile> {
    TABLE1_FLOORS
        .iter()
        .enumerate()
        .map(|(i, d0)| DegreeProfile::new(i as u32 + 2, d0).expect("built-in profile"))
        .collect()
}

/// The 20 profiles used for the least-prime exponent B.
pub fn least_prime_profiles() -> Vec<DegreeProfile> {
    TABLE1_FLOORS
        .iter()
        .enumerate()
        .map(|(i, d0)| {
            let floor = LEAST_PRIME_FLOORS.get(i).copied().unwrap_or(d0);
            DegreeProfile::new(i as u32 + 2, floor).expect("built-in profile")
        })
        .collect()
}

/// Looks up a built-in profile by degree; degrees above 21 get d₀ = 10ⁿ.
pub fn profile_for(n0: u32, table: &[DegreeProfile]) -> Result<DegreeProfile, ProfileError> {
    if n0 > 21 {
        return DegreeProfile::large_degree(n0);
    }
    table.iter().find(|p| p.n0() == n0).cloned().ok_or(ProfileError::Degree(n0))
}

/// CSV with columns n0, d0, L0, Q0.
pub fn profiles_csv(profiles: &[DegreeProfile]) -> String {
    let mut out = String::from("n0,d0,L0,Q0\n");
    for p in profiles {
        out.push_str(&format!("{},{},{},{}\n", p.n0(), p.d0_text(), p.l0(), p.q0()));
    }
    out
}
