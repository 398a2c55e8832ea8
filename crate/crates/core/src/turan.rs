//! Witness search for the refined Turán power-sum inequality.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TuranError {
    #[error("empty point set")]
    Empty,
    #[error("leading point is zero")]
    ZeroLeader,
    #[error("epsilon must be positive, got {0}")]
    Epsilon(f64),
    #[error("no witness index in [1, {limit}]")]
    NoWitness { limit: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSumInstance {
    zs: Vec<Complex64>,
    eps: f64,
}

impl PowerSumInstance {
    /// Sorts the points by non-increasing modulus and validates the leader.
    pub fn new(mut zs: Vec<Complex64>, eps: f64) -> Result<Self, TuranError> {
        if zs.is_empty() {
            return Err(TuranError::Empty);
        }
        if !(eps > 0.0) {
            return Err(TuranError::Epsilon(eps));
        }
        zs.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        if zs[0].norm() == 0.0 {
            return Err(TuranError::ZeroLeader);
        }
        Ok(Self { zs, eps })
    }

    pub fn zs(&self) -> &[Complex64] {
        &self.zs
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// M = Σ |z_n| / (|z₁| + |z_n|).
    pub fn m_value(&self) -> f64 {
        let r1 = self.zs[0].norm();
        self.zs.iter().map(|z| z.norm() / (r1 + z.norm())).sum()
    }

    /// Last index the inequality allows: ⌈(8+ε)M⌉.
    pub fn index_limit(&self) -> usize {
        ((8.0 + self.eps) * self.m_value()).ceil() as usize
    }

    /// Re s_j for j = 1..=n, with compensated summation.
    pub fn power_sums(&self, n: usize) -> Vec<f64> {
        let mut powers = self.zs.clone();
        let mut out = Vec::with_capacity(n);
        for j in 1..=n {
            if j > 1 {
                for (p, z) in powers.iter_mut().zip(&self.zs) {
                    *p *= z;
                }
            }
            let (mut sum, mut comp) = (0.0f64, 0.0f64);
            for p in &powers {
                let y = p.re - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            out.push(sum);
        }
        out
    }

    /// The threshold ε/(4(8+ε)) |z₁|^j.
    pub fn threshold(&self, j: usize) -> f64 {
        self.eps / (4.0 * (8.0 + self.eps)) * self.zs[0].norm().powi(j as i32)
    }

    /// Smallest j₀ ≤ ⌈(8+ε)M⌉ with Re s_{j₀} ≥ ε/(4(8+ε)) |z₁|^{j₀}.
    pub fn witness(&self) -> Result<(usize, f64), TuranError> {
        let limit = self.index_limit();
        let sums = self.power_sums(limit);
        sums.iter()
            .enumerate()
            .find(|(i, s)| **s >= self.threshold(i + 1))
            .map(|(i, s)| (i + 1, *s))
            .ok_or(TuranError::NoWitness { limit })
    }

    /// Every index in range meeting the threshold.
    pub fn witness_set(&self) -> Vec<usize> {
        let limit = self.index_limit();
        self.power_sums(limit)
            .iter()
            .enumerate()
            .filter(|(i, s)| **s >= self.threshold(i + 1))
            .map(|(i, _)| i + 1)
            .collect()
    }
}

pub fn m_value(inst: &PowerSumInstance) -> f64 {
    inst.m_value()
}

pub fn turan_witness(inst: &PowerSumInstance) -> Result<(usize, f64), TuranError> {
    inst.witness()
}

/// ε values exercised by the randomized trials.
pub const TRIAL_EPSILONS: [f64; 4] = [0.1, 1.0, 5.57, 5.97];

/// Random instance: |z₁| = 1, the rest in the closed unit disk.
pub fn random_instance<R: Rng>(rng: &mut R, size: usize, eps: f64) -> PowerSumInstance {
    let mut zs = Vec::with_capacity(size);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    zs.push(Complex64::from_polar(1.0, phase));
    for _ in 1..size {
        let r: f64 = match rng.gen_range(0..4) {
            0 => 1.0,
            1 => rng.gen::<f64>(),
            _ => rng.gen::<f64>().sqrt(),
        };
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        zs.push(Complex64::from_polar(r, phase));
    }
    PowerSumInstance::new(zs, eps).expect("leader has unit modulus")
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub failures: usize,
    pub max_j0: usize,
    pub max_ratio: f64,
}

/// Runs seeded random trials; sizes cycle through 1..=64.
pub fn run_trials(trials: usize, seed: u64) -> TrialSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = TrialSummary { trials, failures: 0, max_j0: 0, max_ratio: 0.0 };
    for k in 0..trials {
        let size = rng.gen_range(1..=64);
        let eps = TRIAL_EPSILONS[k % TRIAL_EPSILONS.len()];
        let inst = random_instance(&mut rng, size, eps);
        match inst.witness() {
            Ok((j0, _)) => {
                summary.max_j0 = summary.max_j0.max(j0);
                let ratio = j0 as f64 / ((8.0 + eps) * inst.m_value());
                summary.max_ratio = summary.max_ratio.max(ratio);
            }
            Err(_) => summary.failures += 1,
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn m_examples() {
        assert_eq!(PowerSumInstance::new(real(&[1.0]), 1.0).unwrap().m_value(), 0.5);
        assert_eq!(PowerSumInstance::new(real(&[1.0; 4]), 1.0).unwrap().m_value(), 2.0);
        let m = PowerSumInstance::new(real(&[0.5, 1.0]), 1.0).unwrap().m_value();
        assert!((m - (0.5 + 0.5 / 1.5)).abs() < 1e-15);
    }

    #[test]
    fn witness_examples() {
        let one = PowerSumInstance::new(real(&[1.0]), 1.0).unwrap();
        assert_eq!(one.witness().unwrap(), (1, 1.0));
        let pm = PowerSumInstance::new(real(&[1.0, -1.0]), 1.0).unwrap();
        assert_eq!(pm.witness().unwrap(), (2, 2.0));
    }

    #[test]
    fn invalid_instances() {
        assert_eq!(PowerSumInstance::new(vec![], 1.0), Err(TuranError::Empty));
        assert_eq!(PowerSumInstance::new(real(&[0.0]), 1.0), Err(TuranError::ZeroLeader));
        assert!(matches!(PowerSumInstance::new(real(&[1.0]), 0.0), Err(TuranError::Epsilon(_))));
    }

    #[test]
    fn sorted_on_construction() {
        let inst = PowerSumInstance::new(real(&[0.2, -0.9, 0.5]), 1.0).unwrap();
        assert_eq!(inst.zs()[0].re, -0.9);
    }

    #[test]
    fn random_32_point_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let inst = random_instance(&mut rng, 32, 0.5);
        let (j0, v) = inst.witness().unwrap();
        assert!(j0 <= (8.5 * inst.m_value()).ceil() as usize);
        assert!(v >= inst.threshold(j0));
        // exhaustive oracle: no smaller index qualifies
        let sums = inst.power_sums(j0);
        for j in 1..j0 {
            let direct: f64 = inst.zs().iter().map(|z| z.powu(j as u32).re).sum();
            assert!((direct - sums[j - 1]).abs() < 1e-9);
            assert!(direct < inst.threshold(j) + 1e-12);
        }
    }

    #[test]
    fn trials_are_deterministic() {
        assert_eq!(run_trials(200, 3), run_trials(200, 3));
        assert_eq!(run_trials(200, 3).failures, 0);
    }
}
