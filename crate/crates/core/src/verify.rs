//! Self-checks of the entropy engine and the extremal-inequality verifier.
//!
//! Each property runs on seeded random instances and reports its worst
//! residual. A [`Fault`] swaps in a deliberately wrong formula so that the
//! harness itself can be shown to catch errors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::gaussian::{
    epi_lower_bound, markov_algebraic, markov_test, verify_extremal_inequality, CovMatrix, EntropyValue,
    ExtremalGrid, GaussianSystem, SystemBuilder,
};

/// Deliberately broken formulas for negative testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Gaussian entropy uses `πe` instead of `2πe` in the extremal check.
    Extremal,
    /// Markov criterion compares `E[NZ]` with `2E[Z²]`.
    Markov,
    /// Entropy power bound drops the factor 2 on the noise term.
    Epi,
    /// Chain rule forgets the conditioning.
    ChainRule,
}

impl Fault {
    pub const ALL: [Fault; 4] = [Fault::Extremal, Fault::Markov, Fault::Epi, Fault::ChainRule];

    pub fn name(self) -> &'static str {
        match self {
            Fault::Extremal => "extremal",
            Fault::Markov => "markov",
            Fault::Epi => "epi",
            Fault::ChainRule => "chain-rule",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Replaces the default tolerance of every residual check.
    pub tol: Option<f64>,
    pub fault: Option<Fault>,
    pub markov_cases: usize,
    pub random_cases: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            tol: None,
            fault: None,
            markov_cases: 1000,
            random_cases: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    /// Largest residual seen (or number of disagreements).
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub results: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.results
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.name.as_str())
            .collect()
    }
}

pub fn run_verifier_suite(cfg: &VerifyConfig) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let results = vec![
        extremal_property(cfg),
        markov_property(cfg, &mut rng),
        epi_property(cfg, &mut rng),
        chain_rule_property(cfg, &mut rng),
    ];
    VerifyReport {
        seed: cfg.seed,
        results,
    }
}

fn extremal_property(cfg: &VerifyConfig) -> PropertyResult {
    let grid = ExtremalGrid::default();
    // (powers, σ², λ offsets above the threshold)
    let cases: [(&[f64], f64, &[f64]); 5] = [
        (&[2.0], 1.0, &[0.0]),
        (&[0.3], 2.0, &[0.0]),
        (&[1.0, 1.0], 1.0, &[0.0, 0.0]),
        (&[3.0, 0.5], 0.7, &[0.0, 0.0]),
        (&[1.0, 4.0], 0.5, &[0.1, 0.0]),
    ];
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    for (k, (powers, s2, extra)) in cases.iter().enumerate() {
        let total: f64 = powers.iter().sum::<f64>() + s2;
        let lambdas: Vec<f64> = powers.iter().zip(*extra).map(|(p, e)| p / total + e).collect();
        match verify_extremal_inequality(powers, *s2, &lambdas, &grid) {
            Ok(rep) => {
                let expected: Vec<f64> = match cfg.fault {
                    Some(Fault::Extremal) => powers
                        .iter()
                        .map(|p| 0.5 * (std::f64::consts::PI * std::f64::consts::E * p).log2())
                        .collect(),
                    _ => rep.expected.clone(),
                };
                let dev = rep
                    .found
                    .iter()
                    .zip(&expected)
                    .fold(0.0_f64, |d, (a, b)| d.max((a - b).abs()));
                worst = worst.max(dev);
                let limit = cfg.tol.unwrap_or(0.0).max(rep.step * 1.000001);
                if !(rep.passed && dev <= limit) {
                    failed.push(k);
                }
            }
            Err(_) => failed.push(k),
        }
    }
    PropertyResult {
        name: "extremal-maximizer".into(),
        passed: failed.is_empty(),
        cases: cases.len(),
        worst,
        tolerance: grid.fine_step,
        detail: if failed.is_empty() {
            "grid maximizer within one refinement step of the Gaussian entropies".into()
        } else {
            format!("failing cases {failed:?}")
        },
    }
}

fn markov_system(p: f64, ezz: f64, enz: f64, enn: f64) -> Option<GaussianSystem<f64>> {
    let noise = CovMatrix::from_rows(&[vec![ezz, enz], vec![enz, enn]]).ok()?;
    let mut b = SystemBuilder::new();
    b.source("X", p).correlated_sources(&["Z", "N"], noise);
    b.combine("Y", &[("X", 1.0), ("Z", 1.0)]);
    b.combine("S", &[("X", 1.0), ("N", 1.0)]);
    b.build().ok()
}

fn markov_property(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> PropertyResult {
    let mut disagreements = 0usize;
    let mut built = 0usize;
    for i in 0..cfg.markov_cases {
        let p = rng.gen_range(0.1..10.0);
        let ezz = rng.gen_range(0.1..3.0);
        let (enz, enn) = if i % 2 == 0 {
            // chain holds by construction
            (ezz, ezz + rng.gen_range(0.0..3.0))
        } else {
            let enn: f64 = rng.gen_range(0.1..3.0);
            let bound = (ezz * enn).sqrt();
            (rng.gen_range(-bound..bound) * 0.999, enn)
        };
        let Some(sys) = markov_system(p, ezz, enz, enn) else {
            continue;
        };
        built += 1;
        let by_mi = markov_test(&sys, &["X"], &["Y"], &["S"]).unwrap_or(false);
        let by_algebra = match cfg.fault {
            Some(Fault::Markov) => markov_algebraic(enz, 2.0 * ezz),
            _ => markov_algebraic(enz, ezz),
        };
        if by_mi != by_algebra {
            disagreements += 1;
        }
    }
    PropertyResult {
        name: "markov-agreement".into(),
        passed: disagreements == 0 && built == cfg.markov_cases,
        cases: built,
        worst: disagreements as f64,
        tolerance: 0.0,
        detail: format!("{disagreements} of {built} systems disagree"),
    }
}

fn epi_property(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> PropertyResult {
    let tol = cfg.tol.unwrap_or(1e-12);
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.random_cases {
        let var: f64 = rng.gen_range(0.01..100.0);
        let s2: f64 = rng.gen_range(0.01..100.0);
        let mut b = SystemBuilder::new();
        b.source("X", var).source("Z", s2);
        b.combine("Y", &[("X", 1.0), ("Z", 1.0)]);
        let Ok(sys) = b.build() else {
            worst = f64::INFINITY;
            continue;
        };
        let hx = sys.differential_entropy(&["X"]).unwrap_or(EntropyValue::degenerate());
        let hy = sys.differential_entropy(&["Y"]).unwrap_or(EntropyValue::degenerate());
        let bound = match cfg.fault {
            Some(Fault::Epi) => {
                let tpe = std::f64::consts::TAU * std::f64::consts::E;
                0.5 * ((2.0 * hx.value).exp2() + 0.5 * tpe * s2).log2()
            }
            _ => epi_lower_bound(hx, s2).map(|e| e.value).unwrap_or(f64::NAN),
        };
        let r = (bound - hy.value).abs() / hy.value.abs().max(1.0);
        worst = if r.is_nan() { f64::INFINITY } else { worst.max(r) };
    }
    PropertyResult {
        name: "epi-gaussian-equality".into(),
        passed: worst <= tol,
        cases: cfg.random_cases,
        worst,
        tolerance: tol,
        detail: "h(X+Z) against the entropy power bound for Gaussian X".into(),
    }
}

fn random_system(rng: &mut ChaCha8Rng, n: usize) -> Option<GaussianSystem<f64>> {
    let a: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut cov = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = if i == j { 0.1 } else { 0.0 };
            for k in 0..n {
                s += a[i * n + k] * a[j * n + k];
            }
            cov[i * n + j] = s;
        }
    }
    let names = (0..n).map(|i| format!("V{i}")).collect();
    GaussianSystem::new(names, CovMatrix::new(n, cov).ok()?).ok()
}

fn chain_rule_property(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> PropertyResult {
    let tol = cfg.tol.unwrap_or(1e-9);
    let mut worst: f64 = 0.0;
    for i in 0..cfg.random_cases {
        let n = 3 + i % 4;
        let Some(sys) = random_system(rng, n) else {
            worst = f64::INFINITY;
            continue;
        };
        let names: Vec<String> = sys.names().to_vec();
        let split = 1 + i % (n - 2);
        let a: Vec<&str> = names[..split].iter().map(String::as_str).collect();
        let b: Vec<&str> = names[split..n - 1].iter().map(String::as_str).collect();
        let c: Vec<&str> = vec![names[n - 1].as_str()];
        let ab: Vec<&str> = a.iter().chain(&b).copied().collect();
        let bc: Vec<&str> = b.iter().chain(&c).copied().collect();
        let residual = (|| -> crate::Result<f64> {
            let h_ab = sys.differential_entropy(&ab)?.value;
            let h_a = sys.differential_entropy(&a)?.value;
            let h_b_a = match cfg.fault {
                Some(Fault::ChainRule) => sys.differential_entropy(&b)?.value,
                _ => sys.conditional_entropy(&b, &a)?.value,
            };
            let i_full = sys.mutual_information(&a, &bc)?;
            let i_b = sys.mutual_information(&a, &b)?;
            let i_c_b = sys.conditional_mutual_information(&a, &c, &b)?;
            Ok((h_ab - h_a - h_b_a).abs().max((i_full - i_b - i_c_b).abs()))
        })()
        .unwrap_or(f64::INFINITY);
        worst = worst.max(residual);
    }
    PropertyResult {
        name: "chain-rule".into(),
        passed: worst <= tol,
        cases: cfg.random_cases,
        worst,
        tolerance: tol,
        detail: "h(A,B) = h(A) + h(B|A) and I(A;B,C) = I(A;B) + I(A;C|B)".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig {
            markov_cases: 100,
            random_cases: 40,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn default_suite_passes() {
        let r = run_verifier_suite(&small());
        assert!(r.all_passed(), "{r:#?}");
    }

    #[test]
    fn every_fault_is_caught_by_name() {
        for f in Fault::ALL {
            let r = run_verifier_suite(&VerifyConfig {
                fault: Some(f),
                ..small()
            });
            let fails = r.failures();
            assert_eq!(fails.len(), 1, "{f:?}: {fails:?}");
            assert!(fails[0].contains(f.name().split('-').next().unwrap()), "{f:?}: {fails:?}");
        }
    }

    #[test]
    fn fault_names_round_trip() {
        for f in Fault::ALL {
            assert_eq!(Fault::parse(f.name()), Some(f));
        }
        assert_eq!(Fault::parse("nope"), None);
    }

    #[test]
    fn seeds_are_reproducible() {
        assert_eq!(run_verifier_suite(&small()), run_verifier_suite(&small()));
    }
}
