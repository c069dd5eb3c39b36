use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use signed_iwasawa_core::arith::{is_fundamental_discriminant, is_prime, kronecker, phi_prime_power};

use crate::error::{input, Result};

pub const CACHE_ENV: &str = "WORKBENCH_CACHE";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub p: u64,
    pub n_max: u32,
    pub precision: i64,
    pub trunc_degree: usize,
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
    /// Worker count; 0 lets the pool decide.
    #[serde(skip)]
    pub jobs: usize,
    /// Enforce that p splits in the imaginary quadratic field.
    pub strict_paper_hypotheses: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            p: 3,
            n_max: 8,
            precision: 20,
            trunc_degree: 6560,
            cache_dir: None,
            jobs: 0,
            strict_paper_hypotheses: false,
        }
    }
}

/// Sum of `phi(p^k)` for `k <= n_max`: the degree of the full interpolation modulus.
pub fn modulus_degree(p: u64, n_max: u32) -> usize {
    (1..=n_max).map(|k| phi_prime_power(p, k) as usize).sum()
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p < 3 || !is_prime(self.p) {
            return input(format!("p = {} must be an odd prime", self.p));
        }
        if self.n_max < 2 {
            return input("n_max must be at least 2");
        }
        if self.precision < 10 {
            return input("precision must be at least 10");
        }
        // u128 lifting needs p^(precision + levels) below 2^63
        let digits = self.precision as f64 + self.n_max as f64;
        if digits * (self.p as f64).log2() >= 63.0 {
            return input(format!("p^(precision + n_max) must stay below 2^63 (p = {}, precision = {})", self.p, self.precision));
        }
        let needed = modulus_degree(self.p, self.n_max);
        if self.trunc_degree < needed {
            return input(format!("trunc_degree must be at least {needed} for n_max = {}", self.n_max));
        }
        Ok(())
    }

    pub fn with_cache_from_env(mut self) -> Self {
        self.cache_dir = std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub discriminant: i64,
    /// Kronecker symbol (D / p).
    pub p_splitting: i32,
}

impl FieldSpec {
    pub fn new(discriminant: i64, p: u64, strict: bool) -> Result<Self> {
        if discriminant >= 0 || !is_fundamental_discriminant(discriminant) {
            return input(format!("{discriminant} is not the discriminant of an imaginary quadratic field"));
        }
        let p_splitting = kronecker(discriminant, p);
        if strict && p_splitting != 1 {
            return input(format!("p = {p} does not split in Q(sqrt {discriminant}) and strict hypotheses are on"));
        }
        Ok(Self { discriminant, p_splitting })
    }

    pub fn p_splits(&self) -> bool {
        self.p_splitting == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(modulus_degree(3, 8), 6560);
        let bad = RunConfig { trunc_degree: 100, ..RunConfig::default() };
        assert!(bad.validate().is_err());
        assert!(RunConfig { n_max: 1, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { p: 9, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { precision: 5, ..RunConfig::default() }.validate().is_err());
    }

    #[test]
    fn field_spec() {
        let f = FieldSpec::new(-43, 3, false).unwrap();
        assert!(!f.p_splits());
        assert!(FieldSpec::new(-43, 3, true).is_err());
        assert!(FieldSpec::new(-23, 3, true).unwrap().p_splits());
        assert!(FieldSpec::new(-12, 3, false).is_err());
        assert!(FieldSpec::new(5, 3, false).is_err());
    }
}
