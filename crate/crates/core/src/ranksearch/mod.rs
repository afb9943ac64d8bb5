//! Numerical rank search, flattening lower bounds and the `2×2×2`
//! hyperdeterminant classifier.
//!
//! Failures of the optimizers are evidence only. Lower bounds come from
//! flattenings and, for three qubits, from the hyperdeterminant.

mod cp;
mod hyperdet;
mod symmetric;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::slocc::ProductDecomposition;
use crate::sympoly::SymmetricDecomposition;
use crate::tensors::{flattening_rank, SparseState};

pub use cp::cp_als;
pub use hyperdet::{hyperdet_222, Class222, HyperdetReport};
pub use symmetric::symmetric_als;

/// Largest dense tensor (or monomial basis) the searches will allocate.
pub const MAX_DENSE_ENTRIES: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlsConfig {
    pub rank: usize,
    pub restarts: usize,
    pub max_iters: usize,
    /// Relative residual counted as success.
    pub tol: f64,
    pub seed: u64,
    /// Relative ridge added to the normal equations.
    pub ridge: f64,
    /// Term norm above which a near fit is flagged as degenerate.
    pub norm_alarm: f64,
    /// Residual below which the norm alarm is consulted.
    pub degeneracy_residual: f64,
    /// Stop after the first restart that reaches `tol`.
    pub stop_at_first_success: bool,
}

impl AlsConfig {
    pub fn new(rank: usize) -> Self {
        AlsConfig {
            rank,
            restarts: 20,
            max_iters: 2000,
            tol: 1e-10,
            seed: 1,
            ridge: 1e-12,
            norm_alarm: 1e3,
            degeneracy_residual: 1e-3,
            stop_at_first_success: true,
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = self.rank > 0
            && self.restarts > 0
            && self.max_iters > 0
            && self.tol > 0.0
            && self.ridge >= 0.0
            && self.norm_alarm > 0.0
            && self.degeneracy_residual > 0.0;
        if positive {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid search configuration {self:?}")))
        }
    }

    fn is_degenerate(&self, residual: f64, max_term_norm: f64) -> bool {
        residual < self.degeneracy_residual && max_term_norm > self.norm_alarm
    }
}

/// What one restart ended with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub index: usize,
    pub residual: f64,
    /// Largest norm of a single rank-one term.
    pub max_term_norm: f64,
    pub iterations: usize,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Certificate {
    Product(ProductDecomposition),
    Symmetric(SymmetricDecomposition),
}

impl Certificate {
    pub fn len(&self) -> usize {
        match self {
            Certificate::Product(p) => p.len(),
            Certificate::Symmetric(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub config: AlsConfig,
    /// Relative Frobenius residual of the best restart.
    pub best_residual: f64,
    pub best_restart: usize,
    /// Present when `best_residual < tol`.
    pub certificate: Option<Certificate>,
    /// Set when any restart was flagged.
    pub degenerate: bool,
    /// Iterations summed over all restarts.
    pub iterations: usize,
    pub restarts: Vec<RestartRecord>,
}

impl SearchOutcome {
    fn from_restarts(config: &AlsConfig, restarts: Vec<RestartRecord>, certificate: Option<Certificate>) -> Self {
        let best = restarts
            .iter()
            .min_by(|a, b| a.residual.total_cmp(&b.residual).then(a.index.cmp(&b.index)))
            .expect("at least one restart");
        SearchOutcome {
            config: config.clone(),
            best_residual: best.residual,
            best_restart: best.index,
            certificate,
            degenerate: restarts.iter().any(|r| r.degenerate),
            iterations: restarts.iter().map(|r| r.iterations).sum(),
            restarts,
        }
    }

    pub fn succeeded(&self) -> bool {
        self.certificate.is_some()
    }
}

/// Restart `index` draws from its own ChaCha stream of `seed`.
fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Complex Gaussian with `E|z|² = 1`.
fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Largest flattening rank over all bipartitions, or over single-party cuts
/// once there are more than 12 parties.
pub fn flattening_bound_all(s: &SparseState) -> Result<usize> {
    let n = s.num_parties();
    if n < 2 {
        return Err(Error::InvalidArgument("flattenings need at least two parties".into()));
    }
    let cuts: Vec<Vec<usize>> = if n > 12 {
        (0..n).map(|p| vec![p]).collect()
    } else {
        // subsets containing party 0, excluding the full set
        (0..(1usize << (n - 1)) - 1)
            .map(|bits| {
                std::iter::once(0)
                    .chain((1..n).filter(|p| bits & (1 << (p - 1)) != 0))
                    .collect()
            })
            .collect()
    };
    cuts.iter()
        .map(|c| flattening_rank(s, c))
        .try_fold(0, |acc, r| Ok(acc.max(r?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slocc::matmul_tensor;
    use crate::wpower::{ghz_state, w_state};

    #[test]
    fn flattening_bounds() {
        assert_eq!(flattening_bound_all(&matmul_tensor(2).unwrap()).unwrap(), 4);
        assert_eq!(flattening_bound_all(&ghz_state(4, 3).unwrap()).unwrap(), 3);
        let product = SparseState::basis(vec![2, 3, 2], vec![1, 2, 0]).unwrap();
        assert_eq!(flattening_bound_all(&product).unwrap(), 1);
        assert_eq!(flattening_bound_all(&w_state(4).unwrap()).unwrap(), 2);
    }

    #[test]
    fn restart_streams_differ() {
        let a = complex_gaussian(&mut restart_rng(1, 0));
        let b = complex_gaussian(&mut restart_rng(1, 1));
        assert_ne!(a, b);
        assert_eq!(a, complex_gaussian(&mut restart_rng(1, 0)));
    }
}
