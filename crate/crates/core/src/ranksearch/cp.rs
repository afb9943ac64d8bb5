use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{complex_gaussian, restart_rng, AlsConfig, Certificate, RestartRecord, SearchOutcome, MAX_DENSE_ENTRIES};
use crate::error::{Error, Result};
use crate::slocc::ProductDecomposition;
use crate::tensors::{Scalar, SparseState};

type Factors = Vec<DMatrix<Complex64>>;

struct Problem {
    dims: Vec<usize>,
    /// Row-major dense target.
    dense: Vec<Complex64>,
    /// Nonzero entries of the target.
    entries: Vec<(Vec<usize>, Complex64)>,
    norm: f64,
}

impl Problem {
    fn new(s: &SparseState) -> Result<Self> {
        if s.is_zero() {
            return Err(Error::ZeroState);
        }
        let dims = s.local_dims().to_vec();
        let size = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&n| n <= MAX_DENSE_ENTRIES)
            .ok_or_else(|| Error::ResourceGuard(format!("dense tensor with dims {dims:?}")))?;
        let mut dense = vec![Complex64::new(0.0, 0.0); size];
        let entries: Vec<(Vec<usize>, Complex64)> = s.iter().map(|(k, v)| (k.clone(), v.to_c64())).collect();
        for (k, v) in &entries {
            dense[flat(k, &dims)] = *v;
        }
        Ok(Problem {
            norm: s.norm(),
            dims,
            dense,
            entries,
        })
    }

    fn residual(&self, u: &Factors) -> f64 {
        let r = u[0].ncols();
        let mut idx = vec![0; self.dims.len()];
        let mut err = 0.0;
        for t in &self.dense {
            let model: Complex64 = (0..r)
                .map(|c| idx.iter().zip(u).map(|(&i, f)| f[(i, c)]).product::<Complex64>())
                .sum();
            err += (model - t).norm_sqr();
            increment(&mut idx, &self.dims);
        }
        err.sqrt() / self.norm
    }

    /// Least-squares update of factor `p` with the others fixed.
    fn update(&self, u: &mut Factors, p: usize, ridge: f64) -> bool {
        let r = u[0].ncols();
        let mut h = DMatrix::from_element(r, r, Complex64::new(1.0, 0.0));
        for (q, f) in u.iter().enumerate() {
            if q != p {
                h.component_mul_assign(&(f.adjoint() * f));
            }
        }
        let mut m = DMatrix::zeros(self.dims[p], r);
        for (k, v) in &self.entries {
            for c in 0..r {
                let w: Complex64 = u
                    .iter()
                    .enumerate()
                    .filter(|&(q, _)| q != p)
                    .map(|(q, f)| f[(k[q], c)].conj())
                    .product();
                m[(k[p], c)] += v * w;
            }
        }
        let shift = ridge * h.trace().re / r as f64;
        for c in 0..r {
            h[(c, c)] += shift;
        }
        match h.lu().solve(&m.transpose()) {
            Some(x) if x.iter().all(|z| z.is_finite()) => {
                u[p] = x.transpose();
                true
            }
            _ => false,
        }
    }
}

fn flat(k: &[usize], dims: &[usize]) -> usize {
    k.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

fn increment(idx: &mut [usize], dims: &[usize]) {
    for (i, &d) in idx.iter_mut().zip(dims).rev() {
        *i += 1;
        if *i < d {
            return;
        }
        *i = 0;
    }
}

/// Rescales every rank-one term so that its factors share its norm equally.
/// Returns the largest term norm.
fn balance(u: &mut Factors) -> f64 {
    let n = u.len() as f64;
    let r = u[0].ncols();
    let mut max_norm: f64 = 0.0;
    for c in 0..r {
        let norms: Vec<f64> = u.iter().map(|f| f.column(c).norm()).collect();
        let lambda: f64 = norms.iter().product();
        max_norm = max_norm.max(lambda);
        if lambda == 0.0 || !lambda.is_finite() {
            continue;
        }
        let target = lambda.powf(1.0 / n);
        for (f, nf) in u.iter_mut().zip(&norms) {
            let scale = target / nf;
            f.column_mut(c).scale_mut(scale);
        }
    }
    max_norm
}

fn term_norms_max(u: &Factors) -> f64 {
    (0..u[0].ncols())
        .map(|c| u.iter().map(|f| f.column(c).norm()).product::<f64>())
        .fold(0.0, f64::max)
}

fn run_restart(prob: &Problem, cfg: &AlsConfig, index: usize) -> (Factors, RestartRecord) {
    let mut rng = restart_rng(cfg.seed, index);
    let n = prob.dims.len();
    let r = cfg.rank;
    let scale = (prob.norm / (r as f64).sqrt()).powf(1.0 / n as f64);
    let mut u: Factors = prob
        .dims
        .iter()
        .map(|&d| DMatrix::from_fn(d, r, |_, _| complex_gaussian(&mut rng) * (scale / (d as f64).sqrt())))
        .collect();
    let mut residual = prob.residual(&u);
    let mut iterations = 0;
    while iterations < cfg.max_iters && residual >= cfg.tol {
        iterations += 1;
        let before = u.clone();
        if !(0..n).all(|p| prob.update(&mut u, p, cfg.ridge)) {
            u = before;
            break;
        }
        balance(&mut u);
        residual = prob.residual(&u);
        if iterations > 2 {
            // move further along the last sweep while that keeps helping
            let step: Factors = u.iter().zip(&before).map(|(a, b)| a - b).collect();
            let mut beta = 1.0;
            let mut best: Option<(Factors, f64)> = None;
            while beta < 1e6 {
                let trial: Factors = u.iter().zip(&step).map(|(a, d)| a + d * Complex64::new(beta, 0.0)).collect();
                let rt = prob.residual(&trial);
                if rt < best.as_ref().map_or(residual, |b| b.1) {
                    best = Some((trial, rt));
                    beta *= 2.0;
                } else {
                    break;
                }
            }
            if let Some((trial, rt)) = best {
                u = trial;
                balance(&mut u);
                residual = rt;
            }
        }
    }
    let max_term_norm = term_norms_max(&u);
    let record = RestartRecord {
        index,
        residual,
        max_term_norm,
        iterations,
        degenerate: cfg.is_degenerate(residual, max_term_norm),
    };
    (u, record)
}

fn certificate(u: &Factors, dims: &[usize]) -> Result<ProductDecomposition> {
    let mut cert = ProductDecomposition::new(dims.to_vec());
    for c in 0..u[0].ncols() {
        let vectors: Vec<Vec<Scalar>> = u
            .iter()
            .map(|f| f.column(c).iter().map(|z| Scalar::from_c64(*z)).collect())
            .collect();
        if vectors.iter().any(|v| v.iter().all(Scalar::is_zero)) {
            continue;
        }
        cert.push(Scalar::one(), vectors)?;
    }
    Ok(cert)
}

/// Alternating least squares for a rank-`r` CP decomposition with complex
/// factors. Restarts run in order; the best one is reported.
pub fn cp_als(s: &SparseState, cfg: &AlsConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let prob = Problem::new(s)?;
    let mut records = Vec::with_capacity(cfg.restarts);
    let mut best: Option<(f64, Factors)> = None;
    for index in 0..cfg.restarts {
        let (u, rec) = run_restart(&prob, cfg, index);
        let success = rec.residual < cfg.tol;
        if best.as_ref().is_none_or(|b| rec.residual < b.0) {
            best = Some((rec.residual, u));
        }
        records.push(rec);
        if success && cfg.stop_at_first_success {
            break;
        }
    }
    let (best_residual, factors) = best.expect("at least one restart");
    let cert = if best_residual < cfg.tol {
        let cert = certificate(&factors, &prob.dims)?;
        let check = cert.residual(s)?;
        if check > best_residual * (1.0 + 1e-6) + 1e-14 {
            return Err(Error::Verification {
                what: "CP search certificate".into(),
                residual: check,
            });
        }
        Some(Certificate::Product(cert))
    } else {
        None
    };
    Ok(SearchOutcome::from_restarts(cfg, records, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wpower::{ghz_state, w_state};

    #[test]
    fn ghz_rank_two() {
        let s = ghz_state(3, 2).unwrap();
        let out = cp_als(&s, &AlsConfig::new(2)).unwrap();
        assert!(out.best_residual < 1e-10);
        match out.certificate.unwrap() {
            Certificate::Product(p) => {
                assert_eq!(p.len(), 2);
                assert!(p.residual(&s).unwrap() < 1e-10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn w3_rank_three_not_two() {
        let s = w_state(3).unwrap();
        assert!(cp_als(&s, &AlsConfig::new(3)).unwrap().best_residual < 1e-10);
        let mut cfg = AlsConfig::new(2);
        cfg.restarts = 3;
        let two = cp_als(&s, &cfg).unwrap();
        assert!(two.certificate.is_none());
        assert_eq!(two.restarts.len(), 3);
    }

    #[test]
    fn deterministic() {
        let s = w_state(3).unwrap();
        let mut cfg = AlsConfig::new(2);
        cfg.restarts = 2;
        cfg.max_iters = 50;
        assert_eq!(cp_als(&s, &cfg).unwrap(), cp_als(&s, &cfg).unwrap());
    }

    #[test]
    fn rejects_zero_and_bad_config() {
        let z = SparseState::zero(vec![2, 2]).unwrap();
        assert!(matches!(cp_als(&z, &AlsConfig::new(1)), Err(Error::ZeroState)));
        let mut cfg = AlsConfig::new(1);
        cfg.rank = 0;
        assert!(cp_als(&w_state(3).unwrap(), &cfg).is_err());
    }
}
