//! Levenberg–Marquardt search for `h = Σ_i ℓ_i^N` with complex forms.
//!
//! Weights are absorbed into the forms, which is possible over `ℂ`. The
//! residual is weighted by `1/√multinom`, so its norm is the Frobenius norm
//! of the symmetric tensor difference.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::{complex_gaussian, restart_rng, AlsConfig, Certificate, RestartRecord, SearchOutcome, MAX_DENSE_ENTRIES};
use crate::combinat::{binomial, compositions, multinomial};
use crate::error::{Error, Result};
use crate::sympoly::{expand, ExponentVector, HomogeneousPolynomial, LinearForm, SymmetricDecomposition};
use crate::tensors::Scalar;

const MU_INIT: f64 = 1e-3;
const MU_MAX: f64 = 1e15;
/// Initial weight of the `‖L‖²` penalty relative to `‖h‖² / (r d)`. The
/// penalty decays geometrically and keeps early iterates away from the
/// diverging near-fits that otherwise dominate.
const PENALTY_START: f64 = 1e-2;
const PENALTY_DECAY: f64 = 0.98;
const PENALTY_FLOOR: f64 = 1e-30;

struct Problem {
    degree: u32,
    vars: usize,
    /// Nonzero exponents of each basis monomial.
    support: Vec<Vec<(usize, u32)>>,
    mult: Vec<f64>,
    weight: Vec<f64>,
    target: DVector<Complex64>,
    /// Weighted target norm.
    norm: f64,
}

impl Problem {
    fn new(h: &HomogeneousPolynomial, rank: usize) -> Result<Self> {
        if h.is_zero() {
            return Err(Error::ZeroState);
        }
        let (degree, vars) = (h.degree(), h.num_vars());
        let count = binomial(vars as u32 + degree - 1, degree)
            .to_usize()
            .filter(|&m| m.saturating_mul(rank * vars) <= MAX_DENSE_ENTRIES)
            .ok_or_else(|| {
                Error::ResourceGuard(format!("degree {degree} in {vars} variables at rank {rank}"))
            })?;
        let basis = compositions(degree, vars);
        debug_assert_eq!(basis.len(), count);
        let mult: Vec<f64> = basis.iter().map(|e| multinomial(e).to_f64().unwrap_or(f64::MAX)).collect();
        let weight: Vec<f64> = mult.iter().map(|m| 1.0 / m.sqrt()).collect();
        let target = DVector::from_iterator(
            basis.len(),
            basis
                .iter()
                .zip(&weight)
                .map(|(e, w)| h.coeff(&ExponentVector::new(e.clone())).to_c64() * *w),
        );
        let support = basis
            .iter()
            .map(|e| e.iter().enumerate().filter(|(_, &x)| x > 0).map(|(k, &x)| (k, x)).collect())
            .collect();
        Ok(Problem {
            degree,
            vars,
            support,
            mult,
            weight,
            norm: target.norm(),
            target,
        })
    }

    /// Weighted residual `w ⊙ (f(L) − h)`.
    fn residual(&self, l: &DMatrix<Complex64>) -> DVector<Complex64> {
        let mut out = -self.target.clone();
        for (m, sup) in self.support.iter().enumerate() {
            let f: Complex64 = (0..l.nrows())
                .map(|i| sup.iter().map(|&(k, e)| l[(i, k)].powu(e)).product::<Complex64>())
                .sum();
            out[m] += f * self.mult[m] * self.weight[m];
        }
        out
    }

    fn jacobian(&self, l: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let (r, d) = (l.nrows(), self.vars);
        let mut j = DMatrix::zeros(self.support.len(), r * d);
        for (m, sup) in self.support.iter().enumerate() {
            let c = self.mult[m] * self.weight[m];
            for i in 0..r {
                for (pos, &(k, e)) in sup.iter().enumerate() {
                    let rest: Complex64 = sup
                        .iter()
                        .enumerate()
                        .filter(|&(q, _)| q != pos)
                        .map(|(_, &(k2, e2))| l[(i, k2)].powu(e2))
                        .product();
                    j[(m, i * d + k)] = l[(i, k)].powu(e - 1) * rest * (c * e as f64);
                }
            }
        }
        j
    }

    fn relative(&self, res: &DVector<Complex64>) -> f64 {
        res.norm() / self.norm
    }
}

fn max_term_norm(l: &DMatrix<Complex64>, degree: u32) -> f64 {
    l.row_iter().map(|row| row.norm().powi(degree as i32)).fold(0.0, f64::max)
}

fn run_restart(prob: &Problem, cfg: &AlsConfig, index: usize) -> (DMatrix<Complex64>, RestartRecord) {
    let mut rng = restart_rng(cfg.seed, index);
    let (r, d) = (cfg.rank, prob.vars);
    let scale = (prob.norm / (r as f64).sqrt()).powf(1.0 / prob.degree as f64) / (d as f64).sqrt();
    let mut l = DMatrix::from_fn(r, d, |_, _| complex_gaussian(&mut rng) * scale);
    let mut res = prob.residual(&l);
    let mut reg = PENALTY_START * prob.norm * prob.norm / (r * d) as f64;
    let penalized =
        |res: &DVector<Complex64>, l: &DMatrix<Complex64>, reg: f64| (res.norm_squared() + reg * l.norm_squared()).sqrt();
    let mut cost = penalized(&res, &l, reg);
    let mut mu = MU_INIT;
    let mut iterations = 0;
    while iterations < cfg.max_iters && prob.relative(&res) >= cfg.tol && mu <= MU_MAX {
        iterations += 1;
        let jac = prob.jacobian(&l);
        let mut a = jac.ad_mul(&jac);
        // row-major flattening of L, matching the Jacobian columns
        let g = jac.ad_mul(&res) + DVector::from_row_slice(l.transpose().as_slice()) * Complex64::new(reg, 0.0);
        let ridge = cfg.ridge * a.trace().re / a.nrows() as f64 + reg;
        for c in 0..a.nrows() {
            a[(c, c)] += ridge;
        }
        let before = l.clone();
        loop {
            let mut damped = a.clone();
            for c in 0..damped.nrows() {
                damped[(c, c)] += mu;
            }
            if let Some(ch) = Cholesky::new(damped) {
                let delta = -ch.solve(&g);
                let trial = &l + DMatrix::from_row_slice(r, d, delta.as_slice());
                let trial_res = prob.residual(&trial);
                let trial_cost = penalized(&trial_res, &trial, reg);
                if trial_cost < cost {
                    l = trial;
                    res = trial_res;
                    cost = trial_cost;
                    mu = (mu / 3.0).max(1e-15);
                    break;
                }
            }
            mu *= 4.0;
            if mu > MU_MAX {
                break;
            }
        }
        if iterations > 5 && mu <= MU_MAX {
            // ride the last step further while it keeps paying off
            let step = &l - &before;
            let mut beta = 1.0;
            while beta < 1e3 {
                let trial = &l + &step * Complex64::new(beta, 0.0);
                let trial_res = prob.residual(&trial);
                let trial_cost = penalized(&trial_res, &trial, reg);
                if trial_cost < cost {
                    l = trial;
                    res = trial_res;
                    cost = trial_cost;
                    beta *= 2.0;
                } else {
                    break;
                }
            }
        }
        reg *= PENALTY_DECAY;
        if reg < PENALTY_FLOOR {
            reg = 0.0;
        }
        cost = penalized(&res, &l, reg);
    }
    let residual = prob.relative(&res);
    let norm = max_term_norm(&l, prob.degree);
    let record = RestartRecord {
        index,
        residual,
        max_term_norm: norm,
        iterations,
        degenerate: cfg.is_degenerate(residual, norm),
    };
    (l, record)
}

/// Relative residual of `dec` against `h` in the symmetric tensor norm.
pub(crate) fn tensor_residual(dec: &SymmetricDecomposition, h: &HomogeneousPolynomial) -> Result<f64> {
    Ok(expand(dec).sub(h)?.tensor_norm() / h.tensor_norm())
}

/// Searches for `h` as a sum of `cfg.rank` powers of complex linear forms.
pub fn symmetric_als(h: &HomogeneousPolynomial, cfg: &AlsConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let prob = Problem::new(h, cfg.rank)?;
    let mut records = Vec::with_capacity(cfg.restarts);
    let mut best: Option<(f64, DMatrix<Complex64>)> = None;
    for index in 0..cfg.restarts {
        let (l, rec) = run_restart(&prob, cfg, index);
        let success = rec.residual < cfg.tol;
        if best.as_ref().is_none_or(|b| rec.residual < b.0) {
            best = Some((rec.residual, l));
        }
        records.push(rec);
        if success && cfg.stop_at_first_success {
            break;
        }
    }
    let (best_residual, forms) = best.expect("at least one restart");
    let cert = if best_residual < cfg.tol {
        let mut dec = SymmetricDecomposition::new(prob.degree, prob.vars);
        for row in forms.row_iter() {
            let form = LinearForm::new(row.iter().map(|z| Scalar::from_c64(*z)).collect());
            if !form.is_zero() {
                dec.push(Scalar::one(), form)?;
            }
        }
        let check = tensor_residual(&dec, h)?;
        if check > best_residual * (1.0 + 1e-6) + 1e-14 {
            return Err(Error::Verification {
                what: "symmetric search certificate".into(),
                residual: check,
            });
        }
        Some(Certificate::Symmetric(dec))
    } else {
        None
    };
    Ok(SearchOutcome::from_restarts(cfg, records, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wpower::wpower_expansion;

    #[test]
    fn pure_power() {
        let h = HomogeneousPolynomial::monomial(ExponentVector::power(3, 0, 4));
        let out = symmetric_als(&h, &AlsConfig::new(1)).unwrap();
        assert!(out.best_residual < 1e-10, "{}", out.best_residual);
        let Some(Certificate::Symmetric(dec)) = out.certificate else { panic!("no certificate") };
        assert_eq!(dec.len(), 1);
        let c = dec.terms[0].form.coeffs();
        assert!(c[1].abs() < 1e-6 && c[2].abs() < 1e-6);
    }

    #[test]
    fn w3_squared_rank_seven() {
        let h = wpower_expansion(3, 2).unwrap().polynomial().unwrap();
        let mut cfg = AlsConfig::new(7);
        cfg.tol = 1e-8;
        let out = symmetric_als(&h, &cfg).unwrap();
        assert!(out.best_residual < 1e-8, "{:?}", out.restarts);
        let Some(Certificate::Symmetric(dec)) = out.certificate else { panic!("no certificate") };
        assert!(tensor_residual(&dec, &h).unwrap() < 1e-8);
    }
}
