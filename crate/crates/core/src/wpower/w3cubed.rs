//! Reduction of `h(W_3^{⊗3})` to four cubic pieces in three variables each.
//!
//! With `y_1 = x_1+x_2−x_4`, `y_2 = x_1−x_2+x_4`, `y_4 = −x_1+x_2+x_4` and
//! `z_3 = (x_3+x_5)/2`, `z_5 = (x_3+x_6)/2`, `z_6 = (x_5+x_6)/2`:
//!
//! * `x_0 (y_1 z_6 + y_2 z_5 + y_4 z_3) = x_0 (x_1 x_6 + x_2 x_5 + x_3 x_4)`,
//! * `(y_1+y_2+y_4)^3 − y_1^3 − y_2^3 − y_4^3 = 24 x_1 x_2 x_4`.
//!
//! The second identity weights the last monomial 24 times more than the
//! first one does the other three, so the variables `x_3, x_5, x_6` are
//! rescaled by `1/24` before comparing: `λ h'(D x) = Σ pieces` with
//! `h' = h/6`, `λ = 24` and `c = 12`.

use super::{wpower_expansion, FLOAT_CERT_TOL};
use crate::error::{Error, Result};
use crate::sympoly::{
    binary_monomial_decompose, ExponentVector, HomogeneousPolynomial, LinearForm, SymmetricDecomposition,
};
use crate::tensors::{Matrix, Scalar};

const VARS: usize = 8;
const RESCALED: [usize; 3] = [3, 5, 6];

fn q(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

fn form(coeffs: &[(usize, Scalar)]) -> LinearForm {
    let mut c = vec![Scalar::zero(); VARS];
    for (i, v) in coeffs {
        c[*i] = v.clone();
    }
    LinearForm::new(c)
}

/// A piece `normal_form(images[0], images[1], images[2])`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicPiece {
    pub name: String,
    /// Cubic in three variables.
    pub normal_form: HomogeneousPolynomial,
    /// What the three variables stand for, as forms in `x_0..x_7`.
    pub images: Vec<LinearForm>,
}

impl CubicPiece {
    pub fn polynomial(&self) -> Result<HomogeneousPolynomial> {
        self.normal_form.substitute(&self.images)
    }

    /// Exact four-term decomposition of the normal form.
    pub fn exact_decomposition(&self) -> Result<SymmetricDecomposition> {
        let m = |e: [u32; 3]| self.normal_form.coeff(&ExponentVector::new(e.to_vec()));
        let mut dec = SymmetricDecomposition::new(3, 3);
        if m([1, 1, 1]) == Scalar::one() && m([0, 3, 0]) == Scalar::int(-1) && self.normal_form.num_terms() == 2 {
            // a b c − b^3
            for (w, f) in [
                (q(1, 48), [1, 2, 1]),
                (q(-1, 48), [1, -2, 1]),
                (q(-1, 96), [1, 4, -1]),
                (q(1, 96), [1, -4, -1]),
            ] {
                dec.push(w, LinearForm::from_ints(&f))?;
            }
        } else if m([3, 0, 0]) == Scalar::one() && self.normal_form.num_terms() == 2 {
            // u^3 + c a^2 b
            let c = m([0, 2, 1]);
            dec.push(Scalar::one(), LinearForm::from_ints(&[1, 0, 0]))?;
            let bin = binary_monomial_decompose(2, 1)?.lift(3, &[1, 2]).scaled(&c);
            dec.extend(bin)?;
        } else {
            return Err(Error::InvalidArgument(format!("no closed form for piece {}", self.name)));
        }
        dec.verify(&self.normal_form, 0.0)?;
        Ok(dec)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct W3CubedReduction {
    /// `h(W_3^{⊗3})`.
    pub target: HomogeneousPolynomial,
    pub lambda: Scalar,
    pub c: Scalar,
    /// Diagonal of `D`.
    pub rescale: Vec<Scalar>,
    /// `(name, form)` for `y_1, y_2, y_4, z_3, z_5, z_6`.
    pub substitutions: Vec<(String, LinearForm)>,
    pub pieces: Vec<CubicPiece>,
}

impl W3CubedReduction {
    /// `λ · (h/6)(D x)`.
    pub fn scaled_target(&self) -> Result<HomogeneousPolynomial> {
        let images: Vec<LinearForm> = (0..VARS)
            .map(|i| form(&[(i, self.rescale[i].clone())]))
            .collect();
        Ok(self.target.substitute(&images)?.scaled(&(&self.lambda / &Scalar::int(6))))
    }

    pub fn pieces_sum(&self) -> Result<HomogeneousPolynomial> {
        let mut sum = HomogeneousPolynomial::zero(3, VARS);
        for p in &self.pieces {
            sum = sum.add(&p.polynomial()?)?;
        }
        Ok(sum)
    }

    /// True when `λ h'(D x)` equals the sum of the pieces exactly.
    pub fn identity_holds(&self) -> Result<bool> {
        Ok(self.scaled_target()? == self.pieces_sum()?)
    }

    /// The change of variables `x ↦ (x_0, y_1, y_2, z_3, y_4, z_5, z_6, x_7)`
    /// as a matrix whose row `i` is the new variable in slot `i`.
    pub fn substitution_matrix(&self) -> Result<Matrix> {
        let mut rows: Vec<Vec<Scalar>> = (0..VARS).map(|i| form(&[(i, Scalar::one())]).0).collect();
        for (name, f) in &self.substitutions {
            let slot: usize = name[1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad substitution name {name}")))?;
            rows[slot] = f.coeffs().to_vec();
        }
        Matrix::from_rows(rows)
    }
}

pub fn w3_cubed_reduction() -> Result<W3CubedReduction> {
    let target = wpower_expansion(3, 3)?.polynomial()?;
    let one = Scalar::one;
    let m1 = || Scalar::int(-1);
    let y1 = form(&[(1, one()), (2, one()), (4, m1())]);
    let y2 = form(&[(1, one()), (2, m1()), (4, one())]);
    let y4 = form(&[(1, m1()), (2, one()), (4, one())]);
    let z3 = form(&[(3, q(1, 2)), (5, q(1, 2))]);
    let z5 = form(&[(3, q(1, 2)), (6, q(1, 2))]);
    let z6 = form(&[(5, q(1, 2)), (6, q(1, 2))]);
    let x0 = form(&[(0, one())]);
    let x7 = form(&[(7, one())]);
    let c = Scalar::int(12);

    let abc_minus_b3 = HomogeneousPolynomial::from_terms(
        3,
        3,
        [
            (ExponentVector::new(vec![1, 1, 1]), one()),
            (ExponentVector::new(vec![0, 3, 0]), m1()),
        ],
    )?;
    let cube_plus = HomogeneousPolynomial::from_terms(
        3,
        3,
        [
            (ExponentVector::new(vec![3, 0, 0]), one()),
            (ExponentVector::new(vec![0, 2, 1]), c.clone()),
        ],
    )?;
    let piece = |name: &str, nf: &HomogeneousPolynomial, images: Vec<LinearForm>| CubicPiece {
        name: name.to_string(),
        normal_form: nf.clone(),
        images,
    };
    let u = y1.add(&y2).add(&y4);
    let pieces = vec![
        piece("x0*y1*z6 - y1^3", &abc_minus_b3, vec![x0.clone(), y1.clone(), z6.clone()]),
        piece("x0*y2*z5 - y2^3", &abc_minus_b3, vec![x0.clone(), y2.clone(), z5.clone()]),
        piece("x0*y4*z3 - y4^3", &abc_minus_b3, vec![x0.clone(), y4.clone(), z3.clone()]),
        piece("(y1+y2+y4)^3 + 12*x0^2*x7", &cube_plus, vec![u, x0, x7]),
    ];
    let mut rescale = vec![Scalar::one(); VARS];
    for i in RESCALED {
        rescale[i] = q(1, 24);
    }
    let red = W3CubedReduction {
        target,
        lambda: Scalar::int(24),
        c,
        rescale,
        substitutions: vec![
            ("y1".into(), y1),
            ("y2".into(), y2),
            ("y4".into(), y4),
            ("z3".into(), z3),
            ("z5".into(), z5),
            ("z6".into(), z6),
        ],
        pieces,
    };
    if !red.identity_holds()? {
        let residual = red.pieces_sum()?.relative_residual(&red.scaled_target()?)?;
        return Err(Error::Verification {
            what: "W3^3 reduction identity".into(),
            residual,
        });
    }
    Ok(red)
}

/// Exact 16-term certificate for `h(W_3^{⊗3})` assembled from the pieces.
pub fn w3_cubed_certificate() -> Result<SymmetricDecomposition> {
    let red = w3_cubed_reduction()?;
    let mut sum = SymmetricDecomposition::new(3, VARS);
    for p in &red.pieces {
        sum.extend(p.exact_decomposition()?.substitute(&p.images)?)?;
    }
    // h(x) = (6/λ) Σ pieces(D^{-1} x).
    let undo: Vec<LinearForm> = (0..VARS)
        .map(|i| Ok(form(&[(i, red.rescale[i].recip()?)])))
        .collect::<Result<_>>()?;
    let dec = sum.substitute(&undo)?.scaled(&(&Scalar::int(6) / &red.lambda));
    dec.verify(&red.target, FLOAT_CERT_TOL)?;
    Ok(dec)
}
