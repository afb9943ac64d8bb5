use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Dense matrix of [`Scalar`]s, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose column `j` is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[Vec<Scalar>]) -> Result<Self> {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::ShapeMismatch(format!(
                    "column {j} has length {}, expected {rows}",
                    col.len()
                )));
            }
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        Ok(m)
    }

    /// Permutation matrix sending basis vector `j` to `image[j]`.
    pub fn permutation(image: &[usize]) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &t in image {
            if t >= n || std::mem::replace(&mut seen[t], true) {
                return Err(Error::InvalidPermutation(image.to_vec()));
            }
        }
        let mut m = Matrix::zeros(n, n);
        for (j, &t) in image.iter().enumerate() {
            m.set(t, j, Scalar::one());
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_exact(&self) -> bool {
        self.data.iter().all(Scalar::is_exact)
    }

    pub fn row_vec(&self, r: usize) -> Vec<Scalar> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    /// Nonzero entries `(row, value)` of column `c`.
    pub fn column_support(&self, c: usize) -> Vec<(usize, Scalar)> {
        (0..self.rows)
            .filter_map(|r| {
                let v = self.get(r, c);
                (!v.is_zero()).then(|| (r, v.clone()))
            })
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn scaled(&self, factor: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j) + &(a * b);
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} for {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .filter(|&c| !self.get(r, c).is_zero() && !v[c].is_zero())
                    .map(|c| self.get(r, c) * &v[c])
                    .sum()
            })
            .collect())
    }

    /// Kronecker product; the row index is `i_self * rhs.rows + i_rhs`.
    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        let b = rhs.get(k, l);
                        if !b.is_zero() {
                            out.set(i * rhs.rows + k, j * rhs.cols + l, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal matrix `self ⊕ rhs`.
    pub fn direct_sum(&self, rhs: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows + rhs.rows, self.cols + rhs.cols);
        out.place(0, 0, self);
        out.place(self.rows, self.cols, rhs);
        out
    }

    /// Writes `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn place(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    /// Inverse by Gauss-Jordan elimination (exact for rational matrices,
    /// partial pivoting otherwise).
    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = if a.is_exact() {
                (col..n).find(|&r| !a.get(r, col).is_zero())
            } else {
                (col..n)
                    .max_by(|&x, &y| a.get(x, col).abs().total_cmp(&a.get(y, col).abs()))
                    .filter(|&r| a.get(r, col).abs() > 0.0)
            }
            .ok_or(Error::Singular)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a.get(col, col).recip()?;
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = -a.get(r, col);
                a.add_row_multiple(r, col, &f);
                inv.add_row_multiple(r, col, &f);
            }
        }
        Ok(inv)
    }

    /// Determinant by elimination.
    pub fn determinant(&self) -> Result<Scalar> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Ok(Scalar::zero());
            };
            if pivot != col {
                a.swap_rows(col, pivot);
                det = -det;
            }
            let p = a.get(col, col).clone();
            det = det * &p;
            let pinv = p.recip()?;
            for r in col + 1..n {
                if a.get(r, col).is_zero() {
                    continue;
                }
                let f = -(a.get(r, col) * &pinv);
                a.add_row_multiple(r, col, &f);
            }
        }
        Ok(det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, f: &Scalar) {
        for c in 0..self.cols {
            let v = self.get(r, c) * f;
            self.set(r, c, v);
        }
    }

    /// row[target] += f * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, f: &Scalar) {
        for c in 0..self.cols {
            let s = self.get(source, c);
            if s.is_zero() {
                continue;
            }
            let v = self.get(target, c) + &(s * f);
            self.set(target, c, v);
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Scalar>>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows).map(|r| self.row_vec(r)).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(de)?;
        if repr.entries.len() != repr.rows || repr.entries.iter().any(|r| r.len() != repr.cols) {
            return Err(serde::de::Error::custom("matrix entries do not match rows/cols"));
        }
        Ok(Matrix {
            rows: repr.rows,
            cols: repr.cols,
            data: repr.entries.into_iter().flatten().collect(),
        })
    }
}
