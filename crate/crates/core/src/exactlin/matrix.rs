use std::fmt;

use super::scalar::{Scalar, ScalarKind};
use super::LinAlgError;

/// Dense row-major matrix over a single scalar kind.
///
/// Linear maps act on column vectors: `apply(v) = M v`, so column `j` is the
/// image of the `j`-th basis vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    kind: ScalarKind,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn new(kind: ScalarKind, rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self, LinAlgError> {
        if data.len() != rows * cols {
            return Err(LinAlgError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        for s in &data {
            if s.kind() != kind {
                return Err(LinAlgError::KindMismatch(kind, s.kind()));
            }
        }
        Ok(Matrix { kind, rows, cols, data })
    }

    pub fn zeros(kind: ScalarKind, rows: usize, cols: usize) -> Self {
        Matrix {
            kind,
            rows,
            cols,
            data: vec![Scalar::zero(kind); rows * cols],
        }
    }

    pub fn identity(kind: ScalarKind, n: usize) -> Self {
        let mut m = Self::zeros(kind, n, n);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one(kind);
        }
        m
    }

    /// Builds an `n × cols.len()` matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(kind: ScalarKind, n: usize, cols: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(kind, n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n, "column length");
            for (i, s) in c.iter().enumerate() {
                m.data[i * cols.len() + j] = s.clone();
            }
        }
        m
    }

    pub fn from_i64(kind: ScalarKind, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let data = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), c, "ragged rows");
                row.iter().map(|&x| Scalar::from_i64(kind, x))
            })
            .collect();
        Matrix { kind, rows: r, cols: c, data }
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: Scalar) {
        assert_eq!(s.kind(), self.kind, "scalar kind mismatch");
        self.data[i * self.cols + j] = s;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.kind, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.kind, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix { data, ..*self }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        let data = self.data.iter().map(|a| a * c).collect();
        Matrix { data, ..*self }
    }

    /// `M v` for a column vector `v`.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length");
        let mut out = vec![Scalar::zero(self.kind); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                let a = self.get(i, j);
                if !a.is_zero() {
                    *o += &(a * x);
                }
            }
        }
        out
    }

    /// `v M` for a row vector `v`.
    pub fn apply_row(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.rows, "vector length");
        let mut out = vec![Scalar::zero(self.kind); self.cols];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                if !a.is_zero() {
                    *o += &(a * x);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<Scalar>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        super::Echelon::from_vectors(self.kind, self.cols, &rows)
            .expect("rows share kind and length")
            .rank()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, s) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{s}")?;
            }
            write!(f, ")")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let k = ScalarKind::Rational;
        let a = Matrix::from_i64(k, &[&[1, 2], &[3, 4]]);
        let b = Matrix::from_i64(k, &[&[5, 6], &[7, 8]]);
        assert_eq!(a.mul(&b), Matrix::from_i64(k, &[&[19, 22], &[43, 50]]));
        assert_eq!(a.transpose(), Matrix::from_i64(k, &[&[1, 3], &[2, 4]]));
        assert_eq!(a.to_string(), "((1,2), (3,4))");
    }

    #[test]
    fn apply_uses_column_convention() {
        let k = ScalarKind::Rational;
        let a = Matrix::from_i64(k, &[&[0, 1], &[0, 0]]);
        let e2 = vec![Scalar::zero(k), Scalar::one(k)];
        assert_eq!(a.apply(&e2), vec![Scalar::one(k), Scalar::zero(k)]);
        assert_eq!(Matrix::from_columns(k, 2, &[a.column(0), a.column(1)]), a);
    }

    #[test]
    fn rank_of_singular_matrix() {
        let k = ScalarKind::prime(5).unwrap();
        assert_eq!(Matrix::from_i64(k, &[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(Matrix::identity(k, 3).rank(), 3);
    }

    #[test]
    fn new_checks_shape_and_kind() {
        let k = ScalarKind::Rational;
        assert!(Matrix::new(k, 2, 2, vec![Scalar::zero(k); 3]).is_err());
        let p = ScalarKind::prime(3).unwrap();
        assert!(Matrix::new(k, 1, 1, vec![Scalar::zero(p)]).is_err());
    }
}
