//! Exact scalars, dense matrices and reduced row echelon spans.

mod matrix;
mod scalar;
mod tensor;

pub use matrix::Matrix;
pub use tensor::{parse_scalar_json, StructureTensor, TensorJsonError};
pub use scalar::{is_negative, Scalar, ScalarError, ScalarKind, MAX_MODULUS};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("scalar kind mismatch: {0} vs {1}")]
    KindMismatch(ScalarKind, ScalarKind),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vectors are linearly dependent")]
    Dependent,
}

pub fn zero_vector(kind: ScalarKind, n: usize) -> Vec<Scalar> {
    vec![Scalar::zero(kind); n]
}

pub fn unit_vector(kind: ScalarKind, n: usize, i: usize) -> Vec<Scalar> {
    let mut v = zero_vector(kind, n);
    v[i] = Scalar::one(kind);
    v
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

/// `acc += c * x`.
pub fn add_scaled(acc: &mut [Scalar], c: &Scalar, x: &[Scalar]) {
    assert_eq!(acc.len(), x.len(), "vector length");
    if c.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(x) {
        if !b.is_zero() {
            *a += &(c * b);
        }
    }
}

pub fn sub_vectors(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn format_vector(v: &[Scalar]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn check_vectors(kind: ScalarKind, len: usize, vs: &[Vec<Scalar>]) -> Result<(), LinAlgError> {
    for v in vs {
        check_vector(kind, len, v)?;
    }
    Ok(())
}

fn check_vector(kind: ScalarKind, len: usize, v: &[Scalar]) -> Result<(), LinAlgError> {
    if v.len() != len {
        return Err(LinAlgError::DimensionMismatch { expected: len, found: v.len() });
    }
    if let Some(s) = v.iter().find(|s| s.kind() != kind) {
        return Err(LinAlgError::KindMismatch(kind, s.kind()));
    }
    Ok(())
}

/// A subspace held as reduced row echelon rows, grown one vector at a time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    kind: ScalarKind,
    len: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(kind: ScalarKind, len: usize) -> Self {
        Echelon { kind, len, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_vectors(kind: ScalarKind, len: usize, vs: &[Vec<Scalar>]) -> Result<Self, LinAlgError> {
        check_vectors(kind, len, vs)?;
        let mut e = Self::new(kind, len);
        for v in vs {
            e.insert(v.clone());
        }
        Ok(e)
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Splits `v` into echelon coordinates and the residual `v - Σ cᵢ rowᵢ`.
    fn reduce(&self, mut v: Vec<Scalar>) -> (Vec<Scalar>, Vec<Scalar>) {
        let mut coords = Vec::with_capacity(self.rows.len());
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p].clone();
            if !c.is_zero() {
                add_scaled(&mut v, &-&c, row);
            }
            coords.push(c);
        }
        (coords, v)
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<Scalar>) -> bool {
        debug_assert!(check_vector(self.kind, self.len, &v).is_ok());
        let (_, mut r) = self.reduce(v);
        let Some(p) = r.iter().position(|s| !s.is_zero()) else {
            return false;
        };
        let inv = r[p].inv().expect("nonzero pivot");
        for s in r.iter_mut() {
            *s = &*s * &inv;
        }
        for row in self.rows.iter_mut() {
            let c = row[p].clone();
            if !c.is_zero() {
                add_scaled(row, &-&c, &r);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, r);
        self.pivots.insert(at, p);
        true
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vector(&self.reduce(v.to_vec()).1)
    }

    /// Coordinates of `v` in the echelon rows, or `None` outside the span.
    pub fn coords(&self, v: &[Scalar]) -> Result<Option<Vec<Scalar>>, LinAlgError> {
        check_vector(self.kind, self.len, v)?;
        let (c, r) = self.reduce(v.to_vec());
        Ok(is_zero_vector(&r).then_some(c))
    }

    pub fn combine(&self, coords: &[Scalar]) -> Vec<Scalar> {
        let mut out = zero_vector(self.kind, self.len);
        for (c, row) in coords.iter().zip(&self.rows) {
            add_scaled(&mut out, c, row);
        }
        out
    }
}

/// Reduced row echelon basis of the span of `vectors`.
pub fn span_basis(vectors: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>, LinAlgError> {
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    let kind = first.first().map_or(ScalarKind::Rational, Scalar::kind);
    Ok(Echelon::from_vectors(kind, first.len(), vectors)?.rows)
}

/// Coefficients of `v` in an echelon basis produced by [`span_basis`].
pub fn coords_in_span(v: &[Scalar], basis: &[Vec<Scalar>]) -> Result<Option<Vec<Scalar>>, LinAlgError> {
    let mut coords = Vec::with_capacity(basis.len());
    let mut r = v.to_vec();
    for b in basis {
        if b.len() != v.len() {
            return Err(LinAlgError::DimensionMismatch { expected: b.len(), found: v.len() });
        }
        if let (Some(x), Some(y)) = (b.first(), v.first()) {
            if x.kind() != y.kind() {
                return Err(LinAlgError::KindMismatch(x.kind(), y.kind()));
            }
        }
        let Some(p) = b.iter().position(|s| !s.is_zero()) else {
            coords.push(v.first().map_or(Scalar::zero(ScalarKind::Rational), |s| Scalar::zero(s.kind())));
            continue;
        };
        let c = &r[p] * &b[p].inv().expect("nonzero pivot");
        add_scaled(&mut r, &-&c, b);
        coords.push(c);
    }
    Ok(is_zero_vector(&r).then_some(coords))
}

/// Coordinates with respect to an arbitrary list of independent vectors.
#[derive(Clone, Debug)]
pub struct CoordinateSystem {
    basis: Vec<Vec<Scalar>>,
    echelon: Echelon,
    /// Row `k` expresses echelon row `k` in terms of `basis`.
    transition: Vec<Vec<Scalar>>,
}

impl CoordinateSystem {
    pub fn new(kind: ScalarKind, len: usize, basis: Vec<Vec<Scalar>>) -> Result<Self, LinAlgError> {
        check_vectors(kind, len, &basis)?;
        let r = basis.len();
        let mut aug = Echelon::new(kind, len + r);
        for (i, b) in basis.iter().enumerate() {
            let mut v = b.clone();
            v.extend(unit_vector(kind, r, i));
            aug.insert(v);
        }
        if aug.pivots.iter().take_while(|&&p| p < len).count() < r {
            return Err(LinAlgError::Dependent);
        }
        let mut echelon = Echelon::new(kind, len);
        let mut transition = Vec::with_capacity(r);
        for (row, &p) in aug.rows.iter().zip(&aug.pivots) {
            debug_assert!(p < len);
            echelon.rows.push(row[..len].to_vec());
            echelon.pivots.push(p);
            transition.push(row[len..].to_vec());
        }
        Ok(CoordinateSystem { basis, echelon, transition })
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coords(&self, v: &[Scalar]) -> Result<Option<Vec<Scalar>>, LinAlgError> {
        let Some(c) = self.echelon.coords(v)? else {
            return Ok(None);
        };
        let kind = self.echelon.kind;
        let mut out = zero_vector(kind, self.basis.len());
        for (ck, t) in c.iter().zip(&self.transition) {
            add_scaled(&mut out, ck, t);
        }
        Ok(Some(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qv(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| Scalar::from_i64(ScalarKind::Rational, x)).collect()
    }

    #[test]
    fn collinear_rows_collapse() {
        assert_eq!(span_basis(&[qv(&[1, 0]), qv(&[2, 0])]).unwrap(), vec![qv(&[1, 0])]);
        assert!(span_basis(&[]).unwrap().is_empty());
    }

    #[test]
    fn identity_rows_are_their_own_basis() {
        let rows = vec![qv(&[1, 0, 0]), qv(&[0, 1, 0]), qv(&[0, 0, 1])];
        assert_eq!(span_basis(&rows).unwrap(), rows);
    }

    #[test]
    fn span_membership() {
        let b = vec![qv(&[1, 0])];
        assert_eq!(coords_in_span(&qv(&[3, 0]), &b).unwrap(), Some(qv(&[3])));
        assert_eq!(coords_in_span(&qv(&[0, 1]), &b).unwrap(), None);
        assert_eq!(coords_in_span(&qv(&[0, 0]), &[]).unwrap(), Some(vec![]));
        assert!(coords_in_span(&qv(&[0, 0, 0]), &b).is_err());
    }

    #[test]
    fn mixed_kinds_are_rejected() {
        let p = ScalarKind::prime(5).unwrap();
        let mixed = vec![qv(&[1, 0]), vec![Scalar::one(p), Scalar::zero(p)]];
        assert!(matches!(span_basis(&mixed), Err(LinAlgError::KindMismatch(..))));
    }

    #[test]
    fn echelon_rows_are_reduced() {
        let rows = span_basis(&[qv(&[0, 2, 4]), qv(&[1, 1, 1]), qv(&[1, 2, 3])]).unwrap();
        assert_eq!(rows, vec![qv(&[1, 0, -1]), qv(&[0, 1, 2])]);
    }

    #[test]
    fn coordinate_system_solves_in_given_basis() {
        let k = ScalarKind::Rational;
        let cs = CoordinateSystem::new(k, 3, vec![qv(&[1, 1, 0]), qv(&[0, 1, 1])]).unwrap();
        assert_eq!(cs.coords(&qv(&[2, 5, 3])).unwrap(), Some(qv(&[2, 3])));
        assert_eq!(cs.coords(&qv(&[1, 0, 0])).unwrap(), None);
        assert!(matches!(
            CoordinateSystem::new(k, 2, vec![qv(&[1, 2]), qv(&[2, 4])]),
            Err(LinAlgError::Dependent)
        ));
    }
}
