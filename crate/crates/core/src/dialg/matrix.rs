use serde::{Deserialize, Serialize};

use crate::exactlin::{Matrix, Scalar, ScalarKind, StructureTensor};

use super::{DialgError, DialgebraInstance};

/// Square `m × m` matrices split into blocks of sizes `m − m1` and `m1`.
///
/// With `split` the entries live in `GF(p) × GF(p)` (or `Q × Q`) with the
/// swap as conjugation; otherwise conjugation is trivial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockContext {
    pub m: usize,
    pub m1: usize,
    pub kind: ScalarKind,
    pub split: bool,
}

impl BlockContext {
    pub fn new(m: usize, m1: usize, kind: ScalarKind) -> Result<Self, DialgError> {
        if m1 == 0 || m1 >= m {
            return Err(DialgError::BadBlocks { m, m1 });
        }
        Ok(BlockContext { m, m1, kind, split: false })
    }

    pub fn split(mut self) -> Self {
        self.split = true;
        self
    }

    fn components(&self) -> usize {
        if self.split {
            2
        } else {
            1
        }
    }

    pub fn dim(&self) -> usize {
        self.m * self.m * self.components()
    }

    /// Basis index of the unit `e_ij ⊗ ε_k`, with 1-based `i, j`.
    pub fn unit_index(&self, i: usize, j: usize, k: usize) -> usize {
        assert!((1..=self.m).contains(&i) && (1..=self.m).contains(&j) && k < self.components());
        ((i - 1) * self.m + (j - 1)) * self.components() + k
    }

    fn decode(&self, idx: usize) -> (usize, usize, usize) {
        let c = self.components();
        let (cell, k) = (idx / c, idx % c);
        (cell / self.m, cell % self.m, k)
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.dim())
            .map(|idx| {
                let (i, j, k) = self.decode(idx);
                let cell = if self.m > 9 { format!("e{}_{}", i + 1, j + 1) } else { format!("e{}{}", i + 1, j + 1) };
                match (self.split, k) {
                    (false, _) => cell,
                    (true, 0) => format!("{cell}a"),
                    (true, _) => format!("{cell}b"),
                }
            })
            .collect()
    }

    /// Coordinates of an ordinary matrix (non-split contexts).
    pub fn to_vector(&self, a: &Matrix) -> Vec<Scalar> {
        assert!(!self.split && a.rows() == self.m && a.cols() == self.m);
        a.entries().to_vec()
    }

    pub fn to_matrix(&self, v: &[Scalar]) -> Matrix {
        assert!(!self.split && v.len() == self.dim());
        Matrix::new(self.kind, self.m, self.m, v.to_vec()).expect("square coordinates")
    }
}

/// `A ⊣ B` keeps the last block column of both factors, `A ⊢ B` the last
/// block row; the involution is the conjugate transpose.
pub fn matrix_dialgebra(ctx: BlockContext) -> Result<DialgebraInstance, DialgError> {
    if ctx.m1 == 0 || ctx.m1 >= ctx.m {
        return Err(DialgError::BadBlocks { m: ctx.m, m1: ctx.m1 });
    }
    let s = ctx.m - ctx.m1;
    let n = ctx.dim();
    let kind = ctx.kind;
    let product = |keep: fn(usize, usize, usize, usize, usize) -> bool| {
        StructureTensor::from_fn(kind, n, 2, |idx| {
            let (i, j, k) = ctx.decode(idx[0]);
            let (j2, l, k2) = ctx.decode(idx[1]);
            let mut out = vec![Scalar::zero(kind); n];
            if j == j2 && k == k2 && keep(s, i, j, j2, l) {
                out[ctx.unit_index(i + 1, l + 1, k)] = Scalar::one(kind);
            }
            out
        })
    };
    let left = product(|s, _, j, _, l| j >= s && l >= s);
    let right = product(|s, i, _, k, _| i >= s && k >= s);
    let mut inv = Matrix::zeros(kind, n, n);
    for idx in 0..n {
        let (i, j, k) = ctx.decode(idx);
        let k_bar = if ctx.split { 1 - k } else { k };
        inv.set(ctx.unit_index(j + 1, i + 1, k_bar), idx, Scalar::one(kind));
    }
    DialgebraInstance::new(left, right, Some(inv), ctx.labels())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> ScalarKind {
        ScalarKind::Rational
    }

    #[test]
    fn displayed_block_products() {
        let ctx = BlockContext::new(2, 1, q()).unwrap();
        let d = matrix_dialgebra(ctx).unwrap();
        let a = ctx.to_vector(&Matrix::from_i64(q(), &[&[1, 2], &[3, 4]]));
        let b = ctx.to_vector(&Matrix::from_i64(q(), &[&[5, 6], &[7, 8]]));
        assert_eq!(ctx.to_matrix(&d.left_product(&a, &b)), Matrix::from_i64(q(), &[&[0, 16], &[0, 32]]));
        assert_eq!(ctx.to_matrix(&d.right_product(&a, &b)), Matrix::from_i64(q(), &[&[0, 0], &[28, 32]]));
    }

    #[test]
    fn invalid_blocks() {
        assert!(BlockContext::new(2, 2, q()).is_err());
        assert!(BlockContext::new(2, 0, q()).is_err());
    }

    #[test]
    fn split_labels_and_swap() {
        let ctx = BlockContext::new(2, 1, q()).unwrap().split();
        assert_eq!(ctx.dim(), 8);
        assert_eq!(&ctx.labels()[..3], &["e11a", "e11b", "e12a"]);
        let d = matrix_dialgebra(ctx).unwrap();
        let inv = d.involution().unwrap();
        // e12 ⊗ ε0 ↦ e21 ⊗ ε1
        assert_eq!(inv.get(ctx.unit_index(2, 1, 1), ctx.unit_index(1, 2, 0)), &Scalar::one(q()));
    }
}
