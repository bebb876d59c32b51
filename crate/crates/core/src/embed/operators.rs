use std::fmt;

use serde::Serialize;

use crate::exactlin::{unit_vector, CoordinateSystem, Echelon, Matrix, Scalar, ScalarKind};
use crate::trisys::TrisystemInstance;

use super::{DiEndPair, EmbedError, OpDiEndPair};

/// `Lᵢ(x,y)z = {x,y,z}ᵢ` as a matrix.
pub fn l_map(t: &TrisystemInstance, i: usize, x: &[Scalar], y: &[Scalar]) -> Matrix {
    let n = t.dim();
    let cols: Vec<Vec<Scalar>> = (0..n).map(|k| t.product(i, x, y, &unit_vector(t.kind(), n, k))).collect();
    Matrix::from_columns(t.kind(), n, &cols)
}

/// `Rᵢ(x,y)z = {z,x,y}ᵢ` as a matrix.
pub fn r_map(t: &TrisystemInstance, i: usize, x: &[Scalar], y: &[Scalar]) -> Matrix {
    let n = t.dim();
    let cols: Vec<Vec<Scalar>> = (0..n).map(|k| t.product(i, &unit_vector(t.kind(), n, k), x, y)).collect();
    Matrix::from_columns(t.kind(), n, &cols)
}

/// `L◁ = (L1, L3)`, `L▷ = (L2, L3)`, and the opposite pairs of
/// `R◁ = (R2, R1)`, `R▷ = (R3, R1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LrOperators {
    pub l_left: DiEndPair,
    pub l_right: DiEndPair,
    pub r_left: OpDiEndPair,
    pub r_right: OpDiEndPair,
}

pub fn lr_operators(t: &TrisystemInstance, x: &[Scalar], y: &[Scalar]) -> LrOperators {
    let l = |i| l_map(t, i, x, y);
    let r = |i| r_map(t, i, x, y);
    let (l3, r1) = (l(3), r(1));
    LrOperators {
        l_left: DiEndPair { f1: l(1), f2: l3.clone() },
        l_right: DiEndPair { f1: l(2), f2: l3 },
        r_left: DiEndPair { f1: r(2), f2: r1.clone() }.opposite(),
        r_right: DiEndPair { f1: r(3), f2: r1 }.opposite(),
    }
}

/// `◁` or `▷`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Triangle {
    Left,
    Right,
}

impl Triangle {
    pub fn swap(self) -> Self {
        match self {
            Triangle::Left => Triangle::Right,
            Triangle::Right => Triangle::Left,
        }
    }
}

impl fmt::Display for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Triangle::Left => "◁",
            Triangle::Right => "▷",
        })
    }
}

/// An element `λ ⊕ ρ` of `DiEnd ⊕ DiEnd^op`, with componentwise products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MOperator {
    pub left: DiEndPair,
    pub right: OpDiEndPair,
}

impl MOperator {
    pub fn left_product(&self, other: &MOperator) -> MOperator {
        MOperator { left: self.left.left(&other.left), right: self.right.left(&other.right) }
    }

    pub fn right_product(&self, other: &MOperator) -> MOperator {
        MOperator { left: self.left.right(&other.left), right: self.right.right(&other.right) }
    }

    /// `f1, f2, g1, g2` entries, length `4n²`.
    pub fn flatten(&self) -> Vec<Scalar> {
        let mut v = self.left.flatten();
        v.extend(self.right.flatten());
        v
    }

    pub fn from_flat(kind: ScalarKind, n: usize, v: &[Scalar]) -> Self {
        let h = 2 * n * n;
        MOperator { left: DiEndPair::from_flat(kind, n, &v[..h]), right: OpDiEndPair::from_flat(kind, n, &v[h..]) }
    }
}

/// `x ◁ y = L◁(x,y) ⊕ R◁(x,y)` or `x ▷ y = L▷(x,y) ⊕ R▷(x,y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MGenerator {
    pub kind: Triangle,
    pub x: Vec<Scalar>,
    pub y: Vec<Scalar>,
    pub realized: MOperator,
}

impl MGenerator {
    pub fn new(t: &TrisystemInstance, kind: Triangle, x: &[Scalar], y: &[Scalar]) -> Self {
        let ops = lr_operators(t, x, y);
        let realized = match kind {
            Triangle::Left => MOperator { left: ops.l_left, right: ops.r_left },
            Triangle::Right => MOperator { left: ops.l_right, right: ops.r_right },
        };
        MGenerator { kind, x: x.to_vec(), y: y.to_vec(), realized }
    }
}

/// The span of a list of flattened operators, with the independent ones
/// (in list order) as basis.
#[derive(Clone, Debug)]
pub struct OperatorModule {
    generators: Vec<Vec<Scalar>>,
    generator_labels: Vec<String>,
    basis_generators: Vec<usize>,
    coords: CoordinateSystem,
}

impl OperatorModule {
    pub fn new(kind: ScalarKind, len: usize, generators: Vec<(String, Vec<Scalar>)>) -> Result<Self, EmbedError> {
        let mut ech = Echelon::new(kind, len);
        let mut basis_generators = Vec::new();
        for (i, (_, v)) in generators.iter().enumerate() {
            if ech.insert(v.clone()) {
                basis_generators.push(i);
            }
        }
        let (generator_labels, generators): (Vec<_>, Vec<_>) = generators.into_iter().unzip();
        let basis = basis_generators.iter().map(|&i| generators[i].clone()).collect();
        let coords = CoordinateSystem::new(kind, len, basis)?;
        Ok(OperatorModule { generators, generator_labels, basis_generators, coords })
    }

    pub fn dim(&self) -> usize {
        self.basis_generators.len()
    }

    pub fn generators(&self) -> &[Vec<Scalar>] {
        &self.generators
    }

    pub fn generator_labels(&self) -> &[String] {
        &self.generator_labels
    }

    /// Indices into [`generators`](Self::generators) of the basis elements.
    pub fn basis_generators(&self) -> &[usize] {
        &self.basis_generators
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        self.coords.basis()
    }

    pub fn labels(&self) -> Vec<String> {
        self.basis_generators.iter().map(|&i| self.generator_labels[i].clone()).collect()
    }

    pub fn coords(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        self.coords.coords(v).expect("vector of module length")
    }

    /// `Σ cᵢ bᵢ` over the basis.
    pub fn combine(&self, c: &[Scalar], kind: ScalarKind) -> Vec<Scalar> {
        let len = self.generators.first().map_or(0, Vec::len);
        let mut out = vec![Scalar::zero(kind); len];
        for (ci, b) in c.iter().zip(self.basis()) {
            crate::exactlin::add_scaled(&mut out, ci, b);
        }
        out
    }
}
