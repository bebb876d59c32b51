//! Associative dialgebras: finite instances, the free dialgebra, block-matrix
//! and differential constructions, axiom checkers and the Leibniz bracket.

mod free;
mod matrix;

pub use free::{free_basis, free_dialgebra, free_involution, render_free, FreeDiWord, FreeDialgebra, FreeElement};
pub use matrix::{matrix_dialgebra, BlockContext};

use std::time::Instant;

use serde_json::{json, Value};
use thiserror::Error;

use crate::catalog;
use crate::eval::{
    check_chains, delegate_space, render_combination, CheckError, CheckOptions, ChainReport, Model, OpKey, Report, Space,
    TensorModel, Witness,
};
use crate::exactlin::{
    add_scaled, is_zero_vector, parse_scalar_json, sub_vectors, unit_vector, Echelon, CoordinateSystem,
    LinAlgError, Matrix, Scalar, ScalarKind, StructureTensor, TensorJsonError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DialgError {
    #[error("word of length {len} cannot have center {center}")]
    BadWord { len: usize, center: usize },
    #[error("block sizes need 1 <= m1 < m, got m={m}, m1={m1}")]
    BadBlocks { m: usize, m1: usize },
    #[error("shape: {0}")]
    Shape(String),
    #[error("instance has no involution")]
    NoInvolution,
    #[error("multiplication is not associative on ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("d∘d is nonzero on {0}")]
    NotSquareZero(String),
    #[error("d is not a derivation on ({0}, {1})")]
    NotDerivation(String, String),
    #[error("json: {0}")]
    Json(String),
}

impl From<TensorJsonError> for DialgError {
    fn from(e: TensorJsonError) -> Self {
        DialgError::Json(e.to_string())
    }
}

/// A finite-dimensional dialgebra given by the structure tensors of `⊣`
/// (subscript 1) and `⊢` (subscript 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DialgebraInstance {
    kind: ScalarKind,
    dim: usize,
    left: StructureTensor,
    right: StructureTensor,
    involution: Option<Matrix>,
    labels: Vec<String>,
}

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("e{i}")).collect()
}

impl DialgebraInstance {
    /// Empty `labels` default to `e1, e2, …`.
    pub fn new(
        left: StructureTensor,
        right: StructureTensor,
        involution: Option<Matrix>,
        labels: Vec<String>,
    ) -> Result<Self, DialgError> {
        let (kind, dim) = (left.kind(), left.dim());
        if left.arity() != 2 || right.arity() != 2 || right.dim() != dim || right.kind() != kind {
            return Err(DialgError::Shape("products must be bilinear on one module".into()));
        }
        if let Some(m) = &involution {
            if m.rows() != dim || m.cols() != dim || m.kind() != kind {
                return Err(DialgError::Shape(format!("involution must be {dim}x{dim} over {kind}")));
            }
        }
        let labels = if labels.is_empty() { default_labels(dim) } else { labels };
        if labels.len() != dim {
            return Err(DialgError::Shape(format!("{} labels for dimension {dim}", labels.len())));
        }
        Ok(DialgebraInstance { kind, dim, left, right, involution, labels })
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn left(&self) -> &StructureTensor {
        &self.left
    }

    pub fn right(&self) -> &StructureTensor {
        &self.right
    }

    pub fn involution(&self) -> Option<&Matrix> {
        self.involution.as_ref()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn with_involution(mut self, m: Option<Matrix>) -> Result<Self, DialgError> {
        self.involution = None;
        Self::new(self.left, self.right, m, self.labels)
    }

    /// Replaces the products, keeping labels and involution.
    pub fn with_products(&self, left: StructureTensor, right: StructureTensor) -> Result<Self, DialgError> {
        Self::new(left, right, self.involution.clone(), self.labels.clone())
    }

    pub fn left_product(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        self.left.apply(&[a, b])
    }

    pub fn right_product(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        self.right.apply(&[a, b])
    }

    pub fn star(&self, a: &[Scalar]) -> Option<Vec<Scalar>> {
        self.involution.as_ref().map(|m| m.apply(a))
    }

    pub fn model(&self) -> TensorModel<'_> {
        TensorModel::new(self.kind, self.dim, vec![(Some(1), &self.left), (Some(2), &self.right)])
            .with_involution(self.involution.as_ref())
            .with_labels(&self.labels)
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "type": "dialgebra",
            "dim": self.dim,
            "scalar": self.kind,
            "left": self.left.to_json(),
            "right": self.right.to_json(),
            "labels": self.labels,
        });
        if let Some(m) = &self.involution {
            v["involution"] = matrix_to_json(m);
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self, DialgError> {
        if let Some(t) = v.get("type").and_then(Value::as_str) {
            if t != "dialgebra" {
                return Err(DialgError::Json(format!("expected a dialgebra, found {t}")));
            }
        }
        let (kind, dim) = header(v)?;
        let left = StructureTensor::from_json(kind, dim, 2, field(v, "left")?)?;
        let right = StructureTensor::from_json(kind, dim, 2, field(v, "right")?)?;
        let involution = match v.get("involution") {
            None | Some(Value::Null) => None,
            Some(m) => Some(matrix_from_json(kind, dim, m)?),
        };
        Self::new(left, right, involution, labels_from_json(v)?)
    }
}

pub(crate) fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value, DialgError> {
    v.get(name).ok_or_else(|| DialgError::Json(format!("missing field {name}")))
}

/// Reads `scalar` and `dim`.
pub(crate) fn header(v: &Value) -> Result<(ScalarKind, usize), DialgError> {
    let kind: ScalarKind =
        serde_json::from_value(field(v, "scalar")?.clone()).map_err(|e| DialgError::Json(e.to_string()))?;
    if let ScalarKind::Prime { modulus } = kind {
        ScalarKind::prime(modulus as u64).map_err(|e| DialgError::Json(e.to_string()))?;
    }
    let dim = field(v, "dim")?
        .as_u64()
        .ok_or_else(|| DialgError::Json("dim must be a nonnegative integer".into()))? as usize;
    Ok((kind, dim))
}

pub(crate) fn labels_from_json(v: &Value) -> Result<Vec<String>, DialgError> {
    match v.get("labels") {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(l) => serde_json::from_value(l.clone()).map_err(|e| DialgError::Json(e.to_string())),
    }
}

/// Row-major nested arrays of scalar strings.
pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|s| Value::String(s.to_string())).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(kind: ScalarKind, dim: usize, v: &Value) -> Result<Matrix, DialgError> {
    let rows = v.as_array().ok_or_else(|| DialgError::Json("matrix must be an array of rows".into()))?;
    let mut data = Vec::with_capacity(dim * dim);
    for r in rows {
        let r = r.as_array().ok_or_else(|| DialgError::Json("matrix row must be an array".into()))?;
        if r.len() != dim {
            return Err(DialgError::Json(format!("matrix row has {} entries, expected {dim}", r.len())));
        }
        for x in r {
            data.push(parse_scalar_json(kind, x)?);
        }
    }
    Matrix::new(kind, rows.len(), dim, data)
        .ok()
        .filter(|m| m.rows() == dim)
        .ok_or_else(|| DialgError::Json(format!("matrix must be {dim}x{dim}")))
}

/// The five dialgebra axioms on any model with products keyed 1 and 2.
pub fn check_dialgebra_model<M: Model>(model: &M, opts: &CheckOptions) -> Result<Report, CheckError> {
    check_chains("DIALGEBRA", &catalog::set("DIALGEBRA")?, model, opts)
}

/// Exhaustive check of the dialgebra axioms on all basis triples.
pub fn check_dialgebra_axioms(d: &DialgebraInstance) -> Result<Report, CheckError> {
    check_dialgebra_model(&d.model(), &CheckOptions::from_env())
}

/// `(a*)* = a`, `(a⊣b)* = b*⊢a*` and `(a⊢b)* = b*⊣a*` over all basis elements
/// and pairs of a model carrying an involution.
pub fn check_involution_model<M: Model>(model: &M, max_witnesses: usize) -> Result<Report, DialgError> {
    let started = Instant::now();
    let Space::Basis(n) = model.space() else {
        return Err(DialgError::Shape("involution checks need a basis".into()));
    };
    let star = |x: &M::Elem| model.star(x).ok_or(DialgError::NoInvolution);
    let basis: Vec<M::Elem> = (0..n).map(|i| model.element(i)).collect();
    let stars = basis.iter().map(star).collect::<Result<Vec<_>, _>>()?;
    let mut involutive = Vec::new();
    for i in 0..n {
        let back = star(&stars[i])?;
        let r = model.sub(&back, &basis[i]);
        if !model.is_zero(&r) && involutive.len() < max_witnesses {
            involutive.push(Witness {
                assignment: vec![("a".into(), model.label(i))],
                difference: 1,
                residual: model.render(&r),
            });
        }
    }
    let mut chains = vec![ChainReport::from_failures("INV1", n as u64, involutive)];
    for (name, key, flipped) in [("INV2", Some(1), Some(2)), ("INV3", Some(2), Some(1))] {
        let mut fails = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let lhs = star(&model.apply(key, &[&basis[i], &basis[j]]))?;
                let rhs = model.apply(flipped, &[&stars[j], &stars[i]]);
                let r = model.sub(&lhs, &rhs);
                if !model.is_zero(&r) && fails.len() < max_witnesses {
                    fails.push(Witness {
                        assignment: vec![("a".into(), model.label(i)), ("b".into(), model.label(j))],
                        difference: 1,
                        residual: model.render(&r),
                    });
                }
            }
        }
        chains.push(ChainReport::from_failures(name, (n * n) as u64, fails));
    }
    Ok(Report::new("INVOLUTION", chains, started))
}

pub fn check_involution(d: &DialgebraInstance) -> Result<Report, DialgError> {
    if d.involution.is_none() {
        return Err(DialgError::NoInvolution);
    }
    check_involution_model(&d.model(), 5)
}

/// The bracket `[a,b] = a⊣b − b⊢a` on a dialgebra model, as an unsubscripted
/// binary operation.
#[derive(Clone, Debug)]
pub struct DMinus<'a, M>(pub &'a M);

impl<M: Model> Model for DMinus<'_, M> {
    type Elem = M::Elem;

    delegate_space!();

    fn ops(&self) -> Vec<(OpKey, usize)> {
        vec![(None, 2)]
    }

    fn apply(&self, key: OpKey, args: &[&M::Elem]) -> M::Elem {
        assert_eq!(key, None, "bracket is unsubscripted");
        let l = self.0.apply(Some(1), &[args[0], args[1]]);
        let r = self.0.apply(Some(2), &[args[1], args[0]]);
        self.0.sub(&l, &r)
    }
}

/// Structure tensor of `[a,b] = a⊣b − b⊢a`.
pub fn dminus_bracket(d: &DialgebraInstance) -> StructureTensor {
    StructureTensor::from_fn(d.kind, d.dim, 2, |idx| {
        sub_vectors(&d.left.entry_dense(&[idx[0], idx[1]]), &d.right.entry_dense(&[idx[1], idx[0]]))
    })
}

/// `[[a,b],c] = [[a,c],b] + [a,[b,c]]` on any model with an unsubscripted
/// binary bracket.
pub fn check_right_leibniz_model<M: Model>(model: &M, opts: &CheckOptions) -> Result<Report, CheckError> {
    Ok(check_chains("LEIBNIZ", &catalog::set("LEIBNIZ")?, model, opts)?
        .with_note("right Leibniz convention [[a,b],c] = [[a,c],b] + [a,[b,c]]"))
}

pub fn check_right_leibniz(bracket: &StructureTensor) -> Result<Report, CheckError> {
    let m = TensorModel::new(bracket.kind(), bracket.dim(), vec![(None, bracket)]);
    check_right_leibniz_model(&m, &CheckOptions::from_env())
}

/// A bracket-closed subspace with structure constants in its basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subalgebra {
    /// Independent generators first, then vectors added during closure.
    pub basis: Vec<Vec<Scalar>>,
    /// Number of basis vectors added by the closure.
    pub added: usize,
    /// `constants.entry(&[i, j])` are the coordinates of `[bᵢ, bⱼ]`.
    pub constants: StructureTensor,
}

/// Closes `span(vectors)` under a bilinear product and returns its structure
/// constants.
pub fn subalgebra_structure_constants(
    bracket: &StructureTensor,
    vectors: &[Vec<Scalar>],
) -> Result<Subalgebra, LinAlgError> {
    let (kind, n) = (bracket.kind(), bracket.dim());
    let mut ech = Echelon::new(kind, n);
    let mut basis = Vec::new();
    for v in vectors {
        if v.len() != n {
            return Err(LinAlgError::DimensionMismatch { expected: n, found: v.len() });
        }
        if ech.insert(v.clone()) {
            basis.push(v.clone());
        }
    }
    let generated = basis.len();
    let mut done = 0;
    // pairs (i, j) with max(i, j) < done have been multiplied
    while done < basis.len() {
        let k = done;
        done += 1;
        for other in 0..=k {
            for (i, j) in [(k, other), (other, k)] {
                let p = bracket.apply(&[&basis[i], &basis[j]]);
                if ech.insert(p.clone()) {
                    basis.push(p);
                }
            }
        }
    }
    let cs = CoordinateSystem::new(kind, n, basis.clone())?;
    let r = basis.len();
    let constants = StructureTensor::from_fn(kind, r, 2, |idx| {
        let p = bracket.apply(&[&basis[idx[0]], &basis[idx[1]]]);
        cs.coords(&p).expect("same shape").expect("closed span")
    });
    Ok(Subalgebra { basis, added: r - generated, constants })
}

/// Lines `[b_i,b_j] = …` for the nonzero structure constants.
pub fn format_structure_constants(sub: &Subalgebra, names: &[String]) -> String {
    let mut s = String::new();
    for idx in sub.constants.indices() {
        let v = sub.constants.entry_dense(&idx);
        if is_zero_vector(&v) {
            continue;
        }
        s.push_str(&format!(
            "[{},{}] = {}\n",
            names[idx[0]],
            names[idx[1]],
            render_combination(&v, |i| names[i].clone())
        ));
    }
    if s.is_empty() {
        s.push_str("all brackets vanish\n");
    }
    s
}

/// `a ⊣ b = a·d(b)` and `a ⊢ b = d(a)·b` from an associative algebra with a
/// square-zero derivation.
pub fn differential_dialgebra(
    mult: &StructureTensor,
    d: &Matrix,
    labels: Vec<String>,
) -> Result<DialgebraInstance, DialgError> {
    let (kind, n) = (mult.kind(), mult.dim());
    if mult.arity() != 2 || d.rows() != n || d.cols() != n || d.kind() != kind {
        return Err(DialgError::Shape("need a bilinear product and a square map on one module".into()));
    }
    let name = |i: usize| labels.get(i).cloned().unwrap_or_else(|| format!("e{}", i + 1));
    let e = |i: usize| unit_vector(kind, n, i);
    let mul = |a: &[Scalar], b: &[Scalar]| mult.apply(&[a, b]);
    for i in 0..n {
        for j in 0..n {
            let ij = mul(&e(i), &e(j));
            for k in 0..n {
                let l = mul(&ij, &e(k));
                let r = mul(&e(i), &mul(&e(j), &e(k)));
                if l != r {
                    return Err(DialgError::NotAssociative(name(i), name(j), name(k)));
                }
            }
        }
    }
    for i in 0..n {
        if !is_zero_vector(&d.apply(&d.apply(&e(i)))) {
            return Err(DialgError::NotSquareZero(name(i)));
        }
    }
    for i in 0..n {
        for j in 0..n {
            let lhs = d.apply(&mul(&e(i), &e(j)));
            let mut rhs = mul(&d.apply(&e(i)), &e(j));
            add_scaled(&mut rhs, &Scalar::one(kind), &mul(&e(i), &d.apply(&e(j))));
            if lhs != rhs {
                return Err(DialgError::NotDerivation(name(i), name(j)));
            }
        }
    }
    let left = StructureTensor::from_fn(kind, n, 2, |idx| mul(&e(idx[0]), &d.apply(&e(idx[1]))));
    let right = StructureTensor::from_fn(kind, n, 2, |idx| mul(&d.apply(&e(idx[0])), &e(idx[1])));
    DialgebraInstance::new(left, right, None, labels)
}

/// Product table on a basis from `basis index × basis index → coordinates`.
fn table(kind: ScalarKind, n: usize, f: impl Fn(usize, usize) -> Vec<i64> + Sync) -> StructureTensor {
    StructureTensor::from_fn(kind, n, 2, |idx| {
        f(idx[0], idx[1]).into_iter().map(|c| Scalar::from_i64(kind, c)).collect()
    })
}

/// `k[t]/(t²)` on basis `(1, t)` with `d(1) = 0`, `d(t) = 1`. The map squares
/// to zero but is not a derivation: `d(t·t) = 0 ≠ 2t`.
pub fn dual_numbers_example(kind: ScalarKind) -> (StructureTensor, Matrix) {
    let mult = table(kind, 2, |i, j| match (i, j) {
        (0, 0) => vec![1, 0],
        (0, 1) | (1, 0) => vec![0, 1],
        _ => vec![0, 0],
    });
    (mult, Matrix::from_i64(kind, &[&[0, 1], &[0, 0]]))
}

/// Upper triangular 2×2 matrices on basis `(e11, e12, e22)` with the inner
/// derivation `d = [e12, ·]`, which squares to zero there.
pub fn triangular_example(kind: ScalarKind) -> (StructureTensor, Matrix, Vec<String>) {
    // e11·e11 = e11, e11·e12 = e12, e12·e22 = e12, e22·e22 = e22
    let mult = table(kind, 3, |i, j| match (i, j) {
        (0, 0) => vec![1, 0, 0],
        (0, 1) | (1, 2) => vec![0, 1, 0],
        (2, 2) => vec![0, 0, 1],
        _ => vec![0, 0, 0],
    });
    // d(e11) = -e12, d(e12) = 0, d(e22) = e12
    let d = Matrix::from_i64(kind, &[&[0, 0, 0], &[-1, 0, 1], &[0, 0, 0]]);
    (mult, d, vec!["e11".into(), "e12".into(), "e22".into()])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf5() -> ScalarKind {
        ScalarKind::prime(5).unwrap()
    }

    fn m21(kind: ScalarKind) -> DialgebraInstance {
        matrix_dialgebra(BlockContext::new(2, 1, kind).unwrap()).unwrap()
    }

    #[test]
    fn matrix_dialgebra_passes_axioms_and_involution() {
        let d = m21(gf5());
        assert!(check_dialgebra_axioms(&d).unwrap().passed());
        assert!(check_involution(&d).unwrap().passed());
    }

    #[test]
    fn identity_map_is_not_an_involution_of_the_matrix_dialgebra() {
        let d = m21(gf5()).with_involution(Some(Matrix::identity(gf5(), 4))).unwrap();
        let r = check_involution(&d).unwrap();
        assert!(r.chains[0].passed());
        assert!(!r.passed());
    }

    #[test]
    fn swapped_entry_breaks_axioms() {
        let d = m21(gf5());
        let mut left = d.left().clone();
        let a = left.entry_dense(&[1, 3]);
        left.set_entry(&[1, 3], left.entry_dense(&[3, 3]));
        left.set_entry(&[3, 3], a);
        let bad = d.with_products(left, d.right().clone()).unwrap();
        let r = check_dialgebra_axioms(&bad).unwrap();
        assert!(!r.passed());
        assert!(!r.failures().next().unwrap().witnesses.is_empty());
    }

    #[test]
    fn free_model_over_short_words() {
        let f = FreeDialgebra::new(ScalarKind::Rational, 2, 3).over_basis();
        let opts = CheckOptions::default();
        assert!(check_dialgebra_model(&f, &opts).unwrap().passed());
        assert!(check_involution_model(&f, 5).unwrap().passed());
        assert!(check_right_leibniz_model(&DMinus(&f), &opts).unwrap().passed());
    }

    #[test]
    fn materialized_free_dialgebra_matches_lazy_products() {
        let d = free_dialgebra(ScalarKind::Rational, 2, 2);
        assert_eq!(d.dim(), 2 + 8);
        assert!(check_dialgebra_axioms(&d).unwrap().passed());
        assert!(check_involution(&d).unwrap().passed());
        assert_eq!(d.labels()[2], "(aa,1)");
    }

    #[test]
    fn bracket_is_right_leibniz() {
        let b = dminus_bracket(&m21(gf5()));
        assert!(check_right_leibniz(&b).unwrap().passed());
    }

    #[test]
    fn antisymmetrized_nonassociative_product_fails_leibniz() {
        let q = ScalarKind::Rational;
        // [e_i, e_j] = e_{(i+j) mod 3} − e_{(j+i+1) mod 3} for i ≠ j: a fixed
        // non-Leibniz table
        let t = StructureTensor::from_fn(q, 3, 2, |idx| {
            let mut v = vec![Scalar::zero(q); 3];
            if idx[0] < idx[1] {
                v[(idx[0] + idx[1]) % 3] = Scalar::one(q);
            } else if idx[0] > idx[1] {
                v[(idx[0] + idx[1]) % 3] = -Scalar::one(q);
            }
            v
        });
        assert!(!check_right_leibniz(&t).unwrap().passed());
    }

    #[test]
    fn zero_bracket_closure() {
        let q = ScalarKind::Rational;
        let t = StructureTensor::zeros(q, 2, 2);
        let s = subalgebra_structure_constants(&t, &[unit_vector(q, 2, 0)]).unwrap();
        assert_eq!(s.basis.len(), 1);
        assert!(s.constants.is_zero());
    }

    #[test]
    fn closure_adds_missing_products() {
        let q = ScalarKind::Rational;
        let b = dminus_bracket(&m21(q));
        // [e12 + e21, e22] = e12 − e21, outside span{e12 + e21, e22}
        let v = vec![Scalar::zero(q), Scalar::one(q), Scalar::one(q), Scalar::zero(q)];
        let s = subalgebra_structure_constants(&b, &[v, unit_vector(q, 4, 3)]).unwrap();
        assert_eq!(s.added, 1);
        assert_eq!(s.basis.len(), 3);
    }

    #[test]
    fn differential_constructions() {
        let k = gf5();
        let (mult, d) = dual_numbers_example(k);
        assert_eq!(
            differential_dialgebra(&mult, &d, vec!["1".into(), "t".into()]),
            Err(DialgError::NotDerivation("t".into(), "t".into()))
        );
        let zero = differential_dialgebra(&mult, &Matrix::zeros(k, 2, 2), Vec::new()).unwrap();
        assert!(zero.left().is_zero() && zero.right().is_zero());
        let (mult, d, labels) = triangular_example(k);
        let dd = differential_dialgebra(&mult, &d, labels).unwrap();
        assert!(check_dialgebra_axioms(&dd).unwrap().passed());
        assert!(!dd.left().is_zero());
        let d2 = Matrix::from_i64(k, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]]);
        assert!(matches!(
            differential_dialgebra(&mult, &d2, Vec::new()),
            Err(DialgError::NotSquareZero(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let d = m21(gf5());
        let back = DialgebraInstance::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        let mut v = d.to_json();
        v["dim"] = json!(3);
        assert!(DialgebraInstance::from_json(&v).is_err());
    }
    #[test]
    fn bracket_image_ranks_of_block_matrices() {
        // the image can exceed the off-diagonal block count 2·m1·(m−m1)
        let ranks: Vec<_> = [(2, 1), (3, 1), (3, 2)]
            .iter()
            .map(|&(m, m1)| {
                let d = matrix_dialgebra(BlockContext::new(m, m1, gf5()).unwrap()).unwrap();
                let b = dminus_bracket(&d);
                let images: Vec<_> =
                    (0..d.dim).flat_map(|i| (0..d.dim).map(move |j| (i, j))).map(|(i, j)| b.entry_dense(&[i, j])).collect();
                (crate::exactlin::span_basis(&images).unwrap().len(), 2 * m1 * (m - m1))
            })
            .collect();
        assert_eq!(ranks, vec![(2, 2), (4, 4), (7, 4)]);
    }
}
