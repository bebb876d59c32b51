use rayon::prelude::*;
use serde_json::Value;

use super::scalar::{Scalar, ScalarKind};
use super::{is_zero_vector, LinAlgError};

/// Structure constants of a multilinear map `V^n → V` on a finite basis.
///
/// Entry `(i₁,…,iₙ)` holds the image of the basis tuple as a sparse vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureTensor {
    kind: ScalarKind,
    dim: usize,
    arity: usize,
    entries: Vec<Vec<(u32, Scalar)>>,
}

fn sparsify(v: Vec<Scalar>) -> Vec<(u32, Scalar)> {
    v.into_iter()
        .enumerate()
        .filter(|(_, s)| !s.is_zero())
        .map(|(i, s)| (i as u32, s))
        .collect()
}

impl StructureTensor {
    pub fn zeros(kind: ScalarKind, dim: usize, arity: usize) -> Self {
        StructureTensor {
            kind,
            dim,
            arity,
            entries: vec![Vec::new(); dim.pow(arity as u32)],
        }
    }

    /// Evaluates `f` on every basis tuple; `f` returns dense vectors.
    pub fn from_fn<F>(kind: ScalarKind, dim: usize, arity: usize, f: F) -> Self
    where
        F: Fn(&[usize]) -> Vec<Scalar> + Sync,
    {
        let total = dim.pow(arity as u32);
        let entries = (0..total)
            .into_par_iter()
            .map(|flat| {
                let idx = Self::unflatten(dim, arity, flat);
                let v = f(&idx);
                debug_assert_eq!(v.len(), dim);
                sparsify(v)
            })
            .collect();
        StructureTensor { kind, dim, arity, entries }
    }

    fn unflatten(dim: usize, arity: usize, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; arity];
        for slot in idx.iter_mut().rev() {
            *slot = flat % dim;
            flat /= dim;
        }
        idx
    }

    fn flatten(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.arity, "tensor index arity");
        idx.iter().fold(0, |acc, &i| {
            assert!(i < self.dim, "tensor index out of range");
            acc * self.dim + i
        })
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of basis tuples.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, idx: &[usize]) -> &[(u32, Scalar)] {
        &self.entries[self.flatten(idx)]
    }

    pub fn entry_dense(&self, idx: &[usize]) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(self.kind); self.dim];
        for (i, s) in self.entry(idx) {
            v[*i as usize] = s.clone();
        }
        v
    }

    pub fn set_entry(&mut self, idx: &[usize], v: Vec<Scalar>) {
        assert_eq!(v.len(), self.dim, "entry length");
        let flat = self.flatten(idx);
        self.entries[flat] = sparsify(v);
    }

    /// All basis tuples in flattened order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.entries.len()).map(|f| Self::unflatten(self.dim, self.arity, f))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Vec::is_empty)
    }

    /// Multilinear evaluation on arbitrary vectors.
    pub fn apply(&self, args: &[&[Scalar]]) -> Vec<Scalar> {
        assert_eq!(args.len(), self.arity, "tensor arity");
        let support: Vec<Vec<(usize, &Scalar)>> = args
            .iter()
            .map(|a| {
                assert_eq!(a.len(), self.dim, "argument length");
                a.iter().enumerate().filter(|(_, s)| !s.is_zero()).collect()
            })
            .collect();
        let mut out = vec![Scalar::zero(self.kind); self.dim];
        if support.iter().any(Vec::is_empty) {
            return out;
        }
        let mut pos = vec![0usize; self.arity];
        loop {
            let mut flat = 0;
            let mut coeff: Option<Scalar> = None;
            for (k, &p) in pos.iter().enumerate() {
                let (i, c) = support[k][p];
                flat = flat * self.dim + i;
                coeff = Some(match coeff {
                    None => c.clone(),
                    Some(acc) => &acc * c,
                });
            }
            let coeff = coeff.expect("arity at least one");
            for (i, s) in &self.entries[flat] {
                out[*i as usize] += &(&coeff * s);
            }
            // odometer over the supports
            let mut k = self.arity;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                pos[k] += 1;
                if pos[k] < support[k].len() {
                    break;
                }
                pos[k] = 0;
            }
        }
    }

    /// Nested JSON arrays `t[i₁]…[iₙ] = [coordinates]` with scalars as strings.
    pub fn to_json(&self) -> Value {
        fn build(t: &StructureTensor, prefix: &mut Vec<usize>) -> Value {
            if prefix.len() == t.arity {
                return Value::Array(
                    t.entry_dense(prefix).iter().map(|s| Value::String(s.to_string())).collect(),
                );
            }
            let mut items = Vec::with_capacity(t.dim);
            for i in 0..t.dim {
                prefix.push(i);
                items.push(build(t, prefix));
                prefix.pop();
            }
            Value::Array(items)
        }
        build(self, &mut Vec::new())
    }

    pub fn from_json(kind: ScalarKind, dim: usize, arity: usize, v: &Value) -> Result<Self, TensorJsonError> {
        let mut t = Self::zeros(kind, dim, arity);
        fn walk(
            t: &mut StructureTensor,
            v: &Value,
            prefix: &mut Vec<usize>,
        ) -> Result<(), TensorJsonError> {
            let arr = v.as_array().ok_or_else(|| TensorJsonError::Shape(format!("expected array at {prefix:?}")))?;
            if arr.len() != t.dim {
                return Err(TensorJsonError::Shape(format!(
                    "expected {} items at {prefix:?}, found {}",
                    t.dim,
                    arr.len()
                )));
            }
            if prefix.len() == t.arity {
                let coords = arr
                    .iter()
                    .map(|x| parse_scalar_json(t.kind, x))
                    .collect::<Result<Vec<_>, _>>()?;
                t.set_entry(prefix, coords);
                return Ok(());
            }
            for (i, item) in arr.iter().enumerate() {
                prefix.push(i);
                walk(t, item, prefix)?;
                prefix.pop();
            }
            Ok(())
        }
        walk(&mut t, v, &mut Vec::new())?;
        Ok(t)
    }

    /// Component-wise linear combination `Σ cₖ Tₖ` of tensors of equal shape.
    pub fn combine(terms: &[(Scalar, &StructureTensor)]) -> Result<Self, LinAlgError> {
        let (_, first) = terms.first().expect("at least one term");
        let (kind, dim, arity) = (first.kind, first.dim, first.arity);
        for (_, t) in terms {
            if t.kind != kind {
                return Err(LinAlgError::KindMismatch(kind, t.kind));
            }
            if t.dim != dim || t.arity != arity {
                return Err(LinAlgError::DimensionMismatch { expected: dim, found: t.dim });
            }
        }
        let mut out = Self::zeros(kind, dim, arity);
        for flat in 0..out.entries.len() {
            let mut v = vec![Scalar::zero(kind); dim];
            for (c, t) in terms {
                for (i, s) in &t.entries[flat] {
                    v[*i as usize] += &(c * s);
                }
            }
            if !is_zero_vector(&v) {
                out.entries[flat] = sparsify(v);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum TensorJsonError {
    #[error("tensor shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Scalar(#[from] super::ScalarError),
}

/// Scalars in JSON may be strings (`"-1/2"`) or integers.
pub fn parse_scalar_json(kind: ScalarKind, v: &Value) -> Result<Scalar, TensorJsonError> {
    match v {
        Value::String(s) => Ok(Scalar::parse(kind, s)?),
        Value::Number(n) => Ok(Scalar::parse(kind, &n.to_string())?),
        other => Err(TensorJsonError::Shape(format!("expected scalar, found {other}"))),
    }
}
