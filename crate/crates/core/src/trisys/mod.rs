//! Triple trisystems: instances, the constructions from dialgebras, derived
//! Jordan and Leibniz products, variety checks and the annihilator part.

mod derived;

pub use derived::{materialize, Att1, Att2, Jtd, Leibts};

use std::time::Instant;

use serde_json::{json, Value};
use thiserror::Error;

use crate::catalog;
use crate::dialg::{field, header, labels_from_json, DMinus, DialgError, DialgebraInstance};
use crate::eval::{
    check_chains, render_combination, CheckError, CheckOptions, ChainReport, Model, Report, TensorModel, Witness,
};
use crate::exactlin::{
    span_basis, sub_vectors, unit_vector, CoordinateSystem, Echelon, LinAlgError, Scalar, ScalarKind,
    StructureTensor, TensorJsonError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrisysError {
    #[error("the dialgebra has no involution")]
    NoInvolution,
    #[error("not a complement of the annihilator part: ranks {ann} + {given} with joint rank {joint}, module dimension {dim}")]
    NotComplement { ann: usize, given: usize, joint: usize, dim: usize },
    #[error("shape: {0}")]
    Shape(String),
    #[error("json: {0}")]
    Json(String),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

impl From<DialgError> for TrisysError {
    fn from(e: DialgError) -> Self {
        TrisysError::Json(e.to_string())
    }
}

impl From<TensorJsonError> for TrisysError {
    fn from(e: TensorJsonError) -> Self {
        TrisysError::Json(e.to_string())
    }
}

/// Three trilinear products `{a,b,c}ᵢ` on a finite-dimensional module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrisystemInstance {
    kind: ScalarKind,
    dim: usize,
    products: [StructureTensor; 3],
    provenance: String,
    labels: Vec<String>,
}

impl TrisystemInstance {
    /// Empty `labels` default to `e1, e2, …`.
    pub fn new(
        products: [StructureTensor; 3],
        provenance: impl Into<String>,
        labels: Vec<String>,
    ) -> Result<Self, TrisysError> {
        let (kind, dim) = (products[0].kind(), products[0].dim());
        if products.iter().any(|t| t.kind() != kind || t.dim() != dim || t.arity() != 3) {
            return Err(TrisysError::Shape("products must be trilinear on one module".into()));
        }
        let labels = if labels.is_empty() { (1..=dim).map(|i| format!("e{i}")).collect() } else { labels };
        if labels.len() != dim {
            return Err(TrisysError::Shape(format!("{} labels for dimension {dim}", labels.len())));
        }
        Ok(TrisystemInstance { kind, dim, products, provenance: provenance.into(), labels })
    }

    /// A triple system viewed as a trisystem with three equal products.
    pub fn from_triple_system(t: StructureTensor, provenance: impl Into<String>, labels: Vec<String>) -> Result<Self, TrisysError> {
        Self::new([t.clone(), t.clone(), t], provenance, labels)
    }

    pub fn zero(kind: ScalarKind, dim: usize) -> Self {
        let z = StructureTensor::zeros(kind, dim, 3);
        Self::new([z.clone(), z.clone(), z], "zero", Vec::new()).expect("consistent shapes")
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `products()[i]` is `{,,}_{i+1}`.
    pub fn products(&self) -> &[StructureTensor; 3] {
        &self.products
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn with_products(&self, products: [StructureTensor; 3]) -> Result<Self, TrisysError> {
        Self::new(products, self.provenance.clone(), self.labels.clone())
    }

    /// `{a,b,c}ᵢ` for `i ∈ {1,2,3}`.
    pub fn product(&self, i: usize, a: &[Scalar], b: &[Scalar], c: &[Scalar]) -> Vec<Scalar> {
        self.products[i - 1].apply(&[a, b, c])
    }

    pub fn model(&self) -> TensorModel<'_> {
        TensorModel::new(
            self.kind,
            self.dim,
            vec![(Some(1), &self.products[0]), (Some(2), &self.products[1]), (Some(3), &self.products[2])],
        )
        .with_labels(&self.labels)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "type": "trisystem",
            "dim": self.dim,
            "scalar": self.kind,
            "t1": self.products[0].to_json(),
            "t2": self.products[1].to_json(),
            "t3": self.products[2].to_json(),
            "provenance": self.provenance,
            "labels": self.labels,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, TrisysError> {
        if let Some(t) = v.get("type").and_then(Value::as_str) {
            if t != "trisystem" {
                return Err(TrisysError::Json(format!("expected a trisystem, found {t}")));
            }
        }
        let (kind, dim) = header(v)?;
        let t = |name: &str| -> Result<StructureTensor, TrisysError> {
            Ok(StructureTensor::from_json(kind, dim, 3, field(v, name)?)?)
        };
        let provenance = v.get("provenance").and_then(Value::as_str).unwrap_or("custom");
        Self::new([t("t1")?, t("t2")?, t("t3")?], provenance, labels_from_json(v)?)
    }
}

/// `{a,b,c}₁ = (a⊣b)⊣c`, `{a,b,c}₂ = (a⊢b)⊣c`, `{a,b,c}₃ = (a⊢b)⊢c`.
pub fn att1_from_dialgebra(d: &DialgebraInstance) -> TrisystemInstance {
    let model = d.model();
    let lazy = Att1(&model);
    let products = [1, 2, 3].map(|k| materialize(&lazy, Some(k)));
    TrisystemInstance::new(products, "att1", d.labels().to_vec()).expect("consistent shapes")
}

/// `{a,b,c}₁ = a⊣(b*⊣c)`, `{a,b,c}₂ = a⊢(b*⊣c)`, `{a,b,c}₃ = a⊢(b*⊢c)`.
pub fn att2_from_dialgebra(d: &DialgebraInstance) -> Result<TrisystemInstance, TrisysError> {
    if d.involution().is_none() {
        return Err(TrisysError::NoInvolution);
    }
    let model = d.model();
    let lazy = Att2(&model);
    let products = [1, 2, 3].map(|k| materialize(&lazy, Some(k)));
    TrisystemInstance::new(products, "att2", d.labels().to_vec())
}

/// The two Jordan triple products `⟨,,⟩₁`, `⟨,,⟩₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedJTD {
    pub j1: StructureTensor,
    pub j2: StructureTensor,
    labels: Vec<String>,
}

impl DerivedJTD {
    pub fn model(&self) -> TensorModel<'_> {
        TensorModel::new(self.j1.kind(), self.j1.dim(), vec![(Some(1), &self.j1), (Some(2), &self.j2)])
            .with_labels(&self.labels)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "type": "jtd",
            "dim": self.j1.dim(),
            "scalar": self.j1.kind(),
            "j1": self.j1.to_json(),
            "j2": self.j2.to_json(),
            "labels": self.labels,
        })
    }
}

/// The Leibniz triple product `[,,]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedLeibTS {
    pub bracket: StructureTensor,
    labels: Vec<String>,
}

impl DerivedLeibTS {
    pub fn model(&self) -> TensorModel<'_> {
        TensorModel::new(self.bracket.kind(), self.bracket.dim(), vec![(None, &self.bracket)]).with_labels(&self.labels)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "type": "leibts",
            "dim": self.bracket.dim(),
            "scalar": self.bracket.kind(),
            "lb": self.bracket.to_json(),
            "labels": self.labels,
        })
    }
}

pub fn jtd_products(t: &TrisystemInstance) -> DerivedJTD {
    let model = t.model();
    let lazy = Jtd(&model);
    DerivedJTD {
        j1: materialize(&lazy, Some(1)),
        j2: materialize(&lazy, Some(2)),
        labels: t.labels.clone(),
    }
}

pub fn leibts_bracket(t: &TrisystemInstance) -> DerivedLeibTS {
    let model = t.model();
    DerivedLeibTS { bracket: materialize(&Leibts(&model), None), labels: t.labels.clone() }
}

/// Runs every chain of a catalog set on a model.
pub fn check_variety<M: Model>(model: &M, set: &str, opts: &CheckOptions) -> Result<Report, CheckError> {
    check_chains(&set.to_ascii_uppercase(), &catalog::set(set)?, model, opts)
}

/// Named statements checkable on any dialgebra model: `(name, set, summary)`.
pub const THEOREMS: &[(&str, &str, &str)] = &[
    ("asstoass", "ATT1", "first-kind triple products of a dialgebra satisfy ATT1"),
    ("asstojordan", "JTD", "Jordan products of the first-kind trisystem satisfy JTD"),
    ("asstoleibniz", "LEIBTS", "Leibniz bracket of the first-kind trisystem satisfies LTSA, LTSB"),
    ("att2", "ATT2", "second-kind triple products of a dialgebra with involution satisfy ATT2"),
    ("att2jordan", "JTD", "Jordan products of the second-kind trisystem satisfy JTD"),
    ("att2leibniz", "LEIBTS", "Leibniz bracket of the second-kind trisystem satisfies LTSA, LTSB"),
    ("dminus", "LEIBNIZ", "a⊣b − b⊢a is a right Leibniz bracket"),
];

/// Checks a named statement on a dialgebra model. Second-kind statements
/// need an involution on the model.
pub fn check_theorem<M: Model>(name: &str, dialgebra: &M, opts: &CheckOptions) -> Result<Report, CheckError> {
    let started = Instant::now();
    let (_, set, summary) = THEOREMS
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| CheckError::UnknownSet(format!("theorem {name}")))?;
    let first = Att1(dialgebra);
    let second = Att2(dialgebra);
    let second_kind = name.starts_with("att2");
    if second_kind && dialgebra.star(&dialgebra.element(0)).is_none() {
        return Err(CheckError::ModeUnavailable("second-kind products without an involution"));
    }
    let report = match name {
        "asstoass" => check_variety(&first, set, opts)?,
        "asstojordan" => check_variety(&Jtd(&first), set, opts)?,
        "asstoleibniz" => check_variety(&Leibts(&first), set, opts)?,
        "att2" => check_variety(&second, set, opts)?,
        "att2jordan" => check_variety(&Jtd(&second), set, opts)?,
        "att2leibniz" => check_variety(&Leibts(&second), set, opts)?,
        "dminus" => crate::dialg::check_right_leibniz_model(&DMinus(dialgebra), opts)?,
        _ => unreachable!("listed above"),
    };
    let mut r = Report::merge(name, vec![report], started).with_note(*summary);
    r.chains.iter_mut().for_each(|c| c.name = c.name.rsplit('/').next().unwrap_or(&c.name).to_string());
    Ok(r)
}

/// Echelon basis of the span of `{a,b,c}₁ − {a,b,c}₂` and `{a,b,c}₁ − {a,b,c}₃`
/// over all basis triples.
pub fn ann_subspace(t: &TrisystemInstance) -> Vec<Vec<Scalar>> {
    let mut ech = Echelon::new(t.kind, t.dim);
    for idx in t.products[0].indices() {
        let p1 = t.products[0].entry_dense(&idx);
        for other in &t.products[1..] {
            ech.insert(sub_vectors(&p1, &other.entry_dense(&idx)));
        }
    }
    ech.rows().to_vec()
}

/// Verifies that a complement of the annihilator part is closed under the
/// three products, that they coincide on it, and that it satisfies the
/// one-product identity set `set` (`ATS1` or `ATS2`).
pub fn complement_closure_check(
    t: &TrisystemInstance,
    complement: &[Vec<Scalar>],
    set: &str,
    opts: &CheckOptions,
) -> Result<Report, TrisysError> {
    let started = Instant::now();
    let ann = ann_subspace(t);
    let given = span_basis(complement)?.len();
    let mut joint = ann.clone();
    joint.extend_from_slice(complement);
    let joint = span_basis(&joint)?.len();
    if given != complement.len() || joint != t.dim || ann.len() + given != t.dim {
        return Err(TrisysError::NotComplement { ann: ann.len(), given, joint, dim: t.dim });
    }
    let cs = CoordinateSystem::new(t.kind, t.dim, complement.to_vec())?;
    let r = complement.len();
    let names: Vec<String> = (1..=r).map(|i| format!("c{i}")).collect();
    let render = |v: &[Scalar]| render_combination(v, |i| t.labels[i].clone());
    let mut closure = Vec::new();
    let mut coincide = Vec::new();
    let mut restricted: Vec<StructureTensor> = (0..3).map(|_| StructureTensor::zeros(t.kind, r, 3)).collect();
    let triples = r * r * r;
    for idx in restricted[0].indices().collect::<Vec<_>>() {
        let args: Vec<&[Scalar]> = idx.iter().map(|&i| complement[i].as_slice()).collect();
        let values: Vec<Vec<Scalar>> = t.products.iter().map(|p| p.apply(&args)).collect();
        let assignment: Vec<(String, String)> =
            ["a", "b", "c"].iter().zip(&idx).map(|(v, &i)| (v.to_string(), names[i].clone())).collect();
        for (k, v) in values.iter().enumerate() {
            match cs.coords(v)? {
                Some(c) => restricted[k].set_entry(&idx, c),
                None if closure.len() < opts.max_witnesses => closure.push(Witness {
                    assignment: assignment.clone(),
                    difference: k + 1,
                    residual: render(v),
                }),
                None => {}
            }
        }
        for k in 1..3 {
            if values[0] != values[k] && coincide.len() < opts.max_witnesses {
                coincide.push(Witness {
                    assignment: assignment.clone(),
                    difference: k,
                    residual: render(&sub_vectors(&values[0], &values[k])),
                });
            }
        }
    }
    let closed = closure.is_empty();
    let mut chains = vec![
        ChainReport::from_failures("closure", triples as u64, closure),
        ChainReport::from_failures("coincide", triples as u64, coincide),
    ];
    let mut notes = vec![format!("complement basis: {}", (0..r).map(|i| format!("{}={}", names[i], render(&complement[i]))).collect::<Vec<_>>().join(", "))];
    if closed {
        let model = TensorModel::new(t.kind, r, vec![(None, &restricted[0])]);
        let sub = check_chains(set, &catalog::set(set)?, &model, opts)?;
        chains.extend(sub.chains);
    } else {
        notes.push(format!("{set} not checked: complement is not closed"));
    }
    let mut report = Report::new(format!("COMPLEMENT/{}", set.to_ascii_uppercase()), chains, started);
    report.notes = notes;
    Ok(report)
}

/// Matrices `M_m` with `{a,b,c} = abc` (first kind) or `{a,b,c} = abᵀc`
/// (second kind) as a trisystem with three equal products.
pub fn matrix_triple_system(kind: ScalarKind, m: usize, second_kind: bool) -> TrisystemInstance {
    let n = m * m;
    let t = StructureTensor::from_fn(kind, n, 3, |idx| {
        let (i1, j1) = (idx[0] / m, idx[0] % m);
        let (mut i2, mut j2) = (idx[1] / m, idx[1] % m);
        if second_kind {
            std::mem::swap(&mut i2, &mut j2);
        }
        let (i3, j3) = (idx[2] / m, idx[2] % m);
        if j1 == i2 && j2 == i3 {
            unit_vector(kind, n, i1 * m + j3)
        } else {
            vec![Scalar::zero(kind); n]
        }
    });
    let labels = (0..n).map(|i| format!("e{}{}", i / m + 1, i % m + 1)).collect();
    let provenance = if second_kind { "ats2" } else { "ats1" };
    TrisystemInstance::from_triple_system(t, provenance, labels).expect("consistent shapes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dialg::{matrix_dialgebra, BlockContext, FreeDialgebra};

    fn gf5() -> ScalarKind {
        ScalarKind::prime(5).unwrap()
    }

    fn m21() -> DialgebraInstance {
        matrix_dialgebra(BlockContext::new(2, 1, gf5()).unwrap()).unwrap()
    }

    #[test]
    fn first_kind_from_matrices_passes() {
        let t = att1_from_dialgebra(&m21());
        let opts = CheckOptions::default();
        assert!(check_variety(&t.model(), "ATT1", &opts).unwrap().passed());
        assert!(check_variety(&jtd_products(&t).model(), "JTD", &opts).unwrap().passed());
        assert!(check_variety(&leibts_bracket(&t).model(), "LEIBTS", &opts).unwrap().passed());
    }

    #[test]
    fn free_theorems_on_generators() {
        let f = FreeDialgebra::new(ScalarKind::Rational, 5, 5);
        for (name, _, _) in THEOREMS {
            let r = check_theorem(name, &f, &CheckOptions::default()).unwrap();
            assert!(r.passed(), "{name}: {}", r.render_text());
            assert!(r.chains.iter().all(|c| c.evaluations == 1));
        }
    }

    #[test]
    fn second_kind_products_do_not_satisfy_first_kind_axioms() {
        let f = FreeDialgebra::new(ScalarKind::Rational, 5, 5);
        assert!(!check_variety(&Att2(&f), "ATT1", &CheckOptions::default()).unwrap().passed());
    }

    #[test]
    fn equal_products_have_no_annihilator() {
        let t = matrix_triple_system(gf5(), 2, true);
        assert!(ann_subspace(&t).is_empty());
        assert!(check_variety(&TensorModel::new(gf5(), 4, vec![(None, &t.products()[0])]), "ATS2", &CheckOptions::default())
            .unwrap()
            .passed());
    }

    #[test]
    fn zero_trisystem() {
        let t = TrisystemInstance::zero(gf5(), 3);
        assert!(ann_subspace(&t).is_empty());
        assert!(leibts_bracket(&t).bracket.is_zero());
        assert!(check_variety(&jtd_products(&t).model(), "JTD", &CheckOptions::default()).unwrap().passed());
    }

    #[test]
    fn missing_involution() {
        let d = m21().with_involution(None).unwrap();
        assert_eq!(att2_from_dialgebra(&d), Err(TrisysError::NoInvolution));
    }

    #[test]
    fn json_round_trip() {
        let t = att1_from_dialgebra(&m21());
        assert_eq!(TrisystemInstance::from_json(&t.to_json()).unwrap(), t);
    }
}
