//! Di-endomorphisms, the operator modules generated by the L/R families of
//! a trisystem, and the standard embeddings into dialgebras.

mod diend;
mod first;
mod operators;
mod second;

pub use diend::{
    check_diendomorphism_lemma, check_extra_identity, diend_products, extra_identity_counterexample, DiEndModel,
    DiEndPair, OpDiEndPair,
};
pub use first::{build_m, build_u, MModule};
pub use operators::{l_map, lr_operators, r_map, LrOperators, MGenerator, MOperator, OperatorModule, Triangle};
pub use second::{build_l_r, build_u2, LrModules};

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::dialg::{DialgError, DialgebraInstance};
use crate::eval::{CheckError, Report};
use crate::exactlin::{LinAlgError, Scalar};

pub(crate) use diend::ChainTally;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbedError {
    #[error("shape: {0}")]
    Shape(String),
    #[error("input is not in {set}: failing {}", failing.join(", "))]
    NotInVariety { set: String, failing: Vec<String> },
    #[error("operator products leave the span: {0}")]
    NotClosed(String),
    #[error("* is not well defined on {module}: generator rank {rank}, rank with images {joint}")]
    StarNotWellDefined { module: &'static str, rank: usize, joint: usize },
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Dialg(#[from] DialgError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// How right actions are stored in serialized embeddings.
pub const CONVENTION: &str = "left operators (f1,f2) act on column vectors: f≺x = f1·x, f≻x = f2·x; \
right operators (g1,g2) act on row vectors: x≺ρ = x·g2, x≻ρ = x·g1; \
operator blocks use the listed generators as basis";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingKind {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub name: String,
    pub offset: usize,
    pub dim: usize,
    /// Basis labels of the block.
    pub labels: Vec<String>,
}

/// A dialgebra containing a trisystem, with its block decomposition and
/// verification reports.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub kind: EmbeddingKind,
    pub blocks: Vec<Block>,
    pub algebra: DialgebraInstance,
    /// Dialgebra axioms, and the involution axioms for the second kind.
    pub axioms: Report,
    /// Triple products recovered from the dialgebra products.
    pub recovery: Report,
    /// Closed-form product identities of the operator modules.
    pub operators: Report,
}

impl Embedding {
    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    /// A vector of the trisystem placed in the `A` block.
    pub fn embed(&self, x: &[Scalar]) -> Vec<Scalar> {
        let a = self.block("A").expect("every embedding has an A block");
        assert_eq!(x.len(), a.dim, "vector of the embedded module");
        let mut v = vec![Scalar::zero(self.algebra.kind()); self.algebra.dim()];
        v[a.offset..a.offset + a.dim].clone_from_slice(x);
        v
    }

    pub fn passed(&self) -> bool {
        self.axioms.passed() && self.recovery.passed() && self.operators.passed()
    }

    pub fn to_json(&self) -> Value {
        let report = |r: &Report| {
            let mut v = serde_json::to_value(r).expect("reports serialize");
            v["status"] = json!(if r.passed() { "pass" } else { "fail" });
            v
        };
        json!({
            "type": "embedding",
            "kind": self.kind,
            "convention": CONVENTION,
            "blocks": self.blocks,
            "dialgebra": self.algebra.to_json(),
            "axioms": report(&self.axioms),
            "recovery": report(&self.recovery),
            "operators": report(&self.operators),
        })
    }
}

/// Runs `members` on every tuple of basis indices and compares consecutive
/// members.
pub(crate) fn tuple_chain(
    name: &str,
    n: usize,
    vars: &[&str],
    labels: &[String],
    max_witnesses: usize,
    members: impl Fn(&[usize]) -> Vec<Vec<Scalar>>,
) -> crate::eval::ChainReport {
    let mut tally = ChainTally::new(name, max_witnesses);
    let total = n.pow(vars.len() as u32);
    let mut idx = vec![0usize; vars.len()];
    for flat in 0..total {
        let mut r = flat;
        for slot in idx.iter_mut().rev() {
            *slot = r % n;
            r /= n;
        }
        let assignment = || vars.iter().zip(&idx).map(|(v, &i)| (v.to_string(), labels[i].clone())).collect();
        tally.record(assignment, &members(&idx));
    }
    tally.finish()
}
