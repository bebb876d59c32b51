//! Evaluation of identity chains in concrete models.
//!
//! A [`Model`] supplies a vector space, a set of multilinear operations keyed
//! by bracket subscript, and the elements to substitute for variables: basis
//! vectors of a finite-dimensional module, or free generators of a symbolic
//! model.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exactlin::{add_scaled, format_vector, is_zero_vector, unit_vector, Matrix, Scalar, ScalarKind, StructureTensor};
use crate::identity_dsl::{IdentityChain, Node};

/// Bracket subscript selecting an operation; `None` for unsubscripted brackets.
pub type OpKey = Option<u32>;

/// Default bound on tuple evaluations in exhaustive mode.
pub const DEFAULT_EVAL_CAP: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_EVAL_CAP`].
pub const EVAL_CAP_ENV: &str = "TRISYS_EVAL_CAP";

/// Elements substituted for variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    /// A module with this many basis vectors.
    Basis(usize),
    /// A free model with this many generators; identities are evaluated once
    /// on distinct generators.
    Generators(usize),
}

pub trait Model: Sync {
    type Elem: Clone + Send + Sync;

    fn kind(&self) -> ScalarKind;
    /// Supported operations with their arities.
    fn ops(&self) -> Vec<(OpKey, usize)>;
    fn apply(&self, key: OpKey, args: &[&Self::Elem]) -> Self::Elem;
    fn zero(&self) -> Self::Elem;
    /// `acc += c * x`.
    fn add_scaled(&self, acc: &mut Self::Elem, c: &Scalar, x: &Self::Elem);
    fn is_zero(&self, x: &Self::Elem) -> bool;
    fn render(&self, x: &Self::Elem) -> String;
    fn space(&self) -> Space;
    /// Basis vector or generator `i`.
    fn element(&self, i: usize) -> Self::Elem;
    fn label(&self, i: usize) -> String {
        format!("e{}", i + 1)
    }
    /// A random element, for models supporting sampled checks.
    fn random(&self, _rng: &mut ChaCha8Rng) -> Option<Self::Elem> {
        None
    }
    /// The involution, when the model carries one.
    fn star(&self, _x: &Self::Elem) -> Option<Self::Elem> {
        None
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut d = a.clone();
        self.add_scaled(&mut d, &-Scalar::one(self.kind()), b);
        d
    }
}

/// Forwards the vector-space part of [`Model`] to the wrapped model `self.0`.
macro_rules! delegate_space {
    () => {
        fn kind(&self) -> $crate::exactlin::ScalarKind {
            self.0.kind()
        }

        fn zero(&self) -> Self::Elem {
            self.0.zero()
        }

        fn add_scaled(&self, acc: &mut Self::Elem, c: &$crate::exactlin::Scalar, x: &Self::Elem) {
            self.0.add_scaled(acc, c, x)
        }

        fn is_zero(&self, x: &Self::Elem) -> bool {
            self.0.is_zero(x)
        }

        fn render(&self, x: &Self::Elem) -> String {
            self.0.render(x)
        }

        fn space(&self) -> $crate::eval::Space {
            self.0.space()
        }

        fn element(&self, i: usize) -> Self::Elem {
            self.0.element(i)
        }

        fn label(&self, i: usize) -> String {
            self.0.label(i)
        }

        fn random(&self, rng: &mut rand_chacha::ChaCha8Rng) -> Option<Self::Elem> {
            self.0.random(rng)
        }
    };
}
pub(crate) use delegate_space;

/// A finite-dimensional model given by structure tensors.
#[derive(Clone, Debug)]
pub struct TensorModel<'a> {
    kind: ScalarKind,
    dim: usize,
    ops: Vec<(OpKey, &'a StructureTensor)>,
    involution: Option<&'a Matrix>,
    labels: Option<&'a [String]>,
}

impl<'a> TensorModel<'a> {
    pub fn new(kind: ScalarKind, dim: usize, ops: Vec<(OpKey, &'a StructureTensor)>) -> Self {
        for (_, t) in &ops {
            assert_eq!((t.kind(), t.dim()), (kind, dim), "tensor shape");
        }
        TensorModel { kind, dim, ops, involution: None, labels: None }
    }

    pub fn with_involution(mut self, m: Option<&'a Matrix>) -> Self {
        self.involution = m;
        self
    }

    pub fn with_labels(mut self, labels: &'a [String]) -> Self {
        if labels.len() == self.dim {
            self.labels = Some(labels);
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn tensor(&self, key: OpKey) -> &StructureTensor {
        self.ops
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, t)| *t)
            .unwrap_or_else(|| panic!("operation {key:?} not provided"))
    }
}

impl Model for TensorModel<'_> {
    type Elem = Vec<Scalar>;

    fn kind(&self) -> ScalarKind {
        self.kind
    }

    fn ops(&self) -> Vec<(OpKey, usize)> {
        self.ops.iter().map(|(k, t)| (*k, t.arity())).collect()
    }

    fn apply(&self, key: OpKey, args: &[&Vec<Scalar>]) -> Vec<Scalar> {
        let args: Vec<&[Scalar]> = args.iter().map(|a| a.as_slice()).collect();
        self.tensor(key).apply(&args)
    }

    fn zero(&self) -> Vec<Scalar> {
        vec![Scalar::zero(self.kind); self.dim]
    }

    fn add_scaled(&self, acc: &mut Vec<Scalar>, c: &Scalar, x: &Vec<Scalar>) {
        add_scaled(acc, c, x);
    }

    fn is_zero(&self, x: &Vec<Scalar>) -> bool {
        is_zero_vector(x)
    }

    fn render(&self, x: &Vec<Scalar>) -> String {
        render_combination(x, |i| self.label(i))
    }

    fn space(&self) -> Space {
        Space::Basis(self.dim)
    }

    fn element(&self, i: usize) -> Vec<Scalar> {
        unit_vector(self.kind, self.dim, i)
    }

    fn label(&self, i: usize) -> String {
        self.labels.map_or_else(|| format!("e{}", i + 1), |l| l[i].clone())
    }

    fn random(&self, rng: &mut ChaCha8Rng) -> Option<Vec<Scalar>> {
        Some((0..self.dim).map(|_| Scalar::random(self.kind, rng)).collect())
    }

    fn star(&self, x: &Vec<Scalar>) -> Option<Vec<Scalar>> {
        self.involution.map(|m| m.apply(x))
    }
}

/// Renders `Σ xᵢ labelᵢ`, e.g. `2*e1 - e3`.
pub fn render_combination(x: &[Scalar], label: impl Fn(usize) -> String) -> String {
    let mut s = String::new();
    for (i, c) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        let neg = crate::exactlin::is_negative(c);
        let mag = if neg { -c } else { c.clone() };
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if !mag.is_one() {
            s.push_str(&format!("{mag}*"));
        }
        s.push_str(&label(i));
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("operation {key} of arity {arity} is not provided by the model")]
    Unresolved { key: String, arity: usize },
    #[error("exhaustive check needs {needed} evaluations, above the cap of {cap}; use sampled mode with an explicit seed")]
    OverCap { needed: u128, cap: u64 },
    #[error("identity has {needed} variables but the free model has only {available} generators")]
    TooFewGenerators { needed: usize, available: usize },
    #[error("{0} mode is not available for this model")]
    ModeUnavailable(&'static str),
    #[error("unknown axiom set {0}")]
    UnknownSet(String),
}

/// How variables are instantiated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum Mode {
    /// Exhaustive on bases within the cap, generators on free models.
    Auto,
    Exhaustive,
    Sampled { count: usize, seed: u64 },
    Generators,
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub mode: Mode,
    pub eval_cap: u64,
    /// Failures reported per chain.
    pub max_witnesses: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { mode: Mode::Auto, eval_cap: DEFAULT_EVAL_CAP, max_witnesses: 5 }
    }
}

impl CheckOptions {
    /// Defaults, with the cap taken from `TRISYS_EVAL_CAP` when set.
    pub fn from_env() -> Self {
        let mut o = Self::default();
        if let Some(cap) = std::env::var(EVAL_CAP_ENV).ok().and_then(|v| v.parse().ok()) {
            o.eval_cap = cap;
        }
        o
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Variable assignment, as rendered elements.
    pub assignment: Vec<(String, String)>,
    /// 1-based index of the failing consecutive difference.
    pub difference: usize,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub name: String,
    pub status: Status,
    pub mode: String,
    pub evaluations: u64,
    pub witnesses: Vec<Witness>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// A single named check with optional failure descriptions.
    pub fn from_failures(name: impl Into<String>, evaluations: u64, failures: Vec<Witness>) -> Self {
        ChainReport {
            name: name.into(),
            status: if failures.is_empty() { Status::Pass } else { Status::Fail },
            mode: "exhaustive".into(),
            evaluations,
            witnesses: failures,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub set: String,
    pub chains: Vec<ChainReport>,
    pub evaluations: u64,
    /// Wall-clock seconds; the only nondeterministic field.
    pub elapsed: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(set: impl Into<String>, chains: Vec<ChainReport>, started: Instant) -> Self {
        let evaluations = chains.iter().map(|c| c.evaluations).sum();
        Report {
            set: set.into(),
            chains,
            evaluations,
            elapsed: started.elapsed().as_secs_f64(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.chains.iter().all(ChainReport::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ChainReport> {
        self.chains.iter().filter(|c| !c.passed())
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Concatenates the chains of several reports.
    pub fn merge(set: impl Into<String>, parts: Vec<Report>, started: Instant) -> Self {
        let mut notes = Vec::new();
        let mut chains = Vec::new();
        for p in parts {
            notes.extend(p.notes);
            chains.extend(p.chains.into_iter().map(|mut c| {
                c.name = format!("{}/{}", p.set, c.name);
                c
            }));
        }
        let mut r = Report::new(set, chains, started);
        r.notes = notes;
        r
    }

    pub fn render_text(&self) -> String {
        let mut s = format!(
            "{}: {} ({} evaluations, {:.3}s)\n",
            self.set,
            if self.passed() { "pass" } else { "FAIL" },
            self.evaluations,
            self.elapsed
        );
        for c in &self.chains {
            s.push_str(&format!("  {:<10} {:?} [{}]\n", c.name, c.status, c.mode));
            for w in &c.witnesses {
                let assign: Vec<String> = w.assignment.iter().map(|(v, e)| format!("{v}={e}")).collect();
                s.push_str(&format!(
                    "    difference {}: {} -> {}\n",
                    w.difference,
                    assign.join(", "),
                    w.residual
                ));
            }
        }
        for n in &self.notes {
            s.push_str(&format!("  note: {n}\n"));
        }
        s
    }
}

fn resolve<M: Model>(chain: &IdentityChain, model: &M) -> Result<(), CheckError> {
    fn walk(n: &Node, ops: &[(OpKey, usize)]) -> Result<(), CheckError> {
        if let Node::Op { sub, args } = n {
            if !ops.contains(&(*sub, args.len())) {
                return Err(CheckError::Unresolved {
                    key: sub.map_or("unsubscripted".into(), |s| format!("_{s}")),
                    arity: args.len(),
                });
            }
            args.iter().try_for_each(|a| walk(a, ops))?;
        }
        Ok(())
    }
    let ops = model.ops();
    chain
        .members()
        .iter()
        .flat_map(|p| p.terms())
        .try_for_each(|(m, _)| walk(m.root(), &ops))
}

fn eval_node<M: Model>(model: &M, n: &Node, assignment: &BTreeMap<&str, M::Elem>) -> M::Elem {
    match n {
        Node::Var(v) => assignment[v.as_str()].clone(),
        Node::Op { sub, args } => {
            let vals: Vec<M::Elem> = args.iter().map(|a| eval_node(model, a, assignment)).collect();
            let refs: Vec<&M::Elem> = vals.iter().collect();
            model.apply(*sub, &refs)
        }
    }
}

/// First nonvanishing difference, 1-based, with its value.
fn first_residual<M: Model>(
    model: &M,
    diffs: &[crate::identity_dsl::Polynomial],
    assignment: &BTreeMap<&str, M::Elem>,
) -> Option<(usize, M::Elem)> {
    for (k, p) in diffs.iter().enumerate() {
        let mut acc = model.zero();
        for (m, c) in p.terms() {
            let v = eval_node(model, m.root(), assignment);
            model.add_scaled(&mut acc, &Scalar::from_i64(model.kind(), c), &v);
        }
        if !model.is_zero(&acc) {
            return Some((k + 1, acc));
        }
    }
    None
}

const BLOCK: u64 = 1 << 13;

/// Checks one identity chain in `model`.
pub fn check_identity<M: Model>(
    chain: &IdentityChain,
    model: &M,
    opts: &CheckOptions,
) -> Result<ChainReport, CheckError> {
    resolve(chain, model)?;
    let vars: Vec<String> = chain.variables().into_iter().collect();
    let diffs = chain.differences();
    let d = vars.len();
    let mode = match (opts.mode, model.space()) {
        (Mode::Auto, Space::Generators(_)) => Mode::Generators,
        (Mode::Auto, Space::Basis(_)) => Mode::Exhaustive,
        (m, _) => m,
    };
    let witness = |assignment: &BTreeMap<&str, M::Elem>, k: usize, r: &M::Elem| Witness {
        assignment: vars
            .iter()
            .map(|v| (v.clone(), model.render(&assignment[v.as_str()])))
            .collect(),
        difference: k,
        residual: model.render(r),
    };
    let mut witnesses = Vec::new();
    let evaluations: u64;
    let mode_name: String;
    match mode {
        Mode::Generators => {
            let Space::Generators(g) = model.space() else {
                return Err(CheckError::ModeUnavailable("generator"));
            };
            if d > g {
                return Err(CheckError::TooFewGenerators { needed: d, available: g });
            }
            let assignment: BTreeMap<&str, M::Elem> =
                vars.iter().enumerate().map(|(i, v)| (v.as_str(), model.element(i))).collect();
            if let Some((k, r)) = first_residual(model, &diffs, &assignment) {
                witnesses.push(witness(&assignment, k, &r));
            }
            evaluations = 1;
            mode_name = "generators".into();
        }
        Mode::Exhaustive => {
            let Space::Basis(dim) = model.space() else {
                return Err(CheckError::ModeUnavailable("exhaustive"));
            };
            let total = (dim as u128).pow(d as u32);
            if total > opts.eval_cap as u128 {
                return Err(CheckError::OverCap { needed: total, cap: opts.eval_cap });
            }
            let total = total as u64;
            let basis: Vec<M::Elem> = (0..dim).map(|i| model.element(i)).collect();
            let assign = |t: u64| {
                let mut idx = vec![0usize; d];
                let mut rest = t;
                for slot in idx.iter_mut().rev() {
                    *slot = (rest % dim as u64) as usize;
                    rest /= dim as u64;
                }
                vars.iter()
                    .zip(idx)
                    .map(|(v, i)| (v.as_str(), basis[i].clone()))
                    .collect::<BTreeMap<&str, M::Elem>>()
            };
            let mut done = 0;
            while done < total && witnesses.len() < opts.max_witnesses {
                let end = (done + BLOCK).min(total);
                let mut fails: Vec<(u64, usize, M::Elem)> = (done..end)
                    .into_par_iter()
                    .filter_map(|t| first_residual(model, &diffs, &assign(t)).map(|(k, r)| (t, k, r)))
                    .collect();
                fails.sort_by_key(|f| f.0);
                for (t, k, r) in fails.into_iter().take(opts.max_witnesses - witnesses.len()) {
                    witnesses.push(witness(&assign(t), k, &r));
                }
                done = end;
            }
            evaluations = done;
            mode_name = "exhaustive".into();
        }
        Mode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut samples = Vec::with_capacity(count);
            for _ in 0..count {
                let mut a = BTreeMap::new();
                for v in &vars {
                    let x = model.random(&mut rng).ok_or(CheckError::ModeUnavailable("sampled"))?;
                    a.insert(v.as_str(), x);
                }
                samples.push(a);
            }
            let fails: Vec<(usize, usize, M::Elem)> = samples
                .par_iter()
                .enumerate()
                .filter_map(|(s, a)| first_residual(model, &diffs, a).map(|(k, r)| (s, k, r)))
                .collect();
            for (s, k, r) in fails.into_iter().take(opts.max_witnesses) {
                witnesses.push(witness(&samples[s], k, &r));
            }
            evaluations = count as u64;
            mode_name = format!("sampled(count={count}, seed={seed})");
        }
        Mode::Auto => unreachable!("resolved above"),
    }
    Ok(ChainReport {
        name: chain.name().to_string(),
        status: if witnesses.is_empty() { Status::Pass } else { Status::Fail },
        mode: mode_name,
        evaluations,
        witnesses,
    })
}

/// Checks every chain of a list and aggregates.
pub fn check_chains<M: Model>(
    set: &str,
    chains: &[IdentityChain],
    model: &M,
    opts: &CheckOptions,
) -> Result<Report, CheckError> {
    let started = Instant::now();
    let reports = chains
        .iter()
        .map(|c| check_identity(c, model, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Report::new(set, reports, started))
}

/// Vector rendering helper for reports on plain coordinate vectors.
pub fn render_vector(v: &[Scalar]) -> String {
    format_vector(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity_dsl::parse_one;

    fn q(n: i64) -> Scalar {
        Scalar::from_i64(ScalarKind::Rational, n)
    }

    /// Q[x]/(x²) as a commutative associative algebra.
    fn dual() -> StructureTensor {
        StructureTensor::from_fn(ScalarKind::Rational, 2, 2, |idx| match (idx[0], idx[1]) {
            (0, 0) => vec![q(1), q(0)],
            (0, 1) | (1, 0) => vec![q(0), q(1)],
            _ => vec![q(0), q(0)],
        })
    }

    #[test]
    fn associativity_holds_exhaustively() {
        let t = dual();
        let m = TensorModel::new(ScalarKind::Rational, 2, vec![(None, &t)]);
        let c = parse_one("{{a,b},c} = {a,{b,c}}").unwrap();
        let r = check_identity(&c, &m, &CheckOptions::default()).unwrap();
        assert!(r.passed());
        assert_eq!(r.evaluations, 8);
    }

    #[test]
    fn failing_identity_reports_first_tuple() {
        let t = dual();
        let m = TensorModel::new(ScalarKind::Rational, 2, vec![(None, &t)]);
        let c = parse_one("{a,b} = 0").unwrap();
        let r = check_identity(&c, &m, &CheckOptions::default()).unwrap();
        assert!(!r.passed());
        let w = &r.witnesses[0];
        assert_eq!(w.assignment, vec![("a".into(), "e1".into()), ("b".into(), "e1".into())]);
        assert_eq!(w.residual, "e1");
        assert_eq!(r.witnesses.len(), 3);
    }

    #[test]
    fn unresolved_operation() {
        let t = dual();
        let m = TensorModel::new(ScalarKind::Rational, 2, vec![(None, &t)]);
        let c = parse_one("{a,b}_1 = {b,a}_1").unwrap();
        assert!(matches!(
            check_identity(&c, &m, &CheckOptions::default()),
            Err(CheckError::Unresolved { .. })
        ));
    }

    #[test]
    fn cap_guards_exhaustive_mode() {
        let t = dual();
        let m = TensorModel::new(ScalarKind::Rational, 2, vec![(None, &t)]);
        let c = parse_one("{{a,b},c} = {a,{b,c}}").unwrap();
        let opts = CheckOptions { eval_cap: 7, ..CheckOptions::default() };
        assert!(matches!(check_identity(&c, &m, &opts), Err(CheckError::OverCap { .. })));
        let sampled = opts.with_mode(Mode::Sampled { count: 20, seed: 1 });
        assert!(check_identity(&c, &m, &sampled).unwrap().passed());
    }

    #[test]
    fn combination_rendering() {
        assert_eq!(render_combination(&[q(2), q(0), q(-1)], |i| format!("e{}", i + 1)), "2*e1 - e3");
        assert_eq!(render_combination(&[q(0)], |_| "x".into()), "0");
    }
}
