use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::dialg::matrix_to_json;
use crate::eval::{render_vector, ChainReport, Model, OpKey, Report, Space, Witness};
use crate::exactlin::{sub_vectors, Matrix, Scalar, ScalarKind};

use super::EmbedError;

fn random_matrix(kind: ScalarKind, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let data = (0..n * n).map(|_| Scalar::random(kind, rng)).collect();
    Matrix::new(kind, n, n, data).expect("square data")
}

fn check_square(a: &Matrix, b: &Matrix) -> Result<(), EmbedError> {
    if a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows() || a.kind() != b.kind() {
        return Err(EmbedError::Shape(format!(
            "maps of shapes {}x{} and {}x{} do not act on one module",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// `(p1, p2) ⊣ (q1, q2) = (p1 q2, p2 q2)` and `(p1, p2) ⊢ (q1, q2) = (p2 q1, p2 q2)`
/// on pairs of matrices.
fn pair_products(p: [&Matrix; 2], q: [&Matrix; 2]) -> ([Matrix; 2], [Matrix; 2]) {
    let shared = p[1].mul(q[1]);
    ([p[0].mul(q[1]), shared.clone()], [p[1].mul(q[0]), shared])
}

fn flatten(a: &Matrix, b: &Matrix) -> Vec<Scalar> {
    a.entries().iter().chain(b.entries()).cloned().collect()
}

fn unflatten(kind: ScalarKind, n: usize, v: &[Scalar]) -> (Matrix, Matrix) {
    assert_eq!(v.len(), 2 * n * n, "flattened pair length");
    let m = |s: &[Scalar]| Matrix::new(kind, n, n, s.to_vec()).expect("square data");
    (m(&v[..n * n]), m(&v[n * n..]))
}

/// A pair of linear maps `f = (f1, f2)` acting on column vectors, with
/// `f ≺ x = f1(x)` and `f ≻ x = f2(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiEndPair {
    pub f1: Matrix,
    pub f2: Matrix,
}

impl DiEndPair {
    pub fn new(f1: Matrix, f2: Matrix) -> Result<Self, EmbedError> {
        check_square(&f1, &f2)?;
        Ok(DiEndPair { f1, f2 })
    }

    pub fn identity(kind: ScalarKind, n: usize) -> Self {
        DiEndPair { f1: Matrix::identity(kind, n), f2: Matrix::identity(kind, n) }
    }

    pub fn zero(kind: ScalarKind, n: usize) -> Self {
        DiEndPair { f1: Matrix::zeros(kind, n, n), f2: Matrix::zeros(kind, n, n) }
    }

    pub fn random(kind: ScalarKind, n: usize, rng: &mut ChaCha8Rng) -> Self {
        DiEndPair { f1: random_matrix(kind, n, rng), f2: random_matrix(kind, n, rng) }
    }

    pub fn kind(&self) -> ScalarKind {
        self.f1.kind()
    }

    pub fn dim(&self) -> usize {
        self.f1.rows()
    }

    /// `f ⊣ g = (f1 g2, f2 g2)`.
    pub fn left(&self, g: &DiEndPair) -> DiEndPair {
        let ([f1, f2], _) = pair_products([&self.f1, &self.f2], [&g.f1, &g.f2]);
        DiEndPair { f1, f2 }
    }

    /// `f ⊢ g = (f2 g1, f2 g2)`.
    pub fn right(&self, g: &DiEndPair) -> DiEndPair {
        let (_, [f1, f2]) = pair_products([&self.f1, &self.f2], [&g.f1, &g.f2]);
        DiEndPair { f1, f2 }
    }

    pub fn prec(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.f1.apply(x)
    }

    pub fn succ(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.f2.apply(x)
    }

    /// Entries of `f1` then `f2`, row-major.
    pub fn flatten(&self) -> Vec<Scalar> {
        flatten(&self.f1, &self.f2)
    }

    pub fn from_flat(kind: ScalarKind, n: usize, v: &[Scalar]) -> Self {
        let (f1, f2) = unflatten(kind, n, v);
        DiEndPair { f1, f2 }
    }

    /// The opposite pair `f̄`, with `x ≺ f̄ = f2(x)` and `x ≻ f̄ = f1(x)`.
    pub fn opposite(&self) -> OpDiEndPair {
        OpDiEndPair { g1: self.f1.transpose(), g2: self.f2.transpose() }
    }

    pub fn to_json(&self) -> Value {
        json!({ "f1": matrix_to_json(&self.f1), "f2": matrix_to_json(&self.f2) })
    }
}

/// `(f ⊣ g, f ⊢ g)`.
pub fn diend_products(f: &DiEndPair, g: &DiEndPair) -> Result<(DiEndPair, DiEndPair), EmbedError> {
    check_square(&f.f1, &g.f1)?;
    Ok((f.left(g), f.right(g)))
}

/// A pair of linear maps acting on row vectors: `x ≺ ρ = x·g2` and
/// `x ≻ ρ = x·g1`. The opposite products `ρ ⊣ σ = (g1 h2, g2 h2)`,
/// `ρ ⊢ σ = (g2 h1, g2 h2)` are matrix products in this convention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDiEndPair {
    pub g1: Matrix,
    pub g2: Matrix,
}

impl OpDiEndPair {
    pub fn new(g1: Matrix, g2: Matrix) -> Result<Self, EmbedError> {
        check_square(&g1, &g2)?;
        Ok(OpDiEndPair { g1, g2 })
    }

    pub fn zero(kind: ScalarKind, n: usize) -> Self {
        OpDiEndPair { g1: Matrix::zeros(kind, n, n), g2: Matrix::zeros(kind, n, n) }
    }

    pub fn dim(&self) -> usize {
        self.g1.rows()
    }

    pub fn left(&self, h: &OpDiEndPair) -> OpDiEndPair {
        let ([g1, g2], _) = pair_products([&self.g1, &self.g2], [&h.g1, &h.g2]);
        OpDiEndPair { g1, g2 }
    }

    pub fn right(&self, h: &OpDiEndPair) -> OpDiEndPair {
        let (_, [g1, g2]) = pair_products([&self.g1, &self.g2], [&h.g1, &h.g2]);
        OpDiEndPair { g1, g2 }
    }

    /// `x ≺ ρ`.
    pub fn prec(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.g2.apply_row(x)
    }

    /// `x ≻ ρ`.
    pub fn succ(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.g1.apply_row(x)
    }

    /// The di-endomorphism `f` with `f̄ = self`.
    pub fn to_diend(&self) -> DiEndPair {
        DiEndPair { f1: self.g1.transpose(), f2: self.g2.transpose() }
    }

    pub fn flatten(&self) -> Vec<Scalar> {
        flatten(&self.g1, &self.g2)
    }

    pub fn from_flat(kind: ScalarKind, n: usize, v: &[Scalar]) -> Self {
        let (g1, g2) = unflatten(kind, n, v);
        OpDiEndPair { g1, g2 }
    }

    pub fn to_json(&self) -> Value {
        json!({ "g1": matrix_to_json(&self.g1), "g2": matrix_to_json(&self.g2) })
    }
}

/// All di-endomorphisms of an `n`-dimensional module as a dialgebra model,
/// with elements flattened by [`DiEndPair::flatten`].
#[derive(Clone, Copy, Debug)]
pub struct DiEndModel {
    pub kind: ScalarKind,
    pub n: usize,
}

impl Model for DiEndModel {
    type Elem = Vec<Scalar>;

    fn kind(&self) -> ScalarKind {
        self.kind
    }

    fn ops(&self) -> Vec<(OpKey, usize)> {
        vec![(Some(1), 2), (Some(2), 2)]
    }

    fn apply(&self, key: OpKey, args: &[&Vec<Scalar>]) -> Vec<Scalar> {
        let f = DiEndPair::from_flat(self.kind, self.n, args[0]);
        let g = DiEndPair::from_flat(self.kind, self.n, args[1]);
        match key {
            Some(1) => f.left(&g).flatten(),
            Some(2) => f.right(&g).flatten(),
            _ => panic!("operation {key:?} not provided"),
        }
    }

    fn zero(&self) -> Vec<Scalar> {
        vec![Scalar::zero(self.kind); 2 * self.n * self.n]
    }

    fn add_scaled(&self, acc: &mut Vec<Scalar>, c: &Scalar, x: &Vec<Scalar>) {
        crate::exactlin::add_scaled(acc, c, x);
    }

    fn is_zero(&self, x: &Vec<Scalar>) -> bool {
        crate::exactlin::is_zero_vector(x)
    }

    fn render(&self, x: &Vec<Scalar>) -> String {
        render_vector(x)
    }

    fn space(&self) -> Space {
        Space::Basis(2 * self.n * self.n)
    }

    fn element(&self, i: usize) -> Vec<Scalar> {
        crate::exactlin::unit_vector(self.kind, 2 * self.n * self.n, i)
    }

    fn random(&self, rng: &mut ChaCha8Rng) -> Option<Vec<Scalar>> {
        Some(DiEndPair::random(self.kind, self.n, rng).flatten())
    }
}

pub(crate) fn random_vector(kind: ScalarKind, n: usize, rng: &mut ChaCha8Rng) -> Vec<Scalar> {
    (0..n).map(|_| Scalar::random(kind, rng)).collect()
}

/// Compares consecutive members of each chain on one input, recording the
/// first `max` failures.
pub(crate) struct ChainTally {
    name: String,
    evaluations: u64,
    failures: Vec<Witness>,
    max: usize,
}

impl ChainTally {
    pub(crate) fn new(name: impl Into<String>, max: usize) -> Self {
        ChainTally { name: name.into(), evaluations: 0, failures: Vec::new(), max }
    }

    pub(crate) fn record(&mut self, assignment: impl FnOnce() -> Vec<(String, String)>, members: &[Vec<Scalar>]) {
        self.evaluations += 1;
        if self.failures.len() >= self.max {
            return;
        }
        let bad = members.windows(2).position(|w| w[0] != w[1]);
        if let Some(k) = bad {
            self.failures.push(Witness {
                assignment: assignment(),
                difference: k + 1,
                residual: render_vector(&sub_vectors(&members[k], &members[k + 1])),
            });
        }
    }

    pub(crate) fn finish(self) -> ChainReport {
        let mut c = ChainReport::from_failures(self.name, self.evaluations, self.failures);
        c.mode = "exhaustive".into();
        c
    }

    pub(crate) fn finish_sampled(self, seed: u64) -> ChainReport {
        let mut c = ChainReport::from_failures(self.name, self.evaluations, self.failures);
        c.mode = format!("sampled(seed={seed})");
        c
    }
}

/// For random `f, g` and `x`:
/// `(f ⊢ g) ≻ x = (f ⊣ g) ≻ x = f ≻ (g ≻ x)`, `(f ⊢ g) ≺ x = f ≻ (g ≺ x)` and
/// `(f ⊣ g) ≺ x = f ≺ (g ≻ x)`.
pub fn check_diendomorphism_lemma(kind: ScalarKind, n: usize, count: usize, seed: u64) -> Report {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tallies = [1, 2, 3].map(|i| ChainTally::new(format!("DIEND{i}"), 5));
    for _ in 0..count {
        let f = DiEndPair::random(kind, n, &mut rng);
        let g = DiEndPair::random(kind, n, &mut rng);
        let x = random_vector(kind, n, &mut rng);
        let (fl, fr) = (f.left(&g), f.right(&g));
        let assign = || vec![("x".to_string(), render_vector(&x))];
        tallies[0].record(assign, &[fr.succ(&x), fl.succ(&x), f.succ(&g.succ(&x))]);
        tallies[1].record(assign, &[fr.prec(&x), f.succ(&g.prec(&x))]);
        tallies[2].record(assign, &[fl.prec(&x), f.prec(&g.succ(&x))]);
    }
    let chains = tallies.into_iter().map(|t| t.finish_sampled(seed)).collect();
    Report::new("DIENDOMORPHISM", chains, started)
}

/// `f ≺ (g ≺ x) = f ≺ (g ≻ x)` for `f, g` random combinations of `family`
/// and random `x`.
pub fn check_extra_identity(family: &[DiEndPair], count: usize, seed: u64) -> Result<Report, EmbedError> {
    let started = Instant::now();
    let Some(first) = family.first() else {
        return Err(EmbedError::Shape("empty operator family".into()));
    };
    let (kind, n) = (first.kind(), first.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let combine = |rng: &mut ChaCha8Rng| {
        let mut f = DiEndPair::zero(kind, n);
        for h in family {
            let c = Scalar::random(kind, rng);
            f = DiEndPair { f1: f.f1.add(&h.f1.scale(&c)), f2: f.f2.add(&h.f2.scale(&c)) };
        }
        f
    };
    let mut tally = ChainTally::new("EXTRA", 5);
    for _ in 0..count {
        let f = combine(&mut rng);
        let g = combine(&mut rng);
        let x = random_vector(kind, n, &mut rng);
        tally.record(|| vec![("x".into(), render_vector(&x))], &[f.prec(&g.prec(&x)), f.prec(&g.succ(&x))]);
    }
    Ok(Report::new("EXTRA-IDENTITY", vec![tally.finish_sampled(seed)], started))
}

/// A random `(f, g, x)` with `f ≺ (g ≺ x) ≠ f ≺ (g ≻ x)`, searching at most
/// `tries` draws.
pub fn extra_identity_counterexample(
    kind: ScalarKind,
    n: usize,
    seed: u64,
    tries: usize,
) -> Option<(DiEndPair, DiEndPair, Vec<Scalar>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..tries).find_map(|_| {
        let f = DiEndPair::random(kind, n, &mut rng);
        let g = DiEndPair::random(kind, n, &mut rng);
        let x = random_vector(kind, n, &mut rng);
        (f.prec(&g.prec(&x)) != f.prec(&g.succ(&x))).then_some((f, g, x))
    })
}
