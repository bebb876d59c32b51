use std::time::Instant;

use crate::dialg::{check_dialgebra_model, DialgebraInstance};
use crate::eval::{CheckOptions, Report};
use crate::exactlin::{unit_vector, Scalar, StructureTensor};
use crate::trisys::{check_variety, TrisystemInstance};

use super::{
    tuple_chain, Block, ChainTally, EmbedError, Embedding, EmbeddingKind, MGenerator, MOperator, OperatorModule,
    Triangle,
};

pub(crate) fn require_variety(t: &TrisystemInstance, set: &str, opts: &CheckOptions) -> Result<(), EmbedError> {
    let r = check_variety(&t.model(), set, opts)?;
    if r.passed() {
        Ok(())
    } else {
        Err(EmbedError::NotInVariety { set: set.into(), failing: r.failures().map(|c| c.name.clone()).collect() })
    }
}

/// The operator module spanned by all `x ◁ y` and `x ▷ y` over basis pairs.
#[derive(Clone, Debug)]
pub struct MModule {
    pub module: OperatorModule,
    /// Closure of the span and the four closed-form product identities.
    pub report: Report,
}

impl MModule {
    /// Index of `e_x ◁ e_y` or `e_x ▷ e_y` among the generators.
    pub fn generator_index(&self, n: usize, kind: Triangle, x: usize, y: usize) -> usize {
        (x * n + y) * 2 + usize::from(kind == Triangle::Right)
    }
}

/// Builds `𝔐(T,T)` and checks that products of generators close up with
///
/// ```text
/// (x◁y)⊣(z◁u) = x◁{y,z,u}₁ = {x,y,z}₁◁u = (x◁y)⊣(z▷u)
/// (x◁y)⊢(z◁u) = {x,y,z}₃◁u = x▷{y,z,u}₂ = (x▷y)⊢(z◁u)
/// (x▷y)⊣(z◁u) = x▷{y,z,u}₁ = {x,y,z}₂◁u = (x▷y)⊣(z▷u)
/// (x◁y)⊢(z▷u) = {x,y,z}₃▷u = x▷{y,z,u}₃ = (x▷y)⊢(z▷u)
/// ```
pub fn build_m(t: &TrisystemInstance, opts: &CheckOptions) -> Result<MModule, EmbedError> {
    let started = Instant::now();
    let (kind, n) = (t.kind(), t.dim());
    let e: Vec<Vec<Scalar>> = (0..n).map(|i| unit_vector(kind, n, i)).collect();
    let labels = t.labels();
    let mut generators = Vec::with_capacity(2 * n * n);
    for x in 0..n {
        for y in 0..n {
            for tri in [Triangle::Left, Triangle::Right] {
                let g = MGenerator::new(t, tri, &e[x], &e[y]);
                generators.push((format!("{}{tri}{}", labels[x], labels[y]), g.realized.flatten()));
            }
        }
    }
    let module = OperatorModule::new(kind, 4 * n * n, generators)?;
    let realized: Vec<MOperator> =
        module.generators().iter().map(|v| MOperator::from_flat(kind, n, v)).collect();

    let mut closure = ChainTally::new("CLOSURE", opts.max_witnesses);
    for (i, a) in realized.iter().enumerate() {
        for (j, b) in realized.iter().enumerate() {
            let names = || {
                let l = module.generator_labels();
                vec![("λ".to_string(), l[i].clone()), ("μ".to_string(), l[j].clone())]
            };
            // a product outside the span is reported against zero
            let outside = [a.left_product(b), a.right_product(b)]
                .iter()
                .map(MOperator::flatten)
                .find(|v| module.coords(v).is_none());
            let members = match outside {
                Some(v) => vec![vec![Scalar::zero(kind); v.len()], v],
                None => Vec::new(),
            };
            closure.record(names, &members);
        }
    }

    let m = |tri, x: &[Scalar], y: &[Scalar]| MGenerator::new(t, tri, x, y).realized;
    let (l, r) = (Triangle::Left, Triangle::Right);
    let g = |tri, i: usize, j: usize| &realized[(i * n + j) * 2 + usize::from(tri == r)];
    let vars = ["x", "y", "z", "u"];
    let chain = |name: &str, f: &dyn Fn(usize, usize, usize, usize) -> Vec<MOperator>| {
        tuple_chain(name, n, &vars, labels, opts.max_witnesses, |idx| {
            f(idx[0], idx[1], idx[2], idx[3]).iter().map(MOperator::flatten).collect()
        })
    };
    let tp = |i, a: usize, b: usize, c: usize| t.product(i, &e[a], &e[b], &e[c]);
    let chains = vec![
        closure.finish(),
        chain("PROD1", &|x, y, z, u| {
            vec![
                g(l, x, y).left_product(g(l, z, u)),
                m(l, &e[x], &tp(1, y, z, u)),
                m(l, &tp(1, x, y, z), &e[u]),
                g(l, x, y).left_product(g(r, z, u)),
            ]
        }),
        chain("PROD2", &|x, y, z, u| {
            vec![
                g(l, x, y).right_product(g(l, z, u)),
                m(l, &tp(3, x, y, z), &e[u]),
                m(r, &e[x], &tp(2, y, z, u)),
                g(r, x, y).right_product(g(l, z, u)),
            ]
        }),
        chain("PROD3", &|x, y, z, u| {
            vec![
                g(r, x, y).left_product(g(l, z, u)),
                m(r, &e[x], &tp(1, y, z, u)),
                m(l, &tp(2, x, y, z), &e[u]),
                g(r, x, y).left_product(g(r, z, u)),
            ]
        }),
        chain("PROD4", &|x, y, z, u| {
            vec![
                g(l, x, y).right_product(g(r, z, u)),
                m(r, &tp(3, x, y, z), &e[u]),
                m(r, &e[x], &tp(3, y, z, u)),
                g(r, x, y).right_product(g(r, z, u)),
            ]
        }),
    ];
    let report = Report::new("M-PRODUCTS", chains, started).with_note(format!("dim 𝔐 = {}", module.dim()));
    Ok(MModule { module, report })
}

/// Checks `{x,y,z}₁ = x⊣(y'⊣z)`, `{x,y,z}₂ = x⊢(y'⊣z)`, `{x,y,z}₃ = x⊢(y'⊢z)`
/// on all basis triples, where `y' = mirror(y)`.
pub(crate) fn recovery_report(
    t: &TrisystemInstance,
    d: &DialgebraInstance,
    embed: impl Fn(&[Scalar]) -> Vec<Scalar>,
    mirror: impl Fn(&[Scalar]) -> Vec<Scalar>,
    max_witnesses: usize,
) -> Report {
    let started = Instant::now();
    let n = t.dim();
    let e: Vec<Vec<Scalar>> = (0..n).map(|i| embed(&unit_vector(t.kind(), n, i))).collect();
    let m: Vec<Vec<Scalar>> = (0..n).map(|i| mirror(&unit_vector(t.kind(), n, i))).collect();
    let chains = [(1, 1, 1), (2, 2, 1), (3, 2, 2)]
        .into_iter()
        .map(|(i, outer, inner)| {
            let prod = |k: usize, a: &[Scalar], b: &[Scalar]| {
                if k == 1 {
                    d.left_product(a, b)
                } else {
                    d.right_product(a, b)
                }
            };
            tuple_chain(&format!("REC{i}"), n, &["x", "y", "z"], t.labels(), max_witnesses, |idx| {
                let direct = embed(&t.product(
                    i,
                    &unit_vector(t.kind(), n, idx[0]),
                    &unit_vector(t.kind(), n, idx[1]),
                    &unit_vector(t.kind(), n, idx[2]),
                ));
                vec![direct, prod(outer, &e[idx[0]], &prod(inner, &m[idx[1]], &e[idx[2]]))]
            })
        })
        .collect();
    Report::new("RECOVERY", chains, started)
}

/// The standard embedding `U(A) = 𝔐(A,A) ⊕ A` of a first-kind trisystem,
/// with `x⊣y = x◁y`, `x⊢y = x▷y`, `λ⊣z = λ≺z`, `λ⊢z = λ≻z`, `z⊣ρ = z≺ρ`,
/// `z⊢ρ = z≻ρ` and componentwise products on `𝔐`.
pub fn build_u(t: &TrisystemInstance, opts: &CheckOptions) -> Result<Embedding, EmbedError> {
    require_variety(t, "ATT1", opts)?;
    let m = build_m(t, opts)?;
    if let Some(c) = m.report.failures().find(|c| c.name == "CLOSURE") {
        let w = c.witnesses.first().map(|w| format!("{:?}", w.assignment)).unwrap_or_default();
        return Err(EmbedError::NotClosed(format!("{} {w}", c.name)));
    }
    let (kind, n) = (t.kind(), t.dim());
    let k = m.module.dim();
    let total = k + n;
    let ops: Vec<MOperator> = m.module.basis().iter().map(|v| MOperator::from_flat(kind, n, v)).collect();
    let e: Vec<Vec<Scalar>> = (0..n).map(|i| unit_vector(kind, n, i)).collect();
    let in_m = |v: &[Scalar]| -> Result<Vec<Scalar>, EmbedError> {
        let c = m.module.coords(v).ok_or_else(|| EmbedError::NotClosed("basis product".into()))?;
        Ok(c.into_iter().chain(std::iter::repeat(Scalar::zero(kind)).take(n)).collect())
    };
    let in_a = |v: Vec<Scalar>| -> Vec<Scalar> { std::iter::repeat(Scalar::zero(kind)).take(k).chain(v).collect() };
    let mut tensors = [StructureTensor::zeros(kind, total, 2), StructureTensor::zeros(kind, total, 2)];
    for i in 0..total {
        for j in 0..total {
            for (slot, tensor) in tensors.iter_mut().enumerate() {
                let left = slot == 0;
                let v = match (i < k, j < k) {
                    (true, true) => {
                        let p = if left { ops[i].left_product(&ops[j]) } else { ops[i].right_product(&ops[j]) };
                        in_m(&p.flatten())?
                    }
                    (true, false) => {
                        let z = &e[j - k];
                        in_a(if left { ops[i].left.prec(z) } else { ops[i].left.succ(z) })
                    }
                    (false, true) => {
                        let z = &e[i - k];
                        in_a(if left { ops[j].right.prec(z) } else { ops[j].right.succ(z) })
                    }
                    (false, false) => {
                        let tri = if left { Triangle::Left } else { Triangle::Right };
                        in_m(&m.module.generators()[m.generator_index(n, tri, i - k, j - k)])?
                    }
                };
                tensor.set_entry(&[i, j], v);
            }
        }
    }
    let mut labels = m.module.labels();
    labels.extend(t.labels().iter().cloned());
    let [left, right] = tensors;
    let algebra = DialgebraInstance::new(left, right, None, labels)?;
    let axioms = check_dialgebra_model(&algebra.model(), opts)?;
    let embed = |x: &[Scalar]| in_a(x.to_vec());
    let recovery = recovery_report(t, &algebra, embed, embed, opts.max_witnesses);
    let blocks = vec![
        Block { name: "M".into(), offset: 0, dim: k, labels: m.module.labels() },
        Block { name: "A".into(), offset: k, dim: n, labels: t.labels().to_vec() },
    ];
    Ok(Embedding { kind: EmbeddingKind::First, blocks, algebra, axioms, recovery, operators: m.report })
}
