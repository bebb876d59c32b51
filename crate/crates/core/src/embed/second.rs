use std::time::Instant;

use crate::dialg::{check_dialgebra_model, check_involution_model, DialgebraInstance};
use crate::eval::{ChainReport, CheckOptions, Report, Witness};
use crate::exactlin::{add_scaled, unit_vector, Echelon, Matrix, Scalar, ScalarKind, StructureTensor};
use crate::trisys::TrisystemInstance;

use super::first::{recovery_report, require_variety};
use super::{
    lr_operators, tuple_chain, Block, ChainTally, DiEndPair, EmbedError, Embedding, EmbeddingKind, OpDiEndPair,
    OperatorModule, Triangle,
};

/// `𝔏(A,A)` and `𝔕(A,A)` with their involutions `L◁(x,y)* = L▷(y,x)`,
/// `R◁(x,y)* = R▷(y,x)`.
#[derive(Clone, Debug)]
pub struct LrModules {
    /// Flattened left pairs `(f1, f2)`.
    pub l: OperatorModule,
    /// Flattened opposite pairs `(g1, g2)` of the R family.
    pub r: OperatorModule,
    /// `*` on basis coordinates of `l`; column `j` is the image of basis element `j`.
    pub l_star: Matrix,
    pub r_star: Matrix,
    /// Rank of the generators joined with their images under `*`; `*` is
    /// well defined exactly when this equals the module dimension.
    pub l_joint_rank: usize,
    pub r_joint_rank: usize,
    /// The eight product identities, the relations between `◁` and `▷`
    /// under products, and well-definedness of `*`.
    pub report: Report,
}

impl LrModules {
    pub fn star_well_defined(&self) -> bool {
        self.l_joint_rank == self.l.dim() && self.r_joint_rank == self.r.dim()
    }

    /// The L family and the R family, both as di-endomorphisms.
    pub fn diend_family(&self, kind: ScalarKind, n: usize) -> Vec<DiEndPair> {
        let l = self.l.generators().iter().map(|v| DiEndPair::from_flat(kind, n, v));
        let r = self.r.generators().iter().map(|v| OpDiEndPair::from_flat(kind, n, v).to_diend());
        l.chain(r).collect()
    }
}

fn generator_index(n: usize, tri: Triangle, x: usize, y: usize) -> usize {
    (x * n + y) * 2 + usize::from(tri == Triangle::Right)
}

/// Index of the image under `*` of generator `i`.
fn starred(n: usize, i: usize) -> usize {
    let (pair, tri) = (i / 2, i % 2);
    let (x, y) = (pair / n, pair % n);
    (y * n + x) * 2 + (1 - tri)
}

/// Builds the `*` matrix on `module` and reports whether the map on
/// generators extends linearly: the rank of the generators must equal the
/// rank of the generators joined with their images.
fn star_on(module: &OperatorModule, kind: ScalarKind, n: usize, name: &str) -> (Matrix, usize, Vec<ChainReport>) {
    let gens = module.generators();
    let len = gens.first().map_or(0, Vec::len);
    let mut joint = Echelon::new(kind, 2 * len);
    for (i, g) in gens.iter().enumerate() {
        let mut v = g.clone();
        v.extend(gens[starred(n, i)].iter().cloned());
        joint.insert(v);
    }
    let well_defined = joint.rank() == module.dim();
    let k = module.dim();
    let cols: Vec<Vec<Scalar>> = module
        .basis_generators()
        .iter()
        .map(|&i| module.coords(&gens[starred(n, i)]).expect("images of generators are generators"))
        .collect();
    let star = Matrix::from_columns(kind, k, &cols);
    let mut wd = Vec::new();
    if !well_defined {
        wd.push(Witness {
            assignment: Vec::new(),
            difference: 1,
            residual: format!("rank {} but rank {} with images", module.dim(), joint.rank()),
        });
    }
    let squared = star.mul(&star);
    let mut inv = Vec::new();
    if squared != Matrix::identity(kind, k) {
        inv.push(Witness { assignment: Vec::new(), difference: 1, residual: "** is not the identity".into() });
    }
    let chains = vec![
        ChainReport::from_failures(format!("STAR-{name}"), gens.len() as u64, wd),
        ChainReport::from_failures(format!("STARSTAR-{name}"), k as u64, inv),
    ];
    (star, joint.rank(), chains)
}

/// Builds `𝔏(A,A)` and `𝔕(A,A)` for a second-kind trisystem and checks, for
/// all basis `x, y, z, u` and `i ∈ {1,2,3}`:
///
/// ```text
/// 1. L◁(x,y)⊣L◁(z,u) = L◁(x,{u,z,y}ᵢ) = L◁({x,y,z}₁,u)
/// 2. L▷(x,y)⊣L◁(z,u) = L▷(x,{u,z,y}₃) = L◁({x,y,z}₂,u)
/// 3. L◁(x,y)⊢L◁(z,u) = L▷(x,{u,z,y}₂) = L◁({x,y,z}₃,u)
/// 4. L◁(x,y)⊢L▷(z,u) = L▷(x,{u,z,y}₁) = L▷({x,y,z}ᵢ,u)
/// 5. R◁(x,y)⊣R◁(z,u) = R◁({z,y,x}₃,u) = R◁(x,{y,z,u}ᵢ)
/// 6. R▷(x,y)⊣R◁(z,u) = R◁({z,y,x}₂,u) = R▷(x,{y,z,u}₁)
/// 7. R◁(x,y)⊢R◁(z,u) = R◁({z,y,x}₁,u) = R▷(x,{y,z,u}₂)
/// 8. R◁(x,y)⊢R▷(z,u) = R▷({z,y,x}ᵢ,u) = R▷(x,{y,z,u}₃)
/// ```
///
/// with opposite products on the R side, together with
/// `λ⊣L◁(z,u) = λ⊣L▷(z,u)`, `L◁(x,y)⊢λ = L▷(x,y)⊢λ` and their R analogues
/// for every generator `λ`.
pub fn build_l_r(t: &TrisystemInstance, opts: &CheckOptions) -> Result<LrModules, EmbedError> {
    let started = Instant::now();
    let (kind, n) = (t.kind(), t.dim());
    let labels = t.labels();
    let e: Vec<Vec<Scalar>> = (0..n).map(|i| unit_vector(kind, n, i)).collect();
    let mut l_gens = Vec::with_capacity(2 * n * n);
    let mut r_gens = Vec::with_capacity(2 * n * n);
    for x in 0..n {
        for y in 0..n {
            let ops = lr_operators(t, &e[x], &e[y]);
            let (a, b) = (&labels[x], &labels[y]);
            l_gens.push((format!("L◁({a},{b})"), ops.l_left.flatten()));
            l_gens.push((format!("L▷({a},{b})"), ops.l_right.flatten()));
            r_gens.push((format!("R◁({a},{b})"), ops.r_left.flatten()));
            r_gens.push((format!("R▷({a},{b})"), ops.r_right.flatten()));
        }
    }
    let l = OperatorModule::new(kind, 2 * n * n, l_gens)?;
    let r = OperatorModule::new(kind, 2 * n * n, r_gens)?;
    let (l_star, l_joint_rank, mut chains) = star_on(&l, kind, n, "L");
    let (r_star, r_joint_rank, r_chains) = star_on(&r, kind, n, "R");
    chains.extend(r_chains);

    let lg: Vec<DiEndPair> = l.generators().iter().map(|v| DiEndPair::from_flat(kind, n, v)).collect();
    let rg: Vec<OpDiEndPair> = r.generators().iter().map(|v| OpDiEndPair::from_flat(kind, n, v)).collect();
    let (tl, tr) = (Triangle::Left, Triangle::Right);
    let lb = |tri, x, y| &lg[generator_index(n, tri, x, y)];
    let rb = |tri, x, y| &rg[generator_index(n, tri, x, y)];
    let lv = |tri, x: &[Scalar], y: &[Scalar]| {
        let ops = lr_operators(t, x, y);
        if tri == tl { ops.l_left.flatten() } else { ops.l_right.flatten() }
    };
    let rv = |tri, x: &[Scalar], y: &[Scalar]| {
        let ops = lr_operators(t, x, y);
        if tri == tl { ops.r_left.flatten() } else { ops.r_right.flatten() }
    };
    let tp = |i, a: usize, b: usize, c: usize| t.product(i, &e[a], &e[b], &e[c]);
    let vars = ["x", "y", "z", "u"];
    let mw = opts.max_witnesses;
    type Members<'a> = &'a dyn Fn(usize, usize, usize, usize) -> Vec<Vec<Scalar>>;
    let chain = |name: &str, f: Members| tuple_chain(name, n, &vars, labels, mw, |i| f(i[0], i[1], i[2], i[3]));
    chains.extend([
        chain("LR1", &|x, y, z, u| {
            let mut v = vec![lb(tl, x, y).left(lb(tl, z, u)).flatten()];
            v.extend((1..=3).map(|i| lv(tl, &e[x], &tp(i, u, z, y))));
            v.push(lv(tl, &tp(1, x, y, z), &e[u]));
            v
        }),
        chain("LR2", &|x, y, z, u| {
            vec![
                lb(tr, x, y).left(lb(tl, z, u)).flatten(),
                lv(tr, &e[x], &tp(3, u, z, y)),
                lv(tl, &tp(2, x, y, z), &e[u]),
            ]
        }),
        chain("LR3", &|x, y, z, u| {
            vec![
                lb(tl, x, y).right(lb(tl, z, u)).flatten(),
                lv(tr, &e[x], &tp(2, u, z, y)),
                lv(tl, &tp(3, x, y, z), &e[u]),
            ]
        }),
        chain("LR4", &|x, y, z, u| {
            let mut v = vec![lb(tl, x, y).right(lb(tr, z, u)).flatten(), lv(tr, &e[x], &tp(1, u, z, y))];
            v.extend((1..=3).map(|i| lv(tr, &tp(i, x, y, z), &e[u])));
            v
        }),
        chain("LR5", &|x, y, z, u| {
            let mut v = vec![rb(tl, x, y).left(rb(tl, z, u)).flatten(), rv(tl, &tp(3, z, y, x), &e[u])];
            v.extend((1..=3).map(|i| rv(tl, &e[x], &tp(i, y, z, u))));
            v
        }),
        chain("LR6", &|x, y, z, u| {
            vec![
                rb(tr, x, y).left(rb(tl, z, u)).flatten(),
                rv(tl, &tp(2, z, y, x), &e[u]),
                rv(tr, &e[x], &tp(1, y, z, u)),
            ]
        }),
        chain("LR7", &|x, y, z, u| {
            vec![
                rb(tl, x, y).right(rb(tl, z, u)).flatten(),
                rv(tl, &tp(1, z, y, x), &e[u]),
                rv(tr, &e[x], &tp(2, y, z, u)),
            ]
        }),
        chain("LR8", &|x, y, z, u| {
            let mut v = vec![rb(tl, x, y).right(rb(tr, z, u)).flatten()];
            v.extend((1..=3).map(|i| rv(tr, &tp(i, z, y, x), &e[u])));
            v.push(rv(tr, &e[x], &tp(3, y, z, u)));
            v
        }),
    ]);

    let mut rem = [1, 2, 3, 4].map(|i| ChainTally::new(format!("REM{i}"), mw));
    for g in 0..2 * n * n {
        for x in 0..n {
            for y in 0..n {
                let names = || {
                    vec![
                        ("λ".to_string(), l.generator_labels()[g].clone()),
                        ("x".to_string(), labels[x].clone()),
                        ("y".to_string(), labels[y].clone()),
                    ]
                };
                let (a, b) = (lb(tl, x, y), lb(tr, x, y));
                rem[0].record(names, &[lg[g].left(a).flatten(), lg[g].left(b).flatten()]);
                rem[1].record(names, &[a.right(&lg[g]).flatten(), b.right(&lg[g]).flatten()]);
                let (a, b) = (rb(tl, x, y), rb(tr, x, y));
                rem[2].record(names, &[rg[g].left(a).flatten(), rg[g].left(b).flatten()]);
                rem[3].record(names, &[a.right(&rg[g]).flatten(), b.right(&rg[g]).flatten()]);
            }
        }
    }
    chains.extend(rem.into_iter().map(ChainTally::finish));
    let report = Report::new("LR-PRODUCTS", chains, started)
        .with_note(format!("dim 𝔏 = {}, dim 𝔕 = {}", l.dim(), r.dim()));
    Ok(LrModules { l, r, l_star, r_star, l_joint_rank, r_joint_rank, report })
}

/// An element `(λ, x, ȳ, ρ)` of `𝔏 ⊕ A ⊕ Ā ⊕ 𝔕`, with `λ` and `ρ` in basis
/// coordinates.
struct Parts {
    lam: Vec<Scalar>,
    x: Vec<Scalar>,
    y: Vec<Scalar>,
    rho: Vec<Scalar>,
}

fn sum(mut a: Vec<Scalar>, b: &[Scalar]) -> Vec<Scalar> {
    add_scaled(&mut a, &Scalar::one(b.first().map_or(ScalarKind::Rational, Scalar::kind)), b);
    a
}

/// The second-kind embedding `𝔏 ⊕ A ⊕ Ā ⊕ 𝔕^op`, multiplied as 2×2 block
/// matrices `[[λ, x], [ȳ, ρ]]`:
///
/// ```text
/// ⊣: [[λ₁⊣λ₂ + L◁(x₁,y₂), λ₁≺x₂ + x₁≺ρ₂], [y₁≺*λ₂ + ρ₁≺*y₂, R◁(y₁,x₂) + ρ₁⊣ρ₂]]
/// ⊢: [[λ₁⊢λ₂ + L▷(x₁,y₂), λ₁≻x₂ + x₁≻ρ₂], [y₁≻*λ₂ + ρ₁≻*y₂, R▷(y₁,x₂) + ρ₁⊢ρ₂]]
/// ```
///
/// where `y≺*λ = λ*≻y`, `y≻*λ = λ*≺y`, `ρ≺*y = y≻ρ*`, `ρ≻*y = y≺ρ*`, and
/// `(λ, x, ȳ, ρ)⋆ = (λ*, y, x̄, ρ*)`.
pub fn build_u2(t: &TrisystemInstance, opts: &CheckOptions) -> Result<Embedding, EmbedError> {
    require_variety(t, "ATT2", opts)?;
    let lr = build_l_r(t, opts)?;
    for (module, joint, m) in [("𝔏", lr.l_joint_rank, &lr.l), ("𝔕", lr.r_joint_rank, &lr.r)] {
        if joint != m.dim() {
            return Err(EmbedError::StarNotWellDefined { module, rank: m.dim(), joint });
        }
    }
    let (kind, n) = (t.kind(), t.dim());
    let (kl, kr) = (lr.l.dim(), lr.r.dim());
    let total = kl + 2 * n + kr;
    let zero = |len| vec![Scalar::zero(kind); len];
    let parts = |i: usize| {
        let mut p = Parts { lam: zero(kl), x: zero(n), y: zero(n), rho: zero(kr) };
        let one = Scalar::one(kind);
        match i {
            i if i < kl => p.lam[i] = one,
            i if i < kl + n => p.x[i - kl] = one,
            i if i < kl + 2 * n => p.y[i - kl - n] = one,
            i => p.rho[i - kl - 2 * n] = one,
        }
        p
    };
    let lam_op = |c: &[Scalar]| DiEndPair::from_flat(kind, n, &lr.l.combine(c, kind));
    let rho_op = |c: &[Scalar]| OpDiEndPair::from_flat(kind, n, &lr.r.combine(c, kind));
    let product = |p: &Parts, q: &Parts, left: bool| -> Result<Vec<Scalar>, EmbedError> {
        let (l1, l2) = (lam_op(&p.lam), lam_op(&q.lam));
        let (r1, r2) = (rho_op(&p.rho), rho_op(&q.rho));
        let l2s = lam_op(&lr.l_star.apply(&q.lam));
        let r1s = rho_op(&lr.r_star.apply(&p.rho));
        let xy = lr_operators(t, &p.x, &q.y);
        let yx = lr_operators(t, &p.y, &q.x);
        let (lam, x, y, rho) = if left {
            (
                sum(l1.left(&l2).flatten(), &xy.l_left.flatten()),
                sum(l1.prec(&q.x), &r2.prec(&p.x)),
                sum(l2s.succ(&p.y), &r1s.succ(&q.y)),
                sum(yx.r_left.flatten(), &r1.left(&r2).flatten()),
            )
        } else {
            (
                sum(l1.right(&l2).flatten(), &xy.l_right.flatten()),
                sum(l1.succ(&q.x), &r2.succ(&p.x)),
                sum(l2s.prec(&p.y), &r1s.prec(&q.y)),
                sum(yx.r_right.flatten(), &r1.right(&r2).flatten()),
            )
        };
        let lam = lr.l.coords(&lam).ok_or_else(|| EmbedError::NotClosed("𝔏 block".into()))?;
        let rho = lr.r.coords(&rho).ok_or_else(|| EmbedError::NotClosed("𝔕 block".into()))?;
        Ok(lam.into_iter().chain(x).chain(y).chain(rho).collect())
    };
    let basis: Vec<Parts> = (0..total).map(parts).collect();
    let mut tensors = [StructureTensor::zeros(kind, total, 2), StructureTensor::zeros(kind, total, 2)];
    for i in 0..total {
        for j in 0..total {
            for (slot, tensor) in tensors.iter_mut().enumerate() {
                tensor.set_entry(&[i, j], product(&basis[i], &basis[j], slot == 0)?);
            }
        }
    }
    let mut star = Matrix::zeros(kind, total, total);
    for a in 0..kl {
        for b in 0..kl {
            star.set(a, b, lr.l_star.get(a, b).clone());
        }
    }
    for i in 0..n {
        star.set(kl + n + i, kl + i, Scalar::one(kind));
        star.set(kl + i, kl + n + i, Scalar::one(kind));
    }
    let off = kl + 2 * n;
    for a in 0..kr {
        for b in 0..kr {
            star.set(off + a, off + b, lr.r_star.get(a, b).clone());
        }
    }
    let bar: Vec<String> = t.labels().iter().map(|l| format!("bar({l})")).collect();
    let mut labels = lr.l.labels();
    labels.extend(t.labels().iter().cloned());
    labels.extend(bar.iter().cloned());
    labels.extend(lr.r.labels());
    let [left, right] = tensors;
    let algebra = DialgebraInstance::new(left, right, Some(star), labels)?;

    let started = Instant::now();
    let model = algebra.model();
    let dialgebra = check_dialgebra_model(&model, opts)?;
    let involution = check_involution_model(&model, opts.max_witnesses)?;
    let axioms = Report::merge("U2-AXIOMS", vec![dialgebra, involution], started);
    let place = |offset: usize| {
        move |x: &[Scalar]| {
            let mut v = zero(total);
            v[offset..offset + n].clone_from_slice(x);
            v
        }
    };
    let recovery = recovery_report(t, &algebra, place(kl), place(kl + n), opts.max_witnesses);
    let blocks = vec![
        Block { name: "L".into(), offset: 0, dim: kl, labels: lr.l.labels() },
        Block { name: "A".into(), offset: kl, dim: n, labels: t.labels().to_vec() },
        Block { name: "Abar".into(), offset: kl + n, dim: n, labels: bar },
        Block { name: "R".into(), offset: off, dim: kr, labels: lr.r.labels() },
    ];
    Ok(Embedding { kind: EmbeddingKind::Second, blocks, algebra, axioms, recovery, operators: lr.report })
}
