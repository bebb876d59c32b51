//! The ten acceptance criteria, one line each.
//!
//! Every criterion is computed in full and printed as PASS or FAIL. Four of
//! them rest on claims that do not hold for the stated instances; the test
//! asserts that exactly those fail, each for its recorded reason, and that
//! all others pass.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trialg::catalog;
use trialg::dialg::{
    check_dialgebra_axioms, check_dialgebra_model, check_involution, check_right_leibniz, dminus_bracket,
    matrix_dialgebra, subalgebra_structure_constants, BlockContext, DialgebraInstance, FreeDialgebra,
};
use trialg::embed::{
    build_l_r, build_u, build_u2, check_diendomorphism_lemma, check_extra_identity, extra_identity_counterexample,
    EmbedError,
};
use trialg::eval::{CheckOptions, Mode, Report, TensorModel};
use trialg::exactlin::{unit_vector, Scalar, ScalarKind, StructureTensor};
use trialg::identity_dsl::IdentityChain;
use trialg::kp::{compare_with_golden, kp_apply};
use trialg::trisys::{
    ann_subspace, att1_from_dialgebra, att2_from_dialgebra, check_variety, complement_closure_check,
    matrix_triple_system, Att1, Att2, Jtd, Leibts, TrisystemInstance,
};

/// Criteria whose stated outcome is contradicted by direct computation.
const KNOWN_FAILURES: &[u32] = &[5, 6, 8, 10];

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    limit: Duration,
}

fn run(id: u32, title: &'static str, limit_secs: u64, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let started = Instant::now();
    let (ok, detail) = f();
    let elapsed = started.elapsed();
    let limit = Duration::from_secs(limit_secs);
    let o = Outcome { id, title, pass: ok && elapsed < limit, detail, elapsed, limit };
    println!(
        "criterion {:>2}: {}  {} ({:.2}s, limit {}s): {}",
        o.id,
        if o.pass { "PASS" } else { "FAIL" },
        o.title,
        o.elapsed.as_secs_f64(),
        o.limit.as_secs(),
        o.detail
    );
    o
}

fn gf5() -> ScalarKind {
    ScalarKind::prime(5).unwrap()
}

fn blocks(m: usize, m1: usize, kind: ScalarKind) -> DialgebraInstance {
    matrix_dialgebra(BlockContext::new(m, m1, kind).unwrap()).unwrap()
}

fn status(r: &Report) -> String {
    let failing: Vec<&str> = r.failures().map(|c| c.name.as_str()).collect();
    if failing.is_empty() {
        format!("{} {} chains pass", r.set, r.chains.len())
    } else {
        format!("{} failing {}", r.set, failing.join(","))
    }
}

// Plain integer matrices, row-major, reduced mod p (p = 0 means over Z).

type Ints = Vec<i64>;

fn ints(v: &[Scalar]) -> Ints {
    v.iter().map(|s| s.to_string().parse().expect("integral coordinates")).collect()
}

fn reduce(a: Ints, p: i64) -> Ints {
    if p == 0 {
        a
    } else {
        a.into_iter().map(|x| x.rem_euclid(p)).collect()
    }
}

fn mat_mul(a: &Ints, b: &Ints, m: usize, p: i64) -> Ints {
    let mut c = vec![0; m * m];
    for i in 0..m {
        for k in 0..m {
            for j in 0..m {
                c[i * m + j] += a[i * m + k] * b[k * m + j];
            }
        }
    }
    reduce(c, p)
}

fn mat_sub(a: &Ints, b: &Ints, p: i64) -> Ints {
    reduce(a.iter().zip(b).map(|(x, y)| x - y).collect(), p)
}

fn transpose(a: &Ints, m: usize) -> Ints {
    (0..m * m).map(|k| a[(k % m) * m + k / m]).collect()
}

/// Keeps entries `(i, j)` with `keep(i, j)`.
fn masked(a: &Ints, m: usize, keep: impl Fn(usize, usize) -> bool) -> Ints {
    (0..m * m).map(|k| if keep(k / m, k % m) { a[k] } else { 0 }).collect()
}

struct BlockOracle {
    m: usize,
    s: usize,
    p: i64,
}

impl BlockOracle {
    fn unit(&self, k: usize) -> Ints {
        (0..self.m * self.m).map(|i| i64::from(i == k)).collect()
    }
    /// First block column zeroed.
    fn right_mask(&self, a: &Ints) -> Ints {
        masked(a, self.m, |_, j| j >= self.s)
    }
    /// First block row zeroed.
    fn left_mask(&self, a: &Ints) -> Ints {
        masked(a, self.m, |i, _| i >= self.s)
    }
    /// Only the lower right block.
    fn corner(&self, a: &Ints) -> Ints {
        masked(a, self.m, |i, j| i >= self.s && j >= self.s)
    }
    fn mul(&self, a: &Ints, b: &Ints) -> Ints {
        mat_mul(a, b, self.m, self.p)
    }
    fn left(&self, a: &Ints, b: &Ints) -> Ints {
        self.mul(&self.right_mask(a), &self.right_mask(b))
    }
    fn right(&self, a: &Ints, b: &Ints) -> Ints {
        self.mul(&self.left_mask(a), &self.left_mask(b))
    }
    /// The displayed second-kind block results: `(0, u_A d_B* d_C; 0, d_A d_B* d_C)`,
    /// `(0, 0; 0, d_A d_B* d_C)` and `(0, 0; d_A d_B* l_C, d_A d_B* d_C)`.
    fn triple(&self, i: usize, a: &Ints, b: &Ints, c: &Ints) -> Ints {
        let db = transpose(&self.corner(b), self.m);
        match i {
            1 => self.mul(&self.mul(&self.right_mask(a), &db), &self.corner(c)),
            2 => self.mul(&self.mul(&self.corner(a), &db), &self.corner(c)),
            _ => self.mul(&self.mul(&self.corner(a), &db), &self.left_mask(c)),
        }
    }
}

/// Rank mod p of integer vectors.
fn rank_mod(mut rows: Vec<Ints>, p: i64) -> usize {
    let inv = |x: i64| (1..p).find(|y| (x * y).rem_euclid(p) == 1).unwrap();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..rows.len()).find(|&r| rows[r][c].rem_euclid(p) != 0) else { continue };
        rows.swap(rank, r);
        let f = inv(rows[rank][c].rem_euclid(p));
        let pivot: Ints = rows[rank].iter().map(|x| (x * f).rem_euclid(p)).collect();
        for (k, row) in rows.iter_mut().enumerate() {
            if k != rank && row[c].rem_euclid(p) != 0 {
                let g = row[c];
                row.iter_mut().zip(&pivot).for_each(|(x, y)| *x = (*x - g * y).rem_euclid(p));
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

fn criterion_1() -> (bool, String) {
    let cases = [
        ("ASSOCIATIVE", "DIALGEBRA", 5),
        ("LEFT_SYMMETRIC", "LEFT_SYMMETRIC_DI", 5),
        ("ATS1", "ATT1", 11),
        ("ATS2", "ATT2", 11),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (input, golden, count) in cases {
        let source: Vec<IdentityChain> = catalog::set(input).unwrap();
        let derived: Vec<IdentityChain> = source.iter().flat_map(|c| kp_apply(c).unwrap().deduped).collect();
        let gold = catalog::set(golden).unwrap();
        let diff = compare_with_golden(&derived, &gold);
        let good = diff.is_match() && gold.len() == count;
        ok &= good;
        parts.push(format!(
            "{input}->{golden} {} of {count} listed{}",
            derived.len(),
            if good { "" } else { " MISMATCH" }
        ));
    }
    (ok, parts.join(", "))
}

fn criterion_2() -> (bool, String) {
    let opts = CheckOptions::default();
    let free = FreeDialgebra::new(ScalarKind::Rational, 5, 5);
    let symbolic = check_variety(&Att1(&free), "ATT1", &opts).unwrap();
    let t = att1_from_dialgebra(&blocks(2, 1, gf5()));
    let exhaustive = check_variety(&t.model(), "ATT1", &opts.clone().with_mode(Mode::Exhaustive)).unwrap();
    let ok = symbolic.passed()
        && symbolic.chains.len() == 11
        && exhaustive.passed()
        && exhaustive.chains.len() == 11
        && exhaustive.evaluations == 11 * 4u64.pow(5);
    (ok, format!("free(5,5) {}; M_2^1 {} over {} evaluations", status(&symbolic), status(&exhaustive), exhaustive.evaluations))
}

fn criterion_3() -> (bool, String) {
    let opts = CheckOptions::default();
    let free = FreeDialgebra::new(ScalarKind::Rational, 5, 5);
    let d = blocks(2, 1, gf5());
    let dm = d.model();
    let reports = [
        ("free first", check_variety(&Jtd(&Att1(&free)), "JTD", &opts), check_variety(&Leibts(&Att1(&free)), "LEIBTS", &opts)),
        ("free second", check_variety(&Jtd(&Att2(&free)), "JTD", &opts), check_variety(&Leibts(&Att2(&free)), "LEIBTS", &opts)),
        ("M_2^1 first", check_variety(&Jtd(&Att1(&dm)), "JTD", &opts), check_variety(&Leibts(&Att1(&dm)), "LEIBTS", &opts)),
        ("M_2^1 second", check_variety(&Jtd(&Att2(&dm)), "JTD", &opts), check_variety(&Leibts(&Att2(&dm)), "LEIBTS", &opts)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, jtd, leib) in reports {
        let (jtd, leib) = (jtd.unwrap(), leib.unwrap());
        let good = jtd.passed() && jtd.chains.len() == 8 && leib.passed() && leib.chains.len() == 2;
        ok &= good;
        parts.push(format!("{name}: JTD {}/8, LEIBTS {}/2", jtd.chains.len() - jtd.failures().count(), leib.chains.len() - leib.failures().count()));
    }
    (ok, parts.join("; "))
}

fn criterion_4() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, m1) in [(2, 1), (3, 1)] {
        let d = blocks(m, m1, gf5());
        let axioms = check_dialgebra_axioms(&d).unwrap();
        let involution = check_involution(&d).unwrap();
        let t = att2_from_dialgebra(&d).unwrap();
        let o = BlockOracle { m, s: m - m1, p: 5 };
        let n = m * m;
        let e = |k| unit_vector(gf5(), n, k);
        let mut mismatches = 0;
        for a in 0..n {
            for b in 0..n {
                mismatches += usize::from(ints(&d.left_product(&e(a), &e(b))) != o.left(&o.unit(a), &o.unit(b)));
                mismatches += usize::from(ints(&d.right_product(&e(a), &e(b))) != o.right(&o.unit(a), &o.unit(b)));
                for c in 0..n {
                    for i in 1..=3 {
                        let lib = ints(&t.product(i, &e(a), &e(b), &e(c)));
                        mismatches += usize::from(lib != o.triple(i, &o.unit(a), &o.unit(b), &o.unit(c)));
                    }
                }
            }
        }
        let good = axioms.passed() && involution.passed() && mismatches == 0;
        ok &= good;
        parts.push(format!("M_{m}^{m1}: {}, {}, {mismatches} product mismatches", status(&axioms), status(&involution)));
    }
    (ok, parts.join("; "))
}

fn criterion_5() -> (bool, String) {
    let q = ScalarKind::Rational;
    let d = blocks(2, 1, q);
    let bracket = dminus_bracket(&d);
    let o = BlockOracle { m: 2, s: 1, p: 0 };
    let oracle = |a: &Ints, b: &Ints| mat_sub(&o.left(a, b), &o.right(b, a), 0);
    let agree = (0..4).all(|a| {
        (0..4).all(|b| ints(&bracket.entry_dense(&[a, b])) == oracle(&o.unit(a), &o.unit(b)))
    });
    let (e1, e2, e3, x) = (o.unit(0), o.unit(1), o.unit(2), o.unit(3));
    let zero = vec![0; 4];
    let neg = |v: &Ints| v.iter().map(|c| -c).collect::<Ints>();
    let name = |v: &Ints, names: &[(&str, &Ints)]| -> String {
        if *v == zero {
            return "0".into();
        }
        for (nm, w) in names {
            if v == *w {
                return nm.to_string();
            }
            if *v == neg(w) {
                return format!("-{nm}");
            }
        }
        format!("{v:?}")
    };
    let basis_names = [("E1", &e1), ("E2", &e2), ("E3", &e3), ("X", &x)];
    let got = [oracle(&e1, &x), oracle(&e2, &x), oracle(&e3, &x)];
    let expected = [zero.clone(), e2.clone(), e3.clone()];
    let basis_ok = got == expected;

    let b1 = e2.clone();
    let b2 = e3.clone();
    let b3: Ints = e2.iter().zip(&x).map(|(a, b)| a + b).collect();
    let sub_names = [("B1", &b1), ("B2", &b2), ("B3", &b3)];
    let sub_got = [oracle(&b1, &b3), oracle(&b2, &b3), oracle(&b3, &b3)];
    let sub_ok = sub_got == [b1.clone(), b2.clone(), b1.clone()];
    let to_vec = |v: &Ints| v.iter().map(|&c| Scalar::from_i64(q, c)).collect::<Vec<_>>();
    let closed = subalgebra_structure_constants(&bracket, &[to_vec(&b1), to_vec(&b2), to_vec(&b3)])
        .map(|s| s.added == 0)
        .unwrap_or(false);
    let leibniz = check_right_leibniz(&bracket).unwrap();
    let detail = format!(
        "oracle agrees: {agree}; [E1,X]={}, [E2,X]={}, [E3,X]={}; [B1,B3]={}, [B2,B3]={}, [B3,B3]={}; L' closed: {closed}; {}",
        name(&got[0], &basis_names),
        name(&got[1], &basis_names),
        name(&got[2], &basis_names),
        name(&sub_got[0], &sub_names),
        name(&sub_got[1], &sub_names),
        name(&sub_got[2], &sub_names),
        status(&leibniz),
    );
    (agree && basis_ok && sub_ok && closed && leibniz.passed(), detail)
}

fn criterion_6() -> (bool, String) {
    let opts = CheckOptions::default();
    let ats_empty = [false, true].iter().all(|&second| ann_subspace(&matrix_triple_system(gf5(), 2, second)).is_empty());
    let t = att2_from_dialgebra(&blocks(2, 1, gf5())).unwrap();
    let o = BlockOracle { m: 2, s: 1, p: 5 };
    let mut rows = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let (ua, ub, uc) = (o.unit(a), o.unit(b), o.unit(c));
                let t1 = o.triple(1, &ua, &ub, &uc);
                rows.push(mat_sub(&t1, &o.triple(2, &ua, &ub, &uc), 5));
                rows.push(mat_sub(&t1, &o.triple(3, &ua, &ub, &uc), 5));
            }
        }
    }
    let oracle_dim = rank_mod(rows, 5);
    let ann = ann_subspace(&t);
    let complement = vec![unit_vector(gf5(), 4, 0), unit_vector(gf5(), 4, 3)];
    let closure = complement_closure_check(&t, &complement, "ATS2", &opts);
    let closure_ok = closure.as_ref().is_ok_and(Report::passed);
    let detail = format!(
        "ATS embeddings empty: {ats_empty}; M_2^1 second kind dim {} (oracle {oracle_dim}, expected 1); complement span(e11,e22): {}",
        ann.len(),
        match &closure {
            Ok(r) => status(r),
            Err(e) => e.to_string(),
        }
    );
    (ats_empty && ann.len() == oracle_dim && oracle_dim == 1 && closure_ok, detail)
}

fn criterion_7() -> (bool, String) {
    let t = att1_from_dialgebra(&blocks(2, 1, gf5()));
    match build_u(&t, &CheckOptions::default()) {
        Ok(e) => (
            e.passed() && e.axioms.chains.len() == 5,
            format!("dim {}; {}; {}; {}", e.algebra.dim(), status(&e.axioms), status(&e.recovery), status(&e.operators)),
        ),
        Err(err) => (false, err.to_string()),
    }
}

fn criterion_8() -> (bool, String) {
    let t = att2_from_dialgebra(&blocks(2, 1, gf5())).unwrap();
    let opts = CheckOptions::default();
    let lr = build_l_r(&t, &opts).unwrap();
    let items_pass = lr
        .report
        .chains
        .iter()
        .filter(|c| c.name.starts_with("LR") || c.name.starts_with("REM"))
        .all(|c| c.passed());
    let star_failing: Vec<&str> = lr.report.failures().map(|c| c.name.as_str()).collect();
    let items = format!(
        "items LR1-8 and REM1-4 {}; failing {}",
        if items_pass { "pass" } else { "FAIL" },
        star_failing.join(",")
    );
    match build_u2(&t, &opts) {
        Ok(e) => (
            e.passed(),
            format!("{items}; {}; {}; {}", status(&e.axioms), status(&e.recovery), status(&e.operators)),
        ),
        Err(err) => (false, format!("{items}; four-block algebra: {err}")),
    }
}

fn criterion_9() -> (bool, String) {
    let lemma = check_diendomorphism_lemma(gf5(), 3, 100, 9);
    let t = att2_from_dialgebra(&blocks(2, 1, gf5())).unwrap();
    let lr = build_l_r(&t, &CheckOptions::default()).unwrap();
    let extra = check_extra_identity(&lr.diend_family(gf5(), 4), 100, 9).unwrap();
    let counter = extra_identity_counterexample(gf5(), 2, 9, 100);
    let ok = lemma.passed() && lemma.chains.len() == 3 && extra.passed() && counter.is_some();
    (
        ok,
        format!(
            "{}; {}; counterexample outside the families: {}",
            status(&lemma),
            status(&extra),
            counter.map_or("none".into(), |(_, _, x)| format!("found at x = {x:?}").replace("Prime { value: ", "").replace(", modulus: 5 }", "")),
        ),
    )
}

/// Adds a random nonzero scalar to one coordinate of one entry.
fn mutate(t: &StructureTensor, rng: &mut ChaCha8Rng) -> StructureTensor {
    let mut out = t.clone();
    let idx: Vec<usize> = (0..t.arity()).map(|_| rng.gen_range(0..t.dim())).collect();
    let mut v = t.entry_dense(&idx);
    let k = rng.gen_range(0..t.dim());
    v[k] += &Scalar::random_nonzero(t.kind(), rng);
    out.set_entry(&idx, v);
    out
}

/// The five dialgebra axioms on all basis triples, in plain integer arithmetic.
fn is_dialgebra_oracle(l: &StructureTensor, r: &StructureTensor, p: i64) -> bool {
    let n = l.dim();
    let table = |t: &StructureTensor| -> Vec<Vec<Ints>> {
        (0..n).map(|i| (0..n).map(|j| ints(&t.entry_dense(&[i, j]))).collect()).collect()
    };
    let (lt, rt) = (table(l), table(r));
    let prod = |t: &Vec<Vec<Ints>>, x: &Ints, y: &Ints| -> Ints {
        let mut out = vec![0; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out[k] += x[i] * y[j] * t[i][j][k];
                }
            }
        }
        reduce(out, p)
    };
    let e = |i: usize| (0..n).map(|k| i64::from(k == i)).collect::<Ints>();
    (0..n).all(|a| {
        (0..n).all(|b| {
            (0..n).all(|c| {
                let (x, y, z) = (e(a), e(b), e(c));
                let l_ = |u: &Ints, v: &Ints| prod(&lt, u, v);
                let r_ = |u: &Ints, v: &Ints| prod(&rt, u, v);
                let d1 = l_(&l_(&x, &y), &z);
                d1 == l_(&x, &l_(&y, &z))
                    && d1 == l_(&x, &r_(&y, &z))
                    && l_(&r_(&x, &y), &z) == r_(&x, &l_(&y, &z))
                    && r_(&l_(&x, &y), &z) == r_(&r_(&x, &y), &z)
                    && r_(&r_(&x, &y), &z) == r_(&x, &r_(&y, &z))
            })
        })
    })
}

fn criterion_10() -> (bool, String) {
    let opts = CheckOptions::default();
    let d = blocks(2, 1, gf5());
    let first = att1_from_dialgebra(&d);
    let second = att2_from_dialgebra(&d).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut parts = Vec::new();
    let mut ok = true;

    let (mut caught, mut agree) = (0, 0);
    for _ in 0..20 {
        let (l, r) = (d.left().clone(), d.right().clone());
        let (l, r) = if rng.gen_bool(0.5) { (mutate(&l, &mut rng), r) } else { (l, mutate(&r, &mut rng)) };
        let m = TensorModel::new(gf5(), 4, vec![(Some(1), &l), (Some(2), &r)]);
        let rep = check_dialgebra_model(&m, &opts).unwrap();
        let hit = rep.failures().any(|c| !c.witnesses.is_empty());
        caught += usize::from(hit);
        agree += usize::from(hit != is_dialgebra_oracle(&l, &r, 5));
    }
    ok &= caught == 20;
    parts.push(format!("dialgebra {caught}/20 (the other {} are dialgebras again; oracle agrees on {agree}/20)", 20 - caught));

    for (name, set, t) in [("ATT1", "ATT1", &first), ("ATT2", "ATT2", &second)] {
        let mut caught = 0;
        for _ in 0..20 {
            let mut products = t.products().clone();
            let i = rng.gen_range(0..3);
            products[i] = mutate(&products[i], &mut rng);
            let bent: TrisystemInstance = t.with_products(products).unwrap();
            let rep = check_variety(&bent.model(), set, &opts).unwrap();
            caught += usize::from(rep.failures().any(|c| !c.witnesses.is_empty()));
        }
        ok &= caught == 20;
        parts.push(format!("{name} {caught}/20"));
    }
    (ok, format!("mutations caught: {}", parts.join(", ")))
}

#[test]
fn acceptance_criteria() {
    let outcomes = [
        run(1, "KP goldens", 1, criterion_1),
        run(2, "first-kind products of dialgebras", 5, criterion_2),
        run(3, "Jordan and Leibniz derived products", 10, criterion_3),
        run(4, "block-matrix dialgebra and second-kind products", 5, criterion_4),
        run(5, "Leibniz algebra of block matrices", 1, criterion_5),
        run(6, "annihilator part and complement", 2, criterion_6),
        run(7, "standard embedding, first kind", 60, criterion_7),
        run(8, "standard embedding, second kind", 120, criterion_8),
        run(9, "di-endomorphism lemmas", 1, criterion_9),
        run(10, "mutation sensitivity", 30, criterion_10),
    ];
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!("failed: {failed:?} (known: {KNOWN_FAILURES:?})");
    assert_eq!(failed, KNOWN_FAILURES, "criteria outside the recorded failures changed state");

    // the recorded failures must fail for the recorded reasons
    assert!(outcomes[4].detail.contains("[E3,X]=-E3") && outcomes[4].detail.contains("[B2,B3]=-B2"));
    assert!(outcomes[5].detail.contains("dim 2 (oracle 2, expected 1)"));
    assert!(outcomes[7].detail.contains("LR1-8 and REM1-4 pass") && outcomes[7].detail.contains("not well defined"));
    assert!(outcomes[9].detail.contains("oracle agrees on 20/20") && outcomes[9].detail.contains("ATT1 20/20, ATT2 20/20"));
}

#[test]
fn star_failure_is_the_rank_defect() {
    let t = att2_from_dialgebra(&blocks(2, 1, gf5())).unwrap();
    let err = build_u2(&t, &CheckOptions::default()).unwrap_err();
    assert!(matches!(err, EmbedError::StarNotWellDefined { rank: 2, joint: 3, .. }), "{err}");
}
