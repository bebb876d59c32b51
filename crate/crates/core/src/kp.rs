//! The Kolesnikov–Pozhidaev expansion of an identity in one n-ary operation
//! into identities in n subscripted operations.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::exactlin::{Echelon, Scalar, ScalarKind};
use crate::identity_dsl::{DslError, IdentityChain, Monomial, Node, Polynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KpError {
    #[error("central variable {0} does not occur in the monomial")]
    CentralAbsent(String),
    #[error("input identity is already subscripted")]
    AlreadySubscripted,
    #[error("input identity has no brackets")]
    NoBrackets,
    #[error("arity must be at least 2, got {0}")]
    ArityTooSmall(usize),
    #[error(transparent)]
    Dsl(#[from] DslError),
}

/// Subscripts every bracket of `m` relative to the central variable.
///
/// A node containing the central variable in its `j`-th argument gets `j`; a
/// node lying entirely to the right of it gets 1, entirely to the left gets n.
pub fn subscript_monomial(m: &Monomial, central: &str) -> Result<Monomial, KpError> {
    if m.is_subscripted() {
        return Err(KpError::AlreadySubscripted);
    }
    let pos = m
        .variables()
        .iter()
        .position(|v| *v == central)
        .ok_or_else(|| KpError::CentralAbsent(central.to_string()))?;
    let (node, _) = subscript_node(m.root(), pos, 0);
    Ok(Monomial::new(node)?)
}

/// Returns the subscripted node and its leaf count.
fn subscript_node(node: &Node, central: usize, start: usize) -> (Node, usize) {
    match node {
        Node::Var(v) => (Node::Var(v.clone()), 1),
        Node::Op { args, .. } => {
            let n = args.len();
            let mut at = start;
            let mut sub = None;
            let mut out = Vec::with_capacity(n);
            for (k, a) in args.iter().enumerate() {
                let (child, len) = subscript_node(a, central, at);
                if (at..at + len).contains(&central) {
                    sub = Some(k as u32 + 1);
                }
                at += len;
                out.push(child);
            }
            let sub = sub.unwrap_or(if central < start { 1 } else { n as u32 });
            (Node::Op { sub: Some(sub), args: out }, at - start)
        }
    }
}

fn check_input(id: &IdentityChain) -> Result<(), KpError> {
    if id.is_subscripted() {
        return Err(KpError::AlreadySubscripted);
    }
    match id.arity() {
        0 => Err(KpError::NoBrackets),
        1 => Err(KpError::ArityTooSmall(1)),
        _ => Ok(()),
    }
}

/// One chain per variable, taking that variable as central.
pub fn kp_part1(id: &IdentityChain) -> Result<Vec<IdentityChain>, KpError> {
    check_input(id)?;
    id.first_member_variables()
        .iter()
        .map(|v| {
            let members = id
                .members()
                .iter()
                .map(|p| p.map_monomials(|m| subscript_monomial(m, v).map_err(into_dsl)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(IdentityChain::new(format!("p1.{v}"), members)?)
        })
        .collect()
}

fn into_dsl(e: KpError) -> DslError {
    match e {
        KpError::Dsl(d) => d,
        other => DslError::Syntax(other.to_string()),
    }
}

/// Interchange identities: for outer subscript `j` and inner position
/// `i ≠ j`, the chain `{a1,…,{b1,…,bn}_k,…,an}_j` over `k = 1..n`.
pub fn kp_part2(n: usize) -> Result<Vec<IdentityChain>, KpError> {
    if n < 2 {
        return Err(KpError::ArityTooSmall(n));
    }
    let mut out = Vec::with_capacity(n * (n - 1));
    for j in 1..=n {
        for i in 1..=n {
            if i == j {
                continue;
            }
            let members = (1..=n)
                .map(|k| {
                    let inner = Node::op(Some(k as u32), (1..=n).map(|b| Node::Var(format!("b{b}"))).collect());
                    let args = (1..=n)
                        .map(|pos| if pos == i { inner.clone() } else { Node::Var(format!("a{pos}")) })
                        .collect();
                    Ok(Polynomial::monomial(Monomial::new(Node::op(Some(j as u32), args))?))
                })
                .collect::<Result<Vec<_>, DslError>>()?;
            out.push(IdentityChain::new(format!("p2.j{j}.i{i}"), members)?);
        }
    }
    Ok(out)
}

/// A chain dropped during deduplication and the chain it coincides with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Collapse {
    pub dropped: String,
    pub kept: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct KpOutput {
    pub part1: Vec<IdentityChain>,
    pub part2: Vec<IdentityChain>,
    pub deduped: Vec<IdentityChain>,
    pub collapsed: Vec<Collapse>,
}

pub fn kp_apply(id: &IdentityChain) -> Result<KpOutput, KpError> {
    let part1 = kp_part1(id)?;
    let part2 = kp_part2(id.arity())?;
    let mut seen: Vec<(IdentityKey, String)> = Vec::new();
    let mut deduped = Vec::new();
    let mut collapsed = Vec::new();
    for c in part1.iter().chain(&part2) {
        let key = identity_key(c);
        if let Some((_, kept)) = seen.iter().find(|(k, _)| *k == key) {
            collapsed.push(Collapse { dropped: c.name().to_string(), kept: kept.clone() });
        } else {
            seen.push((key, c.name().to_string()));
            deduped.push(c.clone());
        }
    }
    Ok(KpOutput { part1, part2, deduped, collapsed })
}

/// Canonical content of a chain: the reduced echelon basis of the span of its
/// difference polynomials, minimized over renamings of the variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IdentityKey(Vec<Vec<(String, String)>>);

/// Renaming-minimization is exhaustive up to this many variables.
const MAX_RENAMED_VARIABLES: usize = 8;

pub fn identity_key(chain: &IdentityChain) -> IdentityKey {
    let diffs = chain.differences();
    let vars: Vec<String> = chain.variables().into_iter().collect();
    if vars.len() > MAX_RENAMED_VARIABLES {
        return span_key(&diffs);
    }
    let mut best: Option<IdentityKey> = None;
    for perm in permutations(vars.len()) {
        let rename = |v: &str| {
            let i = vars.iter().position(|x| x == v).expect("variable of this chain");
            format!("x{}", perm[i])
        };
        let renamed: Vec<Polynomial> = diffs
            .iter()
            .map(|p| {
                p.map_monomials(|m| Monomial::new(m.root().rename(&rename)))
                    .expect("renaming preserves validity")
            })
            .collect();
        let key = span_key(&renamed);
        if best.as_ref().map_or(true, |b| key < *b) {
            best = Some(key);
        }
    }
    best.unwrap_or_else(|| span_key(&diffs))
}

fn span_key(polys: &[Polynomial]) -> IdentityKey {
    let monomials: Vec<Monomial> = polys
        .iter()
        .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let kind = ScalarKind::Rational;
    let mut e = Echelon::new(kind, monomials.len());
    for p in polys {
        let mut v = vec![Scalar::zero(kind); monomials.len()];
        for (m, c) in p.terms() {
            let i = monomials.binary_search(m).expect("collected monomial");
            v[i] = Scalar::from_i64(kind, c);
        }
        e.insert(v);
    }
    IdentityKey(
        e.rows()
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, s)| !s.is_zero())
                    .map(|(i, s)| (monomials[i].to_string(), s.to_string()))
                    .collect()
            })
            .collect(),
    )
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Result of comparing derived chains against a reference list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GoldenDiff {
    /// Reference chains with no derived counterpart.
    pub missing: Vec<String>,
    /// Derived chains absent from the reference.
    pub extra: Vec<String>,
}

impl GoldenDiff {
    pub fn is_match(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Set comparison of identity content, ignoring chain names and order.
pub fn compare_with_golden(derived: &[IdentityChain], golden: &[IdentityChain]) -> GoldenDiff {
    let dk: Vec<IdentityKey> = derived.iter().map(identity_key).collect();
    let gk: Vec<IdentityKey> = golden.iter().map(identity_key).collect();
    GoldenDiff {
        missing: golden
            .iter()
            .zip(&gk)
            .filter(|(_, k)| !dk.contains(k))
            .map(|(c, _)| c.to_string())
            .collect(),
        extra: derived
            .iter()
            .zip(&dk)
            .filter(|(_, k)| !gk.contains(k))
            .map(|(c, _)| c.to_string())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity_dsl::parse_one;

    fn mono(s: &str) -> Monomial {
        let c = parse_one(&format!("{s} = {s}")).unwrap();
        let m = c.members()[0].terms().next().unwrap().0.clone();
        m
    }

    #[test]
    fn central_on_left_of_binary() {
        assert_eq!(subscript_monomial(&mono("{{a,b},c}"), "a").unwrap().as_str(), "{{a,b}_1,c}_1");
        assert_eq!(subscript_monomial(&mono("{a,{b,c}}"), "c").unwrap().as_str(), "{a,{b,c}_2}_2");
    }

    #[test]
    fn ternary_middle_argument() {
        let m = subscript_monomial(&mono("{a,{b,c,d},e}"), "c").unwrap();
        assert_eq!(m.as_str(), "{a,{b,c,d}_2,e}_2");
    }

    #[test]
    fn nodes_away_from_the_centre() {
        let m = subscript_monomial(&mono("{a,{b,c,d},e}"), "a").unwrap();
        assert_eq!(m.as_str(), "{a,{b,c,d}_1,e}_1");
        let m = subscript_monomial(&mono("{a,{b,c,d},e}"), "e").unwrap();
        assert_eq!(m.as_str(), "{a,{b,c,d}_3,e}_3");
    }

    #[test]
    fn absent_central_is_an_error() {
        assert_eq!(
            subscript_monomial(&mono("{a,b}"), "z").unwrap_err(),
            KpError::CentralAbsent("z".into())
        );
    }

    #[test]
    fn part2_counts() {
        assert_eq!(kp_part2(2).unwrap().len(), 2);
        assert_eq!(kp_part2(3).unwrap().len(), 6);
        assert_eq!(kp_part2(4).unwrap().len(), 12);
        assert!(kp_part2(1).is_err());
        let c = &kp_part2(2).unwrap()[0];
        assert_eq!(c.to_string(), "p2.j1.i2: {a1,{b1,b2}_1}_1 = {a1,{b1,b2}_2}_1");
    }

    #[test]
    fn part1_requires_unsubscripted_input() {
        let c = parse_one("{a,b}_1 = {b,a}_1").unwrap();
        assert_eq!(kp_part1(&c).unwrap_err(), KpError::AlreadySubscripted);
    }

    #[test]
    fn key_ignores_renaming_and_orientation() {
        let x = parse_one("{a,{b,c}_1}_1 = {a,{b,c}_2}_1").unwrap();
        let y = parse_one("{z,{x,y}_2}_1 = {z,{x,y}_1}_1").unwrap();
        assert_eq!(identity_key(&x), identity_key(&y));
        let w = parse_one("{a,{b,c}_1}_2 = {a,{b,c}_2}_2").unwrap();
        assert_ne!(identity_key(&x), identity_key(&w));
    }

    #[test]
    fn key_sees_span_not_syntax() {
        let x = parse_one("{a,b,c}_1 = {a,b,c}_2 = {a,b,c}_3").unwrap();
        let y = parse_one("{a,b,c}_3 = {a,b,c}_1 = {a,b,c}_2").unwrap();
        assert_eq!(identity_key(&x), identity_key(&y));
    }
}
