//! Multilinear identities in n-ary bracket operations: parsing, canonical
//! form and printing.
//!
//! Surface syntax: `{a,b,{c,d,e}_1}_2 = {a,b,{c,d,e}_2}_2`. A chain may carry a
//! label (`ATT1.4: ...`), bracket arguments may be sums, and a lone `0` denotes
//! the zero polynomial.

mod parser;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use parser::{parse, parse_one, ParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DslError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("variable {var} occurs more than once in {monomial}")]
    RepeatedVariable { monomial: String, var: String },
    #[error("variable sets differ within the identity: {{{expected}}} vs {{{found}}}")]
    VariableMismatch { expected: String, found: String },
    #[error("subscript {sub} out of range for arity {arity}")]
    SubscriptOutOfRange { sub: u32, arity: usize },
    #[error("mixed arity: {expected} vs {found}")]
    MixedArity { expected: usize, found: usize },
    #[error("brackets need at least two arguments")]
    ArityTooSmall,
    #[error("subscripted and unsubscripted brackets mixed in one identity")]
    MixedSubscripts,
    #[error("an identity chain needs at least two members")]
    ChainTooShort,
    #[error("coefficient overflow")]
    Overflow,
}

/// A bracket tree over variable leaves.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Var(String),
    Op { sub: Option<u32>, args: Vec<Node> },
}

impl Node {
    pub fn var(name: &str) -> Node {
        Node::Var(name.to_string())
    }

    pub fn op(sub: Option<u32>, args: Vec<Node>) -> Node {
        Node::Op { sub, args }
    }

    /// Variables in written (left-to-right) order.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Node::Var(v) => out.push(v),
            Node::Op { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Node::Var(_) => 1,
            Node::Op { args, .. } => args.iter().map(Node::degree).sum(),
        }
    }

    pub fn contains(&self, var: &str) -> bool {
        match self {
            Node::Var(v) => v == var,
            Node::Op { args, .. } => args.iter().any(|a| a.contains(var)),
        }
    }

    pub fn strip_subscripts(&self) -> Node {
        match self {
            Node::Var(v) => Node::Var(v.clone()),
            Node::Op { args, .. } => Node::Op {
                sub: None,
                args: args.iter().map(Node::strip_subscripts).collect(),
            },
        }
    }

    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> Node {
        match self {
            Node::Var(v) => Node::Var(f(v)),
            Node::Op { sub, args } => Node::Op {
                sub: *sub,
                args: args.iter().map(|a| a.rename(f)).collect(),
            },
        }
    }

    fn write(&self, out: &mut String, latex: bool) {
        match self {
            Node::Var(v) => out.push_str(v),
            Node::Op { sub, args } => {
                out.push_str(if latex { "\\{" } else { "{" });
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    a.write(out, latex);
                }
                out.push_str(if latex { "\\}" } else { "}" });
                match (sub, latex) {
                    (Some(s), false) => out.push_str(&format!("_{s}")),
                    (Some(s), true) => out.push_str(&format!("_{{{s}}}")),
                    (None, _) => {}
                }
            }
        }
    }

    fn shape(&self, arity: &mut Option<usize>, regime: &mut Option<bool>) -> Result<(), DslError> {
        let Node::Op { sub, args } = self else {
            return Ok(());
        };
        let n = args.len();
        if n < 2 {
            return Err(DslError::ArityTooSmall);
        }
        match *arity {
            Some(a) if a != n => return Err(DslError::MixedArity { expected: a, found: n }),
            _ => *arity = Some(n),
        }
        match *regime {
            Some(r) if r != sub.is_some() => return Err(DslError::MixedSubscripts),
            _ => *regime = Some(sub.is_some()),
        }
        if let Some(s) = sub {
            if *s < 1 || *s as usize > n {
                return Err(DslError::SubscriptOutOfRange { sub: *s, arity: n });
            }
        }
        args.iter().try_for_each(|a| a.shape(arity, regime))
    }
}

/// A validated multilinear monomial, ordered by its serialization.
#[derive(Clone, Debug)]
pub struct Monomial {
    key: String,
    root: Node,
    arity: usize,
    subscripted: bool,
}

impl PartialEq for Monomial {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Monomial {}

impl std::hash::Hash for Monomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key.hash(state)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl Monomial {
    pub fn new(root: Node) -> Result<Self, DslError> {
        let mut arity = None;
        let mut regime = None;
        root.shape(&mut arity, &mut regime)?;
        let mut key = String::new();
        root.write(&mut key, false);
        let mut seen = BTreeSet::new();
        for v in root.variables() {
            if !seen.insert(v) {
                return Err(DslError::RepeatedVariable { monomial: key, var: v.to_string() });
            }
        }
        Ok(Monomial {
            key,
            root,
            arity: arity.unwrap_or(0),
            subscripted: regime.unwrap_or(false),
        })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Arity of the brackets; 0 for a bare variable.
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_subscripted(&self) -> bool {
        self.subscripted
    }

    pub fn degree(&self) -> usize {
        self.root.degree()
    }

    pub fn variables(&self) -> Vec<&str> {
        self.root.variables()
    }

    pub fn as_str(&self) -> &str {
        &self.key
    }

    pub fn to_latex(&self) -> String {
        let mut s = String::new();
        self.root.write(&mut s, true);
        s
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

/// Formal integer combination of monomials, always in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, i64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: Monomial) -> Self {
        let mut p = Self::zero();
        p.terms.insert(m, 1);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Monomial)>) -> Result<Self, DslError> {
        let mut p = Self::zero();
        for (c, m) in terms {
            p.add_term(c, m)?;
        }
        Ok(p)
    }

    pub fn add_term(&mut self, c: i64, m: Monomial) -> Result<(), DslError> {
        let e = self.terms.entry(m.clone()).or_insert(0);
        *e = e.checked_add(c).ok_or(DslError::Overflow)?;
        if *e == 0 {
            self.terms.remove(&m);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial, DslError> {
        let mut p = self.clone();
        for (m, c) in other.terms() {
            p.add_term(c.checked_neg().ok_or(DslError::Overflow)?, m.clone())?;
        }
        Ok(p)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    /// Applies a monomial transformation term by term and recollects.
    pub fn map_monomials(
        &self,
        mut f: impl FnMut(&Monomial) -> Result<Monomial, DslError>,
    ) -> Result<Polynomial, DslError> {
        let mut p = Self::zero();
        for (m, c) in self.terms() {
            p.add_term(c, f(m)?)?;
        }
        Ok(p)
    }

    /// Variable set shared by the terms; empty for the zero polynomial.
    pub fn variables(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .next()
            .map(|m| m.variables().into_iter().map(String::from).collect())
            .unwrap_or_default()
    }

    pub fn arity(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::arity).find(|&a| a > 0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn to_latex(&self) -> String {
        self.render(true)
    }

    fn render(&self, latex: bool) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms().enumerate() {
            let body = if latex { m.to_latex() } else { m.to_string() };
            let mag = c.unsigned_abs();
            match (i, c < 0) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            if mag != 1 {
                s.push_str(&mag.to_string());
                s.push_str(if latex { " " } else { "*" });
            }
            s.push_str(&body);
        }
        s
    }

    fn check_uniform(&self) -> Result<(), DslError> {
        let mut vars: Option<BTreeSet<&str>> = None;
        let mut arity = None;
        let mut regime = None;
        for m in self.terms.keys() {
            let vs: BTreeSet<&str> = m.variables().into_iter().collect();
            match &vars {
                Some(v) if *v != vs => {
                    return Err(DslError::VariableMismatch { expected: join(v), found: join(&vs) })
                }
                _ => vars = Some(vs),
            }
            if m.arity() > 0 {
                match arity {
                    Some(a) if a != m.arity() => {
                        return Err(DslError::MixedArity { expected: a, found: m.arity() })
                    }
                    _ => arity = Some(m.arity()),
                }
                match regime {
                    Some(r) if r != m.is_subscripted() => return Err(DslError::MixedSubscripts),
                    _ => regime = Some(m.is_subscripted()),
                }
            }
        }
        Ok(())
    }
}

fn join<'a>(s: impl IntoIterator<Item = &'a &'a str>) -> String {
    s.into_iter().copied().collect::<Vec<_>>().join(",")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Canonical normal form. Polynomials are kept canonical on construction, so
/// this is a normalizing copy.
pub fn canonicalize(p: &Polynomial) -> Polynomial {
    let mut out = Polynomial::zero();
    for (m, c) in p.terms() {
        out.add_term(c, m.clone()).expect("coefficients already fit");
    }
    out
}

/// Polynomials asserted pairwise equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityChain {
    name: String,
    arity: usize,
    members: Vec<Polynomial>,
}

impl IdentityChain {
    pub fn new(name: impl Into<String>, members: Vec<Polynomial>) -> Result<Self, DslError> {
        if members.len() < 2 {
            return Err(DslError::ChainTooShort);
        }
        let mut vars: Option<BTreeSet<String>> = None;
        let mut arity: Option<usize> = None;
        let mut regime: Option<bool> = None;
        for p in &members {
            p.check_uniform()?;
            let Some(m) = p.terms.keys().next() else { continue };
            let vs = p.variables();
            match &vars {
                Some(v) if *v != vs => {
                    return Err(DslError::VariableMismatch {
                        expected: v.iter().cloned().collect::<Vec<_>>().join(","),
                        found: vs.iter().cloned().collect::<Vec<_>>().join(","),
                    })
                }
                _ => vars = Some(vs),
            }
            if let Some(a) = p.arity() {
                match arity {
                    Some(b) if a != b => return Err(DslError::MixedArity { expected: b, found: a }),
                    _ => arity = Some(a),
                }
                match regime {
                    Some(r) if r != m.is_subscripted() => return Err(DslError::MixedSubscripts),
                    _ => regime = Some(m.is_subscripted()),
                }
            }
        }
        Ok(IdentityChain {
            name: name.into(),
            arity: arity.unwrap_or(0),
            members,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn members(&self) -> &[Polynomial] {
        &self.members
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.members.iter().map(Polynomial::variables).find(|v| !v.is_empty()).unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.members.iter().find_map(Polynomial::degree).unwrap_or(0)
    }

    /// Whether every bracket carries a subscript.
    pub fn is_subscripted(&self) -> bool {
        self.members
            .iter()
            .flat_map(|p| p.terms.keys())
            .any(Monomial::is_subscripted)
    }

    /// Consecutive differences `P₁−P₂, P₂−P₃, …`.
    pub fn differences(&self) -> Vec<Polynomial> {
        chain_to_polynomials(self)
    }

    /// Variables by first appearance in the first non-zero member, scanning
    /// its terms in canonical order.
    pub fn first_member_variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in &self.members {
            for m in p.terms.keys() {
                for v in m.variables() {
                    if !out.iter().any(|o| o == v) {
                        out.push(v.to_string());
                    }
                }
            }
            if !out.is_empty() {
                break;
            }
        }
        out
    }

    pub fn to_latex(&self) -> String {
        let parts: Vec<String> = self.members.iter().map(Polynomial::to_latex).collect();
        parts.join(" = ")
    }

    fn has_label(&self) -> bool {
        self.name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
    }
}

impl fmt::Display for IdentityChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.has_label() {
            write!(f, "{}: ", self.name)?;
        }
        for (i, p) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(" = ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

pub fn chain_to_polynomials(c: &IdentityChain) -> Vec<Polynomial> {
    c.members
        .windows(2)
        .map(|w| w[0].sub(&w[1]).expect("difference of parsed coefficients fits in i64"))
        .collect()
}

/// Text rendering of a monomial, polynomial or chain.
pub fn format<T: fmt::Display>(x: &T) -> String {
    x.to_string()
}

/// Renders chains in the input syntax, one per line, separated by `;`.
pub fn format_file(chains: &[IdentityChain]) -> String {
    let mut s = String::new();
    for (i, c) in chains.iter().enumerate() {
        s.push_str(&c.to_string());
        s.push_str(if i + 1 < chains.len() { ";\n" } else { "\n" });
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(s: &str) -> IdentityChain {
        parse_one(s).unwrap()
    }

    #[test]
    fn monomial_prints_with_subscript() {
        let c = chain("{a,b,c}_3 = {c,b,a}_3");
        let m = c.members()[0].terms().next().unwrap().0.clone();
        assert_eq!(format(&m), "{a,b,c}_3");
        assert_eq!(m.to_latex(), "\\{a,b,c\\}_{3}");
    }

    #[test]
    fn canceling_terms_vanish() {
        let c = chain("{a,b,c}_1 - {a,b,c}_1 = 0");
        assert!(c.members()[0].is_zero());
        assert_eq!(c.members()[0].to_string(), "0");
    }

    #[test]
    fn like_terms_collect() {
        let c = chain("2*{a,b} + 3*{a,b} = {b,a}");
        assert_eq!(c.members()[0].to_string(), "5*{a,b}");
    }

    #[test]
    fn sum_order_is_irrelevant() {
        let x = chain("{a,b,c}_2 + {c,b,a}_2 = {a,b,c}_1");
        let y = chain("{c,b,a}_2 + {a,b,c}_2 = {a,b,c}_1");
        assert_eq!(x.members()[0], y.members()[0]);
        assert_eq!(canonicalize(&x.members()[0]), x.members()[0]);
    }

    #[test]
    fn negative_leading_term() {
        let c = chain("-{a,b} = {b,a}");
        assert_eq!(c.members()[0].to_string(), "-{a,b}");
    }

    #[test]
    fn differences_of_three_member_chain() {
        let c = chain("{{a,b,c}_1,d,e}_1={a,{b,c,d}_1,e}_1={a,b,{c,d,e}_1}_1");
        assert_eq!(chain_to_polynomials(&c).len(), 2);
        let trivial = chain("x = x");
        let d = chain_to_polynomials(&trivial);
        assert_eq!(d.len(), 1);
        assert!(d[0].is_zero());
    }

    #[test]
    fn symmetric_difference_has_two_terms() {
        let c = chain("{a,b,c}_2 = {c,b,a}_2");
        let d = chain_to_polynomials(&c);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].len(), 2);
    }

    #[test]
    fn missing_variable_is_rejected() {
        assert!(matches!(
            parse_one("{a,b}_1 = {a,c}_1").unwrap_err().kind,
            DslError::VariableMismatch { .. }
        ));
    }

    #[test]
    fn labels_round_trip() {
        let c = chain("JTD1: {a,b,c}_2 = {c,b,a}_2");
        assert_eq!(c.name(), "JTD1");
        assert_eq!(c.to_string(), "JTD1: {a,b,c}_2 = {c,b,a}_2");
        assert_eq!(parse_one(&c.to_string()).unwrap(), c);
    }
}
