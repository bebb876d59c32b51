use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::eval::{Model, OpKey, Space};
use crate::exactlin::{is_negative, Matrix, Scalar, ScalarKind, StructureTensor};

use super::{DialgError, DialgebraInstance};

/// A basis word of the free dialgebra: generators with a marked center
/// (1-based).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreeDiWord {
    word: Vec<u32>,
    center: usize,
}

impl FreeDiWord {
    pub fn new(word: Vec<u32>, center: usize) -> Result<Self, DialgError> {
        if word.is_empty() || center == 0 || center > word.len() {
            return Err(DialgError::BadWord { len: word.len(), center });
        }
        Ok(FreeDiWord { word, center })
    }

    pub fn generator(i: u32) -> Self {
        FreeDiWord { word: vec![i], center: 1 }
    }

    pub fn word(&self) -> &[u32] {
        &self.word
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn concat(&self, other: &FreeDiWord) -> Vec<u32> {
        let mut w = self.word.clone();
        w.extend_from_slice(&other.word);
        w
    }

    /// `(w,c) ⊣ (w',c') = (ww', c)`.
    pub fn left(&self, other: &FreeDiWord) -> FreeDiWord {
        FreeDiWord { word: self.concat(other), center: self.center }
    }

    /// `(w,c) ⊢ (w',c') = (ww', |w| + c')`.
    pub fn right(&self, other: &FreeDiWord) -> FreeDiWord {
        FreeDiWord { word: self.concat(other), center: self.len() + other.center }
    }
}

/// `(w, c) ↦ (reverse w, |w| + 1 − c)`.
pub fn free_involution(w: &FreeDiWord) -> FreeDiWord {
    FreeDiWord {
        word: w.word.iter().rev().copied().collect(),
        center: w.len() + 1 - w.center,
    }
}

impl fmt::Display for FreeDiWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for &g in &self.word {
            if g < 26 {
                write!(f, "{}", (b'a' + g as u8) as char)?;
            } else {
                write!(f, "x{g}")?;
            }
        }
        write!(f, ",{})", self.center)
    }
}

/// All words of length at most `max_degree` with every center, ordered by
/// length, then word, then center.
pub fn free_basis(generators: usize, max_degree: usize) -> Vec<FreeDiWord> {
    let mut out = Vec::new();
    let mut words: Vec<Vec<u32>> = vec![Vec::new()];
    for len in 1..=max_degree {
        words = words
            .iter()
            .flat_map(|w| {
                (0..generators as u32).map(move |g| {
                    let mut v = w.clone();
                    v.push(g);
                    v
                })
            })
            .collect();
        for w in &words {
            for c in 1..=len {
                out.push(FreeDiWord { word: w.clone(), center: c });
            }
        }
    }
    out
}

/// Linear combinations of [`FreeDiWord`]s.
pub type FreeElement = BTreeMap<FreeDiWord, Scalar>;

/// The free dialgebra on `generators` letters, truncated above `max_degree`.
///
/// Evaluated lazily, so large truncations are cheap as long as only a few
/// words are touched. By default variables range over distinct generators;
/// [`FreeDialgebra::over_basis`] switches to all basis words.
#[derive(Clone, Debug)]
pub struct FreeDialgebra {
    kind: ScalarKind,
    generators: usize,
    max_degree: usize,
    basis: Option<Vec<FreeDiWord>>,
}

impl FreeDialgebra {
    pub fn new(kind: ScalarKind, generators: usize, max_degree: usize) -> Self {
        assert!(generators >= 1 && max_degree >= 1, "free dialgebra needs a generator and degree");
        FreeDialgebra { kind, generators, max_degree, basis: None }
    }

    pub fn over_basis(mut self) -> Self {
        self.basis = Some(free_basis(self.generators, self.max_degree));
        self
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn word(&self, w: FreeDiWord) -> FreeElement {
        BTreeMap::from([(w, Scalar::one(self.kind))])
    }

    fn product(&self, a: &FreeElement, b: &FreeElement, op: fn(&FreeDiWord, &FreeDiWord) -> FreeDiWord) -> FreeElement {
        let mut out = FreeElement::new();
        for (u, x) in a {
            for (v, y) in b {
                if u.len() + v.len() > self.max_degree {
                    continue;
                }
                let c = x * y;
                let e = out.entry(op(u, v)).or_insert_with(|| Scalar::zero(self.kind));
                *e += &c;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub fn left(&self, a: &FreeElement, b: &FreeElement) -> FreeElement {
        self.product(a, b, FreeDiWord::left)
    }

    pub fn right(&self, a: &FreeElement, b: &FreeElement) -> FreeElement {
        self.product(a, b, FreeDiWord::right)
    }
}

impl Model for FreeDialgebra {
    type Elem = FreeElement;

    fn kind(&self) -> ScalarKind {
        self.kind
    }

    fn ops(&self) -> Vec<(OpKey, usize)> {
        vec![(Some(1), 2), (Some(2), 2)]
    }

    fn apply(&self, key: OpKey, args: &[&FreeElement]) -> FreeElement {
        match key {
            Some(1) => self.left(args[0], args[1]),
            Some(2) => self.right(args[0], args[1]),
            _ => panic!("operation {key:?} not provided"),
        }
    }

    fn zero(&self) -> FreeElement {
        FreeElement::new()
    }

    fn add_scaled(&self, acc: &mut FreeElement, c: &Scalar, x: &FreeElement) {
        for (w, s) in x {
            let e = acc.entry(w.clone()).or_insert_with(|| Scalar::zero(self.kind));
            *e += &(c * s);
        }
        acc.retain(|_, c| !c.is_zero());
    }

    fn is_zero(&self, x: &FreeElement) -> bool {
        x.values().all(Scalar::is_zero)
    }

    fn render(&self, x: &FreeElement) -> String {
        render_free(x)
    }

    fn space(&self) -> Space {
        match &self.basis {
            Some(b) => Space::Basis(b.len()),
            None => Space::Generators(self.generators),
        }
    }

    fn element(&self, i: usize) -> FreeElement {
        match &self.basis {
            Some(b) => self.word(b[i].clone()),
            None => self.word(FreeDiWord::generator(i as u32)),
        }
    }

    fn label(&self, i: usize) -> String {
        match &self.basis {
            Some(b) => b[i].to_string(),
            None => FreeDiWord::generator(i as u32).to_string(),
        }
    }

    fn star(&self, x: &FreeElement) -> Option<FreeElement> {
        Some(x.iter().map(|(w, c)| (free_involution(w), c.clone())).collect())
    }
}

pub fn render_free(x: &FreeElement) -> String {
    let mut s = String::new();
    for (w, c) in x.iter().filter(|(_, c)| !c.is_zero()) {
        let neg = is_negative(c);
        let mag = if neg { -c } else { c.clone() };
        match (s.is_empty(), neg) {
            (true, true) => s.push('-'),
            (true, false) => {}
            (false, true) => s.push_str(" - "),
            (false, false) => s.push_str(" + "),
        }
        if !mag.is_one() {
            s.push_str(&format!("{mag}*"));
        }
        s.push_str(&w.to_string());
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

/// The truncated free dialgebra as a finite instance with structure tensors
/// and the word-reversing involution.
pub fn free_dialgebra(kind: ScalarKind, generators: usize, max_degree: usize) -> DialgebraInstance {
    let basis = free_basis(generators, max_degree);
    let index: HashMap<&FreeDiWord, usize> = basis.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let n = basis.len();
    let table = |op: fn(&FreeDiWord, &FreeDiWord) -> FreeDiWord| {
        StructureTensor::from_fn(kind, n, 2, |idx| {
            let (u, v) = (&basis[idx[0]], &basis[idx[1]]);
            let mut out = vec![Scalar::zero(kind); n];
            if u.len() + v.len() <= max_degree {
                out[index[&op(u, v)]] = Scalar::one(kind);
            }
            out
        })
    };
    let left = table(FreeDiWord::left);
    let right = table(FreeDiWord::right);
    let mut inv = Matrix::zeros(kind, n, n);
    for (j, w) in basis.iter().enumerate() {
        inv.set(index[&free_involution(w)], j, Scalar::one(kind));
    }
    let labels = basis.iter().map(ToString::to_string).collect();
    DialgebraInstance::new(left, right, Some(inv), labels).expect("consistent free tables")
}
