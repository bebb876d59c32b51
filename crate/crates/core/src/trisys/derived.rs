//! Triple products derived lazily from other models.

use crate::eval::{delegate_space, Model, OpKey, Space};
use crate::exactlin::{Scalar, StructureTensor};

/// First-kind triple products of a dialgebra model:
/// `{a,b,c}₁ = (a⊣b)⊣c`, `{a,b,c}₂ = (a⊢b)⊣c`, `{a,b,c}₃ = (a⊢b)⊢c`.
#[derive(Clone, Debug)]
pub struct Att1<'a, M>(pub &'a M);

impl<M: Model> Model for Att1<'_, M> {
    type Elem = M::Elem;

    delegate_space!();

    fn ops(&self) -> Vec<(OpKey, usize)> {
        vec![(Some(1), 3), (Some(2), 3), (Some(3), 3)]
    }

    fn apply(&self, key: OpKey, args: &[&M::Elem]) -> M::Elem {
        let (inner, outer) = match key {
            Some(1) => (1, 1),
            Some(2) => (2, 1),
            Some(3) => (2, 2),
            _ => panic!("operation {key:?} not provided"),
        };
        let ab = self.0.apply(Some(inner), &[args[0], args[1]]);
        self.0.apply(Some(outer), &[&ab, args[2]])
    }
}

/// Second-kind triple products of a dialgebra model with involution:
/// `{a,b,c}₁ = a⊣(b*⊣c)`, `{a,b,c}₂ = a⊢(b*⊣c)`, `{a,b,c}₃ = a⊢(b*⊢c)`.
#[derive(Clone, Debug)]
pub struct Att2<'a, M>(pub &'a M);

impl<M: Model> Model for Att2<'_, M> {
    type Elem = M::Elem;

    delegate_space!();

    fn ops(&self) -> Vec<(OpKey, usize)> {
        vec![(Some(1), 3), (Some(2), 3), (Some(3), 3)]
    }

    fn apply(&self, key: OpKey, args: &[&M::Elem]) -> M::Elem {
        let (outer, inner) = match key {
            Some(1) => (1, 1),
            Some(2) => (2, 1),
            Some(3) => (2, 2),
            _ => panic!("operation {key:?} not provided"),
        };
        let b = self.0.star(args[1]).expect("second-kind products need an involution");
        let bc = self.0.apply(Some(inner), &[&b, args[2]]);
        self.0.apply(Some(outer), &[args[0], &bc])
    }
}

/// Jordan products of a trisystem model:
/// `⟨a,b,c⟩₁ = {a,b,c}₁ + {c,b,a}₃` and `⟨a,b,c⟩₂ = {a,b,c}₂ + {c,b,a}₂`.
#[derive(Clone, Debug)]
pub struct Jtd<'a, M>(pub &'a M);

impl<M: Model> Model for Jtd<'_, M> {
    type Elem = M::Elem;

    delegate_space!();

    fn ops(&self) -> Vec<(OpKey, usize)> {
        vec![(Some(1), 3), (Some(2), 3)]
    }

    fn apply(&self, key: OpKey, args: &[&M::Elem]) -> M::Elem {
        let (first, reversed) = match key {
            Some(1) => (1, 3),
            Some(2) => (2, 2),
            _ => panic!("operation {key:?} not provided"),
        };
        let mut out = self.0.apply(Some(first), args);
        let r = self.0.apply(Some(reversed), &[args[2], args[1], args[0]]);
        self.0.add_scaled(&mut out, &Scalar::one(self.0.kind()), &r);
        out
    }
}

/// Leibniz bracket of a trisystem model:
/// `[a,b,c] = {a,b,c}₁ − {b,a,c}₂ − {c,a,b}₂ + {c,b,a}₃`.
#[derive(Clone, Debug)]
pub struct Leibts<'a, M>(pub &'a M);

impl<M: Model> Model for Leibts<'_, M> {
    type Elem = M::Elem;

    delegate_space!();

    fn ops(&self) -> Vec<(OpKey, usize)> {
        vec![(None, 3)]
    }

    fn apply(&self, key: OpKey, args: &[&M::Elem]) -> M::Elem {
        assert_eq!(key, None, "bracket is unsubscripted");
        let (a, b, c) = (args[0], args[1], args[2]);
        let one = Scalar::one(self.0.kind());
        let mut out = self.0.apply(Some(1), &[a, b, c]);
        self.0.add_scaled(&mut out, &-&one, &self.0.apply(Some(2), &[b, a, c]));
        self.0.add_scaled(&mut out, &-&one, &self.0.apply(Some(2), &[c, a, b]));
        self.0.add_scaled(&mut out, &one, &self.0.apply(Some(3), &[c, b, a]));
        out
    }
}

/// Structure tensor of one operation of a model over a finite basis.
pub fn materialize<M: Model<Elem = Vec<Scalar>>>(model: &M, key: OpKey) -> StructureTensor {
    let Space::Basis(n) = model.space() else {
        panic!("materialization needs a basis");
    };
    let arity = model
        .ops()
        .into_iter()
        .find(|(k, _)| *k == key)
        .unwrap_or_else(|| panic!("operation {key:?} not provided"))
        .1;
    let basis: Vec<Vec<Scalar>> = (0..n).map(|i| model.element(i)).collect();
    StructureTensor::from_fn(model.kind(), n, arity, |idx| {
        let args: Vec<&Vec<Scalar>> = idx.iter().map(|&i| &basis[i]).collect();
        model.apply(key, &args)
    })
}
