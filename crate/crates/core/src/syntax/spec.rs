//! Specifications: declarations, sums, exceptions and axioms.

use std::collections::HashMap;

use super::term::{Decoration, Logic, Name, SumId, Term, Ty};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SumKind {
    /// Declared by the user.
    Ordinary,
    /// The exceptional sum `0 = P_1 + ... + P_k` of a decorated specification.
    Exceptional,
    /// `Y = Y + 0` with coprojections `id` and `raise`.
    PlusZero,
    /// `Y+E` of an explicit specification.
    PlusExc,
    /// Produced while building an inverse image.
    Derived,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumInfo {
    pub name: Name,
    pub vertex: Ty,
    pub summands: Vec<Ty>,
    /// Normalized coprojection terms, one per summand.
    pub coprojections: Vec<Term>,
    /// Surface names used when printing branches of a match over this sum.
    pub labels: Vec<Name>,
    pub kind: SumKind,
}

impl SumInfo {
    pub fn arity(&self) -> usize {
        self.summands.len()
    }

    /// The coprojection chain of summand `i`, outermost first.
    pub fn coproj_chain(&self, i: usize) -> Vec<Term> {
        self.coprojections[i].chain()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| &**l == label)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenDecl {
    pub name: Name,
    pub source: Ty,
    pub target: Ty,
    pub decoration: Decoration,
    /// Exceptions are generators `t : P -> 0`.
    pub exception: bool,
    /// Defined functions carry their body and unfold during normalization.
    pub body: Option<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionDecl {
    pub name: Name,
    pub param: Ty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Axiom,
    Derived,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    pub level: Decoration,
    pub origin: Origin,
}

/// Declaration order, kept for printing and reporting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Type(usize),
    Fun(usize),
    Sum(SumId),
    Exception(usize),
    Axiom(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Specification {
    pub logic: Logic,
    pub types: Vec<Name>,
    pub generators: Vec<GenDecl>,
    pub sums: Vec<SumInfo>,
    pub exceptions: Vec<ExceptionDecl>,
    pub exceptional_sum: Option<SumId>,
    /// `E = P_1 + ... + P_k` in an explicit specification obtained by expansion.
    pub exc_sum: Option<SumId>,
    pub axioms: Vec<Equation>,
    pub items: Vec<Item>,
    pub(crate) gen_index: HashMap<Name, usize>,
    /// Generators that double as coprojections of a declared sum.
    pub(crate) aliases: HashMap<Name, (SumId, u32)>,
}

impl Specification {
    pub fn empty(logic: Logic) -> Specification {
        Specification {
            logic,
            types: Vec::new(),
            generators: Vec::new(),
            sums: Vec::new(),
            exceptions: Vec::new(),
            exceptional_sum: None,
            exc_sum: None,
            axioms: Vec::new(),
            items: Vec::new(),
            gen_index: HashMap::new(),
            aliases: HashMap::new(),
        }
    }

    pub fn generator(&self, name: &str) -> Option<&GenDecl> {
        self.gen_index.get(name).map(|&i| &self.generators[i])
    }

    pub fn alias(&self, name: &str) -> Option<(SumId, u32)> {
        self.aliases.get(name).copied()
    }

    pub fn has_type(&self, name: &str) -> bool {
        self.types.iter().any(|t| &**t == name)
    }

    pub fn sum(&self, id: SumId) -> &SumInfo {
        &self.sums[id.index()]
    }

    /// The declared sum whose vertex is `ty`, if any.
    pub fn sum_with_vertex(&self, ty: &Ty) -> Option<SumId> {
        self.sums
            .iter()
            .position(|s| &s.vertex == ty)
            .map(|i| SumId(i as u32))
    }

    pub fn exception_index(&self, name: &str) -> Option<usize> {
        self.exceptions.iter().position(|e| &*e.name == name)
    }

    pub(crate) fn push_generator(&mut self, decl: GenDecl) -> usize {
        let idx = self.generators.len();
        self.gen_index.insert(decl.name.clone(), idx);
        self.generators.push(decl);
        self.items.push(Item::Fun(idx));
        idx
    }

    pub(crate) fn push_sum(&mut self, info: SumInfo) -> SumId {
        let id = SumId(self.sums.len() as u32);
        self.sums.push(info);
        id
    }

    pub(crate) fn set_alias(&mut self, name: Name, sum: SumId, index: u32) {
        self.aliases.insert(name, (sum, index));
    }

    /// Number of declared (not derived) sums.
    pub fn declared_sums(&self) -> impl Iterator<Item = (SumId, &SumInfo)> {
        self.sums
            .iter()
            .enumerate()
            .map(|(i, s)| (SumId(i as u32), s))
    }
}
