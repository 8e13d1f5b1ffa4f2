//! Types and function terms shared by the three logics.

use std::fmt;
use std::sync::Arc;

pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SumId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvId(pub u32);

impl SumId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl InvId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ty {
    Named(Name),
    /// The initial type 0.
    Zero,
    /// Vertex of a sum that has no name of its own.
    Vertex(SumId),
    /// Summand `k` generated by an inverse image.
    Part(InvId, u32),
    /// The distinguished exception type of explicit specifications.
    Exc,
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Named(n) => f.write_str(n),
            Ty::Zero => f.write_str("0"),
            Ty::Exc => f.write_str("E"),
            Ty::Vertex(s) => write!(f, "<sum {}>", s.0),
            Ty::Part(i, k) => write!(f, "<part {}.{}>", i.0, k),
        }
    }
}

impl Ty {
    pub fn named(s: &str) -> Ty {
        Ty::Named(name(s))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Decoration {
    Plain,
    Value,
    Computation,
}

impl Decoration {
    pub fn join(self, other: Decoration) -> Decoration {
        self.max(other)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decoration::Plain => "plain",
            Decoration::Value => "value",
            Decoration::Computation => "computation",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Logic {
    Basic,
    Decorated,
    Explicit,
}

impl Logic {
    pub fn as_str(self) -> &'static str {
        match self {
            Logic::Basic => "basic",
            Logic::Decorated => "decorated",
            Logic::Explicit => "explicit",
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Gen(Name),
    Id(Ty),
    /// Outermost first: `Comp([g, f])` is `g . f`.
    Comp(Vec<Term>),
    Coproj(SumId, u32),
    Match(SumId, Vec<Term>),
    /// `[]_Y`, printed `raise(Y)` in decorated contexts.
    Empty(Ty),
    Case {
        scrut: Box<Term>,
        sum: SumId,
        branches: Vec<Term>,
    },
    CaseT {
        scrut: Box<Term>,
        on_value: Box<Term>,
        on_raise: Box<Term>,
    },
    /// Missing branches take the default re-raising computation.
    CaseE {
        scrut: Box<Term>,
        branches: Vec<Option<Term>>,
        target: Ty,
    },
    Handle {
        body: Box<Term>,
        branches: Vec<Option<Term>>,
    },
    InvCoproj(InvId, u32),
    Restrict(InvId, u32),
}

impl Term {
    pub fn gen(s: &str) -> Term {
        Term::Gen(name(s))
    }

    /// Composition of `outer . inner`, flattening nested compositions and
    /// dropping nothing else.
    pub fn then(inner: Term, outer: Term) -> Term {
        Term::comp(vec![outer, inner])
    }

    /// Builds a composition from an outermost-first list, flattening nested
    /// compositions. A one-element list yields its element.
    pub fn comp(items: Vec<Term>) -> Term {
        let mut out = Vec::with_capacity(items.len());
        for t in items {
            match t {
                Term::Comp(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Term::Comp(out)
        }
    }

    /// Atoms of the composition chain, outermost first. Identities count as
    /// the empty chain.
    pub fn chain(&self) -> Vec<Term> {
        match self {
            Term::Comp(v) => v.clone(),
            Term::Id(_) => Vec::new(),
            other => vec![other.clone()],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Comp(v) | Term::Match(_, v) => v.iter().collect(),
            Term::Case {
                scrut, branches, ..
            } => std::iter::once(&**scrut).chain(branches.iter()).collect(),
            Term::CaseT {
                scrut,
                on_value,
                on_raise,
            } => vec![scrut, on_value, on_raise],
            Term::CaseE {
                scrut, branches, ..
            } => std::iter::once(&**scrut)
                .chain(branches.iter().flatten())
                .collect(),
            Term::Handle { body, branches } => std::iter::once(&**body)
                .chain(branches.iter().flatten())
                .collect(),
            _ => Vec::new(),
        }
    }

    /// True when any subterm satisfies `pred`.
    pub fn any(&self, pred: &dyn Fn(&Term) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    /// Generator names mentioned anywhere in the term.
    pub fn generators(&self, out: &mut Vec<Name>) {
        if let Term::Gen(n) = self {
            if !out.contains(n) {
                out.push(n.clone());
            }
        }
        for c in self.children() {
            c.generators(out);
        }
    }
}
