//! Derivation store: normalization, inverse images and the equivalence
//! decision procedure.

mod construct;
mod equiv;
mod invimage;
mod normalize;
mod trace;

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::syntax::{
    decoration, signature, Decoration, Env, Equation, GenDecl, InvId, Logic, Name, Origin,
    Specification, SumId, SumInfo, SumKind, Term, TermError, Ty,
};

pub use equiv::{Outcome, Proof};
pub(crate) use construct::BranchMode;
pub use trace::{replay, ReplayError, Rule, Step, Trace};

pub const DEFAULT_DEPTH: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Value,
    Computation,
    Exceptional,
}

impl Flavor {
    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::Value => "value",
            Flavor::Computation => "computation",
            Flavor::Exceptional => "exceptional",
        }
    }
}

/// A sum structure on the source of `along`, pulled back from `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseImage {
    pub id: InvId,
    pub target: SumId,
    /// Normalized term the image is taken along.
    pub along: Term,
    pub flavor: Flavor,
    pub source: Ty,
    /// The generated sum on `source`; its summands are the pulled-back types.
    pub sum: SumId,
    pub restrictions: Vec<Term>,
    /// True when the summands are fresh types rather than recognized ones.
    pub opaque: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeductionError {
    #[error("ill-formed term: {0}")]
    IllFormed(#[from] TermError),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("proof search exceeded depth {0}")]
    DepthExceeded(usize),
    #[error("{0} is not a value")]
    NotAValue(String),
    #[error("{0} is not a computation")]
    NotAComputation(String),
    #[error("{0} does not target 0")]
    TargetNotZero(String),
    #[error("branch {index} has source {found}, expected {expected}")]
    BranchSourceMismatch {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("{0}")]
    Unsupported(String),
}

pub(crate) type InvKey = (SumId, Term, Flavor);

/// `chain(along) ++ [InvCoproj]` rewrites to `rhs`.
#[derive(Clone, Debug)]
pub(crate) struct ExtRule {
    lhs: Vec<Term>,
    rhs: Term,
}

#[derive(Clone, Debug)]
pub struct Store {
    spec: Specification,
    sums: Vec<SumInfo>,
    invs: Vec<InverseImage>,
    inv_keys: HashMap<InvKey, InvId>,
    plus_zero: HashMap<Ty, SumId>,
    plus_exc: HashMap<Ty, SumId>,
    rules: Vec<ExtRule>,
    derived: Vec<Equation>,
    derived_keys: HashSet<(Term, Term)>,
    nf_cache: HashMap<Term, Term>,
    pub depth: usize,
    /// Upper bound on goals visited by one `equiv` call.
    pub budget: usize,
    reuse_guard: bool,
}

impl Env for Store {
    fn logic(&self) -> Logic {
        self.spec.logic
    }
    fn generator(&self, name: &str) -> Option<&GenDecl> {
        self.spec.generator(name)
    }
    fn sum_info(&self, id: SumId) -> Option<&SumInfo> {
        self.sums.get(id.index())
    }
    fn inverse(&self, id: InvId) -> Option<&InverseImage> {
        self.invs.get(id.index())
    }
    fn exceptional_sum(&self) -> Option<SumId> {
        self.spec.exceptional_sum
    }
}

impl Store {
    pub fn new(spec: Specification) -> Store {
        let sums = spec.sums.clone();
        let mut plus_exc = HashMap::new();
        for (i, s) in sums.iter().enumerate() {
            if s.kind == SumKind::PlusExc {
                plus_exc.insert(s.summands[0].clone(), SumId(i as u32));
            }
        }
        Store {
            spec,
            sums,
            invs: Vec::new(),
            inv_keys: HashMap::new(),
            plus_zero: HashMap::new(),
            plus_exc,
            rules: Vec::new(),
            derived: Vec::new(),
            derived_keys: HashSet::new(),
            nf_cache: HashMap::new(),
            depth: DEFAULT_DEPTH,
            budget: 20_000,
            reuse_guard: false,
        }
    }

    pub fn spec(&self) -> &Specification {
        &self.spec
    }

    pub fn sums(&self) -> &[SumInfo] {
        &self.sums
    }

    pub fn sum(&self, id: SumId) -> &SumInfo {
        &self.sums[id.index()]
    }

    pub fn inverse_images(&self) -> &[InverseImage] {
        &self.invs
    }

    pub fn inverse_image_by_id(&self, id: InvId) -> &InverseImage {
        &self.invs[id.index()]
    }

    pub fn derived(&self) -> &[Equation] {
        &self.derived
    }

    pub fn signature(&self, t: &Term) -> Result<(Ty, Ty), DeductionError> {
        Ok(signature(self, t)?)
    }

    pub fn decoration(&self, t: &Term) -> Result<Decoration, DeductionError> {
        signature(self, t)?;
        Ok(decoration(self, t)?)
    }

    pub fn show(&self, t: &Term) -> String {
        crate::print::term(self, t)
    }

    pub fn show_ty(&self, t: &Ty) -> String {
        crate::print::ty(self, t)
    }

    /// Adds a definition to the underlying specification.
    pub fn define(&mut self, decl: GenDecl) {
        self.spec.push_generator(decl);
    }

    /// Adds an axiom to the underlying specification.
    pub fn add_axiom(&mut self, eq: Equation) {
        self.spec.items.push(crate::syntax::Item::Axiom(self.spec.axioms.len()));
        self.spec.axioms.push(eq);
    }

    /// Records a derived equation, normalized and deduplicated.
    pub(crate) fn record(&mut self, lhs: Term, rhs: Term) {
        if lhs == rhs || self.derived_keys.contains(&(lhs.clone(), rhs.clone())) {
            return;
        }
        let level = match (self.decoration(&lhs), self.decoration(&rhs)) {
            (Ok(a), Ok(b)) => a.join(b),
            _ => return,
        };
        self.derived_keys.insert((lhs.clone(), rhs.clone()));
        self.derived.push(Equation {
            lhs,
            rhs,
            level,
            origin: Origin::Derived,
        });
    }

    /// Registers a sum created by the engine and returns its id. With
    /// `vertex == None` the sum gets a fresh vertex of its own.
    pub(crate) fn add_sum(
        &mut self,
        name: Name,
        vertex: Option<Ty>,
        summands: Vec<Ty>,
        coprojections: Vec<Term>,
        kind: SumKind,
        labels: Option<Vec<Name>>,
    ) -> SumId {
        let id = SumId(self.sums.len() as u32);
        let n = summands.len();
        self.sums.push(SumInfo {
            name,
            vertex: vertex.unwrap_or(Ty::Vertex(id)),
            summands,
            coprojections,
            labels: labels.unwrap_or_else(|| (0..n).map(|i| crate::syntax::name(&format!("#{i}"))).collect()),
            kind,
        });
        id
    }

    /// The sum `Y = Y + 0` with coprojections `id` and `raise`.
    pub fn plus_zero(&mut self, y: &Ty) -> SumId {
        if let Some(&s) = self.plus_zero.get(y) {
            return s;
        }
        let nm = crate::syntax::name(&format!("{}+0", self.show_ty(y)));
        let s = self.add_sum(
            nm,
            Some(y.clone()),
            vec![y.clone(), Ty::Zero],
            vec![Term::Id(y.clone()), Term::Empty(y.clone())],
            SumKind::PlusZero,
            Some(vec![crate::syntax::name("id"), crate::syntax::name("raise")]),
        );
        self.plus_zero.insert(y.clone(), s);
        s
    }

    /// The sum `Y+E` of an explicit specification, declared or generated.
    pub fn plus_exc(&mut self, y: &Ty) -> SumId {
        if let Some(&s) = self.plus_exc.get(y) {
            return s;
        }
        let shown = self.show_ty(y);
        let id = SumId(self.sums.len() as u32);
        let s = self.add_sum(
            crate::syntax::name(&format!("{shown}+E")),
            None,
            vec![y.clone(), Ty::Exc],
            vec![Term::Coproj(id, 0), Term::Coproj(id, 1)],
            SumKind::PlusExc,
            Some(vec![
                crate::syntax::name(&format!("inl@{shown}")),
                crate::syntax::name(&format!("inr@{shown}")),
            ]),
        );
        self.plus_exc.insert(y.clone(), s);
        s
    }

    pub fn exceptional_sum_id(&self) -> Option<SumId> {
        self.spec.exceptional_sum
    }

    /// A copy of this store seen through the basic logic: decorations are
    /// dropped, every sum becomes ordinary data, ids are preserved.
    pub fn undecorated(&self) -> Store {
        let mut s = self.clone();
        s.spec = crate::translate::undecorate_spec(&self.spec);
        for (i, info) in s.sums.iter_mut().enumerate() {
            if info.kind == SumKind::Exceptional {
                info.kind = s.spec.sums[i].kind;
            }
        }
        s.nf_cache.clear();
        for eq in &mut s.derived {
            eq.level = Decoration::Plain;
        }
        s
    }
}
