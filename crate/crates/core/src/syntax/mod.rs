//! Syntax of the basic, decorated and explicit logics.

mod builder;
mod spec;
mod term;
mod typing;
mod wf;

pub use builder::{build_specification, decoration_of, Declaration, SpecBuilder, SpecError, SumVertex};
pub use spec::{Equation, ExceptionDecl, GenDecl, Item, Origin, Specification, SumInfo, SumKind};
pub use term::{name, Decoration, InvId, Logic, Name, SumId, Term, Ty};
pub use typing::{decoration, default_decoration, signature, Env, TermError};
pub use wf::{well_formed, Report};
