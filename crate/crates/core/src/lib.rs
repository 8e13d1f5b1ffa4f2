//! Equational deduction and finite-model checking for three logics of
//! exceptions: basic, decorated and explicit.

pub mod cli;
pub mod deduction;
pub mod dsl;
pub mod exceptions;
pub mod fuzz;
pub mod model;
pub mod print;
pub mod syntax;
pub mod translate;
