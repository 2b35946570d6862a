//! An affine-typed lazy functional language.
//!
//! The pieces, bottom up:
//!
//! - [`types`] / [`terms`]: the type and term trees, substitutions, linear
//!   contexts and the global environment.
//! - [`unify`]: most general unification, symmetric and directional.
//! - [`mod@infer`]: type inference threading the linear context through
//!   the premises of each rule, one case per typing rule.
//! - [`trace`]: derivation trees recorded by inference, their renderings,
//!   and an independent validation pass over them.
//! - [`eval`]: call-by-need evaluation with memoizing thunks, stream
//!   prefix forcing and Peano decoding.
//! - [`parser`] / [`mod@print`]: the surface syntax in both directions.
//! - [`check`]: declaration-by-declaration program checking.
//! - [`corpus`]: embedded example programs with a manifest of expected
//!   types, errors and values.

pub mod check;
pub mod corpus;
pub mod eval;
pub mod infer;
pub mod parser;
pub mod print;
pub mod terms;
pub mod trace;
pub mod types;
pub mod unify;

pub use check::{check_program, check_source, CheckedProgram, DefReport, ProgramError};
pub use eval::{render_value, EvalError, Evaluator, Value};
pub use infer::{infer, instantiate, FreshSupply, InferenceResult, TypeError, TypeErrorKind};
pub use parser::{parse_program, parse_term, parse_type, ParseError, SourceProgram};
pub use print::{print_term, print_term_with, print_type, print_type_with};
pub use terms::{Context, GlobalDef, GlobalEnv, Span, Term, TermKind};
pub use trace::{validate_trace, DerivationNode, RuleName};
pub use types::{
    alpha_eq, bang_of, free_type_vars, normalize_type_vars, unroll_mu, Subst, Type, TypeConst,
    TypeOp,
};
pub use unify::{mgu, mgu_to, UnifyError};
