//! Declaration-by-declaration checking of parsed programs.

use crate::infer::{check_global_def, FreshSupply, InferenceResult, TypeError};
use crate::parser::{parse_program, Decl, ParseError, SourceProgram};
use crate::terms::{GlobalEnv, Span};
use crate::types::Type;
use std::fmt;

/// One successfully checked definition.
#[derive(Debug, Clone)]
pub struct DefReport {
    pub name: String,
    pub declared: Type,
    pub inference: InferenceResult,
    pub span: Span,
}

/// A checked program: the extended environment, the synonyms in scope for
/// printing, and a report per definition in order.
#[derive(Debug, Clone, Default)]
pub struct CheckedProgram {
    pub env: GlobalEnv,
    pub synonyms: Vec<(String, Type)>,
    pub reports: Vec<DefReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProgramError {
    Parse(ParseError),
    Type { def_name: String, error: TypeError },
}

impl ProgramError {
    pub fn class(&self) -> &'static str {
        match self {
            ProgramError::Parse(e) => e.class(),
            ProgramError::Type { error, .. } => error.class(),
        }
    }

    pub fn span(&self) -> Span {
        match self {
            ProgramError::Parse(e) => e.span,
            ProgramError::Type { error, .. } => error.span,
        }
    }
}

impl fmt::Display for ProgramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProgramError::Parse(e) => write!(f, "{e}"),
            ProgramError::Type { def_name, error } => {
                write!(f, "in definition `{def_name}`: {error}")
            }
        }
    }
}

impl std::error::Error for ProgramError {}

impl From<ParseError> for ProgramError {
    fn from(e: ParseError) -> ProgramError {
        ProgramError::Parse(e)
    }
}

/// Checks a parsed program on top of a base environment. A declaration
/// whose name collides with a base entry shadows it; duplicates within the
/// program itself were already rejected by the parser.
pub fn check_program(
    program: &SourceProgram,
    base_env: &GlobalEnv,
    base_synonyms: &[(String, Type)],
    supply: &mut FreshSupply,
) -> Result<CheckedProgram, ProgramError> {
    let mut env = base_env.clone();
    let mut synonyms = base_synonyms.to_vec();
    for (name, ty) in &program.synonyms {
        match synonyms.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = ty.clone(),
            None => synonyms.push((name.clone(), ty.clone())),
        }
    }
    let mut reports = Vec::new();
    for decl in &program.decls {
        match decl {
            Decl::TypeSyn { .. } => {}
            Decl::Def {
                name,
                declared,
                body,
                span,
            } => {
                let (def, inference) = check_global_def(&env, name, declared, body, supply)
                    .map_err(|error| ProgramError::Type {
                        def_name: name.clone(),
                        error,
                    })?;
                env.insert_or_replace(name.clone(), def);
                reports.push(DefReport {
                    name: name.clone(),
                    declared: declared.clone(),
                    inference,
                    span: *span,
                });
            }
        }
    }
    Ok(CheckedProgram {
        env,
        synonyms,
        reports,
    })
}

/// Parses and checks source text in one step.
pub fn check_source(
    src: &str,
    base_env: &GlobalEnv,
    base_synonyms: &[(String, Type)],
    supply: &mut FreshSupply,
) -> Result<CheckedProgram, ProgramError> {
    let program = parse_program(src, base_synonyms)?;
    check_program(&program, base_env, base_synonyms, supply)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_a_small_program() {
        let src = "type Nat = mu n. 1 + n\n\
                   def Zero : Nat = fold [Nat] (inl tt)\n\
                   def Succ : Nat -o Nat = \\n. fold [Nat] (inr n)";
        let checked = check_source(src, &GlobalEnv::new(), &[], &mut FreshSupply::new()).unwrap();
        assert_eq!(checked.reports.len(), 2);
        assert!(checked.env.contains("Zero"));
        assert!(checked.env.contains("Succ"));
    }

    #[test]
    fn empty_source_is_fine() {
        let checked = check_source("", &GlobalEnv::new(), &[], &mut FreshSupply::new()).unwrap();
        assert!(checked.reports.is_empty());
    }

    #[test]
    fn redefining_a_base_global_shadows_it() {
        let base = check_source(
            "def It : 1 = tt",
            &GlobalEnv::new(),
            &[],
            &mut FreshSupply::new(),
        )
        .unwrap();
        let shadowed = check_source(
            "def It : 1 & 1 = tt (&) tt",
            &base.env,
            &base.synonyms,
            &mut FreshSupply::new(),
        )
        .unwrap();
        let def = shadowed.env.lookup("It").unwrap();
        assert_eq!(def.scheme, Type::with(Type::ONE, Type::ONE));
        // Re-declaring within one program is still an error.
        let err = check_source(
            "def It : 1 = tt def It : 1 = tt",
            &base.env,
            &base.synonyms,
            &mut FreshSupply::new(),
        )
        .unwrap_err();
        assert_eq!(err.class(), "DuplicateName");
    }
}
