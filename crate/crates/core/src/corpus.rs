//! Embedded example programs and the manifest of what they must do.
//!
//! Fixtures live in `corpus/` as `.aff` files; the manifest pairs each with
//! its expected type, error class or evaluation result. The positive suite
//! must typecheck (and evaluate where stated), the negative suite must fail
//! with the stated class.

use crate::check::{check_source, CheckedProgram, ProgramError};
use crate::infer::FreshSupply;
use crate::terms::GlobalEnv;

pub const PRELUDE: &str = include_str!("../corpus/prelude.aff");
const MANIFEST: &str = include_str!("../corpus/manifest.txt");

const FIXTURES: &[(&str, &str)] = &[
    ("prelude.aff", PRELUDE),
    (
        "positive/additives.aff",
        include_str!("../corpus/positive/additives.aff"),
    ),
    (
        "positive/recursion.aff",
        include_str!("../corpus/positive/recursion.aff"),
    ),
    (
        "positive/streams.aff",
        include_str!("../corpus/positive/streams.aff"),
    ),
    (
        "negative/contraction_tensor.aff",
        include_str!("../corpus/negative/contraction_tensor.aff"),
    ),
    (
        "negative/contraction_app.aff",
        include_str!("../corpus/negative/contraction_app.aff"),
    ),
    (
        "negative/fix_ambient.aff",
        include_str!("../corpus/negative/fix_ambient.aff"),
    ),
    (
        "negative/unfold_bare.aff",
        include_str!("../corpus/negative/unfold_bare.aff"),
    ),
    (
        "negative/app_non_arrow.aff",
        include_str!("../corpus/negative/app_non_arrow.aff"),
    ),
    (
        "negative/wrong_const.aff",
        include_str!("../corpus/negative/wrong_const.aff"),
    ),
    (
        "negative/fix_occurs.aff",
        include_str!("../corpus/negative/fix_occurs.aff"),
    ),
    (
        "negative/overgeneral.aff",
        include_str!("../corpus/negative/overgeneral.aff"),
    ),
    (
        "negative/parse_error.aff",
        include_str!("../corpus/negative/parse_error.aff"),
    ),
    (
        "negative/dup_name.aff",
        include_str!("../corpus/negative/dup_name.aff"),
    ),
    (
        "negative/unknown_type.aff",
        include_str!("../corpus/negative/unknown_type.aff"),
    ),
    (
        "negative/branch_mismatch.aff",
        include_str!("../corpus/negative/branch_mismatch.aff"),
    ),
];

pub fn fixture(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn fixture_names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}

/// A definition that must typecheck at the given type (written in the
/// surface syntax, resolved against the prelude synonyms).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveCase {
    pub file: &'static str,
    pub def_name: String,
    pub expected_type: String,
}

/// A file whose check must fail with the given error class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeCase {
    pub file: &'static str,
    pub error_class: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalExpectation {
    /// The definition decodes to this Peano numeral.
    Nat(u64),
    /// The first `count` stream elements each decode to `each`.
    Take { count: usize, each: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalCase {
    pub file: &'static str,
    pub def_name: String,
    pub expectation: EvalExpectation,
}

fn intern_file(name: &str) -> &'static str {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(n, _)| *n)
        .unwrap_or_else(|| panic!("manifest references unknown fixture {name}"))
}

fn manifest_error(lineno: usize, line: &str, msg: &str) -> ! {
    panic!("manifest line {}: {msg}: {line}", lineno + 1)
}

fn parse_manifest() -> (Vec<PositiveCase>, Vec<NegativeCase>, Vec<EvalCase>) {
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    let mut eval = Vec::new();
    for (lineno, line) in MANIFEST.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut words = line.split_whitespace();
        let mut word = |what: &str| {
            words
                .next()
                .unwrap_or_else(|| manifest_error(lineno, line, what))
        };
        match word("missing directive") {
            "check" => {
                let file = intern_file(word("missing file"));
                let def_name = word("missing def").to_string();
                if word("missing ::") != "::" {
                    manifest_error(lineno, line, "expected ::");
                }
                let expected_type = words.collect::<Vec<_>>().join(" ");
                if expected_type.is_empty() {
                    manifest_error(lineno, line, "missing type");
                }
                positive.push(PositiveCase {
                    file,
                    def_name,
                    expected_type,
                });
            }
            "error" => {
                let file = intern_file(word("missing file"));
                let error_class = word("missing class").to_string();
                negative.push(NegativeCase { file, error_class });
            }
            "eval-nat" => {
                let file = intern_file(word("missing file"));
                let def_name = word("missing def").to_string();
                let n: u64 = word("missing numeral")
                    .parse()
                    .unwrap_or_else(|_| manifest_error(lineno, line, "bad numeral"));
                eval.push(EvalCase {
                    file,
                    def_name,
                    expectation: EvalExpectation::Nat(n),
                });
            }
            "eval-take" => {
                let file = intern_file(word("missing file"));
                let def_name = word("missing def").to_string();
                let count: usize = word("missing count")
                    .parse()
                    .unwrap_or_else(|_| manifest_error(lineno, line, "bad count"));
                let each: u64 = word("missing element value")
                    .parse()
                    .unwrap_or_else(|_| manifest_error(lineno, line, "bad element value"));
                eval.push(EvalCase {
                    file,
                    def_name,
                    expectation: EvalExpectation::Take { count, each },
                });
            }
            _ => manifest_error(lineno, line, "unknown directive"),
        }
    }
    (positive, negative, eval)
}

pub fn positive_suite() -> Vec<PositiveCase> {
    parse_manifest().0
}

pub fn negative_suite() -> Vec<NegativeCase> {
    parse_manifest().1
}

pub fn eval_suite() -> Vec<EvalCase> {
    parse_manifest().2
}

/// Parses and checks the prelude from scratch.
pub fn load_prelude(supply: &mut FreshSupply) -> Result<CheckedProgram, ProgramError> {
    check_source(PRELUDE, &GlobalEnv::new(), &[], supply)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_parses_and_covers_fixtures() {
        let (positive, negative, eval) = parse_manifest();
        assert!(positive.len() >= 12);
        assert!(negative.len() >= 9);
        assert!(!eval.is_empty());
    }

    #[test]
    fn prelude_loads() {
        let checked = load_prelude(&mut FreshSupply::new()).unwrap();
        assert!(checked.env.contains("Plus"));
        assert!(checked.env.contains("Dup!"));
        assert!(checked.reports.len() >= 5);
    }

    #[test]
    fn every_fixture_is_mentioned_by_the_manifest() {
        let (positive, negative, _) = parse_manifest();
        for name in fixture_names() {
            let mentioned = positive.iter().any(|c| c.file == name)
                || negative.iter().any(|c| c.file == name);
            assert!(mentioned, "fixture {name} not covered by the manifest");
        }
    }
}
