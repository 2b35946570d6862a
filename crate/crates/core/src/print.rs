//! Pretty-printing of types and terms in the surface grammar.
//!
//! Types print so that `parse_type(print_type(t))` is alpha-equal to `t`
//! (for parseable variable names). Recursive types matching the stream
//! shape `mu x. T * x` with `x` not free in `T` fold back to `!T`; a
//! synonym table folds named types back to their names.

use crate::terms::{Term, TermKind};
use crate::types::{alpha_eq, free_type_vars, Type, TypeOp};

/// A list of `(name, definition)` pairs used to fold structural types back
/// to their declared names when printing.
pub type SynonymTable = [(String, Type)];

pub fn print_type(t: &Type) -> String {
    print_type_with(t, &[])
}

pub fn print_type_with(t: &Type, synonyms: &SynonymTable) -> String {
    render_type(t, synonyms, 0)
}

/// `mu x. T * x` with `x` not free in `T` is the stream encoding of `!T`.
fn as_bang(t: &Type) -> Option<&Type> {
    if let Type::Mu(binder, body) = t {
        if let Type::Op(TypeOp::Tensor, head, tail) = body.as_ref() {
            if matches!(tail.as_ref(), Type::Var(v) if v == binder)
                && !free_type_vars(head).contains(binder)
            {
                return Some(head);
            }
        }
    }
    None
}

// Precedence levels, loosest first: lolli 0 (right-assoc), plus 1,
// with 2, tensor 3 (all left-assoc), atoms 4. `mu` binds its whole body
// and parenthesizes anywhere but the loosest position.
fn render_type(t: &Type, synonyms: &SynonymTable, prec: u8) -> String {
    for (name, def) in synonyms {
        if alpha_eq(t, def) {
            return name.clone();
        }
    }
    if let Some(head) = as_bang(t) {
        return format!("!{}", render_type(head, synonyms, 4));
    }
    match t {
        Type::Const(c) => c.to_string(),
        Type::Var(x) => x.clone(),
        Type::Mu(binder, body) => {
            let s = format!("mu {binder}. {}", render_type(body, synonyms, 0));
            if prec > 0 {
                format!("({s})")
            } else {
                s
            }
        }
        Type::Op(op, a, b) => {
            let (level, left_prec, right_prec) = match op {
                TypeOp::Lolli => (0, 1, 0),
                TypeOp::Plus => (1, 1, 2),
                TypeOp::With => (2, 2, 3),
                TypeOp::Tensor => (3, 3, 4),
            };
            let s = format!(
                "{} {} {}",
                render_type(a, synonyms, left_prec),
                op.symbol(),
                render_type(b, synonyms, right_prec)
            );
            if prec > level {
                format!("({s})")
            } else {
                s
            }
        }
    }
}

pub fn print_term(t: &Term) -> String {
    print_term_with(t, &[])
}

pub fn print_term_with(t: &Term, synonyms: &SynonymTable) -> String {
    render_term(t, synonyms, 0)
}

// Term precedence: binder forms 0, pair constructors 1, keyword prefix
// forms 2, application 3, atoms 4.
fn render_term(t: &Term, syns: &SynonymTable, prec: u8) -> String {
    let wrap = |level: u8, s: String| {
        if prec > level {
            format!("({s})")
        } else {
            s
        }
    };
    match &t.kind {
        TermKind::Var(n) | TermKind::Global(n) => n.clone(),
        TermKind::Unit => "tt".to_string(),
        TermKind::BangGlobal(n) => format!("!{n}"),
        TermKind::Lam(w, body) => wrap(0, format!("\\{w}. {}", render_term(body, syns, 0))),
        TermKind::Fix(p, body) => wrap(0, format!("fix {p}. {}", render_term(body, syns, 0))),
        TermKind::LetTensor(w0, w1, bound, body) => wrap(
            0,
            format!(
                "let {w0} * {w1} = {} in {}",
                render_term(bound, syns, 0),
                render_term(body, syns, 0)
            ),
        ),
        TermKind::Case(scrutinee, w0, b0, w1, b1) => wrap(
            0,
            format!(
                "case {} of inl {w0} => {} | inr {w1} => {}",
                render_term(scrutinee, syns, 0),
                render_term(b0, syns, 0),
                render_term(b1, syns, 0)
            ),
        ),
        TermKind::TensorPair(a, b) => wrap(
            1,
            format!(
                "{} (*) {}",
                render_term(a, syns, 2),
                render_term(b, syns, 2)
            ),
        ),
        TermKind::WithPair(a, b) => wrap(
            1,
            format!(
                "{} (&) {}",
                render_term(a, syns, 2),
                render_term(b, syns, 2)
            ),
        ),
        TermKind::Fst(e) => wrap(2, format!("fst {}", render_term(e, syns, 2))),
        TermKind::Snd(e) => wrap(2, format!("snd {}", render_term(e, syns, 2))),
        TermKind::Inl(e) => wrap(2, format!("inl {}", render_term(e, syns, 2))),
        TermKind::Inr(e) => wrap(2, format!("inr {}", render_term(e, syns, 2))),
        TermKind::Absurd(e) => wrap(2, format!("absurd {}", render_term(e, syns, 2))),
        TermKind::Fold(ann, e) => wrap(
            2,
            format!(
                "fold [{}] {}",
                print_type_with(ann, syns),
                render_term(e, syns, 2)
            ),
        ),
        TermKind::Unfold(None, e) => wrap(2, format!("unfold {}", render_term(e, syns, 2))),
        TermKind::Unfold(Some(ann), e) => wrap(
            2,
            format!(
                "unfold [{}] {}",
                print_type_with(ann, syns),
                render_term(e, syns, 2)
            ),
        ),
        TermKind::App(f, a) => wrap(
            3,
            format!("{} {}", render_term(f, syns, 3), render_term(a, syns, 4)),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::bang_of;

    #[test]
    fn lolli_right_assoc() {
        let t = Type::lolli(
            Type::var("a"),
            Type::lolli(Type::var("b"), Type::var("c")),
        );
        assert_eq!(print_type(&t), "a -o b -o c");
        let t2 = Type::lolli(
            Type::lolli(Type::var("a"), Type::var("b")),
            Type::var("c"),
        );
        assert_eq!(print_type(&t2), "(a -o b) -o c");
    }

    #[test]
    fn operator_precedence() {
        // a + b * c needs no parens; (a + b) * c does
        let t = Type::plus(
            Type::var("a"),
            Type::tensor(Type::var("b"), Type::var("c")),
        );
        assert_eq!(print_type(&t), "a + b * c");
        let t2 = Type::tensor(
            Type::plus(Type::var("a"), Type::var("b")),
            Type::var("c"),
        );
        assert_eq!(print_type(&t2), "(a + b) * c");
    }

    #[test]
    fn bang_folds_back() {
        let t = bang_of(&Type::var("t"));
        assert_eq!(print_type(&t), "!t");
        let arrow = Type::lolli(t.clone(), Type::tensor(t.clone(), t));
        assert_eq!(print_type(&arrow), "!t -o !t * !t");
    }

    #[test]
    fn bang_does_not_fold_when_binder_used_in_head() {
        // mu a. (a * 1) * a: head mentions the binder, not a stream
        let t = Type::mu(
            "a",
            Type::tensor(
                Type::tensor(Type::var("a"), Type::ONE),
                Type::var("a"),
            ),
        );
        assert_eq!(print_type(&t), "mu a. a * 1 * a");
    }

    #[test]
    fn synonym_folding() {
        let nat = Type::mu("n", Type::plus(Type::ONE, Type::var("n")));
        let syns = vec![("Nat".to_string(), nat.clone())];
        let t = Type::lolli(nat.clone(), Type::lolli(nat.clone(), nat));
        assert_eq!(print_type_with(&t, &syns), "Nat -o Nat -o Nat");
    }

    #[test]
    fn mu_parenthesized_in_operand_position() {
        let nat = Type::mu("n", Type::plus(Type::ONE, Type::var("n")));
        let t = Type::lolli(nat.clone(), Type::ONE);
        assert_eq!(print_type(&t), "(mu n. 1 + n) -o 1");
        let t2 = Type::lolli(Type::ONE, nat);
        assert_eq!(print_type(&t2), "1 -o mu n. 1 + n");
    }

    #[test]
    fn term_rendering() {
        let t = Term::lam("w", Term::tensor_pair(Term::var("w"), Term::var("w")));
        assert_eq!(print_term(&t), "\\w. w (*) w");
        let app = Term::app(
            Term::app(Term::global("f"), Term::var("x")),
            Term::var("y"),
        );
        assert_eq!(print_term(&app), "f x y");
        let nested = Term::app(Term::global("f"), Term::inl(Term::var("x")));
        assert_eq!(print_term(&nested), "f (inl x)");
    }
}
