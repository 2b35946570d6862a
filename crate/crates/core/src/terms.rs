//! Term syntax, linear contexts and the global definition environment.

use crate::types::Type;
use std::fmt;

/// Byte range into the source text a node came from. Hand-built terms use
/// the zero span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }

    pub fn is_dummy(self) -> bool {
        self.start == 0 && self.end == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub kind: TermKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermKind {
    /// A linear hypothesis bound by an enclosing binder.
    Var(String),
    /// A reference to a globally defined term.
    Global(String),
    Lam(String, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// `e0 (*) e1`
    TensorPair(Box<Term>, Box<Term>),
    /// `let w0 * w1 = e0 in e1`
    LetTensor(String, String, Box<Term>, Box<Term>),
    /// `e0 (&) e1`
    WithPair(Box<Term>, Box<Term>),
    Fst(Box<Term>),
    Snd(Box<Term>),
    /// `tt`
    Unit,
    Inl(Box<Term>),
    Inr(Box<Term>),
    /// `case e of inl w0 => e0 | inr w1 => e1`
    Case(Box<Term>, String, Box<Term>, String, Box<Term>),
    Absurd(Box<Term>),
    /// `fold [T] e`; the annotation is always `Mu`-rooted.
    Fold(Type, Box<Term>),
    /// `unfold e` or `unfold [T] e`; a present annotation is `Mu`-rooted.
    Unfold(Option<Type>, Box<Term>),
    /// `fix p. e`
    Fix(String, Box<Term>),
    /// `!E` for a global `E`.
    BangGlobal(String),
}

impl Term {
    pub fn new(kind: TermKind, span: Span) -> Term {
        Term { kind, span }
    }

    pub fn unspanned(kind: TermKind) -> Term {
        Term {
            kind,
            span: Span::default(),
        }
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::unspanned(TermKind::Var(name.into()))
    }

    pub fn global(name: impl Into<String>) -> Term {
        Term::unspanned(TermKind::Global(name.into()))
    }

    pub fn lam(binder: impl Into<String>, body: Term) -> Term {
        Term::unspanned(TermKind::Lam(binder.into(), Box::new(body)))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::unspanned(TermKind::App(Box::new(fun), Box::new(arg)))
    }

    pub fn tensor_pair(a: Term, b: Term) -> Term {
        Term::unspanned(TermKind::TensorPair(Box::new(a), Box::new(b)))
    }

    pub fn let_tensor(
        w0: impl Into<String>,
        w1: impl Into<String>,
        bound: Term,
        body: Term,
    ) -> Term {
        Term::unspanned(TermKind::LetTensor(
            w0.into(),
            w1.into(),
            Box::new(bound),
            Box::new(body),
        ))
    }

    pub fn with_pair(a: Term, b: Term) -> Term {
        Term::unspanned(TermKind::WithPair(Box::new(a), Box::new(b)))
    }

    pub fn fst(e: Term) -> Term {
        Term::unspanned(TermKind::Fst(Box::new(e)))
    }

    pub fn snd(e: Term) -> Term {
        Term::unspanned(TermKind::Snd(Box::new(e)))
    }

    pub fn unit() -> Term {
        Term::unspanned(TermKind::Unit)
    }

    pub fn inl(e: Term) -> Term {
        Term::unspanned(TermKind::Inl(Box::new(e)))
    }

    pub fn inr(e: Term) -> Term {
        Term::unspanned(TermKind::Inr(Box::new(e)))
    }

    pub fn case(
        scrutinee: Term,
        w0: impl Into<String>,
        branch0: Term,
        w1: impl Into<String>,
        branch1: Term,
    ) -> Term {
        Term::unspanned(TermKind::Case(
            Box::new(scrutinee),
            w0.into(),
            Box::new(branch0),
            w1.into(),
            Box::new(branch1),
        ))
    }

    pub fn absurd(e: Term) -> Term {
        Term::unspanned(TermKind::Absurd(Box::new(e)))
    }

    pub fn fold(annotation: Type, e: Term) -> Term {
        Term::unspanned(TermKind::Fold(annotation, Box::new(e)))
    }

    pub fn unfold(e: Term) -> Term {
        Term::unspanned(TermKind::Unfold(None, Box::new(e)))
    }

    pub fn unfold_at(annotation: Type, e: Term) -> Term {
        Term::unspanned(TermKind::Unfold(Some(annotation), Box::new(e)))
    }

    pub fn fix(binder: impl Into<String>, body: Term) -> Term {
        Term::unspanned(TermKind::Fix(binder.into(), Box::new(body)))
    }

    pub fn bang(name: impl Into<String>) -> Term {
        Term::unspanned(TermKind::BangGlobal(name.into()))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::print::print_term(self))
    }
}

/// Structural equality that ignores source spans and compares type
/// annotations up to alpha. Binder names still compare exactly.
pub fn term_eq(a: &Term, b: &Term) -> bool {
    use TermKind::*;
    match (&a.kind, &b.kind) {
        (Var(x), Var(y)) | (Global(x), Global(y)) | (BangGlobal(x), BangGlobal(y)) => x == y,
        (Unit, Unit) => true,
        (Lam(w1, b1), Lam(w2, b2)) | (Fix(w1, b1), Fix(w2, b2)) => w1 == w2 && term_eq(b1, b2),
        (App(f1, a1), App(f2, a2))
        | (TensorPair(f1, a1), TensorPair(f2, a2))
        | (WithPair(f1, a1), WithPair(f2, a2)) => term_eq(f1, f2) && term_eq(a1, a2),
        (LetTensor(x1, y1, e1, b1), LetTensor(x2, y2, e2, b2)) => {
            x1 == x2 && y1 == y2 && term_eq(e1, e2) && term_eq(b1, b2)
        }
        (Fst(e1), Fst(e2))
        | (Snd(e1), Snd(e2))
        | (Inl(e1), Inl(e2))
        | (Inr(e1), Inr(e2))
        | (Absurd(e1), Absurd(e2)) => term_eq(e1, e2),
        (Case(s1, x1, l1, y1, r1), Case(s2, x2, l2, y2, r2)) => {
            x1 == x2 && y1 == y2 && term_eq(s1, s2) && term_eq(l1, l2) && term_eq(r1, r2)
        }
        (Fold(t1, e1), Fold(t2, e2)) => crate::types::alpha_eq(t1, t2) && term_eq(e1, e2),
        (Unfold(a1, e1), Unfold(a2, e2)) => {
            let anns = match (a1, a2) {
                (None, None) => true,
                (Some(t1), Some(t2)) => crate::types::alpha_eq(t1, t2),
                _ => false,
            };
            anns && term_eq(e1, e2)
        }
        _ => false,
    }
}

/// An ordered sequence of linear hypotheses. Names are unique; the order of
/// the input context is preserved in every leftover the engine returns.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Context(Vec<(String, Type)>);

impl Context {
    pub fn empty() -> Context {
        Context(Vec::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, Type)>) -> Context {
        Context(pairs.into_iter().collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.iter().any(|(n, _)| n == name)
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    /// Appends a hypothesis; fails if the name is already present.
    pub fn extend(&self, name: impl Into<String>, ty: Type) -> Result<Context, String> {
        let name = name.into();
        if self.contains(&name) {
            return Err(name);
        }
        let mut out = self.0.clone();
        out.push((name, ty));
        Ok(Context(out))
    }

    /// Removes the hypothesis named `name`, returning its type and the
    /// shrunk context.
    pub fn take(&self, name: &str) -> Option<(Context, Type)> {
        let idx = self.0.iter().position(|(n, _)| n == name)?;
        let mut out = self.0.clone();
        let (_, ty) = out.remove(idx);
        Some((Context(out), ty))
    }

    /// Drops `name` if present; identity otherwise.
    pub fn without(&self, name: &str) -> Context {
        Context(
            self.0
                .iter()
                .filter(|(n, _)| n != name)
                .cloned()
                .collect(),
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, Type)> {
        self.0.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(n, _)| n.as_str())
    }

    pub fn map_types(&self, mut f: impl FnMut(&Type) -> Type) -> Context {
        Context(self.0.iter().map(|(n, t)| (n.clone(), f(t))).collect())
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, ".");
        }
        let rendered: Vec<String> = self
            .0
            .iter()
            .map(|(n, t)| format!("{n} : {t}"))
            .collect();
        write!(f, "{}", rendered.join(", "))
    }
}

/// A globally defined term: a type scheme (free type variables implicitly
/// universally quantified) together with its body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalDef {
    pub scheme: Type,
    pub body: Term,
}

/// Named global definitions in declaration order.
#[derive(Debug, Clone, Default)]
pub struct GlobalEnv {
    entries: Vec<(String, GlobalDef)>,
}

impl GlobalEnv {
    pub fn new() -> GlobalEnv {
        GlobalEnv::default()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| n == name)
    }

    pub fn lookup(&self, name: &str) -> Option<&GlobalDef> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    pub fn insert(&mut self, name: impl Into<String>, def: GlobalDef) -> Result<(), String> {
        let name = name.into();
        if self.contains(&name) {
            return Err(name);
        }
        self.entries.push((name, def));
        Ok(())
    }

    /// Inserts, replacing any existing entry of the same name in place.
    pub fn insert_or_replace(&mut self, name: impl Into<String>, def: GlobalDef) {
        let name = name.into();
        match self.entries.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = def,
            None => self.entries.push((name, def)),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &GlobalDef)> {
        self.entries.iter().map(|(n, d)| (n, d))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
