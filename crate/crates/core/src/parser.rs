//! Concrete syntax: lexer and recursive-descent parser for types, terms
//! and programs.
//!
//! Shadowing never reaches the inference engine: a binder that shadows an
//! in-scope term variable is renamed here to an internal name containing
//! `%`, which the lexer cannot produce, so contexts stay name-unique by
//! construction. Type synonyms are transparent macros expanded eagerly at
//! parse time; `!T` in type position expands through the stream encoding.

use crate::terms::{Span, Term, TermKind};
use crate::types::{bang_of, Type, TypeConst};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    DuplicateName,
    UnknownName,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub span: Span,
}

impl ParseError {
    fn syntax(message: impl Into<String>, span: Span) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax,
            message: message.into(),
            span,
        }
    }

    pub fn class(&self) -> &'static str {
        match self.kind {
            ParseErrorKind::Syntax => "ParseError",
            ParseErrorKind::DuplicateName => "DuplicateName",
            ParseErrorKind::UnknownName => "UnknownName",
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    KwMu,
    KwLet,
    KwIn,
    KwCase,
    KwOf,
    KwInl,
    KwInr,
    KwFst,
    KwSnd,
    KwAbsurd,
    KwFold,
    KwUnfold,
    KwFix,
    KwTt,
    KwType,
    KwDef,
    One,
    Zero,
    LParen,
    RParen,
    LBracket,
    RBracket,
    TensorPair, // (*)
    WithPair,   // (&)
    Lambda,     // \
    Dot,
    Pipe,
    FatArrow, // =>
    Equals,
    Colon,
    Bang,
    Star,
    PlusSign,
    Amp,
    Lolli, // -o
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::KwMu => "`mu`".into(),
            Tok::KwLet => "`let`".into(),
            Tok::KwIn => "`in`".into(),
            Tok::KwCase => "`case`".into(),
            Tok::KwOf => "`of`".into(),
            Tok::KwInl => "`inl`".into(),
            Tok::KwInr => "`inr`".into(),
            Tok::KwFst => "`fst`".into(),
            Tok::KwSnd => "`snd`".into(),
            Tok::KwAbsurd => "`absurd`".into(),
            Tok::KwFold => "`fold`".into(),
            Tok::KwUnfold => "`unfold`".into(),
            Tok::KwFix => "`fix`".into(),
            Tok::KwTt => "`tt`".into(),
            Tok::KwType => "`type`".into(),
            Tok::KwDef => "`def`".into(),
            Tok::One => "`1`".into(),
            Tok::Zero => "`0`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::TensorPair => "`(*)`".into(),
            Tok::WithPair => "`(&)`".into(),
            Tok::Lambda => "`\\`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Star => "`*`".into(),
            Tok::PlusSign => "`+`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Lolli => "`-o`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "mu" => Tok::KwMu,
        "let" => Tok::KwLet,
        "in" => Tok::KwIn,
        "case" => Tok::KwCase,
        "of" => Tok::KwOf,
        "inl" => Tok::KwInl,
        "inr" => Tok::KwInr,
        "fst" => Tok::KwFst,
        "snd" => Tok::KwSnd,
        "absurd" => Tok::KwAbsurd,
        "fold" => Tok::KwFold,
        "unfold" => Tok::KwUnfold,
        "fix" => Tok::KwFix,
        "tt" => Tok::KwTt,
        "type" => Tok::KwType,
        "def" => Tok::KwDef,
        _ => return None,
    })
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        match c {
            '-' => {
                if bytes.get(i + 1) == Some(&b'-') {
                    while i < bytes.len() && bytes[i] != b'\n' {
                        i += 1;
                    }
                } else if bytes.get(i + 1) == Some(&b'o') {
                    i += 2;
                    out.push(Token {
                        tok: Tok::Lolli,
                        span: Span::new(start, i),
                    });
                } else {
                    return Err(ParseError::syntax(
                        "expected `-o` or a `--` comment after `-`",
                        Span::new(start, start + 1),
                    ));
                }
            }
            '(' => {
                if bytes.get(i + 1) == Some(&b'*') && bytes.get(i + 2) == Some(&b')') {
                    i += 3;
                    out.push(Token {
                        tok: Tok::TensorPair,
                        span: Span::new(start, i),
                    });
                } else if bytes.get(i + 1) == Some(&b'&') && bytes.get(i + 2) == Some(&b')') {
                    i += 3;
                    out.push(Token {
                        tok: Tok::WithPair,
                        span: Span::new(start, i),
                    });
                } else {
                    i += 1;
                    out.push(Token {
                        tok: Tok::LParen,
                        span: Span::new(start, i),
                    });
                }
            }
            '=' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 2;
                    out.push(Token {
                        tok: Tok::FatArrow,
                        span: Span::new(start, i),
                    });
                } else {
                    i += 1;
                    out.push(Token {
                        tok: Tok::Equals,
                        span: Span::new(start, i),
                    });
                }
            }
            ')' | '[' | ']' | '\\' | '.' | '|' | ':' | '!' | '*' | '+' | '&' => {
                i += 1;
                let tok = match c {
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '\\' => Tok::Lambda,
                    '.' => Tok::Dot,
                    '|' => Tok::Pipe,
                    ':' => Tok::Colon,
                    '!' => Tok::Bang,
                    '*' => Tok::Star,
                    '+' => Tok::PlusSign,
                    '&' => Tok::Amp,
                    _ => unreachable!(),
                };
                out.push(Token {
                    tok,
                    span: Span::new(start, i),
                });
            }
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                let tok = match text {
                    "1" => Tok::One,
                    "0" => Tok::Zero,
                    _ => {
                        return Err(ParseError::syntax(
                            format!("unexpected number `{text}`: only the types 1 and 0 exist"),
                            Span::new(start, i),
                        ))
                    }
                };
                out.push(Token {
                    tok,
                    span: Span::new(start, i),
                });
            }
            c if c.is_ascii_alphabetic() => {
                i += 1;
                while i < bytes.len() {
                    let b = bytes[i] as char;
                    if b.is_ascii_alphanumeric() || b == '\'' || b == '_' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                // Names may end in bangs, like Dup!.
                while i < bytes.len() && bytes[i] == b'!' {
                    i += 1;
                }
                let word = &src[start..i];
                let tok = keyword(word).unwrap_or_else(|| Tok::Ident(word.to_string()));
                out.push(Token {
                    tok,
                    span: Span::new(start, i),
                });
            }
            other => {
                return Err(ParseError::syntax(
                    format!("unexpected character `{other}`"),
                    Span::new(start, start + 1),
                ));
            }
        }
    }
    Ok(out)
}

/// A parsed top-level declaration.
#[derive(Debug, Clone, PartialEq)]
pub enum Decl {
    TypeSyn {
        name: String,
        ty: Type,
        span: Span,
    },
    Def {
        name: String,
        declared: Type,
        body: Term,
        span: Span,
    },
}

/// A parsed source file: declarations in order, plus the synonyms it
/// declared (for folding types back to their names when printing).
#[derive(Debug, Clone, Default)]
pub struct SourceProgram {
    pub decls: Vec<Decl>,
    pub synonyms: Vec<(String, Type)>,
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    /// (surface name, internal name) scope stack for term variables.
    scopes: Vec<(String, String)>,
    rename_counter: u32,
    synonyms: Vec<(String, Type)>,
    /// Type variables currently bound by `mu`, innermost last.
    mu_binders: Vec<String>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, base_synonyms: &[(String, Type)]) -> Result<Parser<'a>, ParseError> {
        Ok(Parser {
            src,
            tokens: lex(src)?,
            pos: 0,
            scopes: Vec::new(),
            rename_counter: 0,
            synonyms: base_synonyms.to_vec(),
            mu_binders: Vec::new(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_span(&self) -> Span {
        self.tokens
            .get(self.pos)
            .map(|t| t.span)
            .unwrap_or_else(|| Span::new(self.src.len().saturating_sub(1), self.src.len()))
    }

    fn last_span(&self) -> Span {
        if self.pos == 0 {
            Span::new(0, 0)
        } else {
            self.tokens[self.pos - 1].span
        }
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) if t.tok == tok => {
                let span = t.span;
                self.pos += 1;
                Ok(span)
            }
            Some(t) => Err(ParseError::syntax(
                format!("expected {} but found {}", tok.describe(), t.tok.describe()),
                t.span,
            )),
            None => Err(ParseError::syntax(
                format!("expected {} but reached end of input", tok.describe()),
                self.peek_span(),
            )),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                if let Tok::Ident(name) = &t.tok {
                    let out = (name.clone(), t.span);
                    self.pos += 1;
                    Ok(out)
                } else {
                    Err(ParseError::syntax(
                        format!("expected {what} but found {}", t.tok.describe()),
                        t.span,
                    ))
                }
            }
            None => Err(ParseError::syntax(
                format!("expected {what} but reached end of input"),
                self.peek_span(),
            )),
        }
    }

    // ---- types -----------------------------------------------------------

    fn parse_type(&mut self) -> Result<Type, ParseError> {
        let left = self.parse_type_plus()?;
        if self.peek() == Some(&Tok::Lolli) {
            self.advance();
            let right = self.parse_type()?;
            Ok(Type::lolli(left, right))
        } else {
            Ok(left)
        }
    }

    fn parse_type_plus(&mut self) -> Result<Type, ParseError> {
        let mut left = self.parse_type_with()?;
        while self.peek() == Some(&Tok::PlusSign) {
            self.advance();
            let right = self.parse_type_with()?;
            left = Type::plus(left, right);
        }
        Ok(left)
    }

    fn parse_type_with(&mut self) -> Result<Type, ParseError> {
        let mut left = self.parse_type_tensor()?;
        while self.peek() == Some(&Tok::Amp) {
            self.advance();
            let right = self.parse_type_tensor()?;
            left = Type::with(left, right);
        }
        Ok(left)
    }

    fn parse_type_tensor(&mut self) -> Result<Type, ParseError> {
        let mut left = self.parse_type_atom()?;
        while self.peek() == Some(&Tok::Star) {
            self.advance();
            let right = self.parse_type_atom()?;
            left = Type::tensor(left, right);
        }
        Ok(left)
    }

    fn parse_type_atom(&mut self) -> Result<Type, ParseError> {
        let span = self.peek_span();
        match self.advance().map(|t| t.tok) {
            Some(Tok::One) => Ok(Type::Const(TypeConst::One)),
            Some(Tok::Zero) => Ok(Type::Const(TypeConst::Zero)),
            Some(Tok::Bang) => {
                let inner = self.parse_type_atom()?;
                Ok(bang_of(&inner))
            }
            Some(Tok::KwMu) => {
                let (binder, bspan) = self.expect_ident("a type variable")?;
                if !binder.chars().next().is_some_and(|c| c.is_lowercase()) {
                    return Err(ParseError::syntax(
                        format!("mu binder `{binder}` must start lowercase"),
                        bspan,
                    ));
                }
                self.expect(Tok::Dot)?;
                self.mu_binders.push(binder.clone());
                let body = self.parse_type();
                self.mu_binders.pop();
                Ok(Type::mu(binder, body?))
            }
            Some(Tok::LParen) => {
                let inner = self.parse_type()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                if name.chars().next().is_some_and(|c| c.is_uppercase()) {
                    match self.synonyms.iter().find(|(n, _)| *n == name) {
                        Some((_, ty)) => Ok(ty.clone()),
                        None => Err(ParseError {
                            kind: ParseErrorKind::UnknownName,
                            message: format!("unknown type name `{name}`"),
                            span,
                        }),
                    }
                } else {
                    Ok(Type::Var(name))
                }
            }
            Some(other) => Err(ParseError::syntax(
                format!("expected a type but found {}", other.describe()),
                span,
            )),
            None => Err(ParseError::syntax(
                "expected a type but reached end of input",
                span,
            )),
        }
    }

    /// Annotations on fold/unfold must be recursive types.
    fn parse_mu_annotation(&mut self, construct: &str) -> Result<Type, ParseError> {
        let start = self.expect(Tok::LBracket)?;
        let ty = self.parse_type()?;
        let end = self.expect(Tok::RBracket)?;
        if !ty.is_mu() {
            return Err(ParseError::syntax(
                format!("{construct} annotation must be a mu type, found `{ty}`"),
                start.join(end),
            ));
        }
        Ok(ty)
    }

    // ---- terms -----------------------------------------------------------

    /// Introduces a binder, renaming it if it shadows an in-scope variable.
    fn bind(&mut self, surface: &str) -> String {
        let internal = if self.scopes.iter().any(|(s, _)| s == surface) {
            let n = self.rename_counter;
            self.rename_counter += 1;
            format!("{surface}%{n}")
        } else {
            surface.to_string()
        };
        self.scopes.push((surface.to_string(), internal.clone()));
        internal
    }

    fn unbind(&mut self) {
        self.scopes.pop();
    }

    fn resolve(&self, name: &str) -> TermKind {
        match self.scopes.iter().rfind(|(s, _)| s == name) {
            Some((_, internal)) => TermKind::Var(internal.clone()),
            None => TermKind::Global(name.to_string()),
        }
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        let start = self.peek_span();
        match self.peek() {
            Some(Tok::Lambda) => {
                self.advance();
                let (binder, _) = self.expect_ident("a binder")?;
                self.expect(Tok::Dot)?;
                let internal = self.bind(&binder);
                let body = self.parse_term();
                self.unbind();
                let body = body?;
                let span = start.join(self.last_span());
                Ok(Term::new(TermKind::Lam(internal, Box::new(body)), span))
            }
            Some(Tok::KwFix) => {
                self.advance();
                let (binder, _) = self.expect_ident("a binder")?;
                self.expect(Tok::Dot)?;
                let internal = self.bind(&binder);
                let body = self.parse_term();
                self.unbind();
                let body = body?;
                let span = start.join(self.last_span());
                Ok(Term::new(TermKind::Fix(internal, Box::new(body)), span))
            }
            Some(Tok::KwLet) => {
                self.advance();
                let (w0, _) = self.expect_ident("a binder")?;
                self.expect(Tok::Star)?;
                let (w1, _) = self.expect_ident("a binder")?;
                self.expect(Tok::Equals)?;
                let bound = self.parse_term()?;
                self.expect(Tok::KwIn)?;
                let i0 = self.bind(&w0);
                let i1 = self.bind(&w1);
                let body = self.parse_term();
                self.unbind();
                self.unbind();
                let body = body?;
                let span = start.join(self.last_span());
                Ok(Term::new(
                    TermKind::LetTensor(i0, i1, Box::new(bound), Box::new(body)),
                    span,
                ))
            }
            Some(Tok::KwCase) => {
                self.advance();
                let scrutinee = self.parse_term()?;
                self.expect(Tok::KwOf)?;
                self.expect(Tok::KwInl)?;
                let (w0, _) = self.expect_ident("a binder")?;
                self.expect(Tok::FatArrow)?;
                let i0 = self.bind(&w0);
                let b0 = self.parse_term();
                self.unbind();
                let b0 = b0?;
                self.expect(Tok::Pipe)?;
                self.expect(Tok::KwInr)?;
                let (w1, _) = self.expect_ident("a binder")?;
                self.expect(Tok::FatArrow)?;
                let i1 = self.bind(&w1);
                let b1 = self.parse_term();
                self.unbind();
                let b1 = b1?;
                let span = start.join(self.last_span());
                Ok(Term::new(
                    TermKind::Case(Box::new(scrutinee), i0, Box::new(b0), i1, Box::new(b1)),
                    span,
                ))
            }
            _ => self.parse_pair(),
        }
    }

    fn parse_pair(&mut self) -> Result<Term, ParseError> {
        let start = self.peek_span();
        let left = self.parse_prefix()?;
        match self.peek() {
            Some(Tok::TensorPair) => {
                self.advance();
                let right = self.parse_prefix()?;
                let span = start.join(self.last_span());
                Ok(Term::new(
                    TermKind::TensorPair(Box::new(left), Box::new(right)),
                    span,
                ))
            }
            Some(Tok::WithPair) => {
                self.advance();
                let right = self.parse_prefix()?;
                let span = start.join(self.last_span());
                Ok(Term::new(
                    TermKind::WithPair(Box::new(left), Box::new(right)),
                    span,
                ))
            }
            _ => Ok(left),
        }
    }

    fn parse_prefix(&mut self) -> Result<Term, ParseError> {
        let start = self.peek_span();
        let kind = match self.peek() {
            Some(Tok::KwFst) => {
                self.advance();
                TermKind::Fst(Box::new(self.parse_prefix()?))
            }
            Some(Tok::KwSnd) => {
                self.advance();
                TermKind::Snd(Box::new(self.parse_prefix()?))
            }
            Some(Tok::KwInl) => {
                self.advance();
                TermKind::Inl(Box::new(self.parse_prefix()?))
            }
            Some(Tok::KwInr) => {
                self.advance();
                TermKind::Inr(Box::new(self.parse_prefix()?))
            }
            Some(Tok::KwAbsurd) => {
                self.advance();
                TermKind::Absurd(Box::new(self.parse_prefix()?))
            }
            Some(Tok::KwFold) => {
                self.advance();
                let annotation = self.parse_mu_annotation("fold")?;
                TermKind::Fold(annotation, Box::new(self.parse_prefix()?))
            }
            Some(Tok::KwUnfold) => {
                self.advance();
                let annotation = if self.peek() == Some(&Tok::LBracket) {
                    Some(self.parse_mu_annotation("unfold")?)
                } else {
                    None
                };
                TermKind::Unfold(annotation, Box::new(self.parse_prefix()?))
            }
            _ => return self.parse_app(),
        };
        Ok(Term::new(kind, start.join(self.last_span())))
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::KwTt) | Some(Tok::Ident(_)) | Some(Tok::Bang) | Some(Tok::LParen)
        )
    }

    fn parse_app(&mut self) -> Result<Term, ParseError> {
        let start = self.peek_span();
        let mut out = self.parse_atom()?;
        while self.starts_atom() {
            let arg = self.parse_atom()?;
            let span = start.join(self.last_span());
            out = Term::new(TermKind::App(Box::new(out), Box::new(arg)), span);
        }
        Ok(out)
    }

    fn parse_atom(&mut self) -> Result<Term, ParseError> {
        let span = self.peek_span();
        match self.advance().map(|t| t.tok) {
            Some(Tok::KwTt) => Ok(Term::new(TermKind::Unit, span)),
            Some(Tok::Ident(name)) => Ok(Term::new(self.resolve(&name), span)),
            Some(Tok::Bang) => {
                let (name, nspan) = self.expect_ident("a global name after `!`")?;
                Ok(Term::new(TermKind::BangGlobal(name), span.join(nspan)))
            }
            Some(Tok::LParen) => {
                let inner = self.parse_term()?;
                self.expect(Tok::RParen)?;
                let full = span.join(self.last_span());
                Ok(Term::new(inner.kind, full))
            }
            Some(other) => Err(ParseError::syntax(
                format!("expected a term but found {}", other.describe()),
                span,
            )),
            None => Err(ParseError::syntax(
                "expected a term but reached end of input",
                span,
            )),
        }
    }

    // ---- programs --------------------------------------------------------

    fn parse_program(&mut self) -> Result<SourceProgram, ParseError> {
        let mut program = SourceProgram::default();
        let mut def_names: Vec<String> = Vec::new();
        let mut type_names: Vec<String> = Vec::new();
        while let Some(tok) = self.peek() {
            match tok {
                Tok::KwType => {
                    let start = self.peek_span();
                    self.advance();
                    let (name, nspan) = self.expect_ident("a type name")?;
                    if !name.chars().next().is_some_and(|c| c.is_uppercase()) {
                        return Err(ParseError::syntax(
                            format!("type name `{name}` must start uppercase"),
                            nspan,
                        ));
                    }
                    // Duplicates within one program are errors; a name from
                    // the base environment is shadowed instead.
                    if type_names.contains(&name) {
                        return Err(ParseError {
                            kind: ParseErrorKind::DuplicateName,
                            message: format!("duplicate type name `{name}`"),
                            span: nspan,
                        });
                    }
                    self.expect(Tok::Equals)?;
                    let ty = self.parse_type()?;
                    let span = start.join(self.last_span());
                    type_names.push(name.clone());
                    match self.synonyms.iter_mut().find(|(n, _)| *n == name) {
                        Some(slot) => slot.1 = ty.clone(),
                        None => self.synonyms.push((name.clone(), ty.clone())),
                    }
                    program.synonyms.push((name.clone(), ty.clone()));
                    program.decls.push(Decl::TypeSyn { name, ty, span });
                }
                Tok::KwDef => {
                    let start = self.peek_span();
                    self.advance();
                    let (name, nspan) = self.expect_ident("a definition name")?;
                    if def_names.contains(&name) {
                        return Err(ParseError {
                            kind: ParseErrorKind::DuplicateName,
                            message: format!("duplicate definition name `{name}`"),
                            span: nspan,
                        });
                    }
                    self.expect(Tok::Colon)?;
                    let declared = self.parse_type()?;
                    self.expect(Tok::Equals)?;
                    let body = self.parse_term()?;
                    let span = start.join(self.last_span());
                    def_names.push(name.clone());
                    program.decls.push(Decl::Def {
                        name,
                        declared,
                        body,
                        span,
                    });
                }
                other => {
                    return Err(ParseError::syntax(
                        format!("expected `type` or `def` but found {}", other.describe()),
                        self.peek_span(),
                    ));
                }
            }
        }
        Ok(program)
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.tokens.get(self.pos) {
            None => Ok(()),
            Some(t) => Err(ParseError::syntax(
                format!("unexpected {} after the end of the expression", t.tok.describe()),
                t.span,
            )),
        }
    }
}

/// Parses a complete type expression. `synonyms` resolves capitalized
/// names.
pub fn parse_type(src: &str, synonyms: &[(String, Type)]) -> Result<Type, ParseError> {
    let mut p = Parser::new(src, synonyms)?;
    let ty = p.parse_type()?;
    p.expect_end()?;
    Ok(ty)
}

/// Parses a complete term.
pub fn parse_term(src: &str, synonyms: &[(String, Type)]) -> Result<Term, ParseError> {
    let mut p = Parser::new(src, synonyms)?;
    let term = p.parse_term()?;
    p.expect_end()?;
    Ok(term)
}

/// Parses a whole program: `type` and `def` declarations in order.
pub fn parse_program(src: &str, base_synonyms: &[(String, Type)]) -> Result<SourceProgram, ParseError> {
    let mut p = Parser::new(src, base_synonyms)?;
    p.parse_program()
}
