//! Call-by-need evaluation to weak head normal form.
//!
//! Thunks are forced at most once and memoize their value. `fix p. e`
//! binds `p` to a self-referential thunk of the body, so recursive streams
//! terminate when only a finite prefix is demanded.
//!
//! `fold` wraps its payload in a `Fold` value and `unfold` unwraps it.
//! Unfolding a non-fold value yields the value paired with itself: a value
//! of `!`-type produced by `fix` stands for an inexhaustible supply of
//! itself, and this is what lets recursive functions like the prelude's
//! `Plus` take their next copy out of the fix binder.

use crate::terms::{GlobalEnv, Span, Term, TermKind};
use std::cell::RefCell;
use std::fmt;
use std::rc::Rc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    Stuck { message: String, span: Span },
    FuelExhausted,
    UnboundVariable { name: String, span: Span },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Stuck { message, .. } => write!(f, "stuck: {message}"),
            EvalError::FuelExhausted => write!(f, "fuel exhausted"),
            EvalError::UnboundVariable { name, .. } => {
                write!(f, "unbound variable `{name}` during evaluation")
            }
        }
    }
}

impl std::error::Error for EvalError {}

#[derive(Clone)]
pub enum Value<'a> {
    Unit,
    Tensor(Thunk<'a>, Thunk<'a>),
    /// Both components stay unevaluated until one is projected.
    With(Thunk<'a>, Thunk<'a>),
    Inl(Thunk<'a>),
    Inr(Thunk<'a>),
    Closure {
        binder: &'a str,
        body: &'a Term,
        env: Env<'a>,
    },
    Fold(Thunk<'a>),
}

impl fmt::Debug for Value<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_value(self))
    }
}

enum ThunkState<'a> {
    Suspended(&'a Term, Env<'a>),
    /// Lazy tensor-pattern component: force the source, then the chosen
    /// side. `let w0 * w1 = e in ...` must not force `e` until one of the
    /// binders is demanded.
    Project {
        source: Thunk<'a>,
        second: bool,
        span: Span,
    },
    Ready(Value<'a>),
    /// Being forced right now; forcing it again means a value depends on
    /// itself strictly.
    InProgress,
    /// Placeholder used to tie recursive knots before filling.
    Hole,
}

#[derive(Clone)]
pub struct Thunk<'a>(Rc<RefCell<ThunkState<'a>>>);

impl<'a> Thunk<'a> {
    pub fn suspended(term: &'a Term, env: Env<'a>) -> Thunk<'a> {
        Thunk(Rc::new(RefCell::new(ThunkState::Suspended(term, env))))
    }

    pub fn ready(value: Value<'a>) -> Thunk<'a> {
        Thunk(Rc::new(RefCell::new(ThunkState::Ready(value))))
    }

    fn hole() -> Thunk<'a> {
        Thunk(Rc::new(RefCell::new(ThunkState::Hole)))
    }

    fn project(source: Thunk<'a>, second: bool, span: Span) -> Thunk<'a> {
        Thunk(Rc::new(RefCell::new(ThunkState::Project {
            source,
            second,
            span,
        })))
    }

    fn fill_suspended(&self, term: &'a Term, env: Env<'a>) {
        *self.0.borrow_mut() = ThunkState::Suspended(term, env);
    }

    fn fill_ready(&self, value: Value<'a>) {
        *self.0.borrow_mut() = ThunkState::Ready(value);
    }

    /// True once the thunk has been forced to a value.
    pub fn is_forced(&self) -> bool {
        matches!(&*self.0.borrow(), ThunkState::Ready(_))
    }
}

struct Binding<'a> {
    name: &'a str,
    thunk: Thunk<'a>,
    parent: Option<Rc<Binding<'a>>>,
}

/// Lexically scoped local bindings; globals resolve through the evaluator.
#[derive(Clone, Default)]
pub struct Env<'a> {
    head: Option<Rc<Binding<'a>>>,
}

impl<'a> Env<'a> {
    pub fn empty() -> Env<'a> {
        Env { head: None }
    }

    fn extend(&self, name: &'a str, thunk: Thunk<'a>) -> Env<'a> {
        Env {
            head: Some(Rc::new(Binding {
                name,
                thunk,
                parent: self.head.clone(),
            })),
        }
    }

    fn lookup(&self, name: &str) -> Option<Thunk<'a>> {
        let mut cur = self.head.as_ref();
        while let Some(b) = cur {
            if b.name == name {
                return Some(b.thunk.clone());
            }
            cur = b.parent.as_ref();
        }
        None
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalStats {
    /// Thunk forcings, including memoized hits.
    pub forces: u64,
    /// Suspensions actually evaluated; at most one per thunk.
    pub suspensions_run: u64,
}

pub const DEFAULT_FUEL: u64 = 1_000_000;

pub struct Evaluator<'a> {
    globals: &'a GlobalEnv,
    fuel: u64,
    pub stats: EvalStats,
}

impl<'a> Evaluator<'a> {
    pub fn new(globals: &'a GlobalEnv) -> Evaluator<'a> {
        Evaluator::with_fuel(globals, DEFAULT_FUEL)
    }

    pub fn with_fuel(globals: &'a GlobalEnv, fuel: u64) -> Evaluator<'a> {
        Evaluator {
            globals,
            fuel,
            stats: EvalStats::default(),
        }
    }

    pub fn fuel_left(&self) -> u64 {
        self.fuel
    }

    /// Evaluates a closed term to weak head normal form.
    pub fn eval(&mut self, term: &'a Term) -> Result<Value<'a>, EvalError> {
        self.eval_in(&Env::empty(), term)
    }

    pub fn eval_in(&mut self, env: &Env<'a>, term: &'a Term) -> Result<Value<'a>, EvalError> {
        if self.fuel == 0 {
            return Err(EvalError::FuelExhausted);
        }
        self.fuel -= 1;
        match &term.kind {
            TermKind::Var(name) => match env.lookup(name) {
                Some(thunk) => self.force(&thunk),
                None => self.eval_global(name, term.span),
            },
            TermKind::Global(name) => self.eval_global(name, term.span),
            TermKind::Lam(binder, body) => Ok(Value::Closure {
                binder,
                body,
                env: env.clone(),
            }),
            TermKind::App(fun, arg) => {
                let fun_value = self.eval_in(env, fun)?;
                match fun_value {
                    Value::Closure {
                        binder,
                        body,
                        env: closure_env,
                    } => {
                        let arg_thunk = Thunk::suspended(arg, env.clone());
                        let call_env = closure_env.extend(binder, arg_thunk);
                        self.eval_in(&call_env, body)
                    }
                    other => Err(self.stuck(
                        format!("application of a non-function {}", render_value(&other)),
                        term.span,
                    )),
                }
            }
            TermKind::TensorPair(a, b) => Ok(Value::Tensor(
                Thunk::suspended(a, env.clone()),
                Thunk::suspended(b, env.clone()),
            )),
            TermKind::LetTensor(w0, w1, bound, body) => {
                let bound_thunk = Thunk::suspended(bound, env.clone());
                let t0 = Thunk::project(bound_thunk.clone(), false, term.span);
                let t1 = Thunk::project(bound_thunk, true, term.span);
                let inner = env.extend(w0, t0).extend(w1, t1);
                self.eval_in(&inner, body)
            }
            TermKind::WithPair(a, b) => Ok(Value::With(
                Thunk::suspended(a, env.clone()),
                Thunk::suspended(b, env.clone()),
            )),
            TermKind::Fst(e) => match self.eval_in(env, e)? {
                Value::With(t0, _) => self.force(&t0),
                other => Err(self.stuck(
                    format!("fst of a non-with value {}", render_value(&other)),
                    term.span,
                )),
            },
            TermKind::Snd(e) => match self.eval_in(env, e)? {
                Value::With(_, t1) => self.force(&t1),
                other => Err(self.stuck(
                    format!("snd of a non-with value {}", render_value(&other)),
                    term.span,
                )),
            },
            TermKind::Unit => Ok(Value::Unit),
            TermKind::Inl(e) => Ok(Value::Inl(Thunk::suspended(e, env.clone()))),
            TermKind::Inr(e) => Ok(Value::Inr(Thunk::suspended(e, env.clone()))),
            TermKind::Case(scrutinee, w0, b0, w1, b1) => {
                match self.eval_in(env, scrutinee)? {
                    Value::Inl(t) => self.eval_in(&env.extend(w0, t), b0),
                    Value::Inr(t) => self.eval_in(&env.extend(w1, t), b1),
                    other => Err(self.stuck(
                        format!("case of a non-sum value {}", render_value(&other)),
                        term.span,
                    )),
                }
            }
            TermKind::Absurd(_) => Err(self.stuck("absurd was reached".to_string(), term.span)),
            TermKind::Fold(_, e) => Ok(Value::Fold(Thunk::suspended(e, env.clone()))),
            TermKind::Unfold(_, e) => {
                let v = self.eval_in(env, e)?;
                self.unfold_value(v)
            }
            TermKind::Fix(binder, body) => {
                let self_thunk = Thunk::hole();
                let inner = Env::empty().extend(binder, self_thunk.clone());
                self_thunk.fill_suspended(body, inner);
                self.force(&self_thunk)
            }
            TermKind::BangGlobal(name) => {
                let def = self.globals.lookup(name).ok_or(EvalError::UnboundVariable {
                    name: name.clone(),
                    span: term.span,
                })?;
                // The stream whose every element is E and whose tail is
                // itself; one shared head thunk, forced at most once.
                let head = Thunk::suspended(&def.body, Env::empty());
                let tail = Thunk::hole();
                let payload = Thunk::ready(Value::Tensor(head, tail.clone()));
                let stream = Value::Fold(payload);
                tail.fill_ready(stream.clone());
                Ok(stream)
            }
        }
    }

    fn eval_global(&mut self, name: &str, span: Span) -> Result<Value<'a>, EvalError> {
        match self.globals.lookup(name) {
            Some(def) => self.eval_in(&Env::empty(), &def.body),
            None => Err(EvalError::UnboundVariable {
                name: name.to_string(),
                span,
            }),
        }
    }

    pub fn force(&mut self, thunk: &Thunk<'a>) -> Result<Value<'a>, EvalError> {
        if self.fuel == 0 {
            return Err(EvalError::FuelExhausted);
        }
        self.fuel -= 1;
        self.stats.forces += 1;
        let state = std::mem::replace(&mut *thunk.0.borrow_mut(), ThunkState::InProgress);
        match state {
            ThunkState::Ready(v) => {
                thunk.fill_ready(v.clone());
                Ok(v)
            }
            ThunkState::Suspended(term, env) => {
                self.stats.suspensions_run += 1;
                let v = self.eval_in(&env, term)?;
                thunk.fill_ready(v.clone());
                Ok(v)
            }
            ThunkState::Project {
                source,
                second,
                span,
            } => {
                self.stats.suspensions_run += 1;
                let component = match self.force(&source)? {
                    Value::Tensor(a, b) => {
                        if second {
                            b
                        } else {
                            a
                        }
                    }
                    other => {
                        return Err(self.stuck(
                            format!(
                                "let pattern expects a tensor pair, got {}",
                                render_value(&other)
                            ),
                            span,
                        ))
                    }
                };
                let v = self.force(&component)?;
                thunk.fill_ready(v.clone());
                Ok(v)
            }
            ThunkState::InProgress => Err(self.stuck(
                "value depends on itself strictly".to_string(),
                Span::default(),
            )),
            ThunkState::Hole => Err(self.stuck(
                "unfilled recursive binding".to_string(),
                Span::default(),
            )),
        }
    }

    /// `fold` payloads unwrap; any other value acts as a constant stream of
    /// itself.
    fn unfold_value(&mut self, v: Value<'a>) -> Result<Value<'a>, EvalError> {
        match v {
            Value::Fold(payload) => self.force(&payload),
            other => Ok(Value::Tensor(
                Thunk::ready(other.clone()),
                Thunk::ready(other),
            )),
        }
    }

    /// Forces the first `n` elements of a stream value. Nothing beyond the
    /// `n`-th element is touched: the tail cell is only forced when another
    /// element is still needed.
    pub fn take_bang(&mut self, term: &'a Term, n: usize) -> Result<Vec<Value<'a>>, EvalError> {
        let mut out = Vec::new();
        if n == 0 {
            return Ok(out);
        }
        let mut stream = Some(self.eval(term)?);
        for i in 0..n {
            let cell = stream.take().expect("stream refilled while elements remain");
            match self.unfold_value(cell)? {
                Value::Tensor(head, tail) => {
                    out.push(self.force(&head)?);
                    if i + 1 < n {
                        stream = Some(self.force(&tail)?);
                    }
                }
                other => {
                    return Err(self.stuck(
                        format!("stream did not unfold to a tensor chain: {}", render_value(&other)),
                        term.span,
                    ))
                }
            }
        }
        Ok(out)
    }

    /// Decodes a Peano numeral: counts `inr` nestings under folds until
    /// `inl`.
    pub fn eval_nat(&mut self, term: &'a Term) -> Result<u64, EvalError> {
        let v = self.eval(term)?;
        self.nat_of_value(v)
    }

    pub fn nat_of_value(&mut self, value: Value<'a>) -> Result<u64, EvalError> {
        let mut count = 0u64;
        let mut v = value;
        loop {
            match v {
                Value::Fold(payload) => match self.force(&payload)? {
                    Value::Inl(_) => return Ok(count),
                    Value::Inr(next) => {
                        count += 1;
                        v = self.force(&next)?;
                    }
                    other => {
                        return Err(self.stuck(
                            format!("numeral payload is not a sum: {}", render_value(&other)),
                            Span::default(),
                        ))
                    }
                },
                other => {
                    return Err(self.stuck(
                        format!("not a numeral: {}", render_value(&other)),
                        Span::default(),
                    ))
                }
            }
        }
    }

    fn stuck(&self, message: String, span: Span) -> EvalError {
        EvalError::Stuck { message, span }
    }
}

/// Renders the evaluated spine of a value without forcing anything.
/// Unforced components print as `_`; rendering stops at a small depth
/// because memoized streams are cyclic.
pub fn render_value(v: &Value<'_>) -> String {
    render_depth(v, 4)
}

fn render_depth(v: &Value<'_>, depth: u32) -> String {
    if depth == 0 {
        return "...".to_string();
    }
    match v {
        Value::Unit => "tt".to_string(),
        Value::Tensor(a, b) => format!(
            "{} (*) {}",
            render_thunk(a, depth - 1),
            render_thunk(b, depth - 1)
        ),
        Value::With(a, b) => format!(
            "{} (&) {}",
            render_thunk(a, depth - 1),
            render_thunk(b, depth - 1)
        ),
        Value::Inl(t) => format!("inl {}", render_thunk(t, depth - 1)),
        Value::Inr(t) => format!("inr {}", render_thunk(t, depth - 1)),
        Value::Closure { .. } => "<fun>".to_string(),
        Value::Fold(t) => format!("fold {}", render_thunk(t, depth - 1)),
    }
}

fn render_thunk(t: &Thunk<'_>, depth: u32) -> String {
    match &*t.0.borrow() {
        ThunkState::Ready(v) => {
            let inner = render_depth(v, depth);
            if inner.contains(' ') {
                format!("({inner})")
            } else {
                inner
            }
        }
        _ => "_".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::Term;

    fn empty() -> GlobalEnv {
        GlobalEnv::new()
    }

    #[test]
    fn unit_evaluates() {
        let env = empty();
        let term = Term::unit();
        let mut ev = Evaluator::new(&env);
        assert!(matches!(ev.eval(&term).unwrap(), Value::Unit));
    }

    #[test]
    fn beta_reduction() {
        let env = empty();
        let term = Term::app(Term::lam("w", Term::var("w")), Term::unit());
        let mut ev = Evaluator::new(&env);
        assert!(matches!(ev.eval(&term).unwrap(), Value::Unit));
    }

    #[test]
    fn discarded_with_component_is_never_forced() {
        // fst (tt (&) absurd tt): evaluating the discarded component would
        // error, so success is proof it stayed unforced.
        let env = empty();
        let term = Term::fst(Term::with_pair(
            Term::unit(),
            Term::absurd(Term::unit()),
        ));
        let mut ev = Evaluator::new(&env);
        assert!(matches!(ev.eval(&term).unwrap(), Value::Unit));
    }

    #[test]
    fn with_components_start_unforced_and_memoize() {
        let env = empty();
        let term = Term::with_pair(Term::unit(), Term::unit());
        let mut ev = Evaluator::new(&env);
        let v = ev.eval(&term).unwrap();
        let (t0, t1) = match v {
            Value::With(a, b) => (a, b),
            _ => panic!("expected a with pair"),
        };
        assert!(!t0.is_forced());
        assert!(!t1.is_forced());
        ev.force(&t0).unwrap();
        assert!(t0.is_forced());
        assert!(!t1.is_forced());
        // Forcing again must not evaluate the suspension a second time.
        let runs = ev.stats.suspensions_run;
        ev.force(&t0).unwrap();
        assert_eq!(ev.stats.suspensions_run, runs);
    }

    #[test]
    fn absurd_is_stuck() {
        let env = empty();
        let term = Term::absurd(Term::unit());
        let mut ev = Evaluator::new(&env);
        assert!(matches!(ev.eval(&term), Err(EvalError::Stuck { .. })));
    }

    #[test]
    fn fuel_exhaustion_is_distinct() {
        let env = empty();
        // fix p. p forces itself; a tiny fuel budget must report fuel, not
        // stuckness, when it runs out first.
        let term = Term::app(Term::lam("x", Term::var("x")), Term::unit());
        let mut ev = Evaluator::with_fuel(&env, 1);
        assert!(matches!(ev.eval(&term), Err(EvalError::FuelExhausted)));
    }

    #[test]
    fn strict_self_reference_is_detected() {
        let env = empty();
        let term = Term::fix("p", Term::var("p"));
        let mut ev = Evaluator::new(&env);
        assert!(matches!(ev.eval(&term), Err(EvalError::Stuck { .. })));
    }

    #[test]
    fn unbound_variable_reported() {
        let env = empty();
        let term = Term::var("ghost");
        let mut ev = Evaluator::new(&env);
        assert!(matches!(
            ev.eval(&term),
            Err(EvalError::UnboundVariable { .. })
        ));
    }

    fn env_with_unit_global() -> GlobalEnv {
        let mut env = GlobalEnv::new();
        env.insert(
            "E",
            crate::terms::GlobalDef {
                scheme: crate::types::Type::ONE,
                body: Term::unit(),
            },
        )
        .unwrap();
        env
    }

    #[test]
    fn take_bang_of_a_global_yields_its_value_repeatedly() {
        let env = env_with_unit_global();
        let term = Term::bang("E");
        let mut ev = Evaluator::new(&env);
        let heads = ev.take_bang(&term, 3).unwrap();
        assert_eq!(heads.len(), 3);
        for head in heads {
            assert!(matches!(head, Value::Unit));
        }
        // The shared head thunk ran once; taking more costs no re-evaluation
        // of the element.
        let runs = ev.stats.suspensions_run;
        let again = ev.take_bang(&term, 3).unwrap();
        assert_eq!(again.len(), 3);
        assert!(ev.stats.suspensions_run <= runs + 1);
    }

    #[test]
    fn take_bang_of_zero_elements_is_empty() {
        let env = env_with_unit_global();
        let term = Term::bang("E");
        let mut ev = Evaluator::new(&env);
        assert!(ev.take_bang(&term, 0).unwrap().is_empty());
        // Nothing was evaluated at all.
        assert_eq!(ev.stats.forces, 0);
    }

    #[test]
    fn take_bang_never_touches_the_tail_beyond_n() {
        // A hand-built cell whose tail errors if forced: taking exactly one
        // element must succeed.
        let env = empty();
        let term = Term::fold(
            crate::types::bang_of(&crate::types::Type::ONE),
            Term::tensor_pair(Term::unit(), Term::absurd(Term::unit())),
        );
        let mut ev = Evaluator::new(&env);
        let heads = ev.take_bang(&term, 1).unwrap();
        assert_eq!(heads.len(), 1);
        assert!(matches!(heads[0], Value::Unit));
        // Asking for a second element does force the poisoned tail.
        let mut ev2 = Evaluator::new(&env);
        assert!(matches!(
            ev2.take_bang(&term, 2),
            Err(EvalError::Stuck { .. })
        ));
    }

    #[test]
    fn take_bang_of_a_non_stream_value_is_stuck() {
        let env = empty();
        // tt unfolds to tt (*) tt, whose head is not a stream; a chain of
        // units still takes, but a closure-free non-tensor payload under a
        // fold does not.
        let term = Term::fold(
            crate::types::bang_of(&crate::types::Type::ONE),
            Term::unit(),
        );
        let mut ev = Evaluator::new(&env);
        assert!(matches!(
            ev.take_bang(&term, 1),
            Err(EvalError::Stuck { .. })
        ));
    }

    #[test]
    fn eval_nat_counts_inr_depth() {
        let nat = crate::types::Type::mu(
            "n",
            crate::types::Type::plus(crate::types::Type::ONE, crate::types::Type::var("n")),
        );
        let zero = Term::fold(nat.clone(), Term::inl(Term::unit()));
        let two = Term::fold(
            nat.clone(),
            Term::inr(Term::fold(nat, Term::inr(zero.clone()))),
        );
        let env = empty();
        let mut ev = Evaluator::new(&env);
        let zero_value = ev.eval(&zero).unwrap();
        assert_eq!(ev.nat_of_value(zero_value), Ok(0));
        let two_value = ev.eval(&two).unwrap();
        assert_eq!(ev.nat_of_value(two_value), Ok(2));
    }
}
