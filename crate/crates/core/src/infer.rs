//! Type inference for the affine language.
//!
//! Judgments have the shape `Γ \ Δ |- e : τ, S`: the whole context goes in,
//! the unused (possibly refined) hypotheses come back out, together with the
//! inferred type and the substitution accumulated by unification. Rules with
//! several premises thread the context: the first premise receives all of
//! it, the next receives the substituted leftover.
//!
//! Weakening is implicit (an unused hypothesis is simply dropped where its
//! binder ends); contraction is rejected because the first use removes the
//! hypothesis, so a second use fails as unbound.

use crate::terms::{Context, GlobalDef, GlobalEnv, Span, Term, TermKind};
use crate::trace::{DerivationNode, RuleName};
use crate::types::{bang_of, free_type_vars, unroll_mu, Subst, Type};
use crate::unify::{mgu, mgu_to, UnifyError};
use std::fmt;

/// Source of fresh type variables. Names render as `%0`, `%1`, ...; the
/// `%` prefix cannot be written in the surface syntax, so fresh names never
/// collide with user names.
#[derive(Debug, Clone, Default)]
pub struct FreshSupply {
    counter: u64,
}

impl FreshSupply {
    pub fn new() -> FreshSupply {
        FreshSupply::default()
    }

    pub fn starting_at(counter: u64) -> FreshSupply {
        FreshSupply { counter }
    }

    pub fn fresh_name(&mut self) -> String {
        let n = self.counter;
        self.counter += 1;
        format!("%{n}")
    }

    pub fn fresh(&mut self) -> Type {
        Type::Var(self.fresh_name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    /// Rule that was being applied when the error arose.
    pub rule: Option<RuleName>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeErrorKind {
    /// Name not in the linear context and not a global. A second use of an
    /// affine hypothesis reports this, since the first use removed it.
    UnboundVariable { name: String },
    Unify(UnifyError),
    /// Unannotated `unfold` whose scrutinee type is not a `mu` type.
    AnnotationRequired { ty: Type },
    /// Violated engine invariant; not reachable from parsed programs.
    Internal { message: String },
}

impl TypeError {
    fn new(kind: TypeErrorKind, rule: Option<RuleName>, span: Span) -> TypeError {
        TypeError { kind, rule, span }
    }

    /// Stable identifier for manifest-driven tests and JSON output.
    pub fn class(&self) -> &'static str {
        match &self.kind {
            TypeErrorKind::UnboundVariable { .. } => "UnboundVariable",
            TypeErrorKind::Unify(e) => e.class(),
            TypeErrorKind::AnnotationRequired { .. } => "AnnotationRequired",
            TypeErrorKind::Internal { .. } => "Internal",
        }
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TypeErrorKind::UnboundVariable { name } => {
                write!(f, "unbound variable `{}`", display_name(name))?
            }
            TypeErrorKind::Unify(e) => write!(f, "{e}")?,
            TypeErrorKind::AnnotationRequired { ty } => write!(
                f,
                "unfold needs a type annotation: scrutinee has type {ty}, not a mu type"
            )?,
            TypeErrorKind::Internal { message } => write!(f, "internal error: {message}")?,
        }
        if let Some(rule) = self.rule {
            write!(f, " (rule {rule})")?;
        }
        Ok(())
    }
}

impl std::error::Error for TypeError {}

/// Internal renamings append `%n` to the surface name; strip it back off
/// for messages.
fn display_name(name: &str) -> &str {
    match name.find('%') {
        Some(idx) if idx > 0 => &name[..idx],
        _ => name,
    }
}

/// A hypothesis that was discarded unused, for `--warn-unused`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnusedBinding {
    pub name: String,
    pub span: Span,
}

/// Result of one inference: the leftover context, the type, the composed
/// substitution, the derivation and the unused binders seen along the way.
#[derive(Debug, Clone)]
pub struct InferenceResult {
    pub remaining: Context,
    pub ty: Type,
    pub subst: Subst,
    pub trace: DerivationNode,
    pub unused: Vec<UnusedBinding>,
}

pub fn infer(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    match &term.kind {
        TermKind::Var(name) => infer_var(env, gamma, term, name, supply),
        TermKind::Global(name) => infer_global(env, gamma, term, name, supply),
        TermKind::Lam(binder, body) => infer_lam(env, gamma, term, binder, body, supply),
        TermKind::App(fun, arg) => infer_app(env, gamma, term, fun, arg, supply),
        TermKind::TensorPair(a, b) => infer_tensor_pair(env, gamma, term, a, b, supply),
        TermKind::LetTensor(w0, w1, bound, body) => {
            infer_let_tensor(env, gamma, term, w0, w1, bound, body, supply)
        }
        TermKind::WithPair(a, b) => infer_with_pair(env, gamma, term, a, b, supply),
        TermKind::Fst(e) => infer_projection(env, gamma, term, e, RuleName::WithEL, supply),
        TermKind::Snd(e) => infer_projection(env, gamma, term, e, RuleName::WithER, supply),
        TermKind::Unit => Ok(InferenceResult {
            remaining: gamma.clone(),
            ty: Type::ONE,
            subst: Subst::empty(),
            trace: DerivationNode::new(RuleName::OneI, gamma.clone(), gamma, Type::ONE, term, vec![]),
            unused: vec![],
        }),
        TermKind::Inl(e) => infer_injection(env, gamma, term, e, RuleName::PlusIL, supply),
        TermKind::Inr(e) => infer_injection(env, gamma, term, e, RuleName::PlusIR, supply),
        TermKind::Case(scrutinee, w0, b0, w1, b1) => {
            infer_case(env, gamma, term, scrutinee, w0, b0, w1, b1, supply)
        }
        TermKind::Absurd(e) => infer_absurd(env, gamma, term, e, supply),
        TermKind::Fold(annotation, e) => infer_fold(env, gamma, term, annotation, e, supply),
        TermKind::Unfold(annotation, e) => {
            infer_unfold(env, gamma, term, annotation.as_ref(), e, supply)
        }
        TermKind::Fix(binder, body) => infer_fix(env, gamma, term, binder, body, supply),
        TermKind::BangGlobal(name) => infer_bang(env, gamma, term, name, supply),
    }
}

/// Replaces every free type variable of the scheme with a fresh one,
/// consistently. `Mu`-bound variables are untouched.
pub fn instantiate(scheme: &Type, supply: &mut FreshSupply) -> Type {
    let free = free_type_vars(scheme);
    let s = Subst::from_pairs(free.into_iter().map(|name| (name, supply.fresh())));
    s.apply(scheme)
}

fn unbound(name: &str, rule: RuleName, span: Span) -> TypeError {
    TypeError::new(
        TypeErrorKind::UnboundVariable {
            name: name.to_string(),
        },
        Some(rule),
        span,
    )
}

fn unify_err(e: UnifyError, rule: RuleName, span: Span) -> TypeError {
    TypeError::new(TypeErrorKind::Unify(e), Some(rule), span)
}

fn internal(message: impl Into<String>, rule: RuleName, span: Span) -> TypeError {
    TypeError::new(
        TypeErrorKind::Internal {
            message: message.into(),
        },
        Some(rule),
        span,
    )
}

fn extend(ctx: &Context, name: &str, ty: Type, rule: RuleName, span: Span) -> Result<Context, TypeError> {
    ctx.extend(name, ty)
        .map_err(|n| internal(format!("binder `{n}` shadows a hypothesis in scope"), rule, span))
}

fn infer_var(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    name: &str,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    if let Some((remaining, ty)) = gamma.take(name) {
        let trace = DerivationNode::new(
            RuleName::Var,
            gamma,
            remaining.clone(),
            ty.clone(),
            term,
            vec![],
        );
        return Ok(InferenceResult {
            remaining,
            ty,
            subst: Subst::empty(),
            trace,
            unused: vec![],
        });
    }
    if env.contains(name) {
        return infer_global(env, gamma, term, name, supply);
    }
    Err(unbound(name, RuleName::Var, term.span))
}

fn infer_global(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    name: &str,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    let def = env
        .lookup(name)
        .ok_or_else(|| unbound(name, RuleName::Intro, term.span))?;
    let ty = instantiate(&def.scheme, supply);
    let trace = DerivationNode::new(
        RuleName::Intro,
        gamma.clone(),
        gamma.clone(),
        ty.clone(),
        term,
        vec![],
    );
    Ok(InferenceResult {
        remaining: gamma,
        ty,
        subst: Subst::empty(),
        trace,
        unused: vec![],
    })
}

fn infer_lam(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    binder: &str,
    body: &Term,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    let sigma = supply.fresh();
    let inner_ctx = extend(&gamma, binder, sigma.clone(), RuleName::LolliI, term.span)?;
    let body_res = infer(env, inner_ctx, body, supply)?;
    let ty = Type::lolli(body_res.subst.apply(&sigma), body_res.ty);
    let mut unused = body_res.unused;
    if body_res.remaining.contains(binder) {
        unused.push(UnusedBinding {
            name: binder.to_string(),
            span: term.span,
        });
    }
    let remaining = body_res.remaining.without(binder);
    let trace = DerivationNode::new(
        RuleName::LolliI,
        gamma,
        remaining.clone(),
        ty.clone(),
        term,
        vec![body_res.trace],
    );
    Ok(InferenceResult {
        remaining,
        ty,
        subst: body_res.subst,
        trace,
        unused,
    })
}

fn infer_app(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    fun: &Term,
    arg: &Term,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    let fun_res = infer(env, gamma.clone(), fun, supply)?;
    let arg_ctx = fun_res.remaining.map_types(|t| fun_res.subst.apply(t));
    let arg_res = infer(env, arg_ctx, arg, supply)?;
    let result = supply.fresh();
    let s2 = mgu(
        &arg_res.subst.apply(&fun_res.ty),
        &Type::lolli(arg_res.ty.clone(), result.clone()),
    )
    .map_err(|e| unify_err(e, RuleName::LolliE, term.span))?;
    let ty = s2.apply(&result);
    let subst = s2.compose(&arg_res.subst).compose(&fun_res.subst);
    let remaining = arg_res.remaining;
    let mut unused = fun_res.unused;
    unused.extend(arg_res.unused);
    let trace = DerivationNode::new(
        RuleName::LolliE,
        gamma,
        remaining.clone(),
        ty.clone(),
        term,
        vec![fun_res.trace, arg_res.trace],
    );
    Ok(InferenceResult {
        remaining,
        ty,
        subst,
        trace,
        unused,
    })
}

fn infer_tensor_pair(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    a: &Term,
    b: &Term,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    let a_res = infer(env, gamma.clone(), a, supply)?;
    let b_ctx = a_res.remaining.map_types(|t| a_res.subst.apply(t));
    let b_res = infer(env, b_ctx, b, supply)?;
    let ty = Type::tensor(b_res.subst.apply(&a_res.ty), b_res.ty.clone());
    let subst = b_res.subst.compose(&a_res.subst);
    let remaining = b_res.remaining;
    let mut unused = a_res.unused;
    unused.extend(b_res.unused);
    let trace = DerivationNode::new(
        RuleName::TensorI,
        gamma,
        remaining.clone(),
        ty.clone(),
        term,
        vec![a_res.trace, b_res.trace],
    );
    Ok(InferenceResult {
        remaining,
        ty,
        subst,
        trace,
        unused,
    })
}

#[allow(clippy::too_many_arguments)]
fn infer_let_tensor(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    w0: &str,
    w1: &str,
    bound: &Term,
    body: &Term,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    let bound_res = infer(env, gamma.clone(), bound, supply)?;
    let alpha = supply.fresh();
    let beta = supply.fresh();
    let s1 = mgu(&bound_res.ty, &Type::tensor(alpha.clone(), beta.clone()))
        .map_err(|e| unify_err(e, RuleName::TensorE, term.span))?;
    let threaded = bound_res.remaining.map_types(|t| bound_res.subst.apply(t));
    let body_ctx = extend(&threaded, w0, s1.apply(&alpha), RuleName::TensorE, term.span)?;
    let body_ctx = extend(&body_ctx, w1, s1.apply(&beta), RuleName::TensorE, term.span)?;
    let body_res = infer(env, body_ctx, body, supply)?;
    let mut unused = bound_res.unused;
    unused.extend(body_res.unused);
    for w in [w0, w1] {
        if body_res.remaining.contains(w) {
            unused.push(UnusedBinding {
                name: w.to_string(),
                span: term.span,
            });
        }
    }
    let remaining = body_res.remaining.without(w0).without(w1);
    let ty = body_res.ty;
    let subst = body_res.subst.compose(&s1).compose(&bound_res.subst);
    let trace = DerivationNode::new(
        RuleName::TensorE,
        gamma,
        remaining.clone(),
        ty.clone(),
        term,
        vec![bound_res.trace, body_res.trace],
    );
    Ok(InferenceResult {
        remaining,
        ty,
        subst,
        trace,
        unused,
    })
}

/// Name-wise intersection of two leftovers. The surviving type is taken
/// from the later context with the final substitution applied; if the two
/// copies disagree up to alpha after substitution, the engine is broken.
fn intersect(
    first: &Context,
    second: &Context,
    final_subst: &Subst,
    rule: RuleName,
    span: Span,
) -> Result<Context, TypeError> {
    let mut out = Vec::new();
    for (name, ty1) in first.iter() {
        if let Some(ty2) = second.lookup(name) {
            let t1 = final_subst.apply(ty1);
            let t2 = final_subst.apply(ty2);
            if !crate::types::alpha_eq(&t1, &t2) {
                return Err(internal(
                    format!("branch leftovers disagree on `{name}`: {t1} vs {t2}"),
                    rule,
                    span,
                ));
            }
            out.push((name.clone(), t2));
        }
    }
    Ok(Context::from_pairs(out))
}

fn infer_with_pair(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    a: &Term,
    b: &Term,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    let a_res = infer(env, gamma.clone(), a, supply)?;
    // Both components may consume the same hypotheses: the second premise
    // receives the whole (substituted) context, not the leftover.
    let b_ctx = gamma.map_types(|t| a_res.subst.apply(t));
    let b_res = infer(env, b_ctx, b, supply)?;
    let ty = Type::with(b_res.subst.apply(&a_res.ty), b_res.ty.clone());
    let subst = b_res.subst.compose(&a_res.subst);
    let remaining = intersect(
        &a_res.remaining,
        &b_res.remaining,
        &subst,
        RuleName::WithI,
        term.span,
    )?;
    let mut unused = a_res.unused;
    unused.extend(b_res.unused);
    let trace = DerivationNode::new(
        RuleName::WithI,
        gamma,
        remaining.clone(),
        ty.clone(),
        term,
        vec![a_res.trace, b_res.trace],
    );
    Ok(InferenceResult {
        remaining,
        ty,
        subst,
        trace,
        unused,
    })
}

fn infer_projection(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    e: &Term,
    rule: RuleName,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    let res = infer(env, gamma.clone(), e, supply)?;
    let alpha = supply.fresh();
    let beta = supply.fresh();
    let s1 = mgu(&res.ty, &Type::with(alpha.clone(), beta.clone()))
        .map_err(|e| unify_err(e, rule, term.span))?;
    let ty = if rule == RuleName::WithEL {
        s1.apply(&alpha)
    } else {
        s1.apply(&beta)
    };
    let subst = s1.compose(&res.subst);
    let remaining = res.remaining;
    let trace = DerivationNode::new(rule, gamma, remaining.clone(), ty.clone(), term, vec![res.trace]);
    Ok(InferenceResult {
        remaining,
        ty,
        subst,
        trace,
        unused: res.unused,
    })
}

fn infer_injection(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    e: &Term,
    rule: RuleName,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    let res = infer(env, gamma.clone(), e, supply)?;
    let fresh = supply.fresh();
    let ty = if rule == RuleName::PlusIL {
        Type::plus(res.ty.clone(), fresh)
    } else {
        Type::plus(fresh, res.ty.clone())
    };
    let remaining = res.remaining;
    let trace = DerivationNode::new(rule, gamma, remaining.clone(), ty.clone(), term, vec![res.trace]);
    Ok(InferenceResult {
        remaining,
        ty,
        subst: res.subst,
        trace,
        unused: res.unused,
    })
}

#[allow(clippy::too_many_arguments)]
fn infer_case(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    scrutinee: &Term,
    w0: &str,
    branch0: &Term,
    w1: &str,
    branch1: &Term,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    let scrut_res = infer(env, gamma.clone(), scrutinee, supply)?;
    let alpha = supply.fresh();
    let beta = supply.fresh();
    let s1 = mgu(&scrut_res.ty, &Type::plus(alpha.clone(), beta.clone()))
        .map_err(|e| unify_err(e, RuleName::PlusE, term.span))?;
    let threaded = scrut_res.remaining.map_types(|t| scrut_res.subst.apply(t));

    let ctx0 = extend(&threaded, w0, s1.apply(&alpha), RuleName::PlusE, term.span)?;
    let b0_res = infer(env, ctx0, branch0, supply)?;

    let ctx1 = extend(&threaded, w1, s1.apply(&beta), RuleName::PlusE, term.span)?;
    let ctx1 = ctx1.map_types(|t| b0_res.subst.apply(t));
    let b1_res = infer(env, ctx1, branch1, supply)?;

    let s4 = mgu(&b1_res.subst.apply(&b0_res.ty), &b1_res.ty)
        .map_err(|e| unify_err(e, RuleName::PlusE, term.span))?;
    let ty = s4.apply(&b1_res.ty);
    let subst = s4
        .compose(&b1_res.subst)
        .compose(&b0_res.subst)
        .compose(&s1)
        .compose(&scrut_res.subst);

    let mut unused = scrut_res.unused;
    unused.extend(b0_res.unused);
    unused.extend(b1_res.unused);
    if b0_res.remaining.contains(w0) {
        unused.push(UnusedBinding {
            name: w0.to_string(),
            span: term.span,
        });
    }
    if b1_res.remaining.contains(w1) {
        unused.push(UnusedBinding {
            name: w1.to_string(),
            span: term.span,
        });
    }
    let remaining = intersect(
        &b0_res.remaining.without(w0),
        &b1_res.remaining.without(w1),
        &subst,
        RuleName::PlusE,
        term.span,
    )?;
    let trace = DerivationNode::new(
        RuleName::PlusE,
        gamma,
        remaining.clone(),
        ty.clone(),
        term,
        vec![scrut_res.trace, b0_res.trace, b1_res.trace],
    );
    Ok(InferenceResult {
        remaining,
        ty,
        subst,
        trace,
        unused,
    })
}

fn infer_absurd(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    e: &Term,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    let res = infer(env, gamma.clone(), e, supply)?;
    let s1 = mgu(&res.ty, &Type::ZERO).map_err(|e| unify_err(e, RuleName::ZeroE, term.span))?;
    let ty = supply.fresh();
    let subst = s1.compose(&res.subst);
    let remaining = res.remaining;
    let trace = DerivationNode::new(
        RuleName::ZeroE,
        gamma,
        remaining.clone(),
        ty.clone(),
        term,
        vec![res.trace],
    );
    Ok(InferenceResult {
        remaining,
        ty,
        subst,
        trace,
        unused: res.unused,
    })
}

fn require_mu(annotation: &Type, rule: RuleName, span: Span) -> Result<(), TypeError> {
    if annotation.is_mu() {
        Ok(())
    } else {
        Err(internal(
            format!("annotation {annotation} is not a mu type"),
            rule,
            span,
        ))
    }
}

fn infer_fold(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    annotation: &Type,
    e: &Term,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    require_mu(annotation, RuleName::MuI, term.span)?;
    let res = infer(env, gamma.clone(), e, supply)?;
    let unrolled = unroll_mu(annotation).expect("checked mu");
    let s1 = mgu_to(&res.ty, &unrolled).map_err(|e| unify_err(e, RuleName::MuI, term.span))?;
    let ty = s1.apply(annotation);
    let subst = s1.compose(&res.subst);
    let remaining = res.remaining;
    let trace = DerivationNode::new(
        RuleName::MuI,
        gamma,
        remaining.clone(),
        ty.clone(),
        term,
        vec![res.trace],
    );
    Ok(InferenceResult {
        remaining,
        ty,
        subst,
        trace,
        unused: res.unused,
    })
}

fn infer_unfold(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    annotation: Option<&Type>,
    e: &Term,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    let res = infer(env, gamma.clone(), e, supply)?;
    match annotation {
        None => {
            let scrutinee_ty = res.subst.apply(&res.ty);
            if !scrutinee_ty.is_mu() {
                // Inferring the annotation would need second-order
                // unification, so the user has to supply it.
                return Err(TypeError::new(
                    TypeErrorKind::AnnotationRequired { ty: scrutinee_ty },
                    Some(RuleName::MuEI),
                    term.span,
                ));
            }
            let ty = unroll_mu(&scrutinee_ty).expect("checked mu");
            let remaining = res.remaining;
            let trace = DerivationNode::new(
                RuleName::MuEI,
                gamma,
                remaining.clone(),
                ty.clone(),
                term,
                vec![res.trace],
            );
            Ok(InferenceResult {
                remaining,
                ty,
                subst: res.subst,
                trace,
                unused: res.unused,
            })
        }
        Some(annotation) => {
            require_mu(annotation, RuleName::MuEE, term.span)?;
            let s1 = mgu_to(&res.ty, annotation)
                .map_err(|e| unify_err(e, RuleName::MuEE, term.span))?;
            let unrolled = unroll_mu(annotation).expect("checked mu");
            let ty = s1.apply(&unrolled);
            let subst = s1.compose(&res.subst);
            let remaining = res.remaining;
            let trace = DerivationNode::new(
                RuleName::MuEE,
                gamma,
                remaining.clone(),
                ty.clone(),
                term,
                vec![res.trace],
            );
            Ok(InferenceResult {
                remaining,
                ty,
                subst,
                trace,
                unused: res.unused,
            })
        }
    }
}

fn infer_fix(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    binder: &str,
    body: &Term,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    // The body sees only the fix binder: no other linear hypothesis may
    // appear, since recursion would duplicate it.
    let element = supply.fresh();
    let inner_ctx = Context::from_pairs([(binder.to_string(), bang_of(&element))]);
    let body_res = infer(env, inner_ctx, body, supply)?;
    let s1 = mgu(&body_res.ty, &element).map_err(|e| unify_err(e, RuleName::Fix, term.span))?;
    let ty = s1.apply(&body_res.ty);
    let subst = s1.compose(&body_res.subst);
    let mut unused = body_res.unused;
    if body_res.remaining.contains(binder) {
        unused.push(UnusedBinding {
            name: binder.to_string(),
            span: term.span,
        });
    }
    // The conclusion returns the ambient context untouched; the binder
    // lived only in the premise.
    let trace = DerivationNode::new(
        RuleName::Fix,
        gamma.clone(),
        gamma.clone(),
        ty.clone(),
        term,
        vec![body_res.trace],
    );
    Ok(InferenceResult {
        remaining: gamma,
        ty,
        subst,
        trace,
        unused,
    })
}

fn infer_bang(
    env: &GlobalEnv,
    gamma: Context,
    term: &Term,
    name: &str,
    supply: &mut FreshSupply,
) -> Result<InferenceResult, TypeError> {
    let def = env
        .lookup(name)
        .ok_or_else(|| unbound(name, RuleName::BangI, term.span))?;
    let instantiated = instantiate(&def.scheme, supply);
    // !E is sugar for the closed-context stream introduction.
    let binder = "%self".to_string();
    let desugared = Term::new(
        TermKind::Fix(
            binder.clone(),
            Box::new(Term::new(
                TermKind::Fold(
                    bang_of(&instantiated),
                    Box::new(Term::new(
                        TermKind::TensorPair(
                            Box::new(Term::new(TermKind::Global(name.to_string()), term.span)),
                            Box::new(Term::new(TermKind::Var(binder), term.span)),
                        ),
                        term.span,
                    )),
                ),
                term.span,
            )),
        ),
        term.span,
    );
    let res = infer(env, gamma, &desugared, supply)?;
    let trace = DerivationNode::new(
        RuleName::BangI,
        res.trace.input.clone(),
        res.remaining.clone(),
        res.ty.clone(),
        term,
        vec![res.trace],
    );
    Ok(InferenceResult {
        remaining: res.remaining,
        ty: res.ty,
        subst: res.subst,
        trace,
        unused: res.unused,
    })
}

/// Checks `body` against `declared` in the empty context and extends the
/// environment. The declared type may be more specific than the inferred
/// one, never more general.
pub fn check_global_def(
    env: &GlobalEnv,
    _name: &str,
    declared: &Type,
    body: &Term,
    supply: &mut FreshSupply,
) -> Result<(GlobalDef, InferenceResult), TypeError> {
    let res = infer(env, Context::empty(), body, supply)?;
    mgu_to(&res.ty, declared)
        .map_err(|e| TypeError::new(TypeErrorKind::Unify(e), None, body.span))?;
    Ok((
        GlobalDef {
            scheme: declared.clone(),
            body: body.clone(),
        },
        res,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{alpha_eq, normalize_type_vars};

    fn empty_env() -> GlobalEnv {
        GlobalEnv::new()
    }

    fn nat() -> Type {
        Type::mu("n", Type::plus(Type::ONE, Type::var("n")))
    }

    fn run(env: &GlobalEnv, gamma: Context, term: &Term) -> Result<InferenceResult, TypeError> {
        infer(env, gamma, term, &mut FreshSupply::new())
    }

    fn ctx(pairs: &[(&str, Type)]) -> Context {
        Context::from_pairs(pairs.iter().map(|(n, t)| (n.to_string(), t.clone())))
    }

    #[test]
    fn var_consumes_hypothesis() {
        let res = run(&empty_env(), ctx(&[("w", Type::ONE)]), &Term::var("w")).unwrap();
        assert_eq!(res.ty, Type::ONE);
        assert!(res.remaining.is_empty());
        assert!(res.subst.is_empty());
    }

    #[test]
    fn var_leaves_others() {
        let res = run(
            &empty_env(),
            ctx(&[("x", Type::ONE), ("y", Type::ZERO)]),
            &Term::var("y"),
        )
        .unwrap();
        assert_eq!(res.ty, Type::ZERO);
        assert_eq!(res.remaining.names().collect::<Vec<_>>(), vec!["x"]);
    }

    #[test]
    fn var_unbound_in_empty_context() {
        let err = run(&empty_env(), Context::empty(), &Term::var("w")).unwrap_err();
        assert_eq!(err.class(), "UnboundVariable");
    }

    #[test]
    fn global_instantiates_fresh() {
        let mut env = GlobalEnv::new();
        env.insert(
            "id",
            GlobalDef {
                scheme: Type::lolli(Type::var("a"), Type::var("a")),
                body: Term::lam("x", Term::var("x")),
            },
        )
        .unwrap();
        let gamma = ctx(&[("x", Type::ONE)]);
        let res = run(&env, gamma.clone(), &Term::global("id")).unwrap();
        assert_eq!(res.ty, Type::lolli(Type::var("%0"), Type::var("%0")));
        assert_eq!(res.remaining, gamma);
    }

    #[test]
    fn global_closed_scheme_unchanged() {
        let mut env = GlobalEnv::new();
        env.insert(
            "Zero",
            GlobalDef {
                scheme: nat(),
                body: Term::unit(),
            },
        )
        .unwrap();
        let res = run(&env, Context::empty(), &Term::global("Zero")).unwrap();
        assert_eq!(res.ty, nat());
    }

    #[test]
    fn global_missing() {
        let err = run(&empty_env(), Context::empty(), &Term::global("nope")).unwrap_err();
        assert_eq!(err.class(), "UnboundVariable");
    }

    #[test]
    fn identity_lambda() {
        let res = run(&empty_env(), Context::empty(), &Term::lam("w", Term::var("w"))).unwrap();
        assert_eq!(res.ty, Type::lolli(Type::var("%0"), Type::var("%0")));
    }

    #[test]
    fn weakening_drops_unused_binder() {
        let res = run(&empty_env(), Context::empty(), &Term::lam("w", Term::unit())).unwrap();
        assert_eq!(res.ty, Type::lolli(Type::var("%0"), Type::ONE));
        assert_eq!(res.unused.len(), 1);
        assert_eq!(res.unused[0].name, "w");
    }

    #[test]
    fn contraction_rejected_in_tensor() {
        let term = Term::lam("w", Term::tensor_pair(Term::var("w"), Term::var("w")));
        let err = run(&empty_env(), Context::empty(), &term).unwrap_err();
        assert_eq!(err.class(), "UnboundVariable");
    }

    #[test]
    fn contraction_rejected_in_application() {
        let term = Term::lam("w", Term::app(Term::var("w"), Term::var("w")));
        let err = run(&empty_env(), Context::empty(), &term).unwrap_err();
        assert_eq!(err.class(), "UnboundVariable");
    }

    #[test]
    fn beta_redex_types() {
        let term = Term::app(Term::lam("w", Term::var("w")), Term::unit());
        let res = run(&empty_env(), Context::empty(), &term).unwrap();
        assert_eq!(res.ty, Type::ONE);
    }

    #[test]
    fn application_with_exact_arrow() {
        let gamma = ctx(&[
            ("f", Type::lolli(Type::ONE, Type::ZERO)),
            ("x", Type::ONE),
        ]);
        let term = Term::app(Term::var("f"), Term::var("x"));
        let res = run(&empty_env(), gamma, &term).unwrap();
        assert_eq!(res.ty, Type::ZERO);
        assert!(res.remaining.is_empty());
    }

    #[test]
    fn application_of_non_arrow() {
        let term = Term::app(Term::unit(), Term::unit());
        let err = run(&empty_env(), Context::empty(), &term).unwrap_err();
        assert!(matches!(err.kind, TypeErrorKind::Unify(_)));
    }

    #[test]
    fn tensor_pair_of_two_hypotheses() {
        let gamma = ctx(&[("x", Type::ONE), ("y", Type::ZERO)]);
        let term = Term::tensor_pair(Term::var("x"), Term::var("y"));
        let res = run(&empty_env(), gamma, &term).unwrap();
        assert_eq!(res.ty, Type::tensor(Type::ONE, Type::ZERO));
        assert!(res.remaining.is_empty());
    }

    #[test]
    fn let_tensor_splits_pair() {
        let gamma = ctx(&[("p", Type::tensor(Type::ONE, Type::ZERO))]);
        let term = Term::let_tensor("a", "b", Term::var("p"), Term::var("a"));
        let res = run(&empty_env(), gamma, &term).unwrap();
        assert_eq!(res.ty, Type::ONE);
        assert!(res.remaining.is_empty());
        assert_eq!(res.unused.len(), 1);
        assert_eq!(res.unused[0].name, "b");
    }

    #[test]
    fn let_tensor_of_unit_fails() {
        let term = Term::let_tensor("a", "b", Term::unit(), Term::var("a"));
        let err = run(&empty_env(), Context::empty(), &term).unwrap_err();
        assert!(matches!(err.kind, TypeErrorKind::Unify(_)));
    }

    #[test]
    fn with_pair_shares_context() {
        let gamma = ctx(&[("x", Type::ONE)]);
        let term = Term::with_pair(Term::var("x"), Term::var("x"));
        let res = run(&empty_env(), gamma, &term).unwrap();
        assert_eq!(res.ty, Type::with(Type::ONE, Type::ONE));
        assert!(res.remaining.is_empty());
    }

    #[test]
    fn with_pair_intersection_keeps_common_leftover() {
        let gamma = ctx(&[("x", Type::ONE), ("y", Type::ZERO)]);
        let term = Term::with_pair(Term::var("x"), Term::unit());
        let res = run(&empty_env(), gamma, &term).unwrap();
        assert_eq!(res.ty, Type::with(Type::ONE, Type::ONE));
        assert_eq!(res.remaining.names().collect::<Vec<_>>(), vec!["y"]);
    }

    #[test]
    fn fst_projects() {
        let term = Term::fst(Term::with_pair(Term::unit(), Term::unit()));
        let res = run(&empty_env(), Context::empty(), &term).unwrap();
        assert_eq!(res.ty, Type::ONE);
    }

    #[test]
    fn unit_in_nonempty_context() {
        let gamma = ctx(&[("x", Type::ZERO)]);
        let res = run(&empty_env(), gamma.clone(), &Term::unit()).unwrap();
        assert_eq!(res.ty, Type::ONE);
        assert_eq!(res.remaining, gamma);
        assert!(res.subst.is_empty());
    }

    #[test]
    fn case_unifies_branches() {
        let term = Term::case(
            Term::inl(Term::unit()),
            "a",
            Term::var("a"),
            "b",
            Term::unit(),
        );
        let res = run(&empty_env(), Context::empty(), &term).unwrap();
        assert_eq!(res.ty, Type::ONE);
    }

    #[test]
    fn case_branch_mismatch() {
        let term = Term::case(
            Term::inl(Term::unit()),
            "a",
            Term::var("a"),
            "b",
            Term::tensor_pair(Term::unit(), Term::unit()),
        );
        let err = run(&empty_env(), Context::empty(), &term).unwrap_err();
        assert!(matches!(err.kind, TypeErrorKind::Unify(_)));
    }

    #[test]
    fn case_branches_share_hypothesis() {
        let gamma = ctx(&[("x", Type::ONE)]);
        let term = Term::case(
            Term::inl(Term::unit()),
            "a",
            Term::var("x"),
            "b",
            Term::var("x"),
        );
        let res = run(&empty_env(), gamma, &term).unwrap();
        assert_eq!(res.ty, Type::ONE);
        assert!(res.remaining.is_empty());
    }

    #[test]
    fn absurd_gives_fresh_type() {
        let gamma = ctx(&[("x", Type::ZERO)]);
        let res = run(&empty_env(), gamma, &Term::absurd(Term::var("x"))).unwrap();
        assert!(matches!(res.ty, Type::Var(_)));
    }

    #[test]
    fn absurd_of_unit_fails() {
        let err = run(&empty_env(), Context::empty(), &Term::absurd(Term::unit())).unwrap_err();
        assert!(matches!(err.kind, TypeErrorKind::Unify(_)));
    }

    #[test]
    fn absurd_composes_under_application() {
        let gamma = ctx(&[("x", Type::ZERO)]);
        let term = Term::app(Term::lam("w", Term::absurd(Term::var("w"))), Term::var("x"));
        let res = run(&empty_env(), gamma, &term).unwrap();
        assert!(matches!(res.ty, Type::Var(_)));
    }

    #[test]
    fn fold_zero_into_nat() {
        let term = Term::fold(nat(), Term::inl(Term::unit()));
        let res = run(&empty_env(), Context::empty(), &term).unwrap();
        assert_eq!(res.ty, nat());
    }

    #[test]
    fn fold_of_wrong_payload_fails() {
        let term = Term::fold(nat(), Term::unit());
        let err = run(&empty_env(), Context::empty(), &term).unwrap_err();
        assert!(matches!(err.kind, TypeErrorKind::Unify(_)));
    }

    #[test]
    fn fold_stream_with_global_tail() {
        let mut env = GlobalEnv::new();
        env.insert(
            "ones",
            GlobalDef {
                scheme: bang_of(&Type::ONE),
                body: Term::unit(),
            },
        )
        .unwrap();
        let term = Term::fold(
            bang_of(&Type::ONE),
            Term::tensor_pair(Term::unit(), Term::global("ones")),
        );
        let res = run(&env, Context::empty(), &term).unwrap();
        assert!(alpha_eq(&res.ty, &bang_of(&Type::ONE)));
    }

    #[test]
    fn unfold_of_mu_typed_hypothesis() {
        let gamma = ctx(&[("n", nat())]);
        let res = run(&empty_env(), gamma, &Term::unfold(Term::var("n"))).unwrap();
        assert_eq!(res.ty, Type::plus(Type::ONE, nat()));
    }

    #[test]
    fn unfold_of_variable_needs_annotation() {
        let term = Term::lam("xs", Term::unfold(Term::var("xs")));
        let err = run(&empty_env(), Context::empty(), &term).unwrap_err();
        assert_eq!(err.class(), "AnnotationRequired");
    }

    #[test]
    fn annotated_unfold_refines_binder() {
        // \xs. unfold [!t] xs : !t -o t * !t
        let bang_t = bang_of(&Type::var("t"));
        let term = Term::lam("xs", Term::unfold_at(bang_t.clone(), Term::var("xs")));
        let res = run(&empty_env(), Context::empty(), &term).unwrap();
        let expected = Type::lolli(
            bang_t.clone(),
            Type::tensor(Type::var("t"), bang_t),
        );
        assert!(alpha_eq(&res.ty, &expected), "got {}", res.ty);
    }

    #[test]
    fn fix_builds_closed_stream() {
        // fix xs. fold [!1] (tt (*) xs) : !1
        let term = Term::fix(
            "xs",
            Term::fold(
                bang_of(&Type::ONE),
                Term::tensor_pair(Term::unit(), Term::var("xs")),
            ),
        );
        let res = run(&empty_env(), Context::empty(), &term).unwrap();
        assert!(alpha_eq(&res.ty, &bang_of(&Type::ONE)), "got {}", res.ty);
    }

    #[test]
    fn fix_withholds_ambient_hypotheses() {
        let gamma = ctx(&[("y", Type::ONE)]);
        let term = Term::fix("p", Term::var("y"));
        let err = run(&empty_env(), gamma, &term).unwrap_err();
        assert_eq!(err.class(), "UnboundVariable");
    }

    #[test]
    fn fix_self_reference_fails_occurs() {
        let term = Term::fix("p", Term::var("p"));
        let err = run(&empty_env(), Context::empty(), &term).unwrap_err();
        assert_eq!(err.class(), "OccursCheck");
    }

    #[test]
    fn bang_of_unit_global() {
        let mut env = GlobalEnv::new();
        env.insert(
            "E",
            GlobalDef {
                scheme: Type::ONE,
                body: Term::unit(),
            },
        )
        .unwrap();
        let res = run(&env, Context::empty(), &Term::bang("E")).unwrap();
        assert!(alpha_eq(&res.ty, &bang_of(&Type::ONE)), "got {}", res.ty);
        assert_eq!(res.trace.rule, RuleName::BangI);
    }

    #[test]
    fn bang_of_polymorphic_global() {
        let mut env = GlobalEnv::new();
        env.insert(
            "id",
            GlobalDef {
                scheme: Type::lolli(Type::var("a"), Type::var("a")),
                body: Term::lam("x", Term::var("x")),
            },
        )
        .unwrap();
        let res = run(&env, Context::empty(), &Term::bang("id")).unwrap();
        let expected = bang_of(&Type::lolli(Type::var("%0"), Type::var("%0")));
        assert!(alpha_eq(&res.ty, &expected), "got {}", res.ty);
    }

    #[test]
    fn bang_of_missing_global() {
        let err = run(&empty_env(), Context::empty(), &Term::bang("nope")).unwrap_err();
        assert_eq!(err.class(), "UnboundVariable");
    }

    #[test]
    fn instantiate_respects_mu_binders() {
        let mut supply = FreshSupply::new();
        let scheme = Type::lolli(
            Type::var("a"),
            Type::mu("x", Type::tensor(Type::var("a"), Type::var("x"))),
        );
        let inst = instantiate(&scheme, &mut supply);
        let expected = Type::lolli(
            Type::var("%0"),
            Type::mu("x", Type::tensor(Type::var("%0"), Type::var("x"))),
        );
        assert_eq!(inst, expected);
    }

    #[test]
    fn check_global_def_accepts_declared_specialization() {
        let mut supply = FreshSupply::new();
        let env = empty_env();
        // id body infers a -o a; declaring 1 -o 1 is a legal specialization
        let (def, _) = check_global_def(
            &env,
            "id1",
            &Type::lolli(Type::ONE, Type::ONE),
            &Term::lam("x", Term::var("x")),
            &mut supply,
        )
        .unwrap();
        assert_eq!(def.scheme, Type::lolli(Type::ONE, Type::ONE));
    }

    #[test]
    fn check_global_def_rejects_overgeneral_declaration() {
        let mut supply = FreshSupply::new();
        let env = empty_env();
        let err = check_global_def(
            &env,
            "bad",
            &Type::var("a"),
            &Term::unit(),
            &mut supply,
        )
        .unwrap_err();
        assert_eq!(err.class(), "Direction");
    }

    #[test]
    fn check_global_def_rejects_wrong_declaration() {
        let mut supply = FreshSupply::new();
        let err = check_global_def(
            &empty_env(),
            "id",
            &Type::lolli(Type::ONE, Type::ZERO),
            &Term::lam("x", Term::var("x")),
            &mut supply,
        )
        .unwrap_err();
        assert!(matches!(err.kind, TypeErrorKind::Unify(_)));
    }

    #[test]
    fn inference_is_deterministic_modulo_counter() {
        let term = Term::lam("x", Term::lam("y", Term::tensor_pair(Term::var("x"), Term::var("y"))));
        let r1 = infer(
            &empty_env(),
            Context::empty(),
            &term,
            &mut FreshSupply::new(),
        )
        .unwrap();
        let r2 = infer(
            &empty_env(),
            Context::empty(),
            &term,
            &mut FreshSupply::starting_at(17),
        )
        .unwrap();
        assert!(alpha_eq(
            &normalize_type_vars(&r1.ty),
            &normalize_type_vars(&r2.ty)
        ));
    }
}
