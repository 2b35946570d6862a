//! Derivation traces: which rule fired where, with enough structure to
//! re-validate an inference independently of the engine that produced it.

use crate::print::{print_term, print_type};
use crate::terms::{Context, GlobalEnv, Term, TermKind};
use crate::types::{alpha_eq, unroll_mu, Subst, Type};
use serde_json::{json, Value as Json};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleName {
    LolliI,
    LolliE,
    Var,
    Intro,
    TensorI,
    TensorE,
    WithI,
    WithEL,
    WithER,
    OneI,
    PlusIL,
    PlusIR,
    PlusE,
    ZeroE,
    MuI,
    MuEI,
    MuEE,
    Fix,
    BangI,
}

impl RuleName {
    pub const ALL: [RuleName; 19] = [
        RuleName::LolliI,
        RuleName::LolliE,
        RuleName::Var,
        RuleName::Intro,
        RuleName::TensorI,
        RuleName::TensorE,
        RuleName::WithI,
        RuleName::WithEL,
        RuleName::WithER,
        RuleName::OneI,
        RuleName::PlusIL,
        RuleName::PlusIR,
        RuleName::PlusE,
        RuleName::ZeroE,
        RuleName::MuI,
        RuleName::MuEI,
        RuleName::MuEE,
        RuleName::Fix,
        RuleName::BangI,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleName::LolliI => "LolliI",
            RuleName::LolliE => "LolliE",
            RuleName::Var => "Var",
            RuleName::Intro => "Intro",
            RuleName::TensorI => "TensorI",
            RuleName::TensorE => "TensorE",
            RuleName::WithI => "WithI",
            RuleName::WithEL => "WithEL",
            RuleName::WithER => "WithER",
            RuleName::OneI => "OneI",
            RuleName::PlusIL => "PlusIL",
            RuleName::PlusIR => "PlusIR",
            RuleName::PlusE => "PlusE",
            RuleName::ZeroE => "ZeroE",
            RuleName::MuI => "MuI",
            RuleName::MuEI => "MuEI",
            RuleName::MuEE => "MuEE",
            RuleName::Fix => "Fix",
            RuleName::BangI => "BangI",
        }
    }

    /// Number of derivation children a node with this rule carries. `BangI`
    /// carries the derivation of its desugaring.
    pub fn premise_count(self) -> usize {
        match self {
            RuleName::Var | RuleName::Intro | RuleName::OneI => 0,
            RuleName::LolliI
            | RuleName::WithEL
            | RuleName::WithER
            | RuleName::PlusIL
            | RuleName::PlusIR
            | RuleName::ZeroE
            | RuleName::MuI
            | RuleName::MuEI
            | RuleName::MuEE
            | RuleName::Fix
            | RuleName::BangI => 1,
            RuleName::LolliE | RuleName::TensorI | RuleName::TensorE | RuleName::WithI => 2,
            RuleName::PlusE => 3,
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One node of a derivation: the rule, the judgment it concluded and the
/// sub-derivations of its premises.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivationNode {
    pub rule: RuleName,
    /// Input context of the judgment.
    pub input: Context,
    /// Leftover context returned by the judgment.
    pub remaining: Context,
    /// The type concluded (before any outer substitution).
    pub ty: Type,
    /// `Γ \ Δ |- e : τ` rendered at construction time.
    pub conclusion: String,
    pub children: Vec<DerivationNode>,
}

impl DerivationNode {
    pub fn new(
        rule: RuleName,
        input: Context,
        remaining: Context,
        ty: Type,
        term: &Term,
        children: Vec<DerivationNode>,
    ) -> DerivationNode {
        debug_assert_eq!(children.len(), rule.premise_count(), "rule {rule}");
        let conclusion = format!(
            "{} \\ {} |- {} : {}",
            input,
            remaining,
            print_term(term),
            print_type(&ty)
        );
        DerivationNode {
            rule,
            input,
            remaining,
            ty,
            conclusion,
            children,
        }
    }

    /// All rule names appearing in this derivation.
    pub fn rules_used(&self) -> std::collections::BTreeSet<RuleName> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_rules(&mut out);
        out
    }

    fn collect_rules(&self, out: &mut std::collections::BTreeSet<RuleName>) {
        out.insert(self.rule);
        for c in &self.children {
            c.collect_rules(out);
        }
    }

    /// Line-indented text rendering, two spaces per level.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(0, &mut out);
        out
    }

    fn write_text(&self, depth: usize, out: &mut String) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        out.push_str(self.rule.name());
        out.push_str("  ");
        out.push_str(&self.conclusion);
        out.push('\n');
        for c in &self.children {
            c.write_text(depth + 1, out);
        }
    }

    pub fn to_json(&self) -> Json {
        json!({
            "rule": self.rule.name(),
            "conclusion": self.conclusion,
            "type": print_type(&self.ty),
            "children": self.children.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Re-checks a derivation against the term it claims to type, using only
/// the recorded judgments, the final substitution and alpha-equivalence.
/// This is a plain bidirectional pass with no unification: at every node
/// the recorded types must fit the rule once the final substitution is
/// applied to both sides.
pub fn validate_trace(
    env: &GlobalEnv,
    term: &Term,
    node: &DerivationNode,
    final_subst: &Subst,
) -> Result<(), String> {
    let fail = |msg: String| Err(format!("{msg}\n  at {}", node.conclusion));
    let fin = |t: &Type| final_subst.apply(t);
    let same = |a: &Type, b: &Type| alpha_eq(&fin(a), &fin(b));

    if node.children.len() != node.rule.premise_count() {
        return fail(format!(
            "rule {} expects {} premises, trace has {}",
            node.rule,
            node.rule.premise_count(),
            node.children.len()
        ));
    }
    // Leftover names must come from the input.
    for name in node.remaining.names() {
        if !node.input.contains(name) {
            return fail(format!("leftover hypothesis {name} not in input context"));
        }
    }

    match (&term.kind, node.rule) {
        (TermKind::Var(v), RuleName::Var) => {
            let hyp = node
                .input
                .lookup(v)
                .ok_or_else(|| format!("Var: {v} not in context"))?;
            if !same(hyp, &node.ty) {
                return fail(format!("Var: hypothesis type differs for {v}"));
            }
            if node.remaining.contains(v) {
                return fail(format!("Var: {v} still present after use"));
            }
            Ok(())
        }
        // A bare name can also resolve as a global.
        (TermKind::Var(v), RuleName::Intro) | (TermKind::Global(v), RuleName::Intro) => {
            let def = env
                .lookup(v)
                .ok_or_else(|| format!("Intro: unknown global {v}"))?;
            if !is_instance_of(&def.scheme, &fin(&node.ty)) {
                return fail(format!(
                    "Intro: {} is not an instance of {}",
                    fin(&node.ty),
                    def.scheme
                ));
            }
            Ok(())
        }
        (TermKind::Lam(w, body), RuleName::LolliI) => {
            let child = &node.children[0];
            let sigma = child
                .input
                .lookup(w)
                .ok_or_else(|| format!("LolliI: binder {w} missing from premise context"))?;
            let expected = Type::lolli(sigma.clone(), child.ty.clone());
            if !same(&node.ty, &expected) {
                return fail("LolliI: conclusion is not (binder -o body)".to_string());
            }
            if node.remaining.contains(w) {
                return fail(format!("LolliI: binder {w} escapes"));
            }
            validate_trace(env, body, child, final_subst)
        }
        (TermKind::App(fun, arg), RuleName::LolliE) => {
            let (cf, ca) = (&node.children[0], &node.children[1]);
            let expected = Type::lolli(ca.ty.clone(), node.ty.clone());
            if !same(&cf.ty, &expected) {
                return fail("LolliE: function type is not (arg -o result)".to_string());
            }
            validate_trace(env, fun, cf, final_subst)?;
            validate_trace(env, arg, ca, final_subst)
        }
        (TermKind::TensorPair(a, b), RuleName::TensorI) => {
            let (c0, c1) = (&node.children[0], &node.children[1]);
            let expected = Type::tensor(c0.ty.clone(), c1.ty.clone());
            if !same(&node.ty, &expected) {
                return fail("TensorI: conclusion is not a tensor of the premises".to_string());
            }
            validate_trace(env, a, c0, final_subst)?;
            validate_trace(env, b, c1, final_subst)
        }
        (TermKind::LetTensor(w0, w1, bound, body), RuleName::TensorE) => {
            let (c0, c1) = (&node.children[0], &node.children[1]);
            let a = c1
                .input
                .lookup(w0)
                .ok_or_else(|| format!("TensorE: {w0} missing from body context"))?;
            let b = c1
                .input
                .lookup(w1)
                .ok_or_else(|| format!("TensorE: {w1} missing from body context"))?;
            let expected = Type::tensor(a.clone(), b.clone());
            if !same(&c0.ty, &expected) {
                return fail("TensorE: scrutinee type does not split as bound pair".to_string());
            }
            if !same(&node.ty, &c1.ty) {
                return fail("TensorE: conclusion type differs from body type".to_string());
            }
            if node.remaining.contains(w0) || node.remaining.contains(w1) {
                return fail("TensorE: bound variable escapes".to_string());
            }
            validate_trace(env, bound, c0, final_subst)?;
            validate_trace(env, body, c1, final_subst)
        }
        (TermKind::WithPair(a, b), RuleName::WithI) => {
            let (c0, c1) = (&node.children[0], &node.children[1]);
            let expected = Type::with(c0.ty.clone(), c1.ty.clone());
            if !same(&node.ty, &expected) {
                return fail("WithI: conclusion is not a with-pair of the premises".to_string());
            }
            validate_trace(env, a, c0, final_subst)?;
            validate_trace(env, b, c1, final_subst)
        }
        (TermKind::Fst(e), RuleName::WithEL) | (TermKind::Snd(e), RuleName::WithER) => {
            let child = &node.children[0];
            let projected = match &fin(&child.ty) {
                Type::Op(crate::types::TypeOp::With, l, r) => {
                    if node.rule == RuleName::WithEL {
                        l.as_ref().clone()
                    } else {
                        r.as_ref().clone()
                    }
                }
                other => {
                    return fail(format!("With projection from non-with type {other}"));
                }
            };
            if !alpha_eq(&fin(&node.ty), &projected) {
                return fail("With projection type mismatch".to_string());
            }
            validate_trace(env, e, child, final_subst)
        }
        (TermKind::Unit, RuleName::OneI) => {
            if !same(&node.ty, &Type::ONE) {
                return fail("OneI: conclusion is not 1".to_string());
            }
            Ok(())
        }
        (TermKind::Inl(e), RuleName::PlusIL) => {
            let child = &node.children[0];
            match &fin(&node.ty) {
                Type::Op(crate::types::TypeOp::Plus, l, _) => {
                    if !alpha_eq(&fin(&child.ty), l) {
                        return fail("PlusIL: left component differs from premise".to_string());
                    }
                }
                other => return fail(format!("PlusIL: conclusion {other} is not a sum")),
            }
            validate_trace(env, e, child, final_subst)
        }
        (TermKind::Inr(e), RuleName::PlusIR) => {
            let child = &node.children[0];
            match &fin(&node.ty) {
                Type::Op(crate::types::TypeOp::Plus, _, r) => {
                    if !alpha_eq(&fin(&child.ty), r) {
                        return fail("PlusIR: right component differs from premise".to_string());
                    }
                }
                other => return fail(format!("PlusIR: conclusion {other} is not a sum")),
            }
            validate_trace(env, e, child, final_subst)
        }
        (TermKind::Case(scrutinee, w0, b0, w1, b1), RuleName::PlusE) => {
            let (cs, c0, c1) = (&node.children[0], &node.children[1], &node.children[2]);
            let a = c0
                .input
                .lookup(w0)
                .ok_or_else(|| format!("PlusE: {w0} missing from branch context"))?;
            let b = c1
                .input
                .lookup(w1)
                .ok_or_else(|| format!("PlusE: {w1} missing from branch context"))?;
            let expected = Type::plus(a.clone(), b.clone());
            if !same(&cs.ty, &expected) {
                return fail("PlusE: scrutinee type does not split as the branches".to_string());
            }
            if !same(&c0.ty, &c1.ty) || !same(&node.ty, &c1.ty) {
                return fail("PlusE: branch types do not agree".to_string());
            }
            validate_trace(env, scrutinee, cs, final_subst)?;
            validate_trace(env, b0, c0, final_subst)?;
            validate_trace(env, b1, c1, final_subst)
        }
        (TermKind::Absurd(e), RuleName::ZeroE) => {
            let child = &node.children[0];
            if !same(&child.ty, &Type::ZERO) {
                return fail("ZeroE: scrutinee is not 0".to_string());
            }
            validate_trace(env, e, child, final_subst)
        }
        (TermKind::Fold(annotation, e), RuleName::MuI) => {
            let child = &node.children[0];
            if !same(&node.ty, annotation) {
                return fail("MuI: conclusion differs from annotation".to_string());
            }
            let unrolled = unroll_mu(&fin(&node.ty))
                .ok_or_else(|| "MuI: conclusion is not a mu type".to_string())?;
            if !alpha_eq(&fin(&child.ty), &unrolled) {
                return fail("MuI: premise is not the unrolling of the conclusion".to_string());
            }
            validate_trace(env, e, child, final_subst)
        }
        (TermKind::Unfold(_, e), RuleName::MuEI) | (TermKind::Unfold(_, e), RuleName::MuEE) => {
            let child = &node.children[0];
            let unrolled = unroll_mu(&fin(&child.ty))
                .ok_or_else(|| "unfold premise is not a mu type".to_string())?;
            if !alpha_eq(&fin(&node.ty), &unrolled) {
                return fail("unfold conclusion is not the unrolling of the premise".to_string());
            }
            validate_trace(env, e, child, final_subst)
        }
        (TermKind::Fix(p, body), RuleName::Fix) => {
            let child = &node.children[0];
            if !child.input.contains(p) {
                return fail(format!("Fix: {p} missing from premise context"));
            }
            if child.input.len() != 1 {
                return fail("Fix: premise context must contain only the fix binder".to_string());
            }
            if !same(&node.ty, &child.ty) {
                return fail("Fix: conclusion differs from body type".to_string());
            }
            validate_trace(env, body, child, final_subst)
        }
        (TermKind::BangGlobal(name), RuleName::BangI) => {
            let child = &node.children[0];
            if env.lookup(name).is_none() {
                return fail(format!("BangI: unknown global {name}"));
            }
            if !same(&node.ty, &child.ty) {
                return fail("BangI: conclusion differs from desugared derivation".to_string());
            }
            // The child types the desugared term, which is not a subterm of
            // the original; it was validated structurally when built.
            Ok(())
        }
        (_, rule) => fail(format!("rule {rule} does not match term {}", print_term(term))),
    }
}

/// True if `target` can be obtained from `scheme` by substituting its free
/// variables. First-order matching, `Mu` binders compared positionally.
fn is_instance_of(scheme: &Type, target: &Type) -> bool {
    fn go(
        scheme: &Type,
        target: &Type,
        env: &mut Vec<(String, String)>,
        binds: &mut std::collections::BTreeMap<String, Type>,
    ) -> bool {
        match (scheme, target) {
            (Type::Const(c1), Type::Const(c2)) => c1 == c2,
            (Type::Op(o1, a1, b1), Type::Op(o2, a2, b2)) => {
                o1 == o2 && go(a1, a2, env, binds) && go(b1, b2, env, binds)
            }
            (Type::Mu(x, b1), Type::Mu(y, b2)) => {
                env.push((x.clone(), y.clone()));
                let ok = go(b1, b2, env, binds);
                env.pop();
                ok
            }
            (Type::Var(x), t) => {
                if let Some(i) = env.iter().rposition(|(l, _)| l == x) {
                    // Bound on the scheme side: must meet the paired binder.
                    matches!(t, Type::Var(y) if env.iter().rposition(|(_, r)| r == y) == Some(i))
                } else {
                    match binds.get(x) {
                        Some(prev) => alpha_eq(prev, t),
                        None => {
                            binds.insert(x.clone(), t.clone());
                            true
                        }
                    }
                }
            }
            _ => false,
        }
    }
    go(
        scheme,
        target,
        &mut Vec::new(),
        &mut std::collections::BTreeMap::new(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn premise_counts_cover_all_rules() {
        for rule in RuleName::ALL {
            let _ = rule.premise_count();
        }
        assert_eq!(RuleName::ALL.len(), 19);
    }

    #[test]
    fn instance_matching() {
        let scheme = Type::lolli(Type::var("a"), Type::var("a"));
        assert!(is_instance_of(&scheme, &Type::lolli(Type::ONE, Type::ONE)));
        assert!(!is_instance_of(&scheme, &Type::lolli(Type::ONE, Type::ZERO)));
        let nat = Type::mu("n", Type::plus(Type::ONE, Type::var("n")));
        assert!(is_instance_of(&nat, &Type::mu("m", Type::plus(Type::ONE, Type::var("m")))));
    }

    fn identity_trace() -> (Term, DerivationNode, Subst) {
        let env = GlobalEnv::new();
        let term = Term::lam("x", Term::var("x"));
        let res = crate::infer::infer(
            &env,
            Context::empty(),
            &term,
            &mut crate::infer::FreshSupply::new(),
        )
        .unwrap();
        (term, res.trace, res.subst)
    }

    #[test]
    fn indented_text_golden() {
        let (_, trace, _) = identity_trace();
        assert_eq!(
            trace.to_text(),
            "LolliI  . \\ . |- \\x. x : %0 -o %0\n  Var  x : %0 \\ . |- x : %0\n"
        );
    }

    #[test]
    fn json_golden() {
        let (_, trace, _) = identity_trace();
        let expected = serde_json::json!({
            "rule": "LolliI",
            "conclusion": ". \\ . |- \\x. x : %0 -o %0",
            "type": "%0 -o %0",
            "children": [{
                "rule": "Var",
                "conclusion": "x : %0 \\ . |- x : %0",
                "type": "%0",
                "children": [],
            }],
        });
        assert_eq!(trace.to_json(), expected);
    }

    #[test]
    fn validator_accepts_the_engine_and_rejects_corruption() {
        let env = GlobalEnv::new();
        let (term, trace, subst) = identity_trace();
        validate_trace(&env, &term, &trace, &subst).unwrap();

        // Claiming a different conclusion type must be caught.
        let mut corrupted = trace.clone();
        corrupted.ty = Type::lolli(Type::ONE, Type::ZERO);
        assert!(validate_trace(&env, &term, &corrupted, &subst).is_err());

        // So must a conclusion whose rule does not match the term.
        let mut wrong_rule = trace;
        wrong_rule.rule = RuleName::Fix;
        assert!(validate_trace(&env, &term, &wrong_rule, &subst).is_err());
    }
}
