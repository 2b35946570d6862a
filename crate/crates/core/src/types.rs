//! Type expressions, substitutions and the operations on them.
//!
//! Types are finite trees: the constants `1` and `0`, the four binary
//! connectives (tensor, plus, with, linear implication), recursive types
//! `mu a. T` and type variables. Recursion only ever goes through `Mu`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TypeConst {
    One,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TypeOp {
    Tensor,
    Plus,
    With,
    Lolli,
}

impl TypeOp {
    pub fn symbol(self) -> &'static str {
        match self {
            TypeOp::Tensor => "*",
            TypeOp::Plus => "+",
            TypeOp::With => "&",
            TypeOp::Lolli => "-o",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Type {
    Const(TypeConst),
    Op(TypeOp, Box<Type>, Box<Type>),
    Mu(String, Box<Type>),
    Var(String),
}

impl Type {
    pub const ONE: Type = Type::Const(TypeConst::One);
    pub const ZERO: Type = Type::Const(TypeConst::Zero);

    pub fn var(name: impl Into<String>) -> Type {
        Type::Var(name.into())
    }

    pub fn mu(binder: impl Into<String>, body: Type) -> Type {
        Type::Mu(binder.into(), Box::new(body))
    }

    pub fn op(op: TypeOp, left: Type, right: Type) -> Type {
        Type::Op(op, Box::new(left), Box::new(right))
    }

    pub fn tensor(left: Type, right: Type) -> Type {
        Type::op(TypeOp::Tensor, left, right)
    }

    pub fn plus(left: Type, right: Type) -> Type {
        Type::op(TypeOp::Plus, left, right)
    }

    pub fn with(left: Type, right: Type) -> Type {
        Type::op(TypeOp::With, left, right)
    }

    pub fn lolli(left: Type, right: Type) -> Type {
        Type::op(TypeOp::Lolli, left, right)
    }

    pub fn is_mu(&self) -> bool {
        matches!(self, Type::Mu(_, _))
    }
}

/// Free (non-`Mu`-bound) type variable names of `t`.
pub fn free_type_vars(t: &Type) -> BTreeSet<String> {
    fn go(t: &Type, acc: &mut BTreeSet<String>, bound: &mut Vec<String>) {
        match t {
            Type::Const(_) => {}
            Type::Op(_, a, b) => {
                go(a, acc, bound);
                go(b, acc, bound);
            }
            Type::Mu(x, body) => {
                bound.push(x.clone());
                go(body, acc, bound);
                bound.pop();
            }
            Type::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    acc.insert(x.clone());
                }
            }
        }
    }
    let mut acc = BTreeSet::new();
    go(t, &mut acc, &mut Vec::new());
    acc
}

/// Every variable name occurring in `t`, bound or free. Used to pick
/// binder names that cannot collide with anything already present.
pub fn all_type_names(t: &Type) -> BTreeSet<String> {
    fn go(t: &Type, acc: &mut BTreeSet<String>) {
        match t {
            Type::Const(_) => {}
            Type::Op(_, a, b) => {
                go(a, acc);
                go(b, acc);
            }
            Type::Mu(x, body) => {
                acc.insert(x.clone());
                go(body, acc);
            }
            Type::Var(x) => {
                acc.insert(x.clone());
            }
        }
    }
    let mut acc = BTreeSet::new();
    go(t, &mut acc);
    acc
}

/// First name from `a`, `b`, ..., `z`, `a1`, `b1`, ... not in `avoid`.
pub fn fresh_letter_name(avoid: &BTreeSet<String>) -> String {
    for round in 0u32.. {
        for letter in b'a'..=b'z' {
            let candidate = if round == 0 {
                (letter as char).to_string()
            } else {
                format!("{}{}", letter as char, round)
            };
            if !avoid.contains(&candidate) {
                return candidate;
            }
        }
    }
    unreachable!()
}

/// `!t`: the stream encoding `mu f. t * f` with `f` chosen fresh for `t`.
pub fn bang_of(t: &Type) -> Type {
    let binder = fresh_letter_name(&all_type_names(t));
    Type::mu(
        binder.clone(),
        Type::tensor(t.clone(), Type::Var(binder)),
    )
}

/// One-step unrolling of a recursive type: `mu a. M` becomes
/// `M[a := mu a. M]`. Returns `None` when `t` is not `Mu`-rooted.
pub fn unroll_mu(t: &Type) -> Option<Type> {
    match t {
        Type::Mu(binder, body) => {
            let s = Subst::singleton(binder.clone(), t.clone());
            Some(s.apply(body))
        }
        _ => None,
    }
}

/// A finite map from type variable names to types.
///
/// Composition is rightward-first: `compose(s1, s2)` applied to `t` equals
/// applying `s1` to `s2 t`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subst(BTreeMap<String, Type>);

impl Subst {
    pub fn empty() -> Subst {
        Subst(BTreeMap::new())
    }

    pub fn singleton(name: impl Into<String>, ty: Type) -> Subst {
        let mut m = BTreeMap::new();
        m.insert(name.into(), ty);
        Subst(m)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, Type)>) -> Subst {
        Subst(pairs.into_iter().collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, name: &str) -> Option<&Type> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Type)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }

    /// Capture-avoiding application. `Mu` binders shadow the substitution;
    /// a binder that occurs free in a relevant image is renamed to a fresh
    /// name before descending.
    pub fn apply(&self, t: &Type) -> Type {
        if self.0.is_empty() {
            return t.clone();
        }
        match t {
            Type::Const(_) => t.clone(),
            Type::Var(x) => self.0.get(x).cloned().unwrap_or_else(|| t.clone()),
            Type::Op(op, a, b) => Type::op(*op, self.apply(a), self.apply(b)),
            Type::Mu(binder, body) => {
                let mut pruned = self.clone();
                pruned.0.remove(binder);
                // Names that could be captured: free variables of the images
                // of bindings that are actually free in the body.
                let body_free = free_type_vars(body);
                let mut image_free = BTreeSet::new();
                for name in &body_free {
                    if let Some(img) = pruned.0.get(name) {
                        image_free.extend(free_type_vars(img));
                    }
                }
                if image_free.contains(binder) {
                    // The replacement binder must not be captured by any
                    // image, collide with anything free in the body, or
                    // itself lie in the substitution's domain.
                    let mut avoid = image_free;
                    avoid.extend(body_free);
                    avoid.insert(binder.clone());
                    avoid.extend(pruned.0.keys().cloned());
                    let fresh = fresh_letter_name(&avoid);
                    let renamed =
                        Subst::singleton(binder.clone(), Type::var(fresh.clone())).apply(body);
                    Type::mu(fresh, pruned.apply(&renamed))
                } else {
                    Type::mu(binder.clone(), pruned.apply(body))
                }
            }
        }
    }

    /// `compose(self, other)`: the substitution that behaves like applying
    /// `other` first and `self` second. On key collision the mapped image
    /// of `other` wins.
    pub fn compose(&self, other: &Subst) -> Subst {
        let mut out = self.0.clone();
        for (k, v) in &other.0 {
            out.insert(k.clone(), self.apply(v));
        }
        Subst(out)
    }
}

/// Alpha-equivalence: equality up to consistent renaming of `Mu` binders.
pub fn alpha_eq(t1: &Type, t2: &Type) -> bool {
    fn go(t1: &Type, t2: &Type, env: &mut Vec<(String, String)>) -> bool {
        match (t1, t2) {
            (Type::Const(c1), Type::Const(c2)) => c1 == c2,
            (Type::Op(op1, a1, b1), Type::Op(op2, a2, b2)) => {
                op1 == op2 && go(a1, a2, env) && go(b1, b2, env)
            }
            (Type::Mu(x, b1), Type::Mu(y, b2)) => {
                env.push((x.clone(), y.clone()));
                let ok = go(b1, b2, env);
                env.pop();
                ok
            }
            (Type::Var(x), Type::Var(y)) => {
                let li = env.iter().rposition(|(l, _)| l == x);
                let ri = env.iter().rposition(|(_, r)| r == y);
                match (li, ri) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            _ => false,
        }
    }
    go(t1, t2, &mut Vec::new())
}

/// Renames free type variables to `a`, `b`, `c`, ... in order of first
/// occurrence. Used to present inferred types, whose variables otherwise
/// carry unparseable `%n` names.
pub fn normalize_type_vars(t: &Type) -> Type {
    fn collect(t: &Type, bound: &mut Vec<String>, order: &mut Vec<String>) {
        match t {
            Type::Const(_) => {}
            Type::Op(_, a, b) => {
                collect(a, bound, order);
                collect(b, bound, order);
            }
            Type::Mu(x, body) => {
                bound.push(x.clone());
                collect(body, bound, order);
                bound.pop();
            }
            Type::Var(x) => {
                if !bound.iter().any(|b| b == x) && !order.iter().any(|o| o == x) {
                    order.push(x.clone());
                }
            }
        }
    }
    let mut order = Vec::new();
    collect(t, &mut Vec::new(), &mut order);
    let mut avoid: BTreeSet<String> = all_type_names(t)
        .into_iter()
        .filter(|n| !order.contains(n))
        .collect();
    let mut mapping = BTreeMap::new();
    for name in order {
        let fresh = fresh_letter_name(&avoid);
        avoid.insert(fresh.clone());
        mapping.insert(name, Type::var(fresh));
    }
    Subst(mapping).apply(t)
}

impl fmt::Display for TypeConst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeConst::One => write!(f, "1"),
            TypeConst::Zero => write!(f, "0"),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::print::print_type(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tvar(n: &str) -> Type {
        Type::var(n)
    }

    #[test]
    fn free_vars_of_var() {
        let mut expected = BTreeSet::new();
        expected.insert("a".to_string());
        assert_eq!(free_type_vars(&tvar("a")), expected);
    }

    #[test]
    fn free_vars_of_const() {
        assert!(free_type_vars(&Type::ONE).is_empty());
    }

    #[test]
    fn free_vars_respect_mu_binder() {
        // mu a. t * a has exactly {t} free
        let t = Type::mu("a", Type::tensor(tvar("t"), tvar("a")));
        let mut expected = BTreeSet::new();
        expected.insert("t".to_string());
        assert_eq!(free_type_vars(&t), expected);
    }

    #[test]
    fn apply_binds_var() {
        let s = Subst::singleton("a", Type::ONE);
        assert_eq!(s.apply(&tvar("a")), Type::ONE);
    }

    #[test]
    fn apply_shadowed_by_mu() {
        let s = Subst::singleton("a", Type::ONE);
        let t = Type::mu("a", tvar("a"));
        assert_eq!(s.apply(&t), t);
    }

    #[test]
    fn apply_avoids_capture() {
        // s = {b -> a}, t = mu a. b * a. Substituting naively would capture
        // the image's `a`; oracle: rename the binder first, then substitute,
        // then compare up to alpha.
        let s = Subst::singleton("b", tvar("a"));
        let t = Type::mu("a", Type::tensor(tvar("b"), tvar("a")));
        let got = s.apply(&t);
        let expected = Type::mu("a2", Type::tensor(tvar("a"), tvar("a2")));
        assert!(alpha_eq(&got, &expected), "got {got:?}");
        // and the binder must no longer capture the substituted `a`
        let free = free_type_vars(&got);
        assert!(free.contains("a"));
    }

    #[test]
    fn compose_identity() {
        let s = Subst::singleton("a", Type::ONE);
        assert_eq!(Subst::empty().compose(&s), s);
    }

    #[test]
    fn compose_chains_bindings() {
        // compose({b -> 0}, {a -> b}) = {a -> 0, b -> 0}
        let s1 = Subst::singleton("b", Type::ZERO);
        let s2 = Subst::singleton("a", tvar("b"));
        let c = s1.compose(&s2);
        assert_eq!(c.get("a"), Some(&Type::ZERO));
        assert_eq!(c.get("b"), Some(&Type::ZERO));
        // defining equation on both variables
        for v in ["a", "b"] {
            assert_eq!(c.apply(&tvar(v)), s1.apply(&s2.apply(&tvar(v))));
        }
    }

    #[test]
    fn compose_collision_prefers_mapped_right() {
        // compose({a -> 1}, {a -> 0}) = {a -> 0}
        let s1 = Subst::singleton("a", Type::ONE);
        let s2 = Subst::singleton("a", Type::ZERO);
        let c = s1.compose(&s2);
        assert_eq!(c.get("a"), Some(&Type::ZERO));
        assert_eq!(c.apply(&tvar("a")), s1.apply(&s2.apply(&tvar("a"))));
    }

    #[test]
    fn alpha_eq_renames_binders() {
        let t1 = Type::mu("a", tvar("a"));
        let t2 = Type::mu("b", tvar("b"));
        assert!(alpha_eq(&t1, &t2));
    }

    #[test]
    fn alpha_eq_distinguishes_free_vars() {
        let t1 = Type::mu("a", tvar("c"));
        let t2 = Type::mu("b", tvar("d"));
        assert!(!alpha_eq(&t1, &t2));
    }

    #[test]
    fn alpha_eq_same_free_var() {
        assert!(alpha_eq(&tvar("a"), &tvar("a")));
        assert!(!alpha_eq(&tvar("a"), &tvar("b")));
    }

    #[test]
    fn alpha_eq_bound_vs_free() {
        // mu a. a  vs  mu b. a : left's var is bound, right's is free
        let t1 = Type::mu("a", tvar("a"));
        let t2 = Type::mu("b", tvar("a"));
        assert!(!alpha_eq(&t1, &t2));
    }

    #[test]
    fn bang_of_const() {
        let t = bang_of(&Type::ONE);
        assert_eq!(
            t,
            Type::mu("a", Type::tensor(Type::ONE, tvar("a")))
        );
    }

    #[test]
    fn bang_of_var_picks_fresh_binder() {
        let t = bang_of(&tvar("a"));
        assert_eq!(t, Type::mu("b", Type::tensor(tvar("a"), tvar("b"))));
    }

    #[test]
    fn bang_of_twice() {
        // expanding the definition twice by hand
        let inner = Type::mu("a", Type::tensor(Type::ONE, tvar("a")));
        let expected = Type::mu("b", Type::tensor(inner, tvar("b")));
        assert_eq!(bang_of(&bang_of(&Type::ONE)), expected);
    }

    #[test]
    fn unroll_nat_once() {
        // Nat = mu n. 1 + n unrolls to 1 + Nat
        let nat = Type::mu("n", Type::plus(Type::ONE, tvar("n")));
        let unrolled = unroll_mu(&nat).unwrap();
        assert_eq!(unrolled, Type::plus(Type::ONE, nat));
    }

    #[test]
    fn unroll_non_mu_is_none() {
        assert!(unroll_mu(&Type::ONE).is_none());
    }

    #[test]
    fn normalize_renames_in_first_occurrence_order() {
        let t = Type::lolli(tvar("%3"), Type::tensor(tvar("%0"), tvar("%3")));
        let n = normalize_type_vars(&t);
        assert_eq!(n, Type::lolli(tvar("a"), Type::tensor(tvar("b"), tvar("a"))));
    }
}
