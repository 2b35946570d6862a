//! Most general unifier for types.
//!
//! `mgu` is symmetric; `mgu_to` is the directional variant used against
//! user-given annotations: it refuses to instantiate a variable that occurs
//! on the given (right) side, so the annotation must be at most as general
//! as the inferred type.
//!
//! Recursive types unify iso-recursively: `mu` against `mu` renames both
//! binders to one fresh name (capture-avoidingly) and recurses on the
//! bodies. Names bound by an enclosing `mu` act as rigid constants inside
//! it: a binding whose image would let one escape its binder fails. There
//! is no implicit unrolling.

use crate::types::{all_type_names, free_type_vars, fresh_letter_name, Subst, Type};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnifyError {
    /// Distinct constants or distinct operators in the same position.
    ConstMismatch { left: Type, right: Type },
    /// A variable would be bound to a type containing itself.
    OccursCheck { var: String, ty: Type },
    /// A non-variable met a variable of the given type in `mgu_to`.
    Direction { ty: Type, var: String },
    /// Any other disagreement (the catch-all case).
    ShapeMismatch { left: Type, right: Type },
}

impl UnifyError {
    /// Stable identifier for manifest-driven tests and JSON output.
    pub fn class(&self) -> &'static str {
        match self {
            UnifyError::ConstMismatch { .. } => "ConstMismatch",
            UnifyError::OccursCheck { .. } => "OccursCheck",
            UnifyError::Direction { .. } => "Direction",
            UnifyError::ShapeMismatch { .. } => "ShapeMismatch",
        }
    }
}

impl fmt::Display for UnifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnifyError::ConstMismatch { left, right } => {
                write!(f, "can't unify {left} and {right}")
            }
            UnifyError::OccursCheck { var, ty } => {
                write!(f, "occurs check failed: {var} in {ty}")
            }
            UnifyError::Direction { ty, var } => {
                write!(
                    f,
                    "can't unify {ty} to given type variable {var} which is more general"
                )
            }
            UnifyError::ShapeMismatch { left, right } => {
                write!(f, "can't unify {left} and {right}")
            }
        }
    }
}

impl std::error::Error for UnifyError {}

pub fn mgu(t1: &Type, t2: &Type) -> Result<Subst, UnifyError> {
    mgu_prim(true, &mut Vec::new(), t1, t2)
}

pub fn mgu_to(inferred: &Type, given: &Type) -> Result<Subst, UnifyError> {
    mgu_prim(false, &mut Vec::new(), inferred, given)
}

fn rename(from: &str, to: &str, t: &Type) -> Type {
    Subst::singleton(from.to_string(), Type::var(to)).apply(t)
}

fn mgu_prim(
    symmetric: bool,
    bound: &mut Vec<String>,
    t1: &Type,
    t2: &Type,
) -> Result<Subst, UnifyError> {
    match (t1, t2) {
        (Type::Const(c1), Type::Const(c2)) => {
            if c1 == c2 {
                Ok(Subst::empty())
            } else {
                Err(UnifyError::ConstMismatch {
                    left: t1.clone(),
                    right: t2.clone(),
                })
            }
        }
        (Type::Op(op1, a1, b1), Type::Op(op2, a2, b2)) => {
            if op1 == op2 {
                let s1 = mgu_prim(symmetric, bound, a1, a2)?;
                let s2 = mgu_prim(symmetric, bound, &s1.apply(b1), &s1.apply(b2))?;
                Ok(s2.compose(&s1))
            } else {
                Err(UnifyError::ConstMismatch {
                    left: t1.clone(),
                    right: t2.clone(),
                })
            }
        }
        (Type::Mu(v1, b1), Type::Mu(v2, b2)) => {
            if v1 == v2 {
                bound.push(v1.clone());
                let out = mgu_prim(symmetric, bound, b1, b2);
                bound.pop();
                out
            } else {
                let mut avoid: BTreeSet<String> = all_type_names(b1);
                avoid.extend(all_type_names(b2));
                avoid.extend(bound.iter().cloned());
                avoid.insert(v1.clone());
                avoid.insert(v2.clone());
                let z = fresh_letter_name(&avoid);
                let left = rename(v1, &z, b1);
                let right = rename(v2, &z, b2);
                bound.push(z);
                let out = mgu_prim(symmetric, bound, &left, &right);
                bound.pop();
                out
            }
        }
        (Type::Var(v), t) => {
            if matches!(t, Type::Var(x) if x == v) {
                Ok(Subst::empty())
            } else if bound.iter().any(|b| b == v) {
                // A mu-bound name is rigid inside its binder.
                Err(UnifyError::ShapeMismatch {
                    left: t1.clone(),
                    right: t.clone(),
                })
            } else if free_type_vars(t).contains(v) {
                Err(UnifyError::OccursCheck {
                    var: v.clone(),
                    ty: t.clone(),
                })
            } else if free_type_vars(t).iter().any(|f| bound.iter().any(|b| b == f)) {
                // The image would leak a mu-bound name out of its scope.
                Err(UnifyError::ShapeMismatch {
                    left: t1.clone(),
                    right: t.clone(),
                })
            } else {
                Ok(Subst::singleton(v.clone(), t.clone()))
            }
        }
        (t, Type::Var(v)) => {
            if symmetric {
                mgu_prim(symmetric, bound, t2, t1)
            } else {
                Err(UnifyError::Direction {
                    ty: t.clone(),
                    var: v.clone(),
                })
            }
        }
        _ => Err(UnifyError::ShapeMismatch {
            left: t1.clone(),
            right: t2.clone(),
        }),
    }
}
