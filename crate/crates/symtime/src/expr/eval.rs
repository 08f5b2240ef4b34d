//! Exact evaluation under symbol bindings.

use super::{Expr, ExprError, Node, Symbol};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// An evaluation result: exact while the expression stays in the rational
/// fragment, IEEE-754 double once `exp`/`ln` is involved.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Rational(BigRational),
    Real(f64),
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Rational(r) => write!(f, "{r}"),
            Value::Real(x) => write!(f, "{x}"),
        }
    }
}

impl Value {
    /// The value as a double (lossy for rationals wider than a double).
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Real(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Value::Rational(r) => Some(r),
            Value::Real(_) => None,
        }
    }

    fn add(self, other: Value) -> Value {
        match (self, other) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a + b),
            (a, b) => Value::Real(a.to_f64() + b.to_f64()),
        }
    }

    fn mul(self, other: Value) -> Value {
        match (self, other) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a * b),
            (a, b) => Value::Real(a.to_f64() * b.to_f64()),
        }
    }

    fn pow(self, n: i32) -> Result<Value, ExprError> {
        match self {
            Value::Rational(r) => Ok(Value::Rational(super::rational_pow(&r, n)?)),
            Value::Real(x) => {
                if x == 0.0 && n < 0 {
                    return Err(ExprError::DivisionByZero);
                }
                Ok(Value::Real(x.powi(n)))
            }
        }
    }
}

/// Evaluates `e` under `bindings`. The result is an exact rational whenever
/// `e` contains no `exp`/`ln`; otherwise evaluation continues in double
/// precision from the innermost transcendental outward.
pub fn evaluate_exact(
    e: &Expr,
    bindings: &BTreeMap<Symbol, BigRational>,
) -> Result<Value, ExprError> {
    match &*e.0 {
        Node::Rational(r) => Ok(Value::Rational(r.clone())),
        Node::Symbol(s) => bindings
            .get(s)
            .cloned()
            .map(Value::Rational)
            .ok_or_else(|| ExprError::UnboundSymbol(s.name().to_string())),
        Node::Sum(ts) => {
            let mut acc = Value::Rational(BigRational::zero());
            for t in ts {
                acc = acc.add(evaluate_exact(t, bindings)?);
            }
            Ok(acc)
        }
        Node::Product(fs) => {
            let mut acc = Value::Rational(BigRational::from_integer(1.into()));
            for f in fs {
                acc = acc.mul(evaluate_exact(f, bindings)?);
            }
            Ok(acc)
        }
        Node::Power(b, n) => evaluate_exact(b, bindings)?.pow(*n),
        Node::Exp(a) => {
            let v = evaluate_exact(a, bindings)?;
            Ok(Value::Real(v.to_f64().exp()))
        }
        Node::Ln(a) => {
            let v = evaluate_exact(a, bindings)?;
            let positive = match &v {
                Value::Rational(r) => r.is_positive(),
                Value::Real(x) => *x > 0.0,
            };
            if !positive {
                return Err(ExprError::Domain(format!(
                    "ln of a non-positive value ({})",
                    v.to_f64()
                )));
            }
            Ok(Value::Real(v.to_f64().ln()))
        }
    }
}
