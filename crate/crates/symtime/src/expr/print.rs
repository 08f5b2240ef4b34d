//! Canonical infix printing. `Expr::parse` of the printed form
//! reconstructs a structurally equal expression.

use super::{Expr, Node};
use num_rational::BigRational;
use num_traits::{One, Signed};

fn fmt_rational(r: &BigRational, out: &mut String) {
    out.push_str(&r.numer().to_string());
    if !r.denom().is_one() {
        out.push('/');
        out.push_str(&r.denom().to_string());
    }
}

/// Prints `base^n` with `n > 0` (parenthesizing sum bases; other canonical
/// bases never need parentheses).
fn fmt_base_pow(base: &Expr, n: i64, out: &mut String) {
    debug_assert!(n > 0);
    match &*base.0 {
        Node::Sum(_) => {
            out.push('(');
            fmt_expr(base, out);
            out.push(')');
        }
        _ => fmt_expr(base, out),
    }
    if n != 1 {
        out.push('^');
        out.push_str(&n.to_string());
    }
}

/// Prints a product given by a coefficient and canonical non-constant
/// factors, using `/` for negative-exponent factors.
fn fmt_product_parts(coeff: &BigRational, factors: &[Expr], out: &mut String) {
    let mut numer: Vec<(&Expr, i64)> = Vec::new();
    let mut denom: Vec<(&Expr, i64)> = Vec::new();
    for f in factors {
        match &*f.0 {
            Node::Power(b, n) if *n < 0 => denom.push((b, -(*n as i64))),
            Node::Power(b, n) => numer.push((b, *n as i64)),
            _ => numer.push((f, 1)),
        }
    }

    let mag = coeff.abs();
    if coeff.is_negative() {
        out.push('-');
    }
    let mut wrote_head = false;
    if !mag.is_one() || numer.is_empty() {
        fmt_rational(&mag, out);
        wrote_head = true;
    }
    for (base, n) in numer {
        if wrote_head {
            out.push('*');
        }
        fmt_base_pow(base, n, out);
        wrote_head = true;
    }
    for (base, n) in denom {
        out.push('/');
        fmt_base_pow(base, n, out);
    }
}

fn fmt_expr(e: &Expr, out: &mut String) {
    match &*e.0 {
        Node::Rational(r) => fmt_rational(r, out),
        Node::Symbol(s) => out.push_str(s.name()),
        Node::Exp(a) => {
            out.push_str("exp(");
            fmt_expr(a, out);
            out.push(')');
        }
        Node::Ln(a) => {
            out.push_str("ln(");
            fmt_expr(a, out);
            out.push(')');
        }
        Node::Power(b, n) => {
            if *n < 0 {
                out.push_str("1/");
                fmt_base_pow(b, -(*n as i64), out);
            } else {
                fmt_base_pow(b, *n as i64, out);
            }
        }
        Node::Product(fs) => {
            if let Node::Rational(c) = &*fs[0].0 {
                fmt_product_parts(c, &fs[1..], out);
            } else {
                fmt_product_parts(&BigRational::one(), fs, out);
            }
        }
        Node::Sum(ts) => {
            // Terms are never sums themselves, so no parentheses needed.
            for (i, t) in ts.iter().enumerate() {
                let (c, _) = super::split_coeff(t);
                if i == 0 {
                    fmt_expr(t, out);
                } else if c.is_negative() {
                    out.push_str(" - ");
                    fmt_expr(&t.neg(), out);
                } else {
                    out.push_str(" + ");
                    fmt_expr(t, out);
                }
            }
        }
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = String::new();
        fmt_expr(self, &mut s);
        f.write_str(&s)
    }
}
