//! Exact symbolic expression kernel.
//!
//! [`Expr`] is an immutable tree over exact rational constants and named
//! symbols, with n-ary sums and products, integer powers, and `exp`/`ln`
//! nodes. Every constructor canonicalizes its result, so `==` compares
//! canonical forms structurally:
//!
//! * sums and products are flattened n-ary and sorted by a fixed total
//!   order, constants first;
//! * rational constants fold exactly (lowest terms, positive denominator);
//! * like sum terms merge coefficients, like product factors merge
//!   exponents;
//! * identity elements vanish (`x + 0`, `1 * x`, `x^1`, `x^0`);
//! * a rational coefficient times a lone sum distributes over the sum;
//! * a sum used as a product factor or power base is primitive: the
//!   rational gcd of its coefficients and its leading sign move into the
//!   enclosing coefficient;
//! * powers of products distribute, powers of powers multiply exponents,
//!   powers of rationals fold.
//!
//! Division is represented as multiplication by a negative power; there is
//! no quotient node. No polynomial GCD cancellation is performed and no
//! `exp`/`ln` identities are applied: structural equality is sound for
//! evaluation (equal forms evaluate equal) but deliberately not complete
//! for mathematical equivalence.

mod eval;
mod parse;
mod print;

pub use eval::{evaluate_exact, Value};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// Errors from building, parsing, substituting, or evaluating expressions.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid symbol name `{0}`")]
    InvalidSymbol(String),
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error at column {col}: {reason}")]
    Parse { col: usize, reason: String },
    #[error("integer exponent overflow")]
    ExponentOverflow,
}

/// An interned symbol name. Names are unique per session: two symbols are
/// the same symbol iff their names are equal.
///
/// Valid names match `[A-Za-z_][A-Za-z0-9_]*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    /// Creates a symbol, validating the name shape.
    pub fn new(name: &str) -> Result<Symbol, ExprError> {
        let mut chars = name.chars();
        let head_ok = chars
            .next()
            .map(|c| c.is_ascii_alphabetic() || c == '_')
            .unwrap_or(false);
        if head_ok && chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
            Ok(Symbol(Arc::from(name)))
        } else {
            Err(ExprError::InvalidSymbol(name.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Canonical node. Private: invariants are maintained by the constructors.
///
/// Invariants:
/// * `Sum`: >= 2 terms; no nested `Sum`; at most one `Rational`, first; the
///   remaining terms have pairwise distinct skeletons (term stripped of its
///   rational coefficient) and are sorted by skeleton; no zero coefficients.
/// * `Product`: >= 2 factors; at most one `Rational` (the coefficient,
///   first, never 0 or 1); no nested `Product`; non-coefficient factors
///   have pairwise distinct bases, sorted; never exactly
///   `[coefficient, Sum]` (distributed instead).
/// * `Power`: exponent not 0 or 1; base is `Symbol`, `Sum`, `Exp`, or `Ln`
///   (rational bases fold, product bases distribute, power bases merge).
/// * A `Sum` in factor or power-base position is content-free with a
///   positive leading coefficient: the rational gcd of its coefficients and
///   the sign of its first term are pulled out into the enclosing product.
///   This keeps canonicalization associativity-stable — `2*(x - 1)` and
///   `(2*x - 2)` meet in one form when multiplied by further factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    Rational(BigRational),
    Symbol(Symbol),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Expr, i32),
    Exp(Expr),
    Ln(Expr),
}

/// An immutable expression in canonical form. Cheap to clone (shared
/// subtrees via `Arc`); `==` is structural equality of canonical forms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Expr(Arc<Node>);

/// Read-only structural view of a canonical expression, for consumers that
/// need to walk the tree without being able to break its invariants.
#[derive(Debug, Clone, Copy)]
pub enum ExprView<'a> {
    Rational(&'a BigRational),
    Symbol(&'a Symbol),
    Sum(&'a [Expr]),
    Product(&'a [Expr]),
    Power(&'a Expr, i32),
    Exp(&'a Expr),
    Ln(&'a Expr),
}

fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact `r^n` for integer `n`; errors on `0^negative`.
fn rational_pow(r: &BigRational, n: i32) -> Result<BigRational, ExprError> {
    if n == 0 {
        return Ok(BigRational::one());
    }
    if r.is_zero() && n < 0 {
        return Err(ExprError::DivisionByZero);
    }
    let e = n.unsigned_abs();
    let num = r.numer().pow(e);
    let den = r.denom().pow(e);
    // Ratio::new normalizes sign and lowest terms.
    Ok(if n > 0 {
        BigRational::new(num, den)
    } else {
        BigRational::new(den, num)
    })
}

impl Expr {
    // ----- leaf constructors -------------------------------------------

    /// Integer constant.
    pub fn int(n: i64) -> Expr {
        Expr(Arc::new(Node::Rational(rat_int(n))))
    }

    /// Exact rational constant `p/q`; errors when `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Result<Expr, ExprError> {
        if q == 0 {
            return Err(ExprError::ZeroDenominator);
        }
        Ok(Expr::rational(BigRational::new(BigInt::from(p), BigInt::from(q))))
    }

    /// Exact rational constant.
    pub fn rational(r: BigRational) -> Expr {
        Expr(Arc::new(Node::Rational(r)))
    }

    /// Symbol reference.
    pub fn symbol(s: &Symbol) -> Expr {
        Expr(Arc::new(Node::Symbol(s.clone())))
    }

    /// Convenience: symbol reference from a name string.
    pub fn sym(name: &str) -> Result<Expr, ExprError> {
        Ok(Expr::symbol(&Symbol::new(name)?))
    }

    // ----- canonicalizing combinators ----------------------------------

    /// Canonical n-ary sum of `terms`.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        make_sum(terms.into_iter().collect())
    }

    /// Canonical n-ary product of `factors`.
    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        make_product(factors.into_iter().collect())
    }

    /// Canonical integer power; errors on a zero rational base with a
    /// negative exponent. `x^0` folds to 1 (including `0^0`, by the usual
    /// empty-product convention).
    pub fn power(base: Expr, exponent: i32) -> Result<Expr, ExprError> {
        make_power(base, exponent)
    }

    /// `exp(arg)`; kept opaque (no identities applied).
    pub fn exp(arg: Expr) -> Expr {
        Expr(Arc::new(Node::Exp(arg)))
    }

    /// `ln(arg)`; kept opaque (no identities applied, domain checked only
    /// at evaluation).
    pub fn ln(arg: Expr) -> Expr {
        Expr(Arc::new(Node::Ln(arg)))
    }

    /// Negation.
    pub fn neg(&self) -> Expr {
        make_product(vec![Expr::int(-1), self.clone()])
    }

    /// `a - b`.
    pub fn sub(a: Expr, b: Expr) -> Expr {
        make_sum(vec![a, b.neg()])
    }

    /// `a / b`; errors when `b` is the rational zero.
    pub fn div(a: Expr, b: Expr) -> Result<Expr, ExprError> {
        Ok(make_product(vec![a, make_power(b, -1)?]))
    }

    // ----- inspection ---------------------------------------------------

    pub fn view(&self) -> ExprView<'_> {
        match &*self.0 {
            Node::Rational(r) => ExprView::Rational(r),
            Node::Symbol(s) => ExprView::Symbol(s),
            Node::Sum(ts) => ExprView::Sum(ts),
            Node::Product(fs) => ExprView::Product(fs),
            Node::Power(b, n) => ExprView::Power(b, *n),
            Node::Exp(a) => ExprView::Exp(a),
            Node::Ln(a) => ExprView::Ln(a),
        }
    }

    /// The constant value when the expression is a plain rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &*self.0 {
            Node::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&*self.0, Node::Rational(r) if r.is_zero())
    }

    /// All symbols occurring in the expression, sorted by name.
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match &*self.0 {
            Node::Rational(_) => {}
            Node::Symbol(s) => {
                out.insert(s.clone());
            }
            Node::Sum(es) | Node::Product(es) => {
                for e in es {
                    e.collect_symbols(out);
                }
            }
            Node::Power(b, _) => b.collect_symbols(out),
            Node::Exp(a) | Node::Ln(a) => a.collect_symbols(out),
        }
    }

    /// Whether the expression contains `exp` or `ln` anywhere.
    pub fn has_transcendental(&self) -> bool {
        match &*self.0 {
            Node::Rational(_) | Node::Symbol(_) => false,
            Node::Sum(es) | Node::Product(es) => es.iter().any(Expr::has_transcendental),
            Node::Power(b, _) => b.has_transcendental(),
            Node::Exp(_) | Node::Ln(_) => true,
        }
    }

    /// Structural containment of `needle` in `self`, modulo canonical
    /// flattening: an exact subtree match counts, and a sum counts as
    /// contained in a wider sum when each of its terms matches a term with
    /// the same skeleton and a same-signed coefficient of at least the same
    /// magnitude (flattening merges nested sums, so `(a + b) + c` keeps
    /// `a + b` "contained" only in this sense).
    pub fn contains(&self, needle: &Expr) -> bool {
        if self == needle {
            return true;
        }
        if let (Node::Sum(outer), Node::Sum(inner)) = (&*self.0, &*needle.0) {
            if sum_covers(outer, inner) {
                return true;
            }
        }
        match &*self.0 {
            Node::Rational(_) | Node::Symbol(_) => false,
            Node::Sum(es) | Node::Product(es) => es.iter().any(|e| e.contains(needle)),
            Node::Power(b, _) => b.contains(needle),
            Node::Exp(a) | Node::Ln(a) => a.contains(needle),
        }
    }

    /// Simultaneous substitution of symbols by expressions. Errors only
    /// when a replacement makes a subterm undefined (e.g. `x^-1` with
    /// `x -> 0`).
    pub fn substitute(&self, map: &BTreeMap<Symbol, Expr>) -> Result<Expr, ExprError> {
        match &*self.0 {
            Node::Rational(_) => Ok(self.clone()),
            Node::Symbol(s) => Ok(map.get(s).cloned().unwrap_or_else(|| self.clone())),
            Node::Sum(ts) => {
                let ts = ts
                    .iter()
                    .map(|t| t.substitute(map))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(make_sum(ts))
            }
            Node::Product(fs) => {
                let fs = fs
                    .iter()
                    .map(|f| f.substitute(map))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(make_product(fs))
            }
            Node::Power(b, n) => make_power(b.substitute(map)?, *n),
            Node::Exp(a) => Ok(Expr::exp(a.substitute(map)?)),
            Node::Ln(a) => Ok(Expr::ln(a.substitute(map)?)),
        }
    }

    /// Exact partial derivative with respect to `wrt`.
    pub fn differentiate(&self, wrt: &Symbol) -> Expr {
        match &*self.0 {
            Node::Rational(_) => Expr::int(0),
            Node::Symbol(s) => Expr::int(if s == wrt { 1 } else { 0 }),
            Node::Sum(ts) => make_sum(ts.iter().map(|t| t.differentiate(wrt)).collect()),
            Node::Product(fs) => {
                // Product rule: sum over i of f_i' * prod_{j != i} f_j.
                let mut terms = Vec::new();
                for (i, f) in fs.iter().enumerate() {
                    let df = f.differentiate(wrt);
                    if df.is_zero() {
                        continue;
                    }
                    let mut factors = vec![df];
                    for (j, g) in fs.iter().enumerate() {
                        if j != i {
                            factors.push(g.clone());
                        }
                    }
                    terms.push(make_product(factors));
                }
                make_sum(terms)
            }
            Node::Power(b, n) => {
                let db = b.differentiate(wrt);
                if db.is_zero() {
                    return Expr::int(0);
                }
                // n * b^(n-1) * b'. The base of a canonical power is never
                // rational, so rebuilding the power cannot fail.
                let lowered = make_power(b.clone(), n - 1)
                    .expect("canonical power base is not rational");
                make_product(vec![Expr::int(*n as i64), lowered, db])
            }
            Node::Exp(a) => {
                let da = a.differentiate(wrt);
                if da.is_zero() {
                    return Expr::int(0);
                }
                make_product(vec![Expr::exp(a.clone()), da])
            }
            Node::Ln(a) => {
                let da = a.differentiate(wrt);
                if da.is_zero() {
                    // Covers ln(constant) without ever building 1/0.
                    return Expr::int(0);
                }
                let inv = make_power(a.clone(), -1)
                    .expect("ln argument with a nonzero derivative is not a rational constant");
                make_product(vec![da, inv])
            }
        }
    }

    /// Parses the canonical infix syntax (`+ - * / ^ exp() ln()`, integer
    /// and `p/q` literals, parentheses).
    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        parse::parse_expr(text)
    }
}

// ----- total order -------------------------------------------------------

fn rank(n: &Node) -> u8 {
    match n {
        Node::Rational(_) => 0,
        Node::Symbol(_) => 1,
        Node::Power(..) => 2,
        Node::Exp(_) => 3,
        Node::Ln(_) => 4,
        Node::Product(_) => 5,
        Node::Sum(_) => 6,
    }
}

fn cmp_slices(a: &[Expr], b: &[Expr]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let o = cmp_expr(x, y);
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Fixed total order on canonical expressions: constants first, then by
/// node kind, symbols lexicographically by name, composites recursively.
fn cmp_expr(a: &Expr, b: &Expr) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let (na, nb) = (&*a.0, &*b.0);
    match rank(na).cmp(&rank(nb)) {
        Ordering::Equal => {}
        o => return o,
    }
    match (na, nb) {
        (Node::Rational(x), Node::Rational(y)) => x.cmp(y),
        (Node::Symbol(x), Node::Symbol(y)) => x.cmp(y),
        (Node::Power(bx, nx), Node::Power(by, ny)) => {
            cmp_expr(bx, by).then(nx.cmp(ny))
        }
        (Node::Exp(x), Node::Exp(y)) | (Node::Ln(x), Node::Ln(y)) => cmp_expr(x, y),
        (Node::Product(xs), Node::Product(ys)) | (Node::Sum(xs), Node::Sum(ys)) => {
            cmp_slices(xs, ys)
        }
        _ => unreachable!("rank already distinguished the variants"),
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(cmp_expr(self, other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        cmp_expr(self, other)
    }
}

// ----- canonicalization --------------------------------------------------

/// Splits a canonical term into (rational coefficient, skeleton). The
/// skeleton is `None` for plain constants; otherwise the term with its
/// coefficient stripped.
fn split_coeff(e: &Expr) -> (BigRational, Option<Expr>) {
    match &*e.0 {
        Node::Rational(r) => (r.clone(), None),
        Node::Product(fs) => {
            if let Node::Rational(r) = &*fs[0].0 {
                let rest = &fs[1..];
                let skel = if rest.len() == 1 {
                    rest[0].clone()
                } else {
                    Expr(Arc::new(Node::Product(rest.to_vec())))
                };
                (r.clone(), Some(skel))
            } else {
                (BigRational::one(), Some(e.clone()))
            }
        }
        _ => (BigRational::one(), Some(e.clone())),
    }
}

/// Reattaches a nonzero coefficient to a skeleton.
fn scale(skel: Expr, c: BigRational) -> Expr {
    debug_assert!(!c.is_zero());
    if c.is_one() {
        return skel;
    }
    match &*skel.0 {
        Node::Product(fs) => {
            let mut v = Vec::with_capacity(fs.len() + 1);
            v.push(Expr::rational(c));
            v.extend(fs.iter().cloned());
            Expr(Arc::new(Node::Product(v)))
        }
        // A skeleton is never a Sum (sums are flattened before splitting)
        // and never a Rational, so a two-factor product is canonical.
        _ => Expr(Arc::new(Node::Product(vec![Expr::rational(c), skel]))),
    }
}

/// `gcd(p1/q1, p2/q2) = gcd(p1, p2) / lcm(q1, q2)`, non-negative; the
/// unique largest rational dividing both into integers.
fn rational_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    BigRational::new(a.numer().gcd(b.numer()), a.denom().lcm(b.denom()))
}

/// The signed content of a canonical sum: the rational gcd of its term
/// coefficients, carrying the sign of the first term. Dividing the sum by
/// its signed content yields the primitive form (coprime coefficients,
/// positive leading term) required of sums in factor/base position.
fn sum_signed_content(terms: &[Expr]) -> BigRational {
    let mut content = BigRational::zero();
    for t in terms {
        content = rational_gcd(&content, &split_coeff(t).0);
    }
    if split_coeff(&terms[0]).0.is_negative() {
        -content
    } else {
        content
    }
}

/// Divides every coefficient of a canonical sum by a nonzero rational.
/// Skeleton order is unchanged, so the result is still canonical.
fn divide_sum_terms(terms: &[Expr], d: &BigRational) -> Vec<Expr> {
    terms
        .iter()
        .map(|t| {
            let (c, skel) = split_coeff(t);
            let c = c / d;
            match skel {
                None => Expr::rational(c),
                Some(s) => scale(s, c),
            }
        })
        .collect()
}

fn make_sum(terms: Vec<Expr>) -> Expr {
    let mut constant = BigRational::zero();
    // BTreeMap keyed by skeleton gives the sorted, like-term-merged form.
    let mut by_skel: BTreeMap<Expr, BigRational> = BTreeMap::new();

    let mut stack: Vec<Expr> = terms;
    stack.reverse();
    while let Some(t) = stack.pop() {
        if let Node::Sum(inner) = &*t.0 {
            for e in inner.iter().rev() {
                stack.push(e.clone());
            }
            continue;
        }
        let (c, skel) = split_coeff(&t);
        match skel {
            None => constant += c,
            Some(s) => {
                let slot = by_skel.entry(s).or_insert_with(BigRational::zero);
                *slot += c;
            }
        }
    }

    let mut out: Vec<Expr> = Vec::new();
    if !constant.is_zero() {
        out.push(Expr::rational(constant));
    }
    for (skel, c) in by_skel {
        if !c.is_zero() {
            out.push(scale(skel, c));
        }
    }
    match out.len() {
        0 => Expr::int(0),
        1 => out.pop().unwrap(),
        _ => Expr(Arc::new(Node::Sum(out))),
    }
}

fn make_product(factors: Vec<Expr>) -> Expr {
    let mut coeff = BigRational::one();
    // base -> accumulated exponent, sorted by base.
    let mut by_base: BTreeMap<Expr, i64> = BTreeMap::new();

    let mut stack: Vec<Expr> = factors;
    stack.reverse();
    while let Some(f) = stack.pop() {
        match &*f.0 {
            Node::Product(inner) => {
                for e in inner.iter().rev() {
                    stack.push(e.clone());
                }
            }
            Node::Rational(r) => coeff *= r,
            Node::Power(b, n) => *by_base.entry(b.clone()).or_insert(0) += *n as i64,
            Node::Sum(ts) => {
                // Keep sum factors primitive (see Node invariants): pull the
                // signed content out into the product coefficient.
                let c = sum_signed_content(ts);
                if c.is_one() {
                    *by_base.entry(f.clone()).or_insert(0) += 1;
                } else {
                    let core = Expr(Arc::new(Node::Sum(divide_sum_terms(ts, &c))));
                    coeff *= c;
                    *by_base.entry(core).or_insert(0) += 1;
                }
            }
            _ => *by_base.entry(f.clone()).or_insert(0) += 1,
        }
    }

    if coeff.is_zero() {
        return Expr::int(0);
    }

    let mut fs: Vec<Expr> = Vec::new();
    for (base, n) in by_base {
        if n == 0 {
            continue; // x * x^-1 cancels structurally
        }
        if n == 1 {
            fs.push(base);
        } else {
            let n32 = i32::try_from(n).expect("merged exponents stay small");
            fs.push(Expr(Arc::new(Node::Power(base, n32))));
        }
    }

    if fs.is_empty() {
        return Expr::rational(coeff);
    }
    if coeff.is_one() {
        return if fs.len() == 1 {
            fs.pop().unwrap()
        } else {
            Expr(Arc::new(Node::Product(fs)))
        };
    }
    // coefficient != 1 here
    if fs.len() == 1 {
        if let Node::Sum(ts) = &*fs[0].0 {
            // Distribute a rational coefficient over a lone sum so that
            // c*(a + b) and c*a + c*b share one canonical form.
            let scaled = ts
                .iter()
                .map(|t| make_product(vec![Expr::rational(coeff.clone()), t.clone()]))
                .collect();
            return make_sum(scaled);
        }
    }
    let mut v = Vec::with_capacity(fs.len() + 1);
    v.push(Expr::rational(coeff));
    v.extend(fs);
    Expr(Arc::new(Node::Product(v)))
}

fn make_power(base: Expr, n: i32) -> Result<Expr, ExprError> {
    if n == 0 {
        return Ok(Expr::int(1));
    }
    if n == 1 {
        return Ok(base);
    }
    match &*base.0 {
        Node::Rational(r) => Ok(Expr::rational(rational_pow(r, n)?)),
        Node::Power(b, m) => {
            let combined = m.checked_mul(n).ok_or(ExprError::ExponentOverflow)?;
            make_power(b.clone(), combined)
        }
        Node::Product(fs) => {
            let raised = fs
                .iter()
                .map(|f| make_power(f.clone(), n))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(make_product(raised))
        }
        Node::Sum(ts) => {
            // Same primitivity normalization as in products: the signed
            // content folds to a rational factor `content^n`.
            let c = sum_signed_content(ts);
            if c.is_one() {
                Ok(Expr(Arc::new(Node::Power(base, n))))
            } else {
                let core = Expr(Arc::new(Node::Sum(divide_sum_terms(ts, &c))));
                let folded = rational_pow(&c, n)?;
                Ok(make_product(vec![
                    Expr::rational(folded),
                    Expr(Arc::new(Node::Power(core, n))),
                ]))
            }
        }
        _ => Ok(Expr(Arc::new(Node::Power(base, n)))),
    }
}

/// True when every term of `inner` is covered by a term of `outer` with the
/// same skeleton and a same-signed coefficient of at least the magnitude.
fn sum_covers(outer: &[Expr], inner: &[Expr]) -> bool {
    let outer_split: Vec<(BigRational, Option<Expr>)> = outer.iter().map(split_coeff).collect();
    inner.iter().all(|t| {
        let (ci, si) = split_coeff(t);
        outer_split.iter().any(|(co, so)| {
            *so == si
                && co.is_positive() == ci.is_positive()
                && co.abs() >= ci.abs()
        })
    })
}

// ----- operator sugar ------------------------------------------------------

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        make_sum(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        make_product(vec![self, rhs])
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}
