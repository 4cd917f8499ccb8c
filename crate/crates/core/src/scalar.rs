//! Scalar functions of the radial coordinate with exact derivatives.
//!
//! A [`RadialScalar`] is a small expression tree in the variable `r`. The
//! derivative is produced symbolically, so derivatives of every order are
//! available and exact up to floating point rounding. Profiles that are only
//! known implicitly (roots of a transcendental equation, Lambert W) enter as
//! [`RadialScalar::implicit`] leaves that supply their own derivative as an
//! expression, usually one that refers back to the leaf itself.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Interval of the radial coordinate: `[lo, hi)` or `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
}

impl Domain {
    pub const ALL: Domain = Domain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        lo_open: true,
    };

    /// `[lo, ∞)`
    pub fn closed_from(lo: f64) -> Self {
        Domain {
            lo,
            hi: f64::INFINITY,
            lo_open: false,
        }
    }

    /// `(lo, ∞)`
    pub fn open_from(lo: f64) -> Self {
        Domain {
            lo,
            hi: f64::INFINITY,
            lo_open: true,
        }
    }

    pub fn contains(&self, r: f64) -> bool {
        let above = if self.lo_open { r > self.lo } else { r >= self.lo };
        above && r < self.hi
    }

    pub fn contains_interior(&self, r: f64) -> bool {
        r > self.lo && r < self.hi
    }

    pub fn intersect(&self, other: &Domain) -> Domain {
        let (lo, lo_open) = if self.lo > other.lo {
            (self.lo, self.lo_open)
        } else if other.lo > self.lo {
            (other.lo, other.lo_open)
        } else {
            (self.lo, self.lo_open || other.lo_open)
        };
        Domain {
            lo,
            hi: self.hi.min(other.hi),
            lo_open,
        }
    }

    pub fn check(&self, r: f64) -> Result<()> {
        if self.contains(r) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                r,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_open { '(' } else { '[' };
        write!(f, "{open}{}, {})", self.lo, self.hi)
    }
}

type ValueFn = dyn Fn(f64) -> f64 + Send + Sync;
type DerivativeFn = dyn Fn(&RadialScalar) -> RadialScalar + Send + Sync;

/// Leaf whose value is computed numerically and whose derivative is given
/// as an expression in terms of the leaf itself.
pub struct Implicit {
    name: String,
    value: Box<ValueFn>,
    derivative: Box<DerivativeFn>,
}

enum Node {
    Const(f64),
    Var,
    Add(RadialScalar, RadialScalar),
    Mul(RadialScalar, RadialScalar),
    Div(RadialScalar, RadialScalar),
    Neg(RadialScalar),
    Powi(RadialScalar, i32),
    Sqrt(RadialScalar),
    Exp(RadialScalar),
    Ln(RadialScalar),
    Sin(RadialScalar),
    Cos(RadialScalar),
    Implicit(Arc<Implicit>),
}

/// A real function of `r` with a domain and an exact symbolic derivative.
#[derive(Clone)]
pub struct RadialScalar {
    node: Arc<Node>,
    domain: Domain,
}

impl RadialScalar {
    fn from_node(node: Node, domain: Domain) -> Self {
        RadialScalar {
            node: Arc::new(node),
            domain,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_node(Node::Const(c), Domain::ALL)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// The coordinate function `r ↦ r`.
    pub fn r() -> Self {
        Self::from_node(Node::Var, Domain::ALL)
    }

    /// `Σ coeffs[k] r^k`, Horner form.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        let r = Self::r();
        coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, &c| acc * &r + c)
    }

    /// Numerically evaluated leaf. `derivative` receives the leaf itself and
    /// returns its derivative expression.
    pub fn implicit<V, D>(name: impl Into<String>, domain: Domain, value: V, derivative: D) -> Self
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(&RadialScalar) -> RadialScalar + Send + Sync + 'static,
    {
        let leaf = Implicit {
            name: name.into(),
            value: Box::new(value),
            derivative: Box::new(derivative),
        };
        Self::from_node(Node::Implicit(Arc::new(leaf)), domain)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Restricts the domain without touching the expression.
    pub fn on(mut self, domain: Domain) -> Self {
        self.domain = self.domain.intersect(&domain);
        self
    }

    /// Literal zero (after constant folding). Numerically vanishing
    /// expressions are not detected.
    pub fn is_zero(&self) -> bool {
        matches!(*self.node, Node::Const(c) if c == 0.0)
    }

    pub fn as_constant(&self) -> Option<f64> {
        match *self.node {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Evaluates at `r`, checking the domain.
    pub fn value(&self, r: f64) -> Result<f64> {
        self.domain.check(r)?;
        Ok(self.at(r))
    }

    /// Evaluates at `r` without a domain check.
    pub fn at(&self, r: f64) -> f64 {
        match &*self.node {
            Node::Const(c) => *c,
            Node::Var => r,
            Node::Add(a, b) => a.at(r) + b.at(r),
            Node::Mul(a, b) => a.at(r) * b.at(r),
            Node::Div(a, b) => a.at(r) / b.at(r),
            Node::Neg(a) => -a.at(r),
            Node::Powi(a, n) => a.at(r).powi(*n),
            Node::Sqrt(a) => a.at(r).sqrt(),
            Node::Exp(a) => a.at(r).exp(),
            Node::Ln(a) => a.at(r).ln(),
            Node::Sin(a) => a.at(r).sin(),
            Node::Cos(a) => a.at(r).cos(),
            Node::Implicit(leaf) => (leaf.value)(r),
        }
    }

    /// Value of the first derivative at `r`, domain checked.
    pub fn derivative_at(&self, r: f64) -> Result<f64> {
        self.domain.check(r)?;
        Ok(self.derivative().at(r))
    }

    /// Exact derivative with respect to `r`.
    pub fn derivative(&self) -> RadialScalar {
        let d = match &*self.node {
            Node::Const(_) => Self::zero(),
            Node::Var => Self::one(),
            Node::Add(a, b) => a.derivative() + b.derivative(),
            Node::Mul(a, b) => a.derivative() * b + a * b.derivative(),
            Node::Div(a, b) => {
                (a.derivative() * b - a * b.derivative()) / b.clone().powi(2)
            }
            Node::Neg(a) => -a.derivative(),
            Node::Powi(a, n) => {
                let n = *n;
                a.derivative() * a.clone().powi(n - 1) * n as f64
            }
            Node::Sqrt(a) => a.derivative() / (self.clone() * 2.0),
            Node::Exp(a) => a.derivative() * self,
            Node::Ln(a) => a.derivative() / a,
            Node::Sin(a) => a.derivative() * a.clone().cos(),
            Node::Cos(a) => -(a.derivative() * a.clone().sin()),
            Node::Implicit(leaf) => (leaf.derivative)(self),
        };
        d.on(self.domain)
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => return Self::one().on(self.domain),
            1 => return self,
            _ => {}
        }
        if let Some(c) = self.as_constant() {
            return Self::constant(c.powi(n));
        }
        let domain = self.domain;
        Self::from_node(Node::Powi(self, n), domain)
    }

    pub fn sqrt(self) -> Self {
        self.unary(Node::Sqrt, f64::sqrt)
    }

    pub fn exp(self) -> Self {
        self.unary(Node::Exp, f64::exp)
    }

    pub fn ln(self) -> Self {
        self.unary(Node::Ln, f64::ln)
    }

    pub fn sin(self) -> Self {
        self.unary(Node::Sin, f64::sin)
    }

    pub fn cos(self) -> Self {
        self.unary(Node::Cos, f64::cos)
    }

    fn unary(self, make: fn(RadialScalar) -> Node, fold: fn(f64) -> f64) -> Self {
        if let Some(c) = self.as_constant() {
            return Self::constant(fold(c));
        }
        let domain = self.domain;
        Self::from_node(make(self), domain)
    }

    /// Composition `self ∘ inner`: substitutes `inner` for `r`.
    ///
    /// Implicit leaves are wrapped rather than rewritten, so their derivative
    /// is recovered through the chain rule.
    pub fn compose(&self, inner: &RadialScalar) -> RadialScalar {
        let out = match &*self.node {
            Node::Const(c) => Self::constant(*c),
            Node::Var => inner.clone(),
            Node::Add(a, b) => a.compose(inner) + b.compose(inner),
            Node::Mul(a, b) => a.compose(inner) * b.compose(inner),
            Node::Div(a, b) => a.compose(inner) / b.compose(inner),
            Node::Neg(a) => -a.compose(inner),
            Node::Powi(a, n) => a.compose(inner).powi(*n),
            Node::Sqrt(a) => a.compose(inner).sqrt(),
            Node::Exp(a) => a.compose(inner).exp(),
            Node::Ln(a) => a.compose(inner).ln(),
            Node::Sin(a) => a.compose(inner).sin(),
            Node::Cos(a) => a.compose(inner).cos(),
            Node::Implicit(_) => {
                let outer = self.clone();
                let g = inner.clone();
                let name = format!("{self:?}∘(..)");
                let value_outer = outer.clone();
                let value_inner = g.clone();
                return RadialScalar::implicit(
                    name,
                    inner.domain,
                    move |r| value_outer.at(value_inner.at(r)),
                    move |_| outer.derivative().compose(&g) * g.derivative(),
                );
            }
        };
        out.on(inner.domain)
    }

    /// Number of nodes in the tree, counting shared subtrees each time.
    pub fn size(&self) -> usize {
        match &*self.node {
            Node::Const(_) | Node::Var | Node::Implicit(_) => 1,
            Node::Add(a, b) | Node::Mul(a, b) | Node::Div(a, b) => 1 + a.size() + b.size(),
            Node::Neg(a)
            | Node::Powi(a, _)
            | Node::Sqrt(a)
            | Node::Exp(a)
            | Node::Ln(a)
            | Node::Sin(a)
            | Node::Cos(a) => 1 + a.size(),
        }
    }
}

impl fmt::Debug for RadialScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.node {
            Node::Const(c) => write!(f, "{c}"),
            Node::Var => write!(f, "r"),
            Node::Add(a, b) => write!(f, "({a:?} + {b:?})"),
            Node::Mul(a, b) => write!(f, "{a:?}*{b:?}"),
            Node::Div(a, b) => write!(f, "{a:?}/({b:?})"),
            Node::Neg(a) => write!(f, "-{a:?}"),
            Node::Powi(a, n) => write!(f, "({a:?})^{n}"),
            Node::Sqrt(a) => write!(f, "sqrt({a:?})"),
            Node::Exp(a) => write!(f, "exp({a:?})"),
            Node::Ln(a) => write!(f, "ln({a:?})"),
            Node::Sin(a) => write!(f, "sin({a:?})"),
            Node::Cos(a) => write!(f, "cos({a:?})"),
            Node::Implicit(leaf) => write!(f, "{}", leaf.name),
        }
    }
}

impl From<f64> for RadialScalar {
    fn from(c: f64) -> Self {
        RadialScalar::constant(c)
    }
}

fn add(a: RadialScalar, b: RadialScalar) -> RadialScalar {
    let domain = a.domain.intersect(&b.domain);
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => RadialScalar::constant(x + y),
        (Some(x), _) if x == 0.0 => b.on(domain),
        (_, Some(y)) if y == 0.0 => a.on(domain),
        _ => RadialScalar::from_node(Node::Add(a, b), domain),
    }
}

fn mul(a: RadialScalar, b: RadialScalar) -> RadialScalar {
    let domain = a.domain.intersect(&b.domain);
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => RadialScalar::constant(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => RadialScalar::zero(),
        (Some(x), _) if x == 1.0 => b.on(domain),
        (_, Some(y)) if y == 1.0 => a.on(domain),
        (Some(x), _) if x == -1.0 => -b.on(domain),
        (_, Some(y)) if y == -1.0 => -a.on(domain),
        _ => RadialScalar::from_node(Node::Mul(a, b), domain),
    }
}

fn div(a: RadialScalar, b: RadialScalar) -> RadialScalar {
    let domain = a.domain.intersect(&b.domain);
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => RadialScalar::constant(x / y),
        (Some(x), _) if x == 0.0 => RadialScalar::zero(),
        (_, Some(y)) if y == 1.0 => a.on(domain),
        _ => RadialScalar::from_node(Node::Div(a, b), domain),
    }
}

impl Neg for RadialScalar {
    type Output = RadialScalar;
    fn neg(self) -> RadialScalar {
        if let Some(c) = self.as_constant() {
            return RadialScalar::constant(-c);
        }
        if let Node::Neg(inner) = &*self.node {
            return inner.clone().on(self.domain);
        }
        let domain = self.domain;
        RadialScalar::from_node(Node::Neg(self), domain)
    }
}

impl Neg for &RadialScalar {
    type Output = RadialScalar;
    fn neg(self) -> RadialScalar {
        -self.clone()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<RadialScalar> for RadialScalar {
            type Output = RadialScalar;
            fn $method(self, rhs: RadialScalar) -> RadialScalar {
                $body(self, rhs)
            }
        }
        impl $trait<&RadialScalar> for RadialScalar {
            type Output = RadialScalar;
            fn $method(self, rhs: &RadialScalar) -> RadialScalar {
                $body(self, rhs.clone())
            }
        }
        impl $trait<RadialScalar> for &RadialScalar {
            type Output = RadialScalar;
            fn $method(self, rhs: RadialScalar) -> RadialScalar {
                $body(self.clone(), rhs)
            }
        }
        impl $trait<&RadialScalar> for &RadialScalar {
            type Output = RadialScalar;
            fn $method(self, rhs: &RadialScalar) -> RadialScalar {
                $body(self.clone(), rhs.clone())
            }
        }
        impl $trait<f64> for RadialScalar {
            type Output = RadialScalar;
            fn $method(self, rhs: f64) -> RadialScalar {
                $body(self, RadialScalar::constant(rhs))
            }
        }
        impl $trait<f64> for &RadialScalar {
            type Output = RadialScalar;
            fn $method(self, rhs: f64) -> RadialScalar {
                $body(self.clone(), RadialScalar::constant(rhs))
            }
        }
        impl $trait<RadialScalar> for f64 {
            type Output = RadialScalar;
            fn $method(self, rhs: RadialScalar) -> RadialScalar {
                $body(RadialScalar::constant(self), rhs)
            }
        }
        impl $trait<&RadialScalar> for f64 {
            type Output = RadialScalar;
            fn $method(self, rhs: &RadialScalar) -> RadialScalar {
                $body(RadialScalar::constant(self), rhs.clone())
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, |a, b: RadialScalar| add(a, -b));
binop!(Mul, mul, mul);
binop!(Div, div, div);

#[cfg(test)]
mod tests {
    use super::*;

    fn central_difference(s: &RadialScalar, r: f64, h: f64) -> f64 {
        (s.at(r + h) - s.at(r - h)) / (2.0 * h)
    }

    #[test]
    fn polynomial_derivative_is_exact() {
        let p = RadialScalar::polynomial(&[1.0, -2.0, 0.0, 3.0]);
        assert_eq!(p.at(2.0), 1.0 - 4.0 + 24.0);
        assert_eq!(p.derivative().at(2.0), -2.0 + 36.0);
        assert_eq!(p.derivative().derivative().at(2.0), 36.0);
    }

    #[test]
    fn finite_differences_agree_to_second_order() {
        let r = RadialScalar::r();
        let s = (r.clone() * r.clone() - 1.0).sqrt() * r.clone().sin().exp() / (r.clone() + 3.0);
        let x = 1.7;
        let exact = s.derivative().at(x);
        let e1 = (central_difference(&s, x, 1e-2) - exact).abs();
        let e2 = (central_difference(&s, x, 5e-3) - exact).abs();
        assert!(e1 < 1e-3);
        // halving h divides the error by ~4
        assert!((e1 / e2 - 4.0).abs() < 0.2, "ratio {}", e1 / e2);
    }

    #[test]
    fn product_rule() {
        let r = RadialScalar::r();
        let f = r.clone().powi(3) + r.clone().ln();
        let g = (r.clone() * 0.5).cos();
        let lhs = (&f * &g).derivative();
        let rhs = f.derivative() * &g + &f * g.derivative();
        for x in [0.5, 1.0, 3.0, 10.0] {
            assert!((lhs.at(x) - rhs.at(x)).abs() < 1e-12 * (1.0 + rhs.at(x).abs()));
        }
    }

    #[test]
    fn constant_folding() {
        let z = RadialScalar::r() * 0.0;
        assert!(z.is_zero());
        let c = (RadialScalar::constant(2.0) + 3.0).sqrt();
        assert_eq!(c.as_constant(), Some(5f64.sqrt()));
        assert!(RadialScalar::constant(4.0).derivative().is_zero());
    }

    #[test]
    fn domain_is_enforced() {
        let s = RadialScalar::r().sqrt().on(Domain::closed_from(1.0));
        assert!(s.value(0.5).is_err());
        assert_eq!(s.value(4.0).unwrap(), 2.0);
        let t = s + RadialScalar::r().on(Domain::open_from(2.0));
        assert!(t.value(2.0).is_err());
        assert!(t.value(2.5).is_ok());
    }

    #[test]
    fn implicit_leaf_uses_supplied_derivative() {
        // e^r given numerically, derivative = itself
        let e = RadialScalar::implicit("exp", Domain::ALL, f64::exp, |s| s.clone());
        let f = e.clone() * RadialScalar::r();
        assert!((f.derivative().at(1.0) - 2.0 * 1f64.exp()).abs() < 1e-14);
        assert!((e.derivative().derivative().at(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn composition_chain_rule() {
        let sq = RadialScalar::r().powi(2);
        let inner = RadialScalar::r().sin();
        let h = sq.compose(&inner);
        assert!((h.at(0.3) - 0.3f64.sin().powi(2)).abs() < 1e-15);
        let expected = 2.0 * 0.3f64.sin() * 0.3f64.cos();
        assert!((h.derivative().at(0.3) - expected).abs() < 1e-15);
    }
}
