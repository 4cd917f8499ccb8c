//! Power series of the single-component BGGG deformed equation at the
//! singular orbit.
//!
//! With `z = r − 9/4` and `p(z) = f(r)` the equation reads
//! `(Q(z) + 36p²) p′ − (144z + 324) p = 0`, `Q = 16z⁴ + 144z³ + 396z² + 324z`.
//! If `p(0) = a ≠ 0` every coefficient is fixed by `a`; if `p(0) = 0` the
//! slope is free.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const Q: [i64; 5] = [0, 324, 396, 144, 16];

/// Coefficients the order-by-order solve runs over.
pub trait Coefficient: Clone {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, k: i64) -> Self;
}

impl Coefficient for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, k: i64) -> Self {
        self * k as f64
    }
}

impl Coefficient for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, k: i64) -> Self {
        self * BigRational::from_integer(k.into())
    }
}

/// Coefficient of `zᵐ` in `(Q + 36p²)p′ − (144z + 324)p`, where `p` holds
/// `p₀, p₁, …` and missing entries are zero.
pub fn ode_coefficient<T: Coefficient>(p: &[T], m: usize) -> T {
    let get = |n: usize| p.get(n).cloned().unwrap_or_else(T::zero);
    let mut acc = T::zero();
    for (i, &q) in Q.iter().enumerate().skip(1) {
        if m + 1 >= i {
            let n = m + 1 - i;
            if n >= 1 {
                acc = acc.add(&get(n).scale(q * n as i64));
            }
        }
    }
    // 36 Σ s_k · l p_l with s = p², k + l − 1 = m
    for l in 1..=m + 1 {
        let pl = get(l);
        let k = m + 1 - l;
        let mut s = T::zero();
        for i in 0..=k {
            s = s.add(&get(i).mul(&get(k - i)));
        }
        acc = acc.add(&s.mul(&pl).scale(36 * l as i64));
    }
    if m >= 1 {
        acc = acc.add(&get(m - 1).scale(-144));
    }
    acc.add(&get(m).scale(-324))
}

/// All coefficients of the residual polynomial left by the truncation `p`.
pub fn residual_polynomial<T: Coefficient>(p: &[T]) -> Vec<T> {
    let n = p.len().max(1);
    let degree = (3 * n).max(n + 4);
    (0..=degree).map(|m| ode_coefficient(p, m)).collect()
}

/// Laurent polynomial `Σ c_k aᵏ` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Laurent(BTreeMap<i32, BigRational>);

impl Laurent {
    pub fn monomial(k: i32, c: BigRational) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(k, c);
        }
        Laurent(m)
    }

    /// Builds from `(power, numerator, denominator)` triples.
    pub fn from_terms(terms: &[(i32, i64, i64)]) -> Self {
        terms.iter().fold(Laurent::default(), |acc, &(k, n, d)| {
            acc.add(&Laurent::monomial(k, BigRational::new(n.into(), d.into())))
        })
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigRational)> {
        self.0.iter().map(|(k, c)| (*k, c))
    }

    /// Multiplies by `c·aᵏ`.
    pub fn times_monomial(&self, k: i32, c: &BigRational) -> Self {
        Laurent(self.0.iter().map(|(e, v)| (e + k, v * c)).filter(|(_, v)| !v.is_zero()).collect())
    }

    pub fn eval_rational(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() && self.0.keys().any(|&k| k < 0) {
            return Err(Error::ZeroSeries);
        }
        Ok(self.0.iter().fold(<BigRational as Zero>::zero(), |acc, (&k, c)| acc + c * a.pow(k)))
    }

    pub fn eval_f64(&self, a: f64) -> f64 {
        self.0
            .iter()
            .map(|(&k, c)| c.to_f64().unwrap_or(f64::NAN) * a.powi(k))
            .sum()
    }
}

impl Coefficient for Laurent {
    fn zero() -> Self {
        Laurent::default()
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        for (k, v) in &other.0 {
            let e = out.entry(*k).or_insert_with(<BigRational as Zero>::zero);
            *e += v;
            if e.is_zero() {
                out.remove(k);
            }
        }
        Laurent(out)
    }
    fn mul(&self, other: &Self) -> Self {
        other
            .0
            .iter()
            .fold(Laurent::default(), |acc, (k, c)| acc.add(&self.times_monomial(*k, c)))
    }
    fn scale(&self, k: i64) -> Self {
        self.times_monomial(0, &BigRational::from_integer(k.into()))
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.0.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let c = c.abs();
            let (n, d) = (c.numer(), c.denom());
            let unit = n.is_one() && *k != 0;
            match *k {
                0 => write!(f, "{n}")?,
                k if k > 0 => {
                    if !unit {
                        write!(f, "{n}*")?;
                    }
                    write!(f, "a")?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
                k => {
                    write!(f, "{n}/")?;
                    write!(f, "a")?;
                    if k < -1 {
                        write!(f, "^{}", -k)?;
                    }
                }
            }
            if !d.is_one() {
                write!(f, "/{d}")?;
            }
        }
        Ok(())
    }
}

/// `p(z) = Σ pₙ(a) zⁿ` on the branch `p(0) = a ≠ 0`, coefficients exact in `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesExpansion {
    coefficients: Vec<Laurent>,
}

/// Coefficients `p₀ … p_order` of the `p(0) = a` branch as Laurent
/// polynomials in `a`.
pub fn series_expand(order: usize) -> Result<SeriesExpansion> {
    if order < 1 {
        return Err(Error::InvalidParameter("series order must be at least 1".into()));
    }
    let mut p = vec![Laurent::monomial(1, BigRational::one())];
    for n in 1..=order {
        let c = ode_coefficient(&p, n - 1);
        let pivot = BigRational::new(BigInt::from(-1), BigInt::from(36 * n as i64));
        p.push(c.times_monomial(-2, &pivot));
    }
    Ok(SeriesExpansion { coefficients: p })
}

impl SeriesExpansion {
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficient(&self, n: usize) -> Option<&Laurent> {
        self.coefficients.get(n)
    }

    pub fn coefficients(&self) -> &[Laurent] {
        &self.coefficients
    }

    /// Rational coefficients at a given `a`; `a = 0` selects the `p ≡ 0`
    /// branch and is reported as [`Error::ZeroSeries`].
    pub fn at_rational(&self, a: &BigRational) -> Result<Vec<BigRational>> {
        if a.is_zero() {
            return Err(Error::ZeroSeries);
        }
        self.coefficients.iter().map(|c| c.eval_rational(a)).collect()
    }

    pub fn at_f64(&self, a: f64) -> Result<Vec<f64>> {
        if a == 0.0 {
            return Err(Error::ZeroSeries);
        }
        if !a.is_finite() {
            return Err(Error::InvalidParameter(format!("series leading value must be finite, got {a}")));
        }
        Ok(self.coefficients.iter().map(|c| c.eval_f64(a)).collect())
    }
}

/// Coefficients of the `p(0) = 0` branch with `p′(0) = slope`, solved in
/// floating point through `z^order`.
pub fn vanishing_series(slope: f64, order: usize) -> Vec<f64> {
    let mut p = vec![0.0, slope];
    for n in 2..=order {
        let c = ode_coefficient(&p, n);
        p.push(-c / (324.0 * (n as f64 - 1.0)));
    }
    p.truncate(order + 1);
    p
}

/// `Σ pₙ zⁿ` by Horner's rule.
pub fn eval_poly<T: Coefficient>(p: &[T], z: &T) -> T {
    p.iter().rev().fold(T::zero(), |acc, c| acc.mul(z).add(c))
}

/// `Σ n pₙ zⁿ⁻¹`.
pub fn eval_poly_derivative(p: &[f64], z: f64) -> f64 {
    p.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (n, c)| acc * z + n as f64 * c)
}

/// Log–log slope of `|R(z)|` between `z₁` and `z₂`, where `R` is the exact
/// residual of the truncation `p`.
pub fn truncation_slope(p: &[BigRational], z1: &BigRational, z2: &BigRational) -> f64 {
    let res = residual_polynomial(p);
    let r1 = eval_poly(&res, z1).abs();
    let r2 = eval_poly(&res, z2).abs();
    let ratio = (r2 / r1).to_f64().unwrap_or(f64::NAN);
    let zr = (z2 / z1).to_f64().unwrap_or(f64::NAN);
    ratio.ln() / zr.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn first_coefficients() {
        let s = series_expand(4).unwrap();
        assert_eq!(s.coefficient(0).unwrap(), &Laurent::from_terms(&[(1, 1, 1)]));
        assert_eq!(s.coefficient(1).unwrap(), &Laurent::from_terms(&[(-1, 9, 1)]));
        assert_eq!(s.coefficient(2).unwrap().to_string(), "2/a - 81/a^3");
    }

    #[test]
    fn a_equals_three() {
        let s = series_expand(2).unwrap();
        let c = s.at_rational(&rat(3, 1)).unwrap();
        assert_eq!(c[2], rat(-7, 3));
    }

    #[test]
    fn zero_leading_value_is_signalled() {
        let s = series_expand(3).unwrap();
        assert!(matches!(s.at_rational(&rat(0, 1)), Err(Error::ZeroSeries)));
        assert!(matches!(s.at_f64(0.0), Err(Error::ZeroSeries)));
        assert!(series_expand(0).is_err());
    }

    #[test]
    fn truncation_residual_starts_at_order() {
        let s = series_expand(5).unwrap();
        let p = s.at_rational(&rat(5, 2)).unwrap();
        let res = residual_polynomial(&p);
        assert!(res[..5].iter().all(|c| c.is_zero()));
        assert!(!res[5].is_zero());
    }

    #[test]
    fn vanishing_branch_matches_tan_root() {
        let c: f64 = 0.7;
        let p = vanishing_series(3.0 / c.tan(), 8);
        let r = 2.25 + 1e-3;
        let z = r - 2.25;
        let root = crate::solvers::tan_root::solve_tan_implicit(r, c, 0).unwrap();
        assert!((eval_poly(&p, &z) - root.f).abs() < 1e-15 * root.f);
    }

    #[test]
    fn vanishing_branch_residual_is_high_order() {
        let p = vanishing_series(1.5, 6);
        let res = residual_polynomial(&p);
        assert!(res[..=6].iter().all(|c| c.abs() < 1e-9));
    }
}
