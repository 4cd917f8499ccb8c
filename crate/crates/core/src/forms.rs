//! Exterior algebra over the invariant coframe of ℝ⁺ × S³ × S³.
//!
//! The coframe is ordered `(dr, η₁⁺, η₂⁺, η₃⁺, η₁⁻, η₂⁻, η₃⁻)`. A basis
//! monomial is a set of coframe indices, stored as a 7-bit mask; increasing
//! bit order is the canonical wedge order. Coefficients are
//! [`RadialScalar`]s and absent monomials are zero.
//!
//! The exterior derivative combines radial differentiation with the
//! Maurer–Cartan equations of `su(2) ⊕ su(2)` written in the `η^±` basis:
//!
//! ```text
//! dη⁺ᵢ = −ε_ijk (η⁺_j∧η⁺_k + η⁻_j∧η⁻_k)
//! dη⁻ᵢ = −2 ε_ijk η⁻_j∧η⁺_k
//! ```
//!
//! with summation over `j, k`, so that for instance `dη₁⁺ = −2(η₂₃⁺⁺ + η₂₃⁻⁻)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::RadialScalar;

pub const DIM: usize = 7;

/// Index of `dr` in the coframe.
pub const DR: usize = 0;

/// Index of `η⁺ᵢ`, `i ∈ {1, 2, 3}`.
pub const fn eta_plus(i: usize) -> usize {
    i
}

/// Index of `η⁻ᵢ`, `i ∈ {1, 2, 3}`.
pub const fn eta_minus(i: usize) -> usize {
    i + 3
}

/// A wedge product of distinct coframe elements in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(u8);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    /// Monomial `e_{i₁} ∧ … ∧ e_{i_k}` in the given order, with the sign
    /// needed to bring it to canonical order. `None` if an index repeats.
    pub fn from_indices(indices: &[usize]) -> Option<(Monomial, f64)> {
        let mut acc = Monomial::ONE;
        let mut sign = 1.0;
        for &i in indices {
            assert!(i < DIM, "coframe index {i} out of range");
            let (m, s) = acc.wedge(Monomial(1 << i))?;
            acc = m;
            sign *= s;
        }
        Some((acc, sign))
    }

    /// Monomial from indices that are already strictly increasing.
    pub fn sorted(indices: &[usize]) -> Monomial {
        let (m, s) = Self::from_indices(indices).expect("repeated coframe index");
        assert!(s > 0.0, "indices {indices:?} are not increasing");
        m
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..DIM).filter(move |&i| self.0 & (1 << i) != 0)
    }

    /// `self ∧ other` as a canonical monomial and permutation sign.
    pub fn wedge(self, other: Monomial) -> Option<(Monomial, f64)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // inversions: pairs (x in self, y in other) with x > y
        let mut inversions = 0u32;
        for y in other.indices() {
            inversions += (self.0 >> (y + 1)).count_ones();
        }
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        Some((Monomial(self.0 | other.0), sign))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let names: Vec<String> = self.indices().map(coframe_name).collect();
        write!(f, "{}", names.join("^"))
    }
}

/// Printable name of a coframe element: `dr`, `e1+`, …, `e3-`.
pub fn coframe_name(index: usize) -> String {
    match index {
        0 => "dr".to_string(),
        1..=3 => format!("e{index}+"),
        4..=6 => format!("e{}-", index - 3),
        _ => panic!("coframe index {index} out of range"),
    }
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
        (1, 3, 2) | (3, 2, 1) | (2, 1, 3) => -1.0,
        _ => 0.0,
    }
}

/// `d` of a single coframe element as constant-coefficient 2-form terms.
fn generator_derivative(index: usize) -> Vec<(Monomial, f64)> {
    let mut acc: BTreeMap<Monomial, f64> = BTreeMap::new();
    let mut push = |a: usize, b: usize, c: f64| {
        if let Some((m, s)) = Monomial::from_indices(&[a, b]) {
            *acc.entry(m).or_insert(0.0) += s * c;
        }
    };
    match index {
        DR => {}
        1..=3 => {
            let i = index;
            for j in 1..=3 {
                for k in 1..=3 {
                    let e = levi_civita(i, j, k);
                    if e != 0.0 {
                        push(eta_plus(j), eta_plus(k), -e);
                        push(eta_minus(j), eta_minus(k), -e);
                    }
                }
            }
        }
        4..=6 => {
            let i = index - 3;
            for j in 1..=3 {
                for k in 1..=3 {
                    let e = levi_civita(i, j, k);
                    if e != 0.0 {
                        push(eta_minus(j), eta_plus(k), -2.0 * e);
                    }
                }
            }
        }
        _ => panic!("coframe index {index} out of range"),
    }
    acc.into_iter().filter(|(_, c)| *c != 0.0).collect()
}

/// Numeric coefficients of a form at one radius.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoefficientTable(BTreeMap<Monomial, f64>);

impl CoefficientTable {
    pub fn get(&self, m: Monomial) -> f64 {
        self.0.get(&m).copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.values().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Monomial, f64)> + '_ {
        self.0.iter().map(|(m, v)| (*m, *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A differential form of fixed degree with radial coefficients.
#[derive(Clone, Debug)]
pub struct InvariantForm {
    degree: usize,
    terms: BTreeMap<Monomial, RadialScalar>,
}

impl InvariantForm {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= DIM, "degree {degree} > 7");
        InvariantForm {
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The 0-form `f`.
    pub fn function(f: RadialScalar) -> Self {
        Self::zero(0).with_term(Monomial::ONE, f)
    }

    /// The coframe 1-form with the given index and unit coefficient.
    pub fn generator(index: usize) -> Self {
        Self::zero(1).with_term(Monomial(1 << index), RadialScalar::one())
    }

    /// `coeff · e_{i₁}∧…∧e_{i_k}`; the indices may be given in any order.
    pub fn monomial(indices: &[usize], coeff: RadialScalar) -> Self {
        let mut form = Self::zero(indices.len());
        if let Some((m, s)) = Monomial::from_indices(indices) {
            form.accumulate(m, coeff * s);
        }
        form
    }

    fn with_term(mut self, m: Monomial, c: RadialScalar) -> Self {
        self.accumulate(m, c);
        self
    }

    fn accumulate(&mut self, m: Monomial, c: RadialScalar) {
        debug_assert_eq!(m.degree(), self.degree);
        if c.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&m) {
            Some(old) => old + c,
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(m, merged);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: Monomial) -> Option<&RadialScalar> {
        self.terms.get(&m)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &RadialScalar)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn add(&self, other: &InvariantForm) -> Result<InvariantForm> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &InvariantForm) -> Result<InvariantForm> {
        self.add(&other.scale(&RadialScalar::constant(-1.0)))
    }

    pub fn scale(&self, f: &RadialScalar) -> InvariantForm {
        let mut out = Self::zero(self.degree);
        for (m, c) in &self.terms {
            out.accumulate(*m, c * f);
        }
        out
    }

    pub fn scale_by(&self, k: f64) -> InvariantForm {
        self.scale(&RadialScalar::constant(k))
    }

    pub fn wedge(&self, other: &InvariantForm) -> Result<InvariantForm> {
        let degree = self.degree + other.degree;
        if degree > DIM {
            return Err(Error::DegreeOverflow { degree });
        }
        let mut out = Self::zero(degree);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, s)) = ma.wedge(*mb) {
                    out.accumulate(m, ca * cb * s);
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative.
    pub fn d(&self) -> Result<InvariantForm> {
        let degree = self.degree + 1;
        if degree > DIM {
            return Err(Error::DegreeOverflow { degree });
        }
        let dr = Monomial(1 << DR);
        let mut out = Self::zero(degree);
        for (m, c) in &self.terms {
            if !m.contains(DR) {
                if let Some((dm, s)) = dr.wedge(*m) {
                    out.accumulate(dm, c.derivative() * s);
                }
            }
            let indices: Vec<usize> = m.indices().collect();
            for (pos, &g) in indices.iter().enumerate() {
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                let before = Monomial(indices[..pos].iter().fold(0, |b, &i| b | (1 << i)));
                let after = Monomial(indices[pos + 1..].iter().fold(0, |b, &i| b | (1 << i)));
                for (dg, k) in generator_derivative(g) {
                    let Some((m1, s1)) = before.wedge(dg) else {
                        continue;
                    };
                    let Some((m2, s2)) = m1.wedge(after) else {
                        continue;
                    };
                    out.accumulate(m2, c * (sign * k * s1 * s2));
                }
            }
        }
        Ok(out)
    }

    /// Numeric coefficients at `r`; every coefficient's domain must contain `r`.
    pub fn evaluate(&self, r: f64) -> Result<CoefficientTable> {
        let mut table = BTreeMap::new();
        for (m, c) in &self.terms {
            let v = c.value(r)?;
            if v != 0.0 {
                table.insert(*m, v);
            }
        }
        Ok(CoefficientTable(table))
    }

    /// Numeric coefficients at `r` without domain checks.
    pub fn evaluate_unchecked(&self, r: f64) -> CoefficientTable {
        CoefficientTable(
            self.terms
                .iter()
                .map(|(m, c)| (*m, c.at(r)))
                .filter(|(_, v)| *v != 0.0)
                .collect(),
        )
    }
}

impl fmt::Display for InvariantForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({c:?}) {m}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
