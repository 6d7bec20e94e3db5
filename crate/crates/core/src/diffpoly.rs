//! The differential polynomial ring in the generators q, q̄ (and a single
//! real generator u), over the Gaussian rationals.
//!
//! A polynomial is a canonical sum of monomials; each monomial is a
//! coefficient times a multiset of factors ∂ₓᵏv. The ring carries the
//! derivation d_x, exact division by q, conjugation, the variational
//! derivative (Euler operator), and total-derivative equivalence.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{GaussianRational, Rational};

/// Ring generator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum Var {
    Q,
    QBar,
    U,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::Q => "q",
            Var::QBar => "qbar",
            Var::U => "u",
        }
    }

    pub fn parse(s: &str) -> Option<Var> {
        match s {
            "q" | "Q" => Some(Var::Q),
            "qbar" | "QBar" | "QBAR" | "qb" => Some(Var::QBar),
            "u" | "U" => Some(Var::U),
            _ => None,
        }
    }

    fn conj(self) -> Var {
        match self {
            Var::Q => Var::QBar,
            Var::QBar => Var::Q,
            Var::U => Var::U,
        }
    }
}

/// One factor ∂ₓᵏ v.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Factor {
    pub var: Var,
    pub order: u32,
}

impl Factor {
    pub fn new(var: Var, order: u32) -> Self {
        Factor { var, order }
    }
}

/// Canonical monomial key: sorted list of (factor, multiplicity) with
/// multiplicities ≥ 1 and pairwise distinct factors. The empty list is
/// the constant monomial.
pub type MonomialKey = Vec<(Factor, u32)>;

fn canonical_key(mut factors: Vec<(Factor, u32)>) -> MonomialKey {
    factors.retain(|&(_, p)| p > 0);
    factors.sort_by_key(|&(f, _)| f);
    let mut merged: MonomialKey = Vec::with_capacity(factors.len());
    for (f, p) in factors {
        if let Some(last) = merged.last_mut() {
            if last.0 == f {
                last.1 += p;
                continue;
            }
        }
        merged.push((f, p));
    }
    merged
}

fn key_mul(a: &MonomialKey, b: &MonomialKey) -> MonomialKey {
    let mut all = a.clone();
    all.extend(b.iter().cloned());
    canonical_key(all)
}

/// Total number of x-derivatives in a monomial, counted with multiplicity.
pub fn key_total_derivatives(key: &MonomialKey) -> u32 {
    key.iter().map(|&(f, p)| f.order * p).sum()
}

/// Number of derivative-bearing factors (order ≥ 1), with multiplicity.
pub fn key_derivative_factors(key: &MonomialKey) -> u32 {
    key.iter().filter(|&&(f, _)| f.order >= 1).map(|&(_, p)| p).sum()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiffPolyError {
    #[error("monomial {0} has no zeroth-order q factor")]
    NotDivisible(String),
}

/// A differential polynomial in canonical form: map from monomial key to
/// nonzero Gaussian-rational coefficient.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct DiffPoly {
    terms: BTreeMap<MonomialKey, GaussianRational>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: GaussianRational) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Self {
        DiffPoly::constant(GaussianRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        DiffPoly::constant(GaussianRational::from_int(n))
    }

    /// The monomial c · ∂ₓᵏv.
    pub fn factor(var: Var, order: u32) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(vec![(Factor::new(var, order), 1)], GaussianRational::one());
        p
    }

    pub fn var(v: Var) -> Self {
        DiffPoly::factor(v, 0)
    }

    /// Build a monomial from (var, order, power) triples and a coefficient.
    pub fn monomial(coeff: GaussianRational, factors: &[(Var, u32, u32)]) -> Self {
        let key = canonical_key(
            factors
                .iter()
                .map(|&(v, k, p)| (Factor::new(v, k), p))
                .collect(),
        );
        let mut poly = DiffPoly::zero();
        poly.add_term(key, coeff);
        poly
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialKey, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(GaussianRational::zero)
    }

    fn add_term(&mut self, key: MonomialKey, coeff: GaussianRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = (&*e.get()).add(&coeff);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (k, c) in &self.terms {
            out.terms.insert(k.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        let mut out = DiffPoly::zero();
        for (k, coeff) in &self.terms {
            out.terms.insert(k.clone(), coeff.mul(c));
        }
        out
    }

    pub fn scale_rational(&self, r: &Rational) -> DiffPoly {
        self.scale(&GaussianRational::from_rational(r.clone()))
    }

    pub fn mul(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_term(key_mul(ka, kb), ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> DiffPoly {
        let mut acc = DiffPoly::one();
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Leibniz derivation d_x: each factor's order raised by one in turn.
    pub fn d_x(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (key, coeff) in &self.terms {
            for (i, &(f, p)) in key.iter().enumerate() {
                // differentiate one copy of factor i
                let mut factors: Vec<(Factor, u32)> = key.clone();
                factors[i].1 -= 1;
                factors.push((Factor::new(f.var, f.order + 1), 1));
                let c = coeff.mul(&GaussianRational::from_int(p as i64));
                out.add_term(canonical_key(factors), c);
            }
        }
        out
    }

    /// Iterated derivation.
    pub fn d_x_n(&self, n: u32) -> DiffPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.d_x();
        }
        p
    }

    /// Remove one zeroth-order q factor from every monomial.
    /// `divide_by_q(P) · q = P` exactly when it succeeds.
    pub fn divide_by_q(&self) -> Result<DiffPoly, DiffPolyError> {
        let q0 = Factor::new(Var::Q, 0);
        let mut out = DiffPoly::zero();
        for (key, coeff) in &self.terms {
            let pos = key.iter().position(|&(f, _)| f == q0);
            match pos {
                None => return Err(DiffPolyError::NotDivisible(format_key(key))),
                Some(i) => {
                    let mut factors = key.clone();
                    factors[i].1 -= 1;
                    out.add_term(canonical_key(factors), coeff.clone());
                }
            }
        }
        Ok(out)
    }

    /// Conjugation: swaps q ↔ q̄ and conjugates coefficients; u is fixed.
    pub fn conj(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (key, coeff) in &self.terms {
            let factors: Vec<(Factor, u32)> = key
                .iter()
                .map(|&(f, p)| (Factor::new(f.var.conj(), f.order), p))
                .collect();
            out.add_term(canonical_key(factors), coeff.conj());
        }
        out
    }

    /// Formal partial derivative ∂P/∂(∂ₓᵏ v), treating each factor as an
    /// independent symbol.
    pub fn partial(&self, var: Var, order: u32) -> DiffPoly {
        let target = Factor::new(var, order);
        let mut out = DiffPoly::zero();
        for (key, coeff) in &self.terms {
            if let Some(i) = key.iter().position(|&(f, _)| f == target) {
                let p = key[i].1;
                let mut factors = key.clone();
                factors[i].1 -= 1;
                let c = coeff.mul(&GaussianRational::from_int(p as i64));
                out.add_term(canonical_key(factors), c);
            }
        }
        out
    }

    /// Highest derivative order of `var` occurring in the polynomial.
    pub fn max_order(&self, var: Var) -> u32 {
        self.terms
            .keys()
            .flat_map(|k| k.iter())
            .filter(|&&(f, _)| f.var == var)
            .map(|&(f, _)| f.order)
            .max()
            .unwrap_or(0)
    }

    /// Variational derivative δP/δv: the Euler operator
    /// Σ_k (−d_x)ᵏ ∂P/∂(∂ₓᵏ v).
    pub fn var_derivative(&self, var: Var) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for k in 0..=self.max_order(var) {
            let mut term = self.partial(var, k).d_x_n(k);
            if k % 2 == 1 {
                term = term.neg();
            }
            out = out.add(&term);
        }
        out
    }

    /// True iff P is an exact x-derivative of a decaying quantity:
    /// all variational derivatives vanish and the constant term is zero.
    pub fn is_total_derivative(&self) -> bool {
        if !self.constant_term().is_zero() {
            return false;
        }
        for v in [Var::Q, Var::QBar, Var::U] {
            if !self.var_derivative(v).is_zero() {
                return false;
            }
        }
        true
    }

    /// Equality of the induced functionals: P − R is a total derivative.
    pub fn equivalent_mod_dx(&self, other: &DiffPoly) -> bool {
        self.sub(other).is_total_derivative()
    }

    /// Evaluate the polynomial given a sample of every factor.
    pub fn eval(&self, sample: &dyn Fn(Var, u32) -> Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (key, coeff) in &self.terms {
            let mut term = coeff.to_complex_f64();
            for &(f, p) in key {
                term *= sample(f.var, f.order).powu(p);
            }
            acc += term;
        }
        acc
    }

    /// JSON value: a list of `{"coeff": {re, im}, "factors": [[var, order, power], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(key, coeff)| {
                serde_json::json!({
                    "coeff": {
                        "re": coeff.re.to_frac_string(),
                        "im": coeff.im.to_frac_string(),
                    },
                    "factors": key
                        .iter()
                        .map(|&(f, p)| serde_json::json!([f.var.name(), f.order, p]))
                        .collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::Value::Array(terms)
    }

    /// LaTeX rendering; ∂ₓᵏ shown as subscript x's for k ≤ 3.
    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (key, coeff)) in self.terms.iter().enumerate() {
            let coeff_str = latex_coeff(coeff, key.is_empty());
            if i > 0 && !coeff_str.starts_with('-') {
                out.push_str(" + ");
            } else if i > 0 {
                out.push_str(" ");
            }
            out.push_str(&coeff_str);
            for &(f, p) in key {
                out.push_str(&latex_factor(f, p));
            }
        }
        out
    }
}

fn latex_var(var: Var) -> &'static str {
    match var {
        Var::Q => "q",
        Var::QBar => "\\bar q",
        Var::U => "u",
    }
}

fn latex_factor(f: Factor, power: u32) -> String {
    let base = if f.order == 0 {
        latex_var(f.var).to_string()
    } else if f.order <= 3 {
        let subs = "x".repeat(f.order as usize);
        match f.var {
            Var::QBar => format!("\\bar q_{{{subs}}}"),
            v => format!("{}_{{{subs}}}", latex_var(v)),
        }
    } else {
        format!("\\partial_x^{{{}}} {}", f.order, latex_var(f.var))
    };
    if power == 1 {
        base
    } else if f.order == 0 && matches!(f.var, Var::Q | Var::U) {
        format!("{}^{}", base, power)
    } else {
        format!("({})^{}", base, power)
    }
}

fn latex_coeff(c: &GaussianRational, is_constant: bool) -> String {
    if c.is_one() && !is_constant {
        String::new()
    } else if (-c.clone()).is_one() && !is_constant {
        "-".to_string()
    } else if c.is_real() {
        c.re.to_frac_string()
    } else if c.re.is_zero() {
        if c.im.is_one() {
            "i".to_string()
        } else if (-c.im.clone()).is_one() {
            "-i".to_string()
        } else {
            format!("{} i", c.im.to_frac_string())
        }
    } else {
        format!("({})", c)
    }
}

fn format_key(key: &MonomialKey) -> String {
    if key.is_empty() {
        return "1".to_string();
    }
    key.iter()
        .map(|&(f, p)| {
            let base = if f.order == 0 {
                f.var.name().to_string()
            } else {
                format!("{}^({})", f.var.name(), f.order)
            };
            if p == 1 {
                base
            } else {
                format!("{}^{}", base, p)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Debug for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| format!("({})·{}", c, format_key(k)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> DiffPoly {
        DiffPoly::var(Var::Q)
    }

    fn qbar() -> DiffPoly {
        DiffPoly::var(Var::QBar)
    }

    fn qx() -> DiffPoly {
        DiffPoly::factor(Var::Q, 1)
    }

    fn qbar_k(k: u32) -> DiffPoly {
        DiffPoly::factor(Var::QBar, k)
    }

    #[test]
    fn d_x_product_rule_basic() {
        let p = q().mul(&qbar());
        let expect = qx().mul(&qbar()).add(&q().mul(&qbar_k(1)));
        assert_eq!(p.d_x(), expect);
        assert_eq!(DiffPoly::one().d_x(), DiffPoly::zero());
    }

    #[test]
    fn d_x_with_coefficient() {
        // d_x(-q qbar_x) = -q_x qbar_x - q qbar_xx
        let p = q().mul(&qbar_k(1)).neg();
        let expect = qx().mul(&qbar_k(1)).neg().sub(&q().mul(&qbar_k(2)));
        assert_eq!(p.d_x(), expect);
    }

    #[test]
    fn divide_by_q_examples() {
        let p = q().mul(&qbar()).neg();
        assert_eq!(p.divide_by_q().unwrap(), qbar().neg());

        let p2 = q().pow(2).mul(&qbar_k(2));
        assert_eq!(p2.divide_by_q().unwrap(), q().mul(&qbar_k(2)));

        assert!(matches!(
            qbar_k(1).divide_by_q(),
            Err(DiffPolyError::NotDivisible(_))
        ));
    }

    #[test]
    fn var_derivative_examples() {
        // δ(-q qbar_xx)/δqbar = -q_xx
        let p = q().mul(&qbar_k(2)).neg();
        assert_eq!(p.var_derivative(Var::QBar), DiffPoly::factor(Var::Q, 2).neg());

        // δ(q² qbar²)/δqbar = 2 q² qbar
        let p = q().pow(2).mul(&qbar().pow(2));
        let expect = q().pow(2).mul(&qbar()).scale(&GaussianRational::from_int(2));
        assert_eq!(p.var_derivative(Var::QBar), expect);

        // no q dependence
        let p = qbar().mul(&qbar_k(1));
        assert_eq!(p.var_derivative(Var::Q), DiffPoly::zero());
    }

    #[test]
    fn total_derivative_detection() {
        let exact = qx().mul(&qbar()).add(&q().mul(&qbar_k(1)));
        assert!(exact.is_total_derivative());
        assert!(!q().mul(&qbar()).is_total_derivative());
        assert!(!DiffPoly::one().is_total_derivative());
    }

    #[test]
    fn mod_dx_energy_identity() {
        // -q qbar_xx + q² qbar² ≡ q_x qbar_x + q² qbar²
        let lhs = q().mul(&qbar_k(2)).neg().add(&q().pow(2).mul(&qbar().pow(2)));
        let rhs = qx().mul(&qbar_k(1)).add(&q().pow(2).mul(&qbar().pow(2)));
        assert!(lhs.equivalent_mod_dx(&rhs));
        assert!(q().mul(&qbar()).equivalent_mod_dx(&qbar().mul(&q())));
        assert!(!q().mul(&qbar()).equivalent_mod_dx(&q().mul(&qbar()).scale(&GaussianRational::from_int(2))));
    }

    #[test]
    fn conjugation_swaps_generators() {
        let p = q().mul(&qbar_k(2)).scale(&GaussianRational::i());
        let expect = qbar().mul(&DiffPoly::factor(Var::Q, 2)).scale(&-GaussianRational::i());
        assert_eq!(p.conj(), expect);
    }

    #[test]
    fn latex_rendering() {
        let p = q().mul(&qbar_k(2)).neg().add(&q().pow(2).mul(&qbar().pow(2)));
        assert_eq!(p.to_latex(), "-q\\bar q_{xx} + q^2(\\bar q)^2");
    }

    // small random polynomials for property tests
    fn arb_poly() -> impl Strategy<Value = DiffPoly> {
        let factor = (0u32..3, 0u32..3, 1u32..3);
        let monomial = (
            -5i64..6,
            -5i64..6,
            proptest::collection::vec(factor, 0..3),
        );
        proptest::collection::vec(monomial, 0..4).prop_map(|monos| {
            let mut p = DiffPoly::zero();
            for (re, im, factors) in monos {
                let coeff = GaussianRational::new(Rational::from_int(re), Rational::from_int(im));
                let fs: Vec<(Var, u32, u32)> = factors
                    .into_iter()
                    .map(|(v, k, pw)| {
                        let var = match v {
                            0 => Var::Q,
                            1 => Var::QBar,
                            _ => Var::U,
                        };
                        (var, k, pw)
                    })
                    .collect();
                p = p.add(&DiffPoly::monomial(coeff, &fs));
            }
            p
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }

        #[test]
        fn leibniz_rule(a in arb_poly(), b in arb_poly()) {
            let lhs = a.mul(&b).d_x();
            let rhs = a.d_x().mul(&b).add(&a.mul(&b.d_x()));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn euler_annihilates_total_derivatives(a in arb_poly()) {
            let d = a.d_x();
            for v in [Var::Q, Var::QBar, Var::U] {
                prop_assert_eq!(d.var_derivative(v), DiffPoly::zero());
            }
        }

        #[test]
        fn conj_involution_and_homomorphism(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        }

        #[test]
        fn divide_by_q_inverts_multiplication(a in arb_poly()) {
            let q = DiffPoly::var(Var::Q);
            let p = a.mul(&q);
            if !p.is_zero() {
                let d = p.divide_by_q().unwrap();
                prop_assert_eq!(d.mul(&q), p);
            }
        }
    }
}
