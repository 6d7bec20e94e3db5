//! The derivative-counting projections π_k and π̃_k, and membership /
//! certificate checks for the residual classes of remainders.
//!
//! Membership over the generator set {q-derivatives} is monomial-local
//! and decided directly. Over {q-derivatives, |q|²−1} it is not (the
//! expansion of (qq̄−1)² contains a constant), so remainders in that
//! class carry certificates: explicit factorizations into generator
//! atoms, produced by the code that constructed them.

use thiserror::Error;

use crate::diffpoly::{key_derivative_factors, key_total_derivatives, DiffPoly, Var};
use crate::exact::GaussianRational;

/// π_k: the sum of monomials with exactly k derivative-bearing factors,
/// counted with multiplicity. Constant monomials belong to k = 0.
pub fn pi(p: &DiffPoly, k: u32) -> DiffPoly {
    let mut out = DiffPoly::zero();
    for (key, coeff) in p.terms() {
        if key_derivative_factors(key) == k {
            out = out.add(&DiffPoly::monomial(
                coeff.clone(),
                &key.iter().map(|&(f, pw)| (f.var, f.order, pw)).collect::<Vec<_>>(),
            ));
        }
    }
    out
}

/// π̃_k for k ∈ {1, 2}: exactly k derivative-bearing factors, at least
/// one of which is a derivative of q̄.
pub fn pi_tilde(p: &DiffPoly, k: u32) -> DiffPoly {
    assert!(k == 1 || k == 2, "pi_tilde is defined for k in {{1, 2}}");
    let mut out = DiffPoly::zero();
    for (key, coeff) in p.terms() {
        if key_derivative_factors(key) != k {
            continue;
        }
        let has_qbar_deriv = key
            .iter()
            .any(|&(f, _)| f.var == Var::QBar && f.order >= 1);
        if has_qbar_deriv {
            out = out.add(&DiffPoly::monomial(
                coeff.clone(),
                &key.iter().map(|&(f, pw)| (f.var, f.order, pw)).collect::<Vec<_>>(),
            ));
        }
    }
    out
}

/// Generator set of a residual class.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GeneratorSet {
    /// B = {q_x}: factors ∂ₓᵏq or ∂ₓᵏq̄ with k ≥ 1 qualify.
    QDerivatives,
    /// B = {q_x, |q|²−1}: additionally ∂ₓᵏ(qq̄−1) with k ≥ 0 qualifies.
    QDerivativesAndDensity,
}

/// Residual class O^{m,L}: monomials with at most `max_total_derivs`
/// derivatives in total and at least `min_deriv_factors` factors drawn
/// from the generator set.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ClassSpec {
    pub min_deriv_factors: u32,
    pub max_total_derivs: u32,
    pub generators: GeneratorSet,
}

impl ClassSpec {
    pub fn nls(m: u32, l: u32) -> Self {
        ClassSpec {
            min_deriv_factors: m,
            max_total_derivs: l,
            generators: GeneratorSet::QDerivatives,
        }
    }

    pub fn gp(m: u32, l: u32) -> Self {
        ClassSpec {
            min_deriv_factors: m,
            max_total_derivs: l,
            generators: GeneratorSet::QDerivativesAndDensity,
        }
    }
}

/// Monomial-local membership test, exact for the generator set {q_x}.
pub fn in_nls_class(p: &DiffPoly, spec: &ClassSpec) -> bool {
    assert_eq!(
        spec.generators,
        GeneratorSet::QDerivatives,
        "monomial-local membership is exact only for the q-derivative generator set"
    );
    p.terms().all(|(key, _)| {
        key_total_derivatives(key) <= spec.max_total_derivs
            && key_derivative_factors(key) >= spec.min_deriv_factors
    })
}

/// One factor of a certificate witness.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Atom {
    /// ∂ₓᵏ q, ∂ₓᵏ q̄, or ∂ₓᵏ u.
    Deriv(Var, u32),
    /// ∂ₓᵏ (q q̄ − 1).
    Rho(u32),
}

impl Atom {
    /// Total x-derivatives contributed by the atom.
    pub fn derivative_count(&self) -> u32 {
        match *self {
            Atom::Deriv(_, k) => k,
            Atom::Rho(k) => k,
        }
    }

    /// Whether the atom qualifies as a generator factor for the set.
    pub fn is_generator(&self, set: GeneratorSet) -> bool {
        match (*self, set) {
            (Atom::Deriv(_, k), _) => k >= 1,
            (Atom::Rho(_), GeneratorSet::QDerivativesAndDensity) => true,
            (Atom::Rho(_), GeneratorSet::QDerivatives) => false,
        }
    }

    /// Expanded form as a differential polynomial.
    pub fn expand(&self) -> DiffPoly {
        match *self {
            Atom::Deriv(v, k) => DiffPoly::factor(v, k),
            Atom::Rho(k) => {
                let rho = DiffPoly::var(Var::Q)
                    .mul(&DiffPoly::var(Var::QBar))
                    .sub(&DiffPoly::one());
                rho.d_x_n(k)
            }
        }
    }
}

/// One witness: a coefficient times a product of atoms.
#[derive(Clone, PartialEq, Debug)]
pub struct Witness {
    pub coeff: GaussianRational,
    pub atoms: Vec<Atom>,
}

impl Witness {
    pub fn expand(&self) -> DiffPoly {
        let mut p = DiffPoly::constant(self.coeff.clone());
        for a in &self.atoms {
            p = p.mul(&a.expand());
        }
        p
    }

    pub fn total_derivatives(&self) -> u32 {
        self.atoms.iter().map(|a| a.derivative_count()).sum()
    }

    pub fn generator_factors(&self, set: GeneratorSet) -> u32 {
        self.atoms.iter().filter(|a| a.is_generator(set)).count() as u32
    }

    pub fn satisfies(&self, spec: &ClassSpec) -> bool {
        self.total_derivatives() <= spec.max_total_derivs
            && self.generator_factors(spec.generators) >= spec.min_deriv_factors
    }
}

/// A remainder together with the witnesses proving class membership.
#[derive(Clone, PartialEq, Debug)]
pub struct CertifiedRemainder {
    pub value: DiffPoly,
    pub certificate: Vec<Witness>,
}

#[derive(Debug, Error, PartialEq)]
pub enum CertificateError {
    #[error("certificate expansion differs from value by {difference}")]
    CertificateMismatch { difference: String },
    #[error("witness {index} violates the class bounds (derivs {derivs}, generator factors {generators})")]
    WitnessOutOfClass { index: usize, derivs: u32, generators: u32 },
}

impl CertifiedRemainder {
    pub fn empty() -> Self {
        CertifiedRemainder { value: DiffPoly::zero(), certificate: Vec::new() }
    }
}

/// Verify that the certificate expands exactly to the value and that
/// every witness satisfies the class bounds.
pub fn check_certificate(
    r: &CertifiedRemainder,
    spec: &ClassSpec,
) -> Result<(), CertificateError> {
    let mut sum = DiffPoly::zero();
    for w in &r.certificate {
        sum = sum.add(&w.expand());
    }
    let diff = sum.sub(&r.value);
    if !diff.is_zero() {
        return Err(CertificateError::CertificateMismatch {
            difference: format!("{:?}", diff),
        });
    }
    for (i, w) in r.certificate.iter().enumerate() {
        if !w.satisfies(spec) {
            return Err(CertificateError::WitnessOutOfClass {
                index: i,
                derivs: w.total_derivatives(),
                generators: w.generator_factors(spec.generators),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rational;

    fn q() -> DiffPoly {
        DiffPoly::var(Var::Q)
    }

    fn qbar() -> DiffPoly {
        DiffPoly::var(Var::QBar)
    }

    fn sigma3() -> DiffPoly {
        // -q qbar_xx + q² qbar²
        q().mul(&DiffPoly::factor(Var::QBar, 2))
            .neg()
            .add(&q().pow(2).mul(&qbar().pow(2)))
    }

    #[test]
    fn pi_splits_sigma3() {
        let s = sigma3();
        assert_eq!(pi(&s, 0), q().pow(2).mul(&qbar().pow(2)));
        assert_eq!(pi(&s, 1), q().mul(&DiffPoly::factor(Var::QBar, 2)).neg());
        assert_eq!(pi(&q().mul(&qbar()), 1), DiffPoly::zero());
    }

    #[test]
    fn pi_completeness_and_idempotence() {
        let s = sigma3().mul(&sigma3()).add(&DiffPoly::from_int(3));
        let mut sum = DiffPoly::zero();
        for k in 0..=8 {
            let pk = pi(&s, k);
            assert_eq!(pi(&pk, k), pk);
            for j in 0..=8 {
                if j != k {
                    assert_eq!(pi(&pk, j), DiffPoly::zero());
                }
            }
            sum = sum.add(&pk);
        }
        assert_eq!(sum, s);
    }

    #[test]
    fn pi_tilde_examples() {
        let qx = DiffPoly::factor(Var::Q, 1);
        let qbx = DiffPoly::factor(Var::QBar, 1);

        let p = qx.mul(&qbx).mul(&q());
        assert_eq!(pi_tilde(&p, 2), p);

        let p2 = qx.mul(&qx).mul(&qbar());
        assert_eq!(pi_tilde(&p2, 2), DiffPoly::zero());

        let p3 = q().mul(&DiffPoly::factor(Var::QBar, 2)).neg();
        assert_eq!(pi_tilde(&p3, 1), p3);
    }

    #[test]
    fn nls_class_membership() {
        let qx = DiffPoly::factor(Var::Q, 1);
        let qbx = DiffPoly::factor(Var::QBar, 1);
        let spec = ClassSpec::nls(2, 2);

        assert!(in_nls_class(&qx.mul(&qbx).mul(&q()).mul(&qbar()), &spec));
        assert!(!in_nls_class(&q().mul(&DiffPoly::factor(Var::QBar, 2)), &spec));
        assert!(!in_nls_class(&qx.mul(&DiffPoly::factor(Var::QBar, 3)), &spec));
    }

    #[test]
    fn certificate_for_rho_squared() {
        // (qq̄−1)² with witness [ρ, ρ] belongs to the m = 2 class.
        let rho = q().mul(&qbar()).sub(&DiffPoly::one());
        let r = CertifiedRemainder {
            value: rho.mul(&rho),
            certificate: vec![Witness {
                coeff: GaussianRational::one(),
                atoms: vec![Atom::Rho(0), Atom::Rho(0)],
            }],
        };
        assert!(check_certificate(&r, &ClassSpec::gp(2, 0)).is_ok());

        // but q²q̄² alone does not expand to the same thing
        let bad = CertifiedRemainder {
            value: q().pow(2).mul(&qbar().pow(2)),
            certificate: r.certificate.clone(),
        };
        assert!(matches!(
            check_certificate(&bad, &ClassSpec::gp(2, 0)),
            Err(CertificateError::CertificateMismatch { .. })
        ));
    }

    #[test]
    fn certificate_mixed_atoms() {
        // q_x·q·q̄ − q_x = q_x (qq̄ − 1), witness [q_x, ρ], class m = 2, L = 1
        let qx = DiffPoly::factor(Var::Q, 1);
        let value = qx.mul(&q()).mul(&qbar()).sub(&qx);
        let r = CertifiedRemainder {
            value,
            certificate: vec![Witness {
                coeff: GaussianRational::one(),
                atoms: vec![Atom::Deriv(Var::Q, 1), Atom::Rho(0)],
            }],
        };
        assert!(check_certificate(&r, &ClassSpec::gp(2, 1)).is_ok());
        // same witness fails a spec requiring three generator factors
        assert!(matches!(
            check_certificate(&r, &ClassSpec::gp(3, 1)),
            Err(CertificateError::WitnessOutOfClass { .. })
        ));
    }

    #[test]
    fn plain_q_atoms_are_not_generators() {
        let w = Witness {
            coeff: GaussianRational::from_rational(Rational::one()),
            atoms: vec![Atom::Deriv(Var::Q, 0), Atom::Deriv(Var::QBar, 1)],
        };
        assert_eq!(w.generator_factors(GeneratorSet::QDerivatives), 1);
        assert_eq!(w.total_derivatives(), 1);
    }
}
