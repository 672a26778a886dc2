//! Constitutive laws and admissibility constraints on the physical
//! coefficients.
//!
//! In specific-volume form the pressure and transport coefficients are
//!
//! ```text
//! p(v) = v^{−γ},   κ(v) = v^{−β},
//! μ(v) = μ̃,        λ(v) = λ̃ v^{−α}     (Kazhikhov family)
//! μ(v) = μ̃ v^{−α}, λ(v) = λ̃ v^{−α}     (density-dependent family)
//! ```
//!
//! The capillarity prefactor is normalized to 1. Physical admissibility
//! requires μ̃ > 0 and 2μ̃ + d·λ̃ > 0.

use crate::num::powr;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Selects which viscosity family the coefficient laws follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    /// Constant shear viscosity μ̃, volume-dependent bulk viscosity λ̃ v^{−α}.
    Kazhikhov,
    /// Both viscosities proportional to v^{−α}.
    DensityDependent,
}

impl ModelKind {
    pub fn label(&self) -> &'static str {
        match self {
            ModelKind::Kazhikhov => "kazhikhov",
            ModelKind::DensityDependent => "density-dependent",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Physical parameter set: constitutive exponents, viscosity coefficients,
/// and the exterior-domain geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub kind: ModelKind,
    /// Viscosity exponent α.
    pub alpha: f64,
    /// Capillarity exponent β.
    pub beta: f64,
    /// Adiabatic exponent γ ≥ 1.
    pub gamma: f64,
    /// Shear viscosity coefficient μ̃ > 0.
    pub mu_tilde: f64,
    /// Bulk viscosity coefficient λ̃.
    pub lambda_tilde: f64,
    /// Spatial dimension d; the geometric factor is m = d − 1.
    pub dim: u32,
    /// Inner boundary radius a > 0.
    pub a: f64,
}

impl ModelParams {
    /// Geometric factor m = d − 1 of the spherical divergence.
    pub fn m(&self) -> u32 {
        self.dim.saturating_sub(1)
    }

    pub fn m_f64(&self) -> f64 {
        self.m() as f64
    }

    /// All violated coefficient constraints; empty means admissible.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.mu_tilde > 0.0) {
            out.push(Violation::ShearViscosityNonPositive { mu_tilde: self.mu_tilde });
        }
        let lame = 2.0 * self.mu_tilde + self.dim as f64 * self.lambda_tilde;
        if !(lame > 0.0) {
            out.push(Violation::LameCombinationNonPositive { value: lame });
        }
        if !(self.gamma >= 1.0) {
            out.push(Violation::GammaBelowOne { gamma: self.gamma });
        }
        if !(self.a > 0.0) {
            out.push(Violation::InnerRadiusNonPositive { a: self.a });
        }
        if self.dim < 2 {
            out.push(Violation::DimensionTooSmall { dim: self.dim });
        }
        for (name, x) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("mu_tilde", self.mu_tilde),
            ("lambda_tilde", self.lambda_tilde),
            ("a", self.a),
        ] {
            if !x.is_finite() {
                out.push(Violation::NonFinite { name });
            }
        }
        out
    }

    pub fn is_admissible(&self) -> bool {
        self.validate().is_empty()
    }
}

/// A single violated admissibility constraint. Violations are data, not
/// errors: `validate` reports them all.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    ShearViscosityNonPositive { mu_tilde: f64 },
    LameCombinationNonPositive { value: f64 },
    GammaBelowOne { gamma: f64 },
    InnerRadiusNonPositive { a: f64 },
    DimensionTooSmall { dim: u32 },
    NonFinite { name: &'static str },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ShearViscosityNonPositive { mu_tilde } => {
                write!(f, "mu_tilde <= 0 (mu_tilde = {mu_tilde})")
            }
            Violation::LameCombinationNonPositive { value } => {
                write!(f, "2*mu_tilde + d*lambda_tilde <= 0 (value = {value})")
            }
            Violation::GammaBelowOne { gamma } => write!(f, "gamma < 1 (gamma = {gamma})"),
            Violation::InnerRadiusNonPositive { a } => write!(f, "a <= 0 (a = {a})"),
            Violation::DimensionTooSmall { dim } => write!(f, "dim < 2 (dim = {dim})"),
            Violation::NonFinite { name } => write!(f, "{name} is not finite"),
        }
    }
}

fn check_volume(v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::domain(format!(
            "specific volume must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

/// Pressure p(v) = v^{−γ}.
pub fn pressure(v: f64, params: &ModelParams) -> Result<f64> {
    check_volume(v)?;
    Ok(powr(v, -params.gamma))
}

/// Shear viscosity μ(v).
pub fn shear_viscosity(v: f64, params: &ModelParams) -> Result<f64> {
    check_volume(v)?;
    Ok(match params.kind {
        ModelKind::Kazhikhov => params.mu_tilde,
        ModelKind::DensityDependent => params.mu_tilde * powr(v, -params.alpha),
    })
}

/// Bulk viscosity λ(v) = λ̃ v^{−α} (both families).
pub fn bulk_viscosity(v: f64, params: &ModelParams) -> Result<f64> {
    check_volume(v)?;
    Ok(params.lambda_tilde * powr(v, -params.alpha))
}

/// Capillarity κ(v) = v^{−β}.
pub fn capillarity(v: f64, params: &ModelParams) -> Result<f64> {
    check_volume(v)?;
    Ok(powr(v, -params.beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(kind: ModelKind) -> ModelParams {
        ModelParams {
            kind,
            alpha: 1.0,
            beta: -2.0,
            gamma: 1.4,
            mu_tilde: 1.0,
            lambda_tilde: 2.0,
            dim: 3,
            a: 1.0,
        }
    }

    #[test]
    fn pressure_reference_values() {
        let mut p = base(ModelKind::Kazhikhov);
        assert_eq!(pressure(1.0, &p).unwrap(), 1.0);
        p.gamma = 2.0;
        assert_eq!(pressure(2.0, &p).unwrap(), 0.25);
        p.gamma = 3.0;
        assert_eq!(pressure(0.5, &p).unwrap(), 8.0);
    }

    #[test]
    fn pressure_rejects_nonpositive_volume() {
        let p = base(ModelKind::Kazhikhov);
        assert!(pressure(0.0, &p).is_err());
        assert!(pressure(-1.0, &p).is_err());
        assert!(pressure(f64::NAN, &p).is_err());
    }

    #[test]
    fn viscosity_laws() {
        // Kazhikhov, v = 2, alpha = 1, mu = 1, lambda = 2: mu stays 1, lambda halves.
        let p = base(ModelKind::Kazhikhov);
        assert_eq!(shear_viscosity(2.0, &p).unwrap(), 1.0);
        assert_eq!(bulk_viscosity(2.0, &p).unwrap(), 1.0);

        // Density-dependent at v = 1 returns the bare coefficients.
        let q = base(ModelKind::DensityDependent);
        assert_eq!(shear_viscosity(1.0, &q).unwrap(), q.mu_tilde);
        assert_eq!(bulk_viscosity(1.0, &q).unwrap(), q.lambda_tilde);
    }

    #[test]
    fn capillarity_law() {
        let mut p = base(ModelKind::Kazhikhov);
        p.beta = -2.0;
        assert_eq!(capillarity(4.0, &p).unwrap(), 16.0);
        let q = ModelParams { kind: ModelKind::DensityDependent, ..p };
        assert_eq!(capillarity(4.0, &q).unwrap(), 16.0);
    }

    #[test]
    fn validate_reports_violations() {
        let ok = ModelParams { lambda_tilde: 0.0, ..base(ModelKind::Kazhikhov) };
        assert!(ok.validate().is_empty());

        let bad_lame = ModelParams { lambda_tilde: -1.0, ..base(ModelKind::Kazhikhov) };
        let v = bad_lame.validate();
        assert_eq!(v, vec![Violation::LameCombinationNonPositive { value: -1.0 }]);

        let bad_mu = ModelParams { mu_tilde: 0.0, lambda_tilde: 1.0, dim: 2, ..base(ModelKind::Kazhikhov) };
        let v = bad_mu.validate();
        assert!(v.contains(&Violation::ShearViscosityNonPositive { mu_tilde: 0.0 }));

        let bad_gamma = ModelParams { gamma: 0.9, ..base(ModelKind::Kazhikhov) };
        assert!(bad_gamma
            .validate()
            .contains(&Violation::GammaBelowOne { gamma: 0.9 }));
    }

    #[test]
    fn coefficients_positive_and_pressure_decreasing() {
        for kind in [ModelKind::Kazhikhov, ModelKind::DensityDependent] {
            let p = base(kind);
            let vs = [0.05, 0.3, 1.0, 2.7, 11.0];
            for &v in &vs {
                assert!(shear_viscosity(v, &p).unwrap() > 0.0);
                assert!(capillarity(v, &p).unwrap() > 0.0);
            }
            for w in vs.windows(2) {
                assert!(pressure(w[0], &p).unwrap() > pressure(w[1], &p).unwrap());
            }
        }
    }

    #[test]
    fn alpha_zero_makes_families_agree() {
        let mut k = base(ModelKind::Kazhikhov);
        let mut d = base(ModelKind::DensityDependent);
        k.alpha = 0.0;
        d.alpha = 0.0;
        for &v in &[0.2, 0.9, 1.0, 3.3, 8.0] {
            assert_eq!(
                shear_viscosity(v, &k).unwrap(),
                shear_viscosity(v, &d).unwrap()
            );
            assert_eq!(bulk_viscosity(v, &k).unwrap(), bulk_viscosity(v, &d).unwrap());
            assert_eq!(capillarity(v, &k).unwrap(), capillarity(v, &d).unwrap());
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn pressure_strictly_decreasing(
                v in 0.02f64..40.0,
                step in 0.01f64..10.0,
                gamma in 1.0f64..4.0,
            ) {
                let p = ModelParams { gamma, ..base(ModelKind::Kazhikhov) };
                prop_assert!(pressure(v, &p).unwrap() > pressure(v + step, &p).unwrap());
            }

            #[test]
            fn transport_coefficients_stay_positive(
                v in 0.02f64..40.0,
                alpha in -3.0f64..3.0,
                beta in -6.0f64..1.0,
                kind in prop_oneof![Just(ModelKind::Kazhikhov), Just(ModelKind::DensityDependent)],
            ) {
                let p = ModelParams { alpha, beta, ..base(kind) };
                prop_assert!(shear_viscosity(v, &p).unwrap() > 0.0);
                prop_assert!(capillarity(v, &p).unwrap() > 0.0);
            }
        }
    }
}
