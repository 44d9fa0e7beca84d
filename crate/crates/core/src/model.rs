//! Level schemes of the ⁸⁷Rb D-line four-level atom.
//!
//! Levels are labelled 1..4: |1⟩ = 5S½ F=1, |2⟩ = 5S½ F=2 and two excited
//! hyperfine states |3⟩, |4⟩. Both schemes share the decay structure
//! (|3⟩, |4⟩ → |1⟩, |2⟩) and differ only in which transitions the lasers
//! drive:
//!
//! * double-Λ: the probe drives 1↔3 and 1↔4, the coupling field 2↔3 and
//!   2↔4; the excited states are split by `omega`.
//! * N-type: probe on 1↔3, coupling on 2↔3, switching field on 2↔4.
//!
//! Decay rates follow the amplitude convention of the generating-function
//! equations: the population of |3⟩ decays at `2·Γ₃ = 2·(γ₃₁ + γ₃₂)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{finite, rate, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    DoubleLambda,
    NType,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::DoubleLambda => "double_lambda",
            ModelKind::NType => "n_type",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "double_lambda" | "doublelambda" => Ok(ModelKind::DoubleLambda),
            "n_type" | "ntype" => Ok(ModelKind::NType),
            _ => Err(Error::UnknownModelKind(s.to_string())),
        }
    }
}

/// Spontaneous decay rates `γ_k→i` (MHz) of the four dipole-allowed channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRates {
    pub gamma31: f64,
    pub gamma32: f64,
    pub gamma41: f64,
    pub gamma42: f64,
}

impl DecayRates {
    /// `γ₃₁ = γ₃₂ = γ₄₁ = γ₄₂ = 1.4375 MHz`, the double-Λ (D1 line) set.
    pub const D1: DecayRates = DecayRates {
        gamma31: 1.4375,
        gamma32: 1.4375,
        gamma41: 1.4375,
        gamma42: 1.4375,
    };

    /// `γ₃₁ = γ₃₂ = 1.4375 MHz`, `γ₄₁ = γ₄₂ = 1.5167 MHz`, the N-type set
    /// with |4⟩ on the D2 line.
    pub const D1_D2: DecayRates = DecayRates {
        gamma31: 1.4375,
        gamma32: 1.4375,
        gamma41: 1.5167,
        gamma42: 1.5167,
    };

    fn validate(&self) -> Result<()> {
        rate("gamma31", self.gamma31)?;
        rate("gamma32", self.gamma32)?;
        rate("gamma41", self.gamma41)?;
        rate("gamma42", self.gamma42)?;
        Ok(())
    }
}

/// Cross-damping rate `γ_kiil = β·√(γ_kiik·γ_liil)` between two decay
/// channels ending on the same lower level.
pub fn gdc_cross(beta: f64, gamma_a: f64, gamma_b: f64) -> Result<f64> {
    check_beta(beta)?;
    let a = rate("gamma_a", gamma_a)?;
    let b = rate("gamma_b", gamma_b)?;
    Ok(beta * (a * b).sqrt())
}

fn check_beta(beta: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&beta) {
        Ok(beta)
    } else {
        Err(Error::BetaOutOfRange(beta))
    }
}

/// Every decay constant entering the equations of motion, cross terms
/// included. Normally derived from an [`AtomModel`]; kept separate so the
/// cross terms can be set by hand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayChannels {
    pub gamma31: f64,
    pub gamma32: f64,
    pub gamma41: f64,
    pub gamma42: f64,
    pub gamma314: f64,
    pub gamma324: f64,
}

impl DecayChannels {
    pub fn big_gamma3(&self) -> f64 {
        self.gamma31 + self.gamma32
    }

    pub fn big_gamma4(&self) -> f64 {
        self.gamma41 + self.gamma42
    }

    pub fn big_gamma34(&self) -> f64 {
        self.gamma314 + self.gamma324
    }
}

/// Level structure and dissipation of the atom. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomModel {
    kind: ModelKind,
    rates: DecayRates,
    beta: f64,
    omega: f64,
}

impl AtomModel {
    /// `omega` is the excited-state splitting `ω₄ − ω₃`; only the double-Λ
    /// scheme uses it.
    pub fn new(kind: ModelKind, rates: DecayRates, beta: f64, omega: f64) -> Result<Self> {
        rates.validate()?;
        check_beta(beta)?;
        finite("omega", omega)?;
        Ok(AtomModel {
            kind,
            rates,
            beta,
            omega,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn rates(&self) -> DecayRates {
        self.rates
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Copy of the model with a different SGC factor.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        AtomModel::new(self.kind, self.rates, beta, self.omega)
    }

    pub fn gamma314(&self) -> f64 {
        self.beta * (self.rates.gamma31 * self.rates.gamma41).sqrt()
    }

    pub fn gamma324(&self) -> f64 {
        self.beta * (self.rates.gamma32 * self.rates.gamma42).sqrt()
    }

    pub fn big_gamma3(&self) -> f64 {
        self.channels().big_gamma3()
    }

    pub fn big_gamma4(&self) -> f64 {
        self.channels().big_gamma4()
    }

    pub fn big_gamma34(&self) -> f64 {
        self.channels().big_gamma34()
    }

    pub fn channels(&self) -> DecayChannels {
        DecayChannels {
            gamma31: self.rates.gamma31,
            gamma32: self.rates.gamma32,
            gamma41: self.rates.gamma41,
            gamma42: self.rates.gamma42,
            gamma314: self.gamma314(),
            gamma324: self.gamma324(),
        }
    }
}

/// Rabi frequencies and detunings (MHz) of the probe, coupling and switching
/// fields. `omega_s` and `delta_s` are ignored by the double-Λ scheme.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    pub omega_p: f64,
    pub omega_c: f64,
    pub omega_s: f64,
    pub delta_p: f64,
    pub delta_c: f64,
    pub delta_s: f64,
}

impl DriveConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_p", self.omega_p),
            ("omega_c", self.omega_c),
            ("omega_s", self.omega_s),
        ] {
            finite(name, v)?;
            if v < 0.0 {
                return Err(Error::Negative { name, value: v });
            }
        }
        finite("delta_p", self.delta_p)?;
        finite("delta_c", self.delta_c)?;
        finite("delta_s", self.delta_s)?;
        Ok(())
    }

    /// Largest frequency scale of the drive, used to bound integrator steps.
    pub fn max_frequency(&self) -> f64 {
        [
            self.omega_p,
            self.omega_c,
            self.omega_s,
            self.delta_p.abs(),
            self.delta_c.abs(),
            self.delta_s.abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleLambdaParams {
    pub rates: DecayRates,
    pub beta: f64,
    pub omega: f64,
    pub omega_p: f64,
    pub omega_c: f64,
    pub delta_p: f64,
    pub delta_c: f64,
}

impl Default for DoubleLambdaParams {
    /// ⁸⁷Rb D1 rates, `ω = 814.5 MHz`, `Ω_p = 0.1ω`, `Ω_c = ω`, no SGC.
    fn default() -> Self {
        let omega = 814.5;
        DoubleLambdaParams {
            rates: DecayRates::D1,
            beta: 0.0,
            omega,
            omega_p: 0.1 * omega,
            omega_c: omega,
            delta_p: 0.0,
            delta_c: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NTypeParams {
    pub rates: DecayRates,
    pub beta: f64,
    pub omega_p: f64,
    pub omega_c: f64,
    pub omega_s: f64,
    pub delta_p: f64,
    pub delta_c: f64,
    pub delta_s: f64,
}

impl Default for NTypeParams {
    /// Giant-Kerr configuration: `Ω_p = 1.5`, `Ω_c = 11`, `Ω_s = 14 MHz`,
    /// resonant coupling and switching fields, no SGC.
    fn default() -> Self {
        NTypeParams {
            rates: DecayRates::D1_D2,
            beta: 0.0,
            omega_p: 1.5,
            omega_c: 11.0,
            omega_s: 14.0,
            delta_p: 0.0,
            delta_c: 0.0,
            delta_s: 0.0,
        }
    }
}

pub fn build_double_lambda(params: &DoubleLambdaParams) -> Result<(AtomModel, DriveConfig)> {
    let model = AtomModel::new(ModelKind::DoubleLambda, params.rates, params.beta, params.omega)?;
    let drive = DriveConfig {
        omega_p: params.omega_p,
        omega_c: params.omega_c,
        omega_s: 0.0,
        delta_p: params.delta_p,
        delta_c: params.delta_c,
        delta_s: 0.0,
    };
    drive.validate()?;
    Ok((model, drive))
}

pub fn build_n_type(params: &NTypeParams) -> Result<(AtomModel, DriveConfig)> {
    let model = AtomModel::new(ModelKind::NType, params.rates, params.beta, 0.0)?;
    let drive = DriveConfig {
        omega_p: params.omega_p,
        omega_c: params.omega_c,
        omega_s: params.omega_s,
        delta_p: params.delta_p,
        delta_c: params.delta_c,
        delta_s: params.delta_s,
    };
    drive.validate()?;
    Ok((model, drive))
}
