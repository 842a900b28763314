//! Linear optical response of a vapour of Λ atoms to the probe field.
//!
//! Internally Gaussian units; group velocities are reported in m/s.

use crate::dynamics::{drho13_ddelta_p, steady_state, steady_state_closed_form, steady_state_preferred, RAMAN_STEP};
use crate::error::{Error, Result};
use crate::fcs::fano_resonant;
use crate::model::SystemParams;
use crate::scalar::{Real, C};

/// Speed of light in m/s.
pub const C_SI: f64 = 2.99792458e8;
/// Speed of light in cm/s.
pub const C_CGS: f64 = 2.99792458e10;
/// Reduced Planck constant in erg·s.
pub const HBAR_CGS: f64 = 1.054571817e-27;
/// Planck constant in erg·s.
pub const H_CGS: f64 = 6.62607015e-27;
/// 1 erg s⁻¹ cm⁻² in mW/cm².
pub const ERG_FLUX_TO_MW_CM2: f64 = 1e-4;
/// `|4πχ|` above which the linear response is not trusted.
pub const LINEARITY_LIMIT: f64 = 0.1;

/// Atomic medium probed on the `|1⟩ ↔ |3⟩` transition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MediumParams<T> {
    /// Atom number density in cm⁻³.
    pub n_density: T,
    /// `|d13|` in statC·cm.
    pub dipole_13: T,
    /// `γ13` in s⁻¹.
    pub gamma13_si: T,
    /// Probe wavelength in cm.
    pub lambda_p: T,
    /// `ω_p / γ13`.
    pub omega_p_scaled: T,
    /// `Ω_p` in units of `γ13`.
    pub omega_p_rabi: T,
    /// Fixes `𝒩 = 2π N_d ω_p/Ω_p` instead of deriving it from the atomic data.
    pub cal_n_pinned: Option<T>,
}

impl<T: Real> MediumParams<T> {
    /// Medium with `ω_p/γ13` derived from the wavelength.
    pub fn new(n_density: T, dipole_13: T, gamma13_si: T, lambda_p: T, omega_p_rabi: T) -> Self {
        let omega_p_scaled = T::TAU() * T::lit(C_CGS) / lambda_p / gamma13_si;
        Self {
            n_density,
            dipole_13,
            gamma13_si,
            lambda_p,
            omega_p_scaled,
            omega_p_rabi,
            cal_n_pinned: None,
        }
    }

    pub fn with_cal_n(mut self, cal_n: T) -> Self {
        self.cal_n_pinned = Some(cal_n);
        self
    }

    /// Sodium vapour of the slow-light experiment at 589 nm.
    pub fn sodium() -> Self {
        Self::new(T::lit(8e13), T::lit(4.2e-18), T::lit(0.62e8), T::lit(589e-7), T::lit(0.2))
            .with_cal_n(T::lit(1.78e8))
    }

    /// Caesium D1 line at 894 nm.
    pub fn caesium() -> Self {
        Self::new(T::lit(1e12), T::lit(8.09e-18), T::lit(1e8), T::lit(894e-7), T::lit(0.5))
            .with_cal_n(T::lit(3.2e7))
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("n_density", self.n_density),
            ("dipole_13", self.dipole_13),
            ("gamma13_si", self.gamma13_si),
            ("lambda_p", self.lambda_p),
            ("omega_p_scaled", self.omega_p_scaled),
            ("omega_p_rabi", self.omega_p_rabi),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::InvalidParams(format!("medium {name} must be finite and > 0, got {v}")));
            }
        }
        if let Some(n) = self.cal_n_pinned {
            if !(n.is_finite() && n > T::zero()) {
                return Err(Error::InvalidParams(format!("medium cal_n must be > 0, got {n}")));
            }
        }
        let expected = T::TAU() * T::lit(C_CGS) / self.lambda_p / self.gamma13_si;
        if ((self.omega_p_scaled - expected) / expected).abs() > T::lit(1e-3) {
            return Err(Error::InvalidParams(format!(
                "omega_p_scaled {} inconsistent with lambda_p (expected {expected})",
                self.omega_p_scaled
            )));
        }
        Ok(())
    }

    /// `N |d13|² / (ħ Ω_p γ13)` from the atomic data.
    pub fn n_d_physical(&self) -> T {
        self.n_density * self.dipole_13 * self.dipole_13
            / (T::lit(HBAR_CGS) * self.omega_p_rabi * self.gamma13_si)
    }

    /// `𝒩 = 2π N_d ω_p / Ω_p`, pinned or derived.
    pub fn cal_n(&self) -> T {
        self.cal_n_pinned
            .unwrap_or_else(|| T::TAU() * self.n_d_physical() * self.omega_p_scaled / self.omega_p_rabi)
    }

    /// `N_d` consistent with [`cal_n`](Self::cal_n).
    pub fn n_d(&self) -> T {
        self.cal_n() * self.omega_p_rabi / (T::TAU() * self.omega_p_scaled)
    }

    /// `c / (1 + 𝒩/4)` in m/s.
    pub fn v_g_min(&self) -> T {
        T::lit(C_SI) / (T::one() + self.cal_n() / T::lit(4.0))
    }

    fn check_probe(&self, params: &SystemParams<T>) -> Result<()> {
        self.validate()?;
        let rel = ((params.omega_p - self.omega_p_rabi) / self.omega_p_rabi).abs();
        if rel > T::tol(1e-12) {
            return Err(Error::PreconditionViolated(format!(
                "system omega_p {} differs from the medium's {}",
                params.omega_p, self.omega_p_rabi
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OpticalResponse<T> {
    pub chi: C<T>,
    /// `1 + 2π χ^R`
    pub eta: T,
    /// Absorption coefficient in cm⁻¹.
    pub alpha: T,
}

/// `χ = N_d ρ̃13` with refractive index and absorption. The coherence comes
/// from the closed form where it applies, otherwise from the null-space solve.
pub fn susceptibility<T: Real>(
    params: &SystemParams<T>,
    medium: &MediumParams<T>,
) -> Result<OpticalResponse<T>> {
    medium.check_probe(params)?;
    let ss = steady_state_preferred(params)?;
    response_from_coherence(ss.rho.get(0, 2), medium)
}

/// Optical response for a given steady-state `ρ̃13`.
pub fn response_from_coherence<T: Real>(rho13: C<T>, medium: &MediumParams<T>) -> Result<OpticalResponse<T>> {
    let chi = rho13 * medium.n_d();
    let magnitude = T::lit(4.0) * T::PI() * chi.norm();
    if magnitude >= T::lit(LINEARITY_LIMIT) {
        return Err(Error::LinearizationViolated { magnitude: magnitude.to_f64().unwrap_or(f64::NAN) });
    }
    let eta = T::one() + T::TAU() * chi.re;
    let omega_si = medium.omega_p_scaled * medium.gamma13_si;
    let alpha = omega_si / T::lit(C_CGS) * T::lit(4.0) * T::PI() * chi.im;
    Ok(OpticalResponse { chi, eta, alpha })
}

/// Which expression produced a group velocity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupVelocityMethod {
    /// `c / [1 + 2πN_d ρ^R13 + 2π ω_p N_d ∂ρ^R13/∂ω_p]` with a numerical derivative.
    General,
    /// `c / [1 + 𝒩 (ρ^R23)²]` at two-photon resonance.
    Resonant,
}

impl GroupVelocityMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::General => "General",
            Self::Resonant => "Resonant",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupVelocity<T> {
    /// m/s
    pub v_g: T,
    pub method: GroupVelocityMethod,
}

fn at_two_photon_resonance<T: Real>(params: &SystemParams<T>) -> bool {
    params.delta_p.abs() <= T::tol(1e-12)
        && params.delta_c.abs() <= T::tol(1e-12)
        && params.is_zero_temperature()
        && params.omega_c > T::zero()
}

fn checked_velocity<T: Real>(denominator: T, method: GroupVelocityMethod) -> Result<GroupVelocity<T>> {
    let v_g = T::lit(C_SI) / denominator;
    if !(v_g > T::zero() && v_g <= T::lit(C_SI) && v_g.is_finite()) {
        return Err(Error::GroupVelocityOutOfRange { v_g: v_g.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(GroupVelocity { v_g, method })
}

/// Group velocity of the probe; the resonant expression is used at exact
/// two-photon resonance and zero occupation, the general one elsewhere.
pub fn group_velocity<T: Real>(
    params: &SystemParams<T>,
    medium: &MediumParams<T>,
) -> Result<GroupVelocity<T>> {
    if at_two_photon_resonance(params) {
        medium.check_probe(params)?;
        let r23 = steady_state_closed_form(params)?.real(1, 2);
        checked_velocity(T::one() + medium.cal_n() * r23 * r23, GroupVelocityMethod::Resonant)
    } else {
        group_velocity_general(params, medium)
    }
}

/// The general expression, regardless of detuning.
pub fn group_velocity_general<T: Real>(
    params: &SystemParams<T>,
    medium: &MediumParams<T>,
) -> Result<GroupVelocity<T>> {
    medium.check_probe(params)?;
    let n_d = medium.n_d();
    let r13 = steady_state(params)?.real(0, 2);
    let slope = drho13_ddelta_p(params, T::lit(RAMAN_STEP))?;
    let denominator =
        T::one() + T::TAU() * n_d * r13 + T::TAU() * medium.omega_p_scaled * n_d * slope;
    checked_velocity(denominator, GroupVelocityMethod::General)
}

/// `c / [1 + 𝒩/(ξ + 1/ξ)²]` in m/s.
pub fn group_velocity_resonant<T: Real>(cal_n: T, xi: T) -> T {
    let s = xi + xi.recip();
    T::lit(C_SI) / (T::one() + cal_n / (s * s))
}

/// The two Rabi-frequency ratios `ξ₊ ≥ 1 ≥ ξ₋` giving group velocity `v_g`.
pub fn xi_from_vg<T: Real>(v_g: T, medium: &MediumParams<T>) -> Result<(T, T)> {
    let c = T::lit(C_SI);
    let v_min = medium.v_g_min();
    let out_of_range = || Error::VelocityOutOfRange {
        v_g: v_g.to_f64().unwrap_or(f64::NAN),
        v_min: v_min.to_f64().unwrap_or(f64::NAN),
    };
    if !(v_g >= v_min * (T::one() - T::tol(1e-12)) && v_g < c) {
        return Err(out_of_range());
    }
    let r = medium.cal_n() / (c / v_g - T::one());
    let disc = (r - T::lit(4.0)).max(T::zero());
    let (sr, sd) = (r.sqrt(), disc.sqrt());
    let xi_plus = (sr + sd) / T::lit(2.0);
    // 2/(√r + √(r−4)) equals ½(√r − √(r−4)) without the cancellation
    let xi_minus = T::lit(2.0) / (sr + sd);
    Ok((xi_plus, xi_minus))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `ξ ≥ 1`
    Upper,
    /// `ξ < 1`
    Lower,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Upper => "upper",
            Self::Lower => "lower",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TradeoffPoint<T> {
    pub xi: T,
    /// m/s
    pub v_g: T,
    pub fano: T,
    pub branch: Branch,
}

/// Group velocity and Fano factor along `ξ` at two-photon resonance.
pub fn tradeoff_curve<T: Real>(medium: &MediumParams<T>, gamma: T, xi_grid: &[T]) -> Vec<TradeoffPoint<T>> {
    let cal_n = medium.cal_n();
    xi_grid
        .iter()
        .map(|&xi| TradeoffPoint {
            xi,
            v_g: group_velocity_resonant(cal_n, xi),
            fano: fano_resonant(gamma, xi),
            branch: if xi >= T::one() { Branch::Upper } else { Branch::Lower },
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransparencyWindow<T> {
    /// `Ω_p (ξ² + 1)² / ξ²` in units of `γ13`.
    pub width: T,
    /// Set when `ξ < 1`, where the width grows without bound.
    pub advisory: Option<String>,
}

pub fn transparency_window<T: Real>(params: &SystemParams<T>) -> Result<TransparencyWindow<T>> {
    if !(params.omega_c > T::zero() && params.omega_p > T::zero()) {
        return Err(Error::PreconditionViolated("transparency window needs omega_c, omega_p > 0".into()));
    }
    let xi = params.omega_c / params.omega_p;
    let x2 = xi * xi;
    let width = params.omega_p * (x2 + T::one()) * (x2 + T::one()) / x2;
    let advisory = (xi < T::one())
        .then(|| format!("xi = {xi} < 1: window formula diverges as xi -> 0 (CPT side)"));
    Ok(TransparencyWindow { width, advisory })
}

/// Mean laser intensity in mW/cm² for a Rabi frequency `omega_rabi` (rad/s),
/// decay rate `gamma_ij` (s⁻¹) and wavelength `lambda` (cm):
/// `2π h c Ω² / (3 γ λ³)`.
pub fn intensity_from_rabi<T: Real>(omega_rabi: T, gamma_ij: T, lambda: T) -> T {
    let k = T::TAU() * T::lit(H_CGS) * T::lit(C_CGS) / (T::lit(3.0) * gamma_ij * lambda.powi(3));
    k * omega_rabi * omega_rabi * T::lit(ERG_FLUX_TO_MW_CM2)
}

/// Inverse of [`intensity_from_rabi`]; returns `Ω` in rad/s.
pub fn rabi_from_intensity<T: Real>(intensity: T, gamma_ij: T, lambda: T) -> T {
    let k = T::TAU() * T::lit(H_CGS) * T::lit(C_CGS) / (T::lit(3.0) * gamma_ij * lambda.powi(3));
    (intensity / T::lit(ERG_FLUX_TO_MW_CM2) / k).sqrt()
}
