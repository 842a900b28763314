//! Time evolution under the rotating-frame generator and its steady state.

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::model::{
    build_liouvillian, vec_index, DensityMatrix, StateTolerance, StateVector9, SystemParams,
    RHO11, RHO22, RHO33,
};
use crate::ode::{integrate, OdeOptions};
use crate::scalar::{czero, re, Real, C};

/// How a steady state was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteadyStateMethod {
    NullSpace,
    ClosedForm,
}

impl SteadyStateMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::NullSpace => "NullSpace",
            Self::ClosedForm => "ClosedForm",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyState<T> {
    pub rho: DensityMatrix<T>,
    pub method: SteadyStateMethod,
    /// `max |𝓛 ρ|` over the nine components.
    pub residual: T,
}

impl<T: Real> SteadyState<T> {
    /// `Re ρ_ij` (zero-based indices).
    pub fn real(&self, i: usize, j: usize) -> T {
        self.rho.get(i, j).re
    }

    /// `Im ρ_ij` (zero-based indices).
    pub fn imag(&self, i: usize, j: usize) -> T {
        self.rho.get(i, j).im
    }
}

/// Relative singular-value threshold for the rank check.
pub const RANK_TOL: f64 = 1e-10;
/// Largest admissible steady-state residual.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Solves `𝓛 ρ = 0` with the `ρ11` equation replaced by `Tr ρ = 1`.
pub fn steady_state<T: Real>(params: &SystemParams<T>) -> Result<SteadyState<T>> {
    let l = *build_liouvillian(params)?.value();
    let rank = l.rank(T::tol(RANK_TOL));
    if rank < 8 {
        return Err(Error::DegenerateSteadyState { rank });
    }
    let mut a = l;
    for col in 0..9 {
        a[(RHO11, col)] = czero();
    }
    for col in [RHO11, RHO22, RHO33] {
        a[(RHO11, col)] = re(T::one());
    }
    let mut rhs = [czero(); 9];
    rhs[RHO11] = re(T::one());
    let v = a.solve(&rhs).ok_or(Error::SingularSystem)?;
    let rho = hermitian_part(&StateVector9 { v }.to_density());
    finish(rho, &l, SteadyStateMethod::NullSpace)
}

fn hermitian_part<T: Real>(rho: &DensityMatrix<T>) -> DensityMatrix<T> {
    let half = re(T::lit(0.5));
    let m = CMat::from_fn(|i, j| (rho.get(i, j) + rho.get(j, i).conj()) * half);
    let tr = m.trace().re;
    DensityMatrix::new_unchecked(m.scale(re(T::one() / tr)))
}

fn finish<T: Real>(
    rho: DensityMatrix<T>,
    l: &CMat<T, 9>,
    method: SteadyStateMethod,
) -> Result<SteadyState<T>> {
    rho.check(&StateTolerance::default())?;
    let residual = l
        .mul_vec(&rho.to_vector().v)
        .iter()
        .fold(T::zero(), |acc, z| acc.max(z.norm()));
    if residual > T::tol(RESIDUAL_TOL) {
        return Err(Error::InvalidState(format!("steady-state residual {residual}")));
    }
    Ok(SteadyState { rho, method, residual })
}

fn require_resonant_zero_temperature<T: Real>(params: &SystemParams<T>) -> Result<()> {
    params.validate()?;
    if params.delta_c.abs() > T::tol(1e-12) {
        return Err(Error::OutOfValidityRegime("closed forms require delta_c = 0".into()));
    }
    if !params.is_zero_temperature() {
        return Err(Error::OutOfValidityRegime("closed forms require nbar = 0".into()));
    }
    Ok(())
}

/// Closed-form steady state for `δω_c = 0`, `n̄ = 0`.
pub fn steady_state_closed_form<T: Real>(params: &SystemParams<T>) -> Result<SteadyState<T>> {
    require_resonant_zero_temperature(params)?;
    if params.omega_c <= T::zero() || params.omega_p <= T::zero() {
        return Err(Error::OutOfValidityRegime("closed forms require omega_c, omega_p > 0".into()));
    }
    let e = closed_form_elements(params.gamma, params.omega_c, params.omega_p, params.delta_p);
    let mut rho = CMat::zeros();
    rho[(0, 0)] = re(e.rho11);
    rho[(1, 1)] = re(e.rho22);
    rho[(2, 2)] = re(e.rho33);
    for ((i, j), z) in [((0, 1), e.rho12), ((0, 2), e.rho13), ((1, 2), e.rho23)] {
        rho[(i, j)] = z;
        rho[(j, i)] = z.conj();
    }
    let l = *build_liouvillian(params)?.value();
    finish(DensityMatrix::new_unchecked(rho), &l, SteadyStateMethod::ClosedForm)
}

/// The closed form where it applies, the null-space solve otherwise.
pub fn steady_state_preferred<T: Real>(params: &SystemParams<T>) -> Result<SteadyState<T>> {
    match steady_state_closed_form(params) {
        Err(Error::OutOfValidityRegime(_)) => steady_state(params),
        other => other,
    }
}

/// Steady-state elements at `δω_c = 0`, `n̄ = 0` as rational functions of
/// `(γ, Ω_c, Ω_p, δω_p)` sharing one denominator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormElements<T> {
    pub rho11: T,
    pub rho22: T,
    pub rho33: T,
    pub rho12: C<T>,
    pub rho13: C<T>,
    pub rho23: C<T>,
    pub denominator: T,
}

pub fn closed_form_elements<T: Real>(gamma: T, oc: T, op: T, dp: T) -> ClosedFormElements<T> {
    let l = T::lit;
    let g1 = gamma + T::one();
    let (oc2, op2, dp2) = (oc * oc, op * op, dp * dp);
    let dp4 = dp2 * dp2;
    let sum = oc2 + op2;
    let weighted = oc2 + gamma * op2;

    let den = l(4.0) * oc2 * dp4
        + (gamma * g1 * g1 * op2 + g1 * (g1 + l(8.0) * op2) * oc2 - l(8.0) * oc2 * oc2) * dp2
        + l(4.0) * sum * sum * weighted;

    let rho11 = l(4.0) * g1 * oc2 * op2 * dp2 / den;
    let rho22 = op2 * (gamma * (g1 * g1 + l(4.0) * oc2) * dp2 + l(4.0) * sum * weighted) / den;
    let rho33 = oc2
        * (l(4.0) * dp4 + (g1 * g1 - l(8.0) * oc2 + l(4.0) * op2) * dp2 + l(4.0) * sum * weighted)
        / den;
    let r12 = -l(4.0) * oc * op2 * weighted * dp / den;
    let i12 = l(2.0) * gamma * g1 * oc * op2 * dp2 / den;
    let r13 = l(4.0) * oc2 * op * (weighted - dp2) * dp / den;
    let i13 = l(2.0) * g1 * oc2 * op * dp2 / den;
    let r23 = l(4.0) * oc * op * (oc2 * dp2 - sum * weighted) / den;
    let i23 = -l(2.0) * g1 * weighted * oc * op * dp / den;

    ClosedFormElements {
        rho11,
        rho22,
        rho33,
        rho12: C::new(r12, i12),
        rho13: C::new(r13, i13),
        rho23: C::new(r23, i23),
        denominator: den,
    }
}

/// Options for [`propagate`].
#[derive(Clone, Copy, Debug)]
pub struct PropagateOptions<T> {
    pub ode: OdeOptions<T>,
    /// Invariants every emitted state must satisfy.
    pub state_tol: StateTolerance,
}

impl<T: Real> Default for PropagateOptions<T> {
    fn default() -> Self {
        Self {
            ode: OdeOptions::default(),
            state_tol: StateTolerance { hermiticity: 1e-12, trace: 1e-10, positivity: 1e-10 },
        }
    }
}

/// States at the accepted integration steps, starting with the initial state.
#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub points: Vec<(T, DensityMatrix<T>)>,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &DensityMatrix<T> {
        &self.points.last().expect("trajectory holds the initial state").1
    }
}

const UPPER: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Integrates `∂τ ρ̃ = 𝓛 ρ̃` up to `tau_end`.
pub fn propagate<T: Real>(
    rho0: &DensityMatrix<T>,
    params: &SystemParams<T>,
    tau_end: T,
    opts: &PropagateOptions<T>,
) -> Result<Trajectory<T>> {
    rho0.check(&StateTolerance::default())?;
    if !(tau_end > T::zero()) {
        return Err(Error::PreconditionViolated("tau_end must be > 0".into()));
    }
    let l = *build_liouvillian(params)?.value();
    let mut y = rho0.to_vector().v.to_vec();
    let mut points = vec![(T::zero(), *rho0)];
    let mut violation: Option<Error> = None;
    integrate(
        |_, y, dy| {
            for (i, j) in UPPER {
                let row = &l.data[vec_index(i, j)];
                dy[vec_index(i, j)] = row.iter().zip(y).fold(czero(), |acc, (a, b)| acc + *a * *b);
            }
            // lower coherences as conjugates so Hermitian states stay exactly Hermitian
            for (i, j) in UPPER {
                if i == j {
                    dy[vec_index(i, i)].im = T::zero();
                } else {
                    dy[vec_index(j, i)] = dy[vec_index(i, j)].conj();
                }
            }
        },
        T::zero(),
        tau_end,
        &mut y,
        &opts.ode,
        |t, y| {
            let mut v = [czero(); 9];
            v.copy_from_slice(y);
            let rho = StateVector9 { v }.to_density();
            if violation.is_none() {
                if let Err(e) = rho.check(&opts.state_tol) {
                    violation = Some(e);
                }
            }
            points.push((t, rho));
        },
    )?;
    match violation {
        Some(e) => Err(e),
        None => Ok(Trajectory { points }),
    }
}

/// Derivative of `Re ρ13` with respect to the probe detuning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RamanDerivative<T> {
    /// `(Re ρ23)² / Ω_p` evaluated at two-photon resonance.
    pub resonant_analytic: T,
    /// Richardson-extrapolated central difference at the given `δω_p`.
    pub numeric: T,
}

/// Finite-difference step for [`raman_derivative`].
pub const RAMAN_STEP: f64 = 1e-4;

pub fn raman_derivative<T: Real>(params: &SystemParams<T>) -> Result<RamanDerivative<T>> {
    require_resonant_zero_temperature(params)?;
    let at_resonance = steady_state_closed_form(&params.with_delta_p(T::zero()))?;
    let r23 = at_resonance.real(1, 2);
    let resonant_analytic = r23 * r23 / params.omega_p;
    let numeric = drho13_ddelta_p(params, T::lit(RAMAN_STEP))?;
    Ok(RamanDerivative { resonant_analytic, numeric })
}

/// `∂ Re ρ13 / ∂ δω_p` from null-space solves, central differences with one
/// Richardson level. Valid for any parameters with a unique steady state.
pub fn drho13_ddelta_p<T: Real>(params: &SystemParams<T>, h: T) -> Result<T> {
    let r13 = |d: T| -> Result<T> { Ok(steady_state(&params.with_delta_p(d))?.real(0, 2)) };
    let central = |step: T| -> Result<T> {
        Ok((r13(params.delta_p + step)? - r13(params.delta_p - step)?) / (T::lit(2.0) * step))
    };
    let coarse = central(h)?;
    let fine = central(h / T::lit(2.0))?;
    Ok((T::lit(4.0) * fine - coarse) / T::lit(3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig1() -> SystemParams<f64> {
        SystemParams::new(0.9, 0.56, 0.5)
    }

    #[test]
    fn resonant_steady_state_is_dark() {
        let ss = steady_state(&fig1()).unwrap();
        let xi: f64 = 1.12;
        assert!(ss.rho.population(0).abs() <= 1e-12);
        assert_relative_eq!(ss.rho.population(1), 1.0 / (1.0 + xi * xi), epsilon = 1e-12);
        assert_relative_eq!(ss.rho.population(2), xi * xi / (1.0 + xi * xi), epsilon = 1e-12);
        assert_relative_eq!(ss.real(1, 2), -xi / (1.0 + xi * xi), epsilon = 1e-12);
        assert!((ss.rho.population(1) - 0.44358).abs() < 1e-5);
        assert!((ss.real(1, 2) + 0.49680).abs() < 1e-5);
        for (i, j) in [(0, 1), (0, 2)] {
            assert!(ss.rho.get(i, j).norm() < 1e-12);
        }
        assert!(ss.imag(1, 2).abs() < 1e-12);
        assert!(ss.residual <= 1e-10);
        assert_eq!(ss.method, SteadyStateMethod::NullSpace);
    }

    #[test]
    fn equal_rabi_frequencies_give_dark_projector() {
        let ss = steady_state(&SystemParams::<f64>::new(1.0, 0.7, 0.7)).unwrap();
        assert_relative_eq!(ss.rho.population(1), 0.5, epsilon = 1e-12);
        assert_relative_eq!(ss.rho.population(2), 0.5, epsilon = 1e-12);
        assert_relative_eq!(ss.real(1, 2), -0.5, epsilon = 1e-12);
        assert!(ss.rho.population(0).abs() < 1e-12);
    }

    #[test]
    fn probe_off_pumps_into_ground_three() {
        let ss = steady_state(&SystemParams::new(0.9, 0.8, 0.0)).unwrap();
        assert_relative_eq!(ss.rho.population(2), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn undriven_system_is_degenerate() {
        let err = steady_state(&SystemParams::new(0.9, 0.0, 0.0)).unwrap_err();
        assert_eq!(err, Error::DegenerateSteadyState { rank: 5 });
    }

    #[test]
    fn closed_form_matches_null_space_off_resonance() {
        let p = fig1().with_delta_p(0.8);
        let cf = steady_state_closed_form(&p).unwrap();
        let ns = steady_state(&p).unwrap();
        assert!(cf.rho.distance(&ns.rho) < 1e-10);
        assert_eq!(cf.method, SteadyStateMethod::ClosedForm);
    }

    #[test]
    fn closed_form_resonance_and_parity() {
        let cf0 = steady_state_closed_form(&fig1()).unwrap();
        assert_eq!(cf0.rho.get(0, 2), C::new(0.0, 0.0));
        let plus = steady_state_closed_form(&fig1().with_delta_p(0.8)).unwrap();
        let minus = steady_state_closed_form(&fig1().with_delta_p(-0.8)).unwrap();
        assert_relative_eq!(plus.real(0, 2), -minus.real(0, 2), epsilon = 1e-15);
        assert_relative_eq!(plus.imag(0, 2), minus.imag(0, 2), epsilon = 1e-15);
    }

    #[test]
    fn closed_form_regime_checks() {
        let p = fig1().with_detunings(0.1, 0.0);
        assert!(matches!(steady_state_closed_form(&p), Err(Error::OutOfValidityRegime(_))));
        let p = fig1().with_occupations(0.1, 0.1);
        assert!(matches!(steady_state_closed_form(&p), Err(Error::OutOfValidityRegime(_))));
        let p = SystemParams::new(0.9, 0.0, 0.5);
        assert!(matches!(steady_state_closed_form(&p), Err(Error::OutOfValidityRegime(_))));
        // 𝒜 = 47 is zero temperature for all practical purposes
        let p = fig1().with_equal_gaps(47.0);
        assert!(steady_state_closed_form(&p).is_ok());
    }

    #[test]
    fn raman_derivative_examples() {
        let d = raman_derivative(&SystemParams::<f64>::new(0.9, 0.5, 0.5)).unwrap();
        assert_relative_eq!(d.resonant_analytic, 0.5, epsilon = 1e-12);
        assert!((d.numeric - d.resonant_analytic).abs() / d.resonant_analytic <= 1e-6);

        let d = raman_derivative(&fig1()).unwrap();
        assert!((d.numeric - d.resonant_analytic).abs() / d.resonant_analytic <= 1e-6);

        let strong = raman_derivative(&SystemParams::new(0.9, 500.0, 0.5)).unwrap();
        assert!(strong.resonant_analytic < 1e-5);
    }

    #[test]
    fn propagation_pure_decay() {
        let p = SystemParams::<f64>::new(0.9, 0.0, 0.0);
        let traj = propagate(&DensityMatrix::basis(0), &p, 5.0, &PropagateOptions::default()).unwrap();
        for (tau, rho) in &traj.points {
            assert!((rho.population(0) - (-1.9 * tau).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn propagation_fixed_point_is_constant() {
        let p = fig1().with_delta_p(0.4).with_occupations(0.1, 0.05);
        let ss = steady_state(&p).unwrap();
        let traj = propagate(&ss.rho, &p, 20.0, &PropagateOptions::default()).unwrap();
        for (_, rho) in &traj.points {
            assert!(rho.distance(&ss.rho) < 1e-9);
        }
    }

    #[test]
    fn propagation_converges_to_steady_state() {
        let p = fig1();
        let traj = propagate(&DensityMatrix::basis(2), &p, 200.0, &PropagateOptions::default()).unwrap();
        let ss = steady_state(&p).unwrap();
        assert!(traj.last().distance(&ss.rho) < 1e-8);
    }

    #[test]
    fn propagate_rejects_bad_inputs() {
        let p = fig1();
        assert!(propagate(&DensityMatrix::basis(0), &p, 0.0, &PropagateOptions::default()).is_err());
        let mut bad = DensityMatrix::<f64>::basis(0);
        bad.rho[(1, 1)] = C::new(0.5, 0.0);
        assert!(propagate(&bad, &p, 1.0, &PropagateOptions::default()).is_err());
    }
}
