//! Dressed states of the driven Λ system and dark-state diagnostics.
//!
//! With equal detunings `δω_p = δω_c = δ` the effective Hamiltonian has one
//! zero-energy eigenvector (the dark state) and a bright pair split by the
//! generalized Rabi frequency.

use crate::dynamics::steady_state_preferred;
use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::model::{DensityMatrix, SystemParams};
use crate::scalar::{czero, re, Real, C};

/// `H_eff/ħ = −δω_p|1⟩⟨1| − (δω_p−δω_c)|2⟩⟨2| − (Ω_p|1⟩⟨3| + Ω_c|1⟩⟨2| + h.c.)`.
pub fn effective_hamiltonian<T: Real>(params: &SystemParams<T>) -> CMat<T, 3> {
    let mut h = CMat::zeros();
    h[(0, 0)] = re(-params.delta_p);
    h[(1, 1)] = re(-(params.delta_p - params.delta_c));
    h[(0, 1)] = re(-params.omega_c);
    h[(1, 0)] = re(-params.omega_c);
    h[(0, 2)] = re(-params.omega_p);
    h[(2, 0)] = re(-params.omega_p);
    h
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DressedSystem<T> {
    /// Always zero: the dark state decouples from the light.
    pub lambda_0: T,
    /// `½(−δ + √(δ² + 4Ω²))`
    pub lambda_plus: T,
    /// `½(−δ − √(δ² + 4Ω²))`
    pub lambda_minus: T,
    /// `atan(Ω_p/Ω_c)`
    pub theta: T,
    /// `½ atan2(2Ω, δ)` with `Ω² = Ω_p² + Ω_c²`.
    pub phi: T,
    /// `cosθ|3⟩ − sinθ|2⟩`
    pub dark: CVec<T, 3>,
    /// `cosφ|b⟩ − sinφ|1⟩` with the bright state `|b⟩ = cosθ|2⟩ + sinθ|3⟩`.
    pub plus: CVec<T, 3>,
    /// `sinφ|b⟩ + cosφ|1⟩`
    pub minus: CVec<T, 3>,
}

impl<T: Real> DressedSystem<T> {
    /// `(eigenvalue, eigenvector)` pairs in the order `0, +, −`.
    pub fn pairs(&self) -> [(T, CVec<T, 3>); 3] {
        [(self.lambda_0, self.dark), (self.lambda_plus, self.plus), (self.lambda_minus, self.minus)]
    }

    /// Largest `‖H v − λ v‖` over the three pairs.
    pub fn residual(&self, h: &CMat<T, 3>) -> T {
        self.pairs().iter().fold(T::zero(), |acc, (l, v)| {
            let hv = h.mul_vec(v);
            let r = (0..3).map(|k| (hv[k] - v[k] * *l).norm_sqr()).sum::<T>().sqrt();
            acc.max(r)
        })
    }

    /// Largest `|⟨u|v⟩ − δ_uv|` over the eigenvectors.
    pub fn orthonormality_error(&self) -> T {
        let vs = [self.dark, self.plus, self.minus];
        let mut worst = T::zero();
        for (i, u) in vs.iter().enumerate() {
            for (j, v) in vs.iter().enumerate() {
                let expected = if i == j { T::one() } else { T::zero() };
                worst = worst.max((inner(u, v) - re(expected)).norm());
            }
        }
        worst
    }
}

/// `⟨u|v⟩`
pub fn inner<T: Real>(u: &CVec<T, 3>, v: &CVec<T, 3>) -> C<T> {
    u.iter().zip(v).fold(czero(), |acc, (a, b)| acc + a.conj() * *b)
}

fn require_equal_detunings<T: Real>(params: &SystemParams<T>) -> Result<()> {
    if (params.delta_p - params.delta_c).abs() > T::tol(1e-12) {
        return Err(Error::PreconditionViolated(format!(
            "dressed states need delta_p = delta_c, got {} and {}",
            params.delta_p, params.delta_c
        )));
    }
    Ok(())
}

/// Closed-form eigensystem of [`effective_hamiltonian`] at equal detunings.
pub fn dressed_eigensystem<T: Real>(params: &SystemParams<T>) -> Result<DressedSystem<T>> {
    params.validate()?;
    require_equal_detunings(params)?;
    let delta = params.delta_p;
    let (oc, op) = (params.omega_c, params.omega_p);
    let omega = oc.hypot(op);
    let theta = op.atan2(oc);
    let phi = (T::lit(2.0) * omega).atan2(delta) / T::lit(2.0);
    let root = (delta * delta + T::lit(4.0) * omega * omega).sqrt();
    let half = T::lit(0.5);
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Ok(DressedSystem {
        lambda_0: T::zero(),
        lambda_plus: half * (-delta + root),
        lambda_minus: half * (-delta - root),
        theta,
        phi,
        dark: [czero(), re(-st), re(ct)],
        plus: [re(-sp), re(cp * ct), re(cp * st)],
        minus: [re(cp), re(sp * ct), re(sp * st)],
    })
}

/// `|ρ̃12 + ρ̃13|` at steady state; vanishes at two-photon resonance.
pub fn interference_amplitude<T: Real>(params: &SystemParams<T>) -> Result<T> {
    let ss = steady_state_preferred(params)?;
    Ok((ss.rho.get(0, 1) + ss.rho.get(0, 2)).norm())
}

/// Population `⟨0|ρ|0⟩` of the dark state.
pub fn dark_state_overlap<T: Real>(rho: &DensityMatrix<T>, params: &SystemParams<T>) -> Result<T> {
    let d = dressed_eigensystem(params)?.dark;
    let rd = rho.rho.mul_vec(&d);
    Ok(inner(&d, &rd).re.max(T::zero()).min(T::one()))
}

/// Multiplies by the phase that makes the largest-magnitude component real
/// and positive.
pub fn normalize_phase<T: Real>(v: &CVec<T, 3>) -> CVec<T, 3> {
    let big = v.iter().fold(czero::<T>(), |acc, z| if z.norm() > acc.norm() { *z } else { acc });
    if big.norm() == T::zero() {
        return *v;
    }
    let phase = big.conj() / re(big.norm());
    [v[0] * phase, v[1] * phase, v[2] * phase]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::dynamics::steady_state;

    fn close(a: &CVec<f64, 3>, b: &CVec<f64, 3>, tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn hamiltonian_read_off() {
        let h = effective_hamiltonian(&SystemParams::<f64>::new(0.9, 0.0, 0.0));
        assert_eq!(h, CMat::zeros());
        let h = effective_hamiltonian(&SystemParams::<f64>::new(0.9, 0.56, 0.5));
        assert_eq!(h.trace(), C::new(0.0, 0.0));
        assert_eq!(h[(0, 1)], C::new(-0.56, 0.0));
        assert_eq!(h[(0, 2)], C::new(-0.5, 0.0));
        assert_eq!(h, h.adjoint());
    }

    #[test]
    fn eigensystem_invariants() {
        for (d, oc, op) in [(0.0, 0.56, 0.5), (0.8, 0.3, 1.7), (-2.0, 1.0, 0.01), (0.4, 0.0, 0.6)] {
            let p = SystemParams::<f64>::new(0.9, oc, op).with_detunings(d, d);
            let ds = dressed_eigensystem(&p).unwrap();
            let h = effective_hamiltonian(&p);
            assert!(ds.residual(&h) <= 1e-10);
            assert!(ds.orthonormality_error() <= 1e-12);
        }
    }

    #[test]
    fn strong_control_limit() {
        let p = SystemParams::<f64>::new(0.9, 1000.0, 1.0);
        let ds = dressed_eigensystem(&p).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(&ds.dark, &[C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)], 1e-3));
        assert_relative_eq!(ds.lambda_plus, 1000.0, max_relative = 1e-3);
        assert_relative_eq!(ds.lambda_minus, -1000.0, max_relative = 1e-3);
        assert!(close(&ds.plus, &[C::new(-s, 0.0), C::new(s, 0.0), C::new(0.0, 0.0)], 1e-3));
        assert!(close(&ds.minus, &[C::new(s, 0.0), C::new(s, 0.0), C::new(0.0, 0.0)], 1e-3));
    }

    #[test]
    fn equal_rabi_and_resonance() {
        let p = SystemParams::<f64>::new(0.9, 0.7, 0.7);
        let ds = dressed_eigensystem(&p).unwrap();
        assert_relative_eq!(ds.theta, std::f64::consts::FRAC_PI_4, epsilon = 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(&ds.dark, &[C::new(0.0, 0.0), C::new(-s, 0.0), C::new(s, 0.0)], 1e-15));
        assert_relative_eq!(ds.lambda_plus, 0.7 * 2f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(ds.lambda_minus, -0.7 * 2f64.sqrt(), epsilon = 1e-14);

        let hd = effective_hamiltonian(&SystemParams::<f64>::new(0.9, 0.3, 1.1)).mul_vec(
            &dressed_eigensystem(&SystemParams::new(0.9, 0.3, 1.1)).unwrap().dark,
        );
        assert!(hd.iter().all(|z| z.norm() <= 1e-12));
    }

    #[test]
    fn unequal_detunings_rejected() {
        let p = SystemParams::<f64>::new(0.9, 0.5, 0.5).with_detunings(0.1, 0.2);
        assert!(matches!(dressed_eigensystem(&p), Err(Error::PreconditionViolated(_))));
        let rho = DensityMatrix::basis(0);
        assert!(dark_state_overlap(&rho, &p).is_err());
    }

    #[test]
    fn bright_pair_dipole_sum_vanishes_on_resonance() {
        // dipoles on |1⟩↔|2⟩ and |1⟩↔|3⟩ only
        let mut d = CMat::<f64, 3>::zeros();
        d[(0, 1)] = C::new(0.8, 0.0);
        d[(1, 0)] = C::new(0.8, 0.0);
        d[(0, 2)] = C::new(1.3, 0.0);
        d[(2, 0)] = C::new(1.3, 0.0);
        let ds = dressed_eigensystem(&SystemParams::new(0.9, 5.0, 0.4)).unwrap();
        let three = [C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)];
        let sum = inner(&three, &d.mul_vec(&ds.plus)) + inner(&three, &d.mul_vec(&ds.minus));
        assert!(sum.norm() <= 1e-15);
    }

    #[test]
    fn interference_amplitude_examples() {
        let p = SystemParams::<f64>::new(0.9, 0.56, 0.5);
        assert!(interference_amplitude(&p).unwrap() <= 1e-12);
        let a = interference_amplitude(&p.with_delta_p(0.8)).unwrap();
        let b = interference_amplitude(&p.with_delta_p(-0.8)).unwrap();
        assert!(a > 0.0);
        assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn dark_state_population() {
        let p = SystemParams::<f64>::new(1.0, 0.6, 0.6);
        let ss = steady_state(&p).unwrap();
        assert_relative_eq!(dark_state_overlap(&ss.rho, &p).unwrap(), 1.0, epsilon = 1e-10);
        assert_eq!(dark_state_overlap(&DensityMatrix::basis(0), &p).unwrap(), 0.0);
        for xi in [0.1, 1.0, 1.12, 30.0] {
            let p = SystemParams::<f64>::new(0.9, 0.2 * xi, 0.2);
            let ss = steady_state(&p).unwrap();
            assert_relative_eq!(dark_state_overlap(&ss.rho, &p).unwrap(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn phase_normalization() {
        let v: CVec<f64, 3> = [C::new(0.0, 0.6), C::new(0.0, -0.8), C::new(0.0, 0.0)];
        let n = normalize_phase(&v);
        assert_relative_eq!(n[1].re, 0.8, epsilon = 1e-15);
        assert!(n[1].im.abs() < 1e-15);
        assert_relative_eq!(n[0].re, -0.6, epsilon = 1e-15);
    }
}
