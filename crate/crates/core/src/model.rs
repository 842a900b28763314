//! Parameters, states and the rotating-frame Lindblad generator of the
//! driven Λ-system.
//!
//! Basis order is `(|1⟩, |2⟩, |3⟩)` with `|1⟩` the common excited state. The
//! vectorized state is row-major: `(ρ11, ρ12, ρ13, ρ21, ρ22, ρ23, ρ31, ρ32, ρ33)`.
//! All rates, detunings and Rabi frequencies are dimensionless, measured in
//! units of the `|1⟩ → |3⟩` decay rate; time is `τ = γ13 t`.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{hermitian3_eigenvalues, CMat, CVec};
use crate::scalar::{czero, im, re, Real, C};

/// Index of `ρ_ij` (zero-based `i`, `j`) in the vectorized state.
#[inline]
pub const fn vec_index(i: usize, j: usize) -> usize {
    3 * i + j
}

pub const RHO11: usize = vec_index(0, 0);
pub const RHO22: usize = vec_index(1, 1);
pub const RHO33: usize = vec_index(2, 2);

/// Occupation numbers at or below this are treated as zero temperature.
pub const ZERO_OCCUPATION: f64 = 1e-12;

/// Physical parameters of the Λ-system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams<T> {
    /// Branching ratio `γ12 / γ13`.
    pub gamma: T,
    /// Control Rabi frequency on `|1⟩ ↔ |2⟩`.
    pub omega_c: T,
    /// Probe Rabi frequency on `|1⟩ ↔ |3⟩`.
    pub omega_p: T,
    /// Control detuning `ω_c − ω12`.
    pub delta_c: T,
    /// Probe detuning `ω_p − ω13`.
    pub delta_p: T,
    pub nbar12: T,
    pub nbar13: T,
    /// Thermal parameter `βħω0`; infinite at zero temperature.
    pub cal_a: T,
    /// Both gaps equal, so `nbar12 = nbar13 = 1/(e^A − 1)`.
    pub equal_gaps: bool,
}

impl<T: Real> SystemParams<T> {
    /// Resonant drive at zero temperature.
    pub fn new(gamma: T, omega_c: T, omega_p: T) -> Self {
        Self {
            gamma,
            omega_c,
            omega_p,
            delta_c: T::zero(),
            delta_p: T::zero(),
            nbar12: T::zero(),
            nbar13: T::zero(),
            cal_a: T::infinity(),
            equal_gaps: true,
        }
    }

    pub fn with_detunings(mut self, delta_c: T, delta_p: T) -> Self {
        self.delta_c = delta_c;
        self.delta_p = delta_p;
        self
    }

    pub fn with_delta_p(mut self, delta_p: T) -> Self {
        self.delta_p = delta_p;
        self
    }

    /// Independent bath occupations for the two transitions.
    pub fn with_occupations(mut self, nbar12: T, nbar13: T) -> Self {
        self.nbar12 = nbar12;
        self.nbar13 = nbar13;
        self.equal_gaps = false;
        self
    }

    /// Equal gaps at thermal parameter `A = βħω0`; sets both occupations.
    pub fn with_equal_gaps(mut self, cal_a: T) -> Self {
        let n = bose_occupation(cal_a);
        self.cal_a = cal_a;
        self.nbar12 = n;
        self.nbar13 = n;
        self.equal_gaps = true;
        self
    }

    /// Sets `Ω_c = ξ Ω_p` keeping `Ω_p`.
    pub fn with_xi(mut self, xi: T) -> Self {
        self.omega_c = xi * self.omega_p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma", self.gamma),
            ("omega_c", self.omega_c),
            ("omega_p", self.omega_p),
            ("delta_c", self.delta_c),
            ("delta_p", self.delta_p),
            ("nbar12", self.nbar12),
            ("nbar13", self.nbar13),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("{name} is not finite")));
        }
        if self.gamma <= T::zero() {
            return Err(Error::InvalidParams("gamma must be > 0".into()));
        }
        for (name, v) in [
            ("omega_c", self.omega_c),
            ("omega_p", self.omega_p),
            ("nbar12", self.nbar12),
            ("nbar13", self.nbar13),
        ] {
            if v < T::zero() {
                return Err(Error::InvalidParams(format!("{name} must be >= 0")));
            }
        }
        if self.cal_a.is_nan() || self.cal_a <= T::zero() {
            return Err(Error::InvalidParams("cal_a must be > 0".into()));
        }
        if self.equal_gaps {
            let n = bose_occupation(self.cal_a);
            let tol = T::tol(1e-12);
            if (self.nbar12 - n).abs() > tol || (self.nbar13 - n).abs() > tol {
                return Err(Error::InvalidParams(format!(
                    "equal_gaps requires nbar12 = nbar13 = 1/(e^A - 1) = {n}"
                )));
            }
        }
        Ok(())
    }

    /// `ξ = Ω_c / Ω_p`.
    pub fn xi(&self) -> Result<T> {
        if self.omega_p > T::zero() {
            Ok(self.omega_c / self.omega_p)
        } else {
            Err(Error::XiUndefined)
        }
    }

    pub fn is_zero_temperature(&self) -> bool {
        let tol = T::lit(ZERO_OCCUPATION);
        self.nbar12 <= tol && self.nbar13 <= tol
    }

    /// `coth(A/2)`; exactly one at zero temperature.
    pub fn thermal_factor(&self) -> T {
        let half = self.cal_a / T::lit(2.0);
        if half.is_infinite() {
            T::one()
        } else {
            T::one() / half.tanh()
        }
    }
}

/// `1 / (e^A − 1)`.
pub fn bose_occupation<T: Real>(cal_a: T) -> T {
    if cal_a.is_infinite() {
        T::zero()
    } else {
        T::one() / cal_a.exp_m1()
    }
}

/// Tolerances for the density-matrix invariants.
#[derive(Clone, Copy, Debug)]
pub struct StateTolerance {
    pub hermiticity: f64,
    pub trace: f64,
    pub positivity: f64,
}

impl Default for StateTolerance {
    fn default() -> Self {
        Self { hermiticity: 1e-12, trace: 1e-12, positivity: 1e-10 }
    }
}

/// 3×3 density matrix in the rotating frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    pub rho: CMat<T, 3>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity at default tolerances.
    pub fn new(rho: CMat<T, 3>) -> Result<Self> {
        let dm = Self { rho };
        dm.check(&StateTolerance::default())?;
        Ok(dm)
    }

    pub fn new_unchecked(rho: CMat<T, 3>) -> Self {
        Self { rho }
    }

    /// Projector onto basis state `k` (zero-based).
    pub fn basis(k: usize) -> Self {
        let mut rho = CMat::zeros();
        rho[(k, k)] = re(T::one());
        Self { rho }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) amplitude vector.
    pub fn pure(psi: &CVec<T, 3>) -> Self {
        let norm: T = psi.iter().map(|z| z.norm_sqr()).sum();
        let rho = CMat::from_fn(|i, j| psi[i] * psi[j].conj() / re(norm));
        Self { rho }
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.rho[(i, j)]
    }

    pub fn population(&self, k: usize) -> T {
        self.rho[(k, k)].re
    }

    pub fn trace(&self) -> C<T> {
        self.rho.trace()
    }

    pub fn hermiticity_error(&self) -> T {
        (self.rho - self.rho.adjoint()).max_abs()
    }

    pub fn eigenvalues(&self) -> [T; 3] {
        let herm = CMat::from_fn(|i, j| (self.rho[(i, j)] + self.rho[(j, i)].conj()) * re(T::lit(0.5)));
        hermitian3_eigenvalues(&herm)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues()[2]
    }

    pub fn check(&self, tol: &StateTolerance) -> Result<()> {
        if !self.rho.is_finite() {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = self.hermiticity_error();
        if herm > T::tol(tol.hermiticity) {
            return Err(Error::InvalidState(format!("hermiticity error {herm}")));
        }
        let tr = self.trace() - re(T::one());
        if tr.norm() > T::tol(tol.trace) {
            return Err(Error::InvalidState(format!("trace error {}", tr.norm())));
        }
        let min = self.min_eigenvalue();
        if min < -T::tol(tol.positivity) {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }

    pub fn to_vector(&self) -> StateVector9<T> {
        let mut v = [czero(); 9];
        for i in 0..3 {
            for j in 0..3 {
                v[vec_index(i, j)] = self.rho[(i, j)];
            }
        }
        StateVector9 { v }
    }

    /// Entrywise maximum distance to another state.
    pub fn distance(&self, other: &Self) -> T {
        (self.rho - other.rho).max_abs()
    }
}

/// Vectorized density matrix in the fixed component order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector9<T> {
    pub v: CVec<T, 9>,
}

impl<T: Real> StateVector9<T> {
    pub fn to_density(&self) -> DensityMatrix<T> {
        DensityMatrix::new_unchecked(CMat::from_fn(|i, j| self.v[vec_index(i, j)]))
    }

    /// `ρ11 + ρ22 + ρ33`.
    pub fn trace(&self) -> C<T> {
        self.v[RHO11] + self.v[RHO22] + self.v[RHO33]
    }
}

/// The generator acting on vectorized states, optionally as a jet in the
/// counting field `z` at `z = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Superoperator<T> {
    /// `(𝓛(0), ∂z 𝓛, ∂z² 𝓛)`; slots above `z_order` are zero.
    pub m: Jet<CMat<T, 9>>,
    pub z_order: u8,
}

impl<T: Real> Superoperator<T> {
    pub fn value(&self) -> &CMat<T, 9> {
        &self.m.value
    }

    pub fn apply(&self, state: &StateVector9<T>) -> StateVector9<T> {
        StateVector9 { v: self.m.value.mul_vec(&state.v) }
    }
}

/// `𝓛(z) = 𝓛0 + e^z 𝓛+ + e^{−z} 𝓛−`, split by photon-number change.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiouvillianParts<T> {
    /// Everything that does not change the photon count.
    pub l0: CMat<T, 9>,
    /// Emission jumps `|1⟩ → |2⟩, |3⟩` (rows ρ22, ρ33, column ρ11).
    pub l_plus: CMat<T, 9>,
    /// Absorption jumps `|2⟩, |3⟩ → |1⟩` (row ρ11, columns ρ22, ρ33).
    pub l_minus: CMat<T, 9>,
}

impl<T: Real> LiouvillianParts<T> {
    pub fn build(params: &SystemParams<T>) -> Result<Self> {
        let full = generator_rows(params)?;
        let mut l0 = full;
        let mut l_plus = CMat::zeros();
        let mut l_minus = CMat::zeros();
        for (row, col) in [(RHO22, RHO11), (RHO33, RHO11)] {
            l_plus[(row, col)] = full[(row, col)];
            l0[(row, col)] = czero();
        }
        for (row, col) in [(RHO11, RHO22), (RHO11, RHO33)] {
            l_minus[(row, col)] = full[(row, col)];
            l0[(row, col)] = czero();
        }
        Ok(Self { l0, l_plus, l_minus })
    }

    /// `𝓛(z)` at a finite counting field.
    pub fn at(&self, z: T) -> CMat<T, 9> {
        self.l0 + self.l_plus.scale(re(z.exp())) + self.l_minus.scale(re((-z).exp()))
    }

    pub fn total(&self) -> CMat<T, 9> {
        self.l0 + self.l_plus + self.l_minus
    }
}

/// Rows of the equations of motion for `ρ22, ρ33, ρ12, ρ13, ρ23`; the `ρ11`
/// row follows from trace conservation and the lower coherences from
/// `ρ_ji = ρ_ij*`.
fn generator_rows<T: Real>(p: &SystemParams<T>) -> Result<CMat<T, 9>> {
    p.validate()?;
    let one = T::one();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let g = p.gamma;
    let (oc, op) = (p.omega_c, p.omega_p);
    let (n12, n13) = (p.nbar12, p.nbar13);
    let (r11, r12, r13, r21, r22, r23, r31, r32, r33) = (0, 1, 2, 3, 4, 5, 6, 7, 8);

    let mut l = CMat::<T, 9>::zeros();

    l[(r22, r11)] = re(g * (n12 + one));
    l[(r22, r12)] = im(oc);
    l[(r22, r21)] = im(-oc);
    l[(r22, r22)] = re(-g * n12);

    l[(r33, r11)] = re(n13 + one);
    l[(r33, r13)] = im(op);
    l[(r33, r31)] = im(-op);
    l[(r33, r33)] = re(-n13);

    let decay12 = g * (two * n12 + one) * half + (n13 + one) * half;
    l[(r12, r11)] = im(-oc);
    l[(r12, r12)] = C::new(-decay12, p.delta_c);
    l[(r12, r22)] = im(oc);
    l[(r12, r32)] = im(op);

    let decay13 = g * (n12 + one) * half + (two * n13 + one) * half;
    l[(r13, r11)] = im(-op);
    l[(r13, r13)] = C::new(-decay13, p.delta_p);
    l[(r13, r23)] = im(oc);
    l[(r13, r33)] = im(op);

    let decay23 = (g * n12 + n13) * half;
    l[(r23, r13)] = im(oc);
    l[(r23, r21)] = im(-op);
    l[(r23, r23)] = C::new(-decay23, p.delta_p - p.delta_c);

    for col in 0..9 {
        l[(r11, col)] = -(l[(r22, col)] + l[(r33, col)]);
    }

    // d/dτ ρ_ji = conj(d/dτ ρ_ij): entry (ji, lk) = conj(entry (ij, kl)).
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for k in 0..3 {
            for m in 0..3 {
                l[(vec_index(j, i), vec_index(m, k))] = l[(vec_index(i, j), vec_index(k, m))].conj();
            }
        }
    }
    Ok(l)
}

/// The generator `𝓛 = 𝓛(0)`.
pub fn build_liouvillian<T: Real>(params: &SystemParams<T>) -> Result<Superoperator<T>> {
    let m = generator_rows(params)?;
    Ok(Superoperator { m: Jet::constant(m), z_order: 0 })
}

/// Jet of `𝓛(z)` at `z = 0` to the requested order (0, 1 or 2). The jets of
/// `e^{±z}` are `(1, ±1, 1)`.
pub fn build_counting_liouvillian<T: Real>(
    params: &SystemParams<T>,
    order: u8,
) -> Result<Superoperator<T>> {
    if order > 2 {
        return Err(Error::InvalidParams(format!("jet order {order} > 2")));
    }
    let parts = LiouvillianParts::build(params)?;
    let m = Jet::new(
        parts.total(),
        parts.l_plus - parts.l_minus,
        parts.l_plus + parts.l_minus,
    )
    .truncate(order);
    Ok(Superoperator { m, z_order: order })
}

/// Maps a rotating-frame state to the stationary frame at time `t`:
/// `ρ12 = ρ̃12 e^{−iω_c t}`, `ρ13 = ρ̃13 e^{−iω_p t}`,
/// `ρ23 = ρ̃23 e^{−i(ω_p−ω_c) t}`.
pub fn frame_transform<T: Real>(
    rho_rot: &DensityMatrix<T>,
    t: T,
    omega_c: T,
    omega_p: T,
) -> DensityMatrix<T> {
    apply_frame_phases(rho_rot, -t, omega_c, omega_p)
}

/// Inverse of [`frame_transform`].
pub fn inverse_frame_transform<T: Real>(
    rho_lab: &DensityMatrix<T>,
    t: T,
    omega_c: T,
    omega_p: T,
) -> DensityMatrix<T> {
    apply_frame_phases(rho_lab, t, omega_c, omega_p)
}

fn apply_frame_phases<T: Real>(
    rho: &DensityMatrix<T>,
    signed_t: T,
    omega_c: T,
    omega_p: T,
) -> DensityMatrix<T> {
    // Phases of the upper-triangle entries; diagonals are unchanged.
    let phase = |i: usize, j: usize| -> C<T> {
        let w = match (i, j) {
            (0, 1) => omega_c,
            (0, 2) => omega_p,
            (1, 2) => omega_p - omega_c,
            _ => T::zero(),
        };
        C::from_polar(T::one(), w * signed_t)
    };
    let out = CMat::from_fn(|i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => rho.rho[(i, j)],
        std::cmp::Ordering::Less => rho.rho[(i, j)] * phase(i, j),
        std::cmp::Ordering::Greater => rho.rho[(i, j)] * phase(j, i).conj(),
    });
    DensityMatrix::new_unchecked(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig1() -> SystemParams<f64> {
        SystemParams::new(0.9, 0.56, 0.5)
    }

    #[test]
    fn pure_decay_entries() {
        let l = build_liouvillian(&SystemParams::new(0.9, 0.0, 0.0)).unwrap();
        let m = l.value();
        assert_relative_eq!(m[(RHO22, RHO11)].re, 0.9);
        assert_relative_eq!(m[(RHO33, RHO11)].re, 1.0);
        assert_relative_eq!(m[(RHO11, RHO11)].re, -1.9);
        // no coherent couplings between populations and coherences
        for pop in [RHO11, RHO22, RHO33] {
            for coh in [1, 2, 3, 5, 6, 7] {
                assert_eq!(m[(pop, coh)], czero());
                assert_eq!(m[(coh, pop)], czero());
            }
        }
    }

    #[test]
    fn coherence_decay_entries() {
        let m = *build_liouvillian(&fig1()).unwrap().value();
        assert_relative_eq!(m[(1, 1)].re, -0.95, epsilon = 1e-15);
        assert_eq!(m[(5, 5)], czero());
    }

    #[test]
    fn zero_eigenvalue_via_singular_values() {
        let p = fig1().with_delta_p(0.8).with_occupations(0.3, 0.1);
        let sv = build_liouvillian(&p).unwrap().value().singular_values();
        let nonzero: f64 = sv[..8].iter().product();
        assert!(sv[8] / sv[0] < 1e-13, "smallest singular value {}", sv[8]);
        assert!(nonzero > 0.0);
    }

    #[test]
    fn counting_jets() {
        let p = SystemParams::new(0.9, 0.56, 0.5).with_occupations(0.2, 0.4);
        let l0 = build_liouvillian(&p).unwrap();
        let j0 = build_counting_liouvillian(&p, 0).unwrap();
        assert_eq!(l0.m.value, j0.m.value);
        let j1 = build_counting_liouvillian(&p, 1).unwrap();
        let emit = 0.9 * 1.2;
        assert_relative_eq!(j1.m.value[(RHO22, RHO11)].re, emit);
        assert_relative_eq!(j1.m.d1[(RHO22, RHO11)].re, emit);
        assert_eq!(j1.m.d2[(RHO22, RHO11)], czero());
        let j2 = build_counting_liouvillian(&p, 2).unwrap();
        let absorb = 0.9 * 0.2;
        let e = j2.m.map(|m| m[(RHO11, RHO22)].re);
        assert_relative_eq!(e.value, absorb);
        assert_relative_eq!(e.d1, -absorb);
        assert_relative_eq!(e.d2, absorb);
    }

    #[test]
    fn decomposition_has_two_entries_each() {
        let p = fig1().with_occupations(0.2, 0.4);
        let parts = LiouvillianParts::build(&p).unwrap();
        let count = |m: &CMat<f64, 9>| m.data.iter().flatten().filter(|z| **z != czero()).count();
        assert_eq!(count(&parts.l_plus), 2);
        assert_eq!(count(&parts.l_minus), 2);
        assert_eq!(parts.total(), *build_liouvillian(&p).unwrap().value());
    }

    #[test]
    fn negative_rates_rejected() {
        let mut p = fig1();
        p.omega_c = -1.0;
        assert!(matches!(build_liouvillian(&p), Err(Error::InvalidParams(_))));
        let mut p = fig1();
        p.gamma = 0.0;
        assert!(build_liouvillian(&p).is_err());
        let p = fig1().with_occupations(-0.1, 0.0);
        assert!(build_liouvillian(&p).is_err());
    }

    #[test]
    fn xi_requires_probe() {
        assert_relative_eq!(fig1().xi().unwrap(), 1.12, epsilon = 1e-15);
        assert_eq!(SystemParams::new(1.0, 1.0, 0.0).xi(), Err(Error::XiUndefined));
    }

    #[test]
    fn equal_gap_consistency() {
        let p = SystemParams::new(0.9, 0.5, 0.5).with_equal_gaps(2.0);
        assert!(p.validate().is_ok());
        assert_relative_eq!(p.nbar12, 1.0 / (2f64.exp() - 1.0), epsilon = 1e-15);
        let mut bad = p;
        bad.nbar13 += 1e-6;
        assert!(bad.validate().is_err());
        bad.equal_gaps = false;
        assert!(bad.validate().is_ok());
    }

    #[test]
    fn frame_transform_identities() {
        let psi = [C::new(0.3, 0.1), C::new(-0.5, 0.7), C::new(0.2, -0.4)];
        let rho = DensityMatrix::<f64>::pure(&psi);
        assert_eq!(frame_transform(&rho, 0.0, 1.3, 2.1), rho);
        let diag = DensityMatrix::<f64>::basis(1);
        assert_eq!(frame_transform(&diag, 5.0, 1.3, 2.1), diag);
        let lab = frame_transform(&rho, 3.7, 1.3, 2.1);
        let back = inverse_frame_transform(&lab, 3.7, 1.3, 2.1);
        assert!(back.distance(&rho) < 1e-14);
        let expected = rho.get(0, 1) * C::from_polar(1.0, -1.3 * 3.7);
        assert!((lab.get(0, 1) - expected).norm() < 1e-15);
        assert!(lab.check(&StateTolerance::default()).is_ok());
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(DensityMatrix::<f64>::basis(0).rho).is_ok());
        let mut m = DensityMatrix::<f64>::basis(0).rho;
        m[(0, 0)] = C::new(1.5, 0.0);
        m[(1, 1)] = C::new(-0.5, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));
        let mut m = DensityMatrix::<f64>::basis(0).rho;
        m[(0, 1)] = C::new(0.0, 0.1);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn vector_round_trip_is_reindexing() {
        let psi = [C::new(0.3, 0.1), C::new(-0.5, 0.7), C::new(0.2, -0.4)];
        let rho = DensityMatrix::<f64>::pure(&psi);
        let v = rho.to_vector();
        assert_eq!(v.v[vec_index(1, 2)], rho.get(1, 2));
        assert_eq!(v.to_density(), rho);
    }
}
