//! Full counting statistics of the net number of emitted photons.
//!
//! The scaled cumulant generating function is the eigenvalue `λ0(z)` of the
//! counting generator `𝓛(z)` that vanishes at `z = 0`. Its first two
//! derivatives follow from the coefficients of the characteristic polynomial
//! `det(λI − 𝓛(z)) = Σ a_n(z) λⁿ`, which are computed here in jet arithmetic.

use crate::dynamics::{closed_form_elements, steady_state};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::CMat;
use crate::model::{
    build_counting_liouvillian, DensityMatrix, LiouvillianParts, SystemParams, RHO11, RHO22,
    RHO33,
};
use crate::ode::{integrate, OdeOptions};
use crate::scalar::{czero, re, Real, C};

/// Trace magnitude above which the recursion is flagged as ill-conditioned.
pub const CONDITIONING_LIMIT: f64 = 1e12;
/// `|a1(0)|` at or below which the zero eigenvalue counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// `|J|` at or below which `D/J` is not evaluated numerically.
pub const ZERO_CURRENT: f64 = 1e-12;
/// Probe detunings treated as exact two-photon resonance by the Fano factor.
pub const RESONANCE_TOL: f64 = 1e-9;
/// Largest counting field accepted by [`lambda0_track`].
pub const MAX_COUNTING_FIELD: f64 = 0.1;

/// Jets `(a_n(0), a_n'(0), a_n''(0))` of the monic characteristic polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPolyJets<T> {
    pub a: [Jet<C<T>>; 10],
    /// Largest `|tr(A M_k)|` met during the recursion.
    pub max_trace: T,
    pub warning: Option<String>,
}

impl<T: Real> CharPolyJets<T> {
    /// Real parts of `(a_n, a_n', a_n'')`.
    pub fn real(&self, n: usize) -> Jet<T> {
        self.a[n].map(|z| z.re)
    }

    /// Largest ratio `|Im z| / |z|` over all slots. Magnitudes are floored
    /// at `1e-6 max_n |a_n(0)|` so that the vanishing `a_0(0)` is not
    /// measured against its own rounding noise.
    pub fn max_relative_imag(&self) -> T {
        let scale = self.a.iter().fold(T::zero(), |acc, j| acc.max(j.value.norm()));
        let floor = T::lit(1e-6) * scale;
        self.a
            .iter()
            .flat_map(|j| [j.value, j.d1, j.d2])
            .fold(T::zero(), |acc, z| acc.max(z.im.abs() / z.norm().max(floor)))
    }
}

/// Faddeev–LeVerrier over jets of 9×9 matrices:
/// `M_k = A M_{k−1} + c_{n−k+1} I`, `c_{n−k} = −tr(A M_k)/k`.
pub fn char_poly_jets<T: Real>(params: &SystemParams<T>) -> Result<CharPolyJets<T>> {
    let a = build_counting_liouvillian(params, 2)?.m;
    let mut coeffs = [Jet::constant(czero()); 10];
    coeffs[9] = Jet::constant(re(T::one()));
    let mut m = Jet::constant(CMat::<T, 9>::zeros());
    let mut max_trace = T::zero();
    for k in 1..=9 {
        let c = coeffs[10 - k];
        let shift = Jet::new(
            CMat::identity().scale(c.value),
            CMat::identity().scale(c.d1),
            CMat::identity().scale(c.d2),
        );
        m = a * m + shift;
        let tr = (a * m).map(|x| x.trace());
        max_trace = max_trace.max(tr.value.norm()).max(tr.d1.norm()).max(tr.d2.norm());
        coeffs[9 - k] = tr.scale(re(-T::one() / T::int(k as i64)));
    }
    let warning = (max_trace > T::lit(CONDITIONING_LIMIT))
        .then(|| format!("characteristic-polynomial traces reach {max_trace:e}"));
    Ok(CharPolyJets { a: coeffs, max_trace, warning })
}

/// Coefficients of `det(λI − 𝓛(z))` at a finite counting field, by the same
/// recursion on plain matrices.
pub fn char_poly_at<T: Real>(params: &SystemParams<T>, z: T) -> Result<[C<T>; 10]> {
    let a = LiouvillianParts::build(params)?.at(z);
    Ok(char_poly_of(&a))
}

fn char_poly_of<T: Real>(a: &CMat<T, 9>) -> [C<T>; 10] {
    let mut c = [czero(); 10];
    c[9] = re(T::one());
    let mut m = CMat::<T, 9>::zeros();
    for k in 1..=9 {
        m = *a * m + CMat::identity().scale(c[10 - k]);
        c[9 - k] = -(*a * m).trace() / re(T::int(k as i64));
    }
    c
}

/// How a set of cumulants was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CumulantMethod {
    SecularFormula,
    ClosedForm,
    /// Secular `J`, `D` with the Fano factor taken from its closed form at
    /// a dark state where `D/J` is `0/0`.
    ClosedFormLimit,
    NResolvedOracle,
}

impl CumulantMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::SecularFormula => "SecularFormula",
            Self::ClosedForm => "ClosedForm",
            Self::ClosedFormLimit => "ClosedFormLimit",
            Self::NResolvedOracle => "NResolvedOracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CumulantResult<T> {
    pub j_ph: T,
    pub d_ph: T,
    pub fano: T,
    /// Current through the `|1⟩ ↔ |2⟩` channel, when known.
    pub j12: Option<T>,
    /// Current through the `|1⟩ ↔ |3⟩` channel, when known.
    pub j13: Option<T>,
    pub method: CumulantMethod,
    pub warning: Option<String>,
}

/// Channel currents from steady-state populations.
pub fn channel_currents<T: Real>(params: &SystemParams<T>, rho: &DensityMatrix<T>) -> (T, T) {
    let one = T::one();
    let (p1, p2, p3) = (rho.population(0), rho.population(1), rho.population(2));
    let j12 = params.gamma * (params.nbar12 + one) * p1 - params.gamma * params.nbar12 * p2;
    let j13 = (params.nbar13 + one) * p1 - params.nbar13 * p3;
    (j12, j13)
}

fn in_closed_form_regime<T: Real>(params: &SystemParams<T>) -> bool {
    params.delta_c.abs() <= T::tol(1e-12)
        && params.is_zero_temperature()
        && params.omega_c > T::zero()
        && params.omega_p > T::zero()
}

/// `J = λ0'(0)`, `D = λ0''(0)` and `F = D/J` from the secular coefficients.
pub fn cumulants_secular<T: Real>(params: &SystemParams<T>) -> Result<CumulantResult<T>> {
    let jets = char_poly_jets(params)?;
    let a0 = jets.real(0);
    let a1 = jets.real(1);
    let a2 = jets.real(2);
    if a1.value.abs() <= T::lit(DEGENERACY_TOL) {
        return Err(Error::DegenerateZeroEigenvalue { a1: a1.value.to_f64().unwrap_or(f64::NAN) });
    }
    let two = T::lit(2.0);
    let j = -a0.d1 / a1.value;
    let d = -(a0.d2 + two * a1.d1 * j + two * a2.value * j * j) / a1.value;

    let ss = steady_state(params)?;
    let (j12, j13) = channel_currents(params, &ss.rho);

    let dark = j.abs() <= T::lit(ZERO_CURRENT) || params.delta_p.abs() <= T::lit(RESONANCE_TOL);
    let (fano, method) = if dark && in_closed_form_regime(params) {
        (fano_terms_raw(params).limit(), CumulantMethod::ClosedFormLimit)
    } else if j.abs() <= T::lit(ZERO_CURRENT) {
        return Err(Error::IndeterminateFano { current: j.to_f64().unwrap_or(f64::NAN) });
    } else {
        (d / j, CumulantMethod::SecularFormula)
    };
    Ok(CumulantResult {
        j_ph: j,
        d_ph: d,
        fano,
        j12: Some(j12),
        j13: Some(j13),
        method,
        warning: jets.warning,
    })
}

/// Pieces of the closed-form Fano factor `F = coth(𝒜/2) [1 + 𝓡 − 𝓘 + q]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FanoTerms<T> {
    /// `2 Σ_{i<j} (ρ^R_ij)²`
    pub real_part: T,
    /// `6 Σ_{i<j} (ρ^I_ij)²`
    pub imag_part: T,
    pub q: T,
    /// `coth(𝒜/2)`
    pub thermal: T,
    pub fano: T,
}

impl<T: Real> FanoTerms<T> {
    fn limit(&self) -> T {
        T::one() + self.real_part - self.imag_part + self.q
    }
}

fn fano_terms_raw<T: Real>(params: &SystemParams<T>) -> FanoTerms<T> {
    let e = closed_form_elements(params.gamma, params.omega_c, params.omega_p, params.delta_p);
    let coh = [e.rho12, e.rho13, e.rho23];
    let real_part = T::lit(2.0) * coh.iter().map(|z| z.re * z.re).sum::<T>();
    let imag_part = T::lit(6.0) * coh.iter().map(|z| z.im * z.im).sum::<T>();
    let q = q_formula(params.gamma, params.omega_c, params.omega_p, params.delta_p);
    let thermal = params.thermal_factor();
    let mut terms = FanoTerms { real_part, imag_part, q, thermal, fano: T::zero() };
    terms.fano = thermal * terms.limit();
    terms
}

/// Closed-form Fano factor with its `𝓡`, `𝓘`, `q` and thermal pieces.
///
/// Requires equal gaps and `δω_c = 0`; the coherences and `q` are the
/// zero-occupation closed forms, temperature enters only through `coth(𝒜/2)`.
pub fn fano_terms<T: Real>(params: &SystemParams<T>) -> Result<FanoTerms<T>> {
    params.validate()?;
    if !params.equal_gaps {
        return Err(Error::OutOfValidityRegime("closed-form Fano factor needs equal gaps".into()));
    }
    if params.delta_c.abs() > T::tol(1e-12) {
        return Err(Error::OutOfValidityRegime("closed-form Fano factor needs delta_c = 0".into()));
    }
    if params.omega_c <= T::zero() || params.omega_p <= T::zero() {
        return Err(Error::OutOfValidityRegime("closed forms require omega_c, omega_p > 0".into()));
    }
    Ok(fano_terms_raw(params))
}

pub fn fano_closed_form<T: Real>(params: &SystemParams<T>) -> Result<T> {
    Ok(fano_terms(params)?.fano)
}

/// `q = 2 q_n / q_d` at `δω_c = 0`, `n̄ = 0`.
pub fn q_factor<T: Real>(params: &SystemParams<T>) -> Result<T> {
    if !in_closed_form_regime(params) {
        return Err(Error::OutOfValidityRegime(
            "q closed form needs delta_c = 0, nbar = 0 and omega_c, omega_p > 0".into(),
        ));
    }
    params.validate()?;
    Ok(q_formula(params.gamma, params.omega_c, params.omega_p, params.delta_p))
}

/// `q` at two-photon resonance as a function of `ξ = Ω_c/Ω_p`.
pub fn q_resonant<T: Real>(gamma: T, xi: T) -> T {
    let x2 = xi * xi;
    let (x4, x6) = (x2 * x2, x2 * x2 * x2);
    let one = T::one();
    let two = T::lit(2.0);
    two * (gamma * x6 + two * gamma * x4 + two * x2 + one) / ((x2 + one) * (x2 + one) * (x2 + gamma))
}

/// Fano factor at two-photon resonance and zero occupation,
/// `1 + 2(1 + γξ²)/(γ + ξ²)`.
pub fn fano_resonant<T: Real>(gamma: T, xi: T) -> T {
    let x2 = xi * xi;
    T::one() + T::lit(2.0) * (T::one() + gamma * x2) / (gamma + x2)
}

fn q_formula<T: Real>(gamma: T, oc: T, op: T, dp: T) -> T {
    let l = T::lit;
    let g = gamma;
    let g1 = g + T::one();
    let g1_2 = g1 * g1;
    let g1_4 = g1_2 * g1_2;
    let (c2, p2, d2) = (oc * oc, op * op, dp * dp);
    let (c4, p4, d4) = (c2 * c2, p2 * p2, d2 * d2);
    let (c6, p6, d6) = (c4 * c2, p4 * p2, d4 * d2);
    let (c8, p8, d8) = (c4 * c4, p4 * p4, d4 * d4);
    let c10 = c8 * c2;

    let t8 = l(16.0) * g * c4 * d8;
    let t6 = -l(8.0) * g * c2 * (l(8.0) * c4 - (g1_2 + l(2.0) * p2) * c2 + g1_2 * p2) * d6;
    let t4 = (l(96.0) * g * c8 - l(16.0) * g * c6 * (g1_2 - (g + l(2.0)) * p2)
        + g1 * c4 * (g * g1_2 * g1 + l(4.0) * g * g1 * p2 - l(32.0) * p4)
        - l(2.0) * g * c2 * p2 * (g1_4 + l(6.0) * g1_2 * p2 + l(16.0) * p4)
        + g * g1_4 * p4)
        * d4;
    let t2 = -l(4.0)
        * (l(16.0) * g * c10 - l(2.0) * g * c8 * (g1_2 - l(2.0) * (l(2.0) * g + l(7.0)) * p2)
            + c6 * p2 * (g * (-g * g * g + l(3.0) * g + l(2.0)) + l(4.0) * (l(3.0) * g * g + g + T::one()) * p2)
            + l(2.0) * c4 * p4 * ((g * g + g + T::one()) * g1_2 + l(2.0) * ((g - l(3.0)) * g + T::one()) * p2)
            + c2 * p6 * (g * (g * (l(2.0) * g + l(3.0)) - l(4.0) * p2) - T::one())
            - l(2.0) * g * g1_2 * p8)
        * d2;
    let sum = c2 + p2;
    let weighted = c2 + g * p2;
    let t0 = l(16.0) * sum * sum * weighted * (g * c6 + l(2.0) * g * c4 * p2 + l(2.0) * c2 * p4 + p6);
    let qn = t8 + t6 + t4 + t2 + t0;

    let base = l(4.0) * c2 * d4 - (l(8.0) * c4 - g1 * (g1 + l(8.0) * p2) * c2 - g * g1_2 * p2) * d2
        + l(4.0) * sum * sum * weighted;
    l(2.0) * qn / (base * base)
}

/// `λ0(z)` by Newton iteration on the characteristic polynomial, continued
/// from `λ0(0) = 0` in steps of at most 0.01 in `z`.
pub fn lambda0_track<T: Real>(params: &SystemParams<T>, z: T) -> Result<C<T>> {
    let zf = z.to_f64().unwrap_or(f64::NAN);
    if !(z.abs() <= T::lit(MAX_COUNTING_FIELD)) {
        return Err(Error::CountingFieldOutOfRange { z: zf });
    }
    let parts = LiouvillianParts::build(params)?;
    let steps = (z.abs() / T::lit(0.01)).ceil().to_usize().unwrap_or(1).max(1);
    let mut lambda = czero::<T>();
    let mut prev = czero::<T>();
    for s in 0..=steps {
        let zs = z * T::int(s as i64) / T::int(steps as i64);
        let coeffs = char_poly_of(&parts.at(zs));
        // linear extrapolation from the previous two continuation points
        let guess = if s >= 2 { lambda + (lambda - prev) } else { lambda };
        prev = lambda;
        lambda = newton(&coeffs, guess).ok_or(Error::NewtonNonConvergence { z: zf })?;
    }
    Ok(lambda)
}

fn newton<T: Real>(c: &[C<T>; 10], mut x: C<T>) -> Option<C<T>> {
    let scale = c.iter().fold(T::zero(), |acc, a| acc.max(a.norm()));
    for _ in 0..100 {
        let (mut p, mut dp) = (czero::<T>(), czero::<T>());
        for a in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + *a;
        }
        if p.norm() <= T::epsilon() * scale * T::lit(1e-3) {
            return Some(x);
        }
        if dp.norm() == T::zero() {
            return None;
        }
        let step = p / dp;
        x = x - step;
        if !x.re.is_finite() || !x.im.is_finite() {
            return None;
        }
        if step.norm() <= T::epsilon() * T::lit(4.0) * x.norm().max(T::lit(1e-6)) {
            return Some(x);
        }
    }
    None
}

/// Options for [`n_resolved_oracle`].
#[derive(Clone, Copy, Debug)]
pub struct OracleOptions<T> {
    pub ode: OdeOptions<T>,
    /// Number of equally spaced output times after `τ = 0`.
    pub samples: usize,
    /// Largest probability allowed in the outermost bins of the window.
    pub boundary_tol: T,
    /// Largest allowed drift of `Σ_n P(n, τ)` from one.
    pub normalization_tol: T,
}

impl<T: Real> Default for OracleOptions<T> {
    fn default() -> Self {
        Self {
            ode: OdeOptions::default(),
            samples: 200,
            boundary_tol: T::tol(1e-10),
            normalization_tol: T::tol(1e-9),
        }
    }
}

/// Photon-number moments from integrating the n-resolved master equation.
#[derive(Clone, Debug, PartialEq)]
pub struct NResolvedSeries<T> {
    pub tau: Vec<T>,
    pub mean: Vec<T>,
    pub variance: Vec<T>,
    /// Least-squares slope of the mean over `[τ_end/2, τ_end]`.
    pub current: T,
    /// Least-squares slope of the variance over `[τ_end/2, τ_end]`.
    pub diffusion: T,
    /// Largest outer-bin probability seen at any output time.
    pub boundary_mass: T,
    /// Largest `|Σ_n P(n, τ) − 1|` seen at any output time.
    pub normalization_error: T,
}

impl<T: Real> NResolvedSeries<T> {
    pub fn cumulants(&self) -> CumulantResult<T> {
        let fano = if self.current.abs() > T::lit(ZERO_CURRENT) {
            self.diffusion / self.current
        } else {
            T::nan()
        };
        CumulantResult {
            j_ph: self.current,
            d_ph: self.diffusion,
            fano,
            j12: None,
            j13: None,
            method: CumulantMethod::NResolvedOracle,
            warning: None,
        }
    }
}

/// Integrates `∂τ ρ(n) = 𝓛0 ρ(n) + 𝓛+ ρ(n−1) + 𝓛− ρ(n+1)` from the steady
/// state at `n = 0`.
///
/// The `2 n_max + 1` bins form a window that is re-centred on the running
/// mean between output times; the equations are invariant under shifts of
/// `n`, so this is exact as long as the bins dropped at the edges are empty
/// (checked against `boundary_tol`).
pub fn n_resolved_oracle<T: Real>(
    params: &SystemParams<T>,
    tau_end: T,
    n_max: usize,
    opts: &OracleOptions<T>,
) -> Result<NResolvedSeries<T>> {
    let ss = steady_state(params)?;
    n_resolved_oracle_from(params, &ss.rho, tau_end, n_max, opts)
}

/// As [`n_resolved_oracle`], starting from an arbitrary state at `n = 0`.
pub fn n_resolved_oracle_from<T: Real>(
    params: &SystemParams<T>,
    rho0: &DensityMatrix<T>,
    tau_end: T,
    n_max: usize,
    opts: &OracleOptions<T>,
) -> Result<NResolvedSeries<T>> {
    if !(tau_end > T::zero()) || opts.samples == 0 {
        return Err(Error::PreconditionViolated("tau_end and samples must be positive".into()));
    }
    if n_max == 0 {
        return Err(Error::TruncationTooSmall { mass: 1.0 });
    }
    let parts = LiouvillianParts::build(params)?;
    let sparse = |m: &CMat<T, 9>| -> Vec<(usize, usize, C<T>)> {
        let mut out = Vec::new();
        for i in 0..9 {
            for j in 0..9 {
                if m[(i, j)] != czero() {
                    out.push((i, j, m[(i, j)]));
                }
            }
        }
        out
    };
    let (l0, lp, lm) = (sparse(&parts.l0), sparse(&parts.l_plus), sparse(&parts.l_minus));
    let bins = 2 * n_max + 1;
    let mut y = vec![czero::<T>(); bins * 9];
    y[n_max * 9..n_max * 9 + 9].copy_from_slice(&rho0.to_vector().v);
    // photon number of bin 0
    let mut offset: i64 = -(n_max as i64);

    let rhs = |_: T, y: &[C<T>], dy: &mut [C<T>]| {
        for d in dy.iter_mut() {
            *d = czero();
        }
        for b in 0..bins {
            let out = &mut dy[b * 9..b * 9 + 9];
            let cur = &y[b * 9..b * 9 + 9];
            for &(i, j, v) in &l0 {
                out[i] = out[i] + v * cur[j];
            }
            if b > 0 {
                let below = &y[(b - 1) * 9..b * 9];
                for &(i, j, v) in &lp {
                    out[i] = out[i] + v * below[j];
                }
            }
            if b + 1 < bins {
                let above = &y[(b + 1) * 9..(b + 2) * 9];
                for &(i, j, v) in &lm {
                    out[i] = out[i] + v * above[j];
                }
            }
        }
    };

    let prob = |y: &[C<T>], b: usize| (y[b * 9 + RHO11] + y[b * 9 + RHO22] + y[b * 9 + RHO33]).re;
    let moments = |y: &[C<T>], offset: i64| {
        let (mut total, mut m1, mut m2) = (T::zero(), T::zero(), T::zero());
        for b in 0..bins {
            let p = prob(y, b);
            let n = T::int(offset + b as i64);
            total = total + p;
            m1 = m1 + n * p;
            m2 = m2 + n * n * p;
        }
        let mean = m1 / total;
        (total, mean, m2 / total - mean * mean)
    };

    let mut series = NResolvedSeries {
        tau: vec![T::zero()],
        mean: vec![T::zero()],
        variance: vec![T::zero()],
        current: T::zero(),
        diffusion: T::zero(),
        boundary_mass: T::zero(),
        normalization_error: (rho0.trace().re - T::one()).abs(),
    };
    let mut dropped = T::zero();
    let mut h = None;
    let dt = tau_end / T::int(opts.samples as i64);
    for s in 1..=opts.samples {
        let t0 = dt * T::int(s as i64 - 1);
        let t1 = if s == opts.samples { tau_end } else { dt * T::int(s as i64) };
        let ode = OdeOptions { h_init: h, ..opts.ode };
        let summary = integrate(rhs, t0, t1, &mut y, &ode, |_, _| {})?;
        h = Some(summary.next_h);

        let edge = prob(&y, 0).abs().max(prob(&y, bins - 1).abs());
        series.boundary_mass = series.boundary_mass.max(edge);
        if edge > opts.boundary_tol {
            return Err(Error::TruncationTooSmall { mass: edge.to_f64().unwrap_or(f64::NAN) });
        }
        let (total, mean, var) = moments(&y, offset);
        let norm_err = (total + dropped - T::one()).abs();
        series.normalization_error = series.normalization_error.max(norm_err);
        if norm_err > opts.normalization_tol {
            return Err(Error::InvalidState(format!("n-resolved normalization drift {norm_err:e}")));
        }
        series.tau.push(t1);
        series.mean.push(mean);
        series.variance.push(var);

        // re-centre the window on the running mean
        let centre = offset + n_max as i64;
        let shift = (mean - T::int(centre)).round().to_i64().unwrap_or(0);
        if shift != 0 {
            let k = shift.unsigned_abs() as usize;
            if k >= bins {
                return Err(Error::TruncationTooSmall { mass: 1.0 });
            }
            let lost: T = if shift > 0 {
                (0..k).map(|b| prob(&y, b)).sum()
            } else {
                (bins - k..bins).map(|b| prob(&y, b)).sum()
            };
            if lost.abs() > opts.boundary_tol {
                return Err(Error::TruncationTooSmall { mass: lost.to_f64().unwrap_or(f64::NAN) });
            }
            dropped = dropped + lost;
            if shift > 0 {
                y.copy_within(k * 9.., 0);
                for v in &mut y[(bins - k) * 9..] {
                    *v = czero();
                }
            } else {
                y.copy_within(..(bins - k) * 9, k * 9);
                for v in &mut y[..k * 9] {
                    *v = czero();
                }
            }
            offset += shift;
        }
    }

    let half = tau_end / T::lit(2.0);
    let fit_slope = |ys: &[T]| {
        let pts: Vec<(T, T)> = series
            .tau
            .iter()
            .zip(ys)
            .filter(|(t, _)| **t >= half)
            .map(|(t, y)| (*t, *y))
            .collect();
        least_squares_slope(&pts)
    };
    series.current = fit_slope(&series.mean);
    series.diffusion = fit_slope(&series.variance);
    Ok(series)
}

fn least_squares_slope<T: Real>(pts: &[(T, T)]) -> T {
    let n = T::int(pts.len() as i64);
    if pts.len() < 2 {
        return T::nan();
    }
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<T>();
    let sxx = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<T>();
    sxy / sxx
}
