//! Adaptive Dormand–Prince 5(4) integrator for complex-valued linear and
//! nonlinear ODE systems `dy/dt = f(t, y)`.

use crate::error::{Error, Result};
use crate::scalar::{czero, re, Real, C};

/// Step-size controller settings.
#[derive(Clone, Copy, Debug)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<T>,
    pub h_max: T,
    /// Relative floor on the step size before reporting underflow.
    pub h_min_rel: T,
    pub max_steps: usize,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        Self {
            rtol: T::tol(1e-9),
            atol: T::tol(1e-12),
            h_init: None,
            h_max: T::infinity(),
            h_min_rel: T::epsilon() * T::lit(16.0),
            max_steps: 10_000_000,
        }
    }
}

/// Outcome of one call to [`integrate`].
#[derive(Clone, Debug)]
pub struct OdeSummary<T> {
    pub accepted: usize,
    pub rejected: usize,
    /// Step size proposed for a continuation from the final time.
    pub next_h: T,
}

// Dormand–Prince tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th- and embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// Integrates from `t0` to `t_end`, overwriting `y` with the final state.
///
/// `observer` sees every accepted step `(t, y)`.
pub fn integrate<T, F, O>(
    mut rhs: F,
    t0: T,
    t_end: T,
    y: &mut [C<T>],
    opts: &OdeOptions<T>,
    mut observer: O,
) -> Result<OdeSummary<T>>
where
    T: Real,
    F: FnMut(T, &[C<T>], &mut [C<T>]),
    O: FnMut(T, &[C<T>]),
{
    let n = y.len();
    let span = t_end - t0;
    if span <= T::zero() {
        return Ok(OdeSummary { accepted: 0, rejected: 0, next_h: opts.h_init.unwrap_or(T::zero()) });
    }
    let mut k = vec![vec![czero::<T>(); n]; 7];
    let mut tmp = vec![czero::<T>(); n];
    let mut y_new = vec![czero::<T>(); n];

    let mut t = t0;
    rhs(t, y, &mut k[0]);
    let mut h = opts
        .h_init
        .filter(|h| *h > T::zero())
        .unwrap_or_else(|| initial_step(y, &k[0], opts))
        .min(opts.h_max)
        .min(span);

    let (mut accepted, mut rejected) = (0usize, 0usize);
    let l = T::lit;
    let mut last_err_ok = true;

    while t < t_end {
        if accepted + rejected >= opts.max_steps {
            return Err(Error::StepSizeUnderflow { tau: t.to_f64().unwrap_or(f64::NAN) });
        }
        let remaining = t_end - t;
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        }
        if h <= opts.h_min_rel * t.abs().max(T::one()) {
            return Err(Error::StepSizeUnderflow { tau: t.to_f64().unwrap_or(f64::NAN) });
        }

        stage(&mut tmp, y, h, &[(A21, &k[0])]);
        rhs(t + l(C2) * h, &tmp, &mut k[1]);
        stage(&mut tmp, y, h, &[(A31, &k[0]), (A32, &k[1])]);
        rhs(t + l(C3) * h, &tmp, &mut k[2]);
        stage(&mut tmp, y, h, &[(A41, &k[0]), (A42, &k[1]), (A43, &k[2])]);
        rhs(t + l(C4) * h, &tmp, &mut k[3]);
        stage(&mut tmp, y, h, &[(A51, &k[0]), (A52, &k[1]), (A53, &k[2]), (A54, &k[3])]);
        rhs(t + l(C5) * h, &tmp, &mut k[4]);
        stage(&mut tmp, y, h, &[(A61, &k[0]), (A62, &k[1]), (A63, &k[2]), (A64, &k[3]), (A65, &k[4])]);
        rhs(t + h, &tmp, &mut k[5]);
        stage(&mut y_new, y, h, &[(B1, &k[0]), (B3, &k[2]), (B4, &k[3]), (B5, &k[4]), (B6, &k[5])]);
        let t_new = if last { t_end } else { t + h };
        rhs(t_new, &y_new, &mut k[6]);

        let mut err_sq = T::zero();
        for i in 0..n {
            let e = (k[0][i] * re(l(E1))
                + k[2][i] * re(l(E3))
                + k[3][i] * re(l(E4))
                + k[4][i] * re(l(E5))
                + k[5][i] * re(l(E6))
                + k[6][i] * re(l(E7)))
                * re(h);
            let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            let r = e.norm() / sc;
            err_sq = err_sq + r * r;
        }
        let err = (err_sq / T::int(n.max(1) as i64)).sqrt();

        if !err.is_finite() {
            rejected += 1;
            h = h * l(0.2);
            last_err_ok = false;
            continue;
        }
        if err <= T::one() {
            accepted += 1;
            t = t_new;
            y.copy_from_slice(&y_new);
            k.swap(0, 6);
            observer(t, y);
            let mut factor = if err == T::zero() { l(5.0) } else { l(0.9) * err.powf(l(-0.2)) };
            factor = factor.min(l(5.0)).max(l(0.2));
            if !last_err_ok {
                factor = factor.min(T::one());
            }
            last_err_ok = true;
            if !last {
                h = (h * factor).min(opts.h_max);
            }
        } else {
            rejected += 1;
            last_err_ok = false;
            let factor = (l(0.9) * err.powf(l(-0.2))).max(l(0.2));
            h = h * factor;
        }
    }
    Ok(OdeSummary { accepted, rejected, next_h: h })
}

fn stage<T: Real>(out: &mut [C<T>], y: &[C<T>], h: T, terms: &[(f64, &Vec<C<T>>)]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = czero::<T>();
        for (a, k) in terms {
            acc = acc + k[i] * re(T::lit(*a));
        }
        *o = y[i] + acc * re(h);
    }
}

fn initial_step<T: Real>(y: &[C<T>], f0: &[C<T>], opts: &OdeOptions<T>) -> T {
    let mut d0 = T::zero();
    let mut d1 = T::zero();
    for (yi, fi) in y.iter().zip(f0) {
        let sc = opts.atol + opts.rtol * yi.norm();
        d0 = d0 + (yi.norm() / sc).powi(2);
        d1 = d1 + (fi.norm() / sc).powi(2);
    }
    let n = T::int(y.len().max(1) as i64);
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn complex_rotation_with_decay() {
        // y' = (-0.3 + 2i) y
        let rate = C::new(-0.3, 2.0);
        let mut y = vec![C::new(1.0, 0.0)];
        let opts = OdeOptions::<f64>::default();
        integrate(|_, y, dy| dy[0] = rate * y[0], 0.0, 10.0, &mut y, &opts, |_, _| {}).unwrap();
        let exact = (rate * 10.0).exp();
        assert!((y[0] - exact).norm() < 1e-9);
    }

    #[test]
    fn observer_sees_monotone_times_ending_at_t_end() {
        let mut y = vec![C::new(1.0, 0.0)];
        let mut times = Vec::new();
        let opts = OdeOptions::<f64>::default();
        integrate(|_, y, dy| dy[0] = -y[0], 0.0, 3.0, &mut y, &opts, |t, _| times.push(t)).unwrap();
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*times.last().unwrap(), 3.0);
        assert_relative_eq!(y[0].re, (-3.0f64).exp(), epsilon = 1e-10);
    }

    #[test]
    fn blow_up_reports_underflow() {
        let mut y = vec![C::new(1.0, 0.0)];
        let opts = OdeOptions::<f64>::default();
        // y' = y^2 has a singularity at t = 1
        let err = integrate(|_, y, dy| dy[0] = y[0] * y[0], 0.0, 2.0, &mut y, &opts, |_, _| {}).unwrap_err();
        match err {
            Error::StepSizeUnderflow { tau } => assert!(tau > 0.9 && tau < 1.0 + 1e-6, "tau = {tau}"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
