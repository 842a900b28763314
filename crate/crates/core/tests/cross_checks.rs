use lambda_fcs::dressed::{dressed_eigensystem, effective_hamiltonian, inner, normalize_phase};
use lambda_fcs::dynamics::{propagate, steady_state, PropagateOptions};
use lambda_fcs::model::{frame_transform, inverse_frame_transform};
use lambda_fcs::{CVec, DensityMatrix, SystemParams};
use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lab_hamiltonian(w: [f64; 3], wc: f64, wp: f64, oc: f64, op: f64, t: f64) -> Matrix3<Complex64> {
    let mut h = Matrix3::<Complex64>::zeros();
    for k in 0..3 {
        h[(k, k)] = Complex64::new(w[k], 0.0);
    }
    h[(0, 1)] = Complex64::from_polar(-oc, -wc * t);
    h[(0, 2)] = Complex64::from_polar(-op, -wp * t);
    h[(1, 0)] = h[(0, 1)].conj();
    h[(2, 0)] = h[(0, 2)].conj();
    h
}

#[test]
fn effective_hamiltonian_from_rotating_frame() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let w3 = rng.gen_range(-2.0..2.0);
        let w2 = w3 + rng.gen_range(5.0..10.0);
        let w1 = w2 + rng.gen_range(20.0..40.0);
        let (dc, dp) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let wc = (w1 - w2) + dc;
        let wp = (w1 - w3) + dp;
        let (oc, op) = (rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0));
        let a = [w3 + wp, w3 + wp - wc, w3];
        let u = |t: f64| Matrix3::from_diagonal(&nalgebra::Vector3::from_fn(|k, _| Complex64::from_polar(1.0, -a[k] * t)));
        let t = rng.gen_range(0.0..10.0);
        let h = 1e-6;
        let u_dot = (u(t + h) - u(t - h)) / Complex64::new(2.0 * h, 0.0);
        let ut = u(t);
        let rotated = ut.adjoint() * lab_hamiltonian([w1, w2, w3], wc, wp, oc, op, t) * ut
            - ut.adjoint() * u_dot * Complex64::new(0.0, 1.0);
        let p = SystemParams::new(1.0, oc, op).with_detunings(dc, dp);
        let ours = effective_hamiltonian(&p);
        for i in 0..3 {
            for j in 0..3 {
                let d = (rotated[(i, j)] - ours[(i, j)]).norm();
                assert!(d < 1e-7, "({i},{j}) differs by {d}");
            }
        }
    }
}

fn as_real(v: &CVec<f64, 3>) -> [f64; 3] {
    [v[0].re, v[1].re, v[2].re]
}

#[test]
fn dressed_states_match_numerical_eigensolve() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..200 {
        let delta: f64 = rng.gen_range(-3.0..3.0);
        let p = SystemParams::new(1.0, rng.gen_range(0.05..3.0), rng.gen_range(0.05..3.0))
            .with_detunings(delta, delta);
        let ds = dressed_eigensystem(&p).unwrap();
        let h = effective_hamiltonian(&p);
        assert!(ds.residual(&h) <= 1e-10);
        assert!(ds.orthonormality_error() <= 1e-12);

        let hr: Matrix3<f64> = Matrix3::from_fn(|i, j| h[(i, j)].re);
        let eig = SymmetricEigen::new(hr);
        for (lambda, v) in ds.pairs() {
            let k = (0..3)
                .min_by(|&a, &b| {
                    (eig.eigenvalues[a] - lambda).abs().partial_cmp(&(eig.eigenvalues[b] - lambda).abs()).unwrap()
                })
                .unwrap();
            assert!((eig.eigenvalues[k] - lambda).abs() <= 1e-10);
            let col = eig.eigenvectors.column(k);
            let theirs: CVec<f64, 3> = [0, 1, 2].map(|i| Complex64::new(col[i], 0.0));
            let a = as_real(&normalize_phase(&v));
            let b = as_real(&normalize_phase(&theirs));
            for i in 0..3 {
                assert!((a[i] - b[i]).abs() <= 1e-9, "{a:?} vs {b:?}");
            }
        }
        let hd = h.mul_vec(&ds.dark);
        if delta == 0.0 {
            assert!(inner(&hd, &hd).re.sqrt() <= 1e-12);
        }
    }
}

#[test]
fn frame_transform_round_trip_and_invariants() {
    let p = SystemParams::<f64>::new(0.9, 0.56, 0.5).with_delta_p(0.8);
    let rho = steady_state(&p).unwrap().rho;
    let lab = frame_transform(&rho, 3.7, 12.0, 25.0);
    lab.check(&Default::default()).unwrap();
    for k in 0..3 {
        assert_eq!(lab.population(k), rho.population(k));
    }
    assert!((lab.get(0, 2).norm() - rho.get(0, 2).norm()).abs() < 1e-15);
    let back = inverse_frame_transform(&lab, 3.7, 12.0, 25.0);
    assert!(back.distance(&rho) < 1e-14);
}

#[test]
fn propagation_converges_from_random_initial_states() {
    let p = SystemParams::<f64>::new(0.9, 0.56, 0.5).with_delta_p(0.8);
    let target = steady_state(&p).unwrap().rho;
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut finals = Vec::new();
    for _ in 0..5 {
        let psi: CVec<f64, 3> = [0, 1, 2].map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let traj = propagate(&DensityMatrix::pure(&psi), &p, 300.0, &PropagateOptions::default()).unwrap();
        finals.push(*traj.last());
    }
    for a in &finals {
        assert!(a.distance(&target) <= 1e-7);
        for b in &finals {
            assert!(a.distance(b) <= 1e-7);
        }
    }
}
