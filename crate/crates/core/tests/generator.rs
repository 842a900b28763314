use lambda_fcs::model::{build_counting_liouvillian, build_liouvillian, vec_index, LiouvillianParts};
use lambda_fcs::{CMat, SystemParams};
use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_params(rng: &mut ChaCha8Rng) -> SystemParams<f64> {
    SystemParams::new(rng.gen_range(0.1..5.0), rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0))
        .with_detunings(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
        .with_occupations(rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0))
}

/// The full 𝓛(z) written out entry by entry.
fn transcribed(p: &SystemParams<f64>, z: f64) -> [[Complex64; 9]; 9] {
    let (g, oc, op) = (p.gamma, p.omega_c, p.omega_p);
    let (n12, n13) = (p.nbar12, p.nbar13);
    let (dc, dp) = (p.delta_c, p.delta_p);
    let dpc = dp - dc;
    let a1 = g * (n12 + 1.0) + (n13 + 1.0);
    let a2 = g * (2.0 * n12 + 1.0) / 2.0 + (n13 + 1.0) / 2.0;
    let a3 = g * (n12 + 1.0) / 2.0 + (2.0 * n13 + 1.0) / 2.0;
    let a6 = (g * n12 + n13) / 2.0;
    let (ep, em) = (z.exp(), (-z).exp());
    let o = c(0.0, 0.0);
    let i = |x: f64| c(0.0, x);
    let r = |x: f64| c(x, 0.0);
    [
        [r(-a1), i(-oc), i(-op), i(oc), r(g * n12 * em), o, i(op), o, r(n13 * em)],
        [i(-oc), c(-a2, dc), o, o, i(oc), o, o, i(op), o],
        [i(-op), o, c(-a3, dp), o, o, i(oc), o, o, i(op)],
        [i(oc), o, o, c(-a2, -dc), i(-oc), i(-op), o, o, o],
        [r(g * (n12 + 1.0) * ep), i(oc), o, i(-oc), r(-g * n12), o, o, o, o],
        [o, o, i(oc), i(-op), o, c(-a6, dpc), o, o, o],
        [i(op), o, o, o, o, o, c(-a3, -dp), i(-oc), i(-op)],
        [o, i(op), o, o, o, o, i(-oc), c(-a6, -dpc), o],
        [r((n13 + 1.0) * ep), o, i(op), o, o, o, i(-op), o, r(-n13)],
    ]
}

/// Right-hand side of the master equation built from the Hamiltonian and
/// Lindblad operators directly.
fn master_equation(p: &SystemParams<f64>, rho: &Matrix3<Complex64>) -> Matrix3<Complex64> {
    let mut h = Matrix3::<Complex64>::zeros();
    h[(0, 1)] = r(-p.omega_c);
    h[(1, 0)] = r(-p.omega_c);
    h[(0, 2)] = r(-p.omega_p);
    h[(2, 0)] = r(-p.omega_p);
    h[(1, 1)] = r(p.delta_c);
    h[(2, 2)] = r(p.delta_p);
    let ket_bra = |a: usize, b: usize| {
        let mut m = Matrix3::<Complex64>::zeros();
        m[(a, b)] = r(1.0);
        m
    };
    let jumps = [
        (p.gamma * (p.nbar12 + 1.0), ket_bra(1, 0)),
        (p.gamma * p.nbar12, ket_bra(0, 1)),
        (p.nbar13 + 1.0, ket_bra(2, 0)),
        (p.nbar13, ket_bra(0, 2)),
    ];
    let mut out = (h * rho - rho * h) * c(0.0, -1.0);
    for (rate, l) in jumps {
        let ld = l.adjoint();
        let ldl = ld * l;
        out += (l * rho * ld - (ldl * rho + rho * ldl) * r(0.5)) * r(rate);
    }
    out
}

fn r(x: f64) -> Complex64 {
    c(x, 0.0)
}

#[test]
fn counting_generator_matches_transcribed_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let p = random_params(&mut rng);
        let parts = LiouvillianParts::build(&p).unwrap();
        let z = rng.gen_range(-1.0..1.0);
        let l = parts.at(z);
        let t = transcribed(&p, z);
        for row in 0..9 {
            for col in 0..9 {
                let d = (l[(row, col)] - t[row][col]).norm();
                assert!(d < 1e-13, "entry ({row},{col}) differs by {d} at {p:?}");
            }
        }
    }
}

#[test]
fn generator_matches_master_equation_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let p = random_params(&mut rng);
        let l = build_liouvillian(&p).unwrap();
        // Linearity lets an arbitrary complex matrix stand in for ρ.
        let rho = Matrix3::from_fn(|_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let mut v = [Complex64::new(0.0, 0.0); 9];
        for i in 0..3 {
            for j in 0..3 {
                v[vec_index(i, j)] = rho[(i, j)];
            }
        }
        let lv = l.value().mul_vec(&v);
        let expected = master_equation(&p, &rho);
        for i in 0..3 {
            for j in 0..3 {
                let d = (lv[vec_index(i, j)] - expected[(i, j)]).norm();
                assert!(d < 1e-12, "row rho{}{} differs by {d}", i + 1, j + 1);
            }
        }
    }
}

#[test]
fn generator_preserves_trace_and_hermiticity() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let p = random_params(&mut rng);
        let l = *build_liouvillian(&p).unwrap().value();
        for col in 0..9 {
            let s = l[(0, col)] + l[(4, col)] + l[(8, col)];
            assert!(s.norm() < 1e-13);
        }
        for (i, j) in [(0, 1), (0, 2), (1, 2), (0, 0), (1, 1)] {
            for k in 0..3 {
                for m in 0..3 {
                    let a = l[(vec_index(i, j), vec_index(k, m))];
                    let b = l[(vec_index(j, i), vec_index(m, k))];
                    assert!((a - b.conj()).norm() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn counting_jet_matches_exponential_parts() {
    let p = SystemParams::new(0.9, 0.56, 0.5).with_delta_p(0.8).with_equal_gaps(1.3);
    let jet = build_counting_liouvillian(&p, 2).unwrap();
    let parts = LiouvillianParts::build(&p).unwrap();
    let h = 1e-4;
    let fd1: CMat<f64, 9> = (parts.at(h) - parts.at(-h)).scale(r(0.5 / h));
    let fd2: CMat<f64, 9> = (parts.at(h) + parts.at(-h) - parts.at(0.0).scale(r(2.0))).scale(r(1.0 / (h * h)));
    assert!((jet.m.d1 - fd1).max_abs() < 1e-7);
    assert!((jet.m.d2 - fd2).max_abs() < 1e-5);
    let first = build_counting_liouvillian(&p, 1).unwrap();
    assert_eq!(first.m.d2.max_abs(), 0.0);
}

#[test]
fn singular_values_agree_with_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let p = random_params(&mut rng);
        let l = *build_liouvillian(&p).unwrap().value();
        let ours = l.singular_values();
        let dm = DMatrix::from_fn(9, 9, |i, j| l[(i, j)]);
        let mut theirs: Vec<f64> = dm.svd(false, false).singular_values.iter().copied().collect();
        theirs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-11 * theirs[0], "{a} vs {b}");
        }
    }
}

#[test]
fn undriven_generator_is_rank_deficient() {
    let p = SystemParams::new(0.9, 0.0, 0.0);
    let l = *build_liouvillian(&p).unwrap().value();
    assert!(l.rank(1e-10) < 8);
}
