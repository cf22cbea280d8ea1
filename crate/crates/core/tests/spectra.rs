mod common;

use std::f64::consts::{PI, SQRT_2};

use cbm_core::eigen::{
    dense_spectrum, dense_symmetric_eigenvalues, max_matched_distance, singular_values_complex,
    smallest_symmetric,
};
use cbm_core::operators::{bethe_hessian_dense_complex, build_b, build_bethe_hessian, build_bprime};
use cbm_core::{CbmInstance, OperatorBundle, SolverConfig, SparseMatrix, Spectrum};
use faer::{Mat, Side};
use num_complex::Complex64;

use common::{instance, small_planted, small_two_core, triangle};

fn spectrum(m: &SparseMatrix) -> Spectrum {
    dense_spectrum(m.to_dense().as_ref()).unwrap()
}

fn away_from_unit(z: &Complex64, tol: f64) -> bool {
    (z - 1.0).norm() > tol && (z + 1.0).norm() > tol
}

fn triangle_multiset() -> Vec<Complex64> {
    let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), w, w, w.conj(), w.conj()]
}

#[test]
fn triangle_b_and_bprime_share_the_cycle_spectrum() {
    let bundle = OperatorBundle::new(&triangle());
    for m in [build_b(&bundle), build_bprime(&bundle)] {
        assert_eq!(m.nrows(), 6);
        let got = spectrum(&m);
        let err = max_matched_distance(got.eigenvalues(), &triangle_multiset());
        assert!(err < 1e-8, "max eigenvalue error {err:e}");
        assert!(got.is_conjugate_closed(1e-8));
    }
}

#[test]
fn triangle_bethe_hessian_at_sqrt2() {
    let bundle = OperatorBundle::new(&triangle());
    let h = build_bethe_hessian(&bundle, SQRT_2);
    let got = dense_symmetric_eigenvalues(h.to_dense().as_ref()).unwrap();
    let want = [3.0 - 2.0 * SQRT_2, 3.0 + SQRT_2, 3.0 + SQRT_2];
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() < 1e-12, "{got:?}");
    }
    let r = smallest_symmetric(&h, &SolverConfig::default()).unwrap();
    assert!(r.converged);
    assert!((r.value - want[0]).abs() < 1e-10);
}

#[test]
fn path_b_is_nilpotent() {
    let path = instance(3, &[(0, 1, 1), (1, 2, 1)]);
    let b = build_b(&OperatorBundle::new(&path));
    // exact: B^(2m) kills every vector on a tree
    let mut v = vec![1.0; b.nrows()];
    for _ in 0..b.nrows() {
        v = b.matvec(&v).unwrap();
    }
    assert!(v.iter().all(|&x| x == 0.0));
    assert!(spectrum(&b).max_modulus() < 1e-6);
}

#[test]
fn single_edge_bprime() {
    let edge = instance(2, &[(0, 1, 1)]);
    let got = spectrum(&build_bprime(&OperatorBundle::new(&edge)));
    let want: Vec<Complex64> = [0.0, 0.0, 1.0, -1.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    assert!(max_matched_distance(got.eigenvalues(), &want) < 1e-12);
}

#[test]
fn b_and_bprime_spectra_agree_off_unit_on_two_cores() {
    for seed in 0..50 {
        let inst = small_two_core(seed);
        let bundle = OperatorBundle::new(&inst);
        let keep = |s: Spectrum| -> Vec<Complex64> { s.eigenvalues().iter().copied().filter(|z| away_from_unit(z, 1e-6)).collect() };
        let b = keep(spectrum(&build_b(&bundle)));
        let bp = keep(spectrum(&build_bprime(&bundle)));
        let err = max_matched_distance(&b, &bp);
        assert!(err < 1e-6, "seed {seed}: n={} m={} |B|={} |B'|={} err {err:e}", inst.n(), inst.m(), b.len(), bp.len());
    }
}

#[test]
fn ihara_bass_determinant_ratio() {
    // det(λI − B) = (λ² − 1)^(m−n) · det H(λ) at generic complex λ
    for seed in 0..20 {
        let inst = small_planted(seed);
        let bundle = OperatorBundle::new(&inst);
        let b = build_b(&bundle).to_dense();
        let lambda = Complex64::new(1.3 + 0.05 * seed as f64, 0.7);
        let dim = b.nrows();
        let shifted = Mat::<Complex64>::from_fn(dim, dim, |i, j| {
            let diag = if i == j { lambda } else { Complex64::new(0.0, 0.0) };
            diag - b[(i, j)]
        });
        let lhs = shifted.determinant();
        let exponent = inst.m() as i32 - inst.n() as i32;
        let rhs = (lambda * lambda - 1.0).powi(exponent) * bethe_hessian_dense_complex(&bundle, lambda).determinant();
        let rel = (lhs - rhs).norm() / rhs.norm();
        assert!(rel < 1e-9, "seed {seed}: relative error {rel:e}");
    }
}

#[test]
fn bprime_eigenvalues_are_roots_of_the_bethe_hessian() {
    for seed in 0..50 {
        let inst = small_two_core(seed);
        let bundle = OperatorBundle::new(&inst);
        for z in spectrum(&build_bprime(&bundle)).eigenvalues().iter().filter(|z| away_from_unit(z, 1e-6)) {
            let sv = singular_values_complex(bethe_hessian_dense_complex(&bundle, *z).as_ref()).unwrap();
            let (big, small) = (sv[0], sv[sv.len() - 1]);
            assert!(small < 1e-6 * big, "seed {seed}, λ = {z}: σ_min/σ_max = {:e}", small / big);
        }
    }
}

fn real_eigenvalues(inst: &CbmInstance) -> Vec<f64> {
    spectrum(&build_bprime(&OperatorBundle::new(inst))).real_eigenvalues(1e-6)
}

fn negative_count(bundle: &OperatorBundle, x: f64) -> usize {
    let h = build_bethe_hessian(bundle, x).to_dense();
    dense_symmetric_eigenvalues(h.as_ref()).unwrap().iter().filter(|&&v| v < 0.0).count()
}

/// Grid of `x > floor` that stays at least `gap` away from every real eigenvalue.
fn probe_points(floor: f64, reals: &[f64], gap: f64) -> Vec<f64> {
    (1..=60)
        .map(|k| floor + 1e-3 + 0.1 * k as f64)
        .filter(|x| reals.iter().all(|r| (r - x).abs() > gap))
        .collect()
}

#[test]
fn negative_index_counts_real_eigenvalues_above_x_past_the_degree_bound() {
    let mut checks = 0;
    for seed in 0..100 {
        let inst = small_planted(seed);
        let bundle = OperatorBundle::new(&inst);
        let dmax = *inst.degrees().iter().max().unwrap() as f64;
        let floor = 1.0f64.max((dmax - 1.0).max(0.0).sqrt());
        let reals = real_eigenvalues(&inst);
        for x in probe_points(floor, &reals, 1e-4) {
            let above = reals.iter().filter(|&&r| r > x).count();
            assert_eq!(negative_count(&bundle, x), above, "seed {seed}, x = {x}");
            checks += 1;
        }
    }
    assert!(checks > 1000);
}

#[test]
fn signed_crossing_count_holds_for_all_x_above_one() {
    // each real root λ > x contributes the direction in which its H eigenvalue crossed zero,
    // sign(λ² + 1 − ⟨y, D y⟩) for the unit null vector y of H(λ)
    let mut checks = 0;
    for seed in 0..100 {
        let inst = small_planted(seed);
        let bundle = OperatorBundle::new(&inst);
        let degrees = bundle.degrees().to_vec();
        let reals: Vec<f64> = real_eigenvalues(&inst).into_iter().filter(|&r| r > 1.0 + 1e-6).collect();
        let weights: Vec<i64> = reals
            .iter()
            .map(|&lambda| {
                let h = build_bethe_hessian(&bundle, lambda).to_dense();
                let eig = h.self_adjoint_eigen(Side::Lower).unwrap();
                let k = (0..h.nrows()).min_by(|&a, &b| eig.S()[a].abs().total_cmp(&eig.S()[b].abs())).unwrap();
                let y = eig.U().col(k);
                let ydy: f64 = (0..h.nrows()).map(|i| degrees[i] as f64 * y[i] * y[i]).sum();
                if lambda * lambda + 1.0 - ydy >= 0.0 { 1 } else { -1 }
            })
            .collect();
        for x in probe_points(1.0, &reals, 1e-4) {
            let signed: i64 = reals.iter().zip(&weights).filter(|(r, _)| **r > x).map(|(_, w)| w).sum();
            assert_eq!(negative_count(&bundle, x) as i64, signed, "seed {seed}, x = {x}");
            checks += 1;
        }
    }
    assert!(checks > 1000);
}

#[test]
fn dense_spectra_of_real_operators_are_conjugate_closed() {
    for seed in 0..30 {
        let inst = small_planted(seed);
        assert!(spectrum(&build_bprime(&OperatorBundle::new(&inst))).is_conjugate_closed(1e-8), "seed {seed}");
    }
}

#[test]
fn gershgorin_shift_makes_the_bethe_hessian_semidefinite() {
    for seed in 0..30 {
        let inst = small_planted(seed);
        let bundle = OperatorBundle::new(&inst);
        let x = inst.empirical_alpha().sqrt().max(0.5);
        let h = build_bethe_hessian(&bundle, x);
        let c = h.gershgorin_upper();
        let lowest = dense_symmetric_eigenvalues(h.to_dense().as_ref()).unwrap();
        let top = lowest[lowest.len() - 1];
        assert!(c - top >= -1e-10, "seed {seed}: c = {c}, λ_max = {top}");
    }
}
