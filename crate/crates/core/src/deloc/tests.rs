use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::*;
use crate::densela::{
    dist_to_colspan, norm2, operator_norm, real_vector, s_min, svd, ComplexDenseMatrix,
};
use crate::ensembles::{EnsembleSpec, EntryDist};
use crate::error::Error;
use crate::rng::rng_from_seed;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn random_complex(rows: usize, cols: usize, seed: u64) -> ComplexDenseMatrix {
    let mut rng = rng_from_seed(seed);
    ComplexDenseMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
    })
}

fn random_unit(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = rng_from_seed(seed);
    let v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let nv = norm2(&v);
    v.into_iter().map(|z| z / nv).collect()
}

/// Minimum of `‖v_I‖₂` over all subsets of size exactly `k`.
fn brute_localization(v: &[Complex64], k: usize) -> f64 {
    let n = v.len();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| v[i].norm_sqr()).sum();
        best = best.min(s.sqrt());
    }
    best
}

#[test]
fn localization_examples() {
    let uniform = vec![c(0.5); 4];
    assert_relative_eq!(localization_norm(&uniform, 0.25).unwrap(), 0.5, epsilon = 1e-15);
    let e1 = vec![c(1.0), c(0.0), c(0.0), c(0.0)];
    assert_eq!(localization_norm(&e1, 0.25).unwrap(), 0.0);
    let v = random_unit(10, 3);
    assert_relative_eq!(
        localization_norm(&v, 0.3).unwrap(),
        brute_localization(&v, 3),
        epsilon = 1e-14
    );
}

#[test]
fn localization_errors() {
    assert!(matches!(
        localization_norm(&[c(1.0), c(1.0)], 0.5),
        Err(Error::Normalization(_))
    ));
    let e1 = vec![c(1.0), c(0.0)];
    assert!(matches!(localization_norm(&e1, 0.0), Err(Error::Parameter { .. })));
    assert!(matches!(localization_norm(&e1, 1.5), Err(Error::Parameter { .. })));
}

#[test]
fn ceil_count_absorbs_rounding() {
    assert_eq!(ceil_count(0.3, 10).unwrap(), 3);
    assert_eq!(ceil_count(0.125, 128).unwrap(), 16);
    assert_eq!(ceil_count(0.26, 4).unwrap(), 2);
}

#[test]
fn loc_event_examples() {
    let reports = deloc_profile(&ComplexDenseMatrix::identity(4), &[0.25], 1e-8).unwrap();
    assert!(loc_event(&reports, 0.25, 0.5).unwrap());
    assert!(!loc_event(&reports, 0.25, 0.0).unwrap());

    let uniform = DelocReport::from_vector(0, c(1.0), vec![c(0.5); 4], 0.0, &[0.25]).unwrap();
    assert_eq!(uniform.localization_curve, vec![(0.25, 0.5)]);
    assert!(!loc_event(std::slice::from_ref(&uniform), 0.25, 0.4).unwrap());
    assert!(matches!(loc_event(&[], 0.25, 0.4), Err(Error::Parameter { .. })));
}

#[test]
fn profile_curve_is_monotone_and_bounded() {
    let a = random_complex(20, 20, 5);
    let grid: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
    let reports = deloc_profile(&a, &grid, 1e-8).unwrap();
    assert_eq!(reports.len(), 20);
    for r in &reports {
        assert!(r.residual < 1e-10);
        assert!(r.sup_norm <= 1.0);
        for w in r.localization_curve.windows(2) {
            assert!(w[0].1 <= w[1].1);
        }
        assert!(r.localization_curve.last().unwrap().1 <= 1.0);
    }
}

#[test]
fn disc_net_examples() {
    let net = disc_net(1.0, 1, 1.0).unwrap();
    assert_eq!(net.centers, vec![c(0.0)]);
    assert!(net.cardinality <= 5);

    let net = disc_net(1.0, 1, 0.5).unwrap();
    assert_eq!(net.mesh, 1.0);
    assert!(net.cardinality <= 20);
    assert_eq!(net.covering_failures(10_000, 9), 0);
}

#[test]
fn disc_net_bounds_across_parameters() {
    for &(m, n, delta) in &[
        (1.0, 1, 0.3),
        (1.5, 16, 0.1),
        (3.0, 64, 0.05),
        (2.0, 7, 0.02),
        (1.0, 100, 0.26),
    ] {
        let net = disc_net(m, n, delta).unwrap();
        assert!(net.cardinality as f64 <= (5.0 / (delta * delta)).ceil(), "{m} {n} {delta}");
        assert!(net.centers.iter().all(|z| z.norm() <= net.radius() * (1.0 + 1e-12)));
        assert_eq!(net.covering_failures(10_000, 1), 0);
    }
    assert!(disc_net(0.5, 4, 0.1).is_err());
    assert!(disc_net(1.0, 4, 0.0).is_err());
}

#[test]
fn reduction_audit_identity() {
    let a = ComplexDenseMatrix::identity(4);
    let audit = reduction_audit(&a, 0.25, 0.1, 1.1).unwrap();
    assert_eq!(audit.status, AuditStatus::Certified);
    assert_relative_eq!(audit.bound, 8.0 * 1.1 * 0.1 * 2.0, epsilon = 1e-12);
    assert_eq!(audit.subset.len(), 1);
    assert!(audit.smin.unwrap() <= audit.bound);
    let lambda0 = audit.lambda0.unwrap();
    assert_relative_eq!(audit.smin.unwrap(), (c(1.0) - lambda0).norm(), epsilon = 1e-12);
}

#[test]
fn reduction_audit_non_applicable_and_skipped() {
    let a = random_complex(16, 16, 11).scale(c(0.5));
    let audit = reduction_audit(&a, 0.125, 1e-3, 3.0).unwrap();
    assert_eq!(audit.status, AuditStatus::NotApplicable);
    let audit = reduction_audit(&a.scale(c(100.0)), 0.125, 1e-3, 3.0).unwrap();
    assert_eq!(audit.status, AuditStatus::SkippedUnbounded);
    assert!(reduction_audit(&a, 0.125, 0.6, 3.0).is_err());
}

#[test]
fn reduction_audit_gaussian_sweep() {
    let spec = EnsembleSpec::square(32, EntryDist::standard_gaussian()).with_norm_bound(3.0);
    for i in 0..50 {
        let a = crate::ensembles::sample_matrix(&spec, 1000 + i).unwrap();
        let audit = reduction_audit(&a, 0.125, 1e-3, 3.0).unwrap();
        assert!(audit.passed());
        assert_ne!(audit.status, AuditStatus::Certified);
    }
}

#[test]
fn reduction_audit_certifies_localized_matrices() {
    // Block-diagonal with a 1x1 block: e_0 is an exact eigenvector.
    for seed in 0..20 {
        let mut a = random_complex(12, 12, seed).scale(c(0.3));
        for j in 1..12 {
            a[(0, j)] = c(0.0);
            a[(j, 0)] = c(0.0);
        }
        let audit = reduction_audit(&a, 0.25, 0.2, 2.0).unwrap();
        assert_eq!(audit.status, AuditStatus::Certified, "seed {seed}");
    }
}

#[test]
fn neg_second_moment_examples() {
    let id = neg_second_moment_audit(&ComplexDenseMatrix::identity(2)).unwrap();
    assert_relative_eq!(id.lhs, 2.0, epsilon = 1e-14);
    assert_relative_eq!(id.rhs, 2.0, epsilon = 1e-14);
    let d = neg_second_moment_audit(&ComplexDenseMatrix::from_diag(&[c(2.0), c(1.0)])).unwrap();
    assert_relative_eq!(d.lhs, 1.25, epsilon = 1e-14);
    assert_relative_eq!(d.rhs, 1.25, epsilon = 1e-14);
    for seed in 0..20 {
        let b = random_complex(7, 4, seed);
        assert!(neg_second_moment_audit(&b).unwrap().gap <= 1e-8);
    }
}

#[test]
fn neg_second_moment_rejects_singular() {
    let b = ComplexDenseMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![0.0, 0.0]]).unwrap();
    assert!(matches!(neg_second_moment_audit(&b), Err(Error::Singular(_))));
    assert!(matches!(neg_second_moment_audit(&random_complex(3, 4, 1)), Err(Error::Shape(_))));
}

#[test]
fn distances_match_normal_equations() {
    // dist(B_j, H_j)⁻² is the j-th diagonal entry of (B*B)⁻¹.
    let b = random_complex(7, 4, 21);
    let dists = column_distances(&b).unwrap();
    let gram = b.adjoint().matmul(&b).unwrap();
    let dec = svd(&gram).unwrap();
    for (j, d) in dists.iter().enumerate() {
        let inv_jj: f64 = dec
            .singular_values
            .iter()
            .zip(&dec.right_basis)
            .map(|(s, v)| v[j].norm_sqr() / s)
            .sum();
        assert_relative_eq!(d.powi(-2), inv_jj, max_relative = 1e-9);
    }
}

#[test]
fn row_deletion_shrinks_distances() {
    for seed in 0..20 {
        let b = random_complex(7, 4, 40 + seed);
        for row in 0..7 {
            assert!(row_deletion_audit(&b, row).unwrap().holds);
        }
    }
}

#[test]
fn split_examples() {
    let b = ComplexDenseMatrix::from_diag(&[c(3.0), c(0.1)]);
    let split = split_spectral_subspaces(&b, 1.0).unwrap();
    assert_eq!(split.minus_dim, 1);
    assert_relative_eq!(split.minus_basis[0][1].norm(), 1.0, epsilon = 1e-14);
    assert_eq!(split.minus_basis[0][0].norm(), 0.0);
    let split = split_spectral_subspaces(&b, 0.05).unwrap();
    assert_eq!(split.minus_dim, 0);
    assert!(split_spectral_subspaces(&b, 0.0).is_err());
}

#[test]
fn split_bases_are_complete_and_bounded_below() {
    for seed in 0..10 {
        let b = random_complex(6, 9, seed);
        let threshold = 0.5 * svd(&b).unwrap().largest();
        let split = split_spectral_subspaces(&b, threshold).unwrap();
        assert_eq!(split.minus_dim + split.plus_dim(), 9);
        let all: Vec<_> = split.minus_basis.iter().chain(&split.plus_basis).collect();
        for (i, x) in all.iter().enumerate() {
            for (j, y) in all.iter().enumerate() {
                let ip = crate::densela::inner(x, y).norm();
                assert!((ip - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
        assert!(sample_plus_gain(&b, &split, 100, seed).unwrap() >= threshold - 1e-10);
    }
}

#[test]
fn decomposition_examples() {
    let audit = decomposition_bound_audit(&ComplexDenseMatrix::identity(2), 1, None).unwrap();
    assert_relative_eq!(audit.s_b_on_plus, 1.0, epsilon = 1e-14);
    assert_relative_eq!(audit.s_g_on_minus, 1.0, epsilon = 1e-14);
    assert_relative_eq!(audit.bound, 0.25, epsilon = 1e-14);
    assert_relative_eq!(audit.s_a, 1.0, epsilon = 1e-14);
    assert!(audit.holds);
    let audit =
        decomposition_bound_audit(&ComplexDenseMatrix::from_diag(&[c(2.0), c(1.0)]), 1, None).unwrap();
    assert!(audit.holds);
    assert_relative_eq!(audit.bound, 2.0 * 1.0 / 8.0, epsilon = 1e-14);
}

#[test]
fn decomposition_rejects_degenerate_splits() {
    let a = random_complex(4, 4, 2);
    assert!(matches!(decomposition_bound_audit(&a, 0, None), Err(Error::Parameter { .. })));
    assert!(matches!(decomposition_bound_audit(&a, 4, None), Err(Error::Parameter { .. })));
    assert!(matches!(decomposition_bound_audit(&a, 2, Some(1e6)), Err(Error::Parameter { .. })));
    assert!(matches!(decomposition_bound_audit(&random_complex(3, 4, 1), 1, None), Err(Error::Shape(_))));
}

#[test]
fn decomposition_randomized() {
    let mut rng = rng_from_seed(77);
    for seed in 0..100 {
        let cols = rng.random_range(2..=16);
        let rows = rng.random_range(cols..=cols + 4);
        let a = random_complex(rows, cols, 500 + seed);
        let split_row = rng.random_range(1..rows);
        let b = a.select_rows(0..split_row);
        let values = svd(&b).unwrap().right_values().to_vec();
        let (hi, lo) = (values[0], *values.last().unwrap());
        let t = lo + (hi - lo) * rng.random_range(0.01..0.99);
        let audit = decomposition_bound_audit(&a, split_row, Some(t)).unwrap();
        assert!(audit.holds, "seed {seed}: {audit:?}");
    }
}

#[test]
fn smin_experiment_zero_ensemble() {
    let spec = EnsembleSpec::square(8, EntryDist::point_mass(0.0));
    let lambda0 = Complex64::new(0.3, -0.4);
    let records = smin_experiment(&spec, 0.25, lambda0, 3, 1).unwrap();
    assert_eq!(records.len(), 3);
    for r in &records {
        assert_relative_eq!(r.metric("smin").unwrap(), 0.5, epsilon = 1e-14);
    }
    let records = smin_experiment(&spec, 0.25, c(0.0), 2, 1).unwrap();
    assert!(records.iter().all(|r| r.metric("smin") == Some(0.0)));
}

#[test]
fn smin_experiment_is_reproducible_and_matches_direct() {
    let spec = EnsembleSpec::square(16, EntryDist::standard_gaussian());
    let a = smin_experiment(&spec, 0.125, c(1.0), 1, 99).unwrap();
    let b = smin_experiment(&spec, 0.125, c(1.0), 1, 99).unwrap();
    assert_eq!(a[0].without_timing(), b[0].without_timing());
    let m = crate::ensembles::sample_matrix(&spec, a[0].seed).unwrap();
    let direct = s_min(
        &crate::ensembles::shift_matrix(&m, c(1.0))
            .unwrap()
            .select_columns(&(0..14).collect::<Vec<_>>()),
    )
    .unwrap();
    assert_eq!(a[0].metric("smin").unwrap(), direct);
}

#[test]
fn distance_experiment_empty_span() {
    let spec = EnsembleSpec::iid(5, 1, EntryDist::standard_gaussian());
    let records = distance_experiment(&spec, &EntryDist::SymmetricSign, 1.0, 4, 3).unwrap();
    for r in &records {
        assert_relative_eq!(r.metric("dist").unwrap(), 5f64.sqrt(), epsilon = 1e-14);
        assert_eq!(r.flag("boundedness_held"), Some(true));
    }
}

#[test]
fn distance_experiment_matches_direct() {
    let spec = EnsembleSpec::iid(10, 1, EntryDist::standard_gaussian());
    let records = distance_experiment(&spec, &EntryDist::standard_gaussian(), 0.2, 2, 8).unwrap();
    let mut h_spec = spec.clone();
    h_spec.n_cols = 8;
    for r in &records {
        let mut rng = rng_from_seed(r.seed);
        let h = crate::ensembles::sample_with(&h_spec, &mut rng).unwrap();
        let z: Vec<f64> = (0..10).map(|_| EntryDist::standard_gaussian().sample(&mut rng)).collect();
        let d = dist_to_colspan(&real_vector(&z), &h).unwrap();
        assert_eq!(r.metric("dist").unwrap(), d);
        assert_relative_eq!(r.metric("dist_scaled").unwrap(), d / 2f64.sqrt(), epsilon = 1e-14);
    }
}

#[test]
fn kernel_experiment_empty_and_planted() {
    let spec = EnsembleSpec::iid(1, 24, EntryDist::SymmetricSign);
    let params = KernelLcdParams::default();
    assert!(kernel_lcd_experiment(&spec, 0.25, &params, 0, 1).unwrap().is_empty());

    let b = planted_kernel_matrix(18, 24, 5);
    let ones = vec![c(1.0); 24];
    assert!(norm2(&b.matvec(&ones).unwrap()) < 1e-12);
    let (dim, est) = kernel_lcd(&b, 0.25, 4, 1).unwrap();
    assert_eq!(dim, 6);
    assert!(est.value <= 24f64.sqrt() + 1e-2, "{}", est.value);
}

#[test]
fn kernel_experiment_records() {
    let spec = EnsembleSpec::iid(1, 12, EntryDist::SymmetricSign);
    let records = kernel_lcd_experiment(&spec, 0.25, &KernelLcdParams::default(), 2, 4).unwrap();
    for r in &records {
        assert!(!r.failed(), "{:?}", r.error);
        assert_eq!(r.metric("kernel_dim"), Some(3.0));
        let lcd = r.metric("lcd_upper").unwrap();
        assert_eq!(r.flag("exceeds_floor"), Some(lcd >= 0.5 * 12f64.sqrt()));
        assert_relative_eq!(r.metric("threshold").unwrap(), 3.0, epsilon = 1e-14);
    }
}

#[test]
fn audits_experiment_passes() {
    let spec = EnsembleSpec::square(10, EntryDist::standard_gaussian());
    let records = audits_experiment(&spec, 0.2, 0.1, 10, 3).unwrap();
    assert_eq!(records.len(), 10);
    for r in &records {
        assert_eq!(r.flag("audit_passed"), Some(true), "{r:?}");
    }
}

#[test]
fn deloc_experiment_records() {
    let spec = EnsembleSpec::square(16, EntryDist::standard_gaussian()).with_norm_bound(3.0);
    let records = deloc_experiment(&spec, 0.125, 1e-3, 3, 2).unwrap();
    for r in &records {
        assert_eq!(r.flag("loc"), Some(false));
        assert_eq!(r.flag("residuals_certified"), Some(true));
        let a = crate::ensembles::sample_matrix(&spec, r.seed).unwrap();
        assert_eq!(r.metric("opnorm_scaled").unwrap(), operator_norm(&a).unwrap() / 4.0);
        assert_eq!(r.metric("min_localization").unwrap(), min_localization(&a, 0.125).unwrap());
    }
}

/// `δ^{−N} γ^{−2δN−1} (CD/√N)^{2N−δN} d^{N−δN−1}` by direct products.
fn complex_bound_oracle(d_level: f64, d: f64, n: f64, delta: f64, l: f64, c: f64) -> f64 {
    let gamma = (l / d_level) * (d_level / l).ln().sqrt();
    delta.powf(-n)
        * gamma.powf(-2.0 * delta * n - 1.0)
        * (c * d_level / n.sqrt()).powf(2.0 * n - delta * n)
        * d.powf(n - delta * n - 1.0)
}

fn real_bound_oracle(d_level: f64, n: f64, delta: f64, l: f64, c: f64) -> f64 {
    let gamma = (l / d_level) * (d_level / l).ln().sqrt();
    delta.powf(-delta * n) * gamma.powf(-2.0 * delta * n - 1.0) * (c * d_level / n.sqrt()).powf(n - delta * n + 1.0)
}

#[test]
fn levelset_examples() {
    let base = LevelSetParams {
        case: LevelSetCase::Complex,
        d_level: 100.0,
        d: 1.0,
        n: 100,
        delta: 0.1,
        l: 10.0,
        c: 1.0,
    };
    let b = levelset_net_bound(&base).unwrap();
    assert!(b.cardinality.is_finite() && b.cardinality > 0.0);
    assert_relative_eq!(b.gamma, 0.1 * 10f64.ln().sqrt(), epsilon = 1e-15);
    assert_relative_eq!(b.d0, 0.1 * b.gamma, epsilon = 1e-15);
    let oracle = complex_bound_oracle(100.0, 1.0, 100.0, 0.1, 10.0, 1.0);
    assert_relative_eq!(b.cardinality, oracle, max_relative = 1e-10);

    let gamma_zero = levelset_net_bound(&LevelSetParams { l: 100.0, ..base });
    assert!(matches!(gamma_zero, Err(Error::Parameter { ref name, .. }) if name == "gamma"));

    let real = LevelSetParams {
        case: LevelSetCase::Real,
        d: 0.0,
        ..base
    };
    let r0 = levelset_net_bound(&real).unwrap();
    let r1 = levelset_net_bound(&LevelSetParams { d: 0.01, ..real }).unwrap();
    assert_eq!(r0.cardinality, r1.cardinality);
    assert_relative_eq!(r0.cardinality, real_bound_oracle(100.0, 100.0, 0.1, 10.0, 1.0), max_relative = 1e-10);

    let mismatch = levelset_net_bound(&LevelSetParams { d: 0.5, ..real });
    assert!(matches!(mismatch, Err(Error::Parameter { ref name, .. }) if name == "d0"));
    let mismatch = levelset_net_bound(&LevelSetParams { d: 0.001, ..base });
    assert!(matches!(mismatch, Err(Error::Parameter { ref name, .. }) if name == "d0"));
}

#[test]
fn compressible_bound() {
    let (log, value) = compressible_net_bound(2.0, 0.5, 0.5, 10).unwrap();
    assert_relative_eq!(value, 16f64.powi(5), max_relative = 1e-12);
    assert_relative_eq!(log, 5.0 * 16f64.ln(), epsilon = 1e-12);
}

#[test]
fn integer_point_net_small() {
    // Primitive directions in Z² with norm ≤ 1: (±1, 0), (0, ±1).
    assert_eq!(integer_point_net(2, 1.0).unwrap().len(), 4);
    // Norm ≤ √2 adds the four diagonals.
    assert_eq!(integer_point_net(2, 2f64.sqrt() + 1e-9).unwrap().len(), 8);
    assert!(integer_point_net(7, 2.0).is_err());
}

#[test]
fn integer_net_covers_structured_vectors() {
    let q = [1.0, 2.0, 2.0];
    let x: Vec<f64> = q.iter().map(|v| v / 3.0).collect();
    let check = integer_net_check(&x, 0.5, 10.0).unwrap().unwrap();
    assert!(check.covered, "{check:?}");
    let mut rng = rng_from_seed(4);
    let mut covered = 0;
    for _ in 0..30 {
        let y: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ny = crate::densela::real_norm2(&y);
        let y: Vec<f64> = y.iter().map(|v| v / ny).collect();
        if let Some(check) = integer_net_check(&y, 0.5, 8.0).unwrap() {
            assert!(check.covered, "{check:?}");
            covered += 1;
        }
    }
    assert!(covered > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn localization_matches_subset_enumeration(n in 1usize..=12, k in 1usize..=12, seed in any::<u64>()) {
        let k = k.min(n);
        let v = random_unit(n, seed);
        let eps = k as f64 / n as f64;
        let got = localization_norm(&v, eps).unwrap();
        prop_assert!((got - brute_localization(&v, k)).abs() <= 1e-14);
    }

    #[test]
    fn localization_monotone_in_eps(n in 2usize..=40, seed in any::<u64>()) {
        let v = random_unit(n, seed);
        let mut prev = 0.0;
        for k in 1..=n {
            let cur = localization_norm(&v, k as f64 / n as f64).unwrap();
            prop_assert!(cur >= prev);
            prev = cur;
        }
    }

    #[test]
    fn nsm_identity_on_tall(cols in 1usize..=8, extra in 1usize..=6, seed in any::<u64>()) {
        let b = random_complex(cols + extra, cols, seed);
        prop_assert!(neg_second_moment_audit(&b).unwrap().gap <= 1e-8);
    }

    #[test]
    fn disc_net_cardinality(m in 1.0f64..4.0, n in 1usize..200, delta in 0.02f64..1.0) {
        let net = disc_net(m, n, delta).unwrap();
        prop_assert!(net.cardinality as f64 <= (5.0 / (delta * delta)).ceil());
        prop_assert_eq!(net.covering_failures(500, 3), 0);
    }
}
