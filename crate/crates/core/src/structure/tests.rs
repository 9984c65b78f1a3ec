use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

use super::*;
use crate::densela::{orthonormalize, real_vector, RealMatrix};
use crate::rng::rng_from_seed;

/// Independent dense θ-scan: first grid point satisfying the condition.
fn scan_lcd(v: &[f64], l: f64, cap: f64, h: f64) -> Option<f64> {
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut k = 0u64;
    loop {
        let theta = h * k as f64;
        if theta > cap {
            return None;
        }
        let r = theta * nv;
        let dist2: f64 = v.iter().map(|x| (theta * x - (theta * x).round()).powi(2)).sum();
        if r > l && dist2.sqrt() < l * (r / l).ln().sqrt() {
            return Some(theta);
        }
        k += 1;
    }
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

fn random_unit(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    unit(&(0..n).map(|_| rng.sample(StandardNormal)).collect::<Vec<f64>>())
}

fn random_complex_unit(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = rng_from_seed(seed);
    let z: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let nz = crate::densela::norm2(&z);
    z.into_iter().map(|w| w / nz).collect()
}

#[test]
fn lcd_of_basis_vector() {
    let est = lcd_vector(&[1.0, 0.0, 0.0, 0.0], 1.0, 10.0, 1e-2).unwrap();
    assert!((est.value - 1.0).abs() < 1e-3, "{}", est.value);
    assert!(!est.censored);
    assert_eq!(est.kind, LcdKind::Vector);
}

#[test]
fn lcd_of_diagonal_direction() {
    // The slack lets θ(1,1)/√2 qualify just below θ = 1, well before the
    // lattice point at θ = √2. Dense-scan value: 0.998413.
    let v = unit(&[1.0, 1.0]);
    let est = lcd_vector(&v, 0.5, 10.0, 1e-2).unwrap();
    let oracle = scan_lcd(&v, 0.5, 10.0, 1e-6).unwrap();
    assert!((oracle - 0.998413).abs() < 1e-5);
    assert!((est.value - oracle).abs() < 1e-3);
    assert!(est.witness_residual < log_slack(est.value, 0.5));
}

#[test]
fn lcd_respects_sup_norm_bound() {
    let v = vec![0.1; 100];
    let est = lcd_vector_default(&v, 1.0).unwrap();
    assert!(est.value >= 5.0 - est.grid_step, "{}", est.value);
}

#[test]
fn lcd_matrix_of_identity_rows() {
    let v = RealMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let est = lcd_matrix2(&v, 0.9, 10.0, 0.1).unwrap();
    // Scan along θ = (r, 0): 1 − r < 0.9 sqrt(log(r / 0.9)) first at r = 0.90921.
    let oracle = scan_lcd(&[1.0], 0.9, 10.0, 1e-6).unwrap();
    assert!((oracle - 0.90921).abs() < 1e-5);
    assert!((est.value - oracle).abs() < 2e-2, "{}", est.value);
    let w = &est.witness;
    assert!(((w[0] * w[0] + w[1] * w[1]).sqrt() - est.value).abs() < 1e-12);
}

#[test]
fn lcd_matrix_respects_sup_norm_bound() {
    let mut rng = rng_from_seed(4);
    let cols: Vec<Vec<f64>> = (0..40)
        .map(|_| {
            let phi: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            vec![0.05 * phi.cos(), 0.05 * phi.sin()]
        })
        .collect();
    let v = RealMatrix::from_fn(2, 40, |i, j| cols[j][i]);
    assert!((v.max_column_norm() - 0.05).abs() < 1e-12);
    let est = lcd_matrix2_default(&v, 1.0).unwrap();
    assert!(est.value >= 10.0 - est.grid_step / 100.0, "{}", est.value);
}

#[test]
fn lcd_matrix_with_repeated_row_reduces_to_vector() {
    // Vᵀθ = (θ₁ + θ₂) v, so the shortest θ is along the diagonal and
    // D(V) = D(v) / √2.
    for seed in 0..3 {
        let v = random_unit(3, seed);
        let vm = RealMatrix::from_rows(&[v.clone(), v.clone()]).unwrap();
        let (cap, step) = default_matrix2_search(&vm);
        let m = lcd_matrix2(&vm, 1.0, cap, step).unwrap();
        let oracle = scan_lcd(&v, 1.0, 100.0, 1e-5).unwrap() / 2f64.sqrt();
        assert!((m.value - oracle).abs() <= step / 100.0 * 2.0 + 1e-4, "{} vs {oracle}", m.value);
    }
}

#[test]
fn lcd_rejects_zero_input() {
    assert!(matches!(lcd_vector(&[0.0, 0.0], 1.0, 1.0, 0.1), Err(crate::Error::Parameter { .. })));
    assert!(lcd_matrix2(&RealMatrix::zeros(2, 3), 1.0, 1.0, 0.1).is_err());
    assert!(lcd_lower_bound(&RealMatrix::zeros(1, 3)).is_err());
    assert!(lcd_subspace_upper(&[], 1.0, 2, 0).is_err());
}

#[test]
fn lcd_censors_at_cap() {
    let est = lcd_vector(&[1.0], 1.0, 0.5, 0.01).unwrap();
    assert!(est.censored);
    assert_eq!(est.value, 0.5);
}

#[test]
fn lower_bound_formula() {
    assert_eq!(lcd_lower_bound_vector(&[0.5, -0.25, 0.1]).unwrap(), 1.0);
    let v = RealMatrix::from_fn(2, 5, |i, _| if i == 0 { 0.06 } else { 0.08 });
    assert!((lcd_lower_bound(&v).unwrap() - 5.0).abs() < 1e-12);
}

#[test]
fn subspace_span_of_basis_vector() {
    let e = vec![vec![1.0, 0.0, 0.0, 0.0]];
    let est = lcd_subspace_upper(&e, 1.0, 4, 1).unwrap();
    assert!((est.value - 1.0).abs() < 1e-3);
    assert_eq!(est.kind, LcdKind::SubspaceUpper);
}

#[test]
fn subspace_containing_all_ones() {
    let n = 8;
    let ones = unit(&vec![1.0; n]);
    let raw = [real_vector(&ones), real_vector(&random_unit(n, 3)), real_vector(&random_unit(n, 4))];
    let basis: Vec<Vec<f64>> = orthonormalize(&raw, 1e-12)
        .iter()
        .map(|v| v.iter().map(|z| z.re).collect())
        .collect();
    let est = lcd_subspace_upper(&basis, 1.0, 4, 7).unwrap();
    assert!(est.value <= (n as f64).sqrt() + 1e-2, "{}", est.value);
}

#[test]
fn subspace_full_plane() {
    let e = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let est = lcd_subspace_upper(&e, 1.0, 4, 2).unwrap();
    assert!(est.value <= 1.0 + 1e-3);
}

#[test]
fn subspace_is_reproducible() {
    let raw: Vec<_> = (0..3).map(|s| real_vector(&random_unit(10, 50 + s))).collect();
    let basis: Vec<Vec<f64>> = orthonormalize(&raw, 1e-12)
        .iter()
        .map(|v| v.iter().map(|z| z.re).collect())
        .collect();
    let a = lcd_subspace_upper(&basis, 2.0, 3, 11).unwrap();
    let b = lcd_subspace_upper(&basis, 2.0, 3, 11).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sm_set_examples() {
    let z = real_vector(&[0.9, 0.1, 0.05, 0.02]);
    assert_eq!(sm_set(&z, 0.25).unwrap(), vec![1, 2, 3]);
    let flat = real_vector(&[0.5; 4]);
    assert_eq!(sm_set(&flat, 0.25).unwrap(), vec![1, 2, 3]);
    assert!(sm_set(&flat, 0.1).is_err());
}

#[test]
fn correlation_of_real_direction_is_zero() {
    let z: Vec<Complex64> = random_unit(8, 1).iter().map(|&x| Complex64::new(x, x)).collect();
    let r = rc_correlation(&z, 0.25, CorrelationMethod::Exact).unwrap();
    assert!(r.d_value < 1e-12);
}

#[test]
fn correlation_of_disjoint_supports() {
    // x = 0.6 e₃, y = 0.3 e₄, everything else tiny and in sm(z).
    let mut z = vec![Complex64::new(1e-3, 0.0); 6];
    z[0] = Complex64::new(5.0, 0.0);
    z[2] = Complex64::new(0.6, 0.0);
    z[3] = Complex64::new(0.0, 0.3);
    let r = rc_correlation(&z, 2.0 / 6.0, CorrelationMethod::Exact).unwrap();
    assert_eq!(r.witness_subset.len(), 2);
    // k = 2 removes z₀ and z₂; of the rest only z₃ has an imaginary part.
    assert!(r.small_set.contains(&3));
    let brute = r
        .small_set
        .iter()
        .flat_map(|&a| r.small_set.iter().map(move |&b| (a, b)))
        .filter(|(a, b)| a < b)
        .map(|(a, b)| gram_det(&z, &[a, b]).sqrt())
        .fold(0.0, f64::max);
    assert!((r.d_value - brute).abs() < 1e-15);
    assert!((r.d_value - 0.3 * 1e-3).abs() < 1e-12);
}

#[test]
fn correlation_witness_matches_determinant() {
    for seed in 0..20 {
        let z = random_complex_unit(10, seed);
        let r = rc_correlation(&z, 0.3, CorrelationMethod::Exact).unwrap();
        assert!((r.d_value - gram_det(&z, &r.witness_subset).sqrt()).abs() < 1e-12);
        assert!(r.witness_subset.iter().all(|j| r.small_set.contains(j)));
        assert!((0.0..=1.0).contains(&r.d_value));
    }
}

#[test]
fn correlation_budget_error() {
    let z = random_complex_unit(60, 0);
    assert!(matches!(
        rc_correlation(&z, 0.3, CorrelationMethod::Exact),
        Err(crate::Error::Budget(_))
    ));
    assert!(rc_correlation(&z, 0.3, CorrelationMethod::Greedy).is_ok());
}

#[test]
fn compress_examples() {
    let e1 = real_vector(&[1.0, 0.0, 0.0, 0.0]);
    assert_eq!(compress_class(&e1, 0.25, 0.5).unwrap(), (CompressClass::Compressible, 0.0));
    let flat = real_vector(&unit(&[1.0; 8]));
    let (class, d) = compress_class(&flat, 0.25, 0.8).unwrap();
    assert!((d - 0.75f64.sqrt()).abs() < 1e-12);
    assert_eq!(class, CompressClass::Incompressible);
    assert!(matches!(
        compress_class(&real_vector(&[1.0, 1.0]), 0.5, 0.5),
        Err(crate::Error::Normalization(_))
    ));
}

#[test]
fn cauchy_binet_examples() {
    let z: Vec<Complex64> = random_unit(8, 2).iter().map(|&x| Complex64::new(x, x)).collect();
    let a = cauchy_binet_audit(&z, 0.25).unwrap();
    assert!(a.lhs < 1e-24 && a.rhs < 1e-24 && a.holds);

    for seed in 0..20 {
        let z = random_complex_unit(10, 100 + seed);
        let a = cauchy_binet_audit(&z, 0.2).unwrap();
        assert!(a.holds && a.lhs >= a.rhs);
    }

    let mut z = vec![Complex64::new(0.0, 0.0); 8];
    for j in 0..4 {
        z[j] = Complex64::new(0.5, 0.0);
        z[j + 4] = Complex64::new(0.0, 0.3);
    }
    assert!(cauchy_binet_audit(&z, 0.25).unwrap().holds);
}

/// Brute force over all supports of size s.
fn brute_sparse_dist(z: &[Complex64], s: usize) -> f64 {
    let n = z.len();
    let total: f64 = z.iter().map(|w| w.norm_sqr()).sum();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != s {
            continue;
        }
        let kept: f64 = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| z[j].norm_sqr()).sum();
        best = best.min((total - kept).max(0.0).sqrt());
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lcd_vector_matches_scan(n in 1usize..4, seed: u64, l in 0.3f64..1.5) {
        let v = random_unit(n, seed);
        let cap = 6.0;
        let est = lcd_vector(&v, l, cap, 6e-3).unwrap();
        let oracle = scan_lcd(&v, l, cap, 1e-5);
        match oracle {
            Some(o) => prop_assert!((est.value - o).abs() < 2e-5, "{} vs {o}", est.value),
            None => prop_assert!(est.censored),
        }
    }

    #[test]
    fn lcd_above_sup_norm_bound(n in 1usize..30, seed: u64, l in 0.5f64..3.0) {
        let v = random_unit(n, seed);
        let est = lcd_vector_default(&v, l).unwrap();
        let bound = lcd_lower_bound_vector(&v).unwrap();
        prop_assert!(est.value >= bound - est.grid_step / 1000.0);
        prop_assert!(est.certified_lower.unwrap() >= bound - est.grid_step / 1000.0);
    }

    #[test]
    fn lcd_scale_covariance(n in 1usize..8, seed: u64, s in 0.2f64..5.0) {
        let v = random_unit(n, seed);
        let sv: Vec<f64> = v.iter().map(|x| x * s).collect();
        let a = lcd_vector_default(&v, 1.0).unwrap();
        let b = lcd_vector_default(&sv, 1.0).unwrap();
        prop_assert!((b.value * s - a.value).abs() <= 2.0 * a.grid_step / 1000.0 + 1e-9 * a.value);
    }

    #[test]
    fn sm_set_size_and_order(n in 2usize..20, seed: u64, delta in 0.05f64..0.95) {
        let z = random_complex_unit(n, seed);
        if let Ok(small) = sm_set(&z, delta) {
            let k = (delta * n as f64 + 1e-9).floor() as usize;
            prop_assert_eq!(small.len(), n - k);
            let big: Vec<usize> = (0..n).filter(|j| !small.contains(j)).collect();
            prop_assert_eq!(big.len(), k);
            for &b in &big {
                for &s in &small {
                    prop_assert!(z[b].norm() >= z[s].norm());
                }
            }
        }
    }

    #[test]
    fn greedy_never_beats_exact(seed: u64) {
        let z = random_complex_unit(10, seed);
        let e = rc_correlation(&z, 0.2, CorrelationMethod::Exact).unwrap();
        let g = rc_correlation(&z, 0.2, CorrelationMethod::Greedy).unwrap();
        prop_assert!(g.d_value <= e.d_value + 1e-15);
        prop_assert_eq!(g.method, CorrelationMethod::Greedy);
    }

    #[test]
    fn cauchy_binet_always_holds(n in 6usize..12, seed: u64, k in 2usize..5) {
        let z = random_complex_unit(n, seed);
        let delta = (k as f64 + 0.5) / n as f64;
        prop_assume!(2 * k <= n);
        prop_assert!(cauchy_binet_audit(&z, delta).unwrap().holds);
    }

    #[test]
    fn compress_matches_support_enumeration(n in 2usize..=12, seed: u64, c0 in 0.1f64..0.9) {
        let z = random_complex_unit(n, seed);
        let s = (c0 * n as f64 + 1e-9).floor() as usize;
        let (_, d) = compress_class(&z, c0, 0.5).unwrap();
        prop_assert!((d - brute_sparse_dist(&z, s)).abs() < 1e-12);
    }
}
