//! Dense complex linear algebra: SVD, eigenpairs, kernels, distances and the
//! realification map.

use num_complex::Complex64;
use nogaps::deloc::neg_second_moment_audit;
use nogaps::densela::{
    dist_to_colspan, eigenpairs, kernel_basis, default_rank_tol, norm2, real_norm2, realify_matrix,
    realify_vector, svd,
};
use nogaps::ensembles::{sample_matrix, EnsembleSpec, EntryDist};

fn main() -> nogaps::Result<()> {
    let spec = EnsembleSpec::iid(7, 4, EntryDist::standard_gaussian()).with_fixed_imag(vec![vec![0.3; 4]; 7]);
    let b = sample_matrix(&spec, 1)?;

    let dec = svd(&b)?;
    println!("singular values of a 7x4 matrix: {:.4?}", dec.singular_values);
    println!("SVD residual: {:.2e}", dec.backend_residual);

    let nsm = neg_second_moment_audit(&b)?;
    println!(
        "negative second moment identity: sum s_j^-2 = {:.10}, sum dist_j^-2 = {:.10}, gap {:.1e}",
        nsm.lhs, nsm.rhs, nsm.gap
    );

    let z: Vec<Complex64> = (0..7).map(|i| Complex64::new(i as f64, 1.0)).collect();
    println!("dist(z, Im B) = {:.6}", dist_to_colspan(&z, &b)?);

    let wide = sample_matrix(&EnsembleSpec::iid(12, 16, EntryDist::SymmetricSign), 2)?;
    let kernel = kernel_basis(&wide, default_rank_tol(12, 16))?;
    let worst = kernel
        .iter()
        .map(|v| norm2(&wide.matvec(v).unwrap()))
        .fold(0.0, f64::max);
    println!("kernel of a 12x16 sign matrix: dimension {}, max |Bv| = {worst:.1e}", kernel.len());

    let a = sample_matrix(&EnsembleSpec::square(6, EntryDist::standard_gaussian()), 3)?;
    let eig = eigenpairs(&a, 1e-8)?;
    for p in &eig.pairs {
        println!("  lambda = {:.4}  residual {:.1e}", p.value, p.residual);
    }

    let x: Vec<Complex64> = vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.5), Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)];
    let lhs = realify_vector(&b.matvec(&x)?);
    let rhs = realify_matrix(&b).matvec(&realify_vector(&x))?;
    let err = lhs.iter().zip(&rhs).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    println!(
        "realification: |real(Bx) - real(B)real(x)| = {err:.1e}, |real(x)| - |x| = {:.1e}",
        real_norm2(&realify_vector(&x)) - norm2(&x)
    );
    Ok(())
}
