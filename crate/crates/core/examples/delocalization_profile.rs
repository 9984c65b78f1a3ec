//! Localization profiles of eigenvectors, the localization event and the
//! reduction of delocalization to invertibility.

use nogaps::deloc::{deloc_profile, disc_net, loc_event, reduction_audit};
use nogaps::densela::ComplexDenseMatrix;
use nogaps::ensembles::{sample_matrix, EnsembleSpec, EntryDist};

fn main() -> nogaps::Result<()> {
    let n = 64;
    let eps_grid = [0.02, 0.05, 0.125, 0.25, 0.5];
    let spec = EnsembleSpec::square(n, EntryDist::standard_gaussian());
    let a = sample_matrix(&spec, 5)?;
    let reports = deloc_profile(&a, &eps_grid, 1e-8)?;
    for (k, &eps) in eps_grid.iter().enumerate() {
        let worst = reports.iter().map(|r| r.localization_curve[k].1).fold(1.0, f64::min);
        println!("eps = {eps:<5}  min over eigenvectors of min_|I|>=eps*n |v_I| = {worst:.4}");
    }
    let sup = reports.iter().map(|r| r.sup_norm).fold(0.0, f64::max);
    println!("largest sup-norm: {sup:.4}; Loc(eps=0.125, delta=1e-3) = {}", loc_event(&reports, 0.125, 1e-3)?);

    let net = disc_net(3.0, n, 0.05)?;
    println!("disc net for M = 3, n = {n}, delta = 0.05: {} centers, mesh {:.3}", net.cardinality, net.mesh);

    let audit = reduction_audit(&a, 0.125, 1e-3, 3.0)?;
    println!("reduction audit on the random matrix: {:?}", audit.status);

    let mut b = ComplexDenseMatrix::identity(8);
    b[(0, 1)] = 0.5.into();
    let audit = reduction_audit(&b, 0.25, 0.1, 1.5)?;
    println!(
        "reduction audit on a localized matrix: {:?}, I = {:?}, lambda0 = {:.3}, s_min = {:.4} <= {:.4}",
        audit.status,
        audit.subset,
        audit.lambda0.unwrap(),
        audit.smin.unwrap(),
        audit.bound
    );
    Ok(())
}
