//! LCD of kernels of random rectangular matrices, with a planted
//! arithmetic kernel as a control.

use nogaps::deloc::{kernel_lcd, kernel_lcd_experiment, planted_kernel_matrix, KernelLcdParams};
use nogaps::ensembles::{EnsembleSpec, EntryDist};
use nogaps::harness::flag_rate;

fn main() -> nogaps::Result<()> {
    let big_n = 24;
    let eps = 0.25;
    let spec = EnsembleSpec::iid(1, big_n, EntryDist::SymmetricSign);
    let records = kernel_lcd_experiment(&spec, eps, &KernelLcdParams::default(), 8, 77)?;
    for r in &records {
        println!(
            "trial {}: kernel dim {}, LCD upper estimate {:.3} (floor {:.3})",
            r.trial_index,
            r.metric("kernel_dim").unwrap_or(f64::NAN),
            r.metric("lcd_upper").unwrap_or(f64::NAN),
            r.metric("floor").unwrap_or(f64::NAN)
        );
    }
    let (count, n, lo, hi) = flag_rate(&records, "exceeds_floor")?;
    println!("estimate above 0.5 sqrt(N) in {count}/{n} trials (Wilson [{lo:.3}, {hi:.3}])");

    let b = planted_kernel_matrix(18, big_n, 3);
    let (_, est) = kernel_lcd(&b, eps, 8, 1)?;
    println!(
        "planted all-ones kernel: estimate {:.4} vs sqrt(N) = {:.4}",
        est.value,
        (big_n as f64).sqrt()
    );
    Ok(())
}
