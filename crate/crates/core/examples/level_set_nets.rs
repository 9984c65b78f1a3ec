//! Cardinality bounds for nets of LCD level sets, the compressible-vector
//! net, and an explicit integer-point net in low dimension.

use nogaps::deloc::{
    compressible_net_bound, integer_net_check, integer_point_net, levelset_net_bound,
    LevelSetCase, LevelSetParams,
};

fn main() -> nogaps::Result<()> {
    let n = 100;
    let sn = (n as f64).sqrt();
    for (case, d) in [(LevelSetCase::Complex, 1.0), (LevelSetCase::Complex, 0.2), (LevelSetCase::Real, 0.0)] {
        let p = LevelSetParams {
            case,
            d_level: 10.0 * sn,
            d,
            n,
            delta: 0.1,
            l: sn,
            c: 1.0,
        };
        let b = levelset_net_bound(&p)?;
        println!(
            "{case:?}, d = {d}: gamma = {:.4}, d0 = {:.4}, log10 |net| <= {:.2}",
            b.gamma,
            b.d0,
            b.log_cardinality / std::f64::consts::LN_10
        );
    }
    let (log, _) = compressible_net_bound(2.0, 0.1, 0.2, n)?;
    println!("compressible net, C = 2, c0 = 0.1, c1 = 0.2: log10 |net| <= {:.2}", log / std::f64::consts::LN_10);

    let net = integer_point_net(3, 5.0)?;
    println!("primitive integer directions in Z^3 with norm <= 5: {}", net.len());
    let x = [2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0];
    if let Some(check) = integer_net_check(&x, 0.5, 10.0)? {
        println!(
            "x = (2,2,1)/3: LCD {:.4}, nearest net direction at {:.2e} (allowed {:.3})",
            check.lcd, check.distance, check.allowed
        );
    }
    Ok(())
}
