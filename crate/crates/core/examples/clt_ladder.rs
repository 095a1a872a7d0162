//! The ladder M^i on a 1-stable seed converging to the heat semigroup.

use dyadic::clt::{default_initial, run_clt, CltConfig};
use dyadic::haar::LpExponent;
use dyadic::kernel::{power_law_seed, DEFAULT_WINDOW};

fn main() -> dyadic::error::Result<()> {
    let seed = power_law_seed(2.0 / 3.0, DEFAULT_WINDOW)?;
    let config = CltConfig::default();
    let u0 = default_initial(config.layout)?;
    let report = run_clt(&seed, &config, &u0)?;
    let linf = report.lp_errors(LpExponent::Infinity);
    println!("{:>3} {:>14} {:>14} {:>14}", "i", "max_j abs_err", "L2 error", "Linf error");
    for ((i, eps), (p, inf)) in report.max_errors().into_iter().zip(report.parseval.iter().zip(linf)) {
        if i % 2 == 0 {
            println!("{i:>3} {eps:>14.6e} {:>14.6e} {:>14.6e}", p.l2_err, inf.1);
        }
    }
    println!("error ratio per step tends to 1/2; first monotone index {:?}", report.metadata.i0);
    Ok(())
}
