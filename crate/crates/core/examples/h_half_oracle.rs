//! The Fourier H^{1/2} oracle on the homeomorphism zoo: partial sums
//! S_K = sum |k| |c_k|^2 of log(phi') and their convergence verdicts.
//!
//! ```bash
//! cargo run --release --example h_half_oracle
//! ```

use adswp::homeo::{default_pwl_base, h_half_seminorm, parse_spec, H12Config, H12Verdict};

fn main() {
    let specs = [
        "rot:0.5".to_string(),
        "mobius:1.4,0,0,0.714285714".to_string(),
        "trig:0.1".to_string(),
        "trig:0.3".to_string(),
        format!("pwl:{};1.5,0.5", default_pwl_base()),
    ];
    let cfg = H12Config { max_k: 1024, tol: 0.01 };
    for spec in &specs {
        let phi = parse_spec(spec).unwrap();
        let rep = h_half_seminorm(&phi, &cfg).unwrap();
        println!("{}", phi.tag());
        for (k, s) in &rep.partial_sums {
            println!("  S_{k:<5} = {s:.6}");
        }
        match rep.verdict {
            H12Verdict::Converged { value, tol } => {
                println!("  verdict: converged to {value:.6} (stall tol {tol})\n");
            }
            H12Verdict::Diverging { growth_rate } => {
                println!("  verdict: diverging, dS/dlnK = {growth_rate:.4}\n");
            }
        }
    }
}
