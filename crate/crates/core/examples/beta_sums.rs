//! Beta numbers over dyadic intervals and the multiscale beta sums:
//! best lines, gradients, qs-numbers, per-depth square sums, verdicts.
//!
//! ```bash
//! cargo run --release --example beta_sums
//! ```

use adswp::beta::{best_linear_linf, beta_number, beta_sum, qs_number, SumVerdict};
use adswp::dyadic::DyadicInterval;
use adswp::homeo::{default_pwl_base, parse_spec};

fn main() {
    // the kink interval: slopes (3/2, 1/2) around the break give
    // gamma = 1, E0 = h/4, beta = 1/8, qs = 1/4
    let b = default_pwl_base();
    let phi = parse_spec(&format!("pwl:{b};1.5,0.5")).unwrap();
    let kink = b + std::f64::consts::FRAC_PI_2;
    let iv = adswp::Interval::new(kink - 0.05, kink + 0.05);
    let line = best_linear_linf(&phi, iv);
    println!("kink interval: gamma = {:.6}, E0 = {:.6}", line.gradient, line.error);
    println!("beta = {:.6}, qs = {:.6}", beta_number(&phi, iv), qs_number(&phi, iv));
    println!(
        "witnesses alternate: {:?}",
        line.witnesses.iter().map(|w| w.1.signum()).collect::<Vec<_>>()
    );

    // beta decay along a nested chain for a Mobius map
    let m = parse_spec("mobius:1.483,0,0,0.674").unwrap();
    println!("\nMobius beta decay (slope of log beta in log l is about 1):");
    for depth in 3..=8u32 {
        let i = DyadicInterval::new(0.3, depth, 1 << (depth - 3));
        println!("  depth {depth}: beta = {:.3e}", beta_number(&m, i.interval()));
    }

    // per-depth sums and verdicts over the zoo
    println!();
    for spec in ["rot:0.5", "trig:0.3", &format!("pwl:{b};1.5,0.5")] {
        let phi = parse_spec(spec).unwrap();
        let rep = beta_sum(&phi, 0.0, 3.0, 10);
        print!("{:24} per-depth ", phi.tag());
        for d in rep.per_depth.iter().skip(5) {
            print!("{:.2e} ", d.sum);
        }
        match rep.verdict {
            SumVerdict::Converging { tail_ratio } => {
                println!("-> converging (tail ratio {tail_ratio:.2})");
            }
            SumVerdict::Diverging { depth_floor } => {
                println!("-> diverging (floor {depth_floor:.3})");
            }
        }
    }
}
