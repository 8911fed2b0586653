//! Epsilon numbers: quadratic and fractional-linear majorants, certified
//! brackets, epsilon sums, and the cross-inequality fit against beta.
//!
//! ```bash
//! cargo run --release --example epsilon_numbers
//! ```

use adswp::beta::TripleTable;
use adswp::dyadic::DyadicInterval;
use adswp::epsilon::{
    beta_epsilon_inequality, epsilon_number, epsilon_sum, fractional_majorant,
    quadratic_majorant, verify_quadratic, EpsilonConfig,
};
use adswp::homeo::{default_pwl_base, parse_spec};

fn main() {
    let cfg = EpsilonConfig::default();

    // Mobius inputs are pinched exactly: bracket [0, 0]
    let mob = parse_spec("mobius:1.3,0.2,0.1,0.8461538461538463").unwrap();
    let table = TripleTable::build(&mob, 0.0, 6);
    let i = DyadicInterval::new(0.0, 6, 17);
    let b = epsilon_number(&mob, &i, &table, &cfg);
    println!("Mobius input: bracket [{:.1e}, {:.1e}]", b.lo, b.hi);

    // constructive majorants for trig(0.3) on a deep interval
    let phi = parse_spec("trig:0.3").unwrap();
    let table = TripleTable::build(&phi, 0.0, 10);
    let i = DyadicInterval::new(0.0, 10, 341);
    let m = quadratic_majorant(&phi, &i, &table, &cfg).unwrap();
    println!("\nquadratic majorant at depth 10: P={:.3e} Q={:.3e} R={:.3e}", m.p, m.q, m.r);
    println!("Q <= l(I)^(1/4): {:.3e} <= {:.3e}", m.q, i.len().powf(0.25));
    let x = i.interval().mid();
    let worst = verify_quadratic(&phi, &m, x, 512).unwrap();
    println!("p - phi >= 0 on [x-5Q, x+3Q], worst margin {worst:.3e}");
    match fractional_majorant(&phi, &m, x, &cfg) {
        Ok((fp, fm)) => {
            println!(
                "fractional pair pinches phi: f+(x) - phi(x) = {:.3e}, phi(x) - f-(x) = {:.3e}",
                fp.eval(x) - phi.lift(x),
                phi.lift(x) - fm.eval(x)
            );
        }
        Err(e) => println!("fractional majorant: {e}"),
    }

    // brackets along a nested chain
    println!("\nbrackets along a chain (trig 0.3):");
    for depth in 5..=9u32 {
        let i = DyadicInterval::new(0.0, depth, (1u64 << depth) / 5);
        let b = epsilon_number(&phi, &i, &table, &cfg);
        println!("  depth {depth}: [{:.4e}, {:.4e}]", b.lo, b.hi);
    }

    // epsilon sums over the zoo
    let quick = EpsilonConfig { basepoints: 2, descent_iters: 4, ..Default::default() };
    println!();
    for spec in ["rot:0.5", "trig:0.3", &format!("pwl:{};1.5,0.5", default_pwl_base())] {
        let phi = parse_spec(spec).unwrap();
        let (rep, _) = epsilon_sum(&phi, 0.0, 8, &quick);
        print!("{:24}", phi.tag());
        for d in rep.per_depth.iter().skip(4) {
            print!("{:.2e} ", d.sum);
        }
        println!("-> {:?}", rep.verdict);
    }

    // the beta <= K (eps + l^2 + l(phi)^2) fit
    let fit = beta_epsilon_inequality(&phi, 0.0, 4..=7, &quick);
    println!(
        "\ncross-inequality: K = {:.3} at depth {} index {} ({} intervals)",
        fit.k, fit.argmax_depth, fit.argmax_index, fit.intervals_used
    );
}
