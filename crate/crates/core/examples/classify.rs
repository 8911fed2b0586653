//! The end-to-end classification experiment on a small zoo: beta sums over
//! three bases, the epsilon sum, and the H^{1/2} verdict must agree.
//!
//! ```bash
//! cargo run --release --example classify
//! ```
//!
//! The full-depth batch version with report files is the `wpdiag` binary:
//!
//! ```bash
//! cargo run --release --bin wpdiag -- --homeo trig:0.3 --depth 12 --out runs/trig03
//! ```

use adswp::diag::{run_diagnostics, Classification, RunConfig};
use adswp::homeo::default_pwl_base;

fn main() {
    let zoo = [
        "rot:0.5".to_string(),
        "mobius:1.3,0.1,0.05,0.7730769230769231".to_string(),
        "trig:0.1".to_string(),
        "trig:0.3".to_string(),
        format!("pwl:{};1.5,0.5", default_pwl_base()),
    ];
    let out_root = std::env::temp_dir().join("adswp-classify");
    for spec in &zoo {
        let cfg = RunConfig {
            homeo_spec: spec.clone(),
            max_depth: 8,
            h12_max_k: 1024,
            eps_basepoints: 2,
            eps_descent_iters: 4,
            out_dir: out_root.join(spec.replace([':', ';', ',', '|'], "_")),
            ..Default::default()
        };
        match run_diagnostics(&cfg) {
            Ok(s) => {
                let label = match &s.classification {
                    Classification::WpConsistent => "WP-consistent".into(),
                    Classification::NonWpConsistent => "non-WP-consistent".into(),
                    Classification::Inconclusive { dissent } => format!("inconclusive: {dissent}"),
                };
                println!("{:40} -> {label}", s.homeo);
            }
            Err(e) => println!("{spec:40} -> error: {e}"),
        }
    }
    println!("\nreports under {}", out_root.display());
}
