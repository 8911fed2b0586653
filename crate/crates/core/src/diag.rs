//! Batch diagnostic harness: run a homeomorphism through the beta-sum,
//! epsilon-sum and `H^{1/2}` diagnostics, write per-interval tables and
//! per-depth sums, fit the cross-inequality constant, and classify.
//!
//! Classification demands three-way agreement: all diagnostics converging
//! means `wp-consistent`, all diverging means `non-wp-consistent`, anything
//! else is `inconclusive` with the dissenting diagnostic named. Each
//! verdict is a finite-depth heuristic for a statement about infinite
//! sums, so a lone dissent is reported rather than outvoted.
//!
//! Output files (in the run directory):
//! * `beta_<j>.csv` - per-interval rows for base `j`
//! * `epsilon.csv`  - per-interval brackets and witness jets (base 0)
//! * `sums.csv`     - per-depth beta and epsilon square sums
//! * `summary.json` - verdicts, classification, fitted constants
//! * `figures.json` - sampled curves (with `--figures`)

use crate::adsgeom::{boundary_diamond, limiting_domain};
use crate::beta::{beta_rows, beta_sum, BetaRow, SumReport, SumVerdict};
use crate::charts::{acausal_circle_of, sample_acausal_curve, AcausalCurve};
use crate::dyadic::DyadicInterval;
use crate::epsilon::{epsilon_sum, EpsilonConfig, EpsilonRow};
use crate::gauss::{mu_from_lambda, mu_tilde_sq};
use crate::homeo::{h_half_seminorm, parse_spec, H12Config, H12Report, H12Verdict, HomeoError};
use crate::mobius::MobiusMap;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiagError {
    #[error(transparent)]
    Homeo(#[from] HomeoError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("bad config: {0}")]
    BadConfig(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub homeo_spec: String,
    pub bases: Vec<f64>,
    pub multiplier: f64,
    pub max_depth: u32,
    pub eta: f64,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub jobs: usize,
    /// ladder ceiling for the `H^{1/2}` partial sums
    pub h12_max_k: u32,
    /// epsilon work knobs (basepoints, descent budget)
    pub eps_basepoints: usize,
    pub eps_descent_iters: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            homeo_spec: "rot:0".into(),
            bases: vec![0.0, std::f64::consts::PI / 3.0, -std::f64::consts::PI / 3.0],
            multiplier: 3.0,
            max_depth: 12,
            eta: 0.5,
            out_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
            jobs: 0,
            h12_max_k: 2048,
            eps_basepoints: 3,
            eps_descent_iters: 12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Classification {
    WpConsistent,
    NonWpConsistent,
    Inconclusive { dissent: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub homeo: String,
    pub bases: Vec<f64>,
    pub multiplier: f64,
    pub max_depth: u32,
    pub beta_sums: Vec<SumReport>,
    pub epsilon_sum: SumReport,
    pub h12: H12Report,
    /// fitted constant of `beta <= K (eps + l^2 + l(phi)^2)` and its argmax
    pub beta_epsilon_k: f64,
    pub beta_epsilon_argmax: (u32, u64),
    pub classification: Classification,
}

fn verdict_name(converging: bool) -> &'static str {
    if converging {
        "converging"
    } else {
        "diverging"
    }
}

fn classify(beta: &[SumReport], eps: &SumReport, h12: &H12Report) -> Classification {
    let beta_conv: Vec<bool> = beta
        .iter()
        .map(|r| matches!(r.verdict, SumVerdict::Converging { .. }))
        .collect();
    let eps_conv = matches!(eps.verdict, SumVerdict::Converging { .. });
    let h12_conv = matches!(h12.verdict, H12Verdict::Converged { .. });

    let beta_all_conv = beta_conv.iter().all(|b| *b);
    let beta_all_div = beta_conv.iter().all(|b| !*b);
    if !(beta_all_conv || beta_all_div) {
        return Classification::Inconclusive {
            dissent: "beta sums disagree across bases".into(),
        };
    }
    let b = beta_all_conv;
    if b == eps_conv && b == h12_conv {
        if b {
            Classification::WpConsistent
        } else {
            Classification::NonWpConsistent
        }
    } else {
        let mut dissent = Vec::new();
        if eps_conv != b {
            dissent.push(format!("epsilon sum is {}", verdict_name(eps_conv)));
        }
        if h12_conv != b {
            dissent.push(format!("H^(1/2) is {}", verdict_name(h12_conv)));
        }
        Classification::Inconclusive {
            dissent: format!(
                "beta sums {} but {}",
                verdict_name(b),
                dissent.join(" and ")
            ),
        }
    }
}

fn beta_csv(rows: &[BetaRow]) -> String {
    let mut s = String::from("depth,k,len,image_len,beta,gamma,qs\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.depth, r.index, r.len, r.image_len, r.beta, r.gamma, r.qs
        );
    }
    s
}

fn epsilon_csv(rows: &[EpsilonRow]) -> String {
    let mut s = String::from(
        "depth,k,lo,hi,basepoint,plus_value,plus_d1,plus_d2,minus_value,minus_d1,minus_d2\n",
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.depth,
            r.index,
            r.lo,
            r.hi,
            r.basepoint,
            r.plus_jet.0,
            r.plus_jet.1,
            r.plus_jet.2,
            r.minus_jet.0,
            r.minus_jet.1,
            r.minus_jet.2
        );
    }
    s
}

fn sums_csv(beta: &[SumReport], eps: &SumReport) -> String {
    let mut s = String::from("diagnostic,base,depth,sum,cumulative\n");
    for rep in beta {
        for d in &rep.per_depth {
            let _ = writeln!(s, "beta,{},{},{},{}", rep.base, d.depth, d.sum, d.cumulative);
        }
    }
    for d in &eps.per_depth {
        let _ = writeln!(s, "epsilon,{},{},{},{}", eps.base, d.depth, d.sum, d.cumulative);
    }
    s
}

/// Run the full diagnostic battery and write the report files.
/// Returns the summary for in-process use.
pub fn run_diagnostics(cfg: &RunConfig) -> Result<Summary, DiagError> {
    if cfg.multiplier < 1.0 {
        return Err(DiagError::BadConfig("multiplier must be >= 1".into()));
    }
    if cfg.max_depth > crate::beta::MAX_SUM_DEPTH {
        return Err(DiagError::BadConfig(format!(
            "depth {} above guard {}",
            cfg.max_depth,
            crate::beta::MAX_SUM_DEPTH
        )));
    }
    if cfg.bases.is_empty() {
        return Err(DiagError::BadConfig("at least one base required".into()));
    }
    if cfg.jobs > 0 {
        // run the whole computation inside a dedicated pool so the thread
        // count is honored regardless of global state
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| DiagError::BadConfig(e.to_string()))?;
        let inner = RunConfig { jobs: 0, ..cfg.clone() };
        return pool.install(move || run_diagnostics(&inner));
    }
    let phi = parse_spec(&cfg.homeo_spec)?;

    let h12 = h_half_seminorm(&phi, &H12Config { max_k: cfg.h12_max_k, tol: 0.01 })
        .map_err(|e| DiagError::BadConfig(e.to_string()))?;

    let mut beta_reports = Vec::new();
    let mut beta_tables = Vec::new();
    for &base in &cfg.bases {
        beta_reports.push(beta_sum(&phi, base, cfg.multiplier, cfg.max_depth));
        beta_tables.push(beta_rows(&phi, base, cfg.max_depth));
    }

    let eps_cfg = EpsilonConfig {
        eta: cfg.eta,
        basepoints: cfg.eps_basepoints,
        descent_iters: cfg.eps_descent_iters,
        ..Default::default()
    };
    let (eps_report, eps_rows) = epsilon_sum(&phi, cfg.bases[0], cfg.max_depth, &eps_cfg);

    // cross-inequality fit from the already-computed rows (base 0)
    let mut k_fit = 0.0;
    let mut argmax = (0u32, 0u64);
    for (b, e) in beta_tables[0].iter().zip(eps_rows.iter()) {
        debug_assert!(b.depth == e.depth && b.index == e.index);
        let denom = e.hi + b.len * b.len + b.image_len * b.image_len;
        if b.beta < 1e-14 && denom < 1e-14 {
            continue;
        }
        let ratio = b.beta / denom;
        if ratio > k_fit {
            k_fit = ratio;
            argmax = (b.depth, b.index);
        }
    }

    let classification = classify(&beta_reports, &eps_report, &h12);
    let summary = Summary {
        homeo: phi.tag().to_string(),
        bases: cfg.bases.clone(),
        multiplier: cfg.multiplier,
        max_depth: cfg.max_depth,
        beta_sums: beta_reports,
        epsilon_sum: eps_report,
        h12,
        beta_epsilon_k: k_fit,
        beta_epsilon_argmax: argmax,
        classification,
    };

    fs::create_dir_all(&cfg.out_dir)?;
    match cfg.format {
        OutputFormat::Csv => {
            for (j, rows) in beta_tables.iter().enumerate() {
                fs::write(cfg.out_dir.join(format!("beta_{j}.csv")), beta_csv(rows))?;
            }
            fs::write(cfg.out_dir.join("epsilon.csv"), epsilon_csv(&eps_rows))?;
            fs::write(
                cfg.out_dir.join("sums.csv"),
                sums_csv(&summary.beta_sums, &summary.epsilon_sum),
            )?;
        }
        OutputFormat::Json => {
            for (j, rows) in beta_tables.iter().enumerate() {
                fs::write(
                    cfg.out_dir.join(format!("beta_{j}.json")),
                    serde_json::to_string_pretty(rows)?,
                )?;
            }
            fs::write(
                cfg.out_dir.join("epsilon.json"),
                serde_json::to_string_pretty(&eps_rows)?,
            )?;
            fs::write(
                cfg.out_dir.join("sums.json"),
                serde_json::to_string_pretty(&(
                    &summary.beta_sums,
                    &summary.epsilon_sum,
                ))?,
            )?;
        }
    }
    fs::write(
        cfg.out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    Ok(summary)
}

#[derive(Serialize)]
struct FigureCurve {
    name: String,
    kind: String,
    samples: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct FigureRect {
    depth: u32,
    index: u64,
    horizontal: (f64, f64),
    vertical: (f64, f64),
}

#[derive(Serialize)]
struct Figures {
    acausal_circles: Vec<FigureCurve>,
    diamonds: Vec<FigureRect>,
    limiting_domain_boundary: Vec<[f64; 2]>,
    limiting_domain_r: f64,
    lambda_mu_table: Vec<(f64, f64, f64)>,
}

/// Emit sampled figure data (rotated-Penrose curves, boundary diamonds,
/// the limiting domain, the lambda-mu dictionary table) as JSON.
pub fn emit_figures(cfg: &RunConfig) -> Result<PathBuf, DiagError> {
    let phi = parse_spec(&cfg.homeo_spec)?;
    let mut curves = Vec::new();

    let diag = acausal_circle_of(&MobiusMap::identity());
    curves.push(FigureCurve {
        name: "diagonal".into(),
        kind: kind_name(&diag),
        samples: sample_acausal_curve(&diag, 3.0, 121),
    });
    // reference hyperbola with center (1, -1)
    let hype = acausal_circle_of(&MobiusMap::new(1.0, 0.0, -1.0, 1.0).unwrap());
    curves.push(FigureCurve {
        name: "hyperbola_p1_q1_r1".into(),
        kind: kind_name(&hype),
        samples: sample_acausal_curve(&hype, 3.0, 121),
    });
    if let Some(rest) = cfg.homeo_spec.trim().strip_prefix("mobius:") {
        let parts: Result<Vec<f64>, _> =
            rest.split(',').map(crate::homeo::parse_angle).collect();
        if let Ok(v) = parts {
            if let Ok(m) = MobiusMap::new(v[0], v[1], v[2], v[3]) {
                let c = acausal_circle_of(&m);
                curves.push(FigureCurve {
                    name: "homeo".into(),
                    kind: kind_name(&c),
                    samples: sample_acausal_curve(&c, 3.0, 121),
                });
            }
        }
    }

    let mut diamonds = Vec::new();
    for depth in 2..=4u32 {
        for i in DyadicInterval::partition(cfg.bases[0], depth) {
            let d = boundary_diamond(&phi, &i);
            diamonds.push(FigureRect {
                depth,
                index: i.index,
                horizontal: d.horizontal,
                vertical: d.vertical,
            });
        }
    }

    let ld = limiting_domain(10_000);
    let lambda_mu_table: Vec<(f64, f64, f64)> = (0..=100)
        .map(|k| {
            let l = k as f64 / 100.0;
            (l, mu_from_lambda(l).unwrap(), mu_tilde_sq(l).unwrap())
        })
        .collect();

    let figures = Figures {
        acausal_circles: curves,
        diamonds,
        limiting_domain_boundary: ld.boundary,
        limiting_domain_r: ld.r,
        lambda_mu_table,
    };
    fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join("figures.json");
    fs::write(&path, serde_json::to_string_pretty(&figures)?)?;
    Ok(path)
}

fn kind_name(c: &AcausalCurve) -> String {
    match c {
        AcausalCurve::Line { .. } => "line".into(),
        AcausalCurve::Hyperbola { .. } => "hyperbola".into(),
    }
}

/// The lambda-mu dictionary as CSV, for the `gauss_dictionary` example.
pub fn write_lambda_mu_csv(path: &std::path::Path, n: usize) -> Result<(), DiagError> {
    let mut s = String::from("lambda,mu_sq,mu_tilde_sq,shape_norm_sq,k_int\n");
    for k in 0..=n {
        let l = k as f64 / n as f64;
        let (a2, ki) = crate::gauss::curvature_densities(l).unwrap();
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            l,
            mu_from_lambda(l).unwrap(),
            mu_tilde_sq(l).unwrap(),
            a2,
            ki
        );
    }
    fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("adswp-diag-{name}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        dir
    }

    fn quick_cfg(spec: &str, dir: PathBuf) -> RunConfig {
        RunConfig {
            homeo_spec: spec.into(),
            max_depth: 5,
            h12_max_k: 256,
            eps_basepoints: 2,
            eps_descent_iters: 4,
            out_dir: dir,
            ..Default::default()
        }
    }

    #[test]
    fn rotation_classifies_wp() {
        let cfg = quick_cfg("rot:0.5", tmp("rot"));
        let s = run_diagnostics(&cfg).unwrap();
        assert_eq!(s.classification, Classification::WpConsistent);
        assert!(cfg.out_dir.join("summary.json").exists());
        assert!(cfg.out_dir.join("beta_0.csv").exists());
        assert!(cfg.out_dir.join("epsilon.csv").exists());
        assert!(cfg.out_dir.join("sums.csv").exists());
        let _ = fs::remove_dir_all(&cfg.out_dir);
    }

    #[test]
    fn deterministic_output() {
        let cfg1 = quick_cfg("trig:0.2", tmp("det1"));
        let cfg2 = quick_cfg("trig:0.2", tmp("det2"));
        run_diagnostics(&cfg1).unwrap();
        run_diagnostics(&cfg2).unwrap();
        for f in ["beta_0.csv", "beta_1.csv", "beta_2.csv", "epsilon.csv", "sums.csv", "summary.json"] {
            let a = fs::read(cfg1.out_dir.join(f)).unwrap();
            let b = fs::read(cfg2.out_dir.join(f)).unwrap();
            assert_eq!(a, b, "{f} must be byte-stable");
        }
        let _ = fs::remove_dir_all(&cfg1.out_dir);
        let _ = fs::remove_dir_all(&cfg2.out_dir);
    }

    #[test]
    fn serial_equals_parallel() {
        let mut serial = quick_cfg("trig:0.25", tmp("ser"));
        serial.jobs = 1;
        let mut parallel = quick_cfg("trig:0.25", tmp("par"));
        parallel.jobs = 4;
        run_diagnostics(&serial).unwrap();
        run_diagnostics(&parallel).unwrap();
        for f in ["beta_0.csv", "epsilon.csv", "sums.csv", "summary.json"] {
            let a = fs::read(serial.out_dir.join(f)).unwrap();
            let b = fs::read(parallel.out_dir.join(f)).unwrap();
            assert_eq!(a, b, "{f}: serial and parallel runs must agree");
        }
        let _ = fs::remove_dir_all(&serial.out_dir);
        let _ = fs::remove_dir_all(&parallel.out_dir);
    }

    #[test]
    fn figures_emitted() {
        let cfg = quick_cfg("mobius:1,0,-1,1", tmp("figs"));
        let path = emit_figures(&cfg).unwrap();
        let data: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        let r = data["limiting_domain_r"].as_f64().unwrap();
        assert!(r > 0.0 && r < 1.0);
        // the homeo curve is the hyperbola with center (1, -1)
        let curves = data["acausal_circles"].as_array().unwrap();
        assert!(curves.iter().any(|c| c["name"] == "homeo" && c["kind"] == "hyperbola"));
        let _ = fs::remove_dir_all(&cfg.out_dir);
    }

    #[test]
    fn json_format_works() {
        let mut cfg = quick_cfg("rot:0.1", tmp("json"));
        cfg.format = OutputFormat::Json;
        run_diagnostics(&cfg).unwrap();
        assert!(cfg.out_dir.join("beta_0.json").exists());
        assert!(cfg.out_dir.join("epsilon.json").exists());
        let _ = fs::remove_dir_all(&cfg.out_dir);
    }
}
