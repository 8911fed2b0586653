//! Spacelike frames, Gauss maps, pull-back metrics, and the dictionary
//! between the shape eigenvalue and the Beltrami coefficient.
//! Writes `lambda_mu.csv` next to the working directory.
//!
//! ```bash
//! cargo run --release --example gauss_dictionary
//! ```

use adswp::diag::write_lambda_mu_csv;
use adswp::gauss::{
    curvature_densities, gauss_maps, integrate_densities, lambda_from_mu, mu_from_lambda,
    mu_tilde_sq, pullback_metrics, SpacelikeFrame,
};
use adswp::mobius::Mat2;

fn main() {
    // the base frame (Id, J) projects to (J, J)
    let f = SpacelikeFrame::new(Mat2::identity(), Mat2::j()).unwrap();
    let (gl, gr) = gauss_maps(&f);
    println!("gauss_maps(Id, J) = ({:?}, {:?})", gl.0, gr.0);

    // geodesic-flow invariance
    let moved = f.flow(0.9);
    let (gl2, gr2) = gauss_maps(&moved);
    println!(
        "flow invariance: |G_l drift| = {:.2e}, |G_r drift| = {:.2e}",
        gl.frobenius_dist(&gl2),
        gr.frobenius_dist(&gr2)
    );

    // pull-back metrics degenerate exactly at lambda = 1
    let g = Mat2::identity();
    let j = Mat2::j();
    for lambda in [0.0, 0.5, 1.0] {
        let a = Mat2([[lambda, 0.0], [0.0, -lambda]]);
        let pb = pullback_metrics(&g, &j, &a);
        println!(
            "lambda = {lambda}: det g_l = {:.3}, det g_r = {:.3}, degenerate = {}",
            pb.left.det(),
            pb.right.det(),
            pb.degenerate
        );
    }

    // spot values of the dictionary
    println!("\nlambda = 1/2: |mu|^2 = {} (16/25), mu~^2 = {} (12/25)",
        mu_from_lambda(0.5).unwrap(), mu_tilde_sq(0.5).unwrap());
    println!("round-trip at |mu|^2 = 0.64: lambda = {}", lambda_from_mu(0.64).unwrap());
    let (a2, k) = curvature_densities(0.5).unwrap();
    println!("densities at lambda = 1/2: |A|^2 = {a2}, K_int = {k}");

    // a constant field on a unit-area patch integrates to 2 lambda^2
    let field: Vec<(f64, f64)> = (0..100).map(|_| (0.5, 0.01)).collect();
    let (area, curv) = integrate_densities(&field).unwrap();
    println!("constant field: renormalized-area part {area}, |curvature| part {curv}");

    let path = std::path::Path::new("lambda_mu.csv");
    write_lambda_mu_csv(path, 100).unwrap();
    println!("\ndictionary table written to {}", path.display());
}
