//! Tour of the PSL(2,R) algebra: composition, classification, jets,
//! normalization factors, and the matrix bilinear form.
//!
//! ```bash
//! cargo run --release --example mobius_tour
//! ```

use adswp::mobius::{
    inner22, mat_inner, phe_factors, quad_embed, Mat2, MatVector22, MobiusMap,
};

fn main() {
    // classification by trace
    for (name, m) in [
        ("identity", MobiusMap::identity()),
        ("rotation by 0.4", MobiusMap::rotation(0.4)),
        ("t -> 2t", MobiusMap::scaling(2.0)),
        ("t -> t + 1", MobiusMap::translation(1.0)),
    ] {
        println!("{name:16} -> {:?}", m.classify());
    }

    // lifts are increasing and equivariant
    let m = MobiusMap::scaling(2.0).compose(&MobiusMap::rotation(0.7));
    println!("\nlift of a hyperbolic-elliptic composite:");
    for k in 0..=4 {
        let x = k as f64 * 0.8;
        println!("  lift({x:.1}) = {:.6}   lift({x:.1}+pi) - pi = {:.6}",
            m.lift(x), m.lift(x + std::f64::consts::PI) - std::f64::consts::PI);
    }

    // affine-chart jets and the distance-to-identity estimate
    let h = MobiusMap::new(1.0, 0.0, -0.15, 1.0).unwrap(); // t / (1 - 0.3 t / 2)
    let (v, d1, d2) = h.jet_at_zero().unwrap();
    println!("\njet of t/(1 - 0.15 t) at 0: ({v:.3}, {d1:.3}, {d2:.3})");
    println!("distance-to-identity estimate: {:.3}", h.dist_to_identity_estimate().unwrap());

    // normalization factors: (P . H) maps [lo, hi] onto [-1, 1]
    let (p, h) = phe_factors(0.0, 4.0).unwrap();
    let ph = p.compose(&h);
    println!("\nphe_factors([0, 4]): P = t - 1, H = t/2");
    println!("  (P.H)(0) = {:.1}, (P.H)(4) = {:.1}", ph.affine(0.0), ph.affine(4.0));

    // the matrix model: <x, y>_{2,2} = <M(x), M(y)>_mat, det M = -<M, M>
    let x = MatVector22([0.3, -0.1, 1.2, 0.4]);
    let y = MatVector22([0.0, 0.8, 0.9, -0.2]);
    println!("\nmatrix-model isometry check:");
    println!("  <x,y>_22        = {:.12}", inner22(&x, &y));
    println!("  <M(x),M(y)>_mat = {:.12}", mat_inner(&quad_embed(&x), &quad_embed(&y)));
    let id = Mat2::identity();
    println!("  <Id,Id>_mat = {} (= -det Id)", mat_inner(&id, &id));
}
