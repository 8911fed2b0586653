//! The coordinate models of RP^1, AdS^{2,1} and Ein^{1,1}: affine and
//! Penrose charts, the Kleinian chart, causal types, acausal circles.
//!
//! ```bash
//! cargo run --release --example charts_tour
//! ```

use adswp::charts::{
    acausal_circle_of, affine_quotient, causal_type, kleinian, kleinian_inverse,
    matrix_angle, penrose_mat, penrose_rot, quotient_affine, AcausalCurve,
    KleinPoint, RP1Point,
};
use adswp::mobius::{inner22, MatVector22, MobiusMap};
use std::f64::consts::PI;

fn main() {
    // quotient <-> affine chart, with the pole at pi/2
    for x in [0.0, PI / 4.0, PI / 2.0] {
        let t = quotient_affine(RP1Point::new(x));
        let back = affine_quotient(t);
        println!("tan({x:.4}) = {t:?}  (back to angle {:.4})", back.angle());
    }

    // matrix-angle representative and Penrose charts
    let m = matrix_angle(PI / 4.0, PI / 4.0);
    println!("\nN(pi/4, pi/4) = {:?} (rank 1, det = {:.1e})", m.0, m.det());
    println!("penrose_rot(pi/4, pi/4) = {:?}", penrose_rot(PI / 4.0, PI / 4.0).unwrap());
    println!("penrose_mat(pi/4, pi/4) = {:?}", penrose_mat(PI / 4.0, PI / 4.0).unwrap());

    // Kleinian chart round-trip
    let x = MatVector22([1.0, 0.0, 1.0, 1.0]);
    println!("\n<x,x>_22 = {}", inner22(&x, &x));
    let y = kleinian(&x).unwrap();
    println!("kleinian(x) = {:?} with <y,y>_21 = {:.3}", y.y, y.norm21());
    let back = kleinian_inverse(&KleinPoint::new(y.y[0], y.y[1], y.y[2])).unwrap();
    println!("round-trip: {:?}", back.0);

    // causal quadrants of the matrix-angle metric dx1 dx2
    println!();
    for v in [(1.0, 1.0), (1.0, -1.0), (1.0, 0.0), (0.0, 1.0)] {
        println!("causal_type({v:?}) = {:?}", causal_type(v).unwrap());
    }

    // acausal circles in the rotated Penrose chart
    println!();
    for (name, m) in [
        ("identity", MobiusMap::identity()),
        ("t -> 2t + 1", MobiusMap::new(2.0, 1.0, 0.0, 1.0).unwrap()),
        ("1/(1-t) - 1", MobiusMap::new(1.0, 0.0, -1.0, 1.0).unwrap()),
    ] {
        match acausal_circle_of(&m) {
            AcausalCurve::Line { slope, intercept } => {
                println!("{name:14} -> line, slope {slope}, intercept {intercept}");
            }
            AcausalCurve::Hyperbola { p, q, r } => {
                println!("{name:14} -> hyperbola P={p}, Q={q}, R={r}, center ({q}, {})", -r);
            }
        }
    }
}
