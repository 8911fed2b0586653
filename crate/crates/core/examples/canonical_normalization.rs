//! The canonical normalization of a dyadic interval: the P.H.E factors,
//! the normalized homeomorphism psi_I, the near-identity witness maps,
//! and the corner positions of child intervals.
//!
//! ```bash
//! cargo run --release --example canonical_normalization
//! ```

use adswp::adsgeom::{
    canonical_transform, corner_angle, corner_positions, normalized_data,
    CanonicalTransform,
};
use adswp::beta::TripleTable;
use adswp::dyadic::DyadicInterval;
use adswp::epsilon::{epsilon_number, EpsilonConfig};
use adswp::homeo::parse_spec;
use std::f64::consts::PI;

fn main() {
    let phi = parse_spec("trig:0.3").unwrap();
    let i = DyadicInterval::new(0.0, 6, 23);
    let x = i.interval().mid();

    let t = canonical_transform(&phi, &i, x).unwrap();
    let (l1, c1) = CanonicalTransform::contract_defect(&t.t1.composed, i.triple());
    let img = adswp::Interval::new(phi.lift(i.triple().lo), phi.lift(i.triple().hi));
    let (l2, c2) = CanonicalTransform::contract_defect(&t.t2.composed, img);
    println!("normalization contract (length pi/2, centered on 0):");
    println!("  T1 defects: length {l1:.2e}, center {c1:.2e}");
    println!("  T2 defects: length {l2:.2e}, center {c2:.2e}");
    let lo = t.t1.composed.lift(i.triple().lo);
    println!("  T1(3I) endpoints: {:.6}, {:.6} (vs ±pi/4 = ±{:.6})",
        lo - PI * (lo / PI).round(),
        { let hi = t.t1.composed.lift(i.triple().hi); hi - PI * (hi / PI).round() },
        PI / 4.0);

    // normalized data with an epsilon witness: g± sit near the identity
    let table = TripleTable::build(&phi, 0.0, 8);
    let cfg = EpsilonConfig::default();
    let i = DyadicInterval::new(0.0, 8, 97);
    let b = epsilon_number(&phi, &i, &table, &cfg);
    let nd = normalized_data(&phi, &i, b.witness.as_ref()).unwrap();
    println!("\ndepth 8 witness: eps bracket [{:.3e}, {:.3e}]", b.lo, b.hi);
    println!("y_I = {:.6}", nd.y_i);
    if let (Some(gp), Some(gm)) = (nd.g_plus, nd.g_minus) {
        println!(
            "d(g+, Id) ~ {:.3e}, d(g-, Id) ~ {:.3e}  (both of order eps)",
            gp.dist_to_identity_estimate().unwrap(),
            gm.dist_to_identity_estimate().unwrap()
        );
    }

    // corner predictions arctan(k/3), arctan((k+1)/3)
    println!("\ncorner angles x_j = arctan(j/3):");
    for j in 0..=3i64 {
        println!("  x_{j} = {:.6}", corner_angle(j));
    }
    let rot = parse_spec("rot:0.4").unwrap();
    println!("\ncorner deviations for a rotation (O(l(I)^2) scaling):");
    for depth in 4..=8u32 {
        let i = DyadicInterval::new(0.0, depth, (1u64 << depth) / 3);
        let j = i.children_of_triple()[2];
        let rep = corner_positions(&rot, &i, &j, i.interval().mid()).unwrap();
        println!(
            "  depth {depth}: k = {:+}, deviation = {:.3e}, l(I)^2 = {:.3e}",
            rep.k,
            rep.deviation,
            i.len() * i.len()
        );
    }
}
