//! Diamonds in the Kleinian chart, the slab containment of near-identity
//! graphs, and the limiting domain with its bounding radius.
//!
//! ```bash
//! cargo run --release --example limiting_domain
//! ```

use adswp::adsgeom::{
    boundary_diamond, diamond_ads_contains, graph_klein_point, ideal_diamond_contains,
    limiting_domain, slab_contains, worst_y3_of_homeo, worst_y3_of_mobius,
};
use adswp::charts::KleinPoint;
use adswp::dyadic::DyadicInterval;
use adswp::homeo::{parse_spec, CircleHomeo};
use adswp::mobius::MobiusMap;
use std::f64::consts::PI;

fn main() {
    // the standard ideal diamond {y1 >= 0, |y3| <= y1}
    let r1 = [1.0, 0.0, 1.0];
    let r2 = [1.0, 0.0, -1.0];
    for q in [
        KleinPoint::new(0.5, 0.0, 0.0),
        KleinPoint::new(-0.5, 0.0, 0.0),
        KleinPoint::new(0.4, 0.1, 0.2),
    ] {
        println!(
            "ideal diamond contains {:?} -> {}",
            q.y,
            ideal_diamond_contains(r1, r2, &q).unwrap()
        );
    }
    // the same region through the corner-plane route
    let inside = diamond_ads_contains(
        (-PI / 4.0, PI / 4.0),
        (PI / 4.0, -PI / 4.0),
        &KleinPoint::new(0.5, 0.0, 0.0),
    )
    .unwrap();
    println!("corner-plane route agrees: {inside}");

    // boundary diamonds 3I x phi(3I)
    let phi = parse_spec("trig:0.3").unwrap();
    let i = DyadicInterval::new(0.0, 3, 2);
    let d = boundary_diamond(&phi, &i);
    println!("\nboundary diamond at depth 3: {:?} x {:?}", d.horizontal, d.vertical);

    // graphs in the slab: the diagonal has y3 = 0 exactly; near-identity
    // maps stay inside |y3| < C eps
    println!("\nworst |y3| over sampled graphs:");
    println!("  identity        : {:.2e}", worst_y3_of_homeo(&CircleHomeo::rotation(0.0), 512));
    println!("  rotation by 0.05: {:.2e}", worst_y3_of_mobius(&MobiusMap::rotation(0.05), 512));
    println!("  trig(0.02)      : {:.2e}", worst_y3_of_homeo(&parse_spec("trig:0.02").unwrap(), 512));
    let q = graph_klein_point(0.3, 0.31).unwrap();
    println!("slab(|y3| < 0.05) contains a graph point of rot(0.01): {}",
        slab_contains(0.05, &q));

    // the limiting domain: right half-disk minus six circular caps
    let ld = limiting_domain(10_000);
    println!("\nlimiting domain: r = {:.6} (six caps, {} boundary samples, {} interior hits)",
        ld.r, ld.boundary.len(), ld.interior_samples);
    for (j, pair) in ld.caps.chunks(2).enumerate() {
        println!("  diamond {}: chord distances {:.4}, {:.4}",
            j as i64 - 3, pair[0].c, pair[1].c);
    }
}
