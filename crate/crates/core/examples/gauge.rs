//! Gauge transformations of the modified three-wave linear problem: the
//! orbit invariants, removal of C, and conjugation by a particular solution.

use dmz::gauge::{gauge_invariants, gauge_transform, to_m3wri_gauge, to_threewave_gauge, GaugeOperator};
use dmz::sysfile::SystemFile;
use dmz::symkernel::parse;
use dmz::ZeroTest;
use std::path::Path;

fn main() {
    let cfg = ZeroTest::default();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/m3wri_sol.dmz");
    let d = GaugeOperator::from_dmz(&SystemFile::read(&path).unwrap().dmz().unwrap()).unwrap();

    println!("invariants h_ij:");
    for ((i, j), h) in gauge_invariants(&d) {
        println!("  h{}{} = {}", i + 1, j + 1, h);
    }

    let lambda = parse("-ln(z*(x-z))").unwrap();
    let bar = gauge_transform(&d, &lambda);
    println!("\nT_lambda with lambda = {}:\n{}", lambda, bar);
    println!("invariants unchanged: {}", gauge_invariants(&bar) == gauge_invariants(&d));

    let back = to_m3wri_gauge(&bar, &lambda, &cfg).expect("m3wri gauge");
    println!("back to C = G G^T: {}", back == d);

    let u = parse("(6-12*z^2-6*y*z^3+12*x*z)/(z*(x-z))").unwrap();
    let hat = to_threewave_gauge(&bar, &u, &cfg).expect("u solves the system");
    println!("\nconjugated by u = {}:\n{}", u, hat);
}
