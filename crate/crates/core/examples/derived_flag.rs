//! Derived flags, Cauchy characteristics and the n-hyperbolic test on the
//! quotient distribution in `corpus/ex31.dist`.

use dmz::geometry::{cauchy_characteristic, check_n_hyperbolic, derived_flag, derived_type, Distribution};
use dmz::sysfile::SystemFile;
use std::path::Path;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/ex31.dist");
    let file = SystemFile::read(&path).expect("corpus file");
    let parts = file.parts().expect("parts");
    let chart = parts[0].chart().clone();
    let fields = parts.iter().flat_map(|p| p.fields().to_vec()).collect();
    let h = Distribution::new(&chart, fields).unwrap();

    for (i, d) in derived_flag(&h).unwrap().iter().enumerate() {
        println!("H^({}) rank {}", i, d.rank());
    }
    println!("derived type {}", derived_type(&h).unwrap());

    let h1 = &derived_flag(&h).unwrap()[1];
    println!("ch H^(1):");
    for x in cauchy_characteristic(h1).unwrap().basis() {
        println!("  {}", x);
    }

    let report = check_n_hyperbolic(&parts).unwrap();
    println!("{}-hyperbolic: {}", report.n, report.passed());
}
