//! Builds a linear DMZ system from the adapted data of a Darboux integrable
//! 3-hyperbolic distribution, then reads it back as a linear system.

use dmz::dmz::{construct_gdmz, gdmz_to_dmz, is_involutive};
use dmz::sysfile::SystemFile;
use dmz::ZeroTest;
use std::path::Path;

fn main() {
    let cfg = ZeroTest::default();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/sigma_quotient.dist");
    let data = SystemFile::read(&path).unwrap().adapted().unwrap();
    let c = construct_gdmz(&data, &cfg).expect("construction");
    println!("p_i = X_i p:");
    for p in &c.first_derivatives {
        println!("  {}", p);
    }
    println!("{}", c.system);
    println!("compatible: {}", c.compatibility.passed());

    let linear = gdmz_to_dmz(&c.system).expect("the constructed system is linear");
    println!("\n{}", linear);
    println!("involutive: {}", is_involutive(&linear, &cfg).passed());
}
