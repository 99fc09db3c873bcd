//! Integrability conditions of a linear DMZ system, and a perturbation that
//! breaks them.

use dmz::dmz::{is_involutive, DmzSystem};
use dmz::symkernel::parse;
use dmz::ZeroTest;

fn kt() -> DmzSystem {
    let mut s = DmzSystem::new(&["x", "y", "z"]);
    // Gamma^k_ij is set_gamma(k, i, j, ..), zero-based.
    s.set_gamma(0, 0, 1, parse("(x-z)/((x-y)*(y-z))").unwrap()).unwrap();
    s.set_gamma(1, 0, 1, parse("-(y-z)/((x-y)*(x-z))").unwrap()).unwrap();
    s.set_gamma(0, 0, 2, parse("-1/(y-z)").unwrap()).unwrap();
    s.set_gamma(1, 1, 2, parse("-1/(x-z)").unwrap()).unwrap();
    s
}

fn main() {
    let cfg = ZeroTest::default();
    let s = kt();
    println!("{}", s);
    println!("{}\n", is_involutive(&s, &cfg));

    let mut bad = kt();
    bad.set_gamma(1, 1, 2, parse("-1/(x-z) + 1").unwrap()).unwrap();
    println!("{}", is_involutive(&bad, &cfg));
}
