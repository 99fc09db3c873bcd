//! Semi-Hamiltonian systems of hydrodynamic type: the Tsarev test, commuting
//! flows from a DMZ solution, and generalized hodograph solutions.

use dmz::hydro::{
    commuting_flow_residuals, hodograph_solve, hodograph_sweep, semihamiltonian_residuals, sweep_csv,
    three_component_flow, HydroSystem,
};
use dmz::residual::CheckReport;
use dmz::symkernel::parse;
use dmz::ZeroTest;
use num_rational::BigRational;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn main() {
    let cfg = ZeroTest::default();
    let u = ["u1", "u2", "u3"];

    let chrom = HydroSystem::new(&u, ["u1^2*u2*u3", "u1*u2^2*u3", "u1*u2*u3^2"].map(|s| parse(s).unwrap()).to_vec()).unwrap();
    println!("chromatography semi-Hamiltonian: {}", CheckReport::run(semihamiltonian_residuals(&chrom), &cfg).passed());

    let id = ["s", "s", "s"].map(|s| parse(s).unwrap());
    let sq = ["s^2/2", "s^2/2", "s^2/2"].map(|s| parse(s).unwrap());
    let v = HydroSystem::new(&u, three_component_flow(&u, &id, "s")).unwrap();
    let w = three_component_flow(&u, &sq, "s");
    for (i, vi) in v.v.iter().enumerate() {
        println!("v{} = {}   w{} = {}", i + 1, vi, i + 1, w[i]);
    }
    println!("w commutes with v: {}", CheckReport::run(commuting_flow_residuals(&v, &w), &cfg).passed());

    let centre = hodograph_solve(&v, &w, &q(1, 1), &q(1, 10), &[q(1, 1), q(2, 1), q(3, 1)]).expect("converges");
    println!("\nu(1, 1/10) = {:?}, residual {:.2e}", centre.u_f64(), centre.residual);
    let rows = hodograph_sweep(&v, &w, &centre, 1, &q(1, 100), &q(1, 10000)).unwrap();
    print!("{}", sweep_csv(&rows));
}
