//! Lamé potentials of a C = 0 DMZ system and the three-wave solution built
//! from them, with its linear problem.

use dmz::dmz::{lame_potentials, verify_lame};
use dmz::residual::CheckReport;
use dmz::sysfile::SystemFile;
use dmz::waves::{half_lame_residuals, linear_problem_residuals, nwave_residuals, wave_from_lame, LameForm};
use dmz::symkernel::{parse, Expr};
use dmz::ZeroTest;
use std::path::Path;

fn main() {
    let cfg = ZeroTest::default();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/new_dmz.dmz");
    let s = SystemFile::read(&path).unwrap().dmz().unwrap();
    let h = lame_potentials(&s, &cfg).expect("potentials");
    for (i, hi) in h.0.iter().enumerate() {
        println!("h{} = {}", i + 1, hi);
    }
    println!("Gamma_ij = d_i ln h_j: {}", verify_lame(&s, &h));
    println!(
        "half Lamé (classical): {}",
        CheckReport::run(half_lame_residuals(&s.coords, &h, LameForm::Classical), &cfg).passed()
    );

    let a = wave_from_lame(&s.coords, &h);
    println!("\n{}", a);
    println!("{}", CheckReport::run(nwave_residuals(&a), &cfg));

    let u = parse("(6-12*z^2-6*y*z^3+12*x*z)/(z*(x-z))").unwrap();
    let psi: Vec<Expr> = (0..3).map(|i| u.diff(&s.coords[i]) / h.0[i].clone()).collect();
    println!("\nlinear problem with psi_i = u_i/h_i:");
    println!("{}", CheckReport::run(linear_problem_residuals(&a, &psi), &cfg));
}
