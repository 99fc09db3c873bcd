//! Contact distributions, prolongation of a point symmetry, and pushforward
//! of the second-order contact system to group-adapted coordinates.

use dmz::geometry::{derived_type, VectorField};
use dmz::jets::{contact_basis, prolong, pushforward, JetProduct, SymbolicMap};
use dmz::geometry::Chart;
use dmz::symkernel::parse;

fn main() {
    let j = JetProduct::with_bases(&[2], &["z"]).unwrap();
    let c = &contact_basis(&j)[0];
    println!("contact fields on J2: {} | {}", c.fields()[0], c.fields()[1]);
    println!("derived type {}", derived_type(c).unwrap());

    // Affine action z0 -> z0 + t1 z + t2 on the fibre; the prolongation
    // preserves the contact system.
    let x = VectorField::from_pairs(j.chart(), &[("z0", parse("z").unwrap())]).unwrap();
    println!("prolongation of z d_z0: {}", prolong(&x, &j).unwrap());

    let target = Chart::new(&["z", "v1", "b1", "b2"]).unwrap();
    let forward = ["z", "z2/z1", "z1", "-z0"].map(|s| parse(s).unwrap()).to_vec();
    let inverse = ["z", "-b2", "b1", "v1*b1"].map(|s| parse(s).unwrap()).to_vec();
    let phi = SymbolicMap::new(j.chart().clone(), target, forward, Some(inverse)).unwrap();
    let pushed = pushforward(&phi, c).unwrap();
    for x in pushed.fields() {
        println!("pushed: {}", x);
    }
    println!("derived type after pushforward {}", derived_type(&pushed).unwrap());
}
