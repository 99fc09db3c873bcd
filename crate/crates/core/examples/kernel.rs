//! Parsing, differentiation, canonical forms and zero testing.

use dmz::symkernel::{canonicalize, is_zero, parse, parse_with, ParseOptions};

fn main() {
    let e = parse("z^3/(y*z^3-1)").unwrap();
    let d = e.diff("y");
    println!("d/dy {} = {}", e, d);

    let sum = canonicalize(&(parse("1/(x-y)").unwrap() + parse("1/(y-x)").unwrap()));
    println!("1/(x-y) + 1/(y-x) = {}", sum);

    for text in ["cosh(x)^2 - sinh(x)^2 - 1", "sin(x)^2 + cos(x)^2 - 1", "(x+y)^2 - x^2 - 2*x*y - y^2"] {
        let v = is_zero(&parse(text).unwrap());
        println!("{:<32} {}", text, v.label());
    }

    // Opaque functions are checked against random cubic instantiations.
    let mut opts = ParseOptions::default();
    opts.opaque.insert("f".into());
    let chain = parse_with("f(x^2)", &opts).unwrap().diff("x") - parse_with("2*x*f'(x^2)", &opts).unwrap();
    println!("d/dx f(x^2) - 2x f'(x^2): {}", is_zero(&chain).label());

    let bad = parse("x*y - y*x + 1").unwrap();
    let v = is_zero(&bad);
    println!("x*y - y*x + 1: {} {}", v.label(), v.witness().map(|w| w.to_string()).unwrap_or_default());
}
