//! Reading and writing the text system-file format.

use dmz::sysfile::{render_dmz, SystemFile};

const TEXT: &str = r#"
format = 1
kind = "dmz"
coords = ["x", "y", "z"]
Gamma[1][2][1] = "(x-z)/((x-y)*(y-z))"
Gamma[1][2][2] = "-(y-z)/((x-y)*(x-z))"
Gamma[1][3][1] = "-1/(y-z)"
Gamma[2][3][2] = "-1/(x-z)"
"#;

fn main() {
    let s = SystemFile::parse("inline", TEXT).unwrap().dmz().unwrap();
    print!("{}", render_dmz(&s, "written back"));

    let broken = "kind = \"dmz\"\ncoords = [\"x\", \"y\"]\nC[1][2] = \"x*(y\"\n";
    match SystemFile::parse("broken.dmz", broken).and_then(|f| f.dmz()) {
        Ok(_) => unreachable!(),
        Err(e) => println!("\n{}", e),
    }
}
