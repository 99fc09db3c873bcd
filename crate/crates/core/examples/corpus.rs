//! Runs every golden system file and prints the pass matrix, the same as
//! `dmz corpus`.

use dmz::cli::{default_corpus, run_corpus, Sampling};

fn main() {
    let sampling = Sampling {
        seed: 0,
        samples: 32,
        precision: 256,
    };
    let rows = run_corpus(&default_corpus(), &sampling).expect("corpus directory");
    for r in &rows {
        println!("{:<34} {:<18} {}", r.name, r.command, if r.ok() { "ok" } else { "MISMATCH" });
    }
    let bad = rows.iter().filter(|r| !r.ok()).count();
    println!("{} files, {} mismatches", rows.len(), bad);
    std::process::exit(i32::from(bad > 0));
}
