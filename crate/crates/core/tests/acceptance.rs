//! Acceptance suite: one line per criterion, with details underneath.
//!
//! Criteria listed in `KNOWN_FAILURES` reproduce documented discrepancies
//! between printed and computed values. The binary exits nonzero only when
//! the set of failing criteria differs from that list.

mod common;

use common::*;
use dmz::dmz::{
    check_compatibility, construct_gdmz, gdmz_to_dmz, integrability_residuals, is_involutive, DmzSystem,
    LamePotentials,
};
use dmz::gauge::{
    gauge_invariants, gauge_transform, m3wri_constraint_residuals, residual_operator_apply, to_threewave_gauge,
    GaugeOperator,
};
use dmz::geometry::{cauchy_characteristic, check_n_hyperbolic, derived_flag, derived_type, DerivedType, Distribution};
use dmz::hydro::{
    commuting_flow_residuals, darboux_residuals, hodograph_solve, hodograph_sweep, induced_dmz,
    semihamiltonian_residuals, three_component_flow, HydroSystem,
};
use dmz::residual::Residual;
use dmz::symkernel::{
    canonicalize, eval_exact, formal_is_zero, is_zero, parse_with, Assignment, Expr, ParseOptions, Verdict,
};
use dmz::waves::{m3wri_residuals, nwave_residuals, wave_from_lame, WaveMatrix};
use dmz::ZeroTest;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

const KNOWN_FAILURES: [usize; 3] = [4, 7, 9];

/// Denominator of the gauged example.
const D: &str = "(x+2*x*y*z^3-y*z^4-2*z)";
const QQ: &str = "(2*z^2+y*z^3-2*x*z-1)";
const E: &str = "(z^4*y-2*y*x*z^3+2*z-x)";

struct Log {
    lines: Vec<String>,
}

impl Log {
    fn say(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }
}

struct Outcome {
    id: usize,
    title: &'static str,
    pass: bool,
    elapsed: Duration,
    lines: Vec<String>,
}

fn criterion(id: usize, title: &'static str, f: impl FnOnce(&mut Log) -> bool) -> Outcome {
    let mut log = Log { lines: Vec::new() };
    let start = Instant::now();
    let pass = f(&mut log);
    let elapsed = start.elapsed();
    let o = Outcome {
        id,
        title,
        pass,
        elapsed,
        lines: log.lines,
    };
    println!(
        "criterion {:>2}  {}  {}  ({:.2} s)",
        o.id,
        if o.pass { "PASS" } else { "FAIL" },
        o.title,
        o.elapsed.as_secs_f64()
    );
    for l in &o.lines {
        println!("    {}", l);
    }
    o
}

fn cfg() -> ZeroTest {
    ZeroTest::default()
}

fn provable(e: &Expr) -> bool {
    is_zero(e) == Verdict::ProvablyZero
}

fn within(log: &mut Log, what: &str, t: Duration, budget_s: u64) -> bool {
    let ok = t < Duration::from_secs(budget_s);
    log.say(format!("{}: {:.2} s (budget {} s)", what, t.as_secs_f64(), budget_s));
    ok
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let s = Instant::now();
    let r = f();
    (r, s.elapsed())
}

fn all_provable(rs: &[Residual]) -> bool {
    rs.iter().all(|r| provable(&r.expr))
}

fn same_dmz(a: &DmzSystem, b: &DmzSystem, log: &mut Log) -> bool {
    let n = a.dim();
    let mut ok = true;
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                if !provable(&(a.gamma(k, i, j) - b.gamma(k, i, j))) {
                    log.say(format!("Gamma[{}][{}][{}] differs", i + 1, j + 1, k + 1));
                    ok = false;
                }
            }
            if !provable(&(a.c(i, j) - b.c(i, j))) {
                log.say(format!("C[{}][{}] differs", i + 1, j + 1));
                ok = false;
            }
        }
    }
    ok
}

fn compare_waves(label: &str, computed: &WaveMatrix, printed: &WaveMatrix, log: &mut Log) -> bool {
    let mut bad = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i != j && !provable(&(computed.get(i, j) - printed.get(i, j))) {
                bad.push(format!("A{}{}", i + 1, j + 1));
            }
        }
    }
    if bad.is_empty() {
        log.say(format!("{}: all entries equal", label));
    } else {
        log.say(format!("{}: entries differ: {}", label, bad.join(" ")));
        for i in 0..3 {
            for j in 0..3 {
                if bad.contains(&format!("A{}{}", i + 1, j + 1)) {
                    log.say(format!(
                        "  A{}{} computed {}  printed {}",
                        i + 1,
                        j + 1,
                        computed.get(i, j),
                        printed.get(i, j)
                    ));
                }
            }
        }
    }
    bad.is_empty()
}

/// The gauged operator with `C = 0`, coefficients as printed.
fn gauged_example() -> GaugeOperator {
    let mut d = GaugeOperator::new(&XYZ);
    d.set_gamma(1, 0, p("z^3/(y*z^3-1)"));
    d.set_gamma(2, 0, p(&format!("{}/(z*(x-z)*(y*z^3-1))", D)));
    d.set_gamma(0, 2, p(&format!("z*(1-y*z^3)/({}*(x-z))", D)));
    d.set_gamma(1, 2, p(&format!("z^3*(2*x-z)/{}", D)));
    d
}

fn hat_printed() -> BTreeMap<(usize, usize), Expr> {
    [
        ((1, 0), format!("2*(z-x)*z^4/((y*z^3-1)*{})", QQ)),
        ((0, 1), format!("(1-y*z^3)/((z-x)*{})", QQ)),
        ((2, 0), format!("2*{}/((y*z^3-1)*{})", E, QQ)),
        ((0, 2), format!("(2*y*z^3+2*z^2+1)*(1-y*z^3)/({}*{})", E, QQ)),
        ((2, 1), format!("{}/((x-z)*z*{})", E, QQ)),
        ((1, 2), format!("(2*z^2-4*x*z-3)*(z-x)*z^3/({}*{})", E, QQ)),
    ]
    .into_iter()
    .map(|(k, s)| (k, p(&s)))
    .collect()
}

fn particular_solution() -> Expr {
    p("(6-12*z^2-6*y*z^3+12*x*z)/(z*(x-z))")
}

fn c1() -> Outcome {
    criterion(1, "oblate spheroidal system is involutive by sampling", |log| {
        let s = corpus("oblate.dmz").dmz().unwrap();
        let (r, t) = timed(|| is_involutive(&s, &cfg()));
        let transcendental: Vec<_> = r.residuals.entries.iter().filter(|(res, _)| res.raw.is_some()).collect();
        let sampled = !transcendental.is_empty()
            && transcendental
                .iter()
                .all(|(_, v)| matches!(v, Verdict::ProbablyZero { samples } if *samples >= 32));
        log.say(format!(
            "{} residuals, {} with transcendental atoms sampled (min samples {:?}, tolerance 2^-{}), the rest structurally 0",
            r.residuals.len(),
            transcendental.len(),
            r.residuals.min_samples(),
            cfg().tolerance_bits
        ));
        let fast = within(log, "runtime", t, 5);
        r.passed() && sampled && fast
    })
}

fn c2() -> Outcome {
    criterion(2, "three linear systems are provably involutive", |log| {
        let mut ok = true;
        for name in ["m3wri_sol.dmz", "kt_abelian.dmz"] {
            let s = corpus(name).dmz().unwrap();
            let (r, t) = timed(|| is_involutive(&s, &cfg()));
            let this = r.passed() && r.residuals.all_provable();
            log.say(format!("{}: {} residuals, provably zero: {}", name, r.residuals.len(), this));
            ok &= this & within(log, name, t, 10);
        }
        let family = corpus("affine_action.dmz").dmz().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for trial in 0..5 {
            let polys = [("g", cubic(&mut rng, "t")), ("h", cubic(&mut rng, "t")), ("k", cubic(&mut rng, "t"))];
            let s = map_dmz(&family, |e| instantiate(e, &polys));
            let (r, t) = timed(|| is_involutive(&s, &cfg()));
            let this = r.passed() && r.residuals.all_provable();
            log.say(format!(
                "affine family #{} (g = {}): {} residuals, provably zero: {}",
                trial,
                polys[0].1,
                r.residuals.len(),
                this
            ));
            ok &= this & within(log, "instance", t, 10);
        }
        ok
    })
}

fn c3() -> Outcome {
    criterion(3, "gauge transformations reproduce the printed coefficients", |log| {
        let start = Instant::now();
        let d = GaugeOperator::from_dmz(&corpus("m3wri_sol.dmz").dmz().unwrap()).unwrap();
        let bar = gauge_transform(&d, &-Expr::ln(p("z*(x-z)")));
        let printed = gauged_example();
        let mut ok = true;
        let mut n = 0;
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                n += 1;
                if !provable(&(bar.gamma(i, j) - printed.gamma(i, j))) {
                    log.say(format!("bar Gamma_{}{} differs: {}", i + 1, j + 1, bar.gamma(i, j)));
                    ok = false;
                }
                if i < j && !provable(&bar.c(i, j)) {
                    log.say(format!("bar C_{}{} is nonzero", i + 1, j + 1));
                    ok = false;
                }
            }
        }
        log.say(format!("lambda = -ln z(x-z): {} coefficients and C = 0 checked", n));
        match to_threewave_gauge(&printed, &particular_solution(), &cfg()) {
            Ok(hat) => {
                let mut m = 0;
                for ((i, j), e) in hat_printed() {
                    if provable(&(hat.gamma(i, j) - e)) {
                        m += 1;
                    } else {
                        log.say(format!("hat Gamma_{}{} differs: {}", i + 1, j + 1, hat.gamma(i, j)));
                        ok = false;
                    }
                }
                ok &= hat.has_zero_c();
                log.say(format!("particular solution (A=B=C=1): {}/6 hat coefficients match", m));
            }
            Err(e) => {
                log.say(format!("conjugation failed: {}", e));
                ok = false;
            }
        }
        ok & within(log, "runtime", start.elapsed(), 10)
    })
}

fn c4() -> Outcome {
    criterion(4, "three-wave solutions from Lamé potentials match the printed matrices", |log| {
        let start = Instant::now();
        let pots = |h: [&str; 3]| LamePotentials(h.iter().map(|s| p(s)).collect());
        let h0 = pots(["(y*z^3-1)/(z*(z-x))", "1", "(-z^4*y-2*z+x+2*x*z^3*y)/(x-z)"]);
        let q1 = format!("{}", QQ);
        let h1 = LamePotentials(vec![
            p(&format!("(y*z^3-1)/{}", q1)),
            p(&format!("(z-x)*z/{}", q1)),
            p(&format!("(2*z-x-2*y*x*z^3+z^4*y)/{}", q1)),
        ]);
        let a0 = wave_from_lame(&XYZ, &h0);
        let a1 = wave_from_lame(&XYZ, &h1);
        let printed0 = corpus("threewave_sol0.wave").wave().unwrap();
        let printed1 = corpus("threewave_sol1_printed.wave").wave().unwrap();
        let mut ok = compare_waves("first solution", &a0, &printed0, log);
        ok &= compare_waves("second solution", &a1, &printed1, log);
        for (label, a) in [
            ("computed first", &a0),
            ("computed second", &a1),
            ("printed first", &printed0),
            ("printed second", &printed1),
        ] {
            let rs = nwave_residuals(a);
            let bad = rs.iter().filter(|r| !provable(&r.expr)).count();
            log.say(format!("nwave residuals of {}: {}/{} nonzero", label, bad, rs.len()));
            ok &= bad == 0;
        }
        let alt = LamePotentials(vec![h0.0[0].clone(), p("y"), h0.0[2].clone()]);
        let mut quiet = Log { lines: Vec::new() };
        let with_y = compare_waves("", &wave_from_lame(&XYZ, &alt), &printed0, &mut quiet);
        log.say(format!("first printed matrix equals the one built from h2 = y: {}", with_y));
        ok & within(log, "runtime", start.elapsed(), 10)
    })
}

fn c5() -> Outcome {
    criterion(5, "modified three-wave solution and its constraint", |log| {
        let d = GaugeOperator::from_dmz(&corpus("m3wri_sol.dmz").dmz().unwrap()).unwrap();
        let rs = m3wri_residuals(&WaveMatrix::from_operator(&d));
        let cs = m3wri_constraint_residuals(&d);
        let a = all_provable(&rs);
        let b = all_provable(&cs);
        log.say(format!("{} m3wri residuals provably zero: {}", rs.len(), a));
        log.say(format!("{} constraint entries C_ij = G_ij G_ji: {}", cs.len(), b));
        a && b
    })
}

fn general_solution(a: &Expr, b: &Expr, c: &Expr) -> Expr {
    let template = p("(6*x*y*z^5*Cz-2*z^4*Czz-10*z^3*Cz-6*z^2*C-6*z^2*B+2*x*y*z^6*Czz+x*z^3*Czz+6*x*z^2*Cz\
         -y*z^7*Czz-2*y*z^6*Cz-6*y*z^3*A+6*x*z*C+6*x*z*B+6*A)/(z*(x-z))");
    let bind: BTreeMap<String, Expr> = [
        ("A", a.clone()),
        ("B", b.clone()),
        ("C", c.clone()),
        ("Cz", c.diff("z")),
        ("Czz", c.diff("z").diff("z")),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    canonicalize(&template.subs(&bind))
}

fn c6() -> Outcome {
    criterion(6, "general solution formula solves the gauged operator", |log| {
        let d = gauged_example();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut ok = provable(&(general_solution(&Expr::one(), &Expr::one(), &Expr::one()) - particular_solution()));
        log.say(format!("A=B=C=1 gives the particular solution: {}", ok));
        let mut passed = 0;
        for _ in 0..10 {
            let (a, b, c) = (cubic(&mut rng, "x"), cubic(&mut rng, "y"), cubic(&mut rng, "z"));
            let lam = general_solution(&a, &b, &c);
            let rs = residual_operator_apply(&d, &lam);
            if all_provable(&rs) && !lam.is_zero_literal() {
                passed += 1;
            } else {
                log.say(format!("suspected typo: fails for A = {}, B = {}, C = {}", a, b, c));
                ok = false;
            }
        }
        log.say(format!("{}/10 random cubic instantiations: all three rows provably zero", passed));
        ok
    })
}

fn c7() -> Outcome {
    criterion(7, "gauge invariants match the printed values", |log| {
        let d = GaugeOperator::from_dmz(&corpus("m3wri_sol.dmz").dmz().unwrap()).unwrap();
        let h = gauge_invariants(&d);
        let den = "(x-y*z^4+2*x*y*z^3-2*z)^2";
        let mut printed: BTreeMap<(usize, usize), Expr> = h.keys().map(|&k| (k, Expr::zero())).collect();
        printed.insert((2, 1), p(&format!("2*(y^2*z^6-2*y*z^3+1)/{}", den)));
        printed.insert((1, 2), p(&format!("6*z^2*(z-x)^2/{}", den)));
        let mut ok = true;
        for (k, v) in &printed {
            let same = provable(&(h[k].clone() - v.clone()));
            ok &= same;
            log.say(format!(
                "h{}{}: computed {}  printed {}  {}",
                k.0 + 1,
                k.1 + 1,
                h[k],
                v,
                if same { "ok" } else { "differs" }
            ));
        }
        let moved = provable(&(h[&(0, 2)].clone() - printed[&(2, 1)].clone()));
        log.say(format!("printed h32 equals computed h13: {}", moved));
        ok
    })
}

fn hyperbolic(log: &mut Log, file: &str, vertical: &[&str]) -> bool {
    let (ok, t) = timed(|| {
        let f = corpus(file);
        let chart = f.chart().unwrap();
        let parts = f.parts().unwrap();
        let fields = parts.iter().flat_map(|d| d.fields().to_vec()).collect();
        let h = Distribution::new(&chart, fields).unwrap();
        let ty = derived_type(&h).unwrap();
        let report = check_n_hyperbolic(&parts).unwrap();
        let h1 = derived_flag(&h).unwrap()[1].clone();
        let ch = cauchy_characteristic(&h1).unwrap();
        let spans = ch.same_span(&Distribution::coordinate_span(&chart, vertical).unwrap()).unwrap();
        log.say(format!(
            "{}: type {}, 3-hyperbolic {}, ch H^(1) = span{:?}: {}",
            file,
            ty,
            report.passed(),
            vertical,
            spans
        ));
        ty == DerivedType::hyperbolic(3) && report.passed() && spans
    });
    ok & within(log, file, t, 30)
}

fn c8() -> Outcome {
    criterion(8, "quotient distributions are 3-hyperbolic", |log| {
        let a = hyperbolic(log, "ex31.dist", &["u1", "u2", "v1"]);
        let b = hyperbolic(log, "sigma_quotient.dist", &["v1", "v2", "s"]);
        a && b
    })
}

fn c9() -> Outcome {
    criterion(9, "construction reproduces the printed systems", |log| {
        let mut ok = true;
        let build = |file: &str, log: &mut Log| {
            let data = corpus(file).adapted().unwrap();
            let c = construct_gdmz(&data, &cfg()).unwrap();
            let compat = check_compatibility(&c.system, &cfg()).passed();
            log.say(format!("{}: compatibility residuals vanish: {}", file, compat));
            (c.system, compat)
        };

        let (g, compat) = build("ex31.dist", log);
        ok &= compat;
        let printed = [
            ((0, 1), "(2*u+1)/(u*(u+1))*u_x*u_z"),
            ((0, 2), "u_x*u_y/(u+1)"),
            ((1, 2), "u_y*u_z/u"),
        ];
        for ((i, j), s) in printed {
            let same = provable(&(g.rhs(i, j) - p(s)));
            log.say(format!(
                "  u_{}{}: constructed {}  printed {}  {}",
                i + 1,
                j + 1,
                g.rhs(i, j),
                s,
                if same { "ok" } else { "differs" }
            ));
            ok &= same;
        }

        let (g, compat) = build("kt_quotient.dist", log);
        ok &= compat;
        let mut kt = DmzSystem::new(&XYZ);
        kt.set_gamma(0, 0, 1, p("(x-z)/((x-y)*(y-z))")).unwrap();
        kt.set_gamma(1, 0, 1, p("-(y-z)/((x-y)*(x-z))")).unwrap();
        kt.set_gamma(0, 0, 2, p("-1/(y-z)")).unwrap();
        kt.set_gamma(1, 1, 2, p("-1/(x-z)")).unwrap();
        let same = gdmz_to_dmz(&g).map(|s| same_dmz(&s, &kt, log)).unwrap_or(false);
        log.say(format!("  translation quotient equals the printed system: {}", same));
        ok &= same;

        let (g, compat) = build("sigma_quotient.dist", log);
        ok &= compat;
        let m3 = corpus("m3wri_sol.dmz").dmz().unwrap();
        let same = gdmz_to_dmz(&g).map(|s| same_dmz(&s, &m3, log)).unwrap_or(false);
        log.say(format!("  modified three-wave quotient equals the printed system: {}", same));
        ok & same
    })
}

fn tsarev_equivalent(s: &HydroSystem) -> bool {
    let semi = semihamiltonian_residuals(s).iter().all(|r| is_zero(&r.expr).is_zero());
    let inv = integrability_residuals(&induced_dmz(s)).iter().all(|r| is_zero(&r.expr).is_zero());
    semi == inv
}

fn c10() -> Outcome {
    criterion(10, "semi-Hamiltonian suite", |log| {
        let u = ["u1", "u2", "u3"];
        let chrom = corpus("chromatography.hydro").hydro().unwrap();
        let mut ok = all_provable(&semihamiltonian_residuals(&chrom));
        log.say(format!("chromatography: semi-Hamiltonian {}", ok));

        let mut gamma = BTreeMap::new();
        gamma.insert((0, 1), p("(u1-u3)/((u1-u2)*(u2-u3))"));
        gamma.insert((1, 0), p("-(u2-u3)/((u1-u2)*(u1-u3))"));
        gamma.insert((0, 2), p("-1/(u2-u3)"));
        gamma.insert((1, 2), p("-1/(u1-u3)"));
        gamma.insert((2, 0), Expr::zero());
        gamma.insert((2, 1), Expr::zero());
        let vars: Vec<String> = u.iter().map(|s| s.to_string()).collect();

        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut instances = vec![chrom.clone(), corpus("generic.hydro").hydro().unwrap()];
        let mut passed = 0;
        for _ in 0..10 {
            let f = [cubic(&mut rng, "s"), cubic(&mut rng, "s"), cubic(&mut rng, "s")];
            let w = three_component_flow(&u, &f, "s");
            if all_provable(&darboux_residuals(&vars, &gamma, &w)) {
                passed += 1;
            }
            if let Ok(h) = HydroSystem::new(&u, w) {
                instances.push(h);
            }
        }
        log.say(format!("{}/10 random polynomial flows satisfy the Darboux system", passed));
        ok &= passed == 10;

        let mut opts = ParseOptions::default();
        for f in ["f1", "f2", "f3"] {
            opts.opaque.insert(f.into());
        }
        let f = [
            parse_with("f1(s)", &opts).unwrap(),
            parse_with("f2(s)", &opts).unwrap(),
            parse_with("f3(s)", &opts).unwrap(),
        ];
        let w = three_component_flow(&u, &f, "s");
        let formal = darboux_residuals(&vars, &gamma, &w).iter().all(|r| formal_is_zero(&r.expr));
        log.say(format!("opaque f1, f2, f3: formal check {}", formal));
        ok &= formal;

        let v = HydroSystem::new(&u, three_component_flow(&u, &[p("s"), p("s"), p("s")], "s")).unwrap();
        let sq = three_component_flow(&u, &[p("s^2/2"), p("s^2/2"), p("s^2/2")], "s");
        ok &= all_provable(&commuting_flow_residuals(&v, &sq));
        instances.push(v);
        let equivalent = instances.iter().filter(|s| tsarev_equivalent(s)).count();
        log.say(format!("Tsarev equivalence holds on {}/{} instances", equivalent, instances.len()));
        ok && equivalent == instances.len()
    })
}

fn random_operator(rng: &mut ChaCha8Rng) -> GaugeOperator {
    let mut d = GaugeOperator::new(&XYZ);
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                d.set_gamma(i, j, ratfun(rng, &XYZ));
            }
            if i < j {
                d.set_c(i, j, ratfun(rng, &XYZ));
            }
        }
    }
    d
}

fn c11() -> Outcome {
    criterion(11, "gauge invariance and involutivity along gauge orbits", |log| {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut invariant = 0;
        for _ in 0..50 {
            let d = random_operator(&mut rng);
            let lam = ratfun(&mut rng, &XYZ);
            let (h0, h1) = (gauge_invariants(&d), gauge_invariants(&gauge_transform(&d, &lam)));
            if h0.iter().all(|(k, v)| provable(&(v.clone() - h1[k].clone()))) {
                invariant += 1;
            }
        }
        log.say(format!("{}/50 random operators: h_ij unchanged", invariant));
        let base = gauged_example();
        let mut involutive = 0;
        for _ in 0..20 {
            let lam = poly(&mut rng, &XYZ, 2, 3);
            let s = gauge_transform(&base, &lam).to_dmz();
            if is_involutive(&s, &cfg()).passed() {
                involutive += 1;
            }
        }
        log.say(format!("{}/20 gauged operators involutive", involutive));
        invariant == 50 && involutive == 20
    })
}

fn c12() -> Outcome {
    criterion(12, "hodograph solver", |log| {
        let start = Instant::now();
        let u = ["u1", "u2", "u3"];
        let constant = HydroSystem::new(&u, vec![Expr::int(1), Expr::int(2), Expr::int(3)]).unwrap();
        let id: Vec<Expr> = u.iter().map(|s| Expr::sym(s)).collect();
        let (x, t) = (q(1, 1), q(1, 10));
        let pt = hodograph_solve(&constant, &id, &x, &t, &[q(0, 1), q(5, 1), q(-2, 1)]).unwrap();
        let expected: Vec<_> = (1..=3).map(|v| &x + q(v, 1) * &t).collect();
        let exact = pt.exact && pt.u == expected;
        log.say(format!("constant velocities: u = x + v t exactly: {}", exact));

        let v = HydroSystem::new(&u, three_component_flow(&u, &[p("s"), p("s"), p("s")], "s")).unwrap();
        let w = three_component_flow(&u, &[p("s^2/2"), p("s^2/2"), p("s^2/2")], "s");
        let centre = hodograph_solve(&v, &w, &x, &t, &[q(1, 1), q(2, 1), q(3, 1)]).unwrap();
        log.say(format!(
            "nontrivial flow at (1, 1/10): u = {:?}, algebraic residual {:.2e}",
            centre.u_f64(),
            centre.residual
        ));
        let rows = hodograph_sweep(&v, &w, &centre, 2, &q(1, 100), &q(1, 10000)).unwrap();
        let worst_alg = rows.iter().map(|r| r.point.residual).fold(0.0, f64::max);
        let worst_pde = rows.iter().map(|r| r.pde_residual).fold(0.0, f64::max);
        log.say(format!(
            "{} grid points: worst algebraic residual {:.2e} (< 1e-12), worst PDE residual {:.2e} (< 1e-6)",
            rows.len(),
            worst_alg,
            worst_pde
        ));
        let ok = exact && centre.residual < 1e-12 && rows.len() == 25 && worst_alg < 1e-12 && worst_pde < 1e-6;
        ok & within(log, "runtime", start.elapsed(), 5)
    })
}

fn fd_agrees(e: &Expr, rng: &mut ChaCha8Rng) -> bool {
    let mut pt: Assignment = XYZ.iter().map(|v| (v.to_string(), small_rational(rng) / q(3, 1))).collect();
    let exact = match eval_exact(&canonicalize(&e.diff("x")), &pt) {
        Ok(v) => v,
        Err(_) => return true,
    };
    let h = q(1, 1_000_000);
    let x0 = pt["x"].clone();
    pt.insert("x".into(), &x0 + &h);
    let fp = eval_exact(e, &pt);
    pt.insert("x".into(), &x0 - &h);
    let fm = eval_exact(e, &pt);
    match (fp, fm) {
        (Ok(a), Ok(b)) => {
            let fd = (a - b) / (q(2, 1) * h);
            Expr::to_f64_lossy(&(fd - exact)).abs() <= 1e-8
        }
        _ => true,
    }
}

fn c13() -> Outcome {
    criterion(13, "kernel property suites (1000 cases each)", |log| {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let (mut add, mut mul, mut lin, mut clairaut, mut fd, mut trans) = (0, 0, 0, 0, 0, 0);
        for n in 0..1000 {
            let a = tree(&mut rng, &XYZ, 3);
            let b = tree(&mut rng, &XYZ, 3);
            add += usize::from(provable(&(canonicalize(&(a.clone() + b.clone())) - canonicalize(&(b.clone() + a.clone())))));
            mul += usize::from(provable(&(canonicalize(&(a.clone() * b.clone())) - canonicalize(&(b.clone() * a.clone())))));
            let d = (a.clone() + b.clone()).diff("x") - a.diff("x") - b.diff("x");
            lin += usize::from(provable(&d));
            let e = if n % 50 == 0 {
                let f = match rng.gen_range(0..3) {
                    0 => Expr::sin(a.clone()),
                    1 => Expr::exp(a.clone()),
                    _ => Expr::cosh(a.clone()),
                };
                f * b.clone()
            } else {
                a.clone() * b.clone()
            };
            let c = e.diff("x").diff("y") - e.diff("y").diff("x");
            let v = is_zero(&c);
            if e.has_transcendental() {
                trans += 1;
                clairaut += usize::from(v.is_zero());
            } else {
                clairaut += usize::from(v == Verdict::ProvablyZero);
            }
            fd += usize::from(fd_agrees(&a, &mut rng));
        }
        log.say(format!("commutativity of +: {}/1000, of *: {}/1000", add, mul));
        log.say(format!("linearity of d/dx: {}/1000", lin));
        log.say(format!("Clairaut: {}/1000 ({} transcendental)", clairaut, trans));
        log.say(format!("finite differences within 1e-8 at step 1e-6: {}/1000", fd));
        [add, mul, lin, clairaut, fd].iter().all(|&k| k == 1000)
    })
}

fn main() {
    let outcomes = vec![
        c1(),
        c2(),
        c3(),
        c4(),
        c5(),
        c6(),
        c7(),
        c8(),
        c9(),
        c10(),
        c11(),
        c12(),
        c13(),
    ];
    let failing: Vec<usize> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    let passed = outcomes.len() - failing.len();
    println!("\n{}/{} criteria pass; failing: {:?}", passed, outcomes.len(), failing);
    if failing != KNOWN_FAILURES {
        println!("failing set differs from the known discrepancies {:?}", KNOWN_FAILURES);
        std::process::exit(1);
    }
    println!("every failure is a known discrepancy between printed and computed values");
}
