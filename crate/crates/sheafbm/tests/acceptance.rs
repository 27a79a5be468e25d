use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use sheafbm::cli::run_cli;
use sheafbm::formats::{load_graph, LoadError};
use sheafbm::selftest::{selftest, SelftestConfig};
use sheafbm_core::alcove::{build_window_order, periodic_quotient, AddressBox, Alcove, CartanType, RootSystem, WeylGroup};
use sheafbm_core::cofiltered::CofilteredModule;
use sheafbm_core::endo::endomorphism_probe;
use sheafbm_core::fixtures::{run_suites, Lemma, DEFAULT_SEED};
use sheafbm_core::kl::{Coxeter, KlTable};
use sheafbm_core::sheaf::{bm_build, CofilteredSheaf, ExtensionOrder, SheafWindow};
use sheafbm_core::verify::{bm_verify, global_sections, global_sections_report, rank_table, section_hilbert};
use sheafbm_core::Rationals;

type Outcome = Result<String, String>;

fn within(label: &str, t: Duration, limit: Duration) -> Result<(), String> {
    if t < limit {
        Ok(())
    } else {
        Err(format!("{} took {:.2?}, limit {:.0?}", label, t, limit))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(std::iter::once("sheafbm").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8_lossy(&err).into_owned())
}

/// Stalk ranks against the independent KL table: `P_{x,w}` for `x ≤ w`
/// and zero elsewhere.
fn agree_with_kl(b: &CofilteredSheaf<Rationals>, weyl: &WeylGroup, kl: &KlTable, w: usize) -> Result<usize, String> {
    let g = kl.group();
    let kw = g.parse(&weyl.name(w)).map_err(|e| e.to_string())?;
    let mut compared = 0;
    for x in 0..weyl.len() {
        let kx = g.parse(&weyl.name(x)).map_err(|e| e.to_string())?;
        let rank = b.stalk_rank(x).to_string();
        let expected = match kl.polynomial(kx, kw) {
            Ok(p) => p.to_string(),
            Err(_) => "0".to_string(),
        };
        ensure(rank == expected, || format!("stalk at {} is {}, oracle {}", weyl.name(x), rank, expected))?;
        compared += 1;
    }
    Ok(compared)
}

struct Classical {
    weyl: WeylGroup,
    sheaf: CofilteredSheaf<Rationals>,
    elapsed: Duration,
}

fn classical(t: CartanType, w: &str, cutoff: i64) -> Result<(Classical, usize), String> {
    let weyl = WeylGroup::new(&RootSystem::new(t));
    let win = SheafWindow::classical(&weyl);
    let w = weyl.parse(w).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let sheaf = bm_build(&Rationals, &win, w, cutoff, ExtensionOrder::Lexicographic).map_err(|e| e.to_string())?;
    Ok((Classical { weyl, sheaf, elapsed: start.elapsed() }, w))
}

fn affine_a1_chain() -> Result<CofilteredSheaf<Rationals>, String> {
    let rs = RootSystem::new(CartanType::A1);
    let bx = AddressBox::uniform(&rs, 0, 7);
    let win = build_window_order(&rs, &Alcove::fundamental(&rs), &bx, &bx.widened(2)).map_err(|e| e.to_string())?;
    let pd = periodic_quotient(&rs, &win);
    bm_build(&Rationals, &SheafWindow::periodic(&win, &pd), win.base, 12, ExtensionOrder::Lexicographic).map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (c, w) = classical(CartanType::A2, "longest", 12)?;
    let kl = KlTable::new(Coxeter::new("A2").map_err(|e| e.to_string())?);
    let n = agree_with_kl(&c.sheaf, &c.weyl, &kl, w)?;
    ensure(rank_table(&c.sheaf).iter().all(|(_, r)| r.to_string() == "1"), || "a stalk rank differs from 1".into())?;
    within("S3 run", start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{} stalks equal the oracle, {:.2?}", n, start.elapsed()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let (c, w) = classical(CartanType::A3, "s2s1s3s2", 16)?;
    let kl = KlTable::new(Coxeter::new("A3").map_err(|e| e.to_string())?);
    let s2 = c.weyl.parse("s2").map_err(|e| e.to_string())?;
    let at_s2 = c.sheaf.stalk_rank(s2).to_string();
    ensure(at_s2 == "1 + q", || format!("stalk at s2 is {}", at_s2))?;
    let n = agree_with_kl(&c.sheaf, &c.weyl, &kl, w)?;
    within("S4 run", start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("s2 has rank 1 + q, {} stalks equal the oracle, build {:.2?}", n, c.elapsed))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let b = affine_a1_chain()?;
    let win = b.window();
    ensure(win.quotient.num_vertices() == 2 && win.quotient.edges().len() == 1, || "quotient is not a single edge".into())?;
    ensure(win.len() >= 8, || format!("window has {} alcoves", win.len()))?;
    let report = bm_verify(&b);
    ensure(report.all_passed(), || format!("failed checks {:?}", report.failed()))?;
    let bw = global_sections(&b);
    let full = global_sections_report(&b, &bw);
    ensure(full.all_passed(), || format!("failed checks {:?}", full.failed()))?;
    let table = rank_table(&b);
    ensure(table.len() >= 8 && table.iter().all(|(_, r)| r.to_string() == "1"), || "a stalk rank differs from 1".into())?;
    let a0 = win.index_of("A0").ok_or("no A0")?;
    let a1 = win.index_of("A1").ok_or("no A1")?;
    let gamma = b.sections(&BTreeSet::from([a0, a1])).map_err(|e| e.to_string())?;
    let dims = gamma.module.dims().to_vec();
    let expected: Vec<usize> = (0..=b.cutoff() / 2).map(|j| if j == 0 { 1 } else { 2 }).collect();
    ensure(dims == expected, || format!("Γ({{A0,A1}}) dims {:?}", dims))?;
    within("Â1 run", start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("{} stalks of rank 1, Γ({{A0,A1}}) dims {:?} by degree 2j, {:.2?}", table.len(), dims, start.elapsed()))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let rs = RootSystem::new(CartanType::A2);
    let bx = AddressBox::uniform(&rs, -1, 2);
    let win = build_window_order(&rs, &Alcove::fundamental(&rs), &bx, &bx.widened(2)).map_err(|e| e.to_string())?;
    let pd = periodic_quotient(&rs, &win);
    let sw = SheafWindow::periodic(&win, &pd);
    ensure(sw.len() >= 10, || format!("window has {} alcoves", sw.len()))?;
    let up: Vec<usize> = sw.order.up_set(win.base).into_iter().collect();
    let induced = sw.order.induced(&up);
    let lex = induced.linear_extension_ascending(|i| sw.keys[up[i]].clone());
    let rev = induced.linear_extension_ascending(|i| std::cmp::Reverse(sw.keys[up[i]].clone()));
    ensure(lex != rev, || "the two linear extensions coincide".into())?;
    let b1 = bm_build(&Rationals, &sw, win.base, 10, ExtensionOrder::Lexicographic).map_err(|e| e.to_string())?;
    let b2 = bm_build(&Rationals, &sw, win.base, 10, ExtensionOrder::ReverseLexicographic).map_err(|e| e.to_string())?;
    ensure(rank_table(&b1) == rank_table(&b2), || "rank tables differ".into())?;
    ensure(section_hilbert(&b1) == section_hilbert(&b2), || "Hilbert functions of Γ({≤x}) differ".into())?;
    within("Ã2 runs", start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("{} alcoves, identical rank tables and Hilbert functions, {:.2?}", sw.len(), start.elapsed()))
}

fn criterion_5() -> Outcome {
    let results = run_suites(&Lemma::ALL, 100, DEFAULT_SEED, 6, 6);
    let mut parts = Vec::new();
    for r in &results {
        ensure(r.fixtures >= 100 && r.all_passed(), || format!("{} {}/{}: {:?}", r.lemma.name(), r.passed, r.fixtures, r.failures.first()))?;
        parts.push(format!("{} {}/{}", r.lemma.name(), r.passed, r.fixtures));
    }
    ensure(results.len() == Lemma::ALL.len(), || "a suite did not run".into())?;
    Ok(parts.join(", "))
}

const TRIANGLE: &str = r#"{
  "lattice_rank": 2,
  "vertices": ["a", "b", "c"],
  "edges": [
    {"u": "a", "v": "b", "label": [1, 0]},
    {"u": "b", "v": "c", "label": [0, 1]},
    {"u": "a", "v": "c", "label": [1, 1]}
  ],
  "order_covers": [["a", "b"], ["b", "c"]]
}"#;

fn rejected_with(text: &str, code: &str) -> Result<(), String> {
    match load_graph(text) {
        Err(LoadError::Invalid(d)) if d.iter().any(|d| d.code == code) => Ok(()),
        other => Err(format!("expected {}, got {:?}", code, other.err())),
    }
}

fn criterion_6() -> Outcome {
    let (code, err) = cli(&["bm", "run", "--type", "A2-bruhat", "--field", "fp:2"]);
    ensure(code == 2 && err.contains("GKM"), || format!("characteristic 2 gave exit {}: {}", code, err))?;
    rejected_with(&TRIANGLE.replace(r#""u": "b", "v": "c""#, r#""u": "b", "v": "b""#), "LOOP")?;
    rejected_with(&TRIANGLE.replace(r#""label": [1, 1]}"#, r#""label": [1, 1]}, {"u": "c", "v": "a", "label": [2, 1]}"#), "DOUBLE_EDGE")?;
    let (code, err) = cli(&["bm", "run", "--type", "affine-A2", "--box", "-2..3", "--margin", "2", "--cutoff", "6"]);
    ensure(code == 4, || format!("uncertified window gave exit {}: {}", code, err))?;
    let cfg = SelftestConfig { seed: DEFAULT_SEED, count: 0, filter: Some("mutation".into()), inject_mutation: false };
    let mutations = selftest(&cfg);
    ensure(mutations.len() == 2 && mutations.iter().all(|l| l.ok()), || format!("mutations not caught: {:?}", mutations))?;
    let cfg = SelftestConfig { seed: DEFAULT_SEED, count: 0, filter: Some("support_violation".into()), inject_mutation: false };
    ensure(selftest(&cfg).iter().all(|l| l.ok()), || "smeared costalk accepted".into())?;
    Ok("characteristic 2, loop, double edge, uncertified window, zeroed ρ, deleted generator, smeared costalk".into())
}

fn local(label: &str, m: &CofilteredModule<Rationals>) -> Result<String, String> {
    let p = endomorphism_probe(m, 8, DEFAULT_SEED).map_err(|e| format!("{}: {}", label, e))?;
    ensure(p.local, || format!("{} has a nontrivial idempotent", label))?;
    Ok(format!("{} local (dim {})", label, p.dimension))
}

fn criterion_7() -> Outcome {
    let (s3, w3) = classical(CartanType::A2, "longest", 12)?;
    let (s4, _) = classical(CartanType::A3, "s2s1s3s2", 16)?;
    let a1 = affine_a1_chain()?;
    let mut parts = vec![
        local("B(w0) in S3", &global_sections(&s3.sheaf))?,
        local("B(s2s1s3s2) in S4", &global_sections(&s4.sheaf))?,
        local("B(A0) in Â1", &global_sections(&a1))?,
    ];
    let win = s3.sheaf.window();
    let delta = CofilteredModule::standard(&Rationals, s3.sheaf.nvars(), 12, &win.order, &win.orbit_map, w3);
    let double = CofilteredModule::direct_sum(&[&delta, &delta]).map_err(|e| e.to_string())?;
    let p = endomorphism_probe(&double, 8, DEFAULT_SEED).map_err(|e| e.to_string())?;
    ensure(!p.local, || "Δ(w0) ⊕ Δ(w0) reported local".into())?;
    parts.push(format!("Δ(w0) ⊕ Δ(w0) splits (dim {})", p.dimension));
    Ok(parts.join(", "))
}

/// Runs without the test harness so that the criterion lines always print.
fn main() {
    let criteria: [(usize, fn() -> Outcome); 7] =
        [(1, criterion_1), (2, criterion_2), (3, criterion_3), (4, criterion_4), (5, criterion_5), (6, criterion_6), (7, criterion_7)];
    let mut failed = Vec::new();
    for (n, check) in criteria {
        match check() {
            Ok(detail) => println!("criterion {}: PASS ({})", n, detail),
            Err(why) => {
                println!("criterion {}: FAIL ({})", n, why);
                failed.push(n);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria {:?}", failed);
        std::process::exit(1);
    }
}
