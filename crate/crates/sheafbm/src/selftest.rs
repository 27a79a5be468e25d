//! Built-in invariant suites with a pass/fail matrix.

use sheafbm_core::alcove::{build_window_order, periodic_quotient, AddressBox, Alcove, CartanType, RootSystem, WeylGroup};
use sheafbm_core::fixtures::{fixture, run_suites, smeared_costalk, Lemma};
use sheafbm_core::sheaf::{bm_build, CofilteredSheaf, ExtensionOrder, SheafWindow};
use sheafbm_core::verify::{bm_verify, rank_table, section_hilbert, sheaf_flabby_failures};
use sheafbm_core::{Error, Rationals};

/// Fixture stream parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelftestConfig {
    pub seed: u64,
    pub count: usize,
    /// Only suites whose name contains this string.
    pub filter: Option<String>,
    /// Test hook: hands a sheaf with a deleted generator to the flabbiness
    /// suite as if it were a construction output.
    pub inject_mutation: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteLine {
    pub name: String,
    pub passed: usize,
    pub total: usize,
    pub failures: Vec<String>,
}

impl SuiteLine {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.passed == self.total
    }
}

const MAX_VERTICES: usize = 6;
const CUTOFF: i64 = 6;

const LOCAL_SUITES: [&str; 4] = ["flabbiness", "reordering", "mutation_zero_rho", "mutation_deleted_generator"];

/// Names of all suites in matrix order.
pub fn suite_names() -> Vec<&'static str> {
    Lemma::ALL.iter().map(|l| l.name()).chain(LOCAL_SUITES).chain(["support_violation"]).collect()
}

fn affine_a1(top: i64, cutoff: i64) -> CofilteredSheaf<Rationals> {
    let rs = RootSystem::new(CartanType::A1);
    let a0 = Alcove::fundamental(&rs);
    let bx = AddressBox::uniform(&rs, 0, top);
    let win = build_window_order(&rs, &a0, &bx, &bx.widened(2)).expect("certified chain");
    let pd = periodic_quotient(&rs, &win);
    bm_build(&Rationals, &SheafWindow::periodic(&win, &pd), win.base, cutoff, ExtensionOrder::Lexicographic).expect("chain builds")
}

fn classical(t: CartanType, w: &str, cutoff: i64) -> CofilteredSheaf<Rationals> {
    let rs = RootSystem::new(t);
    let weyl = WeylGroup::new(&rs);
    let win = SheafWindow::classical(&weyl);
    bm_build(&Rationals, &win, weyl.parse(w).expect("valid word"), cutoff, ExtensionOrder::Lexicographic).expect("classical builds")
}

fn tally(name: &str, outcomes: impl IntoIterator<Item = Result<(), String>>) -> SuiteLine {
    let mut line = SuiteLine { name: name.into(), passed: 0, total: 0, failures: Vec::new() };
    for (i, o) in outcomes.into_iter().enumerate() {
        line.total += 1;
        match o {
            Ok(()) => line.passed += 1,
            Err(m) => line.failures.push(format!("{}: {}", i, m)),
        }
    }
    line
}

fn flabby(b: &CofilteredSheaf<Rationals>) -> Result<(), String> {
    let r = bm_verify(b);
    if r.all_passed() {
        Ok(())
    } else {
        Err(format!("{:?}", r.failed()))
    }
}

fn local_suite(name: &str, cfg: &SelftestConfig) -> SuiteLine {
    let build = |i: usize| fixture(cfg.seed, i, MAX_VERTICES, CUTOFF).map_err(|e: Error| e.to_string());
    match name {
        "flabbiness" => {
            let mut named = vec![classical(CartanType::A2, "longest", 8), affine_a1(5, 8)];
            if cfg.inject_mutation {
                let mut b = affine_a1(5, 8);
                let top = b.window().index_of("A5").expect("chain top");
                b.mutate_delete_generator(top, 0).expect("top is maximal");
                named.push(b);
            }
            let fixed = named.iter().map(flabby).collect::<Vec<_>>();
            let random = (0..cfg.count).map(|i| build(i).and_then(|fx| flabby(&fx.sheaf)));
            tally(name, fixed.into_iter().chain(random))
        }
        "reordering" => tally(
            name,
            (0..cfg.count).map(|i| {
                let fx = build(i)?;
                let other = bm_build(&Rationals, &fx.window, 0, CUTOFF, ExtensionOrder::ReverseLexicographic).map_err(|e| e.to_string())?;
                if rank_table(&fx.sheaf) == rank_table(&other) && section_hilbert(&fx.sheaf) == section_hilbert(&other) {
                    Ok(())
                } else {
                    Err("extension orders disagree".into())
                }
            }),
        ),
        "mutation_zero_rho" => {
            let mut b = affine_a1(5, 8);
            let win = b.window().clone();
            let top = win.index_of("A5").expect("chain top");
            let below = win.index_of("A4").expect("chain");
            let caught = b.mutate_zero_rho(0, win.orbit_map[below], top).map_err(|e| e.to_string()).and_then(|_| {
                if bm_verify(&b).get("property3_edges").is_some_and(|c| !c.passed) {
                    Ok(())
                } else {
                    Err("zeroed ρ not detected".into())
                }
            });
            tally(name, [caught])
        }
        "mutation_deleted_generator" => {
            let mut b = affine_a1(5, 8);
            let top = b.window().index_of("A5").expect("chain top");
            let caught = b.mutate_delete_generator(top, 0).map_err(|e| e.to_string()).and_then(|_| {
                if !bm_verify(&b).all_passed() && sheaf_flabby_failures(&b) == vec![top] {
                    Ok(())
                } else {
                    Err("deleted generator not detected".into())
                }
            });
            tally(name, [caught])
        }
        "support_violation" => {
            let caught = match smeared_costalk(CUTOFF).support_check() {
                Err(Error::SupportViolation(_)) => Ok(()),
                _ => Err("smeared costalk accepted".into()),
            };
            tally(name, [caught])
        }
        _ => unreachable!("unknown suite {}", name),
    }
}

/// Runs the selected suites.
pub fn selftest(cfg: &SelftestConfig) -> Vec<SuiteLine> {
    let selected = |n: &str| cfg.filter.as_deref().is_none_or(|f| n.contains(f));
    let lemmas: Vec<Lemma> = Lemma::ALL.into_iter().filter(|l| selected(l.name())).collect();
    let mut out: Vec<SuiteLine> = run_suites(&lemmas, cfg.count, cfg.seed, MAX_VERTICES, CUTOFF)
        .into_iter()
        .map(|r| SuiteLine { name: r.lemma.name().into(), passed: r.passed, total: r.fixtures, failures: r.failures })
        .collect();
    for name in LOCAL_SUITES.iter().chain(["support_violation"].iter()) {
        if selected(name) {
            out.push(local_suite(name, cfg));
        }
    }
    out
}

/// One line per suite: name, passed/total, verdict.
pub fn matrix(lines: &[SuiteLine]) -> String {
    let mut s = String::new();
    for l in lines {
        s.push_str(&format!("{:<28} {:>4}/{:<4} {}\n", l.name, l.passed, l.total, if l.ok() { "PASS" } else { "FAIL" }));
        for f in l.failures.iter().take(5) {
            s.push_str(&format!("    {}\n", f));
        }
    }
    s
}
