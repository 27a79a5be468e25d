//! Seeded random moment graphs in rank 2 and the lemma suites run on the
//! sheaves built over them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cofiltered::{limit, CofilteredModule, Component, Diagram};
use crate::endo::{endomorphism_basis, fitting, fitting_check, induced_endomorphism};
use crate::field::{Field, Rationals};
use crate::graded::{DegreewiseModule, GradedMap};
use crate::graph::{Edge, Label, MomentGraph};
use crate::linalg::Matrix;
use crate::order::Poset;
use crate::sheaf::{bm_build, CofilteredSheaf, ExtensionOrder, SheafWindow};
use crate::verify::{delta_agreement, extension_check, global_sections, sheaf_glue_check};
use crate::Error;

/// Default seed of the randomized suites.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Primitive vectors of `[-2, 2]²` up to sign.
fn label_pool() -> Vec<[i64; 2]> {
    let mut out = Vec::new();
    for a in 0..=2i64 {
        for b in -2..=2i64 {
            if (a == 0 && b <= 0) || num_integer::gcd(a, b) != 1 {
                continue;
            }
            out.push([a, b]);
        }
    }
    out
}

fn below(rng: &mut ChaCha8Rng, n: u32) -> usize {
    (rng.next_u32() % n) as usize
}

/// A random window on 2 to `max_vertices` vertices over the identity
/// quotient. Vertex 0 is least; rank-2 labels satisfy GKM over `Q`.
/// Edges only join comparable vertices.
pub fn random_window(rng: &mut ChaCha8Rng, max_vertices: usize) -> SheafWindow {
    let n = 2 + below(rng, max_vertices.max(2) as u32 - 1);
    let mut rel = Vec::new();
    for j in 1..n {
        rel.push((0, j));
        for i in 1..j {
            if rng.next_u32() % 2 == 0 {
                rel.push((i, j));
            }
        }
    }
    let order = Poset::from_relations(n, &rel).expect("relations follow the vertex order");
    let pool = label_pool();
    let mut edges: Vec<Edge> = Vec::new();
    let proportional = |a: &[i64], b: &[i64]| a[0] * b[1] == a[1] * b[0];
    for j in 1..n {
        for i in 0..j {
            if !order.lt(i, j) || rng.next_u32() % 3 == 0 {
                continue;
            }
            for _ in 0..8 {
                let l = pool[below(rng, pool.len() as u32)];
                let clash = edges.iter().any(|e| (e.touches(i) || e.touches(j)) && proportional(e.label.coords(), &l));
                if !clash {
                    edges.push(Edge { u: i, v: j, label: Label::new(l.to_vec()).expect("nonzero") });
                    break;
                }
            }
        }
    }
    let names: Vec<String> = (0..n).map(|x| format!("v{}", x)).collect();
    let graph = MomentGraph::new(2, names.clone(), edges, Some(order.clone()));
    SheafWindow::new(order, names, (0..n).collect(), graph).expect("identity quotient")
}

/// Random open subset: the downward closure of a random subset.
pub fn random_open(rng: &mut ChaCha8Rng, order: &Poset) -> BTreeSet<usize> {
    let seed: BTreeSet<usize> = (0..order.len()).filter(|_| rng.next_u32() % 3 == 0).collect();
    order.open_hull(&seed)
}

/// The randomized lemma suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Lemma {
    ModuleGluing,
    SheafGluing,
    FiberSquare,
    Fitting,
    DeltaAgreement,
    ExtensionLemma,
}

impl Lemma {
    pub const ALL: [Lemma; 6] =
        [Lemma::ModuleGluing, Lemma::SheafGluing, Lemma::FiberSquare, Lemma::Fitting, Lemma::DeltaAgreement, Lemma::ExtensionLemma];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::ModuleGluing => "gluing_module",
            Lemma::SheafGluing => "gluing_sheaf",
            Lemma::FiberSquare => "fiber_square",
            Lemma::Fitting => "fitting",
            Lemma::DeltaAgreement => "delta_agreement",
            Lemma::ExtensionLemma => "extension_lemma",
        }
    }
}

/// Outcome of one suite over all fixtures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteResult {
    pub lemma: Lemma,
    pub fixtures: usize,
    pub passed: usize,
    /// `fixture index: reason` per failing fixture.
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.passed == self.fixtures
    }
}

/// A built fixture: the window, `ℬ(v0)` and its global sections.
pub struct Fixture {
    pub window: SheafWindow,
    pub sheaf: CofilteredSheaf<Rationals>,
    pub global: CofilteredModule<Rationals>,
}

/// Fixture `index` of the stream with the given seed.
pub fn fixture(seed: u64, index: usize, max_vertices: usize, cutoff: i64) -> Result<Fixture, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let window = random_window(&mut rng, max_vertices);
    let sheaf = bm_build(&Rationals, &window, 0, cutoff, ExtensionOrder::Lexicographic)?;
    let global = global_sections(&sheaf);
    Ok(Fixture { window, sheaf, global })
}

fn check(lemma: Lemma, fx: &Fixture, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let order = &fx.window.order;
    let n = order.len();
    let err = |e: Error| format!("{}", e);
    match lemma {
        Lemma::ModuleGluing | Lemma::SheafGluing => {
            for _ in 0..3 {
                let (u1, u2) = (random_open(rng, order), random_open(rng, order));
                let ok = if lemma == Lemma::ModuleGluing {
                    fx.global.glue_check(&u1, &u2).map_err(err)?
                } else {
                    sheaf_glue_check(&fx.sheaf, &u1, &u2).map_err(err)?
                };
                if !ok {
                    return Err(format!("cover {:?} {:?}", u1, u2));
                }
            }
            Ok(())
        }
        Lemma::FiberSquare => {
            for x in 0..n {
                if !fx.global.fiber_square_check(x).map_err(err)? {
                    return Err(format!("vertex {}", x));
                }
            }
            Ok(())
        }
        Lemma::Fitting => {
            let doubled;
            let m = if rng.next_u32() % 2 == 0 {
                &fx.global
            } else {
                doubled = CofilteredModule::direct_sum(&[&fx.global, &fx.global]).map_err(err)?;
                &doubled
            };
            let f = m.field();
            let all: BTreeSet<usize> = (0..n).collect();
            let g = limit(m, &all);
            let basis = endomorphism_basis(m, &g).map_err(err)?;
            let coeffs: Vec<_> = basis.iter().map(|_| f.from_i64((rng.next_u32() % 5) as i64 - 2)).collect();
            let e: Vec<Matrix<Rationals>> = (0..g.module.slots())
                .map(|j| {
                    let d = g.module.dims()[j];
                    let mut acc = Matrix::zeros(f, d, d);
                    for (b, c) in basis.iter().zip(&coeffs) {
                        acc = acc.add(f, &b[j].scale(f, c));
                    }
                    acc
                })
                .collect();
            let map = induced_endomorphism(m, &g, &e).map_err(err)?;
            let dec = fitting(m, &map).map_err(err)?;
            if fitting_check(m, &map, &dec) {
                Ok(())
            } else {
                Err(String::from("parts do not split the module"))
            }
        }
        Lemma::DeltaAgreement => {
            for x in (0..n).filter(|&x| x != 0) {
                delta_agreement(&fx.sheaf, &fx.global, x).map_err(|e| format!("vertex {}: {}", x, e))?;
            }
            Ok(())
        }
        Lemma::ExtensionLemma => {
            for x in (0..n).filter(|&x| x != 0) {
                let (vanishes, _) = extension_check(&fx.sheaf, &fx.global, x).map_err(err)?;
                if !vanishes {
                    return Err(format!("vertex {}", x));
                }
            }
            Ok(())
        }
    }
}

/// Runs the given suites on `count` fixtures, each fixture built once and
/// shared by all suites.
pub fn run_suites(lemmas: &[Lemma], count: usize, seed: u64, max_vertices: usize, cutoff: i64) -> Vec<SuiteResult> {
    let mut results: Vec<SuiteResult> =
        lemmas.iter().map(|&lemma| SuiteResult { lemma, fixtures: count, passed: 0, failures: Vec::new() }).collect();
    for i in 0..count {
        let fx = fixture(seed, i, max_vertices, cutoff);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        for r in results.iter_mut() {
            let outcome = match &fx {
                Ok(fx) => check(r.lemma, fx, &mut rng),
                Err(e) => Err(format!("build failed: {}", e)),
            };
            match outcome {
                Ok(()) => r.passed += 1,
                Err(msg) => r.failures.push(format!("{}: {}", i, msg)),
            }
        }
    }
    results
}

/// `Δ(a) ⊕ Δ(b)` on `a < b` in distinct orbits with the restriction at `b`
/// changed from `(1, 0)` to `(1, 1)`, so that the costalk at `b` has a
/// nonzero component at the orbit of `a`.
pub fn smeared_costalk(cutoff: i64) -> CofilteredModule<Rationals> {
    let f = Rationals;
    let order = Poset::from_relations(2, &[(0, 1)]).expect("chain");
    let s = DegreewiseModule::ring(&f, 2, cutoff);
    let ss = DegreewiseModule::direct_sum(&f, 2, cutoff, &[&s, &s]);
    let id = GradedMap::identity(&s);
    let first = GradedMap::stack_cols(&f, s.dims(), &[&id, &GradedMap::zero(&s, &s)]);
    let second = GradedMap::stack_cols(&f, s.dims(), &[&GradedMap::zero(&s, &s), &id]);
    let smeared = GradedMap::stack_cols(&f, s.dims(), &[&id, &id]);
    let mut res = BTreeMap::new();
    res.insert((1, 0), smeared);
    let components = vec![
        vec![Component { orbit: 0, target: s.clone(), map: id.clone() }],
        vec![Component { orbit: 0, target: s.clone(), map: first }, Component { orbit: 1, target: s.clone(), map: second }],
    ];
    CofilteredModule::new(&f, 2, cutoff, order, vec![0, 1], vec![s, ss], res, components).expect("well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_windows_are_gkm() {
        let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
        for _ in 0..50 {
            let w = random_window(&mut rng, 6);
            assert!(w.quotient.gkm_check(&Rationals).is_ok());
            assert!(w.quotient.validate().is_empty());
            assert!((1..w.len()).all(|x| w.order.lt(0, x)));
        }
    }

    #[test]
    fn smeared_costalk_violates_support() {
        let m = smeared_costalk(4);
        assert!(matches!(m.support_check(), Err(Error::SupportViolation(_))));
    }

    #[test]
    fn small_suite_run() {
        for r in run_suites(&Lemma::ALL, 5, DEFAULT_SEED, 4, 4) {
            assert!(r.all_passed(), "{}: {:?}", r.lemma.name(), r.failures);
        }
    }
}
