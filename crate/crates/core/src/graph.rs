//! Moment graphs over a lattice, group actions, quotients, sub-graphs cut out
//! by sublattices, and the Hilbert function of the structure algebra.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::field::Field;
use crate::graded::{DegreewiseModule, GradedMap};
use crate::linalg::Matrix;
use crate::order::Poset;
use crate::Error;

/// A nonzero lattice vector up to sign, stored with its first nonzero
/// coordinate positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Vec<i64>);

impl Label {
    pub fn new(v: Vec<i64>) -> Result<Self, Error> {
        match v.iter().find(|&&c| c != 0) {
            None => Err(Error::InvalidGraph("zero label".into())),
            Some(&c) if c < 0 => Ok(Label(v.into_iter().map(|c| -c).collect())),
            Some(_) => Ok(Label(v)),
        }
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "±(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub label: Label,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }
}

/// A finite moment graph. Vertices are `0..n` with display names; the
/// optional order lives on the same vertex set.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentGraph {
    rank: usize,
    names: Vec<String>,
    edges: Vec<Edge>,
    order: Option<Poset>,
}

/// One invariant violation found by [`MomentGraph::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Loop { vertex: String },
    DoubleEdge { u: String, v: String },
    LabelRank { u: String, v: String, expected: usize, found: usize },
    Incomparable { u: String, v: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Loop { vertex } => write!(f, "LOOP at vertex {}", vertex),
            Violation::DoubleEdge { u, v } => write!(f, "DOUBLE_EDGE between {} and {}", u, v),
            Violation::LabelRank { u, v, expected, found } => {
                write!(f, "LABEL_RANK on edge {}-{}: expected {} coordinates, found {}", u, v, expected, found)
            }
            Violation::Incomparable { u, v } => write!(f, "INCOMPARABLE endpoints {} and {}", u, v),
        }
    }
}

impl MomentGraph {
    /// Builds a graph without checking invariants; see [`Self::validate`].
    pub fn new(rank: usize, names: Vec<String>, edges: Vec<Edge>, order: Option<Poset>) -> Self {
        MomentGraph { rank, names, edges, order }
    }

    /// Builds a graph and rejects it if any invariant fails.
    pub fn checked(rank: usize, names: Vec<String>, edges: Vec<Edge>, order: Option<Poset>) -> Result<Self, Error> {
        let g = Self::new(rank, names, edges, order);
        let report = g.validate();
        if report.is_empty() {
            Ok(g)
        } else {
            let msg: Vec<String> = report.iter().map(|v| v.to_string()).collect();
            Err(Error::InvalidGraph(msg.join("; ")))
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn order(&self) -> Option<&Poset> {
        self.order.as_ref()
    }

    pub fn with_order(mut self, order: Option<Poset>) -> Self {
        self.order = order;
        self
    }

    /// Indices of edges at `x`.
    pub fn incident(&self, x: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].touches(x)).collect()
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.iter().position(|e| (e.u == a && e.v == b) || (e.u == b && e.v == a))
    }

    /// Every invariant violation, in a deterministic order.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            let (u, v) = (self.names[e.u].clone(), self.names[e.v].clone());
            if e.u == e.v {
                out.push(Violation::Loop { vertex: u.clone() });
                continue;
            }
            if e.label.rank() != self.rank {
                out.push(Violation::LabelRank { u: u.clone(), v: v.clone(), expected: self.rank, found: e.label.rank() });
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            if !seen.insert(key) {
                out.push(Violation::DoubleEdge { u: u.clone(), v: v.clone() });
            }
            if let Some(p) = &self.order {
                if !p.comparable(e.u, e.v) {
                    out.push(Violation::Incomparable { u, v });
                }
            }
        }
        out
    }

    /// Connected components, each sorted, listed by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.num_vertices());
        for e in &self.edges {
            uf.union(e.u, e.v);
        }
        uf.classes()
    }

    /// Checks pairwise linear independence of labels at every vertex over the
    /// field.
    pub fn gkm_check<F: Field>(&self, field: &F) -> GkmResult {
        if field.spec().characteristic() == 2 {
            return GkmResult::FailCharacteristic;
        }
        for x in 0..self.num_vertices() {
            let inc = self.incident(x);
            for (a, &e1) in inc.iter().enumerate() {
                for &e2 in &inc[a + 1..] {
                    let m = Matrix::from_i64_rows(field, &[self.edges[e1].label.coords().to_vec(), self.edges[e2].label.coords().to_vec()]);
                    if m.rank(field) < 2 {
                        return GkmResult::Fail { vertex: x, edges: (e1, e2) };
                    }
                }
            }
        }
        GkmResult::Ok
    }

    /// Checks that each generator maps edges between defined points to edges
    /// with the same label.
    pub fn check_action(&self, action: &GroupAction) -> Result<(), Error> {
        for (gi, perm) in action.generators.iter().enumerate() {
            if perm.len() != self.num_vertices() {
                return Err(Error::NotAutomorphism { generator: gi, detail: "wrong length".into() });
            }
            let mut hit = BTreeSet::new();
            for img in perm.iter().flatten() {
                if *img >= self.num_vertices() || !hit.insert(*img) {
                    return Err(Error::NotAutomorphism { generator: gi, detail: "not injective".into() });
                }
            }
            for e in &self.edges {
                if let (Some(a), Some(b)) = (perm[e.u], perm[e.v]) {
                    match self.edge_between(a, b) {
                        Some(k) if self.edges[k].label == e.label => {}
                        Some(_) => {
                            return Err(Error::NotAutomorphism {
                                generator: gi,
                                detail: alloc::format!("edge {}-{} changes label", self.names[e.u], self.names[e.v]),
                            })
                        }
                        None => {
                            return Err(Error::NotAutomorphism {
                                generator: gi,
                                detail: alloc::format!("edge {}-{} has no image", self.names[e.u], self.names[e.v]),
                            })
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Quotient by the orbits of the action.
    pub fn quotient_by_action(&self, action: &GroupAction) -> Result<QuotientData, Error> {
        self.check_action(action)?;
        let mut uf = UnionFind::new(self.num_vertices());
        for perm in &action.generators {
            for (x, img) in perm.iter().enumerate() {
                if let Some(y) = img {
                    uf.union(x, *y);
                }
            }
        }
        let classes = uf.classes();
        let mut orbit_map = vec![0; self.num_vertices()];
        for (k, c) in classes.iter().enumerate() {
            for &x in c {
                orbit_map[x] = k;
            }
        }
        let names = classes.iter().map(|c| self.names[c[0]].clone()).collect();
        Ok(self.quotient_by_orbits(&orbit_map, names))
    }

    /// Quotient along an arbitrary orbit map onto `0..names.len()`: one edge
    /// per pair of distinct orbits and label class that some edge witnesses.
    pub fn quotient_by_orbits(&self, orbit_map: &[usize], names: Vec<String>) -> QuotientData {
        let mut found: BTreeSet<(usize, usize, Label)> = BTreeSet::new();
        for e in &self.edges {
            let (a, b) = (orbit_map[e.u], orbit_map[e.v]);
            if a != b {
                found.insert((a.min(b), a.max(b), e.label.clone()));
            }
        }
        let edges = found.into_iter().map(|(u, v, label)| Edge { u, v, label }).collect();
        QuotientData { quotient: MomentGraph::new(self.rank, names, edges, None), orbit_map: orbit_map.to_vec() }
    }

    /// `ℋ^L`: the same vertices, keeping edges whose label lies in `L`, with
    /// its connected components.
    pub fn restrict_to_sublattice(&self, l: &Sublattice) -> Result<(MomentGraph, Vec<Vec<usize>>), Error> {
        l.check_saturated()?;
        let edges: Vec<Edge> = self.edges.iter().filter(|e| l.contains(e.label.coords())).cloned().collect();
        let h = MomentGraph::new(self.rank, self.names.clone(), edges, self.order.clone());
        let comps = h.components();
        Ok((h, comps))
    }

    /// The structure algebra `𝒵` as a graded module: tuples `(z_x)` with
    /// `z_u ≡ z_v mod α(E)` on every edge.
    pub fn structure_algebra<F: Field>(&self, field: &F, cutoff: i64) -> DegreewiseModule<F> {
        let n = self.num_vertices();
        let s = DegreewiseModule::ring(field, self.rank, cutoff);
        let sum = DegreewiseModule::free(field, self.rank, cutoff, &vec![0; n]);
        let quots: Vec<(DegreewiseModule<F>, GradedMap<F>)> = self.edges.iter().map(|e| s.quotient_by_form(e.label.coords())).collect();
        let blocks = (0..s.slots())
            .map(|j| {
                let ds = s.dims()[j];
                let rows: usize = quots.iter().map(|q| q.0.dims()[j]).sum();
                let mut m = Matrix::zeros(field, rows, n * ds);
                let mut r = 0;
                for (e, (q, p)) in self.edges.iter().zip(&quots) {
                    let pj = p.block(j);
                    m.paste(pj, r, e.u * ds);
                    m.paste(&pj.scale(field, &field.from_i64(-1)), r, e.v * ds);
                    r += q.dims()[j];
                }
                m
            })
            .collect();
        // free(…, [0; n]) orders its basis generator by generator, matching the blocks
        GradedMap::from_blocks(0, blocks).kernel(&sum).0
    }

    pub fn structure_algebra_hilbert<F: Field>(&self, field: &F, cutoff: i64) -> Vec<usize> {
        self.structure_algebra(field, cutoff).dims().to_vec()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GkmResult {
    Ok,
    FailCharacteristic,
    Fail { vertex: usize, edges: (usize, usize) },
}

impl GkmResult {
    pub fn is_ok(&self) -> bool {
        *self == GkmResult::Ok
    }
}

/// Generators acting on vertices. Entries may be `None` where the image
/// falls outside a finite window; orbits are the classes generated by the
/// defined pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupAction {
    pub generators: Vec<Vec<Option<usize>>>,
}

impl GroupAction {
    pub fn trivial() -> Self {
        GroupAction { generators: Vec::new() }
    }

    pub fn from_permutations(perms: Vec<Vec<usize>>) -> Self {
        GroupAction { generators: perms.into_iter().map(|p| p.into_iter().map(Some).collect()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuotientData {
    pub quotient: MomentGraph,
    pub orbit_map: Vec<usize>,
}

/// A sublattice given by spanning integer vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    rank: usize,
    basis: Vec<Vec<i64>>,
}

impl Sublattice {
    pub fn new(rank: usize, basis: Vec<Vec<i64>>) -> Self {
        Sublattice { rank, basis }
    }

    pub fn full(rank: usize) -> Self {
        let basis = (0..rank).map(|i| (0..rank).map(|j| i64::from(i == j)).collect()).collect();
        Sublattice { rank, basis }
    }

    pub fn zero(rank: usize) -> Self {
        Sublattice { rank, basis: Vec::new() }
    }

    pub fn elementary_divisors(&self) -> Vec<i128> {
        smith_diagonal(&self.basis, self.rank)
    }

    /// `X/L` is torsion free iff every nonzero elementary divisor is 1.
    pub fn check_saturated(&self) -> Result<(), Error> {
        let d = self.elementary_divisors();
        if d.iter().all(|&x| x == 0 || x == 1) {
            Ok(())
        } else {
            Err(Error::NotSaturated(d.into_iter().map(|x| x as i64).collect()))
        }
    }

    /// Membership; exact for saturated lattices, where it reduces to
    /// membership in the rational span.
    pub fn contains(&self, v: &[i64]) -> bool {
        let f = crate::field::Rationals;
        let base = Matrix::from_i64_rows(&f, &self.basis);
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        let ext = Matrix::from_i64_rows(&f, &rows);
        let r0 = if self.basis.is_empty() { 0 } else { base.rank(&f) };
        ext.rank(&f) == r0
    }
}

fn smith_diagonal(rows: &[Vec<i64>], cols: usize) -> Vec<i128> {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let m = a.len();
    let n = cols;
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // pivot: smallest nonzero absolute value in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in (t + 1)..m {
            let q = a[i][t] / a[t][t];
            if q != 0 {
                for j in t..n {
                    a[i][j] -= q * a[t][j];
                }
            }
            clean &= a[i][t] == 0;
        }
        for j in (t + 1)..n {
            let q = a[t][j] / a[t][t];
            if q != 0 {
                for row in a.iter_mut().skip(t) {
                    row[j] -= q * row[t];
                }
            }
            clean &= a[t][j] == 0;
        }
        if !clean {
            continue;
        }
        // divisibility of the rest by the pivot
        let p = a[t][t];
        if let Some(i) = (t + 1..m).find(|&i| (t + 1..n).any(|j| a[i][j] % p != 0)) {
            for j in t..n {
                a[t][j] += a[i][j];
            }
            continue;
        }
        diag.push(p.abs());
        t += 1;
    }
    diag.resize(m.min(n), 0);
    diag
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    /// Classes sorted internally and by smallest member.
    pub(crate) fn classes(&mut self) -> Vec<Vec<usize>> {
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.parent.len() {
            let r = self.find(x);
            by_root.entry(r).or_default().push(x);
        }
        by_root.into_values().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| alloc::format!("v{}", i)).collect()
    }

    fn edge(u: usize, v: usize, l: &[i64]) -> Edge {
        Edge { u, v, label: Label::new(l.to_vec()).unwrap() }
    }

    #[test]
    fn label_canonical_sign() {
        assert_eq!(Label::new(vec![0, -2, 1]).unwrap().coords(), &[0, 2, -1]);
        assert!(Label::new(vec![0, 0]).is_err());
    }

    #[test]
    fn validate_reports() {
        let g = MomentGraph::new(1, names(2), vec![edge(0, 1, &[1])], None);
        assert!(g.validate().is_empty());
        let g = MomentGraph::new(1, names(2), vec![edge(0, 0, &[1])], None);
        assert!(matches!(g.validate()[0], Violation::Loop { .. }));
        let g = MomentGraph::new(1, names(2), vec![edge(0, 1, &[1]), edge(1, 0, &[2])], None);
        assert!(matches!(g.validate()[0], Violation::DoubleEdge { .. }));
        let g = MomentGraph::new(1, names(2), vec![edge(0, 1, &[1])], Some(Poset::discrete(2)));
        assert!(matches!(g.validate()[0], Violation::Incomparable { .. }));
    }

    #[test]
    fn gkm() {
        let f = Rationals;
        let g = MomentGraph::new(2, names(2), vec![edge(0, 1, &[1, 1])], None);
        assert!(g.gkm_check(&f).is_ok());
        assert_eq!(g.gkm_check(&PrimeField::new_unchecked(2)), GkmResult::FailCharacteristic);
        let g = MomentGraph::new(2, names(3), vec![edge(0, 1, &[1, 1]), edge(0, 2, &[2, 2])], None);
        assert_eq!(g.gkm_check(&f), GkmResult::Fail { vertex: 0, edges: (0, 1) });
        // (1,0) and (1,3) are proportional mod 3
        let g = MomentGraph::new(2, names(3), vec![edge(0, 1, &[1, 0]), edge(0, 2, &[1, 3])], None);
        assert!(g.gkm_check(&f).is_ok());
        assert!(!g.gkm_check(&PrimeField::new(3).unwrap()).is_ok());
    }

    #[test]
    fn quotient_collapses_parallel_edges() {
        // two α-edges between orbits {0,1} and {2,3}
        let g = MomentGraph::new(1, names(4), vec![edge(0, 2, &[1]), edge(1, 3, &[1])], None);
        let a = GroupAction::from_permutations(vec![vec![1, 0, 3, 2]]);
        let q = g.quotient_by_action(&a).unwrap();
        assert_eq!(q.quotient.edges().len(), 1);
        assert_eq!(q.orbit_map, vec![0, 0, 1, 1]);
        let bad = GroupAction::from_permutations(vec![vec![0, 1, 3, 2]]);
        assert!(matches!(g.quotient_by_action(&bad), Err(Error::NotAutomorphism { .. })));
    }

    #[test]
    fn saturation() {
        assert!(Sublattice::new(2, vec![vec![2, 0]]).check_saturated().is_err());
        assert!(Sublattice::new(2, vec![vec![1, 1]]).check_saturated().is_ok());
        assert_eq!(Sublattice::new(3, vec![vec![2, 4, 0], vec![0, 6, 3]]).elementary_divisors(), vec![1, 6]);
        assert!(Sublattice::zero(2).check_saturated().is_ok());
    }

    #[test]
    fn structure_algebra_examples() {
        let f = Rationals;
        let g = MomentGraph::new(1, names(2), vec![], None);
        assert_eq!(g.structure_algebra_hilbert(&f, 6), vec![2, 2, 2, 2]);
        let g = MomentGraph::new(1, names(2), vec![edge(0, 1, &[1])], None);
        assert_eq!(g.structure_algebra_hilbert(&f, 6), vec![1, 2, 2, 2]);
    }
}
