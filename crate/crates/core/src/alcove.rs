//! Root systems, the finite Weyl group acting on weights, alcoves with
//! integer addresses, the generic Bruhat order on finite windows, and the
//! periodic moment graph with its quotient.
//!
//! Weights are written in fundamental-weight coordinates and coroots in
//! simple-coroot coordinates, so `⟨λ, β∨⟩` is the plain dot product.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::graph::{Edge, GroupAction, Label, MomentGraph, QuotientData};
use crate::order::Poset;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CartanType {
    A1,
    A2,
    A3,
    B2,
    G2,
}

impl CartanType {
    pub fn parse(s: &str) -> Result<Self, Error> {
        match s.to_ascii_uppercase().as_str() {
            "A1" => Ok(CartanType::A1),
            "A2" => Ok(CartanType::A2),
            "A3" => Ok(CartanType::A3),
            "B2" | "C2" => Ok(CartanType::B2),
            "G2" => Ok(CartanType::G2),
            _ => Err(Error::UnsupportedType(s.into())),
        }
    }

    /// `cartan[i][j] = ⟨α_j, α_i∨⟩`.
    fn cartan(self) -> Vec<Vec<i64>> {
        match self {
            CartanType::A1 => vec![vec![2]],
            CartanType::A2 => vec![vec![2, -1], vec![-1, 2]],
            CartanType::A3 => vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]],
            CartanType::B2 => vec![vec![2, -2], vec![-1, 2]],
            CartanType::G2 => vec![vec![2, -1], vec![-3, 2]],
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CartanType::A1 => "A1",
            CartanType::A2 => "A2",
            CartanType::A3 => "A3",
            CartanType::B2 => "B2",
            CartanType::G2 => "G2",
        };
        f.write_str(s)
    }
}

/// A reduced root system with roots and matching coroots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSystem {
    cartan_type: CartanType,
    cartan: Vec<Vec<i64>>,
    /// Roots in simple-root coordinates, positive ones first.
    roots: Vec<Vec<i64>>,
    /// `coroots[k]` is the coroot of `roots[k]`, in simple-coroot coordinates.
    coroots: Vec<Vec<i64>>,
    npos: usize,
}

impl RootSystem {
    pub fn new(cartan_type: CartanType) -> Self {
        let cartan = cartan_type.cartan();
        let r = cartan.len();
        let unit = |i: usize| -> Vec<i64> { (0..r).map(|j| i64::from(i == j)).collect() };
        let mut seen: BTreeMap<Vec<i64>, Vec<i64>> = BTreeMap::new();
        let mut queue: VecDeque<(Vec<i64>, Vec<i64>)> = (0..r).map(|i| (unit(i), unit(i))).collect();
        while let Some((b, c)) = queue.pop_front() {
            if seen.contains_key(&b) {
                continue;
            }
            seen.insert(b.clone(), c.clone());
            for i in 0..r {
                // s_i β = β − ⟨β, α_i∨⟩ α_i ;  s_i β∨ = β∨ − ⟨α_i, β∨⟩ α_i∨
                let pb: i64 = (0..r).map(|j| b[j] * cartan[i][j]).sum();
                let pc: i64 = (0..r).map(|j| c[j] * cartan[j][i]).sum();
                let mut nb = b.clone();
                nb[i] -= pb;
                let mut nc = c.clone();
                nc[i] -= pc;
                if !seen.contains_key(&nb) {
                    queue.push_back((nb, nc));
                }
            }
        }
        let mut pos: Vec<(Vec<i64>, Vec<i64>)> = seen.into_iter().filter(|(b, _)| b.iter().all(|&x| x >= 0)).collect();
        // height, then coordinates: simple roots first
        pos.sort_by(|a, b| (a.0.iter().sum::<i64>(), &a.0).cmp(&(b.0.iter().sum::<i64>(), &b.0)));
        let npos = pos.len();
        let mut roots: Vec<Vec<i64>> = pos.iter().map(|p| p.0.clone()).collect();
        let mut coroots: Vec<Vec<i64>> = pos.iter().map(|p| p.1.clone()).collect();
        for k in 0..npos {
            roots.push(roots[k].iter().map(|x| -x).collect());
            coroots.push(coroots[k].iter().map(|x| -x).collect());
        }
        RootSystem { cartan_type, cartan, roots, coroots, npos }
    }

    pub fn cartan_type(&self) -> CartanType {
        self.cartan_type
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn coroots(&self) -> &[Vec<i64>] {
        &self.coroots
    }

    pub fn num_positive(&self) -> usize {
        self.npos
    }

    pub fn positive_coroots(&self) -> &[Vec<i64>] {
        &self.coroots[..self.npos]
    }

    /// `⟨roots[a], coroots[b]⟩`.
    pub fn pairing(&self, a: usize, b: usize) -> i64 {
        let r = self.rank();
        let w = self.root_in_weights(a);
        (0..r).map(|j| w[j] * self.coroots[b][j]).sum()
    }

    /// `roots[k]` in fundamental-weight coordinates.
    pub fn root_in_weights(&self, k: usize) -> Vec<i64> {
        let r = self.rank();
        (0..r).map(|j| (0..r).map(|i| self.cartan[j][i] * self.roots[k][i]).sum()).collect()
    }

    /// `⟨λ, coroots[k]⟩` for a rational weight.
    pub fn pair_weight(&self, lambda: &[Rational64], k: usize) -> Rational64 {
        lambda.iter().zip(&self.coroots[k]).map(|(l, &c)| *l * Rational64::from_integer(c)).fold(Rational64::zero(), |a, b| a + b)
    }

    pub fn pair_int_weight(&self, lambda: &[i64], k: usize) -> i64 {
        lambda.iter().zip(&self.coroots[k]).map(|(l, c)| l * c).sum()
    }

    /// `s_{β∨,n}(λ) = λ − (⟨λ,β∨⟩ − n)β` for the positive root `k`.
    pub fn affine_reflect(&self, lambda: &[Rational64], k: usize, n: i64) -> Vec<Rational64> {
        let c = self.pair_weight(lambda, k) - Rational64::from_integer(n);
        let beta = self.root_in_weights(k);
        lambda.iter().zip(&beta).map(|(l, &b)| *l - c * Rational64::from_integer(b)).collect()
    }

    /// Simple-root coordinates of a weight.
    pub fn weight_to_root_coords(&self, lambda: &[Rational64]) -> Vec<Rational64> {
        // λ = Σ b_i α_i with (α_i)_j = cartan[j][i]; solve cartan · b = λ
        let r = self.rank();
        let mut a: Vec<Vec<Rational64>> = (0..r)
            .map(|j| {
                let mut row: Vec<Rational64> = (0..r).map(|i| Rational64::from_integer(self.cartan[j][i])).collect();
                row.push(lambda[j]);
                row
            })
            .collect();
        for col in 0..r {
            let p = (col..r).find(|&i| !a[i][col].is_zero()).expect("Cartan matrix is invertible");
            a.swap(col, p);
            let inv = Rational64::one() / a[col][col];
            for v in a[col].iter_mut() {
                *v *= inv;
            }
            for i in 0..r {
                if i != col && !a[i][col].is_zero() {
                    let f = a[i][col];
                    for j in 0..=r {
                        let t = a[col][j];
                        a[i][j] -= f * t;
                    }
                }
            }
        }
        a.into_iter().map(|row| row[r]).collect()
    }
}

/// An element of the finite Weyl group, identified by its image of `ρ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElement {
    rho_image: Vec<i64>,
}

/// The finite Weyl group with lengths, lexicographically smallest reduced
/// words, and left multiplication by reflections.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    rs: RootSystem,
    elements: Vec<WeylElement>,
    index: BTreeMap<WeylElement, usize>,
    words: Vec<Vec<usize>>,
    lengths: Vec<usize>,
}

impl WeylGroup {
    pub fn new(rs: &RootSystem) -> Self {
        let r = rs.rank();
        let rho = vec![1i64; r];
        let e = WeylElement { rho_image: rho };
        let mut elements = vec![e.clone()];
        let mut index = BTreeMap::new();
        index.insert(e, 0usize);
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        let mut lengths = vec![0usize];
        let mut layer = vec![0usize];
        while !layer.is_empty() {
            // candidates of the next length with their lexicographically least word
            let mut next: BTreeMap<WeylElement, Vec<usize>> = BTreeMap::new();
            for &y in &layer {
                for i in 0..r {
                    let x = Self::reflect_rho(rs, &elements[y].rho_image, i);
                    if index.contains_key(&x) {
                        continue;
                    }
                    let mut w = vec![i];
                    w.extend_from_slice(&words[y]);
                    let entry = next.entry(x).or_insert_with(|| w.clone());
                    if w < *entry {
                        *entry = w;
                    }
                }
            }
            layer = Vec::new();
            let len = lengths[lengths.len() - 1] + 1;
            for (x, w) in next {
                index.insert(x.clone(), elements.len());
                layer.push(elements.len());
                elements.push(x);
                words.push(w);
                lengths.push(len);
            }
        }
        // BFS distance from e is the Coxeter length
        WeylGroup { rs: rs.clone(), elements, index, words, lengths }
    }

    fn reflect_rho(rs: &RootSystem, v: &[i64], k: usize) -> WeylElement {
        let c = rs.pair_int_weight(v, k);
        let beta = rs.root_in_weights(k);
        WeylElement { rho_image: v.iter().zip(&beta).map(|(a, b)| a - c * b).collect() }
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn length(&self, x: usize) -> usize {
        self.lengths[x]
    }

    pub fn word(&self, x: usize) -> &[usize] {
        &self.words[x]
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn longest(&self) -> usize {
        (0..self.len()).max_by_key(|&x| self.lengths[x]).unwrap()
    }

    /// `"e"` or e.g. `"s2s1s3s2"` (1-based simple reflections).
    pub fn name(&self, x: usize) -> String {
        if self.words[x].is_empty() {
            return "e".into();
        }
        self.words[x].iter().map(|i| format!("s{}", i + 1)).collect()
    }

    /// Resolves `"e"`, `"longest"`, or a word such as `"s1s2"` (any word, not
    /// necessarily reduced or minimal).
    pub fn parse(&self, s: &str) -> Result<usize, Error> {
        let t = s.trim();
        if t == "e" || t == "id" || t.is_empty() {
            return Ok(0);
        }
        if t == "longest" || t == "w0" {
            return Ok(self.longest());
        }
        let mut x = 0usize;
        let parts: Vec<&str> = t.split('s').collect();
        if !parts[0].is_empty() {
            return Err(Error::Domain(format!("cannot parse Weyl group element {:?}", s)));
        }
        // apply from the right: x = s_{i1} … s_{ik}
        let mut idx = Vec::new();
        for p in &parts[1..] {
            let i: usize = p.parse().map_err(|_| Error::Domain(format!("cannot parse Weyl group element {:?}", s)))?;
            if i == 0 || i > self.rs.rank() {
                return Err(Error::Domain(format!("simple reflection s{} out of range", i)));
            }
            idx.push(i - 1);
        }
        for &i in idx.iter().rev() {
            x = self.left_mul(i, x);
        }
        Ok(x)
    }

    /// `s_β x` for the root index `k` (positive or negative).
    pub fn left_mul(&self, k: usize, x: usize) -> usize {
        let y = Self::reflect_rho(&self.rs, &self.elements[x].rho_image, k);
        self.index[&y]
    }

    /// Applies `x` to a rational weight.
    pub fn act(&self, x: usize, lambda: &[Rational64]) -> Vec<Rational64> {
        let mut v = lambda.to_vec();
        for &i in self.words[x].iter().rev() {
            v = self.rs.affine_reflect(&v, i, 0);
        }
        v
    }

    /// The Bruhat order: generated by `x < s_β x` whenever the length grows.
    pub fn bruhat_order(&self) -> Poset {
        let mut rel = Vec::new();
        for x in 0..self.len() {
            for k in 0..self.rs.num_positive() {
                let y = self.left_mul(k, x);
                if self.lengths[y] > self.lengths[x] {
                    rel.push((x, y));
                }
            }
        }
        Poset::from_relations(self.len(), &rel).expect("Bruhat relations are acyclic")
    }

    /// The Weyl moment graph: `x -- s_β x` labeled `±β∨`. Vertex names follow
    /// [`Self::name`].
    pub fn reflection_graph(&self) -> MomentGraph {
        let mut edges = Vec::new();
        for x in 0..self.len() {
            for k in 0..self.rs.num_positive() {
                let y = self.left_mul(k, x);
                if x < y {
                    edges.push(Edge { u: x, v: y, label: Label::new(self.rs.coroots[k].clone()).unwrap() });
                }
            }
        }
        let names = (0..self.len()).map(|x| self.name(x)).collect();
        MomentGraph::new(self.rs.rank(), names, edges, None)
    }
}

/// An alcove, by the floors of `⟨c, β∨⟩` over the positive coroots (in
/// [`RootSystem::positive_coroots`] order) for interior points `c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alcove {
    pub address: Vec<i64>,
}

impl Alcove {
    pub fn fundamental(rs: &RootSystem) -> Self {
        Alcove { address: vec![0; rs.num_positive()] }
    }

    /// `"A3"`, `"A-1"` in rank one; `"(0,1,1)"` otherwise.
    pub fn name(&self) -> String {
        if self.address.len() == 1 {
            format!("A{}", self.address[0])
        } else {
            let parts: Vec<String> = self.address.iter().map(|k| format!("{}", k)).collect();
            format!("({})", parts.join(","))
        }
    }

    /// Inverse of [`Self::name`]; `"A0"` and `"fundamental"` always denote
    /// the fundamental alcove.
    pub fn parse(rs: &RootSystem, s: &str) -> Result<Self, Error> {
        let t = s.trim();
        if t == "fundamental" || t == "A0" {
            return Ok(Self::fundamental(rs));
        }
        let bad = || Error::Domain(format!("cannot parse alcove {:?}", s));
        let address: Vec<i64> = if let Some(rest) = t.strip_prefix('A') {
            vec![rest.parse().map_err(|_| bad())?]
        } else {
            let inner = t.trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
            inner.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
        };
        if address.len() != rs.num_positive() {
            return Err(bad());
        }
        let a = Alcove { address };
        if sample_point(rs, &a).is_none() {
            return Err(Error::Domain(format!("address {:?} is not realized by an alcove", s)));
        }
        Ok(a)
    }
}

/// The barycenter of the alcove's vertices, or `None` if the address is not
/// realizable.
pub fn sample_point(rs: &RootSystem, a: &Alcove) -> Option<Vec<Rational64>> {
    let r = rs.rank();
    let npos = rs.num_positive();
    // bounding hyperplanes ⟨λ,β∨⟩ = level
    let planes: Vec<(usize, i64)> = (0..npos).flat_map(|k| [(k, a.address[k]), (k, a.address[k] + 1)]).collect();
    let mut verts: Vec<Vec<Rational64>> = Vec::new();
    for combo in combinations(planes.len(), r) {
        let rows: Vec<(usize, i64)> = combo.iter().map(|&i| planes[i]).collect();
        if let Some(p) = solve_planes(rs, &rows) {
            let inside = (0..npos).all(|k| {
                let v = rs.pair_weight(&p, k);
                v >= Rational64::from_integer(a.address[k]) && v <= Rational64::from_integer(a.address[k] + 1)
            });
            if inside && !verts.contains(&p) {
                verts.push(p);
            }
        }
    }
    if verts.len() != r + 1 {
        return None;
    }
    let n = Rational64::from_integer(verts.len() as i64);
    let c: Vec<Rational64> = (0..r).map(|j| verts.iter().map(|v| v[j]).fold(Rational64::zero(), |x, y| x + y) / n).collect();
    let strict = (0..npos).all(|k| {
        let v = rs.pair_weight(&c, k);
        v > Rational64::from_integer(a.address[k]) && v < Rational64::from_integer(a.address[k] + 1)
    });
    strict.then_some(c)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn solve_planes(rs: &RootSystem, rows: &[(usize, i64)]) -> Option<Vec<Rational64>> {
    let r = rs.rank();
    let mut a: Vec<Vec<Rational64>> = rows
        .iter()
        .map(|&(k, lvl)| {
            let mut row: Vec<Rational64> = rs.coroots()[k].iter().map(|&c| Rational64::from_integer(c)).collect();
            row.push(Rational64::from_integer(lvl));
            row
        })
        .collect();
    for col in 0..r {
        let p = (col..r).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, p);
        let inv = Rational64::one() / a[col][col];
        for v in a[col].iter_mut() {
            *v *= inv;
        }
        for i in 0..r {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col];
                for j in 0..=r {
                    let t = a[col][j];
                    a[i][j] -= f * t;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[r]).collect())
}

fn address_of(rs: &RootSystem, p: &[Rational64]) -> Alcove {
    Alcove { address: (0..rs.num_positive()).map(|k| rs.pair_weight(p, k).floor().to_integer()).collect() }
}

/// `s_{β∨,n}(A)` for the positive coroot index `k`.
pub fn reflect_alcove(rs: &RootSystem, a: &Alcove, k: usize, n: i64) -> Alcove {
    let c = sample_point(rs, a).expect("alcove address must be realizable");
    address_of(rs, &rs.affine_reflect(&c, k, n))
}

/// `t_λ(A)` for `λ` in the root lattice, given in simple-root coordinates.
pub fn translate_alcove(rs: &RootSystem, a: &Alcove, lambda_roots: &[i64]) -> Alcove {
    let r = rs.rank();
    let address = (0..rs.num_positive())
        .map(|k| {
            // ⟨λ, β∨⟩ = Σ_i λ_i ⟨α_i, β∨⟩
            let shift: i64 = (0..r).map(|i| lambda_roots[i] * rs.pairing(i, k)).sum();
            a.address[k] + shift
        })
        .collect();
    Alcove { address }
}

/// Per-coordinate address bounds (inclusive).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AddressBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl AddressBox {
    pub fn uniform(rs: &RootSystem, lo: i64, hi: i64) -> Self {
        AddressBox { lo: vec![lo; rs.num_positive()], hi: vec![hi; rs.num_positive()] }
    }

    pub fn widened(&self, by: i64) -> Self {
        AddressBox { lo: self.lo.iter().map(|x| x - by).collect(), hi: self.hi.iter().map(|x| x + by).collect() }
    }

    pub fn contains(&self, a: &Alcove) -> bool {
        a.address.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (l, h))| l <= x && x <= h)
    }

    pub fn contains_box(&self, other: &AddressBox) -> bool {
        self.lo.iter().zip(&other.lo).all(|(a, b)| a <= b) && self.hi.iter().zip(&other.hi).all(|(a, b)| a >= b)
    }
}

/// All alcoves inside the box that are reachable from `start` by reflections
/// through walls while staying in the box (the box is convex, so this is all
/// of them when `start` lies in it).
pub fn enumerate_box(rs: &RootSystem, start: &Alcove, bx: &AddressBox) -> Vec<Alcove> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    if bx.contains(start) {
        seen.insert(start.clone());
        queue.push_back(start.clone());
    }
    while let Some(a) = queue.pop_front() {
        for k in 0..rs.num_positive() {
            for n in [a.address[k], a.address[k] + 1] {
                let b = reflect_alcove(rs, &a, k, n);
                if bx.contains(&b) && seen.insert(b.clone()) {
                    queue.push_back(b);
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// A finite piece of the generic Bruhat order above a base alcove.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub alcoves: Vec<Alcove>,
    pub order: Poset,
    pub base: usize,
    pub certified: bool,
}

impl Window {
    pub fn index_of(&self, a: &Alcove) -> Option<usize> {
        self.alcoves.iter().position(|b| b == a)
    }

    pub fn len(&self) -> usize {
        self.alcoves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alcoves.is_empty()
    }
}

/// Elementary relations `A ⪯ s_{β∨,n}A` (for `A ⊂ H^-_{β∨,n}`) among the given
/// alcoves, as index pairs.
fn elementary_relations(rs: &RootSystem, alcoves: &[Alcove], bx: &AddressBox) -> Vec<(usize, usize)> {
    let idx: BTreeMap<&Alcove, usize> = alcoves.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut rel = Vec::new();
    for (i, a) in alcoves.iter().enumerate() {
        for k in 0..rs.num_positive() {
            let kk = a.address[k];
            // the image has k-th address 2n − kk − 1, which must stay ≤ hi
            let top = (bx.hi[k] + kk + 1).div_euclid(2);
            for n in (kk + 1)..=top {
                let b = reflect_alcove(rs, a, k, n);
                if let Some(&j) = idx.get(&b) {
                    rel.push((i, j));
                }
            }
        }
    }
    rel
}

/// Builds `{A in box : w ⪯ A}` with the order generated inside `margin`, and
/// certifies that no interval of the window leaves the box.
pub fn build_window_order(rs: &RootSystem, w: &Alcove, bx: &AddressBox, margin: &AddressBox) -> Result<Window, Error> {
    if !bx.contains(w) || sample_point(rs, w).is_none() {
        return Err(Error::WNotInBox);
    }
    if !margin.contains_box(bx) {
        return Err(Error::Precondition("margin must contain the box".into()));
    }
    let all = enumerate_box(rs, w, margin);
    let n = all.len();
    let rel = elementary_relations(rs, &all, margin);
    let mut up: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut down: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &rel {
        up[a].push(b);
        down[b].push(a);
    }
    let wi = all.iter().position(|a| a == w).unwrap();
    let above_w = reach(&up, wi, n);
    let members: Vec<usize> = (0..n).filter(|&i| above_w[i] && bx.contains(&all[i])).collect();
    // certificate: one-step predecessors above w stay in the box
    for &x in &members {
        for &y in &down[x] {
            if above_w[y] && !bx.contains(&all[y]) {
                return Err(Error::ClosureUncertified(format!(
                    "{} lies between {} and {} but outside the box",
                    all[y].name(),
                    w.name(),
                    all[x].name()
                )));
            }
        }
    }
    let mut relations = Vec::new();
    for (p, &i) in members.iter().enumerate() {
        let r = reach(&up, i, n);
        for (q, &j) in members.iter().enumerate() {
            if p != q && r[j] {
                relations.push((p, q));
            }
        }
    }
    let order = Poset::from_relations(members.len(), &relations)?;
    let alcoves: Vec<Alcove> = members.iter().map(|&i| all[i].clone()).collect();
    let base = alcoves.iter().position(|a| a == w).unwrap();
    Ok(Window { alcoves, order, base, certified: true })
}

fn reach(adj: &[Vec<usize>], start: usize, n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// The periodic moment graph restricted to a window, the root-lattice
/// translations as partial permutations, and the map onto the finite Weyl
/// group's reflection graph.
#[derive(Clone, Debug)]
pub struct PeriodicData {
    pub graph: MomentGraph,
    pub action: GroupAction,
    pub weyl: WeylGroup,
    pub quotient: QuotientData,
}

/// Finite Weyl element `x` with `A ∈ ℤR + x(A_0)`.
pub fn orbit_of(rs: &RootSystem, weyl: &WeylGroup, a: &Alcove) -> usize {
    let c0 = sample_point(rs, &Alcove::fundamental(rs)).unwrap();
    let frac = |v: Vec<Rational64>| -> Vec<Rational64> { v.into_iter().map(|x| x - x.floor()).collect() };
    let target = frac(rs.weight_to_root_coords(&sample_point(rs, a).expect("realizable alcove")));
    (0..weyl.len())
        .find(|&x| frac(rs.weight_to_root_coords(&weyl.act(x, &c0))) == target)
        .expect("alcoves form a single affine Weyl group orbit")
}

pub fn periodic_quotient(rs: &RootSystem, window: &Window) -> PeriodicData {
    let idx: BTreeMap<&Alcove, usize> = window.alcoves.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut edges = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, a) in window.alcoves.iter().enumerate() {
        for (j, b) in window.alcoves.iter().enumerate() {
            if i >= j {
                continue;
            }
            for k in 0..rs.num_positive() {
                // B = s_{β∨,n}A forces n = (k_A + k_B + 1)/2
                let s = a.address[k] + b.address[k] + 1;
                if s % 2 != 0 {
                    continue;
                }
                if reflect_alcove(rs, a, k, s / 2) == *b && seen.insert((i, j)) {
                    edges.push(Edge { u: i, v: j, label: Label::new(rs.coroots()[k].clone()).unwrap() });
                }
            }
        }
    }
    let names = window.alcoves.iter().map(|a| a.name()).collect();
    let graph = MomentGraph::new(rs.rank(), names, edges, Some(window.order.clone()));
    let generators = (0..rs.rank())
        .map(|i| {
            let lambda: Vec<i64> = (0..rs.rank()).map(|j| i64::from(i == j)).collect();
            window.alcoves.iter().map(|a| idx.get(&translate_alcove(rs, a, &lambda)).copied()).collect()
        })
        .collect();
    let weyl = WeylGroup::new(rs);
    let orbit_map: Vec<usize> = window.alcoves.iter().map(|a| orbit_of(rs, &weyl, a)).collect();
    let full = weyl.reflection_graph();
    let quotient = QuotientData { quotient: full, orbit_map };
    PeriodicData { graph, action: GroupAction { generators }, weyl, quotient }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_counts_and_pairing() {
        for (t, n) in [(CartanType::A1, 2), (CartanType::A2, 6), (CartanType::B2, 8), (CartanType::G2, 12), (CartanType::A3, 12)] {
            let rs = RootSystem::new(t);
            assert_eq!(rs.roots().len(), n, "{}", t);
            for k in 0..n {
                assert_eq!(rs.pairing(k, k), 2);
            }
        }
        assert_eq!(RootSystem::new(CartanType::A2).num_positive(), 3);
    }

    #[test]
    fn weyl_group_sizes_and_names() {
        let rs = RootSystem::new(CartanType::A3);
        let w = WeylGroup::new(&rs);
        assert_eq!(w.len(), 24);
        assert_eq!(w.length(w.longest()), 6);
        let x = w.parse("s2s1s3s2").unwrap();
        assert_eq!(w.name(x), "s2s1s3s2");
        assert_eq!(w.length(x), 4);
        // s1s3 = s3s1, named by the smaller word
        assert_eq!(w.name(w.parse("s3s1").unwrap()), "s1s3");
        assert_eq!(WeylGroup::new(&RootSystem::new(CartanType::G2)).len(), 12);
    }

    #[test]
    fn a1_reflections_and_translations() {
        let rs = RootSystem::new(CartanType::A1);
        let a0 = Alcove::fundamental(&rs);
        assert_eq!(reflect_alcove(&rs, &a0, 0, 1).address, vec![1]);
        assert_eq!(reflect_alcove(&rs, &a0, 0, 0).address, vec![-1]);
        assert_eq!(translate_alcove(&rs, &a0, &[1]).address, vec![2]);
        assert_eq!(translate_alcove(&rs, &a0, &[0]), a0);
    }

    #[test]
    fn a1_window_is_a_chain() {
        let rs = RootSystem::new(CartanType::A1);
        let a0 = Alcove::fundamental(&rs);
        let bx = AddressBox::uniform(&rs, -4, 8);
        let w = build_window_order(&rs, &a0, &bx, &bx.widened(2)).unwrap();
        assert_eq!(w.len(), 9);
        for i in 0..9 {
            for j in 0..9 {
                let (ai, aj) = (w.alcoves[i].address[0], w.alcoves[j].address[0]);
                assert_eq!(w.order.leq(i, j), ai <= aj);
            }
        }
        let single = AddressBox::uniform(&rs, 0, 0);
        let w = build_window_order(&rs, &a0, &single, &single.widened(1)).unwrap();
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn a2_covers_at_fundamental_alcove() {
        let rs = RootSystem::new(CartanType::A2);
        let a0 = Alcove::fundamental(&rs);
        let bx = AddressBox::uniform(&rs, -1, 2);
        let w = build_window_order(&rs, &a0, &bx, &bx.widened(2)).unwrap();
        assert_eq!(w.len(), 15);
        assert_eq!(w.order.minima(&(0..w.len()).collect()), vec![w.base]);
        let ups: Vec<usize> = w.order.covers().into_iter().filter(|c| c.0 == w.base).map(|c| c.1).collect();
        assert_eq!(ups.len(), 3);
        // each cover is a reflection of w across a hyperplane w lies below
        for u in ups {
            let target = &w.alcoves[u];
            let hit = (0..3).any(|k| (1..4).any(|n| reflect_alcove(&rs, &a0, k, n) == *target));
            assert!(hit, "{}", target.name());
        }
        let bigger = AddressBox::uniform(&rs, -2, 3);
        assert!(matches!(build_window_order(&rs, &a0, &bigger, &bigger.widened(2)), Err(Error::ClosureUncertified(_))));
    }

    #[test]
    fn periodic_quotient_a1() {
        let rs = RootSystem::new(CartanType::A1);
        let a0 = Alcove::fundamental(&rs);
        let bx = AddressBox::uniform(&rs, 0, 3);
        let win = build_window_order(&rs, &a0, &bx, &bx.widened(2)).unwrap();
        let pd = periodic_quotient(&rs, &win);
        for (i, a) in win.alcoves.iter().enumerate() {
            let orbit = pd.quotient.orbit_map[i];
            assert_eq!(pd.weyl.name(orbit) == "e", a.address[0] % 2 == 0);
        }
        assert_eq!(pd.quotient.quotient.edges().len(), 1);
        assert!(pd.graph.validate().is_empty());
        let q = pd.graph.quotient_by_action(&pd.action).unwrap();
        assert_eq!(q.quotient.num_vertices(), 2);
        assert_eq!(q.quotient.edges().len(), 1);
    }

    #[test]
    fn periodic_quotient_a2_touches_all_orbits() {
        let rs = RootSystem::new(CartanType::A2);
        let a0 = Alcove::fundamental(&rs);
        let bx = AddressBox::uniform(&rs, -1, 2);
        let win = build_window_order(&rs, &a0, &bx, &bx.widened(2)).unwrap();
        let pd = periodic_quotient(&rs, &win);
        assert!(pd.graph.validate().is_empty());
        assert_eq!(pd.quotient.quotient.num_vertices(), 6);
        assert_eq!(pd.quotient.quotient.edges().len(), 9);
        let touched: BTreeSet<usize> = pd.quotient.orbit_map.iter().copied().collect();
        assert_eq!(touched.len(), 6);
        assert!(pd.graph.check_action(&pd.action).is_ok());
        // translation-invariant orbit map
        for (i, img) in pd.action.generators[0].iter().enumerate() {
            if let Some(j) = img {
                assert_eq!(pd.quotient.orbit_map[i], pd.quotient.orbit_map[*j]);
            }
        }
    }
}
