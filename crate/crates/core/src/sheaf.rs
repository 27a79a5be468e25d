//! Cofiltered sheaves on a moment graph quotient and the Braden-MacPherson
//! construction.
//!
//! A stalk family `ℬ^Ω` only changes at points of the orbit `Ω` and an edge
//! family `ℬ^E` only at points of its two end orbits, so each family is held
//! at those points alone (see [`crate::cofiltered`]). The maps `ρ_{Ω,E}` are
//! stored at each point `z` of `E` as maps from `ℬ^{Ω,≤z}` to `ℬ^{E,≤z}`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::alcove::{PeriodicData, Window, WeylGroup};
use crate::cofiltered::{limit, restrict_limit, Diagram, Limit};
use crate::field::Field;
use crate::graded::{DegreewiseModule, GradedMap, RankPolynomial, DEFAULT_GUARD};
use crate::graph::MomentGraph;
use crate::linalg::{Matrix, Subspace};
use crate::order::Poset;
use crate::Error;

/// The index poset and the quotient it maps to.
#[derive(Clone, Debug)]
pub struct SheafWindow {
    /// Order on window vertices; open sets are downward closed.
    pub order: Poset,
    pub names: Vec<String>,
    /// Window vertex to quotient vertex.
    pub orbit_map: Vec<usize>,
    pub quotient: MomentGraph,
    /// Keys for the linear extension used by the construction.
    pub keys: Vec<Vec<i64>>,
}

impl SheafWindow {
    pub fn new(order: Poset, names: Vec<String>, orbit_map: Vec<usize>, quotient: MomentGraph) -> Result<Self, Error> {
        let n = order.len();
        if names.len() != n || orbit_map.len() != n {
            return Err(Error::Precondition(String::from("window data has inconsistent lengths")));
        }
        if let Some(&o) = orbit_map.iter().find(|&&o| o >= quotient.num_vertices()) {
            return Err(Error::Precondition(format!("orbit {} is not a quotient vertex", o)));
        }
        let keys = (0..n).map(|x| alloc::vec![x as i64]).collect();
        Ok(SheafWindow { order, names, orbit_map, quotient, keys })
    }

    /// Finite Weyl group with trivial action. The sheaf order is the reverse
    /// Bruhat order, so `ℬ(w)` lives on `{x ≤ w}` in the Bruhat sense.
    pub fn classical(weyl: &WeylGroup) -> Self {
        let n = weyl.len();
        let graph = weyl.reflection_graph();
        let names = graph.names().to_vec();
        let order = weyl.bruhat_order().reversed();
        let mut s = Self::new(order, names, (0..n).collect(), graph).expect("consistent");
        s.keys = (0..n).map(|x| alloc::vec![x as i64]).collect();
        s
    }

    /// Alcove window with the periodic quotient; the extension key is the
    /// alcove address.
    pub fn periodic(window: &Window, pd: &PeriodicData) -> Self {
        let names = window.alcoves.iter().map(|a| a.name()).collect();
        let mut s = Self::new(window.order.clone(), names, pd.quotient.orbit_map.clone(), pd.quotient.quotient.clone())
            .expect("consistent");
        s.keys = window.alcoves.iter().map(|a| a.address.clone()).collect();
        s
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Window vertices lying over each quotient vertex.
    pub fn fibers(&self) -> Vec<BTreeSet<usize>> {
        let mut out = alloc::vec![BTreeSet::new(); self.quotient.num_vertices()];
        for (x, &o) in self.orbit_map.iter().enumerate() {
            out[o].insert(x);
        }
        out
    }
}

/// Which linear extension of `{≥ w}` the construction follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExtensionOrder {
    /// Among available vertices take the smallest key.
    #[default]
    Lexicographic,
    /// Among available vertices take the largest key.
    ReverseLexicographic,
}

/// A family of modules held at its points.
#[derive(Debug)]
pub struct Family<F: Field> {
    points: BTreeSet<usize>,
    modules: BTreeMap<usize, DegreewiseModule<F>>,
    res: BTreeMap<(usize, usize), GradedMap<F>>,
    cache: RefCell<BTreeMap<Vec<usize>, Rc<Limit<F>>>>,
}

impl<F: Field> Clone for Family<F> {
    fn clone(&self) -> Self {
        Family {
            points: self.points.clone(),
            modules: self.modules.clone(),
            res: self.res.clone(),
            cache: RefCell::new(BTreeMap::new()),
        }
    }
}

impl<F: Field> Family<F> {
    fn new() -> Self {
        Family { points: BTreeSet::new(), modules: BTreeMap::new(), res: BTreeMap::new(), cache: RefCell::new(BTreeMap::new()) }
    }

    pub fn points(&self) -> &BTreeSet<usize> {
        &self.points
    }

    pub fn module(&self, x: usize) -> Option<&DegreewiseModule<F>> {
        self.modules.get(&x)
    }
}

struct View<'a, F: Field> {
    field: &'a F,
    nvars: usize,
    cutoff: i64,
    order: &'a Poset,
    fam: &'a Family<F>,
}

impl<F: Field> Diagram<F> for View<'_, F> {
    fn field(&self) -> &F {
        self.field
    }
    fn nvars(&self) -> usize {
        self.nvars
    }
    fn cutoff(&self) -> i64 {
        self.cutoff
    }
    fn order(&self) -> &Poset {
        self.order
    }
    fn is_point(&self, x: usize) -> bool {
        self.fam.points.contains(&x)
    }
    fn point_module(&self, x: usize) -> &DegreewiseModule<F> {
        &self.fam.modules[&x]
    }
    fn point_restriction(&self, x: usize, y: usize) -> GradedMap<F> {
        if x == y {
            GradedMap::identity(&self.fam.modules[&x])
        } else {
            self.fam.res[&(x, y)].clone()
        }
    }
}

impl<F: Field> View<'_, F> {
    fn limit(&self, set: &BTreeSet<usize>) -> Rc<Limit<F>> {
        let pts: BTreeSet<usize> = set.iter().copied().filter(|x| self.fam.points.contains(x)).collect();
        let key = self.order.maxima(&pts);
        if let Some(l) = self.fam.cache.borrow().get(&key) {
            return l.clone();
        }
        let l = Rc::new(limit(self, &pts));
        self.fam.cache.borrow_mut().insert(key, l.clone());
        l
    }

    fn at(&self, z: usize) -> Rc<Limit<F>> {
        self.limit(&self.order.down_set(z))
    }

    fn below(&self, z: usize) -> Rc<Limit<F>> {
        self.limit(&self.order.strict_down_set(z))
    }

    /// Adds point `z` with `M^{≤z} → M^{<z}` given, recording restrictions
    /// to every lower point.
    fn add_point(fam: &mut Family<F>, field: &F, order: &Poset, z: usize, module: DegreewiseModule<F>, lower: &Limit<F>, to_lower: &GradedMap<F>) {
        let mut new_res = BTreeMap::new();
        for &y in &fam.points {
            if !order.lt(y, z) {
                continue;
            }
            let i = lower.maxima.iter().position(|&a| order.leq(y, a)).expect("lower point lies under a maximum");
            let a = lower.maxima[i];
            let step = lower.project(i).compose(field, to_lower);
            let r = if a == y { step } else { fam.res[&(a, y)].compose(field, &step) };
            new_res.insert((z, y), r);
        }
        fam.res.extend(new_res);
        fam.points.insert(z);
        fam.modules.insert(z, module);
    }
}

/// Sections over an open set, embedded in the sum of the stalk limits.
#[derive(Clone, Debug)]
pub struct Sections<F: Field> {
    pub set: BTreeSet<usize>,
    pub module: DegreewiseModule<F>,
    /// `Γ → ⊕_Ω (ℬ^Ω)^J`.
    pub incl: GradedMap<F>,
    pub limits: Vec<Rc<Limit<F>>>,
    offsets: Vec<Vec<usize>>,
    subspaces: Vec<Subspace<F>>,
}

impl<F: Field> Sections<F> {
    /// `Γ(J) → (ℬ^Ω)^J`.
    pub fn projection(&self, orbit: usize) -> GradedMap<F> {
        let offs: Vec<usize> = self.offsets.iter().map(|o| o[orbit]).collect();
        let lens: Vec<usize> = self.limits[orbit].module.dims().to_vec();
        self.incl.row_block(&offs, &lens)
    }

    /// Factors a map into `⊕_Ω (ℬ^Ω)^J`, assumed to land in `Γ(J)`.
    pub fn coords_of(&self, f: &F, into: &GradedMap<F>) -> GradedMap<F> {
        let blocks = self
            .subspaces
            .iter()
            .enumerate()
            .map(|(j, s)| s.coord_matrix(f).mul(f, into.block(j)))
            .collect();
        GradedMap::from_blocks(0, blocks)
    }

    /// Per-orbit offsets of the ambient sum, by half-degree.
    pub fn offsets(&self) -> &[Vec<usize>] {
        &self.offsets
    }
}

/// A cofiltered sheaf on the quotient graph over a window.
#[derive(Clone, Debug)]
pub struct CofilteredSheaf<F: Field> {
    field: F,
    nvars: usize,
    cutoff: i64,
    window: SheafWindow,
    stalks: Vec<Family<F>>,
    edges: Vec<Family<F>>,
    /// `(edge, z) ↦ [ρ from the u end, ρ from the v end]`.
    rho: BTreeMap<(usize, usize), [GradedMap<F>; 2]>,
    base: usize,
    ranks: BTreeMap<usize, RankPolynomial>,
}

impl<F: Field> CofilteredSheaf<F> {
    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn window(&self) -> &SheafWindow {
        &self.window
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn stalk_family(&self, orbit: usize) -> &Family<F> {
        &self.stalks[orbit]
    }

    pub fn edge_family(&self, edge: usize) -> &Family<F> {
        &self.edges[edge]
    }

    fn stalk_view(&self, orbit: usize) -> View<'_, F> {
        View { field: &self.field, nvars: self.nvars, cutoff: self.cutoff, order: &self.window.order, fam: &self.stalks[orbit] }
    }

    fn edge_view(&self, edge: usize) -> View<'_, F> {
        View { field: &self.field, nvars: self.nvars, cutoff: self.cutoff, order: &self.window.order, fam: &self.edges[edge] }
    }

    /// `ℬ^{Ω,≤z}`.
    pub fn stalk_at(&self, orbit: usize, z: usize) -> Rc<Limit<F>> {
        self.stalk_view(orbit).at(z)
    }

    /// `ℬ^{Ω,<z}`.
    pub fn stalk_below(&self, orbit: usize, z: usize) -> Rc<Limit<F>> {
        self.stalk_view(orbit).below(z)
    }

    /// `ℬ^{Ω,J}`.
    pub fn stalk_limit(&self, orbit: usize, set: &BTreeSet<usize>) -> Rc<Limit<F>> {
        self.stalk_view(orbit).limit(set)
    }

    /// `ℬ^{E,≤z}`.
    pub fn edge_at(&self, edge: usize, z: usize) -> Rc<Limit<F>> {
        self.edge_view(edge).at(z)
    }

    pub fn edge_below(&self, edge: usize, z: usize) -> Rc<Limit<F>> {
        self.edge_view(edge).below(z)
    }

    /// Restriction `ℬ^{Ω,J} → ℬ^{Ω,K}` for `K ⊆ J`.
    pub fn restrict_stalk(&self, orbit: usize, from: &Limit<F>, to: &Limit<F>) -> GradedMap<F> {
        restrict_limit(&self.stalk_view(orbit), from, to)
    }

    pub fn restrict_edge(&self, edge: usize, from: &Limit<F>, to: &Limit<F>) -> GradedMap<F> {
        restrict_limit(&self.edge_view(edge), from, to)
    }

    /// `ρ^{≤z}_{Ω,E}` at a point `z` of `E`, where `Ω` is an end of `E`.
    pub fn rho_at(&self, edge: usize, orbit: usize, z: usize) -> Option<&GradedMap<F>> {
        let e = &self.window.quotient.edges()[edge];
        let side = if e.u == orbit { 0 } else if e.v == orbit { 1 } else { return None };
        self.rho.get(&(edge, z)).map(|r| &r[side])
    }

    /// `ρ^J_{Ω,E}` between limits over `J`, read off at the maximal points
    /// of `E` inside `J`.
    pub fn rho_on(&self, edge: usize, orbit: usize, src: &Limit<F>, dst: &Limit<F>) -> GradedMap<F> {
        let f = &self.field;
        let parts: Vec<GradedMap<F>> = dst
            .maxima
            .iter()
            .map(|&e| {
                let target = self.stalk_at(orbit, e);
                let r = self.restrict_stalk(orbit, src, &target);
                self.rho_at(edge, orbit, e).expect("edge point carries ρ").compose(f, &r)
            })
            .collect();
        let refs: Vec<&GradedMap<F>> = parts.iter().collect();
        dst.coords_of(f, &GradedMap::stack_rows(f, src.module.dims(), &refs))
    }

    /// Rank polynomial of the stalk `ℬ^{Ω,≤x}` at a point `x` of `Ω`.
    pub fn stalk_rank(&self, x: usize) -> RankPolynomial {
        self.ranks.get(&x).cloned().unwrap_or_default()
    }

    /// Sections `Γ(J)` over an open set.
    pub fn sections(&self, set: &BTreeSet<usize>) -> Result<Sections<F>, Error> {
        if !self.window.order.is_open(set) {
            return Err(Error::NotOpen(format!("{:?}", set.iter().map(|&x| self.window.names[x].as_str()).collect::<Vec<_>>())));
        }
        Ok(self.sections_unchecked(set))
    }

    fn sections_unchecked(&self, set: &BTreeSet<usize>) -> Sections<F> {
        let f = &self.field;
        let slots = (self.cutoff / 2 + 1) as usize;
        let limits: Vec<Rc<Limit<F>>> = (0..self.stalks.len()).map(|o| self.stalk_limit(o, set)).collect();
        let mut offsets = alloc::vec![Vec::with_capacity(limits.len()); slots];
        let mut total = alloc::vec![0usize; slots];
        for l in &limits {
            for j in 0..slots {
                offsets[j].push(total[j]);
                total[j] += l.module.dims()[j];
            }
        }
        let mods: Vec<&DegreewiseModule<F>> = limits.iter().map(|l| &l.module).collect();
        let ambient = DegreewiseModule::direct_sum(f, self.nvars, self.cutoff, &mods);
        let mut rows: Vec<Vec<Matrix<F>>> = alloc::vec![Vec::new(); slots];
        for (ei, e) in self.window.quotient.edges().iter().enumerate() {
            if limits[e.u].module.is_zero() && limits[e.v].module.is_zero() {
                continue;
            }
            let view = self.edge_view(ei);
            let pts: BTreeSet<usize> = set.iter().copied().filter(|x| view.is_point(*x)).collect();
            for z in self.window.order.maxima(&pts) {
                let mut pieces = Vec::with_capacity(2);
                for (side, o) in [(0usize, e.u), (1usize, e.v)] {
                    let target = self.stalk_at(o, z);
                    let r = self.restrict_stalk(o, &limits[o], &target);
                    let m = self.rho.get(&(ei, z)).expect("edge point carries ρ")[side].compose(f, &r);
                    pieces.push((o, m));
                }
                for j in 0..slots {
                    let nrows = pieces[0].1.block(j).rows();
                    let mut m = Matrix::zeros(f, nrows, total[j]);
                    m.paste(pieces[0].1.block(j), 0, offsets[j][pieces[0].0]);
                    m.paste(&pieces[1].1.block(j).scale(f, &f.from_i64(-1)), 0, offsets[j][pieces[1].0]);
                    rows[j].push(m);
                }
            }
        }
        let subs: Vec<Subspace<F>> = (0..slots)
            .map(|j| {
                if rows[j].is_empty() {
                    Subspace::full(f, total[j])
                } else {
                    let refs: Vec<&Matrix<F>> = rows[j].iter().collect();
                    Subspace::kernel_of(f, &Matrix::vstack(f, total[j], &refs))
                }
            })
            .collect();
        let (module, incl) = ambient.submodule(&subs);
        Sections { set: set.clone(), module, incl, limits, offsets, subspaces: subs }
    }

    /// `u_z : Γ(<z) → T_z` where `T_z = (⊕_{E ∋ Θ} ℬ^{E,≤z}) ⊕ ℬ^{Θ,<z}`,
    /// with the summands of `T_z` listed edge by edge, then `ℬ^{Θ,<z}`.
    pub fn u_map(&self, z: usize) -> UMap<F> {
        let f = &self.field;
        let theta = self.window.orbit_map[z];
        let gamma = self.sections_unchecked(&self.window.order.strict_down_set(z));
        let mut parts = Vec::new();
        let mut summands = Vec::new();
        let incident = self.window.quotient.incident(theta);
        for &ei in &incident {
            let e = &self.window.quotient.edges()[ei];
            let other = e.other(theta);
            let (q, qmap) = gamma.limits[other].module.quotient_by_form(e.label.coords());
            parts.push(qmap.compose(f, &gamma.projection(other)));
            summands.push(q);
        }
        parts.push(gamma.projection(theta));
        summands.push(gamma.limits[theta].module.clone());
        let refs: Vec<&GradedMap<F>> = parts.iter().collect();
        let map = GradedMap::stack_rows(f, gamma.module.dims(), &refs);
        let srefs: Vec<&DegreewiseModule<F>> = summands.iter().collect();
        let target = DegreewiseModule::direct_sum(f, self.nvars, self.cutoff, &srefs);
        UMap { edges: incident, summands, target, map, sections: gamma }
    }

    /// `d_z : ℬ^{Θ,≤z} → T_z` for a point `z` of its own orbit.
    pub fn d_map(&self, z: usize) -> GradedMap<F> {
        let f = &self.field;
        let theta = self.window.orbit_map[z];
        let at = self.stalk_at(theta, z);
        let mut parts: Vec<GradedMap<F>> = Vec::new();
        for ei in self.window.quotient.incident(theta) {
            parts.push(self.rho_at(ei, theta, z).expect("edge point carries ρ").clone());
        }
        let below = self.stalk_below(theta, z);
        parts.push(self.restrict_stalk(theta, &at, &below));
        let refs: Vec<&GradedMap<F>> = parts.iter().collect();
        GradedMap::stack_rows(f, at.module.dims(), &refs)
    }
}

impl<F: Field> CofilteredSheaf<F> {
    /// Replaces `ρ^{≤z}_{Ω,E}` by zero. Used to build negative fixtures.
    pub fn mutate_zero_rho(&mut self, edge: usize, orbit: usize, z: usize) -> Result<(), Error> {
        let e = self.window.quotient.edges().get(edge).ok_or_else(|| Error::Precondition(format!("no edge {}", edge)))?;
        let side = if e.u == orbit {
            0
        } else if e.v == orbit {
            1
        } else {
            return Err(Error::Precondition(format!("orbit {} is not an end of edge {}", orbit, edge)));
        };
        let r = self.rho.get_mut(&(edge, z)).ok_or_else(|| Error::Precondition(format!("vertex {} is not a point of edge {}", z, edge)))?;
        let f = self.field.clone();
        r[side] = r[side].scale(&f, &f.zero());
        Ok(())
    }

    /// Removes generator `g` from the stalk at `z`, which must have no point
    /// of any family above it. Used to build negative fixtures.
    pub fn mutate_delete_generator(&mut self, z: usize, g: usize) -> Result<(), Error> {
        let f = self.field.clone();
        let order = &self.window.order;
        let above = self.stalks.iter().chain(&self.edges).any(|fam| fam.points.iter().any(|&x| order.lt(z, x)));
        if above {
            return Err(Error::Precondition(format!("vertex {} is not maximal among built points", z)));
        }
        let theta = self.window.orbit_map[z];
        let p = self.stalks[theta].modules.get(&z).ok_or_else(|| Error::Precondition(format!("vertex {} carries no stalk", z)))?;
        let mut degrees: Vec<i64> = Vec::new();
        for (&e, &c) in self.ranks[&z].coefficients() {
            for _ in 0..c {
                degrees.push(2 * e);
            }
        }
        if g >= degrees.len() {
            return Err(Error::Precondition(format!("stalk at {} has only {} generators", z, degrees.len())));
        }
        // basis of a free module is generator-major in every degree
        let slots = p.slots();
        let mut keep: Vec<Vec<usize>> = alloc::vec![Vec::new(); slots];
        for (j, kj) in keep.iter_mut().enumerate() {
            let mut pos = 0;
            for (k, &d) in degrees.iter().enumerate() {
                let n = if d <= 2 * j as i64 { crate::graded::sym_component_dim(self.nvars, 2 * j as i64 - d)? } else { 0 };
                if k != g {
                    kj.extend(pos..pos + n);
                }
                pos += n;
            }
        }
        let incl = GradedMap::from_blocks(0, keep.iter().enumerate().map(|(j, k)| Matrix::identity(&f, p.dims()[j]).select_cols(k)).collect());
        degrees.remove(g);
        let smaller = DegreewiseModule::free(&f, self.nvars, self.cutoff, &degrees);
        let fam = &mut self.stalks[theta];
        for ((x, _), r) in fam.res.iter_mut() {
            if *x == z {
                *r = r.compose(&f, &incl);
            }
        }
        fam.modules.insert(z, smaller);
        fam.cache.borrow_mut().clear();
        let edges = self.window.quotient.edges();
        for ((ei, x), pair) in self.rho.iter_mut() {
            if *x == z {
                let side = if edges[*ei].u == theta { 0 } else { 1 };
                pair[side] = pair[side].compose(&f, &incl);
            }
        }
        for ei in self.window.quotient.incident(theta) {
            self.edges[ei].cache.borrow_mut().clear();
        }
        self.ranks.insert(z, RankPolynomial::from_degrees(&degrees));
        Ok(())
    }
}

/// Result of [`CofilteredSheaf::u_map`].
#[derive(Clone, Debug)]
pub struct UMap<F: Field> {
    pub edges: Vec<usize>,
    pub summands: Vec<DegreewiseModule<F>>,
    pub target: DegreewiseModule<F>,
    pub map: GradedMap<F>,
    pub sections: Sections<F>,
}

/// Builds `ℬ(w)` on the window by the inductive construction along a linear
/// extension of `{≥ w}`. Every vertex outside `{≥ w}` carries zero.
pub fn bm_build<F: Field>(
    field: &F,
    window: &SheafWindow,
    w: usize,
    cutoff: i64,
    ext: ExtensionOrder,
) -> Result<CofilteredSheaf<F>, Error> {
    if w >= window.len() {
        return Err(Error::Precondition(format!("base vertex {} outside the window", w)));
    }
    if cutoff < 0 || cutoff % 2 != 0 {
        return Err(Error::Domain(format!("cutoff {} must be a nonnegative even integer", cutoff)));
    }
    let nvars = window.quotient.rank();
    let quotient = &window.quotient;
    let mut sheaf = CofilteredSheaf {
        field: field.clone(),
        nvars,
        cutoff,
        window: window.clone(),
        stalks: (0..quotient.num_vertices()).map(|_| Family::new()).collect(),
        edges: (0..quotient.edges().len()).map(|_| Family::new()).collect(),
        rho: BTreeMap::new(),
        base: w,
        ranks: BTreeMap::new(),
    };
    let up = window.order.up_set(w);
    let sub: Vec<usize> = up.iter().copied().collect();
    let induced = window.order.induced(&sub);
    let seq: Vec<usize> = match ext {
        ExtensionOrder::Lexicographic => induced.linear_extension_ascending(|i| window.keys[sub[i]].clone()),
        ExtensionOrder::ReverseLexicographic => {
            induced.linear_extension_ascending(|i| core::cmp::Reverse(window.keys[sub[i]].clone()))
        }
    }
    .into_iter()
    .map(|i| sub[i])
    .collect();
    for z in seq {
        step(&mut sheaf, z)?;
    }
    Ok(sheaf)
}

fn step<F: Field>(sheaf: &mut CofilteredSheaf<F>, z: usize) -> Result<(), Error> {
    let f = sheaf.field.clone();
    let theta = sheaf.window.orbit_map[z];
    let u = sheaf.u_map(z);
    // ℬ^{Θ,≤z} is the projective cover of im u_z, or S at the base
    let (cover_module, cover_map, degrees) = if z == sheaf.base {
        let s = DegreewiseModule::ring(&f, sheaf.nvars, sheaf.cutoff);
        let zero = GradedMap::zero(&s, &u.target);
        (s, zero, alloc::vec![0])
    } else {
        let (delta, incl) = u.map.image(&u.target);
        let pc = delta.projective_cover(DEFAULT_GUARD)?;
        let m = incl.compose(&f, &pc.map);
        (pc.free, m, pc.generator_degrees)
    };
    let slots = cover_module.slots();
    let mut offset = alloc::vec![0usize; slots];
    let mut comps = Vec::with_capacity(u.summands.len());
    for s in &u.summands {
        let lens = s.dims().to_vec();
        comps.push(cover_map.row_block(&offset, &lens));
        for j in 0..slots {
            offset[j] += lens[j];
        }
    }
    let below_theta = u.sections.limits[theta].clone();
    let to_lower = comps.pop().unwrap();
    View::add_point(&mut sheaf.stalks[theta], &f, &sheaf.window.order, z, cover_module, &below_theta, &to_lower);
    sheaf.ranks.insert(z, RankPolynomial::from_degrees(&degrees));
    for (k, &ei) in u.edges.iter().enumerate() {
        let e = sheaf.window.quotient.edges()[ei].clone();
        let other = e.other(theta);
        let l_other = u.sections.limits[other].clone();
        let alpha = l_other.module.form_image(e.label.coords());
        let (q, qmap) = l_other.module.quotient(&alpha);
        // restriction ℬ^{E,≤z} → ℬ^{E,<z} induced by ρ^{<z}_{Ω,E}
        let below_e = sheaf.edge_below(ei, z);
        let rho_below = sheaf.rho_on(ei, other, &l_other, &below_e);
        let blocks = (0..slots).map(|j| rho_below.block(j).select_cols(&alpha[j].non_pivots())).collect();
        let to_lower_e = GradedMap::from_blocks(0, blocks);
        debug_assert!(
            (0..slots).all(|j| alpha[j].dim() == 0 || {
                let a = alpha[j].inclusion_matrix();
                rho_below.block(j).mul(&f, &a).is_zero(&f)
            }),
            "ρ below does not vanish on α"
        );
        View::add_point(&mut sheaf.edges[ei], &f, &sheaf.window.order, z, q, &below_e, &to_lower_e);
        let from_theta = comps[k].clone();
        let pair = if e.u == theta { [from_theta, qmap] } else { [qmap, from_theta] };
        sheaf.rho.insert((ei, z), pair);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alcove::{CartanType, RootSystem};
    use alloc::string::ToString;
    use crate::field::Rationals;

    #[test]
    fn classical_s3_longest_all_ones() {
        let rs = RootSystem::new(CartanType::A2);
        let weyl = WeylGroup::new(&rs);
        let win = SheafWindow::classical(&weyl);
        let b = bm_build(&Rationals, &win, weyl.longest(), 6, ExtensionOrder::Lexicographic).unwrap();
        for x in 0..weyl.len() {
            assert_eq!(b.stalk_rank(x), RankPolynomial::one(), "{}", weyl.name(x));
        }
    }

    #[test]
    fn classical_s3_reflection_is_one() {
        let rs = RootSystem::new(CartanType::A2);
        let weyl = WeylGroup::new(&rs);
        let win = SheafWindow::classical(&weyl);
        let w = weyl.parse("s1s2").unwrap();
        let b = bm_build(&Rationals, &win, w, 6, ExtensionOrder::Lexicographic).unwrap();
        let support: Vec<usize> = (0..weyl.len()).filter(|&x| !b.stalk_rank(x).is_zero()).collect();
        assert_eq!(support.len(), 4);
    }

    #[test]
    fn classical_s4_singular_point() {
        let rs = RootSystem::new(CartanType::A3);
        let weyl = WeylGroup::new(&rs);
        let win = SheafWindow::classical(&weyl);
        let w = weyl.parse("s2s1s3s2").unwrap();
        let b = bm_build(&Rationals, &win, w, 8, ExtensionOrder::Lexicographic).unwrap();
        let x = weyl.parse("s2").unwrap();
        assert_eq!(alloc::format!("{}", b.stalk_rank(x)), "1 + q");
        assert_eq!(b.stalk_rank(weyl.identity()).to_string(), "1 + q");
    }

    #[test]
    fn affine_a1_chain() {
        use crate::alcove::{build_window_order, periodic_quotient, Alcove, AddressBox};
        let rs = RootSystem::new(CartanType::A1);
        let a0 = Alcove::fundamental(&rs);
        let bx = AddressBox::uniform(&rs, 0, 7);
        let win = build_window_order(&rs, &a0, &bx, &bx.widened(2)).unwrap();
        let pd = periodic_quotient(&rs, &win);
        let sw = SheafWindow::periodic(&win, &pd);
        let b = bm_build(&Rationals, &sw, win.base, 8, ExtensionOrder::Lexicographic).unwrap();
        for x in 0..sw.len() {
            assert_eq!(b.stalk_rank(x), RankPolynomial::one(), "{}", sw.names[x]);
        }
        let open: BTreeSet<usize> = ["A0", "A1"].iter().map(|n| sw.index_of(n).unwrap()).collect();
        assert_eq!(b.sections(&open).unwrap().module.dims(), &[1, 2, 2, 2, 2]);
    }
}
