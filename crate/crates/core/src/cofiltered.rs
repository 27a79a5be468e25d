//! Cofiltered graded modules over a finite window and their limits.
//!
//! A diagram assigns a module `M^{≤x}` to each of its points `x` and a
//! restriction `M^{≤x} → M^{≤y}` to each pair `y ≤ x` of points. Off the
//! points the family is constant: `M^{≤z}` is the limit over the points
//! below `z`. Limits over an open set are computed as the kernel, inside the
//! sum over its maximal points, of the agreement conditions at the maxima of
//! pairwise intersections.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::field::Field;
use crate::graded::{DegreewiseModule, GradedMap};
use crate::linalg::{Matrix, Subspace};
use crate::order::Poset;
use crate::Error;

/// Access to a diagram of modules indexed by points of a window.
pub trait Diagram<F: Field> {
    fn field(&self) -> &F;
    fn nvars(&self) -> usize;
    fn cutoff(&self) -> i64;
    fn order(&self) -> &Poset;
    fn is_point(&self, x: usize) -> bool;
    /// `M^{≤x}` for a point `x`.
    fn point_module(&self, x: usize) -> &DegreewiseModule<F>;
    /// Restriction between points `y ≤ x` (identity for `x == y`).
    fn point_restriction(&self, x: usize, y: usize) -> GradedMap<F>;
}

/// `M^J` for a set of window vertices, embedded in the sum over the maximal
/// points of `J`.
#[derive(Clone, Debug)]
pub struct Limit<F: Field> {
    pub maxima: Vec<usize>,
    pub module: DegreewiseModule<F>,
    /// `M^J → ⊕_a M^{≤a}`.
    pub incl: GradedMap<F>,
    offsets: Vec<Vec<usize>>,
    lens: Vec<Vec<usize>>,
    /// Image of `incl`, `None` when it is the whole ambient sum.
    subspaces: Option<Vec<Subspace<F>>>,
}

impl<F: Field> Limit<F> {
    /// Projection `M^J → M^{≤a}` for the `i`-th maximum.
    pub fn project(&self, i: usize) -> GradedMap<F> {
        let offs: Vec<usize> = self.offsets.iter().map(|o| o[i]).collect();
        let lens: Vec<usize> = self.lens.iter().map(|l| l[i]).collect();
        self.incl.row_block(&offs, &lens)
    }

    pub fn ambient_dims(&self) -> Vec<usize> {
        self.lens.iter().map(|l| l.iter().sum()).collect()
    }

    /// Factors a map into the ambient sum, assumed to land in the limit.
    pub fn coords_of(&self, f: &F, into_ambient: &GradedMap<F>) -> GradedMap<F> {
        match &self.subspaces {
            None => into_ambient.clone(),
            Some(subs) => {
                let blocks = subs
                    .iter()
                    .enumerate()
                    .map(|(j, s)| {
                        let b = into_ambient.block(j);
                        debug_assert!((0..b.cols()).all(|c| s.contains(f, &b.col(c))), "map does not land in the limit");
                        select_rows(f, b, s.pivots())
                    })
                    .collect();
                GradedMap::from_blocks(0, blocks)
            }
        }
    }

    /// Per-degree image of `incl` in the ambient sum.
    pub fn ambient_subspaces(&self, f: &F) -> Vec<Subspace<F>> {
        match &self.subspaces {
            Some(s) => s.clone(),
            None => self.ambient_dims().iter().map(|&d| Subspace::full(f, d)).collect(),
        }
    }
}

fn select_rows<F: Field>(f: &F, m: &Matrix<F>, rows: &[usize]) -> Matrix<F> {
    let mut out = Matrix::zeros(f, rows.len(), m.cols());
    for (i, &r) in rows.iter().enumerate() {
        for c in 0..m.cols() {
            out.set(i, c, m.get(r, c).clone());
        }
    }
    out
}

/// Limit of a diagram over the points contained in `set`.
pub fn limit<F: Field, D: Diagram<F> + ?Sized>(d: &D, set: &BTreeSet<usize>) -> Limit<F> {
    let f = d.field();
    let order = d.order();
    let pts: BTreeSet<usize> = set.iter().copied().filter(|&x| d.is_point(x)).collect();
    let maxima = order.maxima(&pts);
    let slots = (d.cutoff() / 2 + 1) as usize;
    let mods: Vec<&DegreewiseModule<F>> = maxima.iter().map(|&a| d.point_module(a)).collect();
    let mut offsets = vec![Vec::with_capacity(maxima.len()); slots];
    let mut lens = vec![Vec::with_capacity(maxima.len()); slots];
    for j in 0..slots {
        let mut acc = 0;
        for m in &mods {
            offsets[j].push(acc);
            lens[j].push(m.dims()[j]);
            acc += m.dims()[j];
        }
    }
    if maxima.len() == 1 {
        let module = mods[0].clone();
        let incl = GradedMap::identity(&module);
        return Limit { maxima, module, incl, offsets, lens, subspaces: None };
    }
    let ambient = DegreewiseModule::direct_sum(f, d.nvars(), d.cutoff(), &mods);
    // agreement at the maxima of each pairwise intersection
    let mut rows: Vec<Vec<Matrix<F>>> = vec![Vec::new(); slots];
    for i in 0..maxima.len() {
        for k in (i + 1)..maxima.len() {
            let (a, b) = (maxima[i], maxima[k]);
            let common: BTreeSet<usize> = pts.iter().copied().filter(|&y| order.leq(y, a) && order.leq(y, b)).collect();
            for y in order.maxima(&common) {
                let ra = d.point_restriction(a, y);
                let rb = d.point_restriction(b, y);
                for j in 0..slots {
                    let mut m = Matrix::zeros(f, ra.block(j).rows(), ambient.dims()[j]);
                    m.paste(ra.block(j), 0, offsets[j][i]);
                    m.paste(&rb.block(j).scale(f, &f.from_i64(-1)), 0, offsets[j][k]);
                    rows[j].push(m);
                }
            }
        }
    }
    let subs: Vec<Subspace<F>> = (0..slots)
        .map(|j| {
            if rows[j].is_empty() {
                Subspace::full(f, ambient.dims()[j])
            } else {
                let refs: Vec<&Matrix<F>> = rows[j].iter().collect();
                Subspace::kernel_of(f, &Matrix::vstack(f, ambient.dims()[j], &refs))
            }
        })
        .collect();
    let (module, incl) = ambient.submodule(&subs);
    Limit { maxima, module, incl, offsets, lens, subspaces: Some(subs) }
}

/// `M^{≤z}` for any vertex `z`.
pub fn limit_at<F: Field, D: Diagram<F> + ?Sized>(d: &D, z: usize) -> Limit<F> {
    limit(d, &d.order().down_set(z))
}

/// `M^{<z}`.
pub fn limit_below<F: Field, D: Diagram<F> + ?Sized>(d: &D, z: usize) -> Limit<F> {
    limit(d, &d.order().strict_down_set(z))
}

/// Restriction `M^{J} → M^{K}` between limits with `K ⊆ J` open.
pub fn restrict_limit<F: Field, D: Diagram<F> + ?Sized>(d: &D, from: &Limit<F>, to: &Limit<F>) -> GradedMap<F> {
    let f = d.field();
    let parts: Vec<GradedMap<F>> = to
        .maxima
        .iter()
        .map(|&b| {
            let i = from
                .maxima
                .iter()
                .position(|&a| d.order().leq(b, a))
                .expect("restriction target is not below the source");
            d.point_restriction(from.maxima[i], b).compose(f, &from.project(i))
        })
        .collect();
    let refs: Vec<&GradedMap<F>> = parts.iter().collect();
    to.coords_of(f, &GradedMap::stack_rows(f, from.module.dims(), &refs))
}

/// The `Z̄`-component data of `M^{≤x}`: the projection to the summand
/// attached to one orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct Component<F: Field> {
    pub orbit: usize,
    pub target: DegreewiseModule<F>,
    pub map: GradedMap<F>,
}

/// A cofiltered `Z̄`-module over the whole window.
#[derive(Clone, Debug)]
pub struct CofilteredModule<F: Field> {
    field: F,
    nvars: usize,
    cutoff: i64,
    order: Poset,
    orbit_map: Vec<usize>,
    modules: Vec<DegreewiseModule<F>>,
    /// Restrictions for all pairs `y < x`.
    res: BTreeMap<(usize, usize), GradedMap<F>>,
    components: Vec<Vec<Component<F>>>,
}

impl<F: Field> Diagram<F> for CofilteredModule<F> {
    fn field(&self) -> &F {
        &self.field
    }
    fn nvars(&self) -> usize {
        self.nvars
    }
    fn cutoff(&self) -> i64 {
        self.cutoff
    }
    fn order(&self) -> &Poset {
        &self.order
    }
    fn is_point(&self, _x: usize) -> bool {
        true
    }
    fn point_module(&self, x: usize) -> &DegreewiseModule<F> {
        &self.modules[x]
    }
    fn point_restriction(&self, x: usize, y: usize) -> GradedMap<F> {
        if x == y {
            GradedMap::identity(&self.modules[x])
        } else {
            self.res[&(x, y)].clone()
        }
    }
}

impl<F: Field> CofilteredModule<F> {
    /// Builds the object from cover restrictions. Checks that each map is a
    /// module map of the right shape and that all chains between two
    /// vertices compose to the same restriction.
    pub fn new(
        field: &F,
        nvars: usize,
        cutoff: i64,
        order: Poset,
        orbit_map: Vec<usize>,
        modules: Vec<DegreewiseModule<F>>,
        cover_res: BTreeMap<(usize, usize), GradedMap<F>>,
        components: Vec<Vec<Component<F>>>,
    ) -> Result<Self, Error> {
        let n = order.len();
        if modules.len() != n || orbit_map.len() != n || components.len() != n {
            return Err(Error::Precondition(String::from("per-vertex data has the wrong length")));
        }
        let covers = order.covers();
        for &(y, x) in &covers {
            let r = cover_res
                .get(&(x, y))
                .ok_or_else(|| Error::Precondition(format!("missing restriction {} -> {}", x, y)))?;
            if !r.is_module_map(&modules[x], &modules[y]) {
                return Err(Error::Precondition(format!("restriction {} -> {} is not a module map", x, y)));
            }
        }
        for (x, comps) in components.iter().enumerate() {
            for c in comps {
                if !c.map.is_module_map(&modules[x], &c.target) {
                    return Err(Error::Precondition(format!("component map at {} is not a module map", x)));
                }
            }
        }
        let mut res: BTreeMap<(usize, usize), GradedMap<F>> = BTreeMap::new();
        for x in order.linear_extension_ascending(|v| v) {
            for y in 0..n {
                if !order.lt(y, x) {
                    continue;
                }
                let mut found: Option<GradedMap<F>> = None;
                for &(c, top) in &covers {
                    if top != x || !order.leq(y, c) {
                        continue;
                    }
                    let step = &cover_res[&(x, c)];
                    let r = if c == y { step.clone() } else { res[&(c, y)].compose(field, step) };
                    match &found {
                        None => found = Some(r),
                        Some(prev) if *prev != r => {
                            return Err(Error::Precondition(format!("restrictions {} -> {} do not commute", x, y)));
                        }
                        _ => {}
                    }
                }
                res.insert((x, y), found.unwrap());
            }
        }
        Ok(CofilteredModule { field: field.clone(), nvars, cutoff, order, orbit_map, modules, res, components })
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn orbit_map(&self) -> &[usize] {
        &self.orbit_map
    }

    pub fn module(&self, x: usize) -> &DegreewiseModule<F> {
        &self.modules[x]
    }

    pub fn restriction(&self, x: usize, y: usize) -> GradedMap<F> {
        self.point_restriction(x, y)
    }

    pub fn components(&self, x: usize) -> &[Component<F>] {
        &self.components[x]
    }

    /// `Δ(w)`: `S` on `{≥ w}` with identity restrictions and zero elsewhere,
    /// carried by the orbit of `w`.
    pub fn standard(field: &F, nvars: usize, cutoff: i64, order: &Poset, orbit_map: &[usize], w: usize) -> Self {
        let n = order.len();
        let s = DegreewiseModule::ring(field, nvars, cutoff);
        let zero = DegreewiseModule::zero(field, nvars, cutoff);
        let modules: Vec<DegreewiseModule<F>> =
            (0..n).map(|x| if order.leq(w, x) { s.clone() } else { zero.clone() }).collect();
        let mut cover_res = BTreeMap::new();
        for (y, x) in order.covers() {
            let r = if order.leq(w, y) { GradedMap::identity(&s) } else { GradedMap::zero(&modules[x], &modules[y]) };
            cover_res.insert((x, y), r);
        }
        let components = (0..n)
            .map(|x| {
                if order.leq(w, x) {
                    vec![Component { orbit: orbit_map[w], target: s.clone(), map: GradedMap::identity(&s) }]
                } else {
                    Vec::new()
                }
            })
            .collect();
        Self::new(field, nvars, cutoff, order.clone(), orbit_map.to_vec(), modules, cover_res, components)
            .expect("standard object is well formed")
    }

    /// Direct sum, with components of equal orbit merged.
    pub fn direct_sum(parts: &[&Self]) -> Result<Self, Error> {
        let first = parts.first().ok_or_else(|| Error::Precondition(String::from("empty direct sum")))?;
        let f = &first.field;
        let n = first.len();
        let modules: Vec<DegreewiseModule<F>> = (0..n)
            .map(|x| {
                let ms: Vec<&DegreewiseModule<F>> = parts.iter().map(|p| &p.modules[x]).collect();
                DegreewiseModule::direct_sum(f, first.nvars, first.cutoff, &ms)
            })
            .collect();
        let mut cover_res = BTreeMap::new();
        for (y, x) in first.order.covers() {
            let maps: Vec<GradedMap<F>> = parts.iter().map(|p| p.res[&(x, y)].clone()).collect();
            let refs: Vec<&GradedMap<F>> = maps.iter().collect();
            cover_res.insert((x, y), GradedMap::diagonal(f, &refs));
        }
        let mut components = Vec::with_capacity(n);
        for x in 0..n {
            let orbits: BTreeSet<usize> = parts.iter().flat_map(|p| p.components[x].iter().map(|c| c.orbit)).collect();
            let mut comps = Vec::new();
            for o in orbits {
                let zero = DegreewiseModule::zero(f, first.nvars, first.cutoff);
                let pieces: Vec<(DegreewiseModule<F>, GradedMap<F>)> = parts
                    .iter()
                    .map(|p| match p.components[x].iter().find(|c| c.orbit == o) {
                        Some(c) => (c.target.clone(), c.map.clone()),
                        None => (zero.clone(), GradedMap::zero(&p.modules[x], &zero)),
                    })
                    .collect();
                let targets: Vec<&DegreewiseModule<F>> = pieces.iter().map(|p| &p.0).collect();
                let maps: Vec<&GradedMap<F>> = pieces.iter().map(|p| &p.1).collect();
                comps.push(Component {
                    orbit: o,
                    target: DegreewiseModule::direct_sum(f, first.nvars, first.cutoff, &targets),
                    map: GradedMap::diagonal(f, &maps),
                });
            }
            components.push(comps);
        }
        Self::new(f, first.nvars, first.cutoff, first.order.clone(), first.orbit_map.clone(), modules, cover_res, components)
    }

    /// Sub-object given by per-vertex submodules that restrictions preserve.
    pub fn subobject(&self, subs: &[Vec<Subspace<F>>]) -> Result<(Self, CofilteredMap<F>), Error> {
        let f = &self.field;
        let parts: Vec<(DegreewiseModule<F>, GradedMap<F>)> =
            (0..self.len()).map(|x| self.modules[x].submodule(&subs[x])).collect();
        let mut cover_res = BTreeMap::new();
        for (y, x) in self.order.covers() {
            let img = self.res[&(x, y)].compose(f, &parts[x].1);
            let blocks = (0..img.slots())
                .map(|j| {
                    let b = img.block(j);
                    if (0..b.cols()).any(|c| !subs[y][j].contains(f, &b.col(c))) {
                        return Err(Error::Precondition(format!("restriction {} -> {} leaves the subobject", x, y)));
                    }
                    Ok(subs[y][j].coord_matrix(f).mul(f, b))
                })
                .collect::<Result<Vec<_>, _>>()?;
            cover_res.insert((x, y), GradedMap::from_blocks(0, blocks));
        }
        let components = (0..self.len())
            .map(|x| {
                self.components[x]
                    .iter()
                    .map(|c| Component { orbit: c.orbit, target: c.target.clone(), map: c.map.compose(f, &parts[x].1) })
                    .collect()
            })
            .collect();
        let modules: Vec<DegreewiseModule<F>> = parts.iter().map(|p| p.0.clone()).collect();
        let incl = CofilteredMap { maps: parts.into_iter().map(|p| p.1).collect() };
        let sub = Self::new(f, self.nvars, self.cutoff, self.order.clone(), self.orbit_map.clone(), modules, cover_res, components)?;
        Ok((sub, incl))
    }

    /// `M^{≤x} → M^{<x}`.
    pub fn lower_restriction(&self, x: usize) -> (Limit<F>, GradedMap<F>) {
        let below = limit_below(self, x);
        let at = limit_at(self, x);
        let r = restrict_limit(self, &at, &below);
        (below, r)
    }

    /// Costalk `M_{[x]}` with its inclusion into `M^{≤x}`.
    pub fn costalk(&self, x: usize) -> (DegreewiseModule<F>, GradedMap<F>) {
        let (_, r) = self.lower_restriction(x);
        r.kernel(&self.modules[x])
    }

    /// Vertices at which `M^{≤x} → M^{<x}` fails to be surjective.
    pub fn flabby_failures(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| !self.lower_restriction(x).1.is_surjective(&self.field)).collect()
    }

    /// Condition (S): the costalk at `x` only has a component at the orbit
    /// of `x`, and injects into it.
    pub fn support_check(&self) -> Result<(), Error> {
        let f = &self.field;
        for x in 0..self.len() {
            let (k, incl) = self.costalk(x);
            if k.is_zero() {
                continue;
            }
            let own = self.orbit_map[x];
            let mut injective = false;
            for c in &self.components[x] {
                let m = c.map.compose(f, &incl);
                if c.orbit == own {
                    injective = m.is_injective(f);
                } else if !m.is_zero(f) {
                    return Err(Error::SupportViolation(format!("vertex {} has costalk component at orbit {}", x, c.orbit)));
                }
            }
            if !injective {
                return Err(Error::SupportViolation(format!("costalk at vertex {} does not inject into its own component", x)));
            }
        }
        Ok(())
    }

    /// The `Θ`-component of `M^{≤x}` for the orbit of `x`, as the image of
    /// the projection.
    pub fn own_component(&self, x: usize) -> (DegreewiseModule<F>, GradedMap<F>) {
        let f = &self.field;
        let own = self.orbit_map[x];
        match self.components[x].iter().find(|c| c.orbit == own) {
            Some(c) => {
                let subs = c.map.image_subspaces(f, &c.target);
                let (img, _) = c.target.submodule(&subs);
                let blocks = subs.iter().enumerate().map(|(j, s)| select_rows(f, c.map.block(j), s.pivots())).collect();
                (img, GradedMap::from_blocks(0, blocks))
            }
            None => {
                let z = DegreewiseModule::zero(f, self.nvars, self.cutoff);
                let m = GradedMap::zero(&self.modules[x], &z);
                (z, m)
            }
        }
    }

    /// `M^{δx} = (M^{≤x})^Θ / M_{[x]}` with `d_x` and `u_x`. Requires the
    /// restriction at `x` to be surjective.
    pub fn delta(&self, x: usize) -> Result<DeltaData<F>, Error> {
        let f = &self.field;
        let (below, r) = self.lower_restriction(x);
        if !r.is_surjective(f) {
            return Err(Error::NotFlabby(format!("vertex {}", x)));
        }
        let (comp, p) = self.own_component(x);
        let (_, k_incl) = r.kernel(&self.modules[x]);
        let k_img = p.compose(f, &k_incl).image_subspaces(f, &comp);
        let (delta, d) = comp.quotient(&k_img);
        // u_x = d ∘ p ∘ (right inverse of r)
        let blocks = (0..r.slots())
            .map(|j| {
                let rj = r.block(j);
                let lift = rj.preimage_solve_many(f, &Matrix::identity(f, rj.rows()))?;
                Ok(d.block(j).mul(f, &p.block(j).mul(f, &lift)))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(DeltaData { below, restriction: r, component: comp, projection: p, delta, d, u: GradedMap::from_blocks(0, blocks) })
    }

    /// The fiber square: `M^{≤x} → (M^{≤x})^Θ ⊕ M^{<x}` is injective with
    /// image `{(a, b) : d_x a = u_x b}`.
    pub fn fiber_square_check(&self, x: usize) -> Result<bool, Error> {
        let f = &self.field;
        let dd = self.delta(x)?;
        let m = &self.modules[x];
        let into = GradedMap::stack_rows(f, m.dims(), &[&dd.projection, &dd.restriction]);
        if !into.is_injective(f) {
            return Ok(false);
        }
        let neg_u = dd.u.scale(f, &f.from_i64(-1));
        let sum_dims: Vec<usize> = (0..m.slots()).map(|j| dd.delta.dims()[j]).collect();
        let pair = GradedMap::stack_cols(f, &sum_dims, &[&dd.d, &neg_u]);
        for j in 0..m.slots() {
            let fiber = Subspace::kernel_of(f, pair.block(j));
            let img = Subspace::column_space(f, into.block(j));
            if fiber != img {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Checks `M^U ≅ M^{U1} ×_{M^{U1∩U2}} M^{U2}` for open `U1, U2`.
    pub fn glue_check(&self, u1: &BTreeSet<usize>, u2: &BTreeSet<usize>) -> Result<bool, Error> {
        for u in [u1, u2] {
            if !self.order.is_open(u) {
                return Err(Error::NotOpen(format!("{:?}", u)));
            }
        }
        let union: BTreeSet<usize> = u1.union(u2).copied().collect();
        let inter: BTreeSet<usize> = u1.intersection(u2).copied().collect();
        Ok(glue_exact(self, &union, u1, u2, &inter))
    }

    /// Sections over an open set.
    pub fn sections(&self, set: &BTreeSet<usize>) -> Result<Limit<F>, Error> {
        if !self.order.is_open(set) {
            return Err(Error::NotOpen(format!("{:?}", set)));
        }
        Ok(limit(self, set))
    }
}

pub(crate) fn glue_exact<F: Field, D: Diagram<F> + ?Sized>(
    d: &D,
    union: &BTreeSet<usize>,
    u1: &BTreeSet<usize>,
    u2: &BTreeSet<usize>,
    inter: &BTreeSet<usize>,
) -> bool {
    let f = d.field();
    let (l, l1, l2, l12) = (limit(d, union), limit(d, u1), limit(d, u2), limit(d, inter));
    let r1 = restrict_limit(d, &l, &l1);
    let r2 = restrict_limit(d, &l, &l2);
    let r1i = restrict_limit(d, &l1, &l12);
    let r2i = restrict_limit(d, &l2, &l12).scale(f, &f.from_i64(-1));
    let into = GradedMap::stack_rows(f, l.module.dims(), &[&r1, &r2]);
    let diff = GradedMap::stack_cols(f, l12.module.dims(), &[&r1i, &r2i]);
    (0..into.slots()).all(|j| {
        into.block(j).rank(f) == into.block(j).cols()
            && Subspace::column_space(f, into.block(j)) == Subspace::kernel_of(f, diff.block(j))
    })
}

/// Result of [`CofilteredModule::delta`].
#[derive(Clone, Debug)]
pub struct DeltaData<F: Field> {
    pub below: Limit<F>,
    /// `M^{≤x} → M^{<x}`.
    pub restriction: GradedMap<F>,
    /// `(M^{≤x})^Θ`.
    pub component: DegreewiseModule<F>,
    /// `M^{≤x} → (M^{≤x})^Θ`.
    pub projection: GradedMap<F>,
    pub delta: DegreewiseModule<F>,
    /// `(M^{≤x})^Θ → M^{δx}`.
    pub d: GradedMap<F>,
    /// `M^{<x} → M^{δx}`.
    pub u: GradedMap<F>,
}

/// A morphism of cofiltered modules, one map per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct CofilteredMap<F: Field> {
    pub maps: Vec<GradedMap<F>>,
}

impl<F: Field> CofilteredMap<F> {
    /// Checks module maps at each vertex and compatibility with covers.
    pub fn is_morphism(&self, src: &CofilteredModule<F>, dst: &CofilteredModule<F>) -> bool {
        let f = &src.field;
        if self.maps.len() != src.len() {
            return false;
        }
        if (0..src.len()).any(|x| !self.maps[x].is_module_map(&src.modules[x], &dst.modules[x])) {
            return false;
        }
        src.order.covers().into_iter().all(|(y, x)| {
            dst.res[&(x, y)].compose(f, &self.maps[x]) == self.maps[y].compose(f, &src.res[&(x, y)])
        })
    }

    pub fn compose(&self, f: &F, other: &Self) -> Self {
        CofilteredMap { maps: self.maps.iter().zip(&other.maps).map(|(a, b)| a.compose(f, b)).collect() }
    }

    /// Induced map on sections over `set`.
    pub fn on_limit(&self, src: &CofilteredModule<F>, dst: &CofilteredModule<F>, set: &BTreeSet<usize>) -> (Limit<F>, Limit<F>, GradedMap<F>) {
        let f = &src.field;
        let ls = limit(src, set);
        let ld = limit(dst, set);
        let parts: Vec<GradedMap<F>> = ld
            .maxima
            .iter()
            .map(|&b| {
                let i = ls.maxima.iter().position(|&a| src.order.leq(b, a)).unwrap();
                self.maps[b].compose(f, &src.point_restriction(ls.maxima[i], b)).compose(f, &ls.project(i))
            })
            .collect();
        let refs: Vec<&GradedMap<F>> = parts.iter().collect();
        let m = ld.coords_of(f, &GradedMap::stack_rows(f, ls.module.dims(), &refs));
        (ls, ld, m)
    }
}

/// Checks that `0 → M → N → O → 0` is exact on sections over `set`.
pub fn exactness_check<F: Field>(
    m: &CofilteredModule<F>,
    n: &CofilteredModule<F>,
    o: &CofilteredModule<F>,
    i: &CofilteredMap<F>,
    p: &CofilteredMap<F>,
    set: &BTreeSet<usize>,
) -> Result<bool, Error> {
    if !n.order.is_open(set) {
        return Err(Error::NotOpen(format!("{:?}", set)));
    }
    let f = &m.field;
    let (_, _, im) = i.on_limit(m, n, set);
    let (_, _, pm) = p.on_limit(n, o, set);
    Ok((0..im.slots()).all(|j| {
        im.block(j).rank(f) == im.block(j).cols()
            && pm.block(j).rank(f) == pm.block(j).rows()
            && Subspace::column_space(f, im.block(j)) == Subspace::kernel_of(f, pm.block(j))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;

    fn chain(n: usize) -> Poset {
        let rel: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Poset::from_relations(n, &rel).unwrap()
    }

    #[test]
    fn standard_object_limits_and_costalks() {
        let f = Rationals;
        let order = chain(4);
        let d = CofilteredModule::standard(&f, 1, 4, &order, &[0, 1, 0, 1], 1);
        assert!(d.module(0).is_zero());
        let all: BTreeSet<usize> = (0..4).collect();
        assert_eq!(d.sections(&all).unwrap().module.dims(), &[1, 1, 1]);
        assert_eq!(d.costalk(1).0.dims(), &[1, 1, 1]);
        assert!(d.costalk(2).0.is_zero());
        assert!(d.flabby_failures().is_empty());
        d.support_check().unwrap();
        assert!(d.fiber_square_check(1).unwrap());
        assert!(d.sections(&[2].into_iter().collect()).is_err());
    }

    #[test]
    fn diamond_limit_and_gluing() {
        let f = Rationals;
        let order = Poset::from_relations(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let d = CofilteredModule::standard(&f, 2, 4, &order, &[0, 0, 0, 0], 0);
        let open: BTreeSet<usize> = [0, 1, 2].into_iter().collect();
        let l = limit(&d, &open);
        assert_eq!(l.maxima, vec![1, 2]);
        assert_eq!(l.module.dims(), &[1, 2, 3]);
        let u1 = [0, 1].into_iter().collect();
        let u2 = [0, 2].into_iter().collect();
        assert!(d.glue_check(&u1, &u2).unwrap());
        let sum = CofilteredModule::direct_sum(&[&d, &d]).unwrap();
        assert_eq!(sum.components(3).len(), 1);
        assert_eq!(sum.module(3).dims(), &[2, 4, 6]);
    }
}
