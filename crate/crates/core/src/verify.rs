//! Independent checks of a built sheaf and the global sections object.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cofiltered::{exactness_check, CofilteredMap, CofilteredModule, Component};
use crate::field::Field;
use crate::graded::{DegreewiseModule, GradedMap, RankPolynomial};
use crate::linalg::{Matrix, Subspace};
use crate::sheaf::{CofilteredSheaf, UMap};
use crate::Error;

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl CheckResult {
    fn new(name: &str, failures: Vec<String>) -> Self {
        CheckResult { name: String::from(name), passed: failures.is_empty(), failures }
    }
}

/// A list of named checks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

/// `ℳ^{δz} = im u_z` with `d_z` into the same target.
#[derive(Clone, Debug)]
pub struct SheafDelta<F: Field> {
    pub u: UMap<F>,
    pub d: GradedMap<F>,
    /// Per-degree image of `u_z` inside the target.
    pub image_u: Vec<Subspace<F>>,
    /// Per-degree image of `d_z` inside the target.
    pub image_d: Vec<Subspace<F>>,
}

impl<F: Field> SheafDelta<F> {
    pub fn delta_dims(&self) -> Vec<usize> {
        self.image_u.iter().map(|s| s.dim()).collect()
    }
}

/// The δ-space of a sheaf at a point `z` carrying a stalk.
pub fn delta_sheaf<F: Field>(b: &CofilteredSheaf<F>, z: usize) -> SheafDelta<F> {
    let f = b.field();
    let u = b.u_map(z);
    let d = b.d_map(z);
    let image_u = u.map.image_subspaces(f, &u.target);
    let image_d = d.image_subspaces(f, &u.target);
    SheafDelta { u, d, image_u, image_d }
}

fn points_in_order<F: Field>(b: &CofilteredSheaf<F>) -> Vec<usize> {
    let w = b.window();
    let mut pts: Vec<usize> = (0..w.len()).filter(|&x| b.stalk_family(w.orbit_map[x]).points().contains(&x)).collect();
    pts.sort_by_key(|&x| (w.order.strict_down_set(x).len(), x));
    pts
}

/// Points `z` at which `im u_z ⊄ im d_z`.
pub fn sheaf_flabby_failures<F: Field>(b: &CofilteredSheaf<F>) -> Vec<usize> {
    let f = b.field();
    points_in_order(b)
        .into_iter()
        .filter(|&z| {
            let dl = delta_sheaf(b, z);
            dl.image_u.iter().zip(&dl.image_d).any(|(u, d)| !d.contains_subspace(f, u))
        })
        .collect()
}

/// Re-derives every δ-space and checks the defining properties of `ℬ(w)`,
/// flabbiness and surjectivity of local sections onto stalks.
pub fn bm_verify<F: Field>(b: &CofilteredSheaf<F>) -> Report {
    let f = b.field();
    let win = b.window();
    let names = |x: usize| win.names[x].clone();
    let w = b.base();
    let points = points_in_order(b);
    let mut cover = Vec::new();
    let mut flabby = Vec::new();
    let mut free = Vec::new();
    for &z in &points {
        let theta = win.orbit_map[z];
        let stalk = b.stalk_at(theta, z);
        let rank = b.stalk_rank(z);
        let degrees: Vec<i64> = rank.coefficients().iter().flat_map(|(&e, &c)| core::iter::repeat(2 * e).take(c as usize)).collect();
        if !stalk.module.hilbert_matches_free(&degrees) {
            free.push(names(z));
        }
        if z == w {
            continue;
        }
        let dl = delta_sheaf(b, z);
        let contained = dl.image_u.iter().zip(&dl.image_d).all(|(u, d)| d.contains_subspace(f, u));
        if !contained {
            flabby.push(names(z));
        }
        if !contained || dl.image_u != dl.image_d {
            cover.push(format!("{}: im d differs from the δ-space", names(z)));
            continue;
        }
        // minimality: generators of the stalk map bijectively onto those of δ
        let (delta, _) = dl.u.target.submodule(&dl.image_u);
        if delta.generator_counts() != stalk.module.generator_counts() {
            cover.push(format!("{}: cover is not minimal", names(z)));
        }
    }
    // property (2): support and seed values
    let mut support = Vec::new();
    let up = win.order.up_set(w);
    for o in 0..win.quotient.num_vertices() {
        for &x in b.stalk_family(o).points() {
            if !up.contains(&x) {
                support.push(format!("stalk point {} outside {{≥ w}}", names(x)));
            }
        }
    }
    for ei in 0..win.quotient.edges().len() {
        for &x in b.edge_family(ei).points() {
            if !up.contains(&x) {
                support.push(format!("edge point {} outside {{≥ w}}", names(x)));
            }
        }
    }
    if !points.contains(&w) {
        support.push(String::from("no stalk at w"));
    } else {
        let s = DegreewiseModule::ring(f, b.nvars(), b.cutoff());
        if b.stalk_at(win.orbit_map[w], w).module.dims() != s.dims() || b.stalk_rank(w) != RankPolynomial::one() {
            support.push(String::from("stalk at w is not S"));
        }
        for o in (0..win.quotient.num_vertices()).filter(|&o| o != win.orbit_map[w]) {
            if !b.stalk_at(o, w).module.is_zero() {
                support.push(format!("orbit {} is nonzero at ≤ w", win.quotient.name(o)));
            }
        }
        for ei in 0..win.quotient.edges().len() {
            if !b.edge_at(ei, w).module.is_zero() {
                support.push(format!("edge {} is nonzero at ≤ w", ei));
            }
        }
    }
    // property (3): ρ from the far end is onto with kernel α·stalk
    let mut edges = Vec::new();
    for (ei, e) in win.quotient.edges().iter().enumerate() {
        for &z in b.edge_family(ei).points() {
            let near = win.orbit_map[z];
            let far = e.other(near);
            if far == near {
                continue;
            }
            let src = b.stalk_at(far, z);
            let rho = b.rho_at(ei, far, z).expect("edge point carries ρ");
            let alpha = src.module.form_image(e.label.coords());
            let ok = rho.is_surjective(f) && rho.kernel_subspaces(f) == alpha;
            if !ok {
                edges.push(format!("edge {} at {}", ei, names(z)));
            }
        }
    }
    // local sections onto stalks
    let mut onto = Vec::new();
    for &z in &points {
        let theta = win.orbit_map[z];
        let g = b.sections(&win.order.down_set(z)).expect("down sets are open");
        if !g.projection(theta).is_surjective(f) {
            onto.push(names(z));
        }
    }
    Report {
        checks: alloc::vec![
            CheckResult::new("property1_cover", cover),
            CheckResult::new("property2_support", support),
            CheckResult::new("property3_edges", edges),
            CheckResult::new("flabby", flabby),
            CheckResult::new("sections_onto_stalks", onto),
            CheckResult::new("free_stalks", free),
        ],
    }
}

/// `B(w)` with `B(w)^{≤x} = Γ({≤x})`, components from the stalk limits.
pub fn global_sections<F: Field>(b: &CofilteredSheaf<F>) -> CofilteredModule<F> {
    let f = b.field();
    let win = b.window();
    let n = win.len();
    let secs: Vec<_> = (0..n).map(|x| b.sections(&win.order.down_set(x)).expect("down sets are open")).collect();
    let mut cover_res = BTreeMap::new();
    for (y, x) in win.order.covers() {
        let parts: Vec<GradedMap<F>> = (0..win.quotient.num_vertices())
            .map(|o| b.restrict_stalk(o, &secs[x].limits[o], &secs[y].limits[o]).compose(f, &secs[x].projection(o)))
            .collect();
        let refs: Vec<&GradedMap<F>> = parts.iter().collect();
        let into = GradedMap::stack_rows(f, secs[x].module.dims(), &refs);
        cover_res.insert((x, y), secs[y].coords_of(f, &into));
    }
    let components = secs
        .iter()
        .map(|s| {
            (0..win.quotient.num_vertices())
                .filter(|&o| !s.limits[o].module.is_zero())
                .map(|o| Component { orbit: o, target: s.limits[o].module.clone(), map: s.projection(o) })
                .collect()
        })
        .collect();
    let modules = secs.into_iter().map(|s| s.module).collect();
    CofilteredModule::new(f, b.nvars(), b.cutoff(), win.order.clone(), win.orbit_map.clone(), modules, cover_res, components)
        .expect("sections form a cofiltered module")
}

/// `π : B(w) → Δ(w)`, reading the component at `w`.
pub fn epi_to_standard<F: Field>(b: &CofilteredSheaf<F>, bw: &CofilteredModule<F>, delta: &CofilteredModule<F>) -> CofilteredMap<F> {
    let f = b.field();
    let win = b.window();
    let w = b.base();
    let theta = win.orbit_map[w];
    let at_w = b.stalk_at(theta, w);
    let maps = (0..win.len())
        .map(|x| {
            if !win.order.leq(w, x) {
                return GradedMap::zero(bw.module(x), delta.module(x));
            }
            let comp = bw.components(x).iter().find(|c| c.orbit == theta).expect("B(w) has a component at the orbit of w");
            let lim = b.stalk_at(theta, x);
            b.restrict_stalk(theta, &lim, &at_w).compose(f, &comp.map)
        })
        .collect();
    CofilteredMap { maps }
}

/// Checks on `B(w)`: support condition, flabbiness, the epimorphism to
/// `Δ(w)` with exactness of its kernel sequence on the default opens, and
/// `B(w)^{δx} = ℬ(w)^{δx}`.
pub fn global_sections_report<F: Field>(b: &CofilteredSheaf<F>, bw: &CofilteredModule<F>) -> Report {
    let f = b.field();
    let win = b.window();
    let w = b.base();
    let names = |x: usize| win.names[x].clone();
    let mut support = Vec::new();
    if let Err(e) = bw.support_check() {
        support.push(format!("{}", e));
    }
    let flabby: Vec<String> = bw.flabby_failures().into_iter().map(names).collect();
    let delta = CofilteredModule::standard(f, b.nvars(), b.cutoff(), &win.order, &win.orbit_map, w);
    let pi = epi_to_standard(b, bw, &delta);
    let mut epi = Vec::new();
    if !pi.is_morphism(bw, &delta) {
        epi.push(String::from("π does not commute with restrictions"));
    }
    for x in 0..win.len() {
        if !pi.maps[x].is_surjective(f) {
            epi.push(format!("π not onto at {}", names(x)));
        }
    }
    let all: BTreeSet<usize> = (0..win.len()).collect();
    let (_, _, global) = pi.on_limit(bw, &delta, &all);
    if !global.is_surjective(f) {
        epi.push(String::from("π not onto on the full window"));
    }
    let mut exact = Vec::new();
    let kernel_subs: Vec<Vec<Subspace<F>>> = pi.maps.iter().map(|m| m.kernel_subspaces(f)).collect();
    match bw.subobject(&kernel_subs) {
        Err(e) => exact.push(format!("{}", e)),
        Ok((k, incl)) => {
            for set in default_opens(&win.order) {
                match exactness_check(&k, bw, &delta, &incl, &pi, &set) {
                    Ok(true) => {}
                    Ok(false) => exact.push(format!("{:?}", set.iter().map(|&x| names(x)).collect::<Vec<_>>())),
                    Err(e) => exact.push(format!("{}", e)),
                }
            }
        }
    }
    let mut deltas = Vec::new();
    for x in 0..win.len() {
        if !win.order.leq(w, x) || x == w {
            continue;
        }
        if let Err(msg) = delta_agreement(b, bw, x) {
            deltas.push(format!("{}: {}", names(x), msg));
        }
    }
    let mut ext = Vec::new();
    let mut kern = Vec::new();
    for x in 0..win.len() {
        if !win.order.leq(w, x) || x == w {
            continue;
        }
        match extension_check(b, bw, x) {
            Ok((vanishes, equal)) => {
                if !vanishes {
                    ext.push(names(x));
                }
                if !equal {
                    kern.push(names(x));
                }
            }
            Err(e) => ext.push(format!("{}: {}", names(x), e)),
        }
    }
    Report {
        checks: alloc::vec![
            CheckResult::new("support_condition", support),
            CheckResult::new("flabby", flabby),
            CheckResult::new("epi_to_standard", epi),
            CheckResult::new("kernel_sequence_exact", exact),
            CheckResult::new("delta_agreement", deltas),
            CheckResult::new("extension_lemma", ext),
            CheckResult::new("delta_kernel_description", kern),
        ],
    }
}

/// All `{≤x}`, all `{<x}` and the full window.
pub fn default_opens(order: &crate::order::Poset) -> Vec<BTreeSet<usize>> {
    let mut out: Vec<BTreeSet<usize>> = Vec::new();
    for x in 0..order.len() {
        for s in [order.down_set(x), order.strict_down_set(x)] {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    let all: BTreeSet<usize> = (0..order.len()).collect();
    if !out.contains(&all) {
        out.push(all);
    }
    out
}

/// Compares `B^{δx}` and `ℬ^{δx}` as quotients of the stalk at `x`.
pub fn delta_agreement<F: Field>(b: &CofilteredSheaf<F>, bw: &CofilteredModule<F>, x: usize) -> Result<(), String> {
    let f = b.field();
    let theta = b.window().orbit_map[x];
    let Some(comp) = bw.components(x).iter().find(|c| c.orbit == theta) else {
        // zero stalk: both δ-spaces vanish
        let bd = bw.delta(x).map_err(|e| format!("{}", e))?;
        let sd = delta_sheaf(b, x);
        if bd.delta.is_zero() && sd.delta_dims().iter().all(|&d| d == 0) {
            return Ok(());
        }
        return Err(String::from("zero stalk with a nonzero δ-space"));
    };
    if !comp.map.is_surjective(f) {
        return Err(String::from("sections do not cover the stalk"));
    }
    let (_, k_incl) = bw.costalk(x);
    let costalk_img = comp.map.compose(f, &k_incl).image_subspaces(f, &comp.target);
    let d = b.d_map(x);
    let ker_d = d.kernel_subspaces(f);
    if costalk_img != ker_d {
        return Err(String::from("costalk image differs from ker d_x"));
    }
    let bd = bw.delta(x).map_err(|e| format!("{}", e))?;
    let sd = delta_sheaf(b, x);
    if bd.delta.dims() != sd.delta_dims().as_slice() {
        return Err(String::from("Hilbert functions of the δ-spaces differ"));
    }
    Ok(())
}

/// For `m' ∈ B^{<x}` with zero component at the orbit `Θ` of `x` and
/// components divisible by the connecting label at each neighbour `Ω`, checks
/// `u_x(m') = 0`. Also reports whether these elements are the whole kernel
/// of `u_x`.
pub fn extension_check<F: Field>(b: &CofilteredSheaf<F>, bw: &CofilteredModule<F>, x: usize) -> Result<(bool, bool), Error> {
    let f = b.field();
    let win = b.window();
    let theta = win.orbit_map[x];
    let dd = bw.delta(x)?;
    let below = &dd.below;
    let slots = below.module.slots();
    // Ω-component of B^{<x} inside ⊕_a (ℬ^Ω)^{≤a} over its maxima
    let component_of = |o: usize| -> (DegreewiseModule<F>, GradedMap<F>) {
        let mut targets = Vec::new();
        let mut maps = Vec::new();
        for (i, &a) in below.maxima.iter().enumerate() {
            let (t, m) = match bw.components(a).iter().find(|c| c.orbit == o) {
                Some(c) => (c.target.clone(), c.map.compose(f, &below.project(i))),
                None => {
                    let z = DegreewiseModule::zero(f, b.nvars(), b.cutoff());
                    let m = GradedMap::zero(&below.module, &z);
                    (z, m)
                }
            };
            targets.push(t);
            maps.push(m);
        }
        let trefs: Vec<&DegreewiseModule<F>> = targets.iter().collect();
        let sum = DegreewiseModule::direct_sum(f, b.nvars(), b.cutoff(), &trefs);
        let mrefs: Vec<&GradedMap<F>> = maps.iter().collect();
        (sum.clone(), GradedMap::stack_rows(f, below.module.dims(), &mrefs))
    };
    let mut conditions: Vec<Vec<Matrix<F>>> = alloc::vec![Vec::new(); slots];
    let (_, p_theta) = component_of(theta);
    for (j, c) in conditions.iter_mut().enumerate() {
        c.push(p_theta.block(j).clone());
    }
    for ei in win.quotient.incident(theta) {
        let e = &win.quotient.edges()[ei];
        let o = e.other(theta);
        let (target, p) = component_of(o);
        let image = p.image_subspaces(f, &target);
        for j in 0..slots {
            // α · image, one degree up
            let alpha_img = if j == 0 {
                Subspace::zero(f, target.dims()[0])
            } else {
                let fm = target.form_matrix(j - 1, e.label.coords());
                Subspace::column_space(f, &fm.mul(f, &image[j - 1].inclusion_matrix()))
            };
            conditions[j].push(alpha_img.quotient_matrix(f).mul(f, p.block(j)));
        }
    }
    let mut vanishes = true;
    let mut equal = true;
    for j in 0..slots {
        let refs: Vec<&Matrix<F>> = conditions[j].iter().collect();
        let cond = Matrix::vstack(f, below.module.dims()[j], &refs);
        let allowed = Subspace::kernel_of(f, &cond);
        let ker_u = Subspace::kernel_of(f, dd.u.block(j));
        if !ker_u.contains_subspace(f, &allowed) {
            vanishes = false;
        }
        if ker_u != allowed {
            equal = false;
        }
    }
    Ok((vanishes, equal))
}

/// Rank table: `(x, rank polynomial of ℬ^{Ω,≤x})` for every point.
pub fn rank_table<F: Field>(b: &CofilteredSheaf<F>) -> Vec<(usize, RankPolynomial)> {
    let w = b.window();
    (0..w.len()).filter(|&x| w.order.leq(b.base(), x)).map(|x| (x, b.stalk_rank(x))).collect()
}

/// Hilbert functions of `Γ({≤x})` for every window vertex.
pub fn section_hilbert<F: Field>(b: &CofilteredSheaf<F>) -> Vec<Vec<usize>> {
    let w = b.window();
    (0..w.len()).map(|x| b.sections(&w.order.down_set(x)).expect("down sets are open").module.dims().to_vec()).collect()
}

/// Sheaf gluing: sections over `U1 ∪ U2` are the compatible pairs.
pub fn sheaf_glue_check<F: Field>(b: &CofilteredSheaf<F>, u1: &BTreeSet<usize>, u2: &BTreeSet<usize>) -> Result<bool, Error> {
    let f = b.field();
    let union: BTreeSet<usize> = u1.union(u2).copied().collect();
    let inter: BTreeSet<usize> = u1.intersection(u2).copied().collect();
    let g = b.sections(&union)?;
    let g1 = b.sections(u1)?;
    let g2 = b.sections(u2)?;
    let g12 = b.sections(&inter)?;
    let nq = b.window().quotient.num_vertices();
    let restrict = |from: &crate::sheaf::Sections<F>, to: &crate::sheaf::Sections<F>| -> GradedMap<F> {
        let parts: Vec<GradedMap<F>> =
            (0..nq).map(|o| b.restrict_stalk(o, &from.limits[o], &to.limits[o]).compose(f, &from.projection(o))).collect();
        let refs: Vec<&GradedMap<F>> = parts.iter().collect();
        to.coords_of(f, &GradedMap::stack_rows(f, from.module.dims(), &refs))
    };
    let r1 = restrict(&g, &g1);
    let r2 = restrict(&g, &g2);
    let r1i = restrict(&g1, &g12);
    let r2i = restrict(&g2, &g12).scale(f, &f.from_i64(-1));
    let into = GradedMap::stack_rows(f, g.module.dims(), &[&r1, &r2]);
    let diff = GradedMap::stack_cols(f, g12.module.dims(), &[&r1i, &r2i]);
    Ok((0..into.slots()).all(|j| {
        into.block(j).rank(f) == into.block(j).cols() && Subspace::column_space(f, into.block(j)) == Subspace::kernel_of(f, diff.block(j))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alcove::{build_window_order, periodic_quotient, Alcove, AddressBox, CartanType, RootSystem, WeylGroup};
    use crate::field::Rationals;
    use crate::sheaf::{bm_build, ExtensionOrder, SheafWindow};
    use alloc::vec;

    fn a1(hi: i64, cutoff: i64) -> CofilteredSheaf<Rationals> {
        let rs = RootSystem::new(CartanType::A1);
        let a0 = Alcove::fundamental(&rs);
        let bx = AddressBox::uniform(&rs, 0, hi);
        let win = build_window_order(&rs, &a0, &bx, &bx.widened(2)).unwrap();
        let pd = periodic_quotient(&rs, &win);
        let sw = SheafWindow::periodic(&win, &pd);
        bm_build(&Rationals, &sw, win.base, cutoff, ExtensionOrder::Lexicographic).unwrap()
    }

    #[test]
    fn affine_a1_verifies() {
        let b = a1(5, 8);
        let r = bm_verify(&b);
        assert!(r.all_passed(), "{:?}", r);
        let x = b.window().index_of("A2").unwrap();
        assert_eq!(delta_sheaf(&b, x).delta_dims(), vec![1, 1, 1, 1, 1]);
        let x1 = b.window().index_of("A1").unwrap();
        assert_eq!(delta_sheaf(&b, x1).delta_dims(), vec![1, 0, 0, 0, 0]);
        let bw = global_sections(&b);
        assert_eq!(bw.costalk(x1).0.dims(), &[0, 1, 1, 1, 1]);
        let g = global_sections_report(&b, &bw);
        assert!(g.all_passed(), "{:?}", g);
    }

    #[test]
    fn classical_s3_verifies() {
        let rs = RootSystem::new(CartanType::A2);
        let weyl = WeylGroup::new(&rs);
        let win = SheafWindow::classical(&weyl);
        let b = bm_build(&Rationals, &win, weyl.longest(), 6, ExtensionOrder::Lexicographic).unwrap();
        let r = bm_verify(&b);
        assert!(r.all_passed(), "{:?}", r);
        let bw = global_sections(&b);
        let g = global_sections_report(&b, &bw);
        assert!(g.all_passed(), "{:?}", g);
    }

    #[test]
    fn mutations_are_caught() {
        let mut b = a1(5, 8);
        let top = b.window().index_of("A5").unwrap();
        b.mutate_zero_rho(0, b.window().orbit_map[b.window().index_of("A4").unwrap()], top).unwrap();
        let r = bm_verify(&b);
        assert!(!r.get("property3_edges").unwrap().passed);
        let mut b = a1(5, 8);
        b.mutate_delete_generator(top, 0).unwrap();
        let r = bm_verify(&b);
        assert!(!r.get("property1_cover").unwrap().passed);
        assert_eq!(sheaf_flabby_failures(&b), vec![top]);
    }
}
