//! Fitting decompositions and degree-0 endomorphisms of cofiltered modules.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cofiltered::{limit, restrict_limit, CofilteredMap, CofilteredModule, Diagram};
use crate::field::Field;
use crate::graded::{DegreewiseModule, GradedMap, MonomialTable};
use crate::linalg::{Matrix, Subspace};
use crate::Error;

fn matrix_power<F: Field>(f: &F, a: &Matrix<F>, mut e: usize) -> Matrix<F> {
    let mut result = Matrix::identity(f, a.rows());
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = result.mul(f, &base);
        }
        base = base.mul(f, &base);
        e >>= 1;
    }
    result
}

/// `M = ker^∞ f ⊕ im^∞ f` as cofiltered modules.
#[derive(Clone, Debug)]
pub struct FittingDecomposition<F: Field> {
    pub kernel: CofilteredModule<F>,
    pub kernel_incl: CofilteredMap<F>,
    pub image: CofilteredModule<F>,
    pub image_incl: CofilteredMap<F>,
}

/// Fitting decomposition of an endomorphism, computed degreewise from
/// `f^n` with `n` the dimension of the graded piece.
pub fn fitting<F: Field>(m: &CofilteredModule<F>, f: &CofilteredMap<F>) -> Result<FittingDecomposition<F>, Error> {
    if !f.is_morphism(m, m) {
        return Err(Error::NotEndomorphism(alloc::string::String::from("map does not commute with restrictions")));
    }
    let field = m.field();
    let mut ker = Vec::with_capacity(m.len());
    let mut img = Vec::with_capacity(m.len());
    for x in 0..m.len() {
        let mut kx = Vec::new();
        let mut ix = Vec::new();
        for b in f.maps[x].blocks() {
            let p = matrix_power(field, b, b.rows());
            kx.push(Subspace::kernel_of(field, &p));
            ix.push(Subspace::column_space(field, &p));
        }
        ker.push(kx);
        img.push(ix);
    }
    let (kernel, kernel_incl) = m.subobject(&ker)?;
    let (image, image_incl) = m.subobject(&img)?;
    Ok(FittingDecomposition { kernel, kernel_incl, image, image_incl })
}

/// Checks that the parts sum directly to `M` at every vertex and degree,
/// that `f` is nilpotent on the kernel part and invertible on the image
/// part.
pub fn fitting_check<F: Field>(m: &CofilteredModule<F>, f: &CofilteredMap<F>, dec: &FittingDecomposition<F>) -> bool {
    let field = m.field();
    for x in 0..m.len() {
        for j in 0..m.module(x).slots() {
            let k = dec.kernel_incl.maps[x].block(j);
            let i = dec.image_incl.maps[x].block(j);
            let n = m.module(x).dims()[j];
            if k.cols() + i.cols() != n || Matrix::hstack(field, n, &[k, i]).rank(field) != n {
                return false;
            }
            let a = f.maps[x].block(j);
            if !matrix_power(field, a, n).mul(field, k).is_zero(field) {
                return false;
            }
            if a.mul(field, i).rank(field) != i.cols() {
                return false;
            }
        }
    }
    true
}

/// Result of [`endomorphism_probe`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoProbe {
    /// Dimension of the degree-0 endomorphism algebra.
    pub dimension: usize,
    /// Number of probe elements tested.
    pub probes: usize,
    /// Whether every probe was nilpotent or invertible.
    pub local: bool,
    /// Index of a probe that was neither; its Fitting decomposition splits
    /// the module nontrivially.
    pub witness: Option<usize>,
}

/// Degree-0 endomorphisms of a flabby cofiltered module are determined by
/// their action on the global piece `G = M^V`. They are parametrized by
/// images of minimal generators of `G` that kill the relations and preserve
/// every kernel of a restriction `G → M^{≤x}` or of a component projection.
/// Conditions on submodules are imposed on their generators. Probes are the
/// basis elements with their pairwise sums, then seeded random combinations.
pub fn endomorphism_probe<F: Field>(m: &CofilteredModule<F>, random_probes: usize, seed: u64) -> Result<EndoProbe, Error> {
    let field = m.field();
    if let Some(&x) = m.flabby_failures().first() {
        return Err(Error::NotFlabby(format!("vertex {}", x)));
    }
    let all: BTreeSet<usize> = (0..m.len()).collect();
    let global = limit(m, &all);
    let dims = global.module.dims().to_vec();
    let mats = endomorphism_basis(m, &global)?;
    let combine = |coeffs: &[F::Elem]| -> Vec<Matrix<F>> {
        (0..dims.len())
            .map(|j| {
                let mut acc = Matrix::zeros(field, dims[j], dims[j]);
                for (c, e) in coeffs.iter().zip(&mats) {
                    if !field.is_zero(c) {
                        acc = acc.add(field, &e[j].scale(field, c));
                    }
                }
                acc
            })
            .collect()
    };
    let mut probes: Vec<Vec<F::Elem>> = Vec::new();
    let n = mats.len();
    let unit = |i: usize| -> Vec<F::Elem> { (0..n).map(|k| if k == i { field.one() } else { field.zero() }).collect() };
    for i in 0..n {
        probes.push(unit(i));
    }
    for i in 0..n {
        for k in (i + 1)..n {
            let mut v = unit(i);
            v[k] = field.one();
            probes.push(v);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_probes {
        probes.push((0..n).map(|_| field.from_i64((rng.next_u32() % 7) as i64 - 3)).collect());
    }
    let mut witness = None;
    for (p, coeffs) in probes.iter().enumerate() {
        let e = combine(coeffs);
        let nilpotent = e.iter().all(|b| matrix_power(field, b, b.rows()).is_zero(field));
        let invertible = e.iter().all(|b| b.rank(field) == b.rows());
        if !nilpotent && !invertible {
            witness = Some(p);
            break;
        }
    }
    Ok(EndoProbe { dimension: n, probes: probes.len(), local: witness.is_none(), witness })
}

/// Basis of degree-0 endomorphisms of the global piece preserving the
/// cofiltered and component structure, as per-degree matrices.
pub fn endomorphism_basis<F: Field>(m: &CofilteredModule<F>, global: &crate::cofiltered::Limit<F>) -> Result<Vec<Vec<Matrix<F>>>, Error> {
    let field = m.field();
    let g = &global.module;
    let slots = g.slots();
    let gens = g.minimal_generators(0)?;
    let degrees: Vec<i64> = gens.iter().map(|x| x.0).collect();
    let vectors: Vec<Vec<F::Elem>> = gens.into_iter().map(|x| x.1).collect();
    let (free, pi) = g.free_map_from(&degrees, &vectors);
    let gslots: Vec<usize> = degrees.iter().map(|&d| (d / 2) as usize).collect();
    let mut unknown_offsets = Vec::with_capacity(gslots.len());
    let mut nunknowns = 0;
    for &jg in &gslots {
        unknown_offsets.push(nunknowns);
        nunknowns += g.dims()[jg];
    }
    let table = MonomialTable::new(g.nvars(), slots);
    let mut mono_cache: BTreeMap<(usize, Vec<u32>), Matrix<F>> = BTreeMap::new();
    // A_μ : G_{2j0} → G_{2j0 + 2|μ|}
    fn mono_action<F: Field>(g: &DegreewiseModule<F>, cache: &mut BTreeMap<(usize, Vec<u32>), Matrix<F>>, j0: usize, mono: &[u32]) -> Matrix<F> {
        let key = (j0, mono.to_vec());
        if let Some(m) = cache.get(&key) {
            return m.clone();
        }
        let total: u32 = mono.iter().sum();
        let out = if total == 0 {
            Matrix::identity(g.field(), g.dims()[j0])
        } else {
            let var = mono.iter().position(|&e| e > 0).unwrap();
            let mut down = mono.to_vec();
            down[var] -= 1;
            let inner = mono_action(g, cache, j0, &down);
            g.action(j0 + total as usize - 1, var).mul(g.field(), &inner)
        };
        cache.insert(key, out.clone());
        out
    }
    // Φ_j(c) as a (dim G_j × unknowns) matrix, for c ∈ F_j
    let mut phi = |j: usize, c: &[F::Elem]| -> Matrix<F> {
        let mut out = Matrix::zeros(field, g.dims()[j], nunknowns);
        let mut pos = 0;
        for (k, &jg) in gslots.iter().enumerate() {
            if jg > j {
                continue;
            }
            let monos = table.monomials(j - jg);
            let mut acc = Matrix::zeros(field, g.dims()[j], g.dims()[jg]);
            for (t, mono) in monos.iter().enumerate() {
                let coef = &c[pos + t];
                if !field.is_zero(coef) {
                    acc = acc.add(field, &mono_action(g, &mut mono_cache, jg, mono).scale(field, coef));
                }
            }
            out.paste(&acc, 0, unknown_offsets[k]);
            pos += monos.len();
        }
        out
    };
    let mut rows: Vec<Matrix<F>> = Vec::new();
    // relations
    let (kmod, kincl) = pi.kernel(&free);
    for (d, v) in kmod.minimal_generators(0)? {
        let j = (d / 2) as usize;
        let r = kincl.block(j).mul_vec(field, &v);
        rows.push(phi(j, &r));
    }
    // lift of an element of G_j to F_j
    let lift = |j: usize, v: &[F::Elem]| -> Result<Vec<F::Elem>, Error> { pi.block(j).preimage_solve(field, v) };
    // submodules to preserve, with the maps whose kernels they are
    let mut preserve: Vec<GradedMap<F>> = Vec::new();
    for x in 0..m.len() {
        let at = limit(m, &m.order().down_set(x));
        preserve.push(restrict_limit(m, global, &at));
    }
    let orbits: BTreeSet<usize> = (0..m.len()).flat_map(|x| m.components(x).iter().map(|c| c.orbit)).collect();
    for &o in &orbits {
        let parts: Vec<GradedMap<F>> = global
            .maxima
            .iter()
            .enumerate()
            .filter_map(|(i, &a)| m.components(a).iter().find(|c| c.orbit == o).map(|c| c.map.compose(field, &global.project(i))))
            .collect();
        if parts.is_empty() {
            continue;
        }
        let refs: Vec<&GradedMap<F>> = parts.iter().collect();
        preserve.push(GradedMap::stack_rows(field, g.dims(), &refs));
    }
    for p in &preserve {
        let (kp, kp_incl) = p.kernel(g);
        for (d, v) in kp.minimal_generators(0)? {
            let j = (d / 2) as usize;
            let gv = kp_incl.block(j).mul_vec(field, &v);
            let c = lift(j, &gv)?;
            rows.push(p.block(j).mul(field, &phi(j, &c)));
        }
    }
    let refs: Vec<&Matrix<F>> = rows.iter().collect();
    let system = Matrix::vstack(field, nunknowns, &refs);
    let solutions = system.kernel_basis(field);
    // right inverses of π per degree
    let sections: Vec<Matrix<F>> = (0..slots)
        .map(|j| pi.block(j).preimage_solve_many(field, &Matrix::identity(field, g.dims()[j])))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(solutions.len());
    for s in &solutions {
        let images: Vec<Vec<F::Elem>> =
            gslots.iter().enumerate().map(|(k, &jg)| s[unknown_offsets[k]..unknown_offsets[k] + g.dims()[jg]].to_vec()).collect();
        let (_, phi_s) = g.free_map_from(&degrees, &images);
        out.push((0..slots).map(|j| phi_s.block(j).mul(field, &sections[j])).collect());
    }
    Ok(out)
}

/// The endomorphism of a flabby module induced at every vertex by a
/// degree-0 endomorphism `e` of the global piece that preserves the kernels
/// of all restrictions `G → M^{≤x}`.
pub fn induced_endomorphism<F: Field>(
    m: &CofilteredModule<F>,
    global: &crate::cofiltered::Limit<F>,
    e: &[Matrix<F>],
) -> Result<CofilteredMap<F>, Error> {
    let field = m.field();
    let mut maps = Vec::with_capacity(m.len());
    for x in 0..m.len() {
        let at = crate::cofiltered::limit_at(m, x);
        let r = restrict_limit(m, global, &at);
        let blocks = (0..r.slots())
            .map(|j| {
                let rj = r.block(j);
                let lift = rj.preimage_solve_many(field, &Matrix::identity(field, rj.rows()))?;
                let ex = rj.mul(field, &e[j]).mul(field, &lift);
                if rj.mul(field, &e[j]) != ex.mul(field, rj) {
                    return Err(Error::NotEndomorphism(format!("kernel at vertex {} is not preserved", x)));
                }
                Ok(ex)
            })
            .collect::<Result<Vec<_>, Error>>()?;
        maps.push(GradedMap::from_blocks(0, blocks));
    }
    Ok(CofilteredMap { maps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::order::Poset;

    fn chain(n: usize) -> Poset {
        let rel: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Poset::from_relations(n, &rel).unwrap()
    }

    #[test]
    fn fitting_of_projection_on_double_standard() {
        let f = Rationals;
        let order = chain(3);
        let d = CofilteredModule::standard(&f, 2, 4, &order, &[0, 1, 0], 0);
        let dd = CofilteredModule::direct_sum(&[&d, &d]).unwrap();
        let z = CofilteredModule::standard(&f, 2, 4, &order, &[0, 1, 0], 0);
        let proj = CofilteredMap {
            maps: (0..3)
                .map(|x| {
                    let id = GradedMap::identity(z.module(x));
                    let zero = GradedMap::zero(z.module(x), z.module(x));
                    GradedMap::diagonal(&f, &[&id, &zero])
                })
                .collect(),
        };
        let dec = fitting(&dd, &proj).unwrap();
        assert!(fitting_check(&dd, &proj, &dec));
        assert_eq!(dec.image.module(2).dims(), &[1, 2, 3]);
        assert_eq!(dec.kernel.module(2).dims(), &[1, 2, 3]);
        let id = CofilteredMap { maps: (0..3).map(|x| GradedMap::identity(dd.module(x))).collect() };
        let dec = fitting(&dd, &id).unwrap();
        assert!(dec.kernel.module(2).is_zero());
    }

    #[test]
    fn probe_distinguishes_standard_and_double() {
        let f = Rationals;
        let order = chain(3);
        let d = CofilteredModule::standard(&f, 2, 4, &order, &[0, 1, 0], 0);
        let p = endomorphism_probe(&d, 8, 1).unwrap();
        assert!(p.local);
        assert_eq!(p.dimension, 1);
        let dd = CofilteredModule::direct_sum(&[&d, &d]).unwrap();
        let p = endomorphism_probe(&dd, 8, 1).unwrap();
        assert_eq!(p.dimension, 4);
        assert!(!p.local);
    }
}
