//! Graded modules over `S = Sym(X_k)` held degree by degree.
//!
//! `S` is generated in degree 2, so a module is stored by its components in
//! degrees `0, 2, ..., cutoff` together with the matrices of multiplication by
//! each coordinate variable. Every construction here (kernels, images,
//! quotients, sums, covers) is exact in each represented degree.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::field::Field;
use crate::linalg::{Matrix, Subspace};
use crate::Error;

/// Default width of the band below the cutoff in which new generators are
/// refused, in degree units.
pub const DEFAULT_GUARD: i64 = 2;

/// `dim S_degree` for `S` a polynomial ring in `rank` variables of degree 2.
pub fn sym_component_dim(rank: usize, degree: i64) -> Result<usize, Error> {
    if degree < 0 || degree % 2 != 0 {
        return Err(Error::Domain(alloc::format!("degree {} is not a nonnegative even integer", degree)));
    }
    if rank == 0 {
        return Err(Error::Domain("rank must be positive".into()));
    }
    Ok(binomial(degree as usize / 2 + rank - 1, rank - 1))
}

fn binomial(n: usize, k: usize) -> usize {
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Exponent vectors of all monomials of each half-degree, with lookup and
/// multiplication tables.
#[derive(Clone, Debug)]
pub struct MonomialTable {
    nvars: usize,
    monos: Vec<Vec<Vec<u32>>>,
    index: Vec<BTreeMap<Vec<u32>, usize>>,
}

impl MonomialTable {
    pub fn new(nvars: usize, slots: usize) -> Self {
        let mut monos = Vec::with_capacity(slots);
        let mut index = Vec::with_capacity(slots);
        for j in 0..slots {
            let mut list = Vec::new();
            let mut cur = vec![0u32; nvars];
            gen_monos(nvars, j as u32, 0, &mut cur, &mut list);
            let idx = list.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();
            monos.push(list);
            index.push(idx);
        }
        MonomialTable { nvars, monos, index }
    }

    pub fn monomials(&self, half_degree: usize) -> &[Vec<u32>] {
        &self.monos[half_degree]
    }

    pub fn index_of(&self, mono: &[u32]) -> usize {
        let j: u32 = mono.iter().sum();
        self.index[j as usize][mono]
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
}

// Lexicographically decreasing exponent vectors: x0^j first.
fn gen_monos(nvars: usize, remaining: u32, var: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if var + 1 == nvars {
        cur[var] = remaining;
        out.push(cur.clone());
        cur[var] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        cur[var] = e;
        gen_monos(nvars, remaining - e, var + 1, cur, out);
    }
    cur[var] = 0;
}

/// A graded `S`-module truncated at an even cutoff degree.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreewiseModule<F: Field> {
    field: F,
    nvars: usize,
    dims: Vec<usize>,
    /// `action[j][i]` multiplies by variable `i`, from degree `2j` to `2j + 2`.
    action: Vec<Vec<Matrix<F>>>,
}

impl<F: Field> DegreewiseModule<F> {
    pub fn zero(field: &F, nvars: usize, cutoff: i64) -> Self {
        let slots = slots_for(cutoff);
        Self::from_parts(field.clone(), nvars, vec![0; slots], |_, _, _| Matrix::zeros(field, 0, 0))
    }

    /// The free module `S`.
    pub fn ring(field: &F, nvars: usize, cutoff: i64) -> Self {
        Self::free(field, nvars, cutoff, &[0])
    }

    /// `⊕ S[-d]` over the given (even, nonnegative) generator degrees. The
    /// basis in each degree lists, generator by generator, the monomials of
    /// the complementary degree in [`MonomialTable`] order.
    pub fn free(field: &F, nvars: usize, cutoff: i64, gen_degrees: &[i64]) -> Self {
        let slots = slots_for(cutoff);
        let table = MonomialTable::new(nvars, slots);
        let gens: Vec<usize> = gen_degrees.iter().map(|&d| (d / 2) as usize).collect();
        let offsets = free_offsets(&table, slots, &gens);
        let dims: Vec<usize> = offsets.iter().map(|o| *o.last().unwrap()).collect();
        let mut action = Vec::with_capacity(slots.saturating_sub(1));
        for j in 0..slots.saturating_sub(1) {
            let mut per_var = Vec::with_capacity(nvars);
            for i in 0..nvars {
                let mut m = Matrix::zeros(field, dims[j + 1], dims[j]);
                for (g, &jg) in gens.iter().enumerate() {
                    if jg > j {
                        continue;
                    }
                    for (k, mono) in table.monomials(j - jg).iter().enumerate() {
                        let mut up = mono.clone();
                        up[i] += 1;
                        let row = offsets[j + 1][g] + table.index_of(&up);
                        m.set(row, offsets[j][g] + k, field.one());
                    }
                }
                per_var.push(m);
            }
            action.push(per_var);
        }
        DegreewiseModule { field: field.clone(), nvars, dims, action }
    }

    fn from_parts(
        field: F,
        nvars: usize,
        dims: Vec<usize>,
        mut mk: impl FnMut(usize, usize, &[usize]) -> Matrix<F>,
    ) -> Self {
        let slots = dims.len();
        let mut action = Vec::new();
        for j in 0..slots.saturating_sub(1) {
            action.push((0..nvars).map(|i| mk(j, i, &dims)).collect());
        }
        let mut m = DegreewiseModule { field, nvars, dims, action };
        for j in 0..m.action.len() {
            for i in 0..nvars {
                if m.action[j][i].rows() != m.dims[j + 1] || m.action[j][i].cols() != m.dims[j] {
                    m.action[j][i] = Matrix::zeros(&m.field, m.dims[j + 1], m.dims[j]);
                }
            }
        }
        m
    }

    /// Builds a module from explicit action matrices; checks shapes only.
    pub fn from_action(field: &F, nvars: usize, dims: Vec<usize>, action: Vec<Vec<Matrix<F>>>) -> Self {
        assert_eq!(action.len(), dims.len().saturating_sub(1));
        for (j, per_var) in action.iter().enumerate() {
            assert_eq!(per_var.len(), nvars);
            for a in per_var {
                assert_eq!((a.rows(), a.cols()), (dims[j + 1], dims[j]), "action matrix shape");
            }
        }
        DegreewiseModule { field: field.clone(), nvars, dims, action }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of represented degrees (`cutoff / 2 + 1`).
    pub fn slots(&self) -> usize {
        self.dims.len()
    }

    pub fn cutoff(&self) -> i64 {
        2 * (self.dims.len() as i64 - 1)
    }

    /// Dimensions indexed by half-degree.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_in_degree(&self, degree: i64) -> usize {
        if degree < 0 || degree % 2 != 0 {
            return 0;
        }
        self.dims.get(degree as usize / 2).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Multiplication by variable `var` from half-degree `j` to `j + 1`.
    pub fn action(&self, j: usize, var: usize) -> &Matrix<F> {
        &self.action[j][var]
    }

    /// Checks that the variable actions commute, i.e. that this is a module
    /// over a commutative polynomial ring.
    pub fn check_commutes(&self) -> bool {
        let f = &self.field;
        for j in 0..self.slots().saturating_sub(2) {
            for a in 0..self.nvars {
                for b in (a + 1)..self.nvars {
                    let ab = self.action[j + 1][a].mul(f, &self.action[j][b]);
                    let ba = self.action[j + 1][b].mul(f, &self.action[j][a]);
                    if ab != ba {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Matrix of multiplication by the linear form with the given integer
    /// coefficients, from half-degree `j` to `j + 1`.
    pub fn form_matrix(&self, j: usize, coeffs: &[i64]) -> Matrix<F> {
        assert_eq!(coeffs.len(), self.nvars, "label length must equal lattice rank");
        let f = &self.field;
        let mut m = Matrix::zeros(f, self.dims[j + 1], self.dims[j]);
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 && f.from_i64(c) != f.zero() {
                m = m.add(f, &self.action[j][i].scale(f, &f.from_i64(c)));
            }
        }
        m
    }

    /// Degree-2 map "multiply by the linear form".
    pub fn apply_form(&self, coeffs: &[i64]) -> GradedMap<F> {
        let blocks = (0..self.slots().saturating_sub(1)).map(|j| self.form_matrix(j, coeffs)).collect();
        GradedMap { shift: 1, blocks }
    }

    /// The subspaces `λ·M_{d-2} ⊂ M_d`.
    pub fn form_image(&self, coeffs: &[i64]) -> Vec<Subspace<F>> {
        let f = &self.field;
        (0..self.slots())
            .map(|j| {
                if j == 0 {
                    Subspace::zero(f, self.dims[0])
                } else {
                    Subspace::column_space(f, &self.form_matrix(j - 1, coeffs))
                }
            })
            .collect()
    }

    /// `𝔪M` in each degree: the span of all variable images of the degree below.
    pub fn decomposables(&self) -> Vec<Subspace<F>> {
        let f = &self.field;
        (0..self.slots())
            .map(|j| {
                if j == 0 || self.dims[j - 1] == 0 {
                    Subspace::zero(f, self.dims[j])
                } else {
                    let refs: Vec<&Matrix<F>> = self.action[j - 1].iter().collect();
                    Subspace::column_space(f, &Matrix::hstack(f, self.dims[j], &refs))
                }
            })
            .collect()
    }

    /// Submodule spanned by the given per-degree subspaces, which must be
    /// closed under the action. Returns the module and its inclusion.
    pub fn submodule(&self, subs: &[Subspace<F>]) -> (Self, GradedMap<F>) {
        assert_eq!(subs.len(), self.slots());
        let f = &self.field;
        let dims: Vec<usize> = subs.iter().map(|s| s.dim()).collect();
        let mut action = Vec::with_capacity(self.slots().saturating_sub(1));
        for j in 0..self.slots().saturating_sub(1) {
            let incl = subs[j].inclusion_matrix();
            let coords = subs[j + 1].coord_matrix(f);
            let per_var = (0..self.nvars)
                .map(|i| {
                    let img = self.action[j][i].mul(f, &incl);
                    debug_assert!((0..img.cols()).all(|c| subs[j + 1].contains(f, &img.col(c))), "subspace not closed under action");
                    coords.mul(f, &img)
                })
                .collect();
            action.push(per_var);
        }
        let blocks = subs.iter().map(|s| s.inclusion_matrix()).collect();
        (DegreewiseModule { field: f.clone(), nvars: self.nvars, dims, action }, GradedMap { shift: 0, blocks })
    }

    /// Quotient by per-degree subspaces closed under the action. Returns the
    /// quotient module and the projection.
    pub fn quotient(&self, subs: &[Subspace<F>]) -> (Self, GradedMap<F>) {
        assert_eq!(subs.len(), self.slots());
        let f = &self.field;
        let qs: Vec<Matrix<F>> = subs.iter().map(|s| s.quotient_matrix(f)).collect();
        let dims: Vec<usize> = qs.iter().map(|q| q.rows()).collect();
        let mut action = Vec::with_capacity(self.slots().saturating_sub(1));
        for j in 0..self.slots().saturating_sub(1) {
            let np = subs[j].non_pivots();
            let per_var = (0..self.nvars)
                .map(|i| qs[j + 1].mul(f, &self.action[j][i].select_cols(&np)))
                .collect();
            action.push(per_var);
        }
        (DegreewiseModule { field: f.clone(), nvars: self.nvars, dims, action }, GradedMap { shift: 0, blocks: qs })
    }

    /// Quotient `M / λM`.
    pub fn quotient_by_form(&self, coeffs: &[i64]) -> (Self, GradedMap<F>) {
        self.quotient(&self.form_image(coeffs))
    }

    /// Direct sum with block-diagonal action.
    pub fn direct_sum(field: &F, nvars: usize, cutoff: i64, mods: &[&Self]) -> Self {
        let slots = slots_for(cutoff);
        let dims: Vec<usize> = (0..slots).map(|j| mods.iter().map(|m| m.dims[j]).sum()).collect();
        let mut action = Vec::with_capacity(slots.saturating_sub(1));
        for j in 0..slots.saturating_sub(1) {
            let per_var = (0..nvars)
                .map(|i| {
                    let mut a = Matrix::zeros(field, dims[j + 1], dims[j]);
                    let (mut r, mut c) = (0, 0);
                    for m in mods {
                        a.paste(&m.action[j][i], r, c);
                        r += m.dims[j + 1];
                        c += m.dims[j];
                    }
                    a
                })
                .collect();
            action.push(per_var);
        }
        DegreewiseModule { field: field.clone(), nvars, dims, action }
    }

    /// Graded pieces of the minimal generators: for each degree, unit vectors
    /// completing `𝔪M` (chosen at the non-pivot columns, so deterministic).
    /// Fails with `CutoffTooLow` if a generator lies within `guard` of the
    /// cutoff.
    pub fn minimal_generators(&self, guard: i64) -> Result<Vec<(i64, Vec<F::Elem>)>, Error> {
        let f = &self.field;
        let mut gens = Vec::new();
        for (j, dec) in self.decomposables().iter().enumerate() {
            for c in dec.non_pivots() {
                let degree = 2 * j as i64;
                if degree > self.cutoff() - guard {
                    return Err(Error::CutoffTooLow { degree, cutoff: self.cutoff(), guard });
                }
                let mut v = vec![f.zero(); self.dims[j]];
                v[c] = f.one();
                gens.push((degree, v));
            }
        }
        Ok(gens)
    }

    /// Free module on the minimal generators with the surjection onto `self`.
    pub fn projective_cover(&self, guard: i64) -> Result<ProjectiveCover<F>, Error> {
        let gens = self.minimal_generators(guard)?;
        let degrees: Vec<i64> = gens.iter().map(|g| g.0).collect();
        let vectors: Vec<Vec<F::Elem>> = gens.into_iter().map(|g| g.1).collect();
        let (free, map) = self.free_map_from(&degrees, &vectors);
        Ok(ProjectiveCover { rank: RankPolynomial::from_degrees(&degrees), generator_degrees: degrees, free, map })
    }

    /// The free module on generators of the given degrees and the map sending
    /// the `g`-th basis generator to `images[g]` (a vector in that degree).
    pub fn free_map_from(&self, degrees: &[i64], images: &[Vec<F::Elem>]) -> (Self, GradedMap<F>) {
        let f = &self.field;
        let slots = self.slots();
        let free = Self::free(f, self.nvars, self.cutoff(), degrees);
        let table = MonomialTable::new(self.nvars, slots);
        let gens: Vec<usize> = degrees.iter().map(|&d| (d / 2) as usize).collect();
        let offsets = free_offsets(&table, slots, &gens);
        // images of (generator, monomial) basis vectors, built upward in degree
        let mut cols: Vec<Vec<Vec<F::Elem>>> = Vec::with_capacity(slots);
        for j in 0..slots {
            let mut cj: Vec<Vec<F::Elem>> = vec![Vec::new(); free.dims[j]];
            for (g, &jg) in gens.iter().enumerate() {
                if jg > j {
                    continue;
                }
                for (k, mono) in table.monomials(j - jg).iter().enumerate() {
                    let v = if j == jg {
                        images[g].clone()
                    } else {
                        let var = mono.iter().position(|&e| e > 0).unwrap();
                        let mut down = mono.clone();
                        down[var] -= 1;
                        let src = &cols[j - 1][offsets[j - 1][g] + table.index_of(&down)];
                        self.action[j - 1][var].mul_vec(f, src)
                    };
                    cj[offsets[j][g] + k] = v;
                }
            }
            cols.push(cj);
        }
        let blocks = (0..slots).map(|j| Matrix::from_col_vecs(f, self.dims[j], &cols[j])).collect();
        (free, GradedMap { shift: 0, blocks })
    }

    /// Whether `self` has the Hilbert function of the free module on the given
    /// generator degrees.
    pub fn hilbert_matches_free(&self, degrees: &[i64]) -> bool {
        (0..self.slots()).all(|j| {
            let expected: usize = degrees
                .iter()
                .filter(|&&d| d <= 2 * j as i64)
                .map(|&d| sym_component_dim(self.nvars, 2 * j as i64 - d).unwrap())
                .sum();
            expected == self.dims[j]
        })
    }

    /// Number of minimal generators per degree (`dim (M/𝔪M)_d`), without the
    /// guard check.
    pub fn generator_counts(&self) -> Vec<usize> {
        self.decomposables().iter().enumerate().map(|(j, s)| self.dims[j] - s.dim()).collect()
    }
}

fn slots_for(cutoff: i64) -> usize {
    assert!(cutoff >= 0 && cutoff % 2 == 0, "cutoff must be a nonnegative even integer");
    cutoff as usize / 2 + 1
}

fn free_offsets(table: &MonomialTable, slots: usize, gens: &[usize]) -> Vec<Vec<usize>> {
    (0..slots)
        .map(|j| {
            let mut off = Vec::with_capacity(gens.len() + 1);
            let mut acc = 0;
            for &jg in gens {
                off.push(acc);
                if jg <= j {
                    acc += table.monomials(j - jg).len();
                }
            }
            off.push(acc);
            off
        })
        .collect()
}

/// A homogeneous map of graded modules of degree `2 * shift`.
/// `blocks[j]` maps the source component of half-degree `j` to the target
/// component of half-degree `j + shift`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMap<F: Field> {
    shift: usize,
    blocks: Vec<Matrix<F>>,
}

impl<F: Field> GradedMap<F> {
    pub fn from_blocks(shift: usize, blocks: Vec<Matrix<F>>) -> Self {
        GradedMap { shift, blocks }
    }

    pub fn zero(src: &DegreewiseModule<F>, dst: &DegreewiseModule<F>) -> Self {
        let f = &src.field;
        let blocks = (0..src.slots()).map(|j| Matrix::zeros(f, dst.dims[j], src.dims[j])).collect();
        GradedMap { shift: 0, blocks }
    }

    pub fn identity(m: &DegreewiseModule<F>) -> Self {
        let blocks = m.dims.iter().map(|&d| Matrix::identity(&m.field, d)).collect();
        GradedMap { shift: 0, blocks }
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn block(&self, j: usize) -> &Matrix<F> {
        &self.blocks[j]
    }

    pub fn blocks(&self) -> &[Matrix<F>] {
        &self.blocks
    }

    pub fn slots(&self) -> usize {
        self.blocks.len()
    }

    /// `self ∘ other`.
    pub fn compose(&self, f: &F, other: &Self) -> Self {
        assert_eq!(self.shift, 0, "composition only of degree-preserving maps");
        assert_eq!(other.shift, 0, "composition only of degree-preserving maps");
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.mul(f, b)).collect();
        GradedMap { shift: 0, blocks }
    }

    pub fn add(&self, f: &F, other: &Self) -> Self {
        assert_eq!(self.shift, other.shift);
        GradedMap { shift: self.shift, blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.add(f, b)).collect() }
    }

    pub fn sub(&self, f: &F, other: &Self) -> Self {
        assert_eq!(self.shift, other.shift);
        GradedMap { shift: self.shift, blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.sub(f, b)).collect() }
    }

    pub fn scale(&self, f: &F, c: &F::Elem) -> Self {
        GradedMap { shift: self.shift, blocks: self.blocks.iter().map(|a| a.scale(f, c)).collect() }
    }

    pub fn is_zero(&self, f: &F) -> bool {
        self.blocks.iter().all(|b| b.is_zero(f))
    }

    /// Checks that the map commutes with the variable actions.
    pub fn is_module_map(&self, src: &DegreewiseModule<F>, dst: &DegreewiseModule<F>) -> bool {
        let f = &src.field;
        for j in 0..self.blocks.len() {
            let b = &self.blocks[j];
            if b.rows() != dst.dim_in_degree(2 * (j + self.shift) as i64) || b.cols() != src.dims[j] {
                return false;
            }
        }
        for j in 0..src.slots().saturating_sub(1) {
            if j + 1 >= self.blocks.len() {
                break;
            }
            for i in 0..src.nvars {
                let lhs = dst.action[j + self.shift][i].mul(f, &self.blocks[j]);
                let rhs = self.blocks[j + 1].mul(f, &src.action[j][i]);
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    /// Kernel subspaces of a degree-preserving map.
    pub fn kernel_subspaces(&self, f: &F) -> Vec<Subspace<F>> {
        self.blocks.iter().map(|b| Subspace::kernel_of(f, b)).collect()
    }

    /// Image subspaces of the map, indexed by the target half-degree.
    pub fn image_subspaces(&self, f: &F, dst: &DegreewiseModule<F>) -> Vec<Subspace<F>> {
        (0..dst.slots())
            .map(|j| {
                if j < self.shift || j - self.shift >= self.blocks.len() {
                    Subspace::zero(f, dst.dims[j])
                } else {
                    Subspace::column_space(f, &self.blocks[j - self.shift])
                }
            })
            .collect()
    }

    pub fn kernel(&self, src: &DegreewiseModule<F>) -> (DegreewiseModule<F>, GradedMap<F>) {
        src.submodule(&self.kernel_subspaces(&src.field))
    }

    pub fn image(&self, dst: &DegreewiseModule<F>) -> (DegreewiseModule<F>, GradedMap<F>) {
        dst.submodule(&self.image_subspaces(&dst.field, dst))
    }

    /// Per-degree ranks.
    pub fn ranks(&self, f: &F) -> Vec<usize> {
        self.blocks.iter().map(|b| b.rank(f)).collect()
    }

    pub fn is_surjective(&self, f: &F) -> bool {
        self.blocks.iter().all(|b| b.rank(f) == b.rows())
    }

    pub fn is_injective(&self, f: &F) -> bool {
        self.blocks.iter().all(|b| b.rank(f) == b.cols())
    }

    /// Map into a direct sum, stacking the components vertically.
    pub fn stack_rows(f: &F, src_dims: &[usize], maps: &[&Self]) -> Self {
        let blocks = (0..src_dims.len())
            .map(|j| {
                let parts: Vec<&Matrix<F>> = maps.iter().map(|m| &m.blocks[j]).collect();
                Matrix::vstack(f, src_dims[j], &parts)
            })
            .collect();
        GradedMap { shift: 0, blocks }
    }

    /// Map out of a direct sum, placing the components side by side.
    pub fn stack_cols(f: &F, dst_dims: &[usize], maps: &[&Self]) -> Self {
        let blocks = (0..dst_dims.len())
            .map(|j| {
                let parts: Vec<&Matrix<F>> = maps.iter().map(|m| &m.blocks[j]).collect();
                Matrix::hstack(f, dst_dims[j], &parts)
            })
            .collect();
        GradedMap { shift: 0, blocks }
    }

    /// Block-diagonal sum of maps.
    pub fn diagonal(f: &F, maps: &[&Self]) -> Self {
        let slots = maps.first().map_or(0, |m| m.blocks.len());
        let blocks = (0..slots)
            .map(|j| {
                let rows = maps.iter().map(|m| m.blocks[j].rows()).sum();
                let cols = maps.iter().map(|m| m.blocks[j].cols()).sum();
                let mut b = Matrix::zeros(f, rows, cols);
                let (mut r, mut c) = (0, 0);
                for m in maps {
                    b.paste(&m.blocks[j], r, c);
                    r += m.blocks[j].rows();
                    c += m.blocks[j].cols();
                }
                b
            })
            .collect();
        GradedMap { shift: 0, blocks }
    }

    /// Selects the rows `offset..offset+len` in every degree (projection from
    /// a direct sum when the offsets are per degree).
    pub fn row_block(&self, offsets: &[usize], lens: &[usize]) -> Self {
        let blocks = self.blocks.iter().enumerate().map(|(j, b)| b.block(offsets[j], lens[j], 0, b.cols())).collect();
        GradedMap { shift: self.shift, blocks }
    }

    /// Selects columns per degree (restriction to a summand of the source).
    pub fn col_block(&self, offsets: &[usize], lens: &[usize]) -> Self {
        let blocks = self.blocks.iter().enumerate().map(|(j, b)| b.block(0, b.rows(), offsets[j], lens[j])).collect();
        GradedMap { shift: self.shift, blocks }
    }
}

/// Result of [`DegreewiseModule::projective_cover`].
#[derive(Clone, Debug)]
pub struct ProjectiveCover<F: Field> {
    pub rank: RankPolynomial,
    pub generator_degrees: Vec<i64>,
    pub free: DegreewiseModule<F>,
    pub map: GradedMap<F>,
}

/// Graded rank of a free module: `Σ c_j q^j` for `⊕ S[-2j]^{c_j}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankPolynomial {
    coeffs: BTreeMap<i64, u64>,
}

impl RankPolynomial {
    pub fn new(coeffs: BTreeMap<i64, u64>) -> Self {
        let coeffs = coeffs.into_iter().filter(|&(_, c)| c != 0).collect();
        RankPolynomial { coeffs }
    }

    pub fn one() -> Self {
        Self::from_degrees(&[0])
    }

    pub fn from_degrees(degrees: &[i64]) -> Self {
        let mut coeffs = BTreeMap::new();
        for &d in degrees {
            *coeffs.entry(d.div_euclid(2)).or_insert(0) += 1;
        }
        RankPolynomial { coeffs }
    }

    pub fn coefficients(&self) -> &BTreeMap<i64, u64> {
        &self.coeffs
    }

    pub fn coefficient(&self, exponent: i64) -> u64 {
        self.coeffs.get(&exponent).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Value at `q = 1`, i.e. the total rank.
    pub fn total(&self) -> u64 {
        self.coeffs.values().sum()
    }
}

impl fmt::Display for RankPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, &c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (e, c) {
                (0, c) => write!(f, "{}", c)?,
                (1, 1) => write!(f, "q")?,
                (1, c) => write!(f, "{}q", c)?,
                (e, 1) => write!(f, "q^{}", e)?,
                (e, c) => write!(f, "{}q^{}", c, e)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;

    #[test]
    fn sym_dims() {
        assert_eq!(sym_component_dim(1, 0), Ok(1));
        assert_eq!(sym_component_dim(2, 4), Ok(3));
        assert_eq!(sym_component_dim(3, 2), Ok(3));
        assert!(sym_component_dim(2, 3).is_err());
        assert!(sym_component_dim(2, -2).is_err());
    }

    #[test]
    fn free_module_commutes_and_has_right_dims() {
        let f = Rationals;
        let m = DegreewiseModule::free(&f, 3, 8, &[0, 2]);
        assert!(m.check_commutes());
        assert_eq!(m.dims(), &[1, 4, 9, 16, 25]);
        assert!(m.hilbert_matches_free(&[0, 2]));
    }

    #[test]
    fn apply_form_cokernels() {
        let f = Rationals;
        let s1 = DegreewiseModule::ring(&f, 1, 8);
        assert_eq!(s1.quotient_by_form(&[1]).0.dims(), &[1, 0, 0, 0, 0]);
        let ss = DegreewiseModule::free(&f, 1, 8, &[0, 0]);
        assert_eq!(ss.quotient_by_form(&[1]).0.dims(), &[2, 0, 0, 0, 0]);
        let s2 = DegreewiseModule::ring(&f, 2, 8);
        let (q, proj) = s2.quotient_by_form(&[1, 0]);
        assert_eq!(q.dims(), &[1, 1, 1, 1, 1]);
        assert!(q.check_commutes());
        assert!(proj.is_module_map(&s2, &q));
        assert!(s2.apply_form(&[1, -1]).is_module_map(&s2, &s2));
    }

    #[test]
    fn generators_of_ring_and_quotient() {
        let f = Rationals;
        let s = DegreewiseModule::ring(&f, 2, 6);
        let g = s.minimal_generators(DEFAULT_GUARD).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].0, 0);
        let (q, _) = s.quotient_by_form(&[1, 0]);
        let cover = q.projective_cover(DEFAULT_GUARD).unwrap();
        assert_eq!(cover.rank, RankPolynomial::one());
        assert!(cover.map.is_surjective(&f));
        assert!(cover.map.is_module_map(&cover.free, &q));
    }

    #[test]
    fn cutoff_too_low_is_loud() {
        let f = Rationals;
        let m = DegreewiseModule::free(&f, 1, 6, &[6]);
        assert!(matches!(m.minimal_generators(DEFAULT_GUARD), Err(Error::CutoffTooLow { degree: 6, .. })));
    }

    #[test]
    fn rank_polynomial_display() {
        assert_eq!(alloc::format!("{}", RankPolynomial::from_degrees(&[0, 2])), "1 + q");
        assert_eq!(alloc::format!("{}", RankPolynomial::from_degrees(&[2, 2, 4])), "2q + q^2");
    }
}
