//! Finite Weyl groups in the reflection representation, Bruhat order and
//! Kazhdan-Lusztig polynomials. Shares nothing with the alcove code beyond
//! exact linear algebra.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::BigRational;

use crate::field::{Field, Rationals};
use crate::linalg::Matrix;
use crate::Error;

/// `cartan[i][j] = ⟨α_j, α_i∨⟩`.
fn cartan_matrix(name: &str) -> Result<Vec<Vec<i64>>, Error> {
    Ok(match name {
        "A1" => vec![vec![2]],
        "A2" => vec![vec![2, -1], vec![-1, 2]],
        "A3" => vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]],
        "B2" => vec![vec![2, -2], vec![-1, 2]],
        "G2" => vec![vec![2, -1], vec![-3, 2]],
        _ => return Err(Error::UnsupportedType(String::from(name))),
    })
}

/// A Coxeter group of finite type given by its elements as matrices on the
/// root space.
#[derive(Clone, Debug)]
pub struct Coxeter {
    rank: usize,
    elements: Vec<Matrix<Rationals>>,
    lengths: Vec<usize>,
    /// `left[i][x]` is the index of `s_i x`.
    left: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    names: Vec<String>,
}

impl Coxeter {
    /// Closure of the simple reflections; supports A1, A2, A3, B2 and G2.
    pub fn new(name: &str) -> Result<Self, Error> {
        let f = Rationals;
        let cartan = cartan_matrix(name)?;
        let rank = cartan.len();
        // s_i(α_j) = α_j − ⟨α_j, α_i∨⟩ α_i, columns are images of α_j
        let simple: Vec<Matrix<Rationals>> = (0..rank)
            .map(|i| {
                let mut m = Matrix::identity(&f, rank);
                for j in 0..rank {
                    let v = f.sub(m.get(i, j), &f.from_i64(cartan[i][j]));
                    m.set(i, j, v);
                }
                m
            })
            .collect();
        let key = |m: &Matrix<Rationals>| -> Vec<BigRational> { (0..rank).flat_map(|i| m.row(i).to_vec()).collect() };
        let mut index: BTreeMap<Vec<BigRational>, usize> = BTreeMap::new();
        let mut elements = vec![Matrix::identity(&f, rank)];
        index.insert(key(&elements[0]), 0);
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for s in &simple {
                let y = s.mul(&f, &elements[x]);
                let k = key(&y);
                if !index.contains_key(&k) {
                    index.insert(k, elements.len());
                    frontier.push(elements.len());
                    elements.push(y);
                }
            }
        }
        let left: Vec<Vec<usize>> =
            simple.iter().map(|s| elements.iter().map(|e| index[&key(&s.mul(&f, e))]).collect()).collect();
        let roots = root_orbit(&f, &simple, rank);
        let positive: Vec<&Vec<i64>> = roots.iter().filter(|r| r.iter().all(|&c| c >= 0)).collect();
        let lengths = elements
            .iter()
            .map(|e| {
                positive
                    .iter()
                    .filter(|r| {
                        let v: Vec<BigRational> = r.iter().map(|&c| f.from_i64(c)).collect();
                        e.mul_vec(&f, &v).iter().any(|c| *c < f.zero())
                    })
                    .count()
            })
            .collect::<Vec<_>>();
        let inverse = elements
            .iter()
            .map(|e| elements.iter().position(|g| e.mul(&f, g) == Matrix::identity(&f, rank)).unwrap())
            .collect();
        let mut cox = Coxeter { rank, elements, lengths, left, inverse, names: Vec::new() };
        cox.names = (0..cox.len()).map(|x| cox.compute_name(x)).collect();
        Ok(cox)
    }

    pub fn rank(&self) -> usize {
        self.rank
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

    pub fn matrix(&self, x: usize) -> &Matrix<Rationals> {
        &self.elements[x]
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn longest(&self) -> usize {
        (0..self.len()).max_by_key(|&x| self.lengths[x]).unwrap()
    }

    pub fn inverse(&self, x: usize) -> usize {
        self.inverse[x]
    }

    pub fn left_mul(&self, i: usize, x: usize) -> usize {
        self.left[i][x]
    }

    /// Smallest index `i` with `ℓ(s_i x) < ℓ(x)`.
    pub fn first_left_descent(&self, x: usize) -> Option<usize> {
        (0..self.rank).find(|&i| self.lengths[self.left[i][x]] < self.lengths[x])
    }

    fn compute_name(&self, mut x: usize) -> String {
        let mut word = String::new();
        while let Some(i) = self.first_left_descent(x) {
            word.push_str(&format!("s{}", i + 1));
            x = self.left[i][x];
        }
        if word.is_empty() {
            String::from("e")
        } else {
            word
        }
    }

    /// Lexicographically smallest reduced word, `e` for the identity.
    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    /// Accepts `e`, `longest`, `w0` or any word `s_i s_j ...`.
    pub fn parse(&self, s: &str) -> Result<usize, Error> {
        let t = s.trim();
        match t {
            "e" | "" => return Ok(0),
            "longest" | "w0" => return Ok(self.longest()),
            _ => {}
        }
        let mut x = 0;
        let letters: Vec<&str> = t.split('s').collect();
        if !letters[0].is_empty() {
            return Err(Error::Domain(format!("bad word {}", s)));
        }
        for l in letters.iter().rev().filter(|l| !l.is_empty()) {
            let i: usize = l.parse().map_err(|_| Error::Domain(format!("bad word {}", s)))?;
            if i == 0 || i > self.rank {
                return Err(Error::Domain(format!("bad generator in {}", s)));
            }
            x = self.left[i - 1][x];
        }
        Ok(x)
    }

    /// Bruhat order by the lifting property: with `s` a left descent of `w`,
    /// `x ≤ w` iff `sx ≤ sw` (when `sx < x`) or `x ≤ sw` (otherwise).
    pub fn bruhat_table(&self) -> Vec<Vec<bool>> {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&x| self.lengths[x]);
        let mut leq = vec![vec![false; n]; n];
        for &w in &order {
            match self.first_left_descent(w) {
                None => leq[0][w] = true,
                Some(i) => {
                    let sw = self.left[i][w];
                    for x in 0..n {
                        let sx = self.left[i][x];
                        leq[x][w] = if self.lengths[sx] < self.lengths[x] { leq[sx][sw] } else { leq[x][sw] };
                    }
                }
            }
        }
        leq
    }
}

fn root_orbit(f: &Rationals, simple: &[Matrix<Rationals>], rank: usize) -> Vec<Vec<i64>> {
    use num_traits::ToPrimitive;
    let mut roots: Vec<Vec<i64>> = (0..rank).map(|i| (0..rank).map(|j| i64::from(i == j)).collect()).collect();
    let mut k = 0;
    while k < roots.len() {
        for s in simple {
            let v: Vec<BigRational> = roots[k].iter().map(|&c| f.from_i64(c)).collect();
            let img: Vec<i64> = s.mul_vec(f, &v).iter().map(|c| c.to_integer().to_i64().unwrap()).collect();
            if !roots.contains(&img) {
                roots.push(img);
            }
        }
        k += 1;
    }
    roots
}

/// An integer polynomial in `q`, coefficients by exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct KlPoly {
    coeffs: Vec<i64>,
}

impl KlPoly {
    pub fn from_coeffs(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        KlPoly { coeffs }
    }

    pub fn one() -> Self {
        KlPoly { coeffs: vec![1] }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coefficient(&self, e: usize) -> i64 {
        self.coeffs.get(e).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn add_shifted(&mut self, other: &Self, shift: usize, scale: i64) {
        if self.coeffs.len() < other.coeffs.len() + shift {
            self.coeffs.resize(other.coeffs.len() + shift, 0);
        }
        for (e, c) in other.coeffs.iter().enumerate() {
            self.coeffs[e + shift] += scale * c;
        }
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }
}

impl fmt::Display for KlPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
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

/// All `P_{x,w}` of a group, computed once by the standard recursion.
#[derive(Clone, Debug)]
pub struct KlTable {
    group: Coxeter,
    leq: Vec<Vec<bool>>,
    polys: BTreeMap<(usize, usize), KlPoly>,
}

impl KlTable {
    pub fn new(group: Coxeter) -> Self {
        let leq = group.bruhat_table();
        let n = group.len();
        let mut ws: Vec<usize> = (0..n).collect();
        ws.sort_by_key(|&w| group.length(w));
        let mut polys: BTreeMap<(usize, usize), KlPoly> = BTreeMap::new();
        for &w in &ws {
            let Some(s) = group.first_left_descent(w) else {
                polys.insert((0, 0), KlPoly::one());
                continue;
            };
            let v = group.left_mul(s, w);
            let get = |polys: &BTreeMap<(usize, usize), KlPoly>, a: usize, b: usize| polys.get(&(a, b)).cloned().unwrap_or_default();
            // μ(z, v) for z < v with sz < z
            let corrections: Vec<(usize, i64)> = (0..n)
                .filter(|&z| z != v && leq[z][v] && group.length(group.left_mul(s, z)) < group.length(z))
                .filter_map(|z| {
                    let gap = group.length(v) - group.length(z);
                    if gap % 2 == 0 {
                        return None;
                    }
                    let mu = get(&polys, z, v).coefficient((gap - 1) / 2);
                    (mu != 0).then_some((z, mu))
                })
                .collect();
            for x in 0..n {
                if !leq[x][w] {
                    continue;
                }
                let sx = group.left_mul(s, x);
                let c = usize::from(group.length(sx) < group.length(x));
                let mut p = KlPoly::default();
                p.add_shifted(&get(&polys, sx, v), 1 - c, 1);
                p.add_shifted(&get(&polys, x, v), c, 1);
                for &(z, mu) in &corrections {
                    if leq[x][z] {
                        let shift = (group.length(w) - group.length(z)) / 2;
                        p.add_shifted(&get(&polys, x, z), shift, -mu);
                    }
                }
                polys.insert((x, w), p);
            }
        }
        KlTable { group, leq, polys }
    }

    pub fn group(&self) -> &Coxeter {
        &self.group
    }

    pub fn bruhat_leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    /// `P_{x,w}`, failing when `x ≰ w`.
    pub fn polynomial(&self, x: usize, w: usize) -> Result<&KlPoly, Error> {
        self.polys.get(&(x, w)).ok_or(Error::NotComparable)
    }

    /// `(x, P_{x,w})` for all `x ≤ w`.
    pub fn column(&self, w: usize) -> Vec<(usize, &KlPoly)> {
        (0..self.group.len()).filter(|&x| self.leq[x][w]).map(|x| (x, &self.polys[&(x, w)])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn group_sizes() {
        for (t, n, l) in [("A1", 2, 1), ("A2", 6, 3), ("A3", 24, 6), ("B2", 8, 4), ("G2", 12, 6)] {
            let g = Coxeter::new(t).unwrap();
            assert_eq!(g.len(), n);
            assert_eq!(g.length(g.longest()), l);
        }
        assert!(matches!(Coxeter::new("D4"), Err(Error::UnsupportedType(_))));
    }

    #[test]
    fn bruhat_small_cases() {
        let t = KlTable::new(Coxeter::new("A2").unwrap());
        let g = t.group();
        let (s1, s2) = (g.parse("s1").unwrap(), g.parse("s2").unwrap());
        assert!(!t.bruhat_leq(s1, s2));
        for x in 0..g.len() {
            assert!(t.bruhat_leq(0, x));
            assert!(t.bruhat_leq(x, x));
        }
        assert_eq!(g.name(g.longest()), "s1s2s1");
    }

    #[test]
    fn s4_singular_polynomial() {
        let t = KlTable::new(Coxeter::new("A3").unwrap());
        let g = t.group();
        let w = g.parse("s2s1s3s2").unwrap();
        assert_eq!(t.polynomial(g.parse("s2").unwrap(), w).unwrap().to_string(), "1 + q");
        assert_eq!(t.polynomial(g.identity(), w).unwrap().to_string(), "1 + q");
        assert_eq!(t.polynomial(g.parse("s1s2").unwrap(), w).unwrap().to_string(), "1");
        assert_eq!(t.polynomial(g.parse("s1").unwrap(), g.parse("s2").unwrap()), Err(Error::NotComparable));
    }

    #[test]
    fn invariants_on_all_groups() {
        for name in ["A1", "A2", "A3", "B2", "G2"] {
            let t = KlTable::new(Coxeter::new(name).unwrap());
            let g = t.group();
            for w in 0..g.len() {
                for (x, p) in t.column(w) {
                    assert!(p.coeffs().iter().all(|&c| c >= 0), "{} {} {}", name, g.name(x), g.name(w));
                    if x == w {
                        assert_eq!(*p, KlPoly::one());
                    } else {
                        let bound = (g.length(w) - g.length(x) - 1) / 2;
                        assert!(p.degree().unwrap() <= bound);
                    }
                    assert_eq!(p, t.polynomial(g.inverse(x), g.inverse(w)).unwrap());
                }
            }
            if name == "A2" || name == "B2" {
                let w0 = g.longest();
                assert!(t.column(w0).iter().all(|(_, p)| **p == KlPoly::one()));
            }
        }
    }
}
