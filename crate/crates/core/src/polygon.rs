//! Triangulated polygons as cluster seeds of Gr(2,N)°, and the block models that
//! identify each block's variety with a frozen slice of one.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::bridge::{BlockKind, BridgeWord};
use crate::cluster::{ClusterError, Quiver, Seed};
use crate::continuant::{braid_matrix_product_with, continuant_with, Alg, BMatrix, Fp};
use crate::ring::{Coefficients, LaurentPolynomial, PolyContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonError {
    #[error("({0},{1}) is not a diagonal of the triangulation")]
    NotPresent(usize, usize),
    #[error("triangulation of a {got}-gon used with a {want}-gon")]
    SizeMismatch { got: usize, want: usize },
    #[error("({0},{1}) is not a valid pair of vertices")]
    BadPair(usize, usize),
    #[error("p-values must be nonzero")]
    ZeroParameter,
    #[error("vertex {0} must satisfy 1 <= i < n")]
    BadVertex(usize),
    #[error("block {0} does not exist")]
    BadBlock(usize),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

/// Vertices 1..n; diagonals (i, j) with i < j.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangulation {
    n: usize,
    diagonals: BTreeSet<(usize, usize)>,
}

fn is_side(n: usize, i: usize, j: usize) -> bool {
    j == i + 1 || (i == 1 && j == n)
}

fn crosses((a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

impl Triangulation {
    pub fn new(n: usize, diagonals: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, PolygonError> {
        let mut set = BTreeSet::new();
        for (i, j) in diagonals {
            let (i, j) = (i.min(j), i.max(j));
            if i == 0 || j > n || i == j || is_side(n, i, j) {
                return Err(PolygonError::BadPair(i, j));
            }
            set.insert((i, j));
        }
        let t = Triangulation { n, diagonals: set };
        let ds: Vec<_> = t.diagonals.iter().copied().collect();
        for (x, &d) in ds.iter().enumerate() {
            if let Some(&e) = ds[x + 1..].iter().find(|&&e| crosses(d, e)) {
                return Err(PolygonError::BadPair(e.0, e.1));
            }
        }
        if ds.len() + 3 != n.max(3) && n >= 3 {
            return Err(PolygonError::SizeMismatch { got: ds.len() + 3, want: n });
        }
        Ok(t)
    }

    /// The fan of diagonals from vertex `v` (1-based).
    pub fn fan(n: usize, v: usize) -> Self {
        let diagonals = (1..=n)
            .filter(|&w| w != v && !is_side(n, v.min(w), v.max(w)))
            .map(|w| (v.min(w), v.max(w)))
            .collect();
        Triangulation { n, diagonals }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diagonals(&self) -> Vec<(usize, usize)> {
        self.diagonals.iter().copied().collect()
    }

    pub fn contains(&self, d: (usize, usize)) -> bool {
        self.diagonals.contains(&d)
    }

    fn is_edge(&self, i: usize, j: usize) -> bool {
        let (i, j) = (i.min(j), i.max(j));
        is_side(self.n, i, j) || self.diagonals.contains(&(i, j))
    }

    /// Triangles (a, b, c), a < b < c.
    pub fn triangles(&self) -> Vec<(usize, usize, usize)> {
        let n = self.n;
        let mut out = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                if !self.is_edge(a, b) {
                    continue;
                }
                for c in b + 1..=n {
                    if self.is_edge(a, c) && self.is_edge(b, c) {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }

    pub fn flip(&self, d: (usize, usize)) -> Result<Self, PolygonError> {
        if !self.contains(d) {
            return Err(PolygonError::NotPresent(d.0, d.1));
        }
        let (i, j) = d;
        let apex: Vec<usize> = (1..=self.n)
            .filter(|&w| w != i && w != j && self.is_edge(i, w) && self.is_edge(j, w))
            .filter(|&w| {
                // Only apexes whose triangle is empty; one on each side of d.
                let (a, b, c) = sort3(i, j, w);
                self.triangles().contains(&(a, b, c))
            })
            .collect();
        debug_assert_eq!(apex.len(), 2);
        let (k, l) = (apex[0].min(apex[1]), apex[0].max(apex[1]));
        let mut out = self.clone();
        out.diagonals.remove(&d);
        out.diagonals.insert((k, l));
        Ok(out)
    }

    /// Every triangulation of the n-gon, in sorted order (C_{n−2} of them).
    pub fn all(n: usize) -> Vec<Triangulation> {
        if n < 3 {
            return vec![Triangulation { n, diagonals: BTreeSet::new() }];
        }
        fn rec(verts: &[usize], out: &mut Vec<Vec<(usize, usize)>>) {
            // Triangulations of the convex polygon on `verts`, using edge (first, last).
            if verts.len() < 3 {
                out.push(Vec::new());
                return;
            }
            let (first, last) = (verts[0], verts[verts.len() - 1]);
            for m in 1..verts.len() - 1 {
                let (mut left, mut right) = (Vec::new(), Vec::new());
                rec(&verts[..=m], &mut left);
                rec(&verts[m..], &mut right);
                for l in &left {
                    for r in &right {
                        let mut ds = l.clone();
                        ds.extend(r);
                        if m > 1 {
                            ds.push((first, verts[m]));
                        }
                        if m < verts.len() - 2 {
                            ds.push((verts[m], last));
                        }
                        out.push(ds);
                    }
                }
            }
        }
        let verts: Vec<usize> = (1..=n).collect();
        let mut raw = Vec::new();
        rec(&verts, &mut raw);
        let mut out: Vec<Triangulation> = raw
            .into_iter()
            .map(|ds| Triangulation { n, diagonals: ds.into_iter().collect() })
            .collect();
        out.sort();
        out
    }

    /// The quadrilateral (i < j < k < l) of a flippable diagonal.
    pub fn quadrilateral(&self, d: (usize, usize)) -> Result<[usize; 4], PolygonError> {
        let f = self.flip(d)?;
        let new = *f.diagonals.difference(&self.diagonals).next().unwrap();
        let mut q = [d.0, d.1, new.0, new.1];
        q.sort();
        Ok(q)
    }
}

fn sort3(a: usize, b: usize, c: usize) -> (usize, usize, usize) {
    let mut v = [a, b, c];
    v.sort();
    (v[0], v[1], v[2])
}

impl fmt::Display for Triangulation {
    /// `T(6): 13,14,15`; labels above 9 are separated by dashes, as in `T(12): 1-11`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .diagonals
            .iter()
            .map(|&(i, j)| if self.n <= 9 { format!("{i}{j}") } else { format!("{i}-{j}") })
            .collect();
        write!(f, "T({}): {}", self.n, parts.join(","))
    }
}

/// Mutable vertices are the diagonals in sorted order, then one frozen vertex per
/// retained side (in the given order). Each triangle a < b < c carries the
/// 3-cycle (a,c) → (b,c) → (a,b) → (a,c); arrows touching deleted sides and
/// arrows between two frozen vertices are dropped.
pub fn quiver_from_triangulation(t: &Triangulation, frozen_sides: &[(usize, usize)]) -> (Quiver, Vec<(usize, usize)>) {
    let mut labels = t.diagonals();
    let mutable = labels.len();
    labels.extend(frozen_sides.iter().map(|&(i, j)| (i.min(j), i.max(j))));
    let index: HashMap<(usize, usize), usize> = labels.iter().enumerate().map(|(x, &d)| (d, x)).collect();
    let frozen = (0..labels.len()).map(|x| x >= mutable).collect();
    let mut q = Quiver::new(frozen);
    for (a, b, c) in t.triangles() {
        for (from, to) in [((a, c), (b, c)), ((b, c), (a, b)), ((a, b), (a, c))] {
            if let (Some(&x), Some(&y)) = (index.get(&from), index.get(&to)) {
                if x < mutable || y < mutable {
                    q.add_arrow(x, y);
                }
            }
        }
    }
    (q, labels)
}

/// One block's polygon: N vertices, labels x_1.. naming a-coordinates, frozen side (N−1, N).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockModel {
    pub word: BridgeWord,
    pub block: usize,
    pub size: usize,
    /// `labels[j−1]` is the a-index of x_j.
    pub labels: Vec<usize>,
}

impl BlockModel {
    pub fn new(word: &BridgeWord, block: usize) -> Result<Self, PolygonError> {
        if block == 0 || block > word.k() {
            return Err(PolygonError::BadBlock(block));
        }
        let (n, m) = (word.n(block), word.m(block - 1));
        let (size, labels): (usize, Vec<usize>) = match word.block_kind(block) {
            BlockKind::Whole => (n + 2, (1..=n).collect()),
            BlockKind::First => (n + 1, (1..=n).collect()),
            BlockKind::Middle => (n, (1..n).map(|j| m + 1 + j).collect()),
            BlockKind::Last => (n + 1, (1..n).map(|j| m + 1 + j).collect()),
        };
        Ok(BlockModel { word: word.clone(), block, size, labels })
    }

    pub fn all(word: &BridgeWord) -> Vec<BlockModel> {
        (1..=word.k()).map(|i| BlockModel::new(word, i).unwrap()).collect()
    }

    pub fn frozen_side(&self) -> Option<(usize, usize)> {
        (self.size >= 3).then(|| (self.size - 1, self.size))
    }

    /// Diagonals plus frozen side: the number of cluster variables of this block.
    pub fn rank(&self) -> usize {
        if self.size < 3 {
            0
        } else {
            self.size - 2
        }
    }

    /// The a-index of x_j.
    pub fn label(&self, j: usize) -> usize {
        self.labels[j - 1]
    }
}

/// Integer polynomial ring on a_1..a_{m_k}.
pub fn a_context(word: &BridgeWord) -> PolyContext {
    PolyContext::new((1..=word.crossings()).map(|j| (format!("a{j}"), false)), Coefficients::Integers)
        .expect("distinct names")
}

/// Δ_{i,j} = K(x_{i+1}..x_{j−1}) for j < N and Δ_{i,N} = K(x_1..x_{i−1}).
pub fn diagonal_to_continuant_with<T: Alg>(b: &BlockModel, (i, j): (usize, usize), x: &dyn Fn(usize) -> T, one: &T) -> Result<T, PolygonError> {
    let (i, j) = (i.min(j), i.max(j));
    if i == 0 || j > b.size || i == j {
        return Err(PolygonError::BadPair(i, j));
    }
    let range: Vec<usize> = if j < b.size { (i + 1..j).collect() } else { (1..i).collect() };
    let xs: Vec<T> = range.into_iter().map(|r| x(b.label(r))).collect();
    Ok(continuant_with(&xs, one))
}

pub fn diagonal_to_continuant(ctx: &PolyContext, b: &BlockModel, d: (usize, usize)) -> Result<LaurentPolynomial, PolygonError> {
    diagonal_to_continuant_with(b, d, &|a| ctx.var(&format!("a{a}")), &ctx.one())
}

pub fn seed_from_triangulation(ctx: &PolyContext, b: &BlockModel, t: &Triangulation) -> Result<Seed, PolygonError> {
    if t.n() != b.size {
        return Err(PolygonError::SizeMismatch { got: t.n(), want: b.size });
    }
    let frozen: Vec<_> = b.frozen_side().into_iter().collect();
    let (q, labels) = quiver_from_triangulation(t, &frozen);
    let vars = labels
        .iter()
        .map(|&d| diagonal_to_continuant(ctx, b, d))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Seed::new(q, vars)?)
}

/// Disjoint union of seeds, vertex blocks in the given order.
pub fn direct_sum(seeds: &[Seed]) -> Seed {
    let frozen: Vec<bool> = seeds.iter().flat_map(|s| s.quiver.frozen().to_vec()).collect();
    let mut q = Quiver::new(frozen);
    let mut vars = Vec::new();
    let mut off = 0;
    for s in seeds {
        for (i, j, m) in s.quiver.arrows() {
            for _ in 0..m {
                q.add_arrow(off + i, off + j);
            }
        }
        vars.extend(s.variables.iter().cloned());
        off += s.quiver.size();
    }
    Seed { quiver: q, variables: vars }
}

/// The seed from the fan at vertex N in every block.
pub fn initial_seed(word: &BridgeWord) -> Seed {
    let ctx = a_context(word);
    let seeds: Vec<Seed> = BlockModel::all(word)
        .iter()
        .map(|b| seed_from_triangulation(&ctx, b, &Triangulation::fan(b.size, b.size)).unwrap())
        .collect();
    direct_sum(&seeds)
}

fn relabel_to(s: &Seed, from: &[(usize, usize)], to: &[(usize, usize)]) -> Seed {
    let perm: Vec<usize> = to.iter().map(|d| from.iter().position(|e| e == d).unwrap()).collect();
    let mut q = Quiver::new(perm.iter().map(|&x| s.quiver.is_frozen(x)).collect());
    for (a, &x) in perm.iter().enumerate() {
        for (b, &y) in perm.iter().enumerate() {
            let e = s.quiver.eps(x, y);
            for _ in 0..e.max(0) {
                q.add_arrow(a, b);
            }
        }
    }
    Seed { quiver: q, variables: perm.iter().map(|&x| s.variables[x].clone()).collect() }
}

/// Flip at d, compared with mutation at d's vertex after matching labels.
pub fn flip_matches_mutation(c: &PolyContext, b: &BlockModel, tr: &Triangulation, d: (usize, usize)) -> Result<bool, PolygonError> {
    let s = seed_from_triangulation(c, b, tr)?;
    let (_, labels) = quiver_from_triangulation(tr, &b.frozen_side().into_iter().collect::<Vec<_>>());
    let v = labels.iter().position(|&e| e == d).ok_or(PolygonError::BadPair(d.0, d.1))?;
    let mutated = s.mutate(v)?;
    let flipped = tr.flip(d)?;
    let (_, new_labels) = quiver_from_triangulation(&flipped, &b.frozen_side().into_iter().collect::<Vec<_>>());
    let new_d = *flipped.diagonals().iter().find(|e| !tr.contains(**e)).unwrap();
    let mut old = labels.clone();
    old[v] = new_d;
    Ok(relabel_to(&mutated, &old, &new_labels) == seed_from_triangulation(c, b, &flipped)?)
}

/// Δ_ik Δ_jl = Δ_ij Δ_kl + Δ_il Δ_jk for i < j < k < l, read through the continuant dictionary.
pub fn plucker_identity_holds(c: &PolyContext, b: &BlockModel, [i, j, k, l]: [usize; 4]) -> Result<bool, PolygonError> {
    let d = |x: usize, y: usize| diagonal_to_continuant(c, b, (x, y));
    Ok(d(i, k)? * d(j, l)? == d(i, j)? * d(k, l)? + d(i, l)? * d(j, k)?)
}

/// Columns v_1 = e_1, v_{j+1} = B(a_1)D(p_1)⋯B(a_j)D(p_j)e_1; returns Δ_{i,j} = det(v_i, v_j) for i < j.
pub fn plucker_from_parameters<T: Alg>(avals: &[T], pvals: &[(T, T)], one: &T) -> Result<HashMap<(usize, usize), T>, PolygonError> {
    let n = avals.len() + 1;
    let zero = one.sub(one);
    let mut vecs = vec![[one.clone(), zero.clone()]];
    let mut m = BMatrix::identity(one);
    for j in 0..n - 1 {
        m = m.mul(&braid_matrix_product_with(&avals[j..=j], Some(&pvals[j..=j]), one));
        vecs.push([m.entries[0][0].clone(), m.entries[1][0].clone()]);
    }
    let mut out = HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = vecs[i][0].mul(&vecs[j][1]).sub(&vecs[i][1].mul(&vecs[j][0]));
            out.insert((i + 1, j + 1), d);
        }
    }
    Ok(out)
}

/// F_p version; p-values must be nonzero.
pub fn plucker_from_parameters_fp(avals: &[u64], pvals: &[u64], p: u64) -> Result<HashMap<(usize, usize), u64>, PolygonError> {
    if pvals.iter().any(|&v| v % p == 0) {
        return Err(PolygonError::ZeroParameter);
    }
    let a: Vec<Fp> = avals.iter().map(|&v| Fp::new(v, p)).collect();
    let ps: Vec<(Fp, Fp)> = pvals.iter().map(|&v| (Fp::new(v, p), Fp::new(v, p).inv())).collect();
    let out = plucker_from_parameters(&a, &ps, &Fp::new(1, p))?;
    Ok(out.into_iter().map(|(k, v)| (k, v.v)).collect())
}

/// The pullback φ_i* from Gr(2,n)° coordinates a_1..a_{n−1}, p_1..p_{n−1} to
/// Gr(2,n−1)° × torus coordinates b_1..b_{n−2}, r_0..r_{n−2}, u, v. Here r_0
/// stands for the unit r_{n−1} of the smaller polygon.
#[derive(Debug, Clone)]
pub struct LocalizationMap {
    pub n: usize,
    pub i: usize,
    pub target: PolyContext,
    /// (source variable, image), a_1..a_{n−1} then p_1..p_{n−1}.
    pub images: Vec<(String, LaurentPolynomial)>,
}

pub fn localization_map(n: usize, i: usize) -> Result<LocalizationMap, PolygonError> {
    if i == 0 || i >= n || n < 3 {
        return Err(PolygonError::BadVertex(i));
    }
    let mut vars: Vec<(String, bool)> = (1..=n - 2).map(|j| (format!("b{j}"), false)).collect();
    vars.extend((0..=n - 2).map(|j| (format!("r{j}"), true)));
    vars.extend([("u".to_string(), true), ("v".to_string(), true)]);
    let c = PolyContext::new(vars, Coefficients::Integers).expect("distinct names");
    let b = |j: usize| c.var(&format!("b{j}"));
    let r = |j: usize| c.var(&format!("r{j}"));
    let rinv = c.mono(&format!("r{}^-1", i - 1));
    let mut images = Vec::new();
    for j in 1..n {
        let img = if j + 1 < i {
            b(j)
        } else if j + 1 == i {
            b(i - 1) + c.mono("u^-1*v") * &rinv
        } else if j == i {
            r(i - 1) * c.mono("u^-1*v^-1")
        } else if j == i + 1 {
            b(i) + c.mono("u*v^-1") * &rinv
        } else {
            b(j - 1)
        };
        images.push((format!("a{j}"), img));
    }
    for j in 1..n {
        let img = if j + 1 < i {
            r(j)
        } else if j + 1 == i {
            c.var("u")
        } else if j == i {
            c.var("v")
        } else {
            r(j - 1)
        };
        images.push((format!("p{j}"), img));
    }
    Ok(LocalizationMap { n, i, target: c, images })
}

impl LocalizationMap {
    pub fn image(&self, name: &str) -> Option<&LaurentPolynomial> {
        self.images.iter().find(|(s, _)| s == name).map(|(_, p)| p)
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        // W_α = Δ_opposite / (Δ_adjacent Δ_adjacent) summed over the angles at vertex i equals a_i.
        #[test]
        fn potential_identity(n in 4usize..9, seed in prop::collection::vec(1u64..1000, 20), pick in 0usize..1000) {
            let p = 101;
            let mut a: Vec<u64> = seed[..n - 2].iter().map(|v| v % p).collect();
            let pv: Vec<u64> = seed[10..10 + n - 1].iter().map(|v| 1 + v % (p - 1)).collect();
            // Solve the last a so the point lies on Gr(2,n)°.
            let one = Fp::new(1, p);
            let xs: Vec<Fp> = a.iter().map(|&v| Fp::new(v, p)).collect();
            let ps: Vec<(Fp, Fp)> = pv[..n - 2].iter().map(|&v| (Fp::new(v, p), Fp::new(v, p).inv())).collect();
            let m = braid_matrix_product_with(&xs, Some(&ps), &one).entries;
            prop_assume!(!m[0][0].is_zero());
            a.push(Fp::new(0, p).sub(&m[0][1].mul(&m[0][0].inv())).v);
            let d = plucker_from_parameters_fp(&a, &pv, p).unwrap();
            let delta = |i: usize, j: usize| Fp::new(d[&(i.min(j), i.max(j))], p);
            prop_assert!(delta(1, n).v != 0);
            let all = Triangulation::all(n);
            let tr = &all[pick % all.len()];
            for i in 2..n {
                let mut sum = Fp::new(0, p);
                let mut ok = true;
                for (x, y, z) in tr.triangles() {
                    let others: Vec<usize> = [x, y, z].into_iter().filter(|&w| w != i).collect();
                    if others.len() != 2 {
                        continue;
                    }
                    let den = delta(i, others[0]).mul(&delta(i, others[1]));
                    if den.is_zero() {
                        ok = false;
                        break;
                    }
                    sum = sum.add(&delta(others[0], others[1]).mul(&den.inv()));
                }
                let den = delta(i - 1, i).mul(&delta(i, i + 1));
                if ok && !den.is_zero() {
                    prop_assert_eq!(sum, delta(i - 1, i + 1).mul(&den.inv()));
                }
            }
        }

        #[test]
        fn mutation_sequences_divide_exactly(blocks in prop::collection::vec(2usize..7, 1..4), seq in prop::collection::vec(0usize..20, 0..20)) {
            let w = BridgeWord::new(blocks).unwrap();
            prop_assume!(w.is_rational_form());
            let mut s = initial_seed(&w);
            let mutable = s.quiver.mutable_vertices();
            prop_assume!(!mutable.is_empty());
            for v in seq {
                s = s.mutate(mutable[v % mutable.len()]).unwrap();
            }
            // Cluster variables stay polynomial in the a-coordinates.
            for var in &s.variables {
                prop_assert!(var.terms().all(|(e, _)| e.iter().all(|&x| x >= 0)));
            }
        }
    }
}
