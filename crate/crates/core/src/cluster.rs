//! Quivers, cluster seeds and mutation.
//!
//! Vertices are 0-based internally; user-facing text and JSON use 1-based labels.

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde_json::{json, Value};
use thiserror::Error;

use crate::ring::{LaurentPolynomial, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error("vertex {0} is out of range")]
    OutOfRange(usize),
    #[error("vertex {0} is frozen")]
    Frozen(usize),
    #[error("exchange binomial at vertex {0} is not divisible by its cluster variable")]
    DivisionFailed(usize),
    #[error("seed has {vars} variables for {vertices} vertices")]
    SizeMismatch { vars: usize, vertices: usize },
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quiver {
    frozen: Vec<bool>,
    /// eps[i][j] = #(i→j) − #(j→i).
    eps: Vec<Vec<i64>>,
}

impl Quiver {
    pub fn new(frozen: Vec<bool>) -> Self {
        let n = frozen.len();
        Quiver {
            frozen,
            eps: vec![vec![0; n]; n],
        }
    }

    pub fn from_arrows(frozen: Vec<bool>, arrows: &[(usize, usize)]) -> Self {
        let mut q = Quiver::new(frozen);
        for &(i, j) in arrows {
            q.add_arrow(i, j);
        }
        q
    }

    /// The path 0→1→…→(n−1) with the last vertex frozen when `frozen_tail`.
    pub fn path(n: usize, frozen_tail: bool) -> Self {
        let mut frozen = vec![false; n];
        if frozen_tail && n > 0 {
            frozen[n - 1] = true;
        }
        let arrows: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Quiver::from_arrows(frozen, &arrows)
    }

    pub fn add_arrow(&mut self, i: usize, j: usize) {
        self.eps[i][j] += 1;
        self.eps[j][i] -= 1;
    }

    pub fn size(&self) -> usize {
        self.frozen.len()
    }

    pub fn is_frozen(&self, v: usize) -> bool {
        self.frozen[v]
    }

    pub fn frozen(&self) -> &[bool] {
        &self.frozen
    }

    pub fn mutable_vertices(&self) -> Vec<usize> {
        (0..self.size()).filter(|&v| !self.frozen[v]).collect()
    }

    pub fn eps(&self, i: usize, j: usize) -> i64 {
        self.eps[i][j]
    }

    pub fn exchange(&self) -> &[Vec<i64>] {
        &self.eps
    }

    /// Arrows i→j with multiplicity, skipping frozen–frozen pairs.
    pub fn arrows(&self) -> Vec<(usize, usize, i64)> {
        let n = self.size();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.eps[i][j] > 0 && !(self.frozen[i] && self.frozen[j]) {
                    out.push((i, j, self.eps[i][j]));
                }
            }
        }
        out
    }

    fn check_mutable(&self, v: usize) -> Result<(), ClusterError> {
        if v >= self.size() {
            return Err(ClusterError::OutOfRange(v));
        }
        if self.frozen[v] {
            return Err(ClusterError::Frozen(v));
        }
        Ok(())
    }

    pub fn mutate(&self, v: usize) -> Result<Quiver, ClusterError> {
        self.check_mutable(v)?;
        let n = self.size();
        let e = &self.eps;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.eps[i][j] = if i == v || j == v {
                    -e[i][j]
                } else {
                    e[i][j] + (e[i][v].max(0) * e[v][j].max(0)) - ((-e[i][v]).max(0) * (-e[v][j]).max(0))
                };
            }
        }
        Ok(out)
    }

    pub fn is_acyclic(&self) -> bool {
        let n = self.size();
        let mut indeg: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| self.eps[i][j] > 0).count()).collect();
        let mut queue: Vec<usize> = (0..n).filter(|&j| indeg[j] == 0).collect();
        let mut seen = 0;
        while let Some(i) = queue.pop() {
            seen += 1;
            for j in 0..n {
                if self.eps[i][j] > 0 {
                    indeg[j] -= 1;
                    if indeg[j] == 0 {
                        queue.push(j);
                    }
                }
            }
        }
        seen == n
    }
}

pub fn mutate_quiver(q: &Quiver, v: usize) -> Result<Quiver, ClusterError> {
    q.mutate(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Seed {
    pub quiver: Quiver,
    pub variables: Vec<LaurentPolynomial>,
}

impl Seed {
    pub fn new(quiver: Quiver, variables: Vec<LaurentPolynomial>) -> Result<Self, ClusterError> {
        if quiver.size() != variables.len() {
            return Err(ClusterError::SizeMismatch {
                vars: variables.len(),
                vertices: quiver.size(),
            });
        }
        Ok(Seed { quiver, variables })
    }

    /// The binomial ∏ A_j^{[ε_vj]_+} + ∏ A_j^{[−ε_vj]_+}.
    pub fn exchange_binomial(&self, v: usize) -> LaurentPolynomial {
        let one = LaurentPolynomial::one(self.variables[v].table(), self.variables[v].ring());
        let (mut out, mut inc) = (one.clone(), one);
        for (j, a) in self.variables.iter().enumerate() {
            let e = self.quiver.eps(v, j);
            if e > 0 {
                out = out * a.pow(e as u32);
            } else if e < 0 {
                inc = inc * a.pow((-e) as u32);
            }
        }
        out + inc
    }

    pub fn mutate(&self, v: usize) -> Result<Seed, ClusterError> {
        let quiver = self.quiver.mutate(v)?;
        let new = self
            .exchange_binomial(v)
            .exact_divide(&self.variables[v])?
            .ok_or(ClusterError::DivisionFailed(v))?;
        let mut variables = self.variables.clone();
        variables[v] = new;
        Ok(Seed { quiver, variables })
    }

    /// Mutable variables sorted by canonical text, with the exchange matrix permuted to match.
    pub fn canonical_key(&self) -> (Vec<String>, Vec<Vec<i64>>) {
        let n = self.quiver.size();
        let mut order: Vec<usize> = self.quiver.mutable_vertices();
        order.sort_by_cached_key(|&v| self.variables[v].to_string());
        order.extend((0..n).filter(|&v| self.quiver.is_frozen(v)));
        let names = order.iter().map(|&v| self.variables[v].to_string()).collect();
        let eps = order.iter().map(|&i| order.iter().map(|&j| self.quiver.eps(i, j)).collect()).collect();
        (names, eps)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "exchange": self.quiver.exchange(),
            "frozen": self.quiver.frozen(),
            "variables": self.variables.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })
    }
}

pub fn mutate_seed(s: &Seed, v: usize) -> Result<Seed, ClusterError> {
    s.mutate(v)
}

/// All independent subsets of mutable vertices (ε_ij = 0 pairwise), including ∅,
/// each sorted ascending; the list is ordered by size then lexicographically.
pub fn anticliques(q: &Quiver) -> Vec<Vec<usize>> {
    let verts = q.mutable_vertices();
    let mut out = Vec::new();
    fn rec(q: &Quiver, verts: &[usize], start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        for idx in start..verts.len() {
            let v = verts[idx];
            if cur.iter().all(|&u| q.eps(u, v) == 0) {
                cur.push(v);
                rec(q, verts, idx + 1, cur, out);
                cur.pop();
            }
        }
    }
    rec(q, &verts, 0, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// Invariant factors of an integer matrix (nonzero diagonal of its Smith normal form).
pub fn invariant_factors(m: &[Vec<i64>]) -> Vec<i128> {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: smallest nonzero absolute value in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let f = a[i][t] / a[t][t];
            for j in t..cols {
                a[i][j] -= f * a[t][j];
            }
            clean &= a[i][t] == 0;
        }
        for j in t + 1..cols {
            let f = a[t][j] / a[t][t];
            for r in a.iter_mut().skip(t) {
                let v = r[t];
                r[j] -= f * v;
            }
            clean &= a[t][j] == 0;
        }
        if !clean {
            continue;
        }
        // The pivot must divide the rest of the block; otherwise fold a row in and retry.
        if let Some(i) = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % a[t][t] != 0)) {
            for j in t..cols {
                let v = a[i][j];
                a[t][j] += v;
            }
            continue;
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

/// True iff the mutable rows of ε span Z^{#mutable}.
pub fn is_really_full_rank(q: &Quiver) -> bool {
    let rows: Vec<Vec<i64>> = q.mutable_vertices().iter().map(|&i| q.exchange()[i].clone()).collect();
    let f = invariant_factors(&rows);
    f.len() == rows.len() && f.iter().all(|&d| d == 1)
}

#[derive(Debug, Clone)]
pub struct MutationClass {
    pub seeds: Vec<Seed>,
    /// False when `bound` stopped the search early.
    pub complete: bool,
}

pub fn mutation_class(s: &Seed, bound: usize) -> Result<MutationClass, ClusterError> {
    let mut seen: HashSet<(Vec<String>, Vec<Vec<i64>>)> = HashSet::new();
    let mut seeds = Vec::new();
    let mut queue = VecDeque::from([s.clone()]);
    seen.insert(s.canonical_key());
    while let Some(cur) = queue.pop_front() {
        for v in cur.quiver.mutable_vertices() {
            let next = cur.mutate(v)?;
            if seen.insert(next.canonical_key()) {
                if seen.len() > bound {
                    seeds.push(cur);
                    seeds.extend(queue);
                    return Ok(MutationClass { seeds, complete: false });
                }
                queue.push_back(next);
            }
        }
        seeds.push(cur);
    }
    Ok(MutationClass { seeds, complete: true })
}

/// Arrow list keyed by 1-based labels, for display and JSON.
pub fn labelled_arrows(q: &Quiver) -> BTreeMap<(usize, usize), i64> {
    q.arrows().into_iter().map(|(i, j, m)| ((i + 1, j + 1), m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Coefficients, PolyContext};

    fn ctx(n: usize) -> PolyContext {
        PolyContext::new((1..=n).map(|i| (format!("x{i}"), true)), Coefficients::Integers).unwrap()
    }

    fn seed(q: Quiver) -> Seed {
        let c = ctx(q.size());
        let vars = (1..=q.size()).map(|i| c.var(&format!("x{i}"))).collect();
        Seed::new(q, vars).unwrap()
    }

    #[test]
    fn quiver_mutation_examples() {
        let q = Quiver::path(2, false);
        assert_eq!(q.mutate(0).unwrap(), Quiver::from_arrows(vec![false; 2], &[(1, 0)]));
        let p3 = Quiver::path(3, false);
        let want = Quiver::from_arrows(vec![false; 3], &[(1, 0), (2, 1), (0, 2)]);
        assert_eq!(p3.mutate(1).unwrap(), want);
        assert_eq!(p3.mutate(1).unwrap().mutate(1).unwrap(), p3);
        assert_eq!(Quiver::path(2, true).mutate(1), Err(ClusterError::Frozen(1)));
        assert_eq!(p3.mutate(7), Err(ClusterError::OutOfRange(7)));
    }

    #[test]
    fn seed_mutation_examples() {
        let s = seed(Quiver::path(2, true));
        let m = s.mutate(0).unwrap();
        assert_eq!(m.variables[0].to_string(), "x1^-1*x2 + x1^-1");
        assert_eq!(m.mutate(0).unwrap(), s);

        let a2 = seed(Quiver::path(2, false));
        let mut cur = a2.clone();
        for v in [0, 1, 0, 1, 0] {
            cur = cur.mutate(v).unwrap();
        }
        assert_eq!(cur.variables, vec![a2.variables[1].clone(), a2.variables[0].clone()]);
        assert_eq!(cur.canonical_key(), a2.canonical_key());
    }

    #[test]
    fn anticlique_examples() {
        assert_eq!(anticliques(&Quiver::path(3, false)), vec![vec![], vec![0], vec![1], vec![2], vec![0, 2]]);
        assert_eq!(anticliques(&Quiver::new(vec![true])), vec![Vec::<usize>::new()]);
        assert_eq!(anticliques(&Quiver::new(vec![false, false])).len(), 4);
        // Arrows into frozen vertices do not matter.
        assert_eq!(anticliques(&Quiver::path(4, true)).len(), 5);
    }

    #[test]
    fn full_rank_examples() {
        for n in 2..8 {
            assert!(is_really_full_rank(&Quiver::path(n, true)));
        }
        assert!(!is_really_full_rank(&Quiver::new(vec![false])));
        let double = Quiver::from_arrows(vec![false, true], &[(0, 1), (0, 1)]);
        assert!(!is_really_full_rank(&double));
        assert_eq!(invariant_factors(&[vec![2, 4], vec![6, 8]]), vec![2, 4]);
        assert_eq!(invariant_factors(&[vec![0, 0], vec![0, 3]]), vec![3]);
    }

    #[test]
    fn mutation_class_sizes() {
        assert_eq!(mutation_class(&seed(Quiver::path(2, true)), 100).unwrap().seeds.len(), 2);
        assert_eq!(mutation_class(&seed(Quiver::path(2, false)), 100).unwrap().seeds.len(), 5);
        assert_eq!(mutation_class(&seed(Quiver::path(4, true)), 100).unwrap().seeds.len(), 14);
        let partial = mutation_class(&seed(Quiver::path(4, true)), 5).unwrap();
        assert!(!partial.complete);
    }
}
