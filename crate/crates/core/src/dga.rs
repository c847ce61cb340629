//! The characteristic-2 commutative image of the dg-algebra of Λ[n_1,…,n_k].
//!
//! Block notation for block i (crossings a_{m_{i−1}+1}..a_{m_i}):
//! K = K_{n_i} of the whole block, K^L drops the last crossing, K^R drops the
//! first, K^M drops both. Words with a single block use ∂b_1 = K_n + t_1 and
//! ∂b_2 = K_n + t_2, the odd-k formula started from the empty disk table.

use std::collections::HashMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::bridge::{BridgeError, BridgeWord};
use crate::continuant::{continuant_with, Alg};
use crate::ring::{Coefficients, LaurentPolynomial, PolyContext, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DgaError {
    #[error(transparent)]
    Bridge(#[from] BridgeError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("block index {0} out of range")]
    BadBlock(usize),
    #[error("disk tables are indexed by even blocks 2 <= i <= k, got {0}")]
    OddBlock(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockContinuants<T> {
    pub k: T,
    pub kl: T,
    pub km: T,
    pub kr: T,
}

/// K of the crossings a_lo..a_hi (1-based, inclusive); hi = lo − 2 gives K_{−1} = 0.
fn k_span<T: Alg>(a: &[T], lo: usize, hi: usize, one: &T) -> T {
    if hi + 2 == lo {
        return one.sub(one);
    }
    continuant_with(&a[lo - 1..hi], one)
}

/// `a[j−1]` holds a_j.
pub fn block_continuants_with<T: Alg>(word: &BridgeWord, i: usize, a: &[T], one: &T) -> BlockContinuants<T> {
    let (lo, hi) = (word.m(i - 1) + 1, word.m(i));
    BlockContinuants {
        k: k_span(a, lo, hi, one),
        kl: k_span(a, lo, hi - 1, one),
        km: k_span(a, lo + 1, hi - 1, one),
        kr: k_span(a, lo + 1, hi, one),
    }
}

/// The D-polynomials at an even block, in the order D13, D14, D23, D24, D34.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskTable<T> {
    pub i: usize,
    pub d13: T,
    pub d14: T,
    pub d23: T,
    pub d24: T,
    pub d34: T,
}

pub fn disk_table_with<T: Alg>(word: &BridgeWord, i: usize, a: &[T], one: &T) -> Result<DiskTable<T>, DgaError> {
    if i % 2 == 1 || i < 2 || i > word.k() {
        return Err(DgaError::OddBlock(i));
    }
    let bcs: Vec<_> = (1..=i).map(|j| block_continuants_with(word, j, a, one)).collect();
    Ok(disk_table_from_blocks(&bcs, i))
}

/// Same recursion from precomputed block continuants; `bcs[j−1]` is block j.
pub fn disk_table_from_blocks<T: Alg>(bcs: &[BlockContinuants<T>], i: usize) -> DiskTable<T> {
    let (b1, b2) = (&bcs[0], &bcs[1]);
    let mut t = DiskTable {
        i: 2,
        d13: b2.km.mul(&b1.kl),
        d14: b2.kl.mul(&b1.kl),
        d23: b2.kr.mul(&b1.kl),
        d24: b2.k.mul(&b1.kl),
        d34: b1.k.clone(),
    };
    let mut j = 4;
    while j <= i {
        let (prev, cur) = (&bcs[j - 2], &bcs[j - 1]);
        let mixed = prev.kl.mul(&t.d34).add(&prev.km.mul(&t.d24));
        t = DiskTable {
            i: j,
            d13: cur.km.mul(&prev.km).mul(&t.d13),
            d14: cur.kl.mul(&mixed).add(&cur.km.mul(&t.d14)),
            d23: cur.kr.mul(&prev.km).mul(&t.d13),
            d24: cur.kr.mul(&t.d14).add(&cur.k.mul(&mixed)),
            d34: prev.k.mul(&t.d34).add(&prev.kr.mul(&t.d24)),
        };
        j += 2;
    }
    t
}

/// K^L_{n_1−1} K^M_{n_2−2} ⋯ K^M_{n_{i−1}−2} K^R_{n_i−1}, for 2 ≤ i ≤ k.
pub fn chord_product_with<T: Alg>(word: &BridgeWord, i: usize, a: &[T], one: &T) -> T {
    let bcs: Vec<_> = (1..=i).map(|j| block_continuants_with(word, j, a, one)).collect();
    chord_product_from_blocks(&bcs, i)
}

pub fn chord_product_from_blocks<T: Alg>(bcs: &[BlockContinuants<T>], i: usize) -> T {
    let mut acc = bcs[0].kl.clone();
    for bc in &bcs[1..i - 1] {
        acc = acc.mul(&bc.km);
    }
    acc.mul(&bcs[i - 1].kr)
}

/// ∂b_1 − t_1.
pub fn b1_core_with<T: Alg>(word: &BridgeWord, a: &[T], one: &T) -> T {
    b1_core_from_blocks(&all_blocks(word, a, one))
}

pub fn b1_core_from_blocks<T: Alg>(bcs: &[BlockContinuants<T>]) -> T {
    if bcs.len() == 1 {
        return bcs[0].k.clone();
    }
    chord_product_from_blocks(bcs, bcs.len())
}

/// ∂b_2 − t_2, given values for b_1 and t_1⁻¹.
pub fn b2_core_with<T: Alg>(word: &BridgeWord, a: &[T], b1: &T, t1_inv: &T, one: &T) -> T {
    b2_core_from_blocks(&all_blocks(word, a, one), b1, t1_inv)
}

pub fn b2_core_from_blocks<T: Alg>(bcs: &[BlockContinuants<T>], b1: &T, t1_inv: &T) -> T {
    let k = bcs.len();
    if k == 1 {
        return bcs[0].k.clone();
    }
    if k % 2 == 1 {
        let t = disk_table_from_blocks(bcs, k - 1);
        let last = &bcs[k - 1];
        last.k.mul(&t.d34).add(&last.kr.mul(&t.d24))
    } else {
        let t = disk_table_from_blocks(bcs, k);
        t.d14
            .add(&t.d34.mul(b1).mul(t1_inv).mul(&t.d13))
            .add(&t.d24.mul(t1_inv).mul(&t.d13))
    }
}

pub fn all_blocks<T: Alg>(word: &BridgeWord, a: &[T], one: &T) -> Vec<BlockContinuants<T>> {
    (1..=word.k()).map(|j| block_continuants_with(word, j, a, one)).collect()
}

/// Generators a_1..a_{m_k}, b_1, b_2, t_1, t_2 over the given ring.
pub fn word_context(word: &BridgeWord, ring: Coefficients) -> PolyContext {
    let mut vars: Vec<(String, bool)> = (1..=word.crossings()).map(|j| (format!("a{j}"), false)).collect();
    vars.extend([("b1".into(), false), ("b2".into(), false), ("t1".into(), true), ("t2".into(), true)]);
    PolyContext::new(vars, ring).expect("distinct generator names")
}

fn a_vars(ctx: &PolyContext, word: &BridgeWord) -> Vec<LaurentPolynomial> {
    (1..=word.crossings()).map(|j| ctx.var(&format!("a{j}"))).collect()
}

pub fn block_continuants(ctx: &PolyContext, word: &BridgeWord, i: usize) -> Result<BlockContinuants<LaurentPolynomial>, DgaError> {
    if i == 0 || i > word.k() {
        return Err(DgaError::BadBlock(i));
    }
    Ok(block_continuants_with(word, i, &a_vars(ctx, word), &ctx.one()))
}

pub fn disk_table(ctx: &PolyContext, word: &BridgeWord, i: usize) -> Result<DiskTable<LaurentPolynomial>, DgaError> {
    disk_table_with(word, i, &a_vars(ctx, word), &ctx.one())
}

#[derive(Debug, Clone)]
pub struct DgPresentation {
    pub word: BridgeWord,
    pub ctx: PolyContext,
    /// ∂ of every generator, in table order.
    pub differentials: Vec<(String, LaurentPolynomial)>,
}

pub fn build_dga(word: &BridgeWord) -> Result<DgPresentation, DgaError> {
    word.require_rational_form()?;
    let ctx = word_context(word, Coefficients::PrimeField(2));
    let a = a_vars(&ctx, word);
    let one = ctx.one();
    let mut diff: HashMap<usize, LaurentPolynomial> = HashMap::new();
    let k = word.k();
    if k >= 2 {
        diff.insert(word.m(1) + 1, block_continuants_with(word, 1, &a, &one).k);
        for i in 2..k {
            diff.insert(word.m(i) + 1, chord_product_with(word, i, &a, &one));
        }
    }
    let t1 = ctx.var("t1");
    let t1_inv = t1.unit_inverse().unwrap();
    let db1 = b1_core_with(word, &a, &one) + &t1;
    let db2 = b2_core_with(word, &a, &ctx.var("b1"), &t1_inv, &one) + ctx.var("t2");
    let mut differentials = Vec::new();
    for j in 1..=word.crossings() {
        differentials.push((format!("a{j}"), diff.remove(&j).unwrap_or_else(|| ctx.zero())));
    }
    differentials.push(("b1".into(), db1));
    differentials.push(("b2".into(), db2));
    differentials.push(("t1".into(), ctx.zero()));
    differentials.push(("t2".into(), ctx.zero()));
    Ok(DgPresentation {
        word: word.clone(),
        ctx,
        differentials,
    })
}

impl DgPresentation {
    pub fn differential(&self, generator: &str) -> Option<&LaurentPolynomial> {
        self.differentials.iter().find(|(g, _)| g == generator).map(|(_, d)| d)
    }

    /// Extends ∂ to a polynomial by the Leibniz rule (commutative, characteristic 2).
    pub fn apply(&self, f: &LaurentPolynomial) -> LaurentPolynomial {
        let table = self.ctx.table.clone();
        let mut acc = self.ctx.zero();
        for (i, (_, d)) in self.differentials.iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            let terms: Vec<(Vec<i32>, BigInt)> = f
                .terms()
                .filter(|(e, _)| e[i] != 0)
                .map(|(e, c)| {
                    let mut e: Vec<i32> = e.iter().map(|&x| x as i32).collect();
                    let c = c * BigInt::from(e[i]);
                    e[i] -= 1;
                    (e, c)
                })
                .collect();
            let partial = LaurentPolynomial::from_term_list(&table, self.ctx.ring, terms).unwrap();
            acc = acc + partial * d;
        }
        acc
    }

    /// True iff every differential vanishes at the assignment (values in F_2).
    pub fn is_augmentation(&self, assignment: &HashMap<String, u64>) -> Result<bool, DgaError> {
        for t in ["t1", "t2"] {
            if assignment.get(t).is_some_and(|v| v % 2 == 0) {
                return Err(RingError::ZeroAtInvertible(t.into()).into());
            }
        }
        for (_, d) in &self.differentials {
            if d.evaluate(assignment, 2)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::continuant::{braid_matrix_product_with, Fp};
    use proptest::prelude::*;

    fn word_and_point() -> impl Strategy<Value = (BridgeWord, Vec<Fp>)> {
        (prop::collection::vec(2usize..5, 1..4), 1usize..5).prop_flat_map(|(mut mid, last)| {
            let mut blocks = vec![mid.remove(0)];
            blocks.extend(mid);
            blocks.push(last.max(1));
            let w = BridgeWord::new(blocks).unwrap();
            let n = w.crossings();
            (Just(w), prop::collection::vec((0u64..2).prop_map(|v| Fp::new(v, 2)), n))
        })
    }

    proptest! {
        // Over F_2 the block braid matrix is [[K, K^L], [K^R, K^M]], so the disk table
        // is a product of transposed block matrices.
        #[test]
        fn disk_table_matches_transfer_matrices((w, a) in word_and_point()) {
            let one = Fp::new(1, 2);
            let zero = Fp::new(0, 2);
            let block = |j: usize| {
                let (lo, hi) = (w.m(j - 1), w.m(j));
                braid_matrix_product_with(&a[lo..hi], None, &one).entries
            };
            let (mut d34, mut d24, mut d14, mut d13) = (one, zero, zero, zero);
            let mut i = 2;
            while i <= w.k() {
                let p = block(i - 1);
                let c = block(i);
                let x = p[0][1].mul(&d34).add(&p[1][1].mul(&d24));
                let n34 = p[0][0].mul(&d34).add(&p[1][0].mul(&d24));
                let base13 = if i == 2 { x } else { p[1][1].mul(&d13) };
                let n24 = c[0][0].mul(&x).add(&c[1][0].mul(&d14));
                let n14 = c[0][1].mul(&x).add(&c[1][1].mul(&d14));
                let n23 = c[1][0].mul(&base13);
                d13 = c[1][1].mul(&base13);
                d34 = n34;
                d24 = n24;
                d14 = n14;
                let t = disk_table_with(&w, i, &a, &one).unwrap();
                prop_assert_eq!((t.d13, t.d14, t.d23, t.d24, t.d34), (d13, d14, n23, d24, d34));
                i += 2;
            }
        }
    }
}
