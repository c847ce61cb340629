//! The ungraded augmentation variety modulo dg-homotopy.
//!
//! Each block contributes one continuant condition on its own coordinates, so
//! the variety is a product of per-block varieties. A one-block word [n] is
//! cut out by K_n(a_1..a_n) ≠ 0; its equation style adds a coordinate a0 with
//! K_{n+1}(a0, a_1..a_n) = 0.

use std::collections::HashMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::bridge::{BlockKind, BridgeError, BridgeWord};
use crate::continuant::{continuant_with, Alg, Fp};
use crate::dga::{b1_core_from_blocks, b2_core_from_blocks, build_dga, BlockContinuants, DgaError};
use crate::ring::{is_prime, Coefficients, LaurentPolynomial, PolyContext, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AugvarError {
    #[error(transparent)]
    Bridge(#[from] BridgeError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Dga(#[from] DgaError),
    #[error("{0} candidate tuples exceed the enumeration budget of {1}")]
    BudgetExceeded(u128, u128),
    #[error("assignment is not an augmentation")]
    NotAugmentation,
    #[error("missing value for `{0}`")]
    Missing(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    /// k − 1 equations and one inequation.
    Inequality,
    /// k equations over one extra coordinate.
    Equation,
}

/// One block's condition: K of `coords` (in order) vanishes or not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCondition {
    pub block: usize,
    pub coords: Vec<usize>,
    pub vanishes: bool,
}

#[derive(Debug, Clone)]
pub struct VarietyPresentation {
    pub word: BridgeWord,
    pub style: Style,
    /// Indices j of the coordinates a_j (0 is the extra one-block coordinate).
    pub coords: Vec<usize>,
    pub ctx: PolyContext,
    pub equations: Vec<LaurentPolynomial>,
    pub inequations: Vec<LaurentPolynomial>,
    /// Generators forgotten by the homotopy quotient.
    pub free: Vec<String>,
    pub conditions: Vec<BlockCondition>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarietyPoint {
    pub p: u64,
    /// Aligned with the presentation's `coords`.
    pub values: Vec<u64>,
    pub forced_t1: u64,
    pub forced_t2: u64,
}

fn conditions(word: &BridgeWord, style: Style) -> Vec<BlockCondition> {
    (1..=word.k())
        .map(|i| {
            let kind = word.block_kind(i);
            let mut coords: Vec<usize> = word.block_coords(i).collect();
            let mut vanishes = !matches!(kind, BlockKind::Whole | BlockKind::Last);
            if style == Style::Equation && !vanishes {
                let lead = if kind == BlockKind::Whole { 0 } else { word.m(i - 1) + 1 };
                coords.insert(0, lead);
                vanishes = true;
            }
            BlockCondition { block: i, coords, vanishes }
        })
        .collect()
}

pub fn presentation(word: &BridgeWord, style: Style) -> Result<VarietyPresentation, AugvarError> {
    presentation_over(word, style, Coefficients::Integers)
}

pub fn presentation_over(word: &BridgeWord, style: Style, ring: Coefficients) -> Result<VarietyPresentation, AugvarError> {
    word.require_rational_form()?;
    let conditions = conditions(word, style);
    let coords: Vec<usize> = conditions.iter().flat_map(|c| c.coords.iter().copied()).collect();
    let ctx = PolyContext::new(coords.iter().map(|j| (format!("a{j}"), false)), ring)?;
    let (mut equations, mut inequations) = (Vec::new(), Vec::new());
    for c in &conditions {
        let xs: Vec<_> = c.coords.iter().map(|j| ctx.var(&format!("a{j}"))).collect();
        let k = continuant_with(&xs, &ctx.one());
        if c.vanishes {
            equations.push(k);
        } else {
            inequations.push(k);
        }
    }
    let mut free: Vec<String> = word.free_chords().iter().map(|j| format!("a{j}")).collect();
    if style == Style::Equation && word.k() > 1 {
        free.pop();
    }
    free.extend(["b1".to_string(), "b2".to_string()]);
    Ok(VarietyPresentation {
        word: word.clone(),
        style,
        coords,
        ctx,
        equations,
        inequations,
        free,
        conditions,
    })
}

/// Per-block solutions in lexicographic order, paired with the block's continuants
/// (leading free chord set to 0).
struct BlockSolutions {
    values: Vec<Vec<u64>>,
    continuants: Vec<BlockContinuants<Fp>>,
}

fn solve_block(word: &BridgeWord, cond: &BlockCondition, p: u64) -> BlockSolutions {
    let d = cond.coords.len();
    let mut out = BlockSolutions {
        values: Vec::new(),
        continuants: Vec::new(),
    };
    let mut cur = vec![0u64; d];
    // prefix[j] = K(x_1..x_j) mod p, prefix[0] = 1, and K_{−1} = 0.
    let mut prefix = vec![0u64; d + 1];
    prefix[0] = 1;
    fn rec(j: usize, p: u64, cur: &mut Vec<u64>, prefix: &mut Vec<u64>, on_leaf: &mut dyn FnMut(&[u64], u64)) {
        if j == cur.len() {
            on_leaf(cur, prefix[j]);
            return;
        }
        let before = if j == 0 { 0 } else { prefix[j - 1] };
        for x in 0..p {
            cur[j] = x;
            prefix[j + 1] = ((prefix[j] as u128 * x as u128 + (p - before) as u128) % p as u128) as u64;
            rec(j + 1, p, cur, prefix, on_leaf);
        }
    }
    let kind = word.block_kind(cond.block);
    let lead_free = matches!(kind, BlockKind::Middle | BlockKind::Last);
    let skip_lead = cond.coords.first().is_some_and(|&j| j == 0 || (lead_free && j == word.m(cond.block - 1) + 1));
    let one = Fp::new(1, p);
    rec(0, p, &mut cur, &mut prefix, &mut |xs, k| {
        if (k == 0) != cond.vanishes {
            return;
        }
        out.values.push(xs.to_vec());
        let mut chords: Vec<Fp> = Vec::with_capacity(xs.len() + 1);
        if lead_free {
            chords.push(Fp::new(0, p));
        }
        let body = if skip_lead { &xs[1..] } else { xs };
        chords.extend(body.iter().map(|&v| Fp::new(v, p)));
        out.continuants.push(fp_block(&chords, &one));
    });
    out
}

fn fp_block(chords: &[Fp], one: &Fp) -> BlockContinuants<Fp> {
    let n = chords.len();
    let zero = Fp::new(0, one.p);
    BlockContinuants {
        k: continuant_with(chords, one),
        kl: continuant_with(&chords[..n - 1], one),
        km: if n == 1 { zero } else { continuant_with(&chords[1..n - 1], one) },
        kr: continuant_with(&chords[1..], one),
    }
}

/// The t_1, t_2 solving ∂b_1 = ∂b_2 = 0, with free chords and b_1 taken to be 0.
pub fn forced_units(bcs: &[BlockContinuants<Fp>]) -> (Fp, Fp) {
    let zero = Fp::new(0, bcs[0].k.p);
    let t1 = zero.sub(&b1_core_from_blocks(bcs));
    let t1_inv = if t1.is_zero() { zero } else { t1.inv() };
    let t2 = zero.sub(&b2_core_from_blocks(bcs, &zero, &t1_inv));
    (t1, t2)
}

fn check_prime(p: u64) -> Result<(), AugvarError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(RingError::NotPrime(p).into())
    }
}

fn search_cost(pres: &VarietyPresentation, p: u64) -> u128 {
    pres.conditions
        .iter()
        .map(|c| (p as u128).saturating_pow(c.coords.len() as u32))
        .fold(0u128, |a, b| a.saturating_add(b))
}

fn solutions(pres: &VarietyPresentation, p: u64) -> Result<Vec<BlockSolutions>, AugvarError> {
    check_prime(p)?;
    let cost = search_cost(pres, p);
    if cost > crate::budget() {
        return Err(AugvarError::BudgetExceeded(cost, crate::budget()));
    }
    Ok(pres.conditions.iter().map(|c| solve_block(&pres.word, c, p)).collect())
}

/// Number of F_p points, found by exhaustive per-block search.
pub fn count_points(pres: &VarietyPresentation, p: u64) -> Result<BigInt, AugvarError> {
    let sols = solutions(pres, p)?;
    Ok(sols.iter().map(|s| BigInt::from(s.values.len())).product())
}

/// Visits every F_p point in lexicographic order without materializing the list.
pub fn for_each_point(pres: &VarietyPresentation, p: u64, mut visit: impl FnMut(&VarietyPoint)) -> Result<(), AugvarError> {
    let sols = solutions(pres, p)?;
    if sols.iter().any(|s| s.values.is_empty()) {
        return Ok(());
    }
    let k = sols.len();
    let mut idx = vec![0usize; k];
    let mut point = VarietyPoint {
        p,
        values: Vec::with_capacity(pres.coords.len()),
        forced_t1: 0,
        forced_t2: 0,
    };
    let mut bcs: Vec<BlockContinuants<Fp>> = sols.iter().map(|s| s.continuants[0].clone()).collect();
    loop {
        point.values.clear();
        for (b, s) in sols.iter().enumerate() {
            point.values.extend_from_slice(&s.values[idx[b]]);
            bcs[b] = s.continuants[idx[b]].clone();
        }
        let (t1, t2) = forced_units(&bcs);
        point.forced_t1 = t1.v;
        point.forced_t2 = t2.v;
        visit(&point);
        let mut b = k;
        loop {
            if b == 0 {
                return Ok(());
            }
            b -= 1;
            idx[b] += 1;
            if idx[b] < sols[b].values.len() {
                break;
            }
            idx[b] = 0;
        }
    }
}

pub fn enumerate_points(pres: &VarietyPresentation, p: u64) -> Result<Vec<VarietyPoint>, AugvarError> {
    let total = count_points(pres, p)?;
    let cap = BigInt::from(crate::budget());
    if total > cap {
        return Err(AugvarError::BudgetExceeded(
            total.try_into().unwrap_or(u128::MAX),
            crate::budget(),
        ));
    }
    let mut out = Vec::new();
    for_each_point(pres, p, |pt| out.push(pt.clone()))?;
    Ok(out)
}

/// Variables `q` over Z.
pub fn q_context() -> PolyContext {
    PolyContext::new([("q", false)], Coefficients::Integers).expect("single variable")
}

/// f_n(q) = Σ_{j=0}^{n} (−1)^{n−j} q^j.
pub fn f_poly(ctx: &PolyContext, n: usize) -> LaurentPolynomial {
    let terms = (0..=n)
        .map(|j| (vec![j as i32], BigInt::from(if (n - j) % 2 == 0 { 1 } else { -1 })))
        .collect();
    LaurentPolynomial::from_term_list(&ctx.table, ctx.ring, terms).expect("univariate")
}

pub fn point_count_closed_form(word: &BridgeWord) -> Result<LaurentPolynomial, AugvarError> {
    word.require_rational_form()?;
    let ctx = q_context();
    let mut acc = ctx.one();
    for i in 1..=word.k() {
        let n = word.n(i);
        let deg = match word.block_kind(i) {
            BlockKind::Whole => n,
            BlockKind::First | BlockKind::Last => n - 1,
            BlockKind::Middle => n - 2,
        };
        acc = acc * f_poly(&ctx, deg);
    }
    Ok(acc)
}

pub fn closed_form_value(word: &BridgeWord, q: u64) -> Result<BigInt, AugvarError> {
    Ok(point_count_closed_form(word)?.evaluate_integer(&[BigInt::from(q)])?)
}

/// Drops the homotopy-free generators from an F_2 augmentation.
pub fn homotopy_reduce(word: &BridgeWord, full: &HashMap<String, u64>) -> Result<VarietyPoint, AugvarError> {
    let dga = build_dga(word)?;
    for (g, _) in &dga.differentials {
        if !full.contains_key(g) {
            return Err(AugvarError::Missing(g.clone()));
        }
    }
    if !dga.is_augmentation(full)? {
        return Err(AugvarError::NotAugmentation);
    }
    let pres = presentation(word, Style::Inequality)?;
    Ok(VarietyPoint {
        p: 2,
        values: pres.coords.iter().map(|j| full[&format!("a{j}")] % 2).collect(),
        forced_t1: full["t1"] % 2,
        forced_t2: full["t2"] % 2,
    })
}

/// Solves the extra equation-style coordinate of an inequality-style point.
pub fn to_equation_style(word: &BridgeWord, pt: &VarietyPoint) -> Result<VarietyPoint, AugvarError> {
    let ineq = presentation(word, Style::Inequality)?;
    let last = ineq.conditions.last().unwrap();
    let start = ineq.coords.len() - last.coords.len();
    let p = pt.p;
    let one = Fp::new(1, p);
    let tail: Vec<Fp> = pt.values[start..].iter().map(|&v| Fp::new(v, p)).collect();
    let kn1 = continuant_with(&tail, &one);
    let kn2 = if tail.is_empty() { Fp::new(0, p) } else { continuant_with(&tail[1..], &one) };
    if kn1.is_zero() {
        return Err(AugvarError::NotAugmentation);
    }
    // x·K(tail) − K(tail[1..]) = 0.
    let x = kn2.mul(&kn1.inv());
    let mut values = pt.values[..start].to_vec();
    values.push(x.v);
    values.extend_from_slice(&pt.values[start..]);
    Ok(VarietyPoint { values, ..pt.clone() })
}

impl VarietyPresentation {
    /// Evaluates every equation and inequation at a point over F_p.
    pub fn satisfied_by(&self, pt: &VarietyPoint) -> Result<bool, AugvarError> {
        let p = pt.p;
        for e in &self.equations {
            if e.evaluate_indexed(&pt.values, p)? != 0 {
                return Ok(false);
            }
        }
        for e in &self.inequations {
            if e.evaluate_indexed(&pt.values, p)? == 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn coord_names(&self) -> Vec<String> {
        self.coords.iter().map(|j| format!("a{j}")).collect()
    }
}
