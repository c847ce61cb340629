//! Normal rulings of the rational-form front, their bijection with anticliques
//! of the initial quiver, the strata they cut out, and the ruling polynomial.
//!
//! Rulings are counted block by block. For even k the front is not quite plat,
//! but the per-block count already gives the ruling census, so the extra
//! Reidemeister II move is never carried out.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};
use thiserror::Error;

use crate::augvar::{self, forced_units, AugvarError, Style, VarietyPoint};
use crate::bridge::{BlockKind, BridgeError, BridgeWord};
use crate::cluster::{anticliques, Quiver};
use crate::continuant::{continuant_with, Alg, Fp};
use crate::dga::all_blocks;
use crate::polygon::{quiver_from_triangulation, BlockModel, Triangulation};
use crate::ring::{is_prime, Coefficients, LaurentPolynomial, PolyContext, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RulingsError {
    #[error(transparent)]
    Bridge(#[from] BridgeError),
    #[error(transparent)]
    Augvar(#[from] AugvarError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("vertices {0:?} do not form an anticlique")]
    NotAnticlique(Vec<usize>),
    #[error("expected {want} {what} parameters, got {got}")]
    ParameterCount { what: &'static str, want: usize, got: usize },
    #[error("switch parameter vanishes")]
    ZeroUnit,
    #[error("parametrized point violates the variety")]
    OffVariety,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CrossingType {
    Switch,
    Departure,
    Return,
}

impl CrossingType {
    fn letter(self) -> char {
        match self {
            CrossingType::Switch => 'S',
            CrossingType::Departure => 'D',
            CrossingType::Return => 'R',
        }
    }
}

/// The undetermined crossings of block i, left to right.
fn block_undetermined(word: &BridgeWord, i: usize) -> Vec<usize> {
    let (lo, hi) = (word.m(i - 1), word.m(i));
    match word.block_kind(i) {
        BlockKind::Whole => (1..=hi).collect(),
        BlockKind::First => (1..hi).collect(),
        BlockKind::Middle => (lo + 2..hi).collect(),
        BlockKind::Last => (lo + 2..=hi).collect(),
    }
}

pub fn undetermined_crossings(word: &BridgeWord) -> Vec<usize> {
    (1..=word.k()).flat_map(|i| block_undetermined(word, i)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalRuling {
    pub word: BridgeWord,
    /// The undetermined crossings plus the forced departures a_{m_j} and returns a_{m_j+1}.
    pub types: BTreeMap<usize, CrossingType>,
}

impl NormalRuling {
    fn count(&self, t: CrossingType) -> usize {
        self.types.values().filter(|&&x| x == t).count()
    }

    /// s(R): switches.
    pub fn switches(&self) -> usize {
        self.count(CrossingType::Switch)
    }

    /// r(R): returns, forced ones included.
    pub fn returns(&self) -> usize {
        self.count(CrossingType::Return)
    }

    pub fn departures(&self) -> usize {
        self.count(CrossingType::Departure)
    }

    pub fn shape(&self) -> StratumShape {
        let (s, r) = (self.switches(), self.returns());
        StratumShape { switches: s, returns: r, torus_rank: s, affine_rank: r + 1 - self.word.k() }
    }

    /// Types of the undetermined crossings of block i.
    pub fn block_types(&self, i: usize) -> Vec<CrossingType> {
        block_undetermined(&self.word, i).iter().map(|c| self.types[c]).collect()
    }
}

impl fmt::Display for NormalRuling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = (1..=self.word.k())
            .map(|i| self.block_types(i).iter().map(|t| t.letter()).collect())
            .collect();
        write!(f, "{}", blocks.join("|"))
    }
}

/// Stratum of a ruling: (F_p^×)^{torus_rank} × F_p^{affine_rank}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StratumShape {
    pub switches: usize,
    pub returns: usize,
    pub torus_rank: usize,
    pub affine_rank: usize,
}

impl StratumShape {
    pub fn size(&self, p: u64) -> BigInt {
        num_traits::pow(BigInt::from(p - 1), self.torus_rank) * num_traits::pow(BigInt::from(p), self.affine_rank)
    }
}

/// Tilings of a row of `len` cells by S and adjacent (D,R).
fn block_patterns(len: usize) -> Vec<Vec<CrossingType>> {
    if len == 0 {
        return vec![vec![]];
    }
    let mut out: Vec<Vec<CrossingType>> = block_patterns(len - 1)
        .into_iter()
        .map(|mut v| {
            v.insert(0, CrossingType::Switch);
            v
        })
        .collect();
    if len >= 2 {
        out.extend(block_patterns(len - 2).into_iter().map(|mut v| {
            v.splice(0..0, [CrossingType::Departure, CrossingType::Return]);
            v
        }));
    }
    out
}

fn forced_types(word: &BridgeWord) -> BTreeMap<usize, CrossingType> {
    let mut m = BTreeMap::new();
    for j in 1..word.k() {
        m.insert(word.m(j), CrossingType::Departure);
        m.insert(word.m(j) + 1, CrossingType::Return);
    }
    m
}

pub fn enumerate_rulings(word: &BridgeWord) -> Result<Vec<NormalRuling>, RulingsError> {
    word.require_rational_form()?;
    let mut out = vec![forced_types(word)];
    for i in 1..=word.k() {
        let cells = block_undetermined(word, i);
        let pats = block_patterns(cells.len());
        out = out
            .into_iter()
            .flat_map(|base| {
                pats.iter()
                    .map(|pat| {
                        let mut t = base.clone();
                        t.extend(cells.iter().copied().zip(pat.iter().copied()));
                        t
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    Ok(out.into_iter().map(|types| NormalRuling { word: word.clone(), types }).collect())
}

/// Fibonacci number, F_1 = F_2 = 1.
pub fn fibonacci(n: usize) -> BigInt {
    let (mut a, mut b) = (BigInt::from(0), BigInt::one());
    for _ in 0..n {
        let c = &a + &b;
        a = b;
        b = c;
    }
    a
}

/// F_{n_1}·F_{n_2−1}⋯F_{n_{k−1}−1}·F_{n_k}; F_{n+1} when k = 1.
pub fn ruling_count(word: &BridgeWord) -> BigInt {
    (1..=word.k()).map(|i| fibonacci(block_undetermined(word, i).len() + 1)).product()
}

/// Mutable vertex j of block i (1-based within the block) as a vertex of the
/// initial quiver; its cluster variable is A_j = K(x_1..x_j).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMap {
    pub quiver: Quiver,
    /// (block, j, quiver vertex), in quiver order.
    pub mutable: Vec<(usize, usize, usize)>,
}

pub fn initial_vertex_map(word: &BridgeWord) -> VertexMap {
    let mut frozen = Vec::new();
    let mut arrows = Vec::new();
    let mut mutable = Vec::new();
    for b in BlockModel::all(word) {
        let off = frozen.len();
        let fs: Vec<_> = b.frozen_side().into_iter().collect();
        let (q, labels) = quiver_from_triangulation(&Triangulation::fan(b.size, b.size), &fs);
        for (v, &(x, _)) in labels.iter().enumerate() {
            if !q.is_frozen(v) {
                mutable.push((b.block, x - 1, off + v));
            }
        }
        arrows.extend(q.arrows().into_iter().flat_map(|(i, j, m)| std::iter::repeat((off + i, off + j)).take(m as usize)));
        frozen.extend_from_slice(q.frozen());
    }
    VertexMap { quiver: Quiver::from_arrows(frozen, &arrows), mutable }
}

impl VertexMap {
    fn vertex(&self, block: usize, j: usize) -> Option<usize> {
        self.mutable.iter().find(|&&(b, x, _)| b == block && x == j).map(|&(_, _, v)| v)
    }

    fn position(&self, v: usize) -> Option<(usize, usize)> {
        self.mutable.iter().find(|&&(_, _, x)| x == v).map(|&(b, j, _)| (b, j))
    }

    fn is_anticlique(&self, set: &[usize]) -> bool {
        set.iter().all(|&v| self.position(v).is_some())
            && set.iter().all(|&a| set.iter().all(|&b| self.quiver.eps(a, b) == 0))
    }
}

/// Members of the anticlique become (Departure, Return) on the j-th and
/// (j+1)-th undetermined crossings of their block; the rest are switches.
pub fn ruling_from_anticlique(word: &BridgeWord, set: &[usize]) -> Result<NormalRuling, RulingsError> {
    word.require_rational_form()?;
    let map = initial_vertex_map(word);
    if !map.is_anticlique(set) {
        return Err(RulingsError::NotAnticlique(set.to_vec()));
    }
    let mut types = forced_types(word);
    for c in undetermined_crossings(word) {
        types.insert(c, CrossingType::Switch);
    }
    for &v in set {
        let (b, j) = map.position(v).expect("checked");
        let cells = block_undetermined(word, b);
        types.insert(cells[j - 1], CrossingType::Departure);
        types.insert(cells[j], CrossingType::Return);
    }
    Ok(NormalRuling { word: word.clone(), types })
}

pub fn anticlique_from_ruling(r: &NormalRuling) -> Vec<usize> {
    let map = initial_vertex_map(&r.word);
    let mut out = Vec::new();
    for i in 1..=r.word.k() {
        for (j, t) in r.block_types(i).iter().enumerate() {
            if *t == CrossingType::Departure {
                out.push(map.vertex(i, j + 1).expect("pairs sit on mutable vertices"));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Coordinates of block i in the inequality presentation: the undetermined
/// crossings, then the forced departure a_{m_i} unless i = k.
fn block_coords(word: &BridgeWord, i: usize) -> Vec<usize> {
    word.block_coords(i).collect()
}

/// The mutable vertices whose initial cluster variable vanishes at the point.
pub fn classify_point(word: &BridgeWord, pt: &VarietyPoint) -> Result<Vec<usize>, RulingsError> {
    let map = initial_vertex_map(word);
    let p = pt.p;
    let one = Fp::new(1, p);
    let mut vals = pt.values.iter();
    let mut out = Vec::new();
    for i in 1..=word.k() {
        let xs: Vec<Fp> = block_coords(word, i).iter().map(|_| Fp::new(*vals.next().expect("point matches word"), p)).collect();
        // A_j by the forward recursion.
        let (mut prev, mut cur) = (Fp::new(0, p), one.clone());
        for (j, x) in xs.iter().enumerate() {
            let next = x.mul(&cur).sub(&prev);
            prev = cur;
            cur = next;
            if cur.is_zero() {
                if let Some(v) = map.vertex(i, j + 1) {
                    out.push(v);
                }
            }
        }
    }
    out.sort_unstable();
    if !map.is_anticlique(&out) {
        return Err(RulingsError::NotAnticlique(out));
    }
    Ok(out)
}

/// Per-block values along a ruling, over any algebra: `unit(c)` and `inv(c)`
/// give the switch parameter at crossing c and its inverse, `ret(c)` the free
/// scalar at a return.
fn stratum_values<T: Alg>(
    r: &NormalRuling,
    zero: &T,
    unit: &mut dyn FnMut(usize) -> (T, T),
    ret: &mut dyn FnMut(usize) -> T,
) -> Vec<T> {
    let word = &r.word;
    let mut out = Vec::new();
    for i in 1..=word.k() {
        let mut last: Option<(CrossingType, Option<T>)> = None;
        for c in block_coords(word, i) {
            let t = r.types[&c];
            let v = match t {
                CrossingType::Switch => {
                    let (u, uinv) = unit(c);
                    let v = match &last {
                        Some((CrossingType::Switch, Some(pinv))) => u.add(pinv),
                        _ => u,
                    };
                    last = Some((t, Some(uinv)));
                    out.push(v);
                    continue;
                }
                CrossingType::Return => ret(c),
                CrossingType::Departure => match &last {
                    Some((CrossingType::Switch, Some(pinv))) => pinv.clone(),
                    _ => zero.clone(),
                },
            };
            last = Some((t, None));
            out.push(v);
        }
    }
    out
}

/// The point with switch units `units` and return scalars `scalars`, both in
/// crossing order.
pub fn parametrize_stratum(r: &NormalRuling, units: &[u64], scalars: &[u64], p: u64) -> Result<VarietyPoint, RulingsError> {
    if !is_prime(p) {
        return Err(RingError::NotPrime(p).into());
    }
    let word = &r.word;
    let coords: Vec<usize> = (1..=word.k()).flat_map(|i| block_coords(word, i)).collect();
    let sw: Vec<usize> = coords.iter().copied().filter(|c| r.types[c] == CrossingType::Switch).collect();
    let rt: Vec<usize> = coords.iter().copied().filter(|c| r.types[c] == CrossingType::Return).collect();
    if sw.len() != units.len() {
        return Err(RulingsError::ParameterCount { what: "switch", want: sw.len(), got: units.len() });
    }
    if rt.len() != scalars.len() {
        return Err(RulingsError::ParameterCount { what: "return", want: rt.len(), got: scalars.len() });
    }
    if units.iter().any(|&u| u % p == 0) {
        return Err(RulingsError::ZeroUnit);
    }
    let ui: HashMap<usize, Fp> = sw.iter().zip(units).map(|(&c, &u)| (c, Fp::new(u, p))).collect();
    let zi: HashMap<usize, Fp> = rt.iter().zip(scalars).map(|(&c, &z)| (c, Fp::new(z, p))).collect();
    let values = stratum_values(
        r,
        &Fp::new(0, p),
        &mut |c| (ui[&c].clone(), ui[&c].inv()),
        &mut |c| zi[&c].clone(),
    );
    let mut a = vec![Fp::new(0, p); word.crossings()];
    for (&c, v) in coords.iter().zip(&values) {
        a[c - 1] = v.clone();
    }
    let (t1, t2) = forced_units(&all_blocks(word, &a, &Fp::new(1, p)));
    let pt = VarietyPoint { p, values: values.iter().map(|v| v.v).collect(), forced_t1: t1.v, forced_t2: t2.v };
    if !augvar::presentation(word, Style::Inequality)?.satisfied_by(&pt)? {
        return Err(RulingsError::OffVariety);
    }
    Ok(pt)
}

/// Symbolic check of the two stratum claims on every block: along the
/// parametrization, A_{j−1} vanishes when the j-th coordinate is a return and
/// equals the product of the earlier switch units otherwise (over F_2).
pub fn stratum_claims_hold(r: &NormalRuling) -> bool {
    let word = &r.word;
    let coords: Vec<usize> = (1..=word.k()).flat_map(|i| block_coords(word, i)).collect();
    let ctx = PolyContext::new(
        coords.iter().flat_map(|c| [(format!("u{c}"), true), (format!("z{c}"), false)]),
        Coefficients::PrimeField(2),
    )
    .expect("distinct names");
    let values = stratum_values(
        r,
        &ctx.zero(),
        &mut |c| {
            let u = ctx.var(&format!("u{c}"));
            let inv = u.unit_inverse().expect("invertible");
            (u, inv)
        },
        &mut |c| ctx.var(&format!("z{c}")),
    );
    let mut vals = values.into_iter();
    for i in 1..=word.k() {
        let bc = block_coords(word, i);
        let xs: Vec<LaurentPolynomial> = bc.iter().map(|_| vals.next().unwrap()).collect();
        let mut units = ctx.one();
        for (j, &c) in bc.iter().enumerate() {
            let a = continuant_with(&xs[..j], &ctx.one());
            let ok = match r.types[&c] {
                CrossingType::Return => a.is_zero(),
                _ => a == units,
            };
            if !ok {
                return false;
            }
            if r.types[&c] == CrossingType::Switch {
                units = &units * &ctx.var(&format!("u{c}"));
            }
        }
    }
    true
}

/// B(z) = Σ_R z^{s(R)−1}, a Laurent polynomial in z.
pub fn ruling_polynomial(word: &BridgeWord) -> Result<LaurentPolynomial, RulingsError> {
    let ctx = z_context();
    let mut acc = ctx.zero();
    for r in enumerate_rulings(word)? {
        acc = &acc + &LaurentPolynomial::monomial(ctx.one().table(), ctx.one().ring(), vec![r.switches() as i32 - 1], 1)?;
    }
    Ok(acc)
}

fn z_context() -> PolyContext {
    PolyContext::new([("z", true)], Coefficients::Integers).expect("single variable")
}

fn w_context() -> PolyContext {
    PolyContext::new([("w", true)], Coefficients::Integers).expect("single variable")
}

/// Both sides of the Kauffman identity, with q = w².
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KauffmanCheck {
    pub stratum_sum: LaurentPolynomial,
    pub closed_form: LaurentPolynomial,
    pub ruling_side: LaurentPolynomial,
}

impl KauffmanCheck {
    pub fn holds(&self) -> bool {
        self.stratum_sum == self.closed_form && self.closed_form == self.ruling_side
    }
}

pub fn kauffman_sides(word: &BridgeWord) -> Result<KauffmanCheck, RulingsError> {
    let ctx = w_context();
    let w = ctx.var("w");
    let q = w.pow(2);
    let x = &w - &w.unit_inverse().expect("invertible");
    let rulings = enumerate_rulings(word)?;
    let mut stratum_sum = ctx.zero();
    for r in &rulings {
        let sh = r.shape();
        stratum_sum = &stratum_sum + &(&(&q - &ctx.one()).pow(sh.torus_rank as u32) * &q.pow(sh.affine_rank as u32));
    }
    let cf = augvar::point_count_closed_form(word)?;
    let terms: Vec<(Vec<i32>, BigInt)> = cf.terms().map(|(e, c)| (vec![2 * e[0] as i32], c)).collect();
    let closed_form = LaurentPolynomial::from_term_list(ctx.one().table(), Coefficients::Integers, terms)?;
    let b = ruling_polynomial(word)?;
    let mut bx = ctx.zero();
    for (e, c) in b.terms() {
        // s(R) ≥ 0, so z^{s−1}·x = x^s never needs a negative power.
        bx = &bx + &(&x.pow((e[0] + 1) as u32) * &LaurentPolynomial::constant_big(ctx.one().table(), Coefficients::Integers, &c));
    }
    let lead = w.pow(crate::fillings::pinch_count(word) as u32);
    let ruling_side = &lead * &bx;
    Ok(KauffmanCheck { stratum_sum, closed_form, ruling_side })
}

/// Σ_R (q−1)^{s(R)} q^{r(R)−k+1} = closed-form point count = q^{m_k/2−k+1}(w−w⁻¹)B(w−w⁻¹).
pub fn kauffman_identity_check(word: &BridgeWord) -> Result<bool, RulingsError> {
    Ok(kauffman_sides(word)?.holds())
}

/// One row per ruling, plus totals, for reports.
pub fn rulings_report(word: &BridgeWord) -> Result<Value, RulingsError> {
    let rows: Vec<Value> = enumerate_rulings(word)?
        .iter()
        .map(|r| {
            let sh = r.shape();
            json!({
                "types": r.to_string(),
                "switches": sh.switches,
                "returns": sh.returns,
                "torus_rank": sh.torus_rank,
                "affine_rank": sh.affine_rank,
                "anticlique": anticlique_from_ruling(r),
            })
        })
        .collect();
    Ok(json!({
        "word": word.to_string(),
        "count": rows.len(),
        "fibonacci_product": ruling_count(word).to_string(),
        "ruling_polynomial": ruling_polynomial(word)?.to_string(),
        "kauffman_identity": kauffman_identity_check(word)?,
        "rulings": rows,
    }))
}

/// Anticlique-indexed strata of the F_p points, keyed by sorted vertex list.
pub fn stratify_points(word: &BridgeWord, p: u64) -> Result<BTreeMap<Vec<usize>, BigInt>, RulingsError> {
    let pres = augvar::presentation(word, Style::Inequality)?;
    let mut strata: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
    let mut err = None;
    augvar::for_each_point(&pres, p, |pt| match classify_point(word, pt) {
        Ok(a) => *strata.entry(a).or_default() += 1,
        Err(e) => err = Some(e),
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(strata),
    }
}

pub fn all_anticliques(word: &BridgeWord) -> Vec<Vec<usize>> {
    let map = initial_vertex_map(word);
    anticliques(&map.quiver).into_iter().filter(|a| a.iter().all(|&v| map.position(v).is_some())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;
    use CrossingType::*;

    fn w(b: &[usize]) -> BridgeWord {
        BridgeWord::of(b)
    }

    fn types(word: &BridgeWord) -> BTreeSet<String> {
        enumerate_rulings(word).unwrap().iter().map(|r| r.to_string()).collect()
    }

    #[test]
    fn undetermined() {
        assert_eq!(undetermined_crossings(&w(&[5, 4])), vec![1, 2, 3, 4, 7, 8, 9]);
        assert_eq!(undetermined_crossings(&w(&[2, 2])), vec![1, 4]);
        assert_eq!(undetermined_crossings(&w(&[3])), vec![1, 2, 3]);
    }

    #[test]
    fn ruling_lists() {
        assert_eq!(types(&w(&[3])), ["SSS", "SDR", "DRS"].iter().map(|s| s.to_string()).collect());
        assert_eq!(enumerate_rulings(&w(&[5, 4])).unwrap().len(), 15);
        assert_eq!(enumerate_rulings(&w(&[3, 3])).unwrap().len(), 4);
        let r = &enumerate_rulings(&w(&[2, 2])).unwrap()[0];
        assert_eq!((r.types[&2], r.types[&3]), (Departure, Return));
        assert_eq!((r.switches(), r.returns(), r.departures()), (2, 1, 1));
    }

    #[test]
    fn fibonacci_counts() {
        let f: Vec<BigInt> = (1..=8).map(fibonacci).collect();
        assert_eq!(f, [1, 1, 2, 3, 5, 8, 13, 21].map(BigInt::from));
        for word in BridgeWord::all_rational_forms(10) {
            let n = enumerate_rulings(&word).unwrap().len();
            assert_eq!(BigInt::from(n), ruling_count(&word), "{word}");
            assert_eq!(all_anticliques(&word).len(), n, "{word}");
        }
    }

    #[test]
    fn anticlique_examples() {
        let word = w(&[3]);
        assert_eq!(ruling_from_anticlique(&word, &[]).unwrap().to_string(), "SSS");
        let map = initial_vertex_map(&word);
        let v1 = map.vertex(1, 1).unwrap();
        assert_eq!(ruling_from_anticlique(&word, &[v1]).unwrap().to_string(), "DRS");
        let word = w(&[5, 4]);
        let map = initial_vertex_map(&word);
        let set = [map.vertex(1, 1).unwrap(), map.vertex(1, 3).unwrap()];
        assert_eq!(ruling_from_anticlique(&word, &set).unwrap().to_string(), "DRDR|SSS");
        let bad = [map.vertex(1, 1).unwrap(), map.vertex(1, 2).unwrap()];
        assert!(matches!(ruling_from_anticlique(&word, &bad), Err(RulingsError::NotAnticlique(_))));
    }

    #[test]
    fn bijection() {
        for word in BridgeWord::all_rational_forms(10) {
            for a in all_anticliques(&word) {
                let r = ruling_from_anticlique(&word, &a).unwrap();
                assert_eq!(anticlique_from_ruling(&r), a);
            }
        }
    }

    #[test]
    fn trefoil_parametrizations() {
        let r = |s: &str| enumerate_rulings(&w(&[3])).unwrap().into_iter().find(|r| r.to_string() == s).unwrap();
        // (u1, u2 + u1⁻¹, u3 + u2⁻¹) with u = (1, 2, 2) over F_3.
        let pt = parametrize_stratum(&r("SSS"), &[1, 2, 2], &[], 3).unwrap();
        assert_eq!(pt.values, vec![1, 0, 1]);
        let pt = parametrize_stratum(&r("SDR"), &[2], &[1], 3).unwrap();
        assert_eq!(pt.values, vec![2, 2, 1]);
        let pt = parametrize_stratum(&r("DRS"), &[2], &[1], 3).unwrap();
        assert_eq!(pt.values, vec![0, 1, 2]);
        assert_eq!(
            parametrize_stratum(&r("SSS"), &[1], &[], 3).unwrap_err(),
            RulingsError::ParameterCount { what: "switch", want: 3, got: 1 }
        );
    }

    #[test]
    fn classify_examples() {
        let word = w(&[3]);
        let map = initial_vertex_map(&word);
        let pt = |v: Vec<u64>| VarietyPoint { p: 2, values: v, forced_t1: 1, forced_t2: 1 };
        assert!(classify_point(&word, &pt(vec![1, 0, 0])).unwrap().is_empty());
        assert_eq!(classify_point(&word, &pt(vec![1, 1, 1])).unwrap(), vec![map.vertex(1, 2).unwrap()]);
        let pres = augvar::presentation(&w(&[2, 2]), Style::Inequality).unwrap();
        let pts = augvar::enumerate_points(&pres, 2).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(classify_point(&w(&[2, 2]), &pts[0]).unwrap().is_empty());
    }

    #[test]
    fn ruling_polynomials() {
        let text = |b: &[usize]| ruling_polynomial(&w(b)).unwrap().to_string();
        assert_eq!(text(&[3]), "z^2 + 2");
        assert_eq!(text(&[2, 2]), "z");
        let b = ruling_polynomial(&w(&[5, 4])).unwrap();
        let total: BigInt = b.terms().map(|(_, c)| c).sum();
        assert_eq!(total, BigInt::from(15));
        assert_eq!(b.terms().map(|(e, _)| e[0]).max(), Some(6));
    }

    #[test]
    fn kauffman_examples() {
        let k = kauffman_sides(&w(&[3])).unwrap();
        let ctx = w_context();
        let want = ["w^6", "-w^4", "w^2", "-1"].iter().fold(ctx.zero(), |acc, m| {
            let (neg, m) = m.strip_prefix('-').map_or((false, *m), |x| (true, x));
            let t = ctx.mono(m);
            if neg { &acc - &t } else { &acc + &t }
        });
        assert_eq!(k.ruling_side, want);
        assert!(k.holds());
        for word in BridgeWord::all_rational_forms(10) {
            assert!(kauffman_identity_check(&word).unwrap(), "{word}");
        }
    }

    #[test]
    fn strata_match_rulings() {
        for word in BridgeWord::all_rational_forms(7) {
            for p in [2, 3] {
                let strata = stratify_points(&word, p).unwrap();
                let keys: Vec<Vec<usize>> = strata.keys().cloned().collect();
                let mut want = all_anticliques(&word);
                want.sort();
                assert_eq!(keys, want, "{word} p={p}");
                for (a, n) in &strata {
                    assert_eq!(*n, ruling_from_anticlique(&word, a).unwrap().shape().size(p), "{word} {a:?}");
                }
            }
        }
    }

    #[test]
    fn parametrization_is_a_bijection_onto_strata() {
        for word in BridgeWord::all_rational_forms(6) {
            for p in [2u64, 3] {
                for r in enumerate_rulings(&word).unwrap() {
                    let sh = r.shape();
                    let a = anticlique_from_ruling(&r);
                    let mut seen = BTreeSet::new();
                    let nu = sh.torus_rank;
                    let nz = sh.affine_rank;
                    let total = (p - 1).pow(nu as u32) * p.pow(nz as u32);
                    for code in 0..total {
                        let mut c = code;
                        let units: Vec<u64> = (0..nu).map(|_| { let u = c % (p - 1) + 1; c /= p - 1; u }).collect();
                        let zs: Vec<u64> = (0..nz).map(|_| { let z = c % p; c /= p; z }).collect();
                        let pt = parametrize_stratum(&r, &units, &zs, p).unwrap();
                        assert_eq!(classify_point(&word, &pt).unwrap(), a);
                        assert!(pt.forced_t1 != 0 && pt.forced_t2 != 0);
                        seen.insert(pt.values);
                    }
                    assert_eq!(BigInt::from(seen.len()), sh.size(p));
                }
            }
        }
    }

    #[test]
    fn stratum_claims() {
        for b in [vec![7], vec![7, 2], vec![4, 5, 3], vec![2, 7]] {
            for r in enumerate_rulings(&w(&b)).unwrap() {
                assert!(stratum_claims_hold(&r), "{:?} {r}", b);
            }
        }
    }

    #[test]
    fn shapes_fill_the_degree() {
        for word in BridgeWord::all_rational_forms(9) {
            for r in enumerate_rulings(&word).unwrap() {
                let sh = r.shape();
                assert_eq!(sh.torus_rank + 2 * sh.affine_rank, crate::fillings::pinch_count(&word));
            }
        }
    }
}
