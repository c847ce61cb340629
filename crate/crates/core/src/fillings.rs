//! Admissible pinching sequences, the substitutions they induce on the
//! dg-algebra, the cluster seeds they land in, and the filling census.
//!
//! Each block carries two views of its surviving crossings: the chord list
//! (with the block's leading free chord for middle and last blocks) along which
//! pinch corrections travel, and the active vertex list of the block polygon,
//! from which each pinch clips an ear.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde_json::{json, Value};
use thiserror::Error;

use crate::augvar::{self, AugvarError, BlockCondition, Style};
use crate::bridge::{BlockKind, BridgeError, BridgeWord};
use crate::cluster::Seed;
use crate::continuant::{continuant_with, Alg};
use crate::dga::{all_blocks, b1_core_from_blocks, b2_core_from_blocks};
use crate::polygon::{
    a_context, diagonal_to_continuant_with, direct_sum, seed_from_triangulation, BlockModel, PolygonError,
    Triangulation,
};
use crate::ring::{Coefficients, LaurentPolynomial, PolyContext, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FillingsError {
    #[error(transparent)]
    Bridge(#[from] BridgeError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error(transparent)]
    Augvar(#[from] AugvarError),
    #[error("step {step}: a{chord} is not pinchable")]
    NotPinchable { step: usize, chord: usize },
    #[error("{got} pinches given, a complete sequence has {want}")]
    Incomplete { got: usize, want: usize },
    #[error("{0} is not a unit under the parametrization")]
    NotUnit(String),
    #[error("{0} sequences exceed the enumeration budget of {1}")]
    BudgetExceeded(u128, u128),
    #[error("{0} pinches is too many for the fast census")]
    TooLong(usize),
    #[error("triangulation tuple does not fit the word's block polygons")]
    BadTuple,
}

/// Number of pinches in a complete sequence: m_k − 2k + 2.
pub fn pinch_count(word: &BridgeWord) -> usize {
    word.crossings() + 2 - 2 * word.k()
}

/// Catalan number C_n.
pub fn catalan(n: usize) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..n {
        c = c * BigInt::from(2 * (2 * i + 1)) / BigInt::from(i + 2);
    }
    c
}

/// Product over blocks of the triangulation counts C_{N−2} of the block polygons.
pub fn filling_count(word: &BridgeWord) -> BigInt {
    BlockModel::all(word)
        .iter()
        .map(|b| catalan(b.size.saturating_sub(2)))
        .product()
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Track {
    kind: BlockKind,
    offset: usize,
    size: usize,
    chords: Vec<usize>,
    active: Vec<usize>,
    emitted: Vec<(usize, usize)>,
}

impl Track {
    fn new(word: &BridgeWord, i: usize) -> Self {
        let size = BlockModel::new(word, i).expect("block in range").size;
        Track {
            kind: word.block_kind(i),
            offset: word.m(i - 1),
            size,
            chords: word.block_chords(i).collect(),
            active: (1..=size).collect(),
            emitted: Vec::new(),
        }
    }

    fn vertex(&self, c: usize) -> usize {
        match self.kind {
            BlockKind::Whole | BlockKind::First => c - self.offset,
            _ => c - self.offset - 1,
        }
    }

    fn pinchable(&self) -> &[usize] {
        let n = self.chords.len();
        match self.kind {
            BlockKind::Whole => &self.chords,
            BlockKind::First if n > 1 => &self.chords,
            BlockKind::Middle if n > 2 => &self.chords[1..],
            BlockKind::Last if n > 1 => &self.chords[1..],
            _ => &[],
        }
    }

    fn position(&self, c: usize) -> Option<usize> {
        self.chords.iter().position(|&x| x == c)
    }

    /// The diagonal clipped off by pinching c, if the active polygon still has one to give.
    fn emission(&self, c: usize) -> Option<(usize, usize)> {
        let len = self.active.len();
        if len < 4 {
            return None;
        }
        let q = self.active.iter().position(|&x| x == self.vertex(c))?;
        let (a, b) = (self.active[(q + len - 1) % len], self.active[(q + 1) % len]);
        Some((a.min(b), a.max(b)))
    }

    fn triangulation(&self) -> Result<Triangulation, PolygonError> {
        Triangulation::new(self.size, self.emitted.iter().copied())
    }
}

/// Combinatorial side of a pinch: neighbors in the chord list and the emitted diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Step {
    block: usize,
    pos: usize,
    left: Option<usize>,
    right: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Schedule {
    tracks: Vec<Track>,
    pinched: Vec<usize>,
}

impl Schedule {
    fn new(word: &BridgeWord) -> Result<Self, FillingsError> {
        word.require_rational_form()?;
        Ok(Schedule { tracks: (1..=word.k()).map(|i| Track::new(word, i)).collect(), pinched: Vec::new() })
    }

    fn block_of(&self, c: usize) -> Option<usize> {
        self.tracks.iter().position(|t| t.position(c).is_some())
    }

    fn pinchable(&self) -> Vec<usize> {
        self.tracks.iter().flat_map(|t| t.pinchable().iter().copied()).collect()
    }

    fn can_pinch(&self, c: usize) -> bool {
        self.tracks.iter().any(|t| t.pinchable().contains(&c))
    }

    fn is_terminal(&self) -> bool {
        self.tracks.iter().all(|t| t.pinchable().is_empty())
    }

    fn pinch(&mut self, c: usize) -> Result<Step, FillingsError> {
        let step = self.pinched.len() + 1;
        if !self.can_pinch(c) {
            return Err(FillingsError::NotPinchable { step, chord: c });
        }
        let block = self.block_of(c).expect("pinchable chords are present");
        let t = &mut self.tracks[block];
        let pos = t.position(c).expect("present");
        let left = pos.checked_sub(1).map(|p| t.chords[p]);
        let right = t.chords.get(pos + 1).copied();
        if let Some(d) = t.emission(c) {
            t.emitted.push(d);
        }
        let v = t.vertex(c);
        t.active.retain(|&x| x != v);
        t.chords.remove(pos);
        self.pinched.push(c);
        Ok(Step { block, pos, left, right })
    }

    /// Two consecutive pinches commute when they sit in different blocks or are
    /// not neighbors in the chord list.
    fn commutes(&self, c: usize, d: usize) -> bool {
        match (self.block_of(c), self.block_of(d)) {
            (Some(x), Some(y)) if x == y => {
                let t = &self.tracks[x];
                let (p, q) = (t.position(c).unwrap(), t.position(d).unwrap());
                p.abs_diff(q) != 1
            }
            _ => true,
        }
    }

    fn triangulations(&self) -> Result<Vec<Triangulation>, FillingsError> {
        Ok(self.tracks.iter().map(|t| t.triangulation()).collect::<Result<_, _>>()?)
    }

    fn components(&self) -> usize {
        let ns: Vec<BigInt> = self.tracks.iter().map(|t| BigInt::from(t.chords.len())).collect();
        if continuant_with(&ns, &BigInt::one()).is_even() {
            2
        } else {
            1
        }
    }
}

/// An ordered list of crossings to pinch.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PinchSequence {
    pub word: BridgeWord,
    pub chords: Vec<usize>,
}

impl PinchSequence {
    /// Checks admissibility step by step; completeness is not required.
    pub fn new(word: &BridgeWord, chords: Vec<usize>) -> Result<Self, FillingsError> {
        let mut s = Schedule::new(word)?;
        for &c in &chords {
            s.pinch(c)?;
        }
        Ok(PinchSequence { word: word.clone(), chords })
    }

    /// Parses `1,3,6`.
    pub fn parse(word: &BridgeWord, text: &str) -> Result<Self, FillingsError> {
        let chords = text
            .split(',')
            .filter(|x| !x.trim().is_empty())
            .map(|x| x.trim().trim_start_matches('a').parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| BridgeError::Parse(text.to_string()))?;
        Self::new(word, chords)
    }

    /// Always the smallest pinchable crossing next.
    pub fn left_to_right(word: &BridgeWord) -> Result<Self, FillingsError> {
        let mut s = Schedule::new(word)?;
        while let Some(&c) = s.pinchable().iter().min() {
            s.pinch(c)?;
        }
        Ok(PinchSequence { word: word.clone(), chords: s.pinched })
    }

    pub fn len(&self) -> usize {
        self.chords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chords.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.chords.len() == pinch_count(&self.word)
    }

    fn schedule(&self) -> Result<Schedule, FillingsError> {
        let mut s = Schedule::new(&self.word)?;
        for &c in &self.chords {
            s.pinch(c)?;
        }
        Ok(s)
    }

    fn require_complete(&self) -> Result<(), FillingsError> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(FillingsError::Incomplete { got: self.len(), want: pinch_count(&self.word) })
        }
    }
}

impl fmt::Display for PinchSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.chords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Symbolic state after some pinches: images of every a_j in the surviving
/// generators and the units s_1..s_l.
#[derive(Debug, Clone)]
pub struct PinchState {
    word: BridgeWord,
    schedule: Schedule,
    ctx: PolyContext,
    gaps: Vec<Vec<LaurentPolynomial>>,
    images: Vec<LaurentPolynomial>,
}

impl PinchState {
    pub fn new(word: &BridgeWord) -> Result<Self, FillingsError> {
        let schedule = Schedule::new(word)?;
        let m = word.crossings();
        let vars = (1..=m)
            .map(|j| (format!("a{j}"), false))
            .chain((1..=pinch_count(word)).map(|t| (format!("s{t}"), true)));
        let ctx = PolyContext::new(vars, Coefficients::Integers)?;
        let gaps = schedule.tracks.iter().map(|t| vec![ctx.one(); t.chords.len().saturating_sub(1)]).collect();
        let images = (1..=m).map(|j| ctx.var(&format!("a{j}"))).collect();
        Ok(PinchState { word: word.clone(), schedule, ctx, gaps, images })
    }

    pub fn word(&self) -> &BridgeWord {
        &self.word
    }

    /// Variables a_1..a_{m_k}, then s_1..s_l.
    pub fn context(&self) -> &PolyContext {
        &self.ctx
    }

    pub fn pinched(&self) -> &[usize] {
        &self.schedule.pinched
    }

    /// The image of a_j.
    pub fn image(&self, j: usize) -> &LaurentPolynomial {
        &self.images[j - 1]
    }

    pub fn is_terminal(&self) -> bool {
        self.schedule.is_terminal()
    }

    /// Diagonals emitted so far in block i.
    pub fn emitted(&self, i: usize) -> &[(usize, usize)] {
        &self.schedule.tracks[i - 1].emitted
    }

    /// Survivors a_j ↦ 0 in every image; only meaningful once terminal.
    pub fn parametrization(&self) -> Result<Vec<LaurentPolynomial>, FillingsError> {
        let zero = self.ctx.zero();
        let subs: HashMap<usize, LaurentPolynomial> = self
            .schedule
            .tracks
            .iter()
            .flat_map(|t| t.chords.iter().map(|&c| (c - 1, zero.clone())))
            .collect();
        Ok(self.images.iter().map(|f| f.substitute(&subs)).collect::<Result<_, _>>()?)
    }
}

pub fn pinchable_chords(state: &PinchState) -> Vec<usize> {
    let mut v = state.schedule.pinchable();
    v.sort_unstable();
    v
}

/// Pinch c: a_c ↦ s, and the chord-list neighbors gain (u²s)⁻¹ and (v²s)⁻¹,
/// where u and v are the gap units on either side; the gaps merge to u·s·v.
pub fn apply_pinch(state: &PinchState, c: usize) -> Result<PinchState, FillingsError> {
    let mut next = state.clone();
    let Step { block, pos, left, right } = next.schedule.pinch(c)?;
    let t = next.schedule.pinched.len();
    let s = next.ctx.var(&format!("s{t}"));
    let gaps = &mut next.gaps[block];
    let one = next.ctx.one();
    let u = if left.is_some() { gaps[pos - 1].clone() } else { one.clone() };
    let v = if right.is_some() { gaps[pos].clone() } else { one.clone() };
    let mut subs = HashMap::new();
    subs.insert(c - 1, s.clone());
    for (nb, g) in [(left, &u), (right, &v)] {
        if let Some(nb) = nb {
            let corr = (&g.pow(2) * &s).unit_inverse().expect("gap units are monomials");
            subs.insert(nb - 1, &next.ctx.var(&format!("a{nb}")) + &corr);
        }
    }
    match (left, right) {
        (Some(_), Some(_)) => {
            gaps[pos - 1] = &(&u * &s) * &v;
            gaps.remove(pos);
        }
        (Some(_), None) => {
            gaps.remove(pos - 1);
        }
        (None, Some(_)) => {
            gaps.remove(pos);
        }
        (None, None) => {}
    }
    next.images = next.images.iter().map(|f| f.substitute(&subs)).collect::<Result<_, _>>()?;
    Ok(next)
}

/// Per-block triangulations read off a sequence.
pub fn sequence_to_triangulations(seq: &PinchSequence) -> Result<Vec<Triangulation>, FillingsError> {
    seq.require_complete()?;
    seq.schedule()?.triangulations()
}

/// Whether a pinch changes the number of components (and in which direction).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PinchKind {
    Merge,
    Split,
    NonOrientable,
}

impl fmt::Display for PinchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PinchKind::Merge => "merge",
            PinchKind::Split => "split",
            PinchKind::NonOrientable => "non-orientable",
        })
    }
}

/// Labels each pinch by the component counts of the link before and after it.
pub fn orientability_labels(seq: &PinchSequence) -> Result<Vec<PinchKind>, FillingsError> {
    let mut s = Schedule::new(&seq.word)?;
    let mut out = Vec::with_capacity(seq.len());
    for &c in &seq.chords {
        let before = s.components();
        s.pinch(c)?;
        out.push(match (before, s.components()) {
            (2, 1) => PinchKind::Merge,
            (1, 2) => PinchKind::Split,
            _ => PinchKind::NonOrientable,
        });
    }
    Ok(out)
}

/// Everything a complete sequence determines.
#[derive(Debug, Clone)]
pub struct Filling {
    pub sequence: PinchSequence,
    pub triangulations: Vec<Triangulation>,
    /// The seed of the triangulations, in the a-variables.
    pub seed: Seed,
    /// Context of the parametrization and chart: a_1..a_{m_k}, s_1..s_l.
    pub ctx: PolyContext,
    /// `parametrization[j−1]` is ε(a_j), a Laurent polynomial in the s_t.
    pub parametrization: Vec<LaurentPolynomial>,
    /// The seed's cluster variables under ε.
    pub chart: Vec<LaurentPolynomial>,
    /// Forced units, over F_2.
    pub t1: LaurentPolynomial,
    pub t2: LaurentPolynomial,
    pub labels: Vec<PinchKind>,
}

pub fn run_sequence(seq: &PinchSequence) -> Result<Filling, FillingsError> {
    seq.require_complete()?;
    let word = &seq.word;
    let mut state = PinchState::new(word)?;
    for &c in &seq.chords {
        state = apply_pinch(&state, c)?;
    }
    let triangulations = state.schedule.triangulations()?;
    let actx = a_context(word);
    let seeds = BlockModel::all(word)
        .iter()
        .zip(&triangulations)
        .map(|(b, t)| seed_from_triangulation(&actx, b, t))
        .collect::<Result<Vec<_>, _>>()?;
    let seed = direct_sum(&seeds);
    let eps = state.parametrization()?;
    let subs: HashMap<usize, LaurentPolynomial> = eps.iter().cloned().enumerate().collect();
    let table = state.ctx.var("a1").table().clone();
    let chart = seed
        .variables
        .iter()
        .map(|f| f.embed(&table).and_then(|g| g.substitute(&subs)))
        .collect::<Result<Vec<_>, _>>()?;
    let (t1, t2) = forced_t(word, &eps, &state.ctx)?;
    Ok(Filling {
        sequence: seq.clone(),
        triangulations,
        seed,
        ctx: state.ctx.clone(),
        parametrization: eps,
        chart,
        t1,
        t2,
        labels: orientability_labels(seq)?,
    })
}

fn forced_t(word: &BridgeWord, eps: &[LaurentPolynomial], ctx: &PolyContext) -> Result<(LaurentPolynomial, LaurentPolynomial), FillingsError> {
    let f2 = Coefficients::PrimeField(2);
    let a = eps.iter().map(|f| f.reduce(f2)).collect::<Result<Vec<_>, _>>()?;
    let one = ctx.one().reduce(f2)?;
    let zero = ctx.zero().reduce(f2)?;
    let bcs = all_blocks(word, &a, &one);
    let t1 = b1_core_from_blocks(&bcs);
    let t1_inv = t1.unit_inverse().ok_or_else(|| FillingsError::NotUnit(format!("t1 = {t1}")))?;
    let t2 = b2_core_from_blocks(&bcs, &zero, &t1_inv);
    if !t2.is_unit() {
        return Err(FillingsError::NotUnit(format!("t2 = {t2}")));
    }
    Ok((t1, t2))
}

impl Filling {
    /// Every seed variable is a Laurent monomial over F_2.
    pub fn is_torus_chart(&self) -> bool {
        self.chart.iter().all(|f| is_f2_monomial(f))
    }

    /// Every variety condition holds identically over F_2.
    pub fn satisfies_variety(&self) -> Result<bool, FillingsError> {
        let f2 = Coefficients::PrimeField(2);
        let one = self.ctx.one().reduce(f2)?;
        for c in conditions(&self.sequence.word)? {
            let xs = c
                .coords
                .iter()
                .map(|&j| self.parametrization[j - 1].reduce(f2))
                .collect::<Result<Vec<_>, _>>()?;
            let k = continuant_with(&xs, &one);
            if (c.vanishes && !k.is_zero()) || (!c.vanishes && !k.is_unit()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> Value {
        let names: Vec<String> = self.ctx.var("a1").table().names().to_vec();
        let eps: BTreeMap<String, String> = self
            .parametrization
            .iter()
            .enumerate()
            .map(|(j, f)| (names[j].clone(), f.to_string()))
            .collect();
        json!({
            "word": self.sequence.word.to_string(),
            "sequence": self.sequence.chords,
            "triangulations": self.triangulations.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "seed": self.seed.to_json(),
            "parametrization": eps,
            "chart": self.chart.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "t1": self.t1.to_string(),
            "t2": self.t2.to_string(),
            "orientability": self.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        })
    }
}

fn is_f2_monomial(f: &LaurentPolynomial) -> bool {
    f.reduce(Coefficients::PrimeField(2)).map(|g| g.is_unit()).unwrap_or(false)
}

fn conditions(word: &BridgeWord) -> Result<Vec<BlockCondition>, FillingsError> {
    Ok(augvar::presentation(word, Style::Inequality)?.conditions)
}

/// The lexicographically least sequence realizing the given per-block triangulations.
pub fn sequence_from_triangulations(word: &BridgeWord, tris: &[Triangulation]) -> Result<PinchSequence, FillingsError> {
    let mut s = Schedule::new(word)?;
    if tris.len() != s.tracks.len() || s.tracks.iter().zip(tris).any(|(t, tr)| t.size != tr.n()) {
        return Err(FillingsError::BadTuple);
    }
    while !s.is_terminal() {
        let mut cands = s.pinchable();
        cands.sort_unstable();
        let c = cands
            .into_iter()
            .find(|&c| {
                let b = s.block_of(c).unwrap();
                s.tracks[b].emission(c).map_or(true, |d| tris[b].contains(d))
            })
            .ok_or(FillingsError::BadTuple)?;
        s.pinch(c)?;
    }
    Ok(PinchSequence { word: word.clone(), chords: s.pinched })
}

/// Normal form of a complete sequence's commutation class.
pub fn canonical_form(seq: &PinchSequence) -> Result<PinchSequence, FillingsError> {
    sequence_from_triangulations(&seq.word, &sequence_to_triangulations(seq)?)
}

pub fn commutation_equivalent(s1: &PinchSequence, s2: &PinchSequence) -> Result<bool, FillingsError> {
    Ok(s1.word == s2.word && canonical_form(s1)? == canonical_form(s2)?)
}

/// Visits every complete admissible sequence, in lexicographic order.
pub fn for_each_sequence(word: &BridgeWord, mut visit: impl FnMut(&[usize])) -> Result<(), FillingsError> {
    walk(&Schedule::new(word)?, None, &mut visit);
    Ok(())
}

/// The crossings pinched by the left-to-right sequence: polygon vertices 1..N−2 of every block.
pub fn standard_chords(word: &BridgeWord) -> Result<Vec<usize>, FillingsError> {
    let mut v = PinchSequence::left_to_right(word)?.chords;
    v.sort_unstable();
    Ok(v)
}

/// Visits the complete admissible sequences that pinch exactly `standard_chords`.
pub fn for_each_standard_sequence(word: &BridgeWord, mut visit: impl FnMut(&[usize])) -> Result<(), FillingsError> {
    let allowed = standard_chords(word)?;
    walk(&Schedule::new(word)?, Some(&allowed), &mut visit);
    Ok(())
}

fn walk(s: &Schedule, allowed: Option<&[usize]>, visit: &mut dyn FnMut(&[usize])) {
    let mut cands = s.pinchable();
    if cands.is_empty() {
        visit(&s.pinched);
        return;
    }
    cands.sort_unstable();
    for c in cands {
        if allowed.is_some_and(|a| !a.contains(&c)) {
            continue;
        }
        let mut t = s.clone();
        t.pinch(c).expect("pinchable");
        walk(&t, allowed, visit);
    }
}

/// Number of complete admissible sequences: interleavings of independent per-block schedules.
pub fn sequence_count(word: &BridgeWord) -> Result<BigInt, FillingsError> {
    fn go(s: &Schedule, count: &mut u64) {
        let cands = s.pinchable();
        if cands.is_empty() {
            *count += 1;
        }
        for c in cands {
            let mut t = s.clone();
            t.pinch(c).expect("pinchable");
            go(&t, count);
        }
    }
    let full = Schedule::new(word)?;
    let mut total = BigInt::one();
    let mut placed = 0usize;
    for track in &full.tracks {
        let solo = Schedule { tracks: vec![track.clone()], pinched: Vec::new() };
        let mut count = 0u64;
        go(&solo, &mut count);
        let len = track.pinchable_total();
        total *= binomial(placed + len, len) * BigInt::from(count);
        placed += len;
    }
    Ok(total)
}

impl Track {
    fn pinchable_total(&self) -> usize {
        let n = self.chords.len();
        match self.kind {
            BlockKind::Whole => n,
            BlockKind::First | BlockKind::Last => n.saturating_sub(1),
            BlockKind::Middle => n.saturating_sub(2),
        }
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// One representative sequence per triangulation tuple.
#[derive(Debug, Clone)]
pub struct FillingClasses {
    pub count: BigInt,
    pub representatives: Vec<PinchSequence>,
}

pub fn enumerate_filling_classes(word: &BridgeWord) -> Result<FillingClasses, FillingsError> {
    word.require_rational_form()?;
    let count = filling_count(word);
    let budget = crate::budget();
    if count > BigInt::from(budget) {
        return Err(FillingsError::BudgetExceeded(u128::try_from(&count).unwrap_or(u128::MAX), budget));
    }
    let per_block: Vec<Vec<Triangulation>> = BlockModel::all(word).iter().map(|b| Triangulation::all(b.size)).collect();
    let mut reps = Vec::new();
    let mut idx = vec![0usize; per_block.len()];
    loop {
        let tuple: Vec<Triangulation> = idx.iter().zip(&per_block).map(|(&x, ts)| ts[x].clone()).collect();
        reps.push(sequence_from_triangulations(word, &tuple)?);
        let mut b = per_block.len();
        loop {
            if b == 0 {
                return Ok(FillingClasses { count, representatives: reps });
            }
            b -= 1;
            idx[b] += 1;
            if idx[b] < per_block[b].len() {
                break;
            }
            idx[b] = 0;
        }
    }
}

/// Swap classes of the sequences pinching `standard_chords`, against triangulation tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationCensus {
    pub sequences: usize,
    /// Classes under adjacent swaps of commuting pinches.
    pub classes: usize,
    /// Distinct triangulation tuples reached.
    pub tuples: usize,
    /// Every class reaches one tuple and distinct classes reach distinct tuples.
    pub bijective: bool,
    /// Product of per-block triangulation counts.
    pub expected: BigInt,
}

pub fn commutation_census(word: &BridgeWord) -> Result<CommutationCensus, FillingsError> {
    let total = sequence_count(word)?;
    let budget = crate::budget();
    if total > BigInt::from(budget) {
        return Err(FillingsError::BudgetExceeded(u128::try_from(&total).unwrap_or(u128::MAX), budget));
    }
    let mut seqs: Vec<Vec<u16>> = Vec::new();
    let mut keys: Vec<Vec<Triangulation>> = Vec::new();
    for_each_standard_sequence(word, |s| seqs.push(s.iter().map(|&c| c as u16).collect()))?;
    let index: HashMap<&[u16], usize> = seqs.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let mut uf: Vec<usize> = (0..seqs.len()).collect();
    fn find(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    for (i, seq) in seqs.iter().enumerate() {
        let mut s = Schedule::new(word)?;
        for t in 0..seq.len() {
            let (c, d) = (seq[t] as usize, seq[t + 1..].first().map(|&d| d as usize));
            if let Some(d) = d {
                if s.commutes(c, d) {
                    let mut sw = seq.clone();
                    sw.swap(t, t + 1);
                    if let Some(&j) = index.get(sw.as_slice()) {
                        let (a, b) = (find(&mut uf, i), find(&mut uf, j));
                        uf[a] = b;
                    }
                }
            }
            s.pinch(c)?;
        }
        keys.push(s.triangulations()?);
    }
    let mut class_tuple: HashMap<usize, &Vec<Triangulation>> = HashMap::new();
    let mut tuple_class: HashMap<&Vec<Triangulation>, usize> = HashMap::new();
    let mut bijective = true;
    for (i, key) in keys.iter().enumerate() {
        let r = find(&mut uf, i);
        if *class_tuple.entry(r).or_insert(key) != key || *tuple_class.entry(key).or_insert(r) != r {
            bijective = false;
        }
    }
    Ok(CommutationCensus {
        sequences: seqs.len(),
        classes: class_tuple.len(),
        tuples: tuple_class.len(),
        bijective,
        expected: filling_count(word),
    })
}

const MAXL: usize = 16;
type Exp = [i16; MAXL];

/// Laurent polynomials over F_2 in at most `MAXL` units, as sorted exponent lists.
#[derive(Debug, Clone, PartialEq, Eq)]
struct F2(Vec<Exp>);

impl F2 {
    fn mono(e: Exp) -> Self {
        F2(vec![e])
    }

    fn xor_in(&mut self, e: Exp) {
        match self.0.binary_search(&e) {
            Ok(i) => {
                self.0.remove(i);
            }
            Err(i) => self.0.insert(i, e),
        }
    }
}

impl Alg for F2 {
    fn add(&self, o: &Self) -> Self {
        let (mut out, mut i, mut j) = (Vec::with_capacity(self.0.len() + o.0.len()), 0, 0);
        while i < self.0.len() && j < o.0.len() {
            match self.0[i].cmp(&o.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(o.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        F2(out)
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(o)
    }

    fn mul(&self, o: &Self) -> Self {
        let mut prods = Vec::with_capacity(self.0.len() * o.0.len());
        for x in &self.0 {
            for y in &o.0 {
                let mut e = *x;
                for (a, b) in e.iter_mut().zip(y) {
                    *a += b;
                }
                prods.push(e);
            }
        }
        prods.sort_unstable();
        let mut out: Vec<Exp> = Vec::with_capacity(prods.len());
        for e in prods {
            if out.last() == Some(&e) {
                out.pop();
            } else {
                out.push(e);
            }
        }
        F2(out)
    }
}

/// Result of checking the torus-chart property over every complete sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartCensus {
    pub sequences: u64,
    /// Sequences violating an equation or sending a seed variable to a non-monomial (at most ten kept).
    pub failures: Vec<Vec<usize>>,
    pub failure_count: u64,
}

struct Fast {
    models: Vec<BlockModel>,
    conds: Vec<BlockCondition>,
    census: ChartCensus,
}

#[derive(Clone)]
struct FastState {
    sched: Schedule,
    gaps: Vec<Vec<Exp>>,
    vals: Vec<F2>,
}

impl FastState {
    fn new(word: &BridgeWord) -> Result<Self, FillingsError> {
        let sched = Schedule::new(word)?;
        let gaps = sched.tracks.iter().map(|t| vec![[0i16; MAXL]; t.chords.len().saturating_sub(1)]).collect();
        Ok(FastState { sched, gaps, vals: vec![F2(Vec::new()); word.crossings()] })
    }

    /// Same rule as `apply_pinch`, tracking only the additive corrections.
    fn pinch(&mut self, c: usize) -> Result<(), FillingsError> {
        let Step { block, pos, left, right } = self.sched.pinch(c)?;
        let mut s = [0i16; MAXL];
        s[self.sched.pinched.len() - 1] = 1;
        self.vals[c - 1].xor_in(s);
        let gaps = &mut self.gaps[block];
        let zero = [0i16; MAXL];
        let u = if left.is_some() { gaps[pos - 1] } else { zero };
        let v = if right.is_some() { gaps[pos] } else { zero };
        for (nb, g) in [(left, u), (right, v)] {
            if let Some(nb) = nb {
                let mut corr = [0i16; MAXL];
                for x in 0..MAXL {
                    corr[x] = -2 * g[x] - s[x];
                }
                self.vals[nb - 1].xor_in(corr);
            }
        }
        match (left, right) {
            (Some(_), Some(_)) => {
                for x in 0..MAXL {
                    gaps[pos - 1][x] = u[x] + s[x] + v[x];
                }
                gaps.remove(pos);
            }
            (Some(_), None) => {
                gaps.remove(pos - 1);
            }
            (None, Some(_)) => {
                gaps.remove(pos);
            }
            (None, None) => {}
        }
        Ok(())
    }
}

impl Fast {
    fn go(&mut self, st: &FastState) {
        let mut cands = st.sched.pinchable();
        if cands.is_empty() {
            self.leaf(st);
            return;
        }
        cands.sort_unstable();
        for c in cands {
            let mut nx = st.clone();
            nx.pinch(c).expect("pinchable");
            self.go(&nx);
        }
    }

    fn leaf(&mut self, st: &FastState) {
        self.census.sequences += 1;
        if !self.check(st) {
            self.census.failure_count += 1;
            if self.census.failures.len() < 10 {
                self.census.failures.push(st.sched.pinched.clone());
            }
        }
    }

    fn check(&self, st: &FastState) -> bool {
        let one = F2::mono([0; MAXL]);
        let unit = |f: &F2| f.0.len() == 1;
        for c in &self.conds {
            let xs: Vec<F2> = c.coords.iter().map(|&j| st.vals[j - 1].clone()).collect();
            let k = continuant_with(&xs, &one);
            if (c.vanishes && !k.0.is_empty()) || (!c.vanishes && !unit(&k)) {
                return false;
            }
        }
        for (b, t) in self.models.iter().zip(&st.sched.tracks) {
            let Some(frozen) = b.frozen_side() else { continue };
            for &d in t.emitted.iter().chain(std::iter::once(&frozen)) {
                let x = diagonal_to_continuant_with(b, d, &|a| st.vals[a - 1].clone(), &one).expect("valid diagonal");
                if !unit(&x) {
                    return false;
                }
            }
        }
        true
    }
}

/// Checks, for every complete admissible sequence, that ε satisfies the
/// variety conditions identically over F_2 and sends the seed read off the
/// sequence to Laurent monomials.
pub fn torus_chart_census(word: &BridgeWord) -> Result<ChartCensus, FillingsError> {
    let l = pinch_count(word);
    if l > MAXL {
        return Err(FillingsError::TooLong(l));
    }
    let st = FastState::new(word)?;
    let mut fast = Fast {
        models: BlockModel::all(word),
        conds: conditions(word)?,
        census: ChartCensus { sequences: 0, failures: Vec::new(), failure_count: 0 },
    };
    fast.go(&st);
    Ok(fast.census)
}

/// The census's additive ε for one sequence, over F_2, in the variables of `PinchState`.
pub fn fast_parametrization(seq: &PinchSequence) -> Result<Vec<LaurentPolynomial>, FillingsError> {
    seq.require_complete()?;
    let l = seq.len();
    if l > MAXL {
        return Err(FillingsError::TooLong(l));
    }
    let mut st = FastState::new(&seq.word)?;
    for &c in &seq.chords {
        st.pinch(c)?;
    }
    let table = PinchState::new(&seq.word)?.ctx.one().table().clone();
    let m = seq.word.crossings();
    st.vals
        .iter()
        .map(|f| {
            let terms = f
                .0
                .iter()
                .map(|e| {
                    let mut ex = vec![0i32; m + l];
                    for t in 0..l {
                        ex[m + t] = e[t] as i32;
                    }
                    (ex, BigInt::one())
                })
                .collect();
            Ok(LaurentPolynomial::from_term_list(&table, Coefficients::PrimeField(2), terms)?)
        })
        .collect()
}


#[cfg(test)]
mod tests {
    use super::*;

    fn w(b: &[usize]) -> BridgeWord {
        BridgeWord::of(b)
    }

    fn seq(word: &BridgeWord, c: &[usize]) -> PinchSequence {
        PinchSequence::new(word, c.to_vec()).unwrap()
    }

    fn sum(ctx: &PolyContext, parts: &[&str]) -> LaurentPolynomial {
        parts.iter().fold(ctx.zero(), |acc, p| &acc + &ctx.mono(p))
    }

    #[test]
    fn two_pinch_images() {
        let mut st = PinchState::new(&w(&[4, 4])).unwrap();
        for c in [2, 3] {
            st = apply_pinch(&st, c).unwrap();
        }
        let ctx = st.context().clone();
        assert_eq!(*st.image(1), sum(&ctx, &["a1", "s1^-1", "s1^-2*s2^-1"]));
        assert_eq!(*st.image(2), ctx.mono("s1"));
        assert_eq!(*st.image(3), sum(&ctx, &["s2", "s1^-1"]));
        assert_eq!(*st.image(4), sum(&ctx, &["a4", "s2^-1"]));
        assert_eq!(*st.image(5), ctx.var("a5"));
    }

    #[test]
    fn single_pinches() {
        let st = PinchState::new(&w(&[3, 3])).unwrap();
        let mid = apply_pinch(&st, 2).unwrap();
        let ctx = mid.context().clone();
        assert_eq!(*mid.image(1), sum(&ctx, &["a1", "s1^-1"]));
        assert_eq!(*mid.image(3), sum(&ctx, &["a3", "s1^-1"]));
        let edge = apply_pinch(&st, 1).unwrap();
        assert_eq!(*edge.image(2), sum(&ctx, &["a2", "s1^-1"]));
        assert_eq!(*edge.image(3), ctx.var("a3"));
        // a3 ends block 1, so a4 is untouched; a5's neighbors are the free a4 and a6.
        let last = apply_pinch(&apply_pinch(&st, 3).unwrap(), 5).unwrap();
        assert_eq!(*last.image(4), sum(&ctx, &["a4", "s2^-1"]));
        assert_eq!(*last.image(6), sum(&ctx, &["a6", "s2^-1"]));
    }

    #[test]
    fn pinchable_sets() {
        let st = PinchState::new(&w(&[3, 3])).unwrap();
        assert_eq!(pinchable_chords(&st), vec![1, 2, 3, 5, 6]);
        assert_eq!(pinchable_chords(&PinchState::new(&w(&[2, 2])).unwrap()), vec![1, 2, 4]);
        let mut st = PinchState::new(&w(&[2, 3, 2])).unwrap();
        for c in [1, 5, 7] {
            st = apply_pinch(&st, c).unwrap();
        }
        assert!(st.is_terminal());
        assert!(pinchable_chords(&st).is_empty());
        assert_eq!(apply_pinch(&PinchState::new(&w(&[3, 3])).unwrap(), 4).unwrap_err(), FillingsError::NotPinchable { step: 1, chord: 4 });
    }

    #[test]
    fn twist_knot_sequence() {
        let word = w(&[2, 2]);
        let f = run_sequence(&seq(&word, &[1, 4])).unwrap();
        let ctx = &f.ctx;
        let e = &f.parametrization;
        assert_eq!(&e[0] * &e[1], ctx.one());
        assert!(e[3].is_unit());
        assert!(f.t1.is_monomial() && f.t2.is_monomial());
        assert!(f.satisfies_variety().unwrap());
    }

    #[test]
    fn trefoil_left_to_right() {
        let word = w(&[3]);
        let s = PinchSequence::left_to_right(&word).unwrap();
        assert_eq!(s.chords, vec![1, 2, 3]);
        let f = run_sequence(&s).unwrap();
        assert!(f.is_torus_chart());
        // Vertices 2, 3 are mutable (K_1, K_2); the frozen side carries K_3.
        let text: Vec<String> = f.chart.iter().map(|x| x.to_string()).collect();
        assert_eq!(text, ["s1", "s1*s2", "s1*s2*s3"]);
        assert_eq!(f.t1, f.t2);
        assert_eq!(f.triangulations, vec![Triangulation::fan(5, 5)]);
    }

    #[test]
    fn left_to_right_is_the_fan() {
        for b in [vec![5, 4], vec![3, 3, 3], vec![2, 4, 3], vec![6]] {
            let word = w(&b);
            let tris = sequence_to_triangulations(&PinchSequence::left_to_right(&word).unwrap()).unwrap();
            for (t, m) in tris.iter().zip(BlockModel::all(&word)) {
                assert_eq!(*t, Triangulation::fan(m.size, m.size));
            }
        }
    }

    #[test]
    fn heptagon_sequences() {
        // First block of [6,2] is the 7-gon with frozen side (6,7); a8 finishes the last block.
        let word = w(&[6, 2]);
        let want = Triangulation::new(7, [(1, 3), (3, 5), (1, 5), (5, 7)]).unwrap();
        let a = seq(&word, &[2, 4, 3, 1, 5, 8]);
        let b = seq(&word, &[4, 2, 3, 1, 5, 8]);
        let c = seq(&word, &[2, 4, 6, 3, 1, 8]);
        for s in [&a, &b, &c] {
            assert_eq!(sequence_to_triangulations(s).unwrap()[0], want);
        }
        assert!(commutation_equivalent(&a, &b).unwrap());
        assert!(commutation_equivalent(&a, &c).unwrap());
        let d = seq(&word, &[8, 2, 4, 3, 1, 5]);
        assert!(commutation_equivalent(&a, &d).unwrap());
        let (x, y) = (seq(&word, &[1, 2, 3, 4, 5, 8]), seq(&word, &[2, 1, 3, 4, 5, 8]));
        assert!(!commutation_equivalent(&x, &y).unwrap());
        let (tx, ty) = (&sequence_to_triangulations(&x).unwrap()[0], &sequence_to_triangulations(&y).unwrap()[0]);
        assert_eq!(tx.diagonals().iter().filter(|d| !ty.contains(**d)).count(), 1);
    }

    #[test]
    fn class_counts() {
        assert_eq!(enumerate_filling_classes(&w(&[3, 3])).unwrap().count, BigInt::from(4));
        let c = enumerate_filling_classes(&w(&[5, 4])).unwrap();
        assert_eq!(c.count, BigInt::from(70));
        assert_eq!(c.representatives.len(), 70);
        let mut tuples: Vec<_> = c.representatives.iter().map(|s| sequence_to_triangulations(s).unwrap()).collect();
        tuples.sort();
        tuples.dedup();
        assert_eq!(tuples.len(), 70);
        // k = 1: the (n+2)-gon has C_n triangulations.
        assert_eq!(enumerate_filling_classes(&w(&[3])).unwrap().count, BigInt::from(5));
        assert_eq!(filling_count(&w(&[4, 3, 5])), catalan(3) * catalan(1) * catalan(4));
    }

    #[test]
    fn catalan_numbers() {
        let c: Vec<BigInt> = (0..8).map(catalan).collect();
        assert_eq!(c, [1, 1, 2, 5, 14, 42, 132, 429].map(BigInt::from));
    }

    #[test]
    fn sequence_counts_match_enumeration() {
        for b in [vec![3], vec![2, 2], vec![3, 3], vec![2, 3, 2], vec![4, 2, 3]] {
            let word = w(&b);
            let mut n = 0u64;
            for_each_sequence(&word, |_| n += 1).unwrap();
            assert_eq!(sequence_count(&word).unwrap(), BigInt::from(n), "{word}");
        }
    }

    #[test]
    fn swap_classes_are_triangulation_tuples() {
        for word in BridgeWord::all_rational_forms(6) {
            let c = commutation_census(&word).unwrap();
            assert!(c.bijective, "{word}");
            assert_eq!(BigInt::from(c.classes), c.expected, "{word}");
            assert_eq!(c.tuples, c.classes, "{word}");
        }
    }

    #[test]
    fn canonical_forms() {
        let word = w(&[4, 3]);
        for_each_sequence(&word, |s| {
            let s = seq(&word, s);
            let c = canonical_form(&s).unwrap();
            assert!(c <= s);
            assert_eq!(canonical_form(&c).unwrap(), c);
            assert_eq!(sequence_to_triangulations(&c).unwrap(), sequence_to_triangulations(&s).unwrap());
        })
        .unwrap();
    }

    #[test]
    fn fast_path_matches_substitution() {
        let f2 = Coefficients::PrimeField(2);
        for b in [vec![4], vec![3, 3], vec![2, 3, 3], vec![4, 2]] {
            let word = w(&b);
            for_each_sequence(&word, |s| {
                let s = seq(&word, s);
                let mut st = PinchState::new(&word).unwrap();
                for &c in &s.chords {
                    st = apply_pinch(&st, c).unwrap();
                }
                let slow: Vec<_> = st.parametrization().unwrap().iter().map(|f| f.reduce(f2).unwrap()).collect();
                assert_eq!(fast_parametrization(&s).unwrap(), slow, "{word} {s}");
            })
            .unwrap();
        }
    }

    #[test]
    fn chart_census_small_words() {
        for word in BridgeWord::all_rational_forms(6) {
            let c = torus_chart_census(&word).unwrap();
            assert_eq!(c.failure_count, 0, "{word}: {:?}", c.failures);
            assert_eq!(BigInt::from(c.sequences), sequence_count(&word).unwrap());
        }
    }

    #[test]
    fn every_sequence_gives_units() {
        for b in [vec![3, 3], vec![2, 4], vec![3, 2, 2]] {
            let word = w(&b);
            for_each_sequence(&word, |s| {
                let f = run_sequence(&seq(&word, s)).unwrap();
                assert!(f.t1.is_monomial() && f.t2.is_monomial());
                assert!(f.is_torus_chart() && f.satisfies_variety().unwrap());
                assert_eq!(f.ctx.one().table().len(), word.crossings() + pinch_count(&word));
            })
            .unwrap();
        }
    }

    #[test]
    fn figure_relations() {
        let word = w(&[3, 3, 3, 3, 2]);
        assert_eq!(
            PinchSequence::new(&word, vec![1, 3, 6, 8, 10, 12]).unwrap_err(),
            FillingsError::NotPinchable { step: 5, chord: 10 }
        );
        let t1 = "s1*s2^-1*s3*s4^-1*s5*s6";
        let t2 = "s1*s2^-1*s3^-1*s4^-1*s5^-1*s6";
        let f = run_sequence(&seq(&word, &[1, 3, 11, 9, 5, 14])).unwrap();
        assert_eq!((f.t1.to_string().as_str(), f.t2.to_string().as_str()), (t1, t2));
        let g = run_sequence(&seq(&word, &[1, 3, 6, 9, 12, 14])).unwrap();
        assert_eq!((g.t1.to_string().as_str(), g.t2.to_string().as_str()), (t2, t1));
    }

    #[test]
    fn orientability() {
        let labels = orientability_labels(&seq(&w(&[3]), &[1, 2, 3])).unwrap();
        assert_eq!(labels, [PinchKind::Split, PinchKind::Merge, PinchKind::Split]);
        // Pinching a6 first leaves the knot [4,1]; afterwards every pinch changes the component count.
        let a = orientability_labels(&seq(&w(&[4, 2]), &[6, 1, 2, 3])).unwrap();
        let b = orientability_labels(&seq(&w(&[4, 2]), &[1, 2, 3, 6])).unwrap();
        use PinchKind::*;
        assert_eq!(a, [NonOrientable, Split, Merge, Split]);
        assert_eq!(b, [NonOrientable, NonOrientable, NonOrientable, Split]);
        assert!(commutation_equivalent(&seq(&w(&[4, 2]), &[6, 1, 2, 3]), &seq(&w(&[4, 2]), &[1, 2, 3, 6])).unwrap());
    }

    #[test]
    fn json_report() {
        let f = run_sequence(&seq(&w(&[2, 2]), &[1, 4])).unwrap();
        let v = f.to_json();
        assert_eq!(v["sequence"], json!([1, 4]));
        assert_eq!(v["parametrization"]["a2"], json!("s1^-1"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn word_and_choices() -> impl Strategy<Value = (BridgeWord, Vec<usize>)> {
            (1usize..=3)
                .prop_flat_map(|k| proptest::collection::vec(1usize..=4, k))
                .prop_map(|mut b| {
                    let k = b.len();
                    for x in b.iter_mut().take(k - 1).skip(1) {
                        *x = (*x).max(2);
                    }
                    BridgeWord::of(&b)
                })
                .prop_flat_map(|word| (Just(word), proptest::collection::vec(0usize..100, 12)))
        }

        fn random_sequence(word: &BridgeWord, picks: &[usize]) -> PinchSequence {
            let mut st = Schedule::new(word).unwrap();
            let mut i = 0;
            loop {
                let mut c = st.pinchable();
                if c.is_empty() {
                    break;
                }
                c.sort_unstable();
                st.pinch(c[picks[i % picks.len()] % c.len()]).unwrap();
                i += 1;
            }
            PinchSequence { word: word.clone(), chords: st.pinched }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            #[test]
            fn random_sequences_land_in_charts((word, picks) in word_and_choices()) {
                let s = random_sequence(&word, &picks);
                prop_assert!(s.is_complete());
                let f = run_sequence(&s).unwrap();
                prop_assert!(f.is_torus_chart());
                prop_assert!(f.satisfies_variety().unwrap());
                prop_assert!(f.t1.is_monomial() && f.t2.is_monomial());
                let c = canonical_form(&s).unwrap();
                prop_assert!(commutation_equivalent(&s, &c).unwrap());
            }
        }
    }
}
