//! 2-bridge words [n1,…,nk], their fractions, the three isotopy moves, and the classification test.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::continuant::continuant_with;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error("cannot parse bridge word `{0}`")]
    Parse(String),
    #[error("bridge word entries must be positive")]
    NonPositive,
    #[error("`{0}` is not in Legendrian rational form")]
    NotRationalForm(String),
    #[error("fraction needs p >= 2, got {0}")]
    SmallNumerator(BigInt),
    #[error("inverse move does not apply to `{0}`")]
    MoveShape(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BridgeWord {
    blocks: Vec<usize>,
}

impl BridgeWord {
    pub fn new(blocks: Vec<usize>) -> Result<Self, BridgeError> {
        if blocks.is_empty() || blocks.iter().any(|&n| n == 0) {
            return Err(BridgeError::NonPositive);
        }
        Ok(BridgeWord { blocks })
    }

    /// Shorthand for tests and examples; panics on invalid input.
    pub fn of(blocks: &[usize]) -> Self {
        Self::new(blocks.to_vec()).expect("valid bridge word")
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    /// n_i, 1-based.
    pub fn n(&self, i: usize) -> usize {
        self.blocks[i - 1]
    }

    /// Partial sum m_i = n_1 + … + n_i, with m_0 = 0.
    pub fn m(&self, i: usize) -> usize {
        self.blocks[..i].iter().sum()
    }

    /// Total crossing count m_k.
    pub fn crossings(&self) -> usize {
        self.m(self.k())
    }

    pub fn is_rational_form(&self) -> bool {
        let k = self.k();
        k < 3 || self.blocks[1..k - 1].iter().all(|&n| n >= 2)
    }

    pub fn require_rational_form(&self) -> Result<(), BridgeError> {
        if self.is_rational_form() {
            Ok(())
        } else {
            Err(BridgeError::NotRationalForm(self.to_string()))
        }
    }

    pub fn reversed(&self) -> Self {
        let mut b = self.blocks.clone();
        b.reverse();
        BridgeWord { blocks: b }
    }

    /// Every rational-form word with total crossing count between 1 and `max_crossings`.
    pub fn all_rational_forms(max_crossings: usize) -> Vec<BridgeWord> {
        fn rec(cur: &mut Vec<usize>, left: usize, out: &mut Vec<BridgeWord>) {
            if !cur.is_empty() {
                let w = BridgeWord { blocks: cur.clone() };
                if w.is_rational_form() {
                    out.push(w);
                }
            }
            for n in 1..=left {
                cur.push(n);
                rec(cur, left - n, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), max_crossings, &mut out);
        out.sort_by_key(|w| (w.crossings(), w.blocks.clone()));
        out
    }
}

/// Position of a block inside the word; k = 1 words have a single `Whole` block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Whole,
    First,
    Middle,
    Last,
}

impl BridgeWord {
    pub fn block_kind(&self, i: usize) -> BlockKind {
        let k = self.k();
        match i {
            _ if k == 1 => BlockKind::Whole,
            1 => BlockKind::First,
            _ if i == k => BlockKind::Last,
            _ => BlockKind::Middle,
        }
    }

    /// All crossings a_j (1-based) lying in block i.
    pub fn block_chords(&self, i: usize) -> std::ops::RangeInclusive<usize> {
        self.m(i - 1) + 1..=self.m(i)
    }

    /// Coordinates of block i kept by the homotopy quotient: everything in the
    /// first block, and all but the leading crossing a_{m_{i−1}+1} elsewhere.
    pub fn block_coords(&self, i: usize) -> std::ops::RangeInclusive<usize> {
        match self.block_kind(i) {
            BlockKind::Whole | BlockKind::First => 1..=self.m(1),
            _ => self.m(i - 1) + 2..=self.m(i),
        }
    }

    /// The crossings a_{m_i+1}, 1 ≤ i < k, whose values the homotopy quotient forgets.
    pub fn free_chords(&self) -> Vec<usize> {
        (1..self.k()).map(|i| self.m(i) + 1).collect()
    }
}

impl fmt::Display for BridgeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|n| n.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl FromStr for BridgeWord {
    type Err = BridgeError;

    /// Accepts `5,4` or `[5,4]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let t = t.strip_prefix('[').unwrap_or(t);
        let t = t.strip_suffix(']').unwrap_or(t);
        let blocks: Result<Vec<usize>, _> = t.split(',').map(|x| x.trim().parse::<usize>()).collect();
        let blocks = blocks.map_err(|_| BridgeError::Parse(s.to_string()))?;
        BridgeWord::new(blocks)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fraction {
    pub p: BigInt,
    pub q: BigInt,
    pub reduced: bool,
}

impl Fraction {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        let (p, q) = (p.into(), q.into());
        let reduced = p.gcd(&q).is_one();
        Fraction { p, q, reduced }
    }

    /// q taken in [0, p).
    pub fn normalized_q(&self) -> BigInt {
        if self.p.is_zero() {
            return self.q.clone();
        }
        self.q.mod_floor(&self.p)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Fraction {
    type Err = BridgeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once('/').unwrap_or((s, "1"));
        let p: BigInt = a.trim().parse().map_err(|_| BridgeError::Parse(s.into()))?;
        let q: BigInt = b.trim().parse().map_err(|_| BridgeError::Parse(s.into()))?;
        Ok(Fraction::new(p, q))
    }
}

/// p/q = K_k(n_1..n_k) / K_{k−1}(n_2..n_k), with the sign chosen so that p ≥ 0.
pub fn fraction_value(word: &BridgeWord) -> Fraction {
    let ns: Vec<BigInt> = word.blocks.iter().map(|&n| BigInt::from(n)).collect();
    let one = BigInt::one();
    let mut p = continuant_with(&ns, &one);
    let mut q = continuant_with(&ns[1..], &one);
    if p.is_negative() || (p.is_zero() && q.is_negative()) {
        p = -p;
        q = -q;
    }
    Fraction::new(p, q)
}

/// Alternating Euclidean division: n_1 = ⌈p/q⌉, then continue with q / (n_1·q − p).
pub fn word_from_fraction(f: &Fraction) -> Result<BridgeWord, BridgeError> {
    if f.p < BigInt::from(2) {
        return Err(BridgeError::SmallNumerator(f.p.clone()));
    }
    let g = f.p.gcd(&f.q);
    let mut p = &f.p / &g;
    let mut q = f.q.mod_floor(&f.p) / &g;
    if q.is_zero() {
        // Only possible when p/q was not reduced to a fraction with p >= 2.
        return Err(BridgeError::SmallNumerator(p));
    }
    let mut blocks = Vec::new();
    loop {
        let n = (&p + &q - BigInt::one()) / &q;
        let r = &n * &q - &p;
        blocks.push(usize::try_from(n).expect("block size fits in usize"));
        if r.is_zero() {
            break;
        }
        p = q;
        q = r;
    }
    BridgeWord::new(blocks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// […, n_k] ~ […, n_k + 1, 1]
    ExtendOne,
    /// [n_1, …] ~ [1, n_1 + 1, …]
    PrependOne,
    /// [n_1, …, n_k] ~ [n_k, …, n_1]
    Reverse,
}

impl Move {
    pub const ALL: [Move; 3] = [Move::ExtendOne, Move::PrependOne, Move::Reverse];
}

pub fn apply_move(word: &BridgeWord, mv: Move, inverse: bool) -> Result<BridgeWord, BridgeError> {
    let b = &word.blocks;
    let k = b.len();
    let shape = || BridgeError::MoveShape(word.to_string());
    let blocks = match (mv, inverse) {
        (Move::Reverse, _) => return Ok(word.reversed()),
        (Move::ExtendOne, false) => {
            let mut v = b.clone();
            v[k - 1] += 1;
            v.push(1);
            v
        }
        (Move::ExtendOne, true) => {
            if k < 2 || b[k - 1] != 1 || b[k - 2] < 2 {
                return Err(shape());
            }
            let mut v = b[..k - 1].to_vec();
            v[k - 2] -= 1;
            v
        }
        (Move::PrependOne, false) => {
            let mut v = vec![1, b[0] + 1];
            v.extend_from_slice(&b[1..]);
            v
        }
        (Move::PrependOne, true) => {
            if k < 2 || b[0] != 1 || b[1] < 2 {
                return Err(shape());
            }
            let mut v = vec![b[1] - 1];
            v.extend_from_slice(&b[2..]);
            v
        }
    };
    BridgeWord::new(blocks)
}

/// p = p' and q ≡ q'^{±1} (mod p).
pub fn smooth_isotopic(w1: &BridgeWord, w2: &BridgeWord) -> bool {
    let (f1, f2) = (fraction_value(w1), fraction_value(w2));
    if f1.p != f2.p {
        return false;
    }
    let p = &f1.p;
    if p.is_zero() {
        return f1.q.abs() == f2.q.abs();
    }
    if p.is_one() {
        return true;
    }
    let (q1, q2) = (f1.normalized_q(), f2.normalized_q());
    q1 == q2 || (&q1 * &q2).mod_floor(p).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(w: &[usize]) -> (i64, i64) {
        let f = fraction_value(&BridgeWord::of(w));
        (i64::try_from(f.p).unwrap(), i64::try_from(f.q).unwrap())
    }

    #[test]
    fn fractions() {
        assert_eq!(frac(&[2]), (2, 1));
        assert_eq!(frac(&[3, 3]), (8, 3));
        assert_eq!(frac(&[2, 2, 2]), (4, 3));
        assert!(fraction_value(&BridgeWord::of(&[3, 3])).reduced);
    }

    #[test]
    fn alternating_division() {
        let w = |p: i64, q: i64| word_from_fraction(&Fraction::new(p, q)).unwrap();
        assert_eq!(w(8, 3), BridgeWord::of(&[3, 3]));
        assert_eq!(w(3, 1), BridgeWord::of(&[3]));
        assert_eq!(w(5, 3), BridgeWord::of(&[2, 3]));
        assert!(word_from_fraction(&Fraction::new(1, 1)).is_err());
    }

    #[test]
    fn moves() {
        let m = |w: &[usize], mv| apply_move(&BridgeWord::of(w), mv, false).unwrap();
        assert_eq!(m(&[3], Move::ExtendOne), BridgeWord::of(&[4, 1]));
        assert_eq!(frac(&[4, 1]).0, 3);
        assert_eq!(m(&[2, 2], Move::PrependOne), BridgeWord::of(&[1, 3, 2]));
        assert_eq!(frac(&[1, 3, 2]), (3, 5));
        assert_eq!(m(&[2, 3], Move::Reverse), BridgeWord::of(&[3, 2]));
        assert_eq!((frac(&[2, 3]).1 * frac(&[3, 2]).1) % 5, 1);
        assert!(apply_move(&BridgeWord::of(&[3]), Move::ExtendOne, true).is_err());
        assert_eq!(
            apply_move(&BridgeWord::of(&[1, 3, 2]), Move::PrependOne, true).unwrap(),
            BridgeWord::of(&[2, 2])
        );
    }

    #[test]
    fn isotopy_examples() {
        let iso = |a: &[usize], b: &[usize]| smooth_isotopic(&BridgeWord::of(a), &BridgeWord::of(b));
        assert!(iso(&[3], &[4, 1]));
        assert!(!iso(&[3], &[2, 2]));
        assert!(iso(&[2, 3], &[3, 2]));
    }

    #[test]
    fn parsing() {
        assert_eq!("5,4".parse::<BridgeWord>().unwrap(), BridgeWord::of(&[5, 4]));
        assert_eq!("[5, 4]".parse::<BridgeWord>().unwrap(), BridgeWord::of(&[5, 4]));
        assert!("[5,0]".parse::<BridgeWord>().is_err());
        assert!("x".parse::<BridgeWord>().is_err());
        assert!(!BridgeWord::of(&[3, 1, 3]).is_rational_form());
        assert!(BridgeWord::of(&[1, 2, 1]).is_rational_form());
    }
}
