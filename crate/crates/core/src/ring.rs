//! Sparse multivariate Laurent polynomials over Z or a prime field.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use smallvec::{smallvec, SmallVec};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("operands use different variable tables")]
    TableMismatch,
    #[error("operands use different coefficient rings")]
    RingMismatch,
    #[error("negative exponent on non-invertible variable `{0}`")]
    NegativeExponent(String),
    #[error("substitution for invertible variable `{0}` is not a unit")]
    NonUnitSubstitution(String),
    #[error("variable `{0}` has no value")]
    Unassigned(String),
    #[error("invertible variable `{0}` evaluated at zero")]
    ZeroAtInvertible(String),
    #[error("division by the zero polynomial")]
    DivisionByZero,
}

/// Coefficient ring: the integers or F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coefficients {
    Integers,
    PrimeField(u64),
}

impl Default for Coefficients {
    fn default() -> Self {
        Coefficients::PrimeField(2)
    }
}

impl Coefficients {
    pub fn prime_field(p: u64) -> Result<Self, RingError> {
        if is_prime(p) {
            Ok(Coefficients::PrimeField(p))
        } else {
            Err(RingError::NotPrime(p))
        }
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Coefficients::Integers => 0,
            Coefficients::PrimeField(p) => p,
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Modular inverse of a nonzero residue.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(p));
    e.x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Ordered variable names with per-variable invertibility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableTable {
    names: Vec<String>,
    invertible: Vec<bool>,
    index: HashMap<String, usize>,
}

impl VariableTable {
    pub fn new<S: Into<String>>(
        vars: impl IntoIterator<Item = (S, bool)>,
    ) -> Result<Arc<Self>, RingError> {
        let mut names = Vec::new();
        let mut invertible = Vec::new();
        let mut index = HashMap::new();
        for (name, inv) in vars {
            let name: String = name.into();
            if index.insert(name.clone(), names.len()).is_some() {
                return Err(RingError::DuplicateVariable(name));
            }
            names.push(name);
            invertible.push(inv);
        }
        Ok(Arc::new(VariableTable {
            names,
            invertible,
            index,
        }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_invertible(&self, i: usize) -> bool {
        self.invertible[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn lookup(&self, name: &str) -> Result<usize, RingError> {
        self.index_of(name)
            .ok_or_else(|| RingError::UnknownVariable(name.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Coef {
    S(i64),
    B(BigInt),
}

impl Coef {
    fn from_big(b: BigInt) -> Coef {
        match b.to_i64() {
            Some(v) => Coef::S(v),
            None => Coef::B(b),
        }
    }

    fn from_i64(v: i64, ring: Coefficients) -> Coef {
        match ring {
            Coefficients::Integers => Coef::S(v),
            Coefficients::PrimeField(p) => Coef::S(v.rem_euclid(p as i64)),
        }
    }

    fn big(&self) -> BigInt {
        match self {
            Coef::S(v) => BigInt::from(*v),
            Coef::B(b) => b.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Coef::S(0))
    }

    fn is_unit(&self, ring: Coefficients) -> bool {
        match ring {
            Coefficients::Integers => matches!(self, Coef::S(1) | Coef::S(-1)),
            Coefficients::PrimeField(_) => !self.is_zero(),
        }
    }

    fn add(&self, o: &Coef, ring: Coefficients) -> Coef {
        match (ring, self, o) {
            (Coefficients::PrimeField(p), Coef::S(a), Coef::S(b)) => {
                Coef::S(((*a as u64 + *b as u64) % p) as i64)
            }
            (_, Coef::S(a), Coef::S(b)) => match a.checked_add(*b) {
                Some(v) => Coef::S(v),
                None => Coef::from_big(BigInt::from(*a) + BigInt::from(*b)),
            },
            _ => Coef::from_big(self.big() + o.big()),
        }
    }

    fn mul(&self, o: &Coef, ring: Coefficients) -> Coef {
        match (ring, self, o) {
            (Coefficients::PrimeField(p), Coef::S(a), Coef::S(b)) => {
                Coef::S(mul_mod(*a as u64, *b as u64, p) as i64)
            }
            (_, Coef::S(a), Coef::S(b)) => match a.checked_mul(*b) {
                Some(v) => Coef::S(v),
                None => Coef::from_big(BigInt::from(*a) * BigInt::from(*b)),
            },
            _ => Coef::from_big(self.big() * o.big()),
        }
    }

    fn neg(&self, ring: Coefficients) -> Coef {
        match (ring, self) {
            (Coefficients::PrimeField(p), Coef::S(a)) => Coef::S(((p - *a as u64) % p) as i64),
            (_, Coef::S(a)) => match a.checked_neg() {
                Some(v) => Coef::S(v),
                None => Coef::from_big(-BigInt::from(*a)),
            },
            (_, Coef::B(b)) => Coef::from_big(-b.clone()),
        }
    }

    /// Exact quotient self / o, if it exists in the ring.
    fn div(&self, o: &Coef, ring: Coefficients) -> Option<Coef> {
        match ring {
            Coefficients::PrimeField(p) => {
                let (Coef::S(a), Coef::S(b)) = (self, o) else {
                    unreachable!()
                };
                Some(Coef::S(mul_mod(*a as u64, inv_mod(*b as u64, p), p) as i64))
            }
            Coefficients::Integers => {
                let (q, r) = self.big().div_rem(&o.big());
                r.is_zero().then(|| Coef::from_big(q))
            }
        }
    }

    fn residue(&self, p: u64) -> u64 {
        match self {
            Coef::S(v) => v.rem_euclid(p as i64) as u64,
            Coef::B(b) => b.mod_floor(&BigInt::from(p)).to_u64().unwrap(),
        }
    }
}

/// Exponent vector, stored inline for tables of up to 24 variables.
pub type Exps = SmallVec<[i16; 24]>;

type Term = (Exps, Coef);

/// A Laurent polynomial; terms are kept sorted by exponent vector with no zero coefficients.
#[derive(Clone)]
pub struct LaurentPolynomial {
    table: Arc<VariableTable>,
    ring: Coefficients,
    terms: Vec<Term>,
}

impl PartialEq for LaurentPolynomial {
    fn eq(&self, o: &Self) -> bool {
        (Arc::ptr_eq(&self.table, &o.table) || self.table == o.table)
            && self.ring == o.ring
            && self.terms == o.terms
    }
}

impl Eq for LaurentPolynomial {}

impl fmt::Debug for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl LaurentPolynomial {
    fn from_terms(table: Arc<VariableTable>, ring: Coefficients, mut terms: Vec<Term>) -> Self {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 = last.1.add(&c, ring),
                _ => {
                    if let Some(last) = out.last() {
                        if last.1.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((e, c));
                }
            }
        }
        if out.last().is_some_and(|t| t.1.is_zero()) {
            out.pop();
        }
        LaurentPolynomial {
            table,
            ring,
            terms: out,
        }
    }

    pub fn zero(table: &Arc<VariableTable>, ring: Coefficients) -> Self {
        LaurentPolynomial {
            table: table.clone(),
            ring,
            terms: Vec::new(),
        }
    }

    pub fn one(table: &Arc<VariableTable>, ring: Coefficients) -> Self {
        Self::constant(table, ring, 1)
    }

    pub fn constant(table: &Arc<VariableTable>, ring: Coefficients, c: i64) -> Self {
        let t = vec![(smallvec![0; table.len()], Coef::from_i64(c, ring))];
        Self::from_terms(table.clone(), ring, t)
    }

    pub fn constant_big(table: &Arc<VariableTable>, ring: Coefficients, c: &BigInt) -> Self {
        let c = match ring {
            Coefficients::Integers => Coef::from_big(c.clone()),
            Coefficients::PrimeField(p) => Coef::S(c.mod_floor(&BigInt::from(p)).to_i64().unwrap()),
        };
        Self::from_terms(table.clone(), ring, vec![(smallvec![0; table.len()], c)])
    }

    pub fn var(table: &Arc<VariableTable>, ring: Coefficients, i: usize) -> Self {
        let mut e: Exps = smallvec![0; table.len()];
        e[i] = 1;
        LaurentPolynomial {
            table: table.clone(),
            ring,
            terms: vec![(e, Coef::from_i64(1, ring))],
        }
    }

    pub fn variable(
        table: &Arc<VariableTable>,
        ring: Coefficients,
        name: &str,
    ) -> Result<Self, RingError> {
        Ok(Self::var(table, ring, table.lookup(name)?))
    }

    pub fn monomial(
        table: &Arc<VariableTable>,
        ring: Coefficients,
        exps: Vec<i32>,
        coef: i64,
    ) -> Result<Self, RingError> {
        assert_eq!(exps.len(), table.len(), "exponent vector length");
        for (i, &e) in exps.iter().enumerate() {
            if e < 0 && !table.is_invertible(i) {
                return Err(RingError::NegativeExponent(table.name(i).to_string()));
            }
        }
        Ok(Self::from_terms(
            table.clone(),
            ring,
            vec![(exps.iter().map(|&x| x as i16).collect(), Coef::from_i64(coef, ring))],
        ))
    }

    /// Builds a polynomial from (exponents, coefficient) pairs.
    pub fn from_term_list(
        table: &Arc<VariableTable>,
        ring: Coefficients,
        terms: Vec<(Vec<i32>, BigInt)>,
    ) -> Result<Self, RingError> {
        let mut out = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            assert_eq!(e.len(), table.len(), "exponent vector length");
            for (i, &x) in e.iter().enumerate() {
                if x < 0 && !table.is_invertible(i) {
                    return Err(RingError::NegativeExponent(table.name(i).to_string()));
                }
            }
            let c = match ring {
                Coefficients::Integers => Coef::from_big(c),
                Coefficients::PrimeField(p) => Coef::S(c.mod_floor(&BigInt::from(p)).to_i64().unwrap()),
            };
            out.push((e.iter().map(|&x| x as i16).collect(), c));
        }
        Ok(Self::from_terms(table.clone(), ring, out))
    }

    /// Parses a product of named powers like `s1^-2*s2`.
    pub fn monomial_from_text(
        table: &Arc<VariableTable>,
        ring: Coefficients,
        text: &str,
    ) -> Result<Self, RingError> {
        let mut e = vec![0i32; table.len()];
        for factor in text.split('*').map(str::trim).filter(|f| !f.is_empty() && *f != "1") {
            let (name, pow) = match factor.split_once('^') {
                Some((n, k)) => (n, k.parse::<i32>().map_err(|_| RingError::UnknownVariable(factor.into()))?),
                None => (factor, 1),
            };
            e[table.lookup(name)?] += pow;
        }
        Self::monomial(table, ring, e, 1)
    }

    pub fn table(&self) -> &Arc<VariableTable> {
        &self.table
    }

    pub fn ring(&self) -> Coefficients {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&[i16], BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c.big()))
    }

    pub fn constant_value(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(e, c)] if e.iter().all(|&x| x == 0) => Some(c.big()),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// A single term with a unit coefficient whose non-invertible exponents vanish.
    pub fn is_unit(&self) -> bool {
        match self.terms.as_slice() {
            [(e, c)] => {
                c.is_unit(self.ring)
                    && e.iter()
                        .enumerate()
                        .all(|(i, &x)| x == 0 || self.table.is_invertible(i))
            }
            _ => false,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn unit_inverse(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let (e, c) = &self.terms[0];
        let one = Coef::from_i64(1, self.ring);
        Some(LaurentPolynomial {
            table: self.table.clone(),
            ring: self.ring,
            terms: vec![(e.iter().map(|x| -x).collect(), one.div(c, self.ring)?)],
        })
    }

    /// Variables occurring with a nonzero exponent.
    pub fn support(&self) -> Vec<usize> {
        (0..self.table.len())
            .filter(|&i| self.terms.iter().any(|(e, _)| e[i] != 0))
            .collect()
    }

    fn check(&self, o: &Self) -> Result<(), RingError> {
        if !(Arc::ptr_eq(&self.table, &o.table) || self.table == o.table) {
            return Err(RingError::TableMismatch);
        }
        if self.ring != o.ring {
            return Err(RingError::RingMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, RingError> {
        self.check(o)?;
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < o.terms.len() {
            let (a, b) = (&self.terms[i], &o.terms[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = a.1.add(&b.1, self.ring);
                    if !c.is_zero() {
                        out.push((a.0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&o.terms[j..]);
        Ok(LaurentPolynomial {
            table: self.table.clone(),
            ring: self.ring,
            terms: out,
        })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, RingError> {
        self.try_add(&o.neg())
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, RingError> {
        self.check(o)?;
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero(&self.table, self.ring));
        }
        let mut out = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Exps = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.push((e, ca.mul(cb, self.ring)));
            }
        }
        Ok(Self::from_terms(self.table.clone(), self.ring, out))
    }

    pub fn neg(&self) -> Self {
        LaurentPolynomial {
            table: self.table.clone(),
            ring: self.ring,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.neg(self.ring)))
                .collect(),
        }
    }

    pub fn scale(&self, c: i64) -> Self {
        let c = Coef::from_i64(c, self.ring);
        let terms = self
            .terms
            .iter()
            .map(|(e, x)| (e.clone(), x.mul(&c, self.ring)))
            .collect();
        Self::from_terms(self.table.clone(), self.ring, terms)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.table, self.ring);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Reduces integer coefficients modulo a prime; the identity on F_p polynomials with the same p.
    pub fn reduce(&self, ring: Coefficients) -> Result<Self, RingError> {
        match (self.ring, ring) {
            (a, b) if a == b => Ok(self.clone()),
            (Coefficients::Integers, Coefficients::PrimeField(p)) => {
                let terms = self
                    .terms
                    .iter()
                    .map(|(e, c)| (e.clone(), Coef::S(c.residue(p) as i64)))
                    .collect();
                Ok(Self::from_terms(self.table.clone(), ring, terms))
            }
            _ => Err(RingError::RingMismatch),
        }
    }

    /// Re-expresses the polynomial over another table containing all used variables.
    pub fn embed(&self, target: &Arc<VariableTable>) -> Result<Self, RingError> {
        if Arc::ptr_eq(&self.table, target) {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.table.len());
        for i in 0..self.table.len() {
            map.push(target.index_of(self.table.name(i)));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let mut ne: Exps = smallvec![0; target.len()];
            for (i, &x) in e.iter().enumerate() {
                if x != 0 {
                    let j = map[i]
                        .ok_or_else(|| RingError::UnknownVariable(self.table.name(i).into()))?;
                    if x < 0 && !target.is_invertible(j) {
                        return Err(RingError::NegativeExponent(target.name(j).into()));
                    }
                    ne[j] = x;
                }
            }
            terms.push((ne, c.clone()));
        }
        Ok(Self::from_terms(target.clone(), self.ring, terms))
    }

    /// Simultaneous substitution of variables (by table index).
    pub fn substitute(&self, assignments: &HashMap<usize, LaurentPolynomial>) -> Result<Self, RingError> {
        for (&i, q) in assignments {
            self.check(q)?;
            if self.table.is_invertible(i) && !q.is_unit() {
                return Err(RingError::NonUnitSubstitution(self.table.name(i).to_string()));
            }
        }
        let mut inverses: HashMap<usize, LaurentPolynomial> = HashMap::new();
        let mut powers: HashMap<(usize, i16), LaurentPolynomial> = HashMap::new();
        let mut acc = Self::zero(&self.table, self.ring);
        for (e, c) in &self.terms {
            let mut kept = e.clone();
            let mut replaced = Vec::new();
            for (i, &x) in e.iter().enumerate() {
                if x != 0 && assignments.contains_key(&i) {
                    kept[i] = 0;
                    replaced.push((i, x));
                }
            }
            let mut term = LaurentPolynomial {
                table: self.table.clone(),
                ring: self.ring,
                terms: vec![(kept, c.clone())],
            };
            for key in replaced {
                let (i, x) = key;
                if !powers.contains_key(&key) {
                    let base = if x < 0 {
                        inverses
                            .entry(i)
                            .or_insert_with(|| assignments[&i].unit_inverse().unwrap())
                            .clone()
                    } else {
                        assignments[&i].clone()
                    };
                    powers.insert(key, base.pow(x.unsigned_abs().into()));
                }
                term = &term * &powers[&key];
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Substitution keyed by variable name.
    pub fn substitute_named(&self, assignments: &[(&str, LaurentPolynomial)]) -> Result<Self, RingError> {
        let mut map = HashMap::new();
        for (name, q) in assignments {
            map.insert(self.table.lookup(name)?, q.clone());
        }
        self.substitute(&map)
    }

    /// Evaluates at a point given by table index; variables not used may hold anything.
    pub fn evaluate_indexed(&self, values: &[u64], p: u64) -> Result<u64, RingError> {
        if let Coefficients::PrimeField(q) = self.ring {
            if q != p {
                return Err(RingError::RingMismatch);
            }
        }
        let mut inv: Vec<Option<u64>> = vec![None; self.table.len()];
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let mut v = c.residue(p);
            for (i, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let base = if x > 0 {
                    values[i] % p
                } else {
                    if values[i] % p == 0 {
                        return Err(RingError::ZeroAtInvertible(self.table.name(i).into()));
                    }
                    *inv[i].get_or_insert_with(|| inv_mod(values[i] % p, p))
                };
                for _ in 0..x.unsigned_abs() {
                    v = mul_mod(v, base, p);
                }
            }
            acc = (acc + v) % p;
        }
        Ok(acc)
    }

    /// Evaluates a polynomial (no negative exponents) at integer values, indexed by table position.
    pub fn evaluate_integer(&self, values: &[BigInt]) -> Result<BigInt, RingError> {
        let mut acc = BigInt::from(0);
        for (e, c) in self.terms() {
            let mut v = c;
            for (i, &x) in e.iter().enumerate() {
                if x < 0 {
                    return Err(RingError::NegativeExponent(self.table.name(i).into()));
                }
                v *= values[i].pow(x as u32);
            }
            acc += v;
        }
        Ok(acc)
    }

    /// Evaluates at a named point over F_p.
    pub fn evaluate(&self, point: &HashMap<String, u64>, p: u64) -> Result<u64, RingError> {
        let mut values = vec![0u64; self.table.len()];
        for (name, &v) in point {
            if let Some(i) = self.table.index_of(name) {
                if self.table.is_invertible(i) && v % p == 0 {
                    return Err(RingError::ZeroAtInvertible(name.clone()));
                }
                values[i] = v;
            }
        }
        for i in self.support() {
            if !point.contains_key(self.table.name(i)) {
                return Err(RingError::Unassigned(self.table.name(i).into()));
            }
        }
        self.evaluate_indexed(&values, p)
    }

    /// Returns `Ok(Some(q))` with `q * den == self`, or `Ok(None)` when no Laurent quotient exists.
    pub fn exact_divide(&self, den: &Self) -> Result<Option<Self>, RingError> {
        self.check(den)?;
        if den.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Some(self.clone()));
        }
        let n = self.table.len();
        let min_shift = |p: &Self| -> Exps {
            (0..n)
                .map(|i| {
                    if self.table.is_invertible(i) {
                        p.terms.iter().map(|t| t.0[i]).min().unwrap()
                    } else {
                        0
                    }
                })
                .collect()
        };
        let (sn, sd) = (min_shift(self), min_shift(den));
        let shift = |p: &Self, s: &[i16]| -> Self {
            let terms = p
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(s).map(|(x, y)| x - y).collect(), c.clone()))
                .collect();
            LaurentPolynomial {
                table: p.table.clone(),
                ring: p.ring,
                terms,
            }
        };
        let mut rem = shift(self, &sn);
        let d = shift(den, &sd);
        let (lead_e, lead_c) = d.terms.last().unwrap().clone();
        let mut quot = Vec::new();
        while let Some((e, c)) = rem.terms.last().cloned() {
            let qe: Exps = e.iter().zip(&lead_e).map(|(x, y)| x - y).collect();
            if qe.iter().any(|&x| x < 0) {
                return Ok(None);
            }
            let Some(qc) = c.div(&lead_c, self.ring) else {
                return Ok(None);
            };
            let t = LaurentPolynomial {
                table: self.table.clone(),
                ring: self.ring,
                terms: vec![(qe.clone(), qc.clone())],
            };
            rem = &rem - &(&t * &d);
            quot.push((qe, qc));
        }
        let q = Self::from_terms(self.table.clone(), self.ring, quot);
        let offset: Exps = sn.iter().zip(&sd).map(|(a, b)| b - a).collect();
        let q = shift(&q, &offset);
        for (e, _) in &q.terms {
            for (i, &x) in e.iter().enumerate() {
                if x < 0 && !self.table.is_invertible(i) {
                    return Ok(None);
                }
            }
        }
        Ok(Some(q))
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mut ex = serde_json::Map::new();
                for (i, &x) in e.iter().enumerate() {
                    if x != 0 {
                        ex.insert(self.table.name(i).to_string(), json!(x));
                    }
                }
                json!({"coefficient": c.big().to_string(), "exponents": ex})
            })
            .collect();
        Value::Array(terms)
    }

    /// Exponent vectors grouped as a map, handy for comparisons in tests.
    pub fn term_map(&self) -> BTreeMap<Vec<i16>, BigInt> {
        self.terms.iter().map(|(e, c)| (e.to_vec(), c.big())).collect()
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let c = c.big();
            let neg = c.is_negative() && self.ring == Coefficients::Integers;
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut factors = Vec::new();
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(self.table.name(i).to_string()),
                    _ => factors.push(format!("{}^{}", self.table.name(i), x)),
                }
            }
            if factors.is_empty() {
                write!(f, "{}", mag)?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", mag)?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr<&LaurentPolynomial> for &LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $m(self, o: &LaurentPolynomial) -> LaurentPolynomial {
                self.$f(o).expect("polynomial operands are incompatible")
            }
        }
        impl std::ops::$tr<LaurentPolynomial> for LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $m(self, o: LaurentPolynomial) -> LaurentPolynomial {
                (&self).$m(&o)
            }
        }
        impl std::ops::$tr<&LaurentPolynomial> for LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $m(self, o: &LaurentPolynomial) -> LaurentPolynomial {
                (&self).$m(o)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl std::ops::Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        LaurentPolynomial::neg(self)
    }
}

/// Builds a table plus a handle for quickly creating variables in it.
#[derive(Debug, Clone)]
pub struct PolyContext {
    pub table: Arc<VariableTable>,
    pub ring: Coefficients,
}

impl PolyContext {
    pub fn new<S: Into<String>>(
        vars: impl IntoIterator<Item = (S, bool)>,
        ring: Coefficients,
    ) -> Result<Self, RingError> {
        Ok(PolyContext {
            table: VariableTable::new(vars)?,
            ring,
        })
    }

    pub fn var(&self, name: &str) -> LaurentPolynomial {
        LaurentPolynomial::variable(&self.table, self.ring, name)
            .unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn idx(&self, name: &str) -> usize {
        self.table.index_of(name).unwrap_or_else(|| panic!("unknown variable {name}"))
    }

    pub fn zero(&self) -> LaurentPolynomial {
        LaurentPolynomial::zero(&self.table, self.ring)
    }

    pub fn one(&self) -> LaurentPolynomial {
        LaurentPolynomial::one(&self.table, self.ring)
    }

    pub fn constant(&self, c: i64) -> LaurentPolynomial {
        LaurentPolynomial::constant(&self.table, self.ring, c)
    }

    pub fn mono(&self, text: &str) -> LaurentPolynomial {
        LaurentPolynomial::monomial_from_text(&self.table, self.ring, text)
            .unwrap_or_else(|e| panic!("{e}"))
    }
}
