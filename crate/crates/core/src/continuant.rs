//! Continuant polynomials and the 2×2 braid matrix model.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::ring::{mul_mod, Coefficients, LaurentPolynomial, PolyContext, VariableTable};

/// The operations continuant recursions need; implemented for polynomials and for field/integer scalars.
pub trait Alg: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
}

impl Alg for LaurentPolynomial {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Alg for BigInt {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

/// An element of F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp {
    pub v: u64,
    pub p: u64,
}

impl Fp {
    pub fn new(v: u64, p: u64) -> Self {
        Fp { v: v % p, p }
    }

    pub fn inv(self) -> Self {
        Fp::new(crate::ring::inv_mod(self.v, self.p), self.p)
    }

    pub fn is_zero(self) -> bool {
        self.v == 0
    }
}

impl Alg for Fp {
    fn add(&self, o: &Self) -> Self {
        Fp::new(self.v + o.v, self.p)
    }
    fn sub(&self, o: &Self) -> Self {
        Fp::new(self.v + self.p - o.v, self.p)
    }
    fn mul(&self, o: &Self) -> Self {
        Fp::new(mul_mod(self.v, o.v, self.p), self.p)
    }
}

/// K_n(x_1..x_n) via K_n = x_1·K_{n−1}(x_2..) − K_{n−2}(x_3..), with K_{−1} = 0 and K_0 = `one`.
pub fn continuant_with<T: Alg>(xs: &[T], one: &T) -> T {
    let zero = one.sub(one);
    // Walk from the right: tail = K(x_j..x_n), after = K(x_{j+1}..x_n).
    let mut after = zero;
    let mut tail = one.clone();
    for x in xs.iter().rev() {
        let next = x.mul(&tail).sub(&after);
        after = tail;
        tail = next;
    }
    tail
}

/// Continuant of the named variables (or integer scalars, written as digits) over `ring`.
pub fn continuant(ctx: &PolyContext, vars: &[&str]) -> LaurentPolynomial {
    let xs: Vec<LaurentPolynomial> = vars
        .iter()
        .map(|v| match v.parse::<i64>() {
            Ok(c) => ctx.constant(c),
            Err(_) => ctx.var(v),
        })
        .collect();
    continuant_with(&xs, &ctx.one())
}

/// Table of contiguous-range continuants K(x_lo..x_{hi−1}) for a fixed list.
#[derive(Clone)]
pub struct ContinuantTable<T: Alg> {
    len: usize,
    one: T,
    zero: T,
    // rows[lo][j] = K(x_lo..x_{lo+j−1})
    rows: Vec<Vec<T>>,
}

impl<T: Alg> ContinuantTable<T> {
    pub fn new(xs: &[T], one: &T) -> Self {
        let zero = one.sub(one);
        let mut rows = Vec::with_capacity(xs.len() + 1);
        for lo in 0..=xs.len() {
            let mut row = vec![one.clone()];
            let mut prev2 = zero.clone();
            for x in &xs[lo..] {
                let last = row.last().unwrap().clone();
                let next = last.mul(x).sub(&prev2);
                prev2 = last;
                row.push(next);
            }
            rows.push(row);
        }
        ContinuantTable {
            len: xs.len(),
            one: one.clone(),
            zero,
            rows,
        }
    }

    /// K of the half-open range [lo, hi); hi = lo − 1 gives K_{−1} = 0.
    pub fn range(&self, lo: usize, hi: usize) -> T {
        if hi + 1 == lo {
            return self.zero.clone();
        }
        assert!(lo <= hi && hi <= self.len, "continuant range {lo}..{hi} out of bounds");
        if lo == hi {
            return self.one.clone();
        }
        self.rows[lo][hi - lo].clone()
    }
}

/// A 2×2 matrix over an `Alg`.
#[derive(Debug, Clone, PartialEq)]
pub struct BMatrix<T> {
    pub entries: [[T; 2]; 2],
}

impl<T: Alg> BMatrix<T> {
    pub fn mul(&self, o: &Self) -> Self {
        let e = &self.entries;
        let f = &o.entries;
        let cell = |i: usize, j: usize| e[i][0].mul(&f[0][j]).add(&e[i][1].mul(&f[1][j]));
        BMatrix {
            entries: [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]],
        }
    }

    pub fn det(&self) -> T {
        let e = &self.entries;
        e[0][0].mul(&e[1][1]).sub(&e[0][1].mul(&e[1][0]))
    }

    /// B(x) = [[x, −1], [1, 0]].
    pub fn braid(x: &T, one: &T) -> Self {
        let zero = one.sub(one);
        BMatrix {
            entries: [[x.clone(), zero.sub(one)], [one.clone(), zero]],
        }
    }

    /// D(p) = diag(p, p⁻¹); the inverse is supplied by the caller.
    pub fn diag(p: &T, p_inv: &T, one: &T) -> Self {
        let zero = one.sub(one);
        BMatrix {
            entries: [[p.clone(), zero.clone()], [zero, p_inv.clone()]],
        }
    }

    pub fn identity(one: &T) -> Self {
        let zero = one.sub(one);
        BMatrix {
            entries: [[one.clone(), zero.clone()], [zero, one.clone()]],
        }
    }
}

/// B(x_1)D(p_1)⋯B(x_n)D(p_n); without parameters this is B(x_1)⋯B(x_n).
pub fn braid_matrix_product_with<T: Alg>(
    xs: &[T],
    params: Option<&[(T, T)]>,
    one: &T,
) -> BMatrix<T> {
    if let Some(ps) = params {
        assert_eq!(ps.len(), xs.len(), "one D-factor per B-factor");
    }
    let mut m = BMatrix::identity(one);
    for (i, x) in xs.iter().enumerate() {
        m = m.mul(&BMatrix::braid(x, one));
        if let Some(ps) = params {
            m = m.mul(&BMatrix::diag(&ps[i].0, &ps[i].1, one));
        }
    }
    m
}

/// Symbolic product; `params` must be units of the polynomial ring.
pub fn braid_matrix_product(
    xs: &[LaurentPolynomial],
    params: Option<&[LaurentPolynomial]>,
    one: &LaurentPolynomial,
) -> BMatrix<LaurentPolynomial> {
    let pairs: Option<Vec<(LaurentPolynomial, LaurentPolynomial)>> = params.map(|ps| {
        ps.iter()
            .map(|p| {
                let inv = p.unit_inverse().expect("D-parameter must be a unit");
                (p.clone(), inv)
            })
            .collect()
    });
    braid_matrix_product_with(xs, pairs.as_deref(), one)
}

/// Variables x1..xn over Z.
pub fn integer_variables(n: usize) -> (Arc<VariableTable>, Vec<LaurentPolynomial>) {
    let table = VariableTable::new((1..=n).map(|i| (format!("x{i}"), false))).unwrap();
    let xs = (0..n)
        .map(|i| LaurentPolynomial::var(&table, Coefficients::Integers, i))
        .collect();
    (table, xs)
}

/// K_{n−1}(x_1..x_{n−1})K_{n−1}(x_2..x_n) − K_n(x_1..x_n)K_{n−2}(x_2..x_{n−1}) = 1 over Z.
pub fn check_determinant_identity(n: usize) -> bool {
    assert!(n >= 1);
    let (table, xs) = integer_variables(n);
    let one = LaurentPolynomial::one(&table, Coefficients::Integers);
    let k = |s: &[LaurentPolynomial]| continuant_with(s, &one);
    let inner = if n >= 2 {
        k(&xs[1..n - 1])
    } else {
        LaurentPolynomial::zero(&table, Coefficients::Integers)
    };
    let lhs = k(&xs[..n - 1]) * k(&xs[1..]) - k(&xs) * inner;
    lhs == one
}
