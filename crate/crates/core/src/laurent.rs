//! Sparse trivariate polynomials with exact coefficients, and A_δ(n) as the
//! constant term of Λ(x,y,z)^n.
//!
//! Λ = N / (xyz) with N = (x+y−1)(x+z+1)(y−x+z)(y−z+1), so the constant term
//! of Λ^n is the coefficient of x^n y^n z^n in N^n. Only N is ever stored,
//! which keeps every exponent nonnegative.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::exactarith::Integer;

/// Exponents of `(x, y, z)`.
pub type Exponent = [i32; 3];

/// A finite map from exponent triples to nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    terms: HashMap<Exponent, Integer>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Integer::one(), [0, 0, 0])
    }

    pub fn monomial(coeff: Integer, exp: Exponent) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff);
        p
    }

    /// The variable `x`, `y` or `z` for `index` 0, 1, 2.
    pub fn var(index: usize) -> Self {
        let mut exp = [0; 3];
        exp[index] = 1;
        Self::monomial(Integer::one(), exp)
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(Integer::from(c), [0, 0, 0])
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, Integer)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (exp, c) in terms {
            p.add_term(exp, c);
        }
        p
    }

    fn add_term(&mut self, exp: Exponent, coeff: Integer) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(Integer::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: Exponent) -> Integer {
        self.terms.get(&exp).cloned().unwrap_or_else(Integer::zero)
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.is_empty()
    }

    /// Terms sorted by exponent.
    pub fn terms(&self) -> Vec<(Exponent, &Integer)> {
        let mut out: Vec<_> = self.terms.iter().map(|(e, c)| (*e, c)).collect();
        out.sort_unstable_by_key(|(e, _)| *e);
        out
    }

    /// Per-variable `(min, max)` exponents, or `None` for the zero polynomial.
    pub fn exponent_bounds(&self) -> Option<[(i32, i32); 3]> {
        let mut iter = self.terms.keys();
        let first = iter.next()?;
        let mut bounds = first.map(|e| (e, e));
        for e in iter {
            for v in 0..3 {
                bounds[v].0 = bounds[v].0.min(e[v]);
                bounds[v].1 = bounds[v].1.max(e[v]);
            }
        }
        Some(bounds)
    }

    pub fn total_degree(&self) -> Option<i32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Evaluates at an integer point with nonnegative exponents.
    pub fn eval(&self, point: [i64; 3]) -> Integer {
        let mut acc = Integer::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for v in 0..3 {
                assert!(e[v] >= 0, "eval needs nonnegative exponents");
                term *= Integer::from(point[v]).pow(e[v] as u32);
            }
            acc += term;
        }
        acc
    }

    /// `self^n` by binary exponentiation; `self^0 = 1`.
    pub fn pow(&self, mut n: u64) -> LaurentPoly {
        let mut result = LaurentPoly::one();
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        let (outer, inner) = if self.len() <= rhs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut acc: HashMap<Exponent, Integer> =
            HashMap::with_capacity(self.len().saturating_mul(rhs.len()).min(1 << 20));
        for (ea, ca) in &outer.terms {
            for (eb, cb) in &inner.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                let prod = ca * cb;
                match acc.get_mut(&e) {
                    Some(slot) => *slot += prod,
                    None => {
                        acc.insert(e, prod);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        LaurentPoly { terms: acc }
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;

    fn neg(mut self) -> LaurentPoly {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        self + (-rhs)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms().into_iter().rev().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let mag = c.abs();
            let is_const = e == [0, 0, 0];
            if !mag.is_one() || is_const {
                write!(f, "{mag}")?;
            }
            for (v, name) in ["x", "y", "z"].iter().enumerate() {
                match e[v] {
                    0 => {}
                    1 => f.write_str(name)?,
                    k => write!(f, "{name}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

/// `N = (x+y−1)(x+z+1)(y−x+z)(y−z+1)`, the numerator of Λ.
pub fn lambda_numerator() -> LaurentPoly {
    let x = || LaurentPoly::var(0);
    let y = || LaurentPoly::var(1);
    let z = || LaurentPoly::var(2);
    let one = || LaurentPoly::constant(1);
    let f1 = x() + y() - one();
    let f2 = x() + z() + one();
    let f3 = y() - x() + z();
    let f4 = y() - z() + one();
    f1 * f2 * f3 * f4
}

/// Storage used for the constant-term computation.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    #[default]
    Sparse,
    /// Bounded dense cube; only sensible for small `n`.
    Dense,
}

/// A_δ(n) as the constant term of Λ^n, using the sparse backend.
pub fn ct_lambda_power(n: u64) -> Integer {
    ct_lambda_power_with(n, Backend::Sparse)
}

/// The coefficient of `x^n y^n z^n` in `N^n`.
///
/// `N^n` is split as `N^⌈n/2⌉ · N^⌊n/2⌋` and only the target coefficient of
/// the product is formed.
pub fn ct_lambda_power_with(n: u64, backend: Backend) -> Integer {
    let target = n as i32;
    let hi = n.div_ceil(2);
    let lo = n / 2;
    match backend {
        Backend::Sparse => {
            let numerator = lambda_numerator();
            let big = numerator.pow(hi);
            let small = if lo == hi { big.clone() } else { numerator.pow(lo) };
            let mut acc = Integer::zero();
            for (e, c) in &big.terms {
                let rest = [target - e[0], target - e[1], target - e[2]];
                if let Some(d) = small.terms.get(&rest) {
                    acc += c * d;
                }
            }
            acc
        }
        Backend::Dense => {
            let numerator = DenseCube::from_poly(&lambda_numerator());
            let big = numerator.pow(hi);
            let small = numerator.pow(lo);
            let mut acc = Integer::zero();
            for (e, c) in big.nonzero() {
                let rest = [target - e[0], target - e[1], target - e[2]];
                if let Some(d) = small.get(rest) {
                    acc += c * d;
                }
            }
            acc
        }
    }
}

/// Dense coefficient cube for polynomials with nonnegative exponents.
#[derive(Clone, Debug)]
struct DenseCube {
    dims: [usize; 3],
    data: Vec<Integer>,
}

impl DenseCube {
    fn one() -> Self {
        Self {
            dims: [1, 1, 1],
            data: vec![Integer::one()],
        }
    }

    fn from_poly(p: &LaurentPoly) -> Self {
        let bounds = p.exponent_bounds().expect("nonzero polynomial");
        assert!(bounds.iter().all(|b| b.0 >= 0), "dense cube needs nonnegative exponents");
        let dims = bounds.map(|b| b.1 as usize + 1);
        let mut cube = Self {
            dims,
            data: vec![Integer::zero(); dims[0] * dims[1] * dims[2]],
        };
        for (e, c) in &p.terms {
            let idx = cube.index(e.map(|v| v as usize));
            cube.data[idx] = c.clone();
        }
        cube
    }

    fn index(&self, e: [usize; 3]) -> usize {
        (e[0] * self.dims[1] + e[1]) * self.dims[2] + e[2]
    }

    fn get(&self, e: Exponent) -> Option<&Integer> {
        if e.iter().zip(self.dims).any(|(&v, d)| v < 0 || v as usize >= d) {
            return None;
        }
        let c = &self.data[self.index(e.map(|v| v as usize))];
        (!c.is_zero()).then_some(c)
    }

    fn nonzero(&self) -> impl Iterator<Item = (Exponent, &Integer)> + '_ {
        let [_, dy, dz] = self.dims;
        self.data.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| {
            let ez = i % dz;
            let ey = (i / dz) % dy;
            let ex = i / (dz * dy);
            ([ex as i32, ey as i32, ez as i32], c)
        })
    }

    fn mul(&self, rhs: &DenseCube) -> DenseCube {
        let dims = [0, 1, 2].map(|v| self.dims[v] + rhs.dims[v] - 1);
        let mut out = DenseCube {
            dims,
            data: vec![Integer::zero(); dims[0] * dims[1] * dims[2]],
        };
        let rhs_terms: Vec<_> = rhs.nonzero().collect();
        for (ea, ca) in self.nonzero() {
            for (eb, cb) in &rhs_terms {
                let e = [0, 1, 2].map(|v| (ea[v] + eb[v]) as usize);
                let idx = out.index(e);
                out.data[idx] += ca * *cb;
            }
        }
        out
    }

    fn pow(&self, n: u64) -> DenseCube {
        let mut acc = DenseCube::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }
}
