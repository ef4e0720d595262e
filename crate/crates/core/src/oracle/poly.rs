//! Sparse polynomials in the commuting symbols `c` and `h` with exact
//! rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `Σ q_{ab} c^a h^b`, keyed by `(a, b)`; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<(u32, u32), BigRational>,
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(q: BigRational) -> Self {
        Self::monomial(q, 0, 0)
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(rational(n, 1))
    }

    /// `q · c^a · h^b`.
    pub fn monomial(q: BigRational, c_exp: u32, h_exp: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert((c_exp, h_exp), q);
        }
        Self { terms }
    }

    pub fn c() -> Self {
        Self::monomial(BigRational::one(), 1, 0)
    }

    pub fn h() -> Self {
        Self::monomial(BigRational::one(), 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `((c exponent, h exponent), coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    /// Coefficient of `c^a h^b`.
    pub fn coefficient(&self, c_exp: u32, h_exp: u32) -> BigRational {
        self.terms.get(&(c_exp, h_exp)).cloned().unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, key: (u32, u32), q: BigRational) {
        if q.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(BigRational::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, v)| (*k, v * q)).collect() }
    }

    /// Exact value at rational `(c, h)`.
    pub fn eval(&self, c: &BigRational, h: &BigRational) -> BigRational {
        self.terms.iter().fold(BigRational::zero(), |acc, ((a, b), q)| acc + q * pow(c, *a) * pow(h, *b))
    }

    /// Value at floating `(c, h)`.
    pub fn eval_f64(&self, c: f64, h: f64) -> f64 {
        self.terms
            .iter()
            .map(|((a, b), q)| q.to_f64().unwrap_or(f64::NAN) * c.powi(*a as i32) * h.powi(*b as i32))
            .sum()
    }

    /// Specialises `c`, leaving a polynomial in `h` (coefficients by power).
    pub fn specialize_c(&self, c: &BigRational) -> Vec<BigRational> {
        let degree = self.terms.keys().map(|(_, b)| *b).max().unwrap_or(0) as usize;
        let mut out = vec![BigRational::zero(); degree + 1];
        for ((a, b), q) in &self.terms {
            out[*b as usize] += q * pow(c, *a);
        }
        out
    }
}

fn pow(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, -v.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for ((a1, b1), q1) in &self.terms {
            for ((a2, b2), q2) in &rhs.terms {
                out.add_term((a1 + a2, b1 + b2), q1 * q2);
            }
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl fmt::Display for Poly {
    /// Terms by descending `h` power, then descending `c` power:
    /// `8*h^2 + 4*h`, `4*h + 1/2*c`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by(|x, y| y.1.cmp(&x.1).then(y.0.cmp(&x.0)));
        for (i, key) in keys.iter().enumerate() {
            let q = &self.terms[key];
            let negative = q.is_negative();
            let magnitude = q.abs();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            let mut factors = Vec::new();
            if !magnitude.is_one() || *key == (0, 0) {
                factors.push(magnitude.to_string());
            }
            for (symbol, exp) in [("c", key.0), ("h", key.1)] {
                match exp {
                    0 => {}
                    1 => factors.push(symbol.to_string()),
                    e => factors.push(format!("{symbol}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_display() {
        let p = &Poly::h().scale(&rational(4, 1)) + &Poly::c().scale(&rational(1, 2));
        assert_eq!(p.to_string(), "4*h + 1/2*c");
        let q = &Poly::h() * &(&Poly::h().scale(&rational(8, 1)) + &Poly::integer(4));
        assert_eq!(q.to_string(), "8*h^2 + 4*h");
        assert_eq!((&q - &q).to_string(), "0");
        assert_eq!((-&Poly::one()).to_string(), "-1");
        let mixed = &(&Poly::c() * &Poly::h()) - &Poly::integer(3);
        assert_eq!(mixed.to_string(), "c*h - 3");
    }

    #[test]
    fn evaluation() {
        let p = &Poly::h().scale(&rational(4, 1)) + &Poly::c().scale(&rational(1, 2));
        assert_eq!(p.eval(&rational(1, 1), &rational(1, 2)), rational(5, 2));
        assert!((p.eval_f64(1.0, 0.5) - 2.5).abs() < 1e-15);
        assert_eq!(p.specialize_c(&rational(1, 1)), vec![rational(1, 2), rational(4, 1)]);
    }
}
