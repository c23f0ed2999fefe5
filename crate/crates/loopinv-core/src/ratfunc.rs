//! Univariate rational functions over Q, kept coprime with monic denominator.

use num_traits::{One, Zero};

use crate::rational::Rational;
use crate::unipoly::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: UniPoly,
    den: UniPoly,
}

impl RatFunc {
    pub fn new(num: UniPoly, den: UniPoly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        let mut rf = RatFunc { num, den };
        rf.normalize();
        rf
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = UniPoly::one();
            return;
        }
        let g = self.num.gcd(&self.den);
        if !g.is_one() {
            self.num = self.num.try_div(&g).unwrap();
            self.den = self.den.try_div(&g).unwrap();
        }
        let lc = self.den.leading_coeff();
        if !lc.is_one() {
            self.den = self.den.scale(&lc.recip());
            self.num = self.num.scale(&lc.recip());
        }
    }

    pub fn zero() -> Self {
        RatFunc {
            num: UniPoly::zero(),
            den: UniPoly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc::from_poly(UniPoly::one())
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc::from_poly(UniPoly::constant(c))
    }

    pub fn from_poly(p: UniPoly) -> Self {
        RatFunc {
            num: p,
            den: UniPoly::one(),
        }
    }

    pub fn var() -> Self {
        RatFunc::from_poly(UniPoly::var())
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    pub fn as_poly(&self) -> Option<&UniPoly> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    /// `r(x + k)`.
    pub fn shift(&self, k: i64) -> Self {
        RatFunc::new(self.num.shift(k), self.den.shift(k))
    }

    /// Evaluate; `None` at a pole.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(x) / d)
    }

    /// Largest integer pole; evaluation is defined strictly above this.
    pub fn max_integer_pole(&self) -> Option<i64> {
        self.den.max_integer_root()
    }

    pub fn to_string_with(&self, var: &str) -> String {
        if self.den.is_one() {
            self.num.to_string_with(var)
        } else {
            format!(
                "({})/({})",
                self.num.to_string_with(var),
                self.den.to_string_with(var)
            )
        }
    }
}

impl std::ops::Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, other: Self) -> RatFunc {
        RatFunc::new(
            &(&self.num * &other.den) + &(&other.num * &self.den),
            &self.den * &other.den,
        )
    }
}

impl std::ops::Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, other: Self) -> RatFunc {
        self + &(-other)
    }
}

impl std::ops::Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl std::ops::Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, other: Self) -> RatFunc {
        RatFunc::new(&self.num * &other.num, &self.den * &other.den)
    }
}

impl std::ops::Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, other: Self) -> RatFunc {
        assert!(!other.is_zero(), "division by zero rational function");
        RatFunc::new(&self.num * &other.den, &self.den * &other.num)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn rf(n: &[i64], d: &[i64]) -> RatFunc {
        RatFunc::new(UniPoly::from_i64_coeffs(n), UniPoly::from_i64_coeffs(d))
    }

    #[test]
    fn canonical_form() {
        // (x^2-1)/(2x-2) = (x+1)/2
        let r = rf(&[-1, 0, 1], &[-2, 2]);
        assert_eq!(r.num(), &UniPoly::from_i64_coeffs(&[1, 1]).scale(&crate::rational::ratio(1, 2)));
        assert!(r.den().is_one());
    }

    #[test]
    fn arithmetic_and_eval() {
        let a = rf(&[1], &[0, 1]); // 1/x
        let b = rf(&[0, 1], &[1]); // x
        let s = &a + &b; // (1+x^2)/x
        assert_eq!(s.eval(&rat(2)), Some(crate::rational::ratio(5, 2)));
        assert_eq!(s.eval(&rat(0)), None);
        assert_eq!(&(&s - &b), &a);
    }

    #[test]
    fn shifts() {
        let r = rf(&[0, 1], &[1, 1]); // x/(x+1)
        let s = r.shift(1); // (x+1)/(x+2)
        assert_eq!(s, rf(&[1, 1], &[2, 1]));
    }
}
