//! The skew polynomial ring K(x)[S; sigma, 0] of recurrence operators.
//!
//! `S` is the forward shift, multiplication obeys `S a = sigma(a) S` with
//! `sigma(r)(x) = r(x+1)`. The ring is right Euclidean, which gives greatest
//! common right divisors and least common left multiples; the latter is
//! computed by a linear-system ansatz over K(x), adequate at the operator
//! orders that loop recurrences produce.

use num_traits::Zero;

use crate::rational::{rat, Rational};
use crate::ratfunc::RatFunc;
use crate::unipoly::UniPoly;

/// Operator `sum_i coeffs[i] S^i`; empty coefficient list is the zero
/// operator. Canonical annihilators are monic (leading coefficient 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OreOperator {
    coeffs: Vec<RatFunc>,
}

impl OreOperator {
    pub fn zero() -> Self {
        OreOperator { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        OreOperator {
            coeffs: vec![RatFunc::one()],
        }
    }

    /// The shift operator `S`.
    pub fn s() -> Self {
        OreOperator::from_coeffs(vec![RatFunc::zero(), RatFunc::one()])
    }

    /// The difference operator `Delta = S - 1`.
    pub fn delta() -> Self {
        OreOperator::from_coeffs(vec![RatFunc::constant(rat(-1)), RatFunc::one()])
    }

    /// First-order operator `S - r`.
    pub fn shift_minus(r: RatFunc) -> Self {
        OreOperator::from_coeffs(vec![-&r, RatFunc::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<RatFunc>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        OreOperator { coeffs }
    }

    pub fn constant(r: RatFunc) -> Self {
        OreOperator::from_coeffs(vec![r])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in `S`; zero operator reports `None`.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn ord(&self) -> usize {
        self.order().expect("order of zero operator")
    }

    pub fn coeff(&self, i: usize) -> RatFunc {
        self.coeffs.get(i).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> RatFunc {
        self.coeffs.last().cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().is_one()
    }

    /// Divide from the left by the leading coefficient.
    pub fn monic(&self) -> Self {
        assert!(!self.is_zero());
        let lc = self.leading_coeff();
        OreOperator {
            coeffs: self.coeffs.iter().map(|c| c / &lc).collect(),
        }
    }

    pub fn has_constant_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_constant())
    }

    /// Left-multiply by `c S^k`.
    fn mul_monomial(&self, c: &RatFunc, k: usize) -> Self {
        if c.is_zero() || self.is_zero() {
            return OreOperator::zero();
        }
        let mut coeffs = vec![RatFunc::zero(); self.coeffs.len() + k];
        for (i, a) in self.coeffs.iter().enumerate() {
            coeffs[i + k] = c * &a.shift(k as i64);
        }
        OreOperator::from_coeffs(coeffs)
    }

    /// Left scalar `c` such that `c * self` has primitive integer
    /// polynomial coefficients. Left-scaling preserves right divisibility,
    /// so Euclidean sequences can be renormalized freely.
    fn left_normalizer(&self) -> RatFunc {
        if self.is_zero() {
            return RatFunc::one();
        }
        let mut l = UniPoly::one();
        for c in &self.coeffs {
            l = l.lcm(c.den());
        }
        let scaled: Vec<UniPoly> = self
            .coeffs
            .iter()
            .map(|c| c.num() * &l.try_div(c.den()).unwrap())
            .collect();
        let content =
            crate::rational::rational_content(scaled.iter().flat_map(|p| p.coeffs().iter()));
        RatFunc::from_poly(l.scale(&content.recip()))
    }

    /// Coefficient-wise left multiplication by a rational function.
    fn scale_left(&self, c: &RatFunc) -> OreOperator {
        OreOperator::from_coeffs(self.coeffs.iter().map(|a| c * a).collect())
    }

    /// Right Euclidean division: `self = q * d + r` with `ord(r) < ord(d)`.
    pub fn right_divmod(&self, d: &OreOperator) -> (OreOperator, OreOperator) {
        assert!(!d.is_zero(), "division by zero operator");
        let mut r = self.clone();
        let mut q = OreOperator::zero();
        let dd = d.ord();
        while !r.is_zero() && r.ord() >= dd {
            let k = r.ord() - dd;
            let c = &r.leading_coeff() / &d.leading_coeff().shift(k as i64);
            let qk = OreOperator::from_coeffs({
                let mut v = vec![RatFunc::zero(); k + 1];
                v[k] = c;
                v
            });
            r = &r - &(&qk * d);
            q = &q + &qk;
        }
        (q, r)
    }

    /// Monic greatest common right divisor.
    pub fn gcrd(&self, other: &OreOperator) -> OreOperator {
        assert!(!(self.is_zero() && other.is_zero()), "gcrd of two zeros");
        let mut a = self.scale_left(&self.left_normalizer());
        let mut b = other.scale_left(&other.left_normalizer());
        while !b.is_zero() {
            let (_, r) = a.right_divmod(&b);
            let r = r.scale_left(&r.left_normalizer());
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Monic least common left multiple of two nonzero operators, via the
    /// extended right Euclidean scheme: track the cofactor `u_i` in
    /// `r_i = u_i a + v_i b`; the cofactor of the zero remainder gives
    /// `u a = -v b`, the least common left multiple.
    pub fn lclm(&self, other: &OreOperator) -> OreOperator {
        assert!(!self.is_zero() && !other.is_zero(), "lclm with zero");
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut u0 = OreOperator::one();
        let mut u1 = OreOperator::zero();
        while !r1.is_zero() {
            let (q, r) = r0.right_divmod(&r1);
            let u2 = &u0 - &(&q * &u1);
            // renormalize remainder and cofactor by the same left scalar so
            // the invariant r_i = u_i a + v_i b survives
            let c = if r.is_zero() {
                u2.left_normalizer()
            } else {
                r.left_normalizer()
            };
            r0 = r1;
            r1 = r.scale_left(&c);
            u0 = u1;
            u1 = u2.scale_left(&c);
        }
        let m = &u1 * self;
        assert!(!m.is_zero(), "cofactor of the zero remainder is nonzero");
        m.monic()
    }

    /// Apply the operator to a sequence at index `n`:
    /// `sum_i l_i(n) t(n+i)`. `None` at a coefficient pole.
    pub fn apply_at(&self, t: &dyn Fn(i64) -> Rational, n: i64) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            let v = c.eval(&rat(n))?;
            if !v.is_zero() {
                acc += v * t(n + i as i64);
            }
        }
        Some(acc)
    }

    /// True when the operator sends the sequence to zero on the whole range.
    pub fn annihilates(&self, t: &dyn Fn(i64) -> Rational, from: i64, to: i64) -> bool {
        (from..=to).all(|n| self.apply_at(t, n).map_or(false, |v| v.is_zero()))
    }

    /// Clear denominators: the operator scaled from the left by the lcm of
    /// all coefficient denominators, as primitive integer polynomials.
    pub fn polynomial_coeffs(&self) -> Vec<UniPoly> {
        let mut l = UniPoly::one();
        for c in &self.coeffs {
            l = l.lcm(c.den());
        }
        let scaled: Vec<UniPoly> = self
            .coeffs
            .iter()
            .map(|c| c.num() * &l.try_div(c.den()).unwrap())
            .collect();
        // normalize by shared rational content for reproducibility
        let content = crate::rational::rational_content(
            scaled.iter().flat_map(|p| p.coeffs().iter()),
        );
        if content.is_zero() {
            return scaled;
        }
        scaled.iter().map(|p| p.scale(&content.recip())).collect()
    }

    /// First index from which all coefficients are pole-free and the leading
    /// coefficient stays nonzero.
    pub fn validity_offset(&self) -> i64 {
        let mut n0 = 0i64;
        for c in &self.coeffs {
            if let Some(p) = c.den().max_integer_root() {
                n0 = n0.max(p + 1);
            }
        }
        if let Some(p) = self.leading_coeff().num().max_integer_root() {
            n0 = n0.max(p + 1);
        }
        n0
    }

    pub fn to_string_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let s = match i {
                0 => c.to_string_with(var),
                _ => {
                    let pw = if i == 1 { "S".into() } else { format!("S^{}", i) };
                    if c.is_one() {
                        pw
                    } else {
                        format!("({})*{}", c.to_string_with(var), pw)
                    }
                }
            };
            parts.push(s);
        }
        parts.join(" + ")
    }
}

impl std::ops::Add for &OreOperator {
    type Output = OreOperator;
    fn add(self, other: Self) -> OreOperator {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect();
        OreOperator::from_coeffs(coeffs)
    }
}

impl std::ops::Sub for &OreOperator {
    type Output = OreOperator;
    fn sub(self, other: Self) -> OreOperator {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect();
        OreOperator::from_coeffs(coeffs)
    }
}

impl std::ops::Mul for &OreOperator {
    type Output = OreOperator;
    fn mul(self, other: Self) -> OreOperator {
        let mut acc = OreOperator::zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            if !a.is_zero() {
                acc = &acc + &other.mul_monomial(a, i);
            }
        }
        acc
    }
}
