//! Canonical hypergeometric terms.
//!
//! A term is `theta^n * r(n) * prod_i ((n+zeta_i)^[n])^{k_i}` where
//! `(n+zeta)^[n] = (1+zeta)(2+zeta)...(n+zeta)` is the falling-factorial
//! building block (`n!` is the `zeta = 0` case). Canonical form keeps the
//! zeta values as class representatives in `[0, 1)`, pairwise differing by a
//! non-integer, which makes factor-exponent vectors a complete similarity
//! invariant: two terms differ by a rational-function factor exactly when
//! theta and the exponent vectors agree.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use crate::rational::{pow_i64, rat, Rational};
use crate::ratfunc::RatFunc;
use crate::unipoly::UniPoly;

/// `(1+zeta)(2+zeta)...(n+zeta)`, the empty product for `n = 0`.
pub fn falling_factorial(zeta: &Rational, n: i64) -> Rational {
    assert!(n >= 0, "falling factorial at negative index");
    let mut acc = Rational::one();
    for w in 1..=n {
        acc *= rat(w) + zeta;
    }
    acc
}

/// One factor `((n+zeta)^[n])^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorialFactor {
    pub zeta: Rational,
    pub exponent: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypergeometricTerm {
    pub theta: Rational,
    pub rat: RatFunc,
    pub factors: Vec<FactorialFactor>,
}

impl HypergeometricTerm {
    pub fn new(theta: Rational, rat: RatFunc, mut factors: Vec<FactorialFactor>) -> Self {
        assert!(!theta.is_zero(), "zero exponential base");
        assert!(!rat.is_zero(), "zero rational part");
        factors.retain(|f| f.exponent != 0);
        factors.sort_by(|a, b| a.zeta.cmp(&b.zeta));
        HypergeometricTerm { theta, rat, factors }
    }

    pub fn constant_one() -> Self {
        HypergeometricTerm::new(Rational::one(), RatFunc::one(), Vec::new())
    }

    /// Shift quotient `h(n+1)/h(n)` as a rational function of `n`.
    pub fn quotient(&self) -> RatFunc {
        let mut q = &RatFunc::constant(self.theta.clone())
            * &(&self.rat.shift(1) / &self.rat);
        for f in &self.factors {
            // (n+1+zeta) to the exponent
            let lin = RatFunc::from_poly(UniPoly::from_coeffs(vec![
                &f.zeta + &rat(1),
                Rational::one(),
            ]));
            let e = f.exponent;
            let p = if e > 0 { lin } else { lin.recip() };
            for _ in 0..e.unsigned_abs() {
                q = &q * &p;
            }
        }
        q
    }

    /// Exact value at `n >= 0`; `None` on a pole.
    pub fn eval(&self, n: i64) -> Option<Rational> {
        let mut acc = pow_i64(&self.theta, n);
        acc *= self.rat.eval(&rat(n))?;
        let mut zero_seen = false;
        for f in &self.factors {
            let ff = falling_factorial(&f.zeta, n);
            if ff.is_zero() {
                if f.exponent < 0 {
                    return None;
                }
                zero_seen = true;
            } else {
                acc *= pow_i64(&ff, f.exponent);
            }
        }
        if zero_seen {
            return Some(Rational::zero());
        }
        Some(acc)
    }

    /// First index from which evaluation is defined and nonzero.
    pub fn validity_offset(&self) -> i64 {
        let mut n0 = 0;
        if let Some(p) = self.rat.max_integer_pole() {
            n0 = n0.max(p + 1);
        }
        n0
    }

    /// Deterministic ordering: by theta, then factor signature, then the
    /// rational part's coefficients.
    pub fn cmp_canonical(&self, other: &Self) -> Ordering {
        self.theta
            .cmp(&other.theta)
            .then_with(|| {
                let fa: Vec<_> = self.factors.iter().map(|f| (f.zeta.clone(), f.exponent)).collect();
                let fb: Vec<_> = other.factors.iter().map(|f| (f.zeta.clone(), f.exponent)).collect();
                fa.cmp(&fb)
            })
            .then_with(|| {
                let ka: Vec<Rational> = self
                    .rat
                    .num()
                    .coeffs()
                    .iter()
                    .chain(self.rat.den().coeffs())
                    .cloned()
                    .collect();
                let kb: Vec<Rational> = other
                    .rat
                    .num()
                    .coeffs()
                    .iter()
                    .chain(other.rat.den().coeffs())
                    .cloned()
                    .collect();
                ka.cmp(&kb)
            })
    }

    pub fn to_string_with(&self, var: &str) -> String {
        let mut parts = Vec::new();
        if !self.theta.is_one() {
            parts.push(format!(
                "({})^{}",
                crate::rational::display_rational(&self.theta),
                var
            ));
        }
        if !self.rat.is_one() {
            parts.push(self.rat.to_string_with(var));
        }
        for f in &self.factors {
            let base = if f.zeta.is_zero() {
                format!("{}!", var)
            } else {
                format!(
                    "({}+{})^[{}]",
                    var,
                    crate::rational::display_rational(&f.zeta),
                    var
                )
            };
            if f.exponent == 1 {
                parts.push(base);
            } else {
                parts.push(format!("{}^{}", base, f.exponent));
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Gosper-Petkovsek representation `r = z * (a/b) * (c(x+1)/c(x))` with
/// `a, b, c` monic and `gcd(a(x), b(x+j)) = 1` for every integer `j >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GpForm {
    pub z: Rational,
    pub a: UniPoly,
    pub b: UniPoly,
    pub c: UniPoly,
}

impl GpForm {
    /// Re-assemble `z (a/b) (c(x+1)/c(x))` (round-trip check).
    pub fn expand(&self) -> RatFunc {
        let ab = RatFunc::new(self.a.clone(), self.b.clone());
        let cc = RatFunc::new(self.c.shift(1), self.c.clone());
        &(&RatFunc::constant(self.z.clone()) * &ab) * &cc
    }
}

pub fn gp_normal_form(r: &RatFunc) -> GpForm {
    assert!(!r.is_zero(), "normal form of zero");
    let z = r.num().leading_coeff() / r.den().leading_coeff();
    let mut a = r.num().monic();
    let mut b = r.den().monic();
    let mut c = UniPoly::one();
    loop {
        let mut changed = false;
        for j in crate::unipoly::shift_couplings(&a, &b) {
            if j < 0 {
                continue;
            }
            let s = a.gcd(&b.shift(j));
            if s.is_constant() {
                continue;
            }
            a = a.try_div(&s).unwrap();
            b = b.try_div(&s.shift(-j)).unwrap();
            for i in 1..=j {
                c = &c * &s.shift(-i);
            }
            changed = true;
        }
        if !changed {
            break;
        }
    }
    GpForm { z, a, b, c }
}

/// Rebuild the canonical term with a given shift quotient, up to a constant
/// multiple. `None` when the quotient needs irrational factorial data (the
/// leftover numerator or denominator has no rational roots and does not
/// telescope).
pub fn quotient_to_term(q: &RatFunc) -> Option<HypergeometricTerm> {
    let gp = gp_normal_form(q);
    let mut rat_part = RatFunc::from_poly(gp.c.clone());
    let mut a = gp.a.clone();
    let mut b = gp.b.clone();

    // couplings at negative shifts telescope into the rational part:
    // a ~ s(x-t), b ~ s(x) contribute s(x-t)/s(x) = u(x+1)/u(x) with
    // u = 1/(s(x-t)...s(x-1))
    loop {
        let mut changed = false;
        for t in crate::unipoly::shift_couplings(&b, &a) {
            if t < 1 {
                continue;
            }
            let s = a.shift(t).gcd(&b);
            if s.is_constant() {
                continue;
            }
            a = a.try_div(&s.shift(-t)).unwrap();
            b = b.try_div(&s).unwrap();
            let mut u_den = UniPoly::one();
            for i in 1..=t {
                u_den = &u_den * &s.shift(-i);
            }
            rat_part = &rat_part * &RatFunc::new(UniPoly::one(), u_den);
            changed = true;
        }
        if !changed {
            break;
        }
    }

    let sa = a.linear_factor_split();
    let sb = b.linear_factor_split();
    if !sa.residual.is_one() || !sb.residual.is_one() {
        return None;
    }

    let mut raw: Vec<(Rational, i64)> = Vec::new();
    for (zeta, m) in &sa.factors {
        // factor (x + eta) of the quotient stands for zeta = eta - 1
        raw.push((zeta - &rat(1), *m as i64));
    }
    for (zeta, m) in &sb.factors {
        raw.push((zeta - &rat(1), -(*m as i64)));
    }

    let mut factors: Vec<FactorialFactor> = Vec::new();
    for (zeta_raw, k) in raw {
        let shift = zeta_raw.floor();
        let rep = &zeta_raw - &shift;
        let s = crate::rational::to_i64(&shift).expect("floor fits i64");
        if s != 0 {
            // replace the quotient factor (x+1+zeta_raw) by (x+1+rep) times
            // u(x+1)/u(x); only the shape matters here, constants are free
            let u = shift_adjust_poly(&rep, s);
            let adj = if s > 0 {
                RatFunc::from_poly(u)
            } else {
                RatFunc::new(UniPoly::one(), u)
            };
            for _ in 0..k.unsigned_abs() {
                rat_part = if k > 0 {
                    &rat_part * &adj
                } else {
                    &rat_part / &adj
                };
            }
        }
        if let Some(f) = factors.iter_mut().find(|f| f.zeta == rep) {
            f.exponent += k;
        } else {
            factors.push(FactorialFactor {
                zeta: rep,
                exponent: k,
            });
        }
    }
    factors.retain(|f| f.exponent != 0);

    Some(HypergeometricTerm::new(gp.z.clone(), rat_part, factors))
}

/// `u` with `FF(rep+s, n)` proportional to `u(n) * FF(rep, n)` for `s > 0`
/// (`u = (x+rep+1)...(x+rep+s)`), or `1/u(n) * FF(rep, n)` for `s < 0`
/// (`u = (x+rep+s+1)...(x+rep)`).
fn shift_adjust_poly(rep: &Rational, s: i64) -> UniPoly {
    let mut u = UniPoly::one();
    let range = if s > 0 { 1..=s } else { (s + 1)..=0 };
    for i in range {
        u = &u * &UniPoly::from_coeffs(vec![rep + &rat(i), Rational::one()]);
    }
    u
}

/// Rewrite factorial factors onto class representatives in `[0, 1)`:
/// `prod FF(zeta_i)^{k_i} = correction(n) * prod FF(rep_i)^{k_i}` as
/// sequences from the offset on. The correction carries the exact constant;
/// it degenerates to zero exactly when some `zeta` is a negative integer
/// with positive exponent (the product is then eventually zero).
pub fn normalize_factorials(factors: &[FactorialFactor]) -> (Vec<FactorialFactor>, RatFunc) {
    let mut correction = RatFunc::one();
    let mut out: Vec<FactorialFactor> = Vec::new();
    for f in factors {
        let shift = f.zeta.floor();
        let rep = &f.zeta - &shift;
        let s = crate::rational::to_i64(&shift).expect("floor fits i64");
        if s != 0 {
            let u = shift_adjust_poly(&rep, s);
            let piece = if s > 0 {
                // FF(rep+s, n) = u(n)/FF(rep, s) * FF(rep, n)
                let c = falling_factorial(&rep, s);
                RatFunc::from_poly(u.scale(&c.recip()))
            } else {
                // FF(rep+s, n) = C0 / u(n) * FF(rep, n),
                // C0 = (1+s+rep)(2+s+rep)...(0+rep)
                let mut c0 = Rational::one();
                for w in (1 + s)..=0 {
                    c0 *= rat(w) + &rep;
                }
                RatFunc::new(UniPoly::constant(c0), u)
            };
            let mut pw = RatFunc::one();
            for _ in 0..f.exponent.unsigned_abs() {
                pw = &pw * &piece;
            }
            if f.exponent < 0 {
                assert!(!pw.is_zero(), "negative power of eventually-zero factor");
                pw = pw.recip();
            }
            correction = &correction * &pw;
        }
        if correction.is_zero() {
            return (Vec::new(), RatFunc::zero());
        }
        if let Some(g) = out.iter_mut().find(|g| g.zeta == rep) {
            g.exponent += f.exponent;
        } else {
            out.push(FactorialFactor {
                zeta: rep,
                exponent: f.exponent,
            });
        }
    }
    out.retain(|f| f.exponent != 0);
    out.sort_by(|a, b| a.zeta.cmp(&b.zeta));
    (out, correction)
}

/// Similarity test per the canonical-form characterization: terms are
/// similar iff theta and the factor exponent vectors agree; the witness is
/// `r` with `h1(n) = r(n) h2(n)`.
pub fn hg_similar(h1: &HypergeometricTerm, h2: &HypergeometricTerm) -> Option<RatFunc> {
    if h1.theta != h2.theta {
        return None;
    }
    let fa: Vec<_> = h1.factors.iter().map(|f| (&f.zeta, f.exponent)).collect();
    let fb: Vec<_> = h2.factors.iter().map(|f| (&f.zeta, f.exponent)).collect();
    if fa != fb {
        return None;
    }
    Some(&h1.rat / &h2.rat)
}
