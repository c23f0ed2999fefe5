//! Exact scalar arithmetic over Q.
//!
//! `Rational` is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator (the representation `num_rational::BigRational`
//! maintains both invariants). This module adds the small amount of integer
//! number theory the rest of the crate needs: signed integer powers, parsing,
//! and exact factorization of the integers that show up in trailing
//! coefficients and exponential bases.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for the fraction `n/d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"a"` or `"a/b"` with optional leading minus.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Rational::from_integer(n))
        }
    }
}

/// `base^exp` for signed `exp`; `exp < 0` requires a nonzero base.
pub fn pow_i64(base: &Rational, exp: i64) -> Rational {
    if exp == 0 {
        return Rational::one();
    }
    let e = i32::try_from(exp.unsigned_abs()).expect("exponent out of range");
    let p = base.pow(e);
    if exp > 0 {
        p
    } else {
        assert!(!base.is_zero(), "zero base with negative exponent");
        p.recip()
    }
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn to_i64(r: &Rational) -> Option<i64> {
    if is_integer(r) {
        r.numer().to_i64()
    } else {
        None
    }
}

/// Render as `a` or `a/b`.
pub fn display_rational(r: &Rational) -> String {
    if is_integer(r) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// ---- integer factorization ----
//
// Trailing/leading coefficients and exponential bases at desk scale are
// small, but the factorizer stays exact on anything: trial division up to
// 2^20, then Miller-Rabin plus Pollard-Brent rho on the leftover.

/// Prime factorization of `n > 0` as sorted `(prime, exponent)` pairs.
pub fn factorize(n: &BigUint) -> Vec<(BigUint, u32)> {
    assert!(!n.is_zero(), "factorize: zero input");
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut rest = n.clone();
    let one = BigUint::one();
    if rest == one {
        return out;
    }
    let push = |p: BigUint, k: u32, out: &mut Vec<(BigUint, u32)>| {
        if let Some(e) = out.iter_mut().find(|(q, _)| *q == p) {
            e.1 += k;
        } else {
            out.push((p, k));
        }
    };
    let mut d = 2u64;
    while d < (1 << 20) {
        let bd = BigUint::from(d);
        if &bd * &bd > rest {
            break;
        }
        let mut k = 0;
        while (&rest % &bd).is_zero() {
            rest /= &bd;
            k += 1;
        }
        if k > 0 {
            push(bd, k, &mut out);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > one {
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if is_prime(&m) {
                push(m, 1, &mut out);
            } else {
                let f = pollard_rho(&m);
                stack.push(&m / &f);
                stack.push(f);
            }
        }
    }
    out.sort();
    out
}

/// Sorted positive divisors of `n > 0`.
pub fn divisors(n: &BigUint) -> Vec<BigUint> {
    let facs = factorize(n);
    let mut out = vec![BigUint::one()];
    for (p, k) in facs {
        let mut next = Vec::with_capacity(out.len() * (k as usize + 1));
        let mut pw = BigUint::one();
        for _ in 0..=k {
            for d in &out {
                next.push(d * &pw);
            }
            pw *= &p;
        }
        out = next;
    }
    out.sort();
    out
}

/// Miller-Rabin with a deterministic witness set for anything a desk-scale
/// coefficient will hold (correct below 3.3e24, overwhelmingly likely above).
pub fn is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let bp = BigUint::from(p);
        if *n == bp {
            return true;
        }
        if (n % &bp).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - BigUint::one();
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard-Brent rho; returns a nontrivial factor of composite `n`.
fn pollard_rho(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if (n % &two).is_zero() {
        return two;
    }
    let mut c = 1u64;
    loop {
        let mut x = BigUint::from(2u64);
        let mut y = x.clone();
        let mut d = one.clone();
        let cc = BigUint::from(c);
        let step = |v: &BigUint| (v * v + &cc) % n;
        while d.is_one() {
            x = step(&x);
            y = step(&step(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
        }
        if !d.is_one() && d != *n {
            return d;
        }
        c += 1;
    }
}

/// Prime support of a nonzero rational: `r = sign * prod p_i^{e_i}` with
/// `e_i` in Z. Returns (sign, sorted factor list).
pub fn rational_prime_factors(r: &Rational) -> (i8, Vec<(BigUint, i64)>) {
    assert!(!r.is_zero());
    let sign = if r.is_negative() { -1 } else { 1 };
    let (_, num) = r.numer().clone().into_parts();
    let (_, den) = r.denom().clone().into_parts();
    let mut map: Vec<(BigUint, i64)> = factorize(&num)
        .into_iter()
        .map(|(p, k)| (p, k as i64))
        .collect();
    for (p, k) in factorize(&den) {
        if let Some(e) = map.iter_mut().find(|(q, _)| *q == p) {
            e.1 -= k as i64;
        } else {
            map.push((p, -(k as i64)));
        }
    }
    map.retain(|(_, k)| *k != 0);
    map.sort();
    (sign, map)
}

/// Integer content of a set of rationals: gcd of numerators over lcm of
/// denominators, sign-normalized positive. Zero for an all-zero set.
pub fn rational_content<'a>(vals: impl Iterator<Item = &'a Rational>) -> Rational {
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for v in vals {
        num_gcd = num_gcd.gcd(v.numer());
        den_lcm = den_lcm.lcm(v.denom());
    }
    if num_gcd.is_zero() {
        Rational::zero()
    } else {
        Rational::new(num_gcd, den_lcm)
    }
}

pub fn bigint_from_sign(sign: i8) -> BigInt {
    BigInt::from_biguint(if sign < 0 { Sign::Minus } else { Sign::Plus }, BigUint::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_display() {
        assert_eq!(parse_rational("3/2"), Some(ratio(3, 2)));
        assert_eq!(parse_rational("-7"), Some(rat(-7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(display_rational(&ratio(-3, 2)), "-3/2");
        assert_eq!(display_rational(&rat(4)), "4");
    }

    #[test]
    fn factorize_small() {
        let f = factorize(&BigUint::from(360u32));
        assert_eq!(
            f,
            vec![
                (BigUint::from(2u32), 3),
                (BigUint::from(3u32), 2),
                (BigUint::from(5u32), 1)
            ]
        );
        assert_eq!(divisors(&BigUint::from(12u32)).len(), 6);
    }

    #[test]
    fn factorize_semiprime() {
        // 1000003 * 1000033 exceeds the trial-division bound squared
        let n = BigUint::from(1000003u64) * BigUint::from(1000033u64);
        let f = factorize(&n);
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].0, BigUint::from(1000003u64));
    }

    #[test]
    fn signed_powers() {
        assert_eq!(pow_i64(&ratio(2, 3), -2), ratio(9, 4));
        assert_eq!(pow_i64(&rat(5), 0), rat(1));
    }

    #[test]
    fn prime_factors_of_rational() {
        let (s, f) = rational_prime_factors(&ratio(-4, 9));
        assert_eq!(s, -1);
        assert_eq!(f, vec![(BigUint::from(2u32), 2), (BigUint::from(3u32), -2)]);
    }

    proptest! {
        #[test]
        fn field_axioms(an in -50i64..50, ad in 1i64..30,
                        bn in -50i64..50, bd in 1i64..30,
                        cn in -50i64..50, cd in 1i64..30) {
            let a = ratio(an, ad);
            let b = ratio(bn, bd);
            let c = ratio(cn, cd);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.recip(), rat(1));
            }
            prop_assert_eq!(&a - &a, rat(0));
        }
    }
}
