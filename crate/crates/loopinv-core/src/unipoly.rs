//! Dense univariate polynomials over Q.
//!
//! The variable is contextual (the loop counter almost everywhere); only the
//! coefficient vector is stored, highest index nonzero. Root finding is
//! restricted to rational roots: the rational-root theorem is complete for
//! the class this crate targets, and anything irreducible beyond linear
//! factors is carried around as an opaque residual.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::{rat, rational_content, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    /// `coeffs[i]` multiplies `x^i`; empty means the zero polynomial.
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        UniPoly::from_coeffs(vec![c])
    }

    /// The monomial `c * x^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        UniPoly::from_coeffs(coeffs)
    }

    pub fn var() -> Self {
        UniPoly::monomial(Rational::one(), 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64_coeffs(coeffs: &[i64]) -> Self {
        UniPoly::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    /// Monic product of `(x - r)` over the given roots.
    pub fn from_roots(roots: &[Rational]) -> Self {
        let mut p = UniPoly::one();
        for r in roots {
            p = &p * &UniPoly::from_coeffs(vec![-r.clone(), Rational::one()]);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().expect("degree of zero polynomial")
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return UniPoly::zero();
        }
        self.scale(&self.leading_coeff().recip())
    }

    /// `p(x + k)` for integer `k`.
    pub fn shift(&self, k: i64) -> Self {
        self.compose_x_plus(&rat(k))
    }

    /// `p(x + a)`.
    pub fn compose_x_plus(&self, a: &Rational) -> Self {
        // Horner on p with x replaced by (x + a)
        let mut acc = UniPoly::zero();
        let xa = UniPoly::from_coeffs(vec![a.clone(), Rational::one()]);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &xa) + &UniPoly::constant(c.clone());
        }
        acc
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = UniPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division; panics on zero divisor.
    pub fn divmod(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.deg();
        let lc = d.leading_coeff();
        let mut rem = self.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while !rem.is_zero() && rem.deg() >= dd {
            let k = rem.deg() - dd;
            let c = rem.leading_coeff() / lc.clone();
            for i in 0..=dd {
                let v = rem.coeff(k + i) - &c * &d.coeff(i);
                rem.coeffs[k + i] = v;
            }
            while rem.coeffs.last().map_or(false, |c| c.is_zero()) {
                rem.coeffs.pop();
            }
            quot[k] = c;
        }
        (UniPoly::from_coeffs(quot), rem)
    }

    /// Exact division; `None` when the remainder is nonzero.
    pub fn try_div(&self, d: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.divmod(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd via the primitive remainder sequence (integer
    /// pseudo-division with content stripping keeps coefficients small).
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        assert!(
            !(self.is_zero() && other.is_zero()),
            "gcd of two zero polynomials"
        );
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        let mut a = self.primitive();
        let mut b = other.primitive();
        if a.deg() < b.deg() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.is_constant() {
                return UniPoly::one();
            }
            let r = a.pseudo_rem(&b).primitive();
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Pseudo-remainder: the remainder of `lc(d)^(deg a - deg d + 1) * a`
    /// under division by `d` (integral whenever the inputs are).
    fn pseudo_rem(&self, d: &UniPoly) -> UniPoly {
        let scale = crate::rational::pow_i64(
            &d.leading_coeff(),
            (self.deg() - d.deg() + 1) as i64,
        );
        let (_, r) = self.scale(&scale).divmod(d);
        r
    }

    pub fn lcm(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let g = self.gcd(other);
        (&(self * other)).try_div(&g).unwrap().monic()
    }

    /// Scale to integer coefficients with content 1 and positive lead.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let mut c = rational_content(self.coeffs.iter());
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// Resultant of two nonzero polynomials (0 when they share a root).
    pub fn resultant(&self, other: &UniPoly) -> Rational {
        fn go(a: &UniPoly, b: &UniPoly) -> Rational {
            let m = a.deg();
            if b.is_constant() {
                return crate::rational::pow_i64(&b.coeff(0), m as i64);
            }
            let n = b.deg();
            let (_, r) = a.divmod(b);
            if r.is_zero() {
                return Rational::zero();
            }
            let sign = if (m * n) % 2 == 1 { rat(-1) } else { rat(1) };
            let lead_pow =
                crate::rational::pow_i64(&b.leading_coeff(), (m - r.deg()) as i64);
            sign * lead_pow * go(b, &r)
        }
        assert!(!self.is_zero() && !other.is_zero(), "resultant of zero");
        if self.is_constant() {
            return crate::rational::pow_i64(&self.coeff(0), other.deg() as i64);
        }
        go(self, other)
    }

    /// All rational roots with multiplicity, complete by the rational-root
    /// theorem. Requires a nonzero polynomial.
    pub fn rational_roots(&self) -> Vec<(Rational, u32)> {
        assert!(!self.is_zero(), "roots of zero polynomial");
        let mut out: Vec<(Rational, u32)> = Vec::new();
        let mut p = self.clone();

        // root 0 from trailing zero coefficients
        let mut zero_mult = 0;
        while !p.is_constant() && p.coeff(0).is_zero() {
            p = p.try_div(&UniPoly::var()).unwrap();
            zero_mult += 1;
        }
        if zero_mult > 0 {
            out.push((Rational::zero(), zero_mult));
        }
        if p.is_constant() {
            out.sort_by(|a, b| a.0.cmp(&b.0));
            return out;
        }

        let prim = p.primitive();
        let a0: BigInt = prim.coeff(0).numer().clone();
        let ad: BigInt = prim.leading_coeff().numer().clone();
        let (_, a0u) = a0.abs().into_parts();
        let (_, adu) = ad.abs().into_parts();
        let nums = crate::rational::divisors(&a0u);
        let dens = crate::rational::divisors(&adu);
        let mut candidates: Vec<Rational> = Vec::new();
        for nn in &nums {
            for dd in &dens {
                let c = Rational::new(BigInt::from(nn.clone()), BigInt::from(dd.clone()));
                if !candidates.contains(&c) {
                    candidates.push(c.clone());
                }
                let c = -c;
                if !candidates.contains(&c) {
                    candidates.push(c);
                }
            }
        }
        for cand in candidates {
            let mut mult = 0;
            while !p.is_constant() && p.eval(&cand).is_zero() {
                let lin = UniPoly::from_coeffs(vec![-cand.clone(), Rational::one()]);
                p = p.try_div(&lin).unwrap();
                mult += 1;
            }
            if mult > 0 {
                out.push((cand, mult));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Write `p = lead * prod (x + zeta_i)^{m_i} * residual` with the residual
    /// monic and free of rational roots. Note the `x + zeta` convention:
    /// a root `r` contributes `zeta = -r`.
    pub fn linear_factor_split(&self) -> LinearSplit {
        assert!(!self.is_zero());
        let lead = self.leading_coeff();
        let roots = self.rational_roots();
        let mut residual = self.monic();
        let mut factors = Vec::new();
        for (r, m) in roots {
            let lin = UniPoly::from_coeffs(vec![-r.clone(), Rational::one()]);
            for _ in 0..m {
                residual = residual.try_div(&lin).unwrap();
            }
            factors.push((-r, m));
        }
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        LinearSplit {
            lead,
            factors,
            residual,
        }
    }

    /// Largest integer root, if any (used for pole/validity offsets).
    pub fn max_integer_root(&self) -> Option<i64> {
        if self.is_zero() || self.is_constant() {
            return None;
        }
        self.rational_roots()
            .iter()
            .filter_map(|(r, _)| crate::rational::to_i64(r))
            .max()
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
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{}^{}", var, i),
            };
            let cs = crate::rational::display_rational(&c.abs());
            let body = if mono.is_empty() {
                cs
            } else if cs == "1" {
                mono
            } else {
                format!("{}*{}", cs, mono)
            };
            if parts.is_empty() {
                parts.push(if c.is_negative() {
                    format!("-{}", body)
                } else {
                    body
                });
            } else {
                parts.push(format!("{} {}", if c.is_negative() { "-" } else { "+" }, body));
            }
        }
        parts.join(" ")
    }
}

/// Result of [`UniPoly::linear_factor_split`].
#[derive(Debug, Clone)]
pub struct LinearSplit {
    pub lead: Rational,
    /// Sorted `(zeta, multiplicity)` pairs for factors `x + zeta`.
    pub factors: Vec<(Rational, u32)>,
    /// Monic, no rational roots (possibly 1).
    pub residual: UniPoly,
}

impl LinearSplit {
    /// Re-expand to the original polynomial (round-trip check).
    pub fn expand(&self) -> UniPoly {
        let mut p = UniPoly::constant(self.lead.clone());
        for (zeta, m) in &self.factors {
            let lin = UniPoly::from_coeffs(vec![zeta.clone(), Rational::one()]);
            p = &p * &lin.pow(*m);
        }
        &p * &self.residual
    }
}

impl std::ops::Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, other: Self) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) + other.coeff(i));
        }
        UniPoly::from_coeffs(coeffs)
    }
}

impl std::ops::Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, other: Self) -> UniPoly {
        self + &(-other)
    }
}

impl std::ops::Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl std::ops::Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, other: Self) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(coeffs)
    }
}

/// Lagrange interpolation through exact points (distinct abscissae).
pub fn interpolate(points: &[(Rational, Rational)]) -> UniPoly {
    let mut acc = UniPoly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = UniPoly::one();
        let mut denom = Rational::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = &basis * &UniPoly::from_coeffs(vec![-xj.clone(), Rational::one()]);
            denom *= xi - xj;
        }
        acc = &acc + &basis.scale(&(yi / &denom));
    }
    acc
}

/// Integer shifts `j` with `gcd(f(x), g(x+j)) != 1`, found through the
/// resultant `R(j) = res_x(f(x), g(x+j))` by evaluation and interpolation.
pub fn shift_couplings(f: &UniPoly, g: &UniPoly) -> Vec<i64> {
    if f.is_constant() || g.is_constant() {
        return Vec::new();
    }
    let d = f.deg() * g.deg();
    let points: Vec<(Rational, Rational)> = (0..=d as i64)
        .map(|j| (rat(j), f.resultant(&g.shift(j))))
        .collect();
    let r = interpolate(&points);
    if r.is_zero() {
        // cannot happen for nonzero f, g of positive degree
        return Vec::new();
    }
    let mut out: Vec<i64> = r
        .rational_roots()
        .iter()
        .filter_map(|(root, _)| crate::rational::to_i64(root))
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;

    fn p(coeffs: &[i64]) -> UniPoly {
        UniPoly::from_i64_coeffs(coeffs)
    }

    #[test]
    fn gcd_examples() {
        // gcd(x^2-1, x-1) = x-1
        assert_eq!(p(&[-1, 0, 1]).gcd(&p(&[-1, 1])), p(&[-1, 1]));
        // gcd(p, 0) = monic(p)
        assert_eq!(p(&[2, 4]).gcd(&UniPoly::zero()), p(&[1, 2]).monic());
        // gcd(x^2+3x+2, x^2+4x+3) = x+1
        assert_eq!(p(&[2, 3, 1]).gcd(&p(&[3, 4, 1])), p(&[1, 1]));
    }

    #[test]
    fn rational_roots_examples() {
        // x^2 - 5x + 6 -> {2, 3}
        assert_eq!(
            p(&[6, -5, 1]).rational_roots(),
            vec![(rat(2), 1), (rat(3), 1)]
        );
        // (x-1)^3 -> {1: 3}
        assert_eq!(p(&[-1, 3, -3, 1]).rational_roots(), vec![(rat(1), 3)]);
        // x^2 - 2 -> {}
        assert!(p(&[-2, 0, 1]).rational_roots().is_empty());
    }

    #[test]
    fn linear_split_examples() {
        // x^2+3x+2 = (x+1)(x+2)
        let s = p(&[2, 3, 1]).linear_factor_split();
        assert_eq!(s.factors, vec![(rat(1), 1), (rat(2), 1)]);
        assert!(s.residual.is_one());
        // x^2+1 irreducible
        let s = p(&[1, 0, 1]).linear_factor_split();
        assert!(s.factors.is_empty());
        assert_eq!(s.residual, p(&[1, 0, 1]));
        // 2x+1 = 2(x + 1/2)
        let s = p(&[1, 2]).linear_factor_split();
        assert_eq!(s.lead, rat(2));
        assert_eq!(s.factors, vec![(ratio(1, 2), 1)]);
        assert!(s.residual.is_one());
    }

    #[test]
    fn shift_and_eval() {
        let q = p(&[0, 0, 1]); // x^2
        assert_eq!(q.shift(1), p(&[1, 2, 1]));
        assert_eq!(q.eval(&rat(-3)), rat(9));
    }

    #[test]
    fn resultant_detects_shared_roots() {
        let a = p(&[-2, 1]); // x-2
        let b = p(&[-6, 5, -1]); // -(x-2)(x-3)
        assert!(a.resultant(&b).is_zero());
        let c = p(&[-5, 1]);
        assert!(!a.resultant(&c).is_zero());
    }

    #[test]
    fn shift_couplings_finds_distances() {
        // f = x+2, g = x: gcd(f(x), g(x+j)) != 1 iff j = 2
        assert_eq!(shift_couplings(&p(&[2, 1]), &p(&[0, 1])), vec![2]);
        // f = x(x+3), g = x: j in {0, 3}
        assert_eq!(shift_couplings(&p(&[0, 3, 1]), &p(&[0, 1])), vec![0, 3]);
    }

    #[test]
    fn interpolation_roundtrip() {
        let q = p(&[1, -4, 0, 2]);
        let pts: Vec<_> = (0..4).map(|i| (rat(i), q.eval(&rat(i)))).collect();
        assert_eq!(interpolate(&pts), q);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn divmod_roundtrip(a in proptest::collection::vec(-9i64..10, 0..7),
                            b in proptest::collection::vec(-9i64..10, 1..5)) {
            let pa = p(&a);
            let pb = p(&b);
            prop_assume!(!pb.is_zero());
            let (q, r) = pa.divmod(&pb);
            prop_assert_eq!(&(&q * &pb) + &r, pa);
            if !r.is_zero() {
                prop_assert!(r.deg() < pb.deg());
            }
        }

        #[test]
        fn split_roundtrip(a in proptest::collection::vec(-6i64..7, 1..6)) {
            let pa = p(&a);
            prop_assume!(!pa.is_zero());
            let s = pa.linear_factor_split();
            prop_assert_eq!(s.expand(), pa);
            prop_assert!(s.residual.is_constant() || s.residual.rational_roots().is_empty());
        }
    }
}
