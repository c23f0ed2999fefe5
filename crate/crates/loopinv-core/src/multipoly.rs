//! Sparse multivariate polynomials over Q.
//!
//! Each polynomial carries its own sorted variable list; binary operations
//! extend both operands to the union automatically. The exponent map holds no
//! zero coefficients and the zero polynomial is the empty map.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::rational::{display_rational, rational_content, Rational};
use crate::unipoly::UniPoly;
use crate::vars::VarId;

#[derive(Debug, Clone)]
pub struct MultiPoly {
    vars: Vec<VarId>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        // semantic equality: unused variables are irrelevant
        let a = self.compress();
        let b = other.compress();
        a.vars == b.vars && a.terms == b.terms
    }
}
impl Eq for MultiPoly {}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly {
            vars: Vec::new(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        MultiPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        MultiPoly {
            vars: Vec::new(),
            terms,
        }
    }

    pub fn var(v: &VarId) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], Rational::one());
        MultiPoly {
            vars: vec![v.clone()],
            terms,
        }
    }

    pub fn var_pow(v: &VarId, e: u32) -> Self {
        if e == 0 {
            return MultiPoly::one();
        }
        let mut terms = BTreeMap::new();
        terms.insert(vec![e], Rational::one());
        MultiPoly {
            vars: vec![v.clone()],
            terms,
        }
    }

    pub fn from_unipoly(p: &UniPoly, v: &VarId) -> Self {
        let mut acc = MultiPoly::zero();
        for (i, c) in p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &MultiPoly::var_pow(v, i as u32).scale(c);
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().iter().all(|&e| e == 0))
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return Some(self.terms.values().next().unwrap().clone());
        }
        None
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn var_index(&self, v: &VarId) -> Option<usize> {
        self.vars.iter().position(|w| w == v)
    }

    pub fn contains_var(&self, v: &VarId) -> bool {
        match self.var_index(v) {
            None => false,
            Some(i) => self.terms.keys().any(|m| m[i] > 0),
        }
    }

    pub fn degree_in(&self, v: &VarId) -> u32 {
        match self.var_index(v) {
            None => 0,
            Some(i) => self.terms.keys().map(|m| m[i]).max().unwrap_or(0),
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Drop variables that no term uses.
    pub fn compress(&self) -> Self {
        let used: Vec<usize> = (0..self.vars.len())
            .filter(|&i| self.terms.keys().any(|m| m[i] > 0))
            .collect();
        if used.len() == self.vars.len() {
            return self.clone();
        }
        let vars: Vec<VarId> = used.iter().map(|&i| self.vars[i].clone()).collect();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (used.iter().map(|&i| m[i]).collect(), c.clone()))
            .collect();
        MultiPoly { vars, terms }
    }

    /// Re-express over a variable list that must contain all used variables.
    pub fn embed(&self, vars: &[VarId]) -> Self {
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v))
            .collect();
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut exp = vec![0u32; vars.len()];
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    let j = map[i].expect("embed: variable missing from target list");
                    exp[j] = e;
                }
            }
            terms.insert(exp, c.clone());
        }
        MultiPoly {
            vars: vars.to_vec(),
            terms,
        }
    }

    fn unify(a: &MultiPoly, b: &MultiPoly) -> (MultiPoly, MultiPoly) {
        if a.vars == b.vars {
            return (a.clone(), b.clone());
        }
        let mut vars = a.vars.clone();
        for v in &b.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars.sort();
        (a.embed(&vars), b.embed(&vars))
    }

    fn insert_term(&mut self, m: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let v = e.get() + &c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = MultiPoly::one();
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

    /// Substitute polynomials for variables (simultaneous).
    pub fn substitute(&self, map: &BTreeMap<VarId, MultiPoly>) -> Self {
        if self.vars.iter().all(|v| !map.contains_key(v)) {
            return self.clone();
        }
        let mut acc = MultiPoly::zero();
        // power cache per substituted variable
        let mut cache: BTreeMap<(usize, u32), MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = &self.vars[i];
                if let Some(repl) = map.get(v) {
                    let p = cache
                        .entry((i, e))
                        .or_insert_with(|| repl.pow(e))
                        .clone();
                    term = &term * &p;
                } else {
                    term = &term * &MultiPoly::var_pow(v, e);
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    pub fn substitute_rational(&self, v: &VarId, value: &Rational) -> Self {
        let mut map = BTreeMap::new();
        map.insert(v.clone(), MultiPoly::constant(value.clone()));
        self.substitute(&map)
    }

    /// Full evaluation; panics if a used variable is unbound.
    pub fn eval(&self, bind: &BTreeMap<VarId, Rational>) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = bind
                    .get(&self.vars[i])
                    .unwrap_or_else(|| panic!("unbound variable {}", self.vars[i]));
                t *= crate::rational::pow_i64(v, e as i64);
            }
            acc += t;
        }
        acc
    }

    /// View as a univariate polynomial in `v` with `MultiPoly` coefficients.
    pub fn coeffs_in(&self, v: &VarId) -> Vec<MultiPoly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![MultiPoly::zero(); d + 1];
        match self.var_index(v) {
            None => {
                out[0] = self.clone();
            }
            Some(i) => {
                for (m, c) in &self.terms {
                    let e = m[i] as usize;
                    let mut rest = m.clone();
                    rest[i] = 0;
                    let mut mono = MultiPoly {
                        vars: self.vars.clone(),
                        terms: BTreeMap::new(),
                    };
                    mono.terms.insert(rest, c.clone());
                    out[e] = &out[e] + &mono;
                }
            }
        }
        out
    }

    /// Strictly univariate view, if only `v` occurs.
    pub fn as_unipoly_in(&self, v: &VarId) -> Option<UniPoly> {
        for (i, w) in self.vars.iter().enumerate() {
            if w != v && self.terms.keys().any(|m| m[i] > 0) {
                return None;
            }
        }
        let d = self.degree_in(v) as usize;
        let mut coeffs = vec![Rational::zero(); d + 1];
        let vi = self.var_index(v);
        for (m, c) in &self.terms {
            let e = vi.map(|i| m[i] as usize).unwrap_or(0);
            coeffs[e] = c.clone();
        }
        Some(UniPoly::from_coeffs(coeffs))
    }

    /// Leading term under graded-reverse-lex over the stored variable list
    /// (internal use: exact division and content normalization).
    fn grevlex_lead(&self) -> Option<(&Vec<u32>, &Rational)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| grevlex_cmp(a, b))
    }

    /// Exact multivariate division; `None` when not divisible.
    pub fn try_div(&self, d: &MultiPoly) -> Option<MultiPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(MultiPoly::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (mut rem, dd) = MultiPoly::unify(self, d);
        let (dm, dc) = {
            let (m, c) = dd.grevlex_lead().unwrap();
            (m.clone(), c.clone())
        };
        let mut quot = MultiPoly {
            vars: rem.vars.clone(),
            terms: BTreeMap::new(),
        };
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.grevlex_lead().unwrap();
                (m.clone(), c.clone())
            };
            if rm.len() != dm.len() || rm.iter().zip(&dm).any(|(a, b)| a < b) {
                return None;
            }
            let qm: Vec<u32> = rm.iter().zip(&dm).map(|(a, b)| a - b).collect();
            let qc = rc / &dc;
            // rem -= (qc * qm) * dd
            for (m, c) in &dd.terms {
                let mm: Vec<u32> = m.iter().zip(&qm).map(|(a, b)| a + b).collect();
                rem.insert_term(mm, -(c * &qc));
            }
            quot.insert_term(qm, qc);
        }
        Some(quot)
    }

    /// Integer-primitive normalization with positive grevlex-leading sign.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return MultiPoly::zero();
        }
        let mut c = rational_content(self.terms.values());
        if self.grevlex_lead().unwrap().1.is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    pub fn content(&self) -> Rational {
        rational_content(self.terms.values())
    }

    /// Canonical display: terms in descending lexicographic order over the
    /// sorted variable list, rationals as `a/b`, powers as `^k`.
    pub fn to_canonical_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut monos: Vec<(&Vec<u32>, &Rational)> = self.terms.iter().collect();
        monos.sort_by(|(a, _), (b, _)| b.cmp(a)); // lex desc
        let mut out = String::new();
        for (idx, (m, c)) in monos.iter().enumerate() {
            let mut parts: Vec<String> = Vec::new();
            for (i, &e) in m.iter().enumerate() {
                if e == 1 {
                    parts.push(self.vars[i].to_string());
                } else if e > 1 {
                    parts.push(format!("{}^{}", self.vars[i], e));
                }
            }
            let abs = c.abs();
            let body = if parts.is_empty() {
                display_rational(&abs)
            } else if abs.is_one() {
                parts.join("*")
            } else {
                format!("{}*{}", display_rational(&abs), parts.join("*"))
            };
            if idx == 0 {
                if c.is_negative() {
                    out.push('-');
                }
                out.push_str(&body);
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
                out.push_str(&body);
            }
        }
        out
    }
}

/// Graded reverse lexicographic comparison of exponent vectors of equal
/// length: higher total degree wins; at equal degree the monomial with the
/// smaller exponent in the last differing position wins.
pub fn grevlex_cmp(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    match da.cmp(&db) {
        Ordering::Equal => {
            for (x, y) in a.iter().zip(b).rev() {
                match x.cmp(y) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {}
                }
            }
            Ordering::Equal
        }
        other => other,
    }
}

impl std::ops::Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, other: Self) -> MultiPoly {
        let (mut a, b) = MultiPoly::unify(self, other);
        for (m, c) in b.terms {
            a.insert_term(m, c);
        }
        a
    }
}

impl std::ops::Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, other: Self) -> MultiPoly {
        self + &(-other)
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl std::ops::Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, other: Self) -> MultiPoly {
        if self.is_zero() || other.is_zero() {
            return MultiPoly::zero();
        }
        let (a, b) = MultiPoly::unify(self, other);
        let mut out = MultiPoly {
            vars: a.vars.clone(),
            terms: BTreeMap::new(),
        };
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                out.insert_term(m, ca * cb);
            }
        }
        out
    }
}

// ---- expression parsing ----

/// Parse an arithmetic expression (`+ - * / ^`, parentheses, rational
/// constants, identifiers) into a polynomial. Division is only allowed by
/// nonzero constants. Identifiers resolve through `lookup`.
pub fn parse_poly(
    src: &str,
    lookup: &dyn Fn(&str) -> Option<VarId>,
) -> Result<MultiPoly, String> {
    let mut toks = tokenize(src)?;
    toks.reverse(); // pop from the back
    let p = parse_sum(&mut toks, lookup)?;
    if let Some(t) = toks.last() {
        return Err(format!("unexpected trailing token {:?}", t));
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse::<num_bigint::BigInt>().map_err(|e| e.to_string())?;
                out.push(Tok::Num(Rational::from_integer(n)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(format!("unexpected character '{}'", other)),
        }
    }
    Ok(out)
}

fn parse_sum(toks: &mut Vec<Tok>, lookup: &dyn Fn(&str) -> Option<VarId>) -> Result<MultiPoly, String> {
    let mut acc = parse_product(toks, lookup)?;
    while let Some(t) = toks.last().cloned() {
        match t {
            Tok::Plus => {
                toks.pop();
                acc = &acc + &parse_product(toks, lookup)?;
            }
            Tok::Minus => {
                toks.pop();
                acc = &acc - &parse_product(toks, lookup)?;
            }
            _ => break,
        }
    }
    Ok(acc)
}

fn parse_product(toks: &mut Vec<Tok>, lookup: &dyn Fn(&str) -> Option<VarId>) -> Result<MultiPoly, String> {
    let mut acc = parse_power(toks, lookup)?;
    while let Some(t) = toks.last().cloned() {
        match t {
            Tok::Star => {
                toks.pop();
                acc = &acc * &parse_power(toks, lookup)?;
            }
            Tok::Slash => {
                toks.pop();
                let rhs = parse_power(toks, lookup)?;
                let c = rhs
                    .as_constant()
                    .filter(|c| !c.is_zero())
                    .ok_or("division is only defined by nonzero constants")?;
                acc = acc.scale(&c.recip());
            }
            _ => break,
        }
    }
    Ok(acc)
}

fn parse_power(toks: &mut Vec<Tok>, lookup: &dyn Fn(&str) -> Option<VarId>) -> Result<MultiPoly, String> {
    let base = parse_atom(toks, lookup)?;
    if toks.last() == Some(&Tok::Caret) {
        toks.pop();
        match toks.pop() {
            Some(Tok::Num(n)) if crate::rational::is_integer(&n) && !n.is_negative() => {
                let e = crate::rational::to_i64(&n).ok_or("exponent too large")?;
                Ok(base.pow(e as u32))
            }
            other => Err(format!("expected nonnegative integer exponent, got {:?}", other)),
        }
    } else {
        Ok(base)
    }
}

fn parse_atom(toks: &mut Vec<Tok>, lookup: &dyn Fn(&str) -> Option<VarId>) -> Result<MultiPoly, String> {
    match toks.pop() {
        Some(Tok::Num(n)) => Ok(MultiPoly::constant(n)),
        Some(Tok::Ident(name)) => lookup(&name)
            .map(|v| MultiPoly::var(&v))
            .ok_or(format!("unknown variable '{}'", name)),
        Some(Tok::Minus) => Ok(-&parse_atom(toks, lookup)?),
        Some(Tok::LParen) => {
            let inner = parse_sum(toks, lookup)?;
            match toks.pop() {
                Some(Tok::RParen) => Ok(inner),
                _ => Err("missing closing parenthesis".into()),
            }
        }
        other => Err(format!("unexpected token {:?}", other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::vars::{SymbolTable, VarKind};

    fn setup() -> (SymbolTable, VarId, VarId) {
        let mut t = SymbolTable::new();
        let x = t.fresh(VarKind::ProgramVar, "x");
        let y = t.fresh(VarKind::ProgramVar, "y");
        (t, x, y)
    }

    #[test]
    fn product_difference_of_squares() {
        let (_, x, _) = setup();
        let xp = MultiPoly::var(&x);
        let a = &xp + &MultiPoly::one(); // x+1
        let b = &xp - &MultiPoly::one(); // x-1
        let prod = &a * &b;
        let expect = &xp.pow(2) - &MultiPoly::one();
        assert_eq!(prod, expect);
    }

    #[test]
    fn add_zero_is_identity() {
        let (_, x, y) = setup();
        let p = &(&MultiPoly::var(&x) * &MultiPoly::var(&y)) + &MultiPoly::constant(rat(3));
        assert_eq!(&p + &MultiPoly::zero(), p);
    }

    #[test]
    fn expansion_matches_brute_force_convolution() {
        // (x+1)(x+2) expanded by the generic mul must agree with a naive
        // univariate convolution oracle
        let (_, x, _) = setup();
        let a = &MultiPoly::var(&x) + &MultiPoly::one();
        let b = &MultiPoly::var(&x) + &MultiPoly::constant(rat(2));
        let prod = &a * &b;

        let av = [rat(1), rat(1)];
        let bv = [rat(2), rat(1)];
        let mut conv = vec![Rational::zero(); 3];
        for i in 0..2 {
            for j in 0..2 {
                conv[i + j] += &av[i] * &bv[j];
            }
        }
        let expect = MultiPoly::from_unipoly(&UniPoly::from_coeffs(conv), &x);
        assert_eq!(prod, expect);
    }

    #[test]
    fn exact_division() {
        let (_, x, y) = setup();
        let p = parse_poly("x^2*y - y^3", &|n| match n {
            "x" => Some(x.clone()),
            "y" => Some(y.clone()),
            _ => None,
        })
        .unwrap();
        let d = parse_poly("x*y - y^2", &|n| match n {
            "x" => Some(x.clone()),
            "y" => Some(y.clone()),
            _ => None,
        })
        .unwrap();
        // x^2y - y^3 = (xy - y^2)(x + y)
        let q = p.try_div(&d).unwrap();
        assert_eq!(&q * &d, p);
        // adding 1 breaks divisibility
        let p1 = &p + &MultiPoly::one();
        assert!(p1.try_div(&d).is_none());
    }

    #[test]
    fn parse_and_display_roundtrip() {
        let (_, x, y) = setup();
        let lookup = |n: &str| match n {
            "x" => Some(x.clone()),
            "y" => Some(y.clone()),
            _ => None,
        };
        let p = parse_poly("3/2*x^2*y - y + 7", &lookup).unwrap();
        let s = p.to_canonical_string();
        assert_eq!(s, "3/2*x^2*y - y + 7");
        let q = parse_poly(&s, &lookup).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn substitution_and_eval() {
        let (_, x, y) = setup();
        let lookup = |n: &str| match n {
            "x" => Some(x.clone()),
            "y" => Some(y.clone()),
            _ => None,
        };
        let p = parse_poly("x^2 + y", &lookup).unwrap();
        let mut map = BTreeMap::new();
        map.insert(x.clone(), parse_poly("y + 1", &lookup).unwrap());
        let q = p.substitute(&map);
        let expect = parse_poly("y^2 + 3*y + 1", &lookup).unwrap();
        assert_eq!(q, expect);

        let mut bind = BTreeMap::new();
        bind.insert(y.clone(), rat(2));
        assert_eq!(q.eval(&bind), rat(11));
    }
}
