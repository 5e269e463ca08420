//! Canonical polynomial form.
//!
//! A [`Poly`] is a finite map from monomials to nonzero exact rational
//! coefficients. Monomials are sorted `(symbol, exponent)` lists, so two
//! polynomials are equal iff their maps are equal. Every monomial carries
//! at most one power of the gauge parameter `eps` (or its derivatives);
//! higher powers are truncated on construction.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::symbol::Symbol;
use crate::error::{Error, Result};

pub type Coeff = BigRational;

pub fn coeff(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Coeff {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn symbol(s: Symbol) -> Self {
        Monomial(vec![(s, 1)])
    }

    pub fn power(s: Symbol, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(s, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, s: &Symbol) -> u32 {
        self.0
            .binary_search_by(|(t, _)| t.cmp(s))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn eps_degree(&self) -> u32 {
        self.0
            .iter()
            .filter(|(s, _)| s.is_eps())
            .map(|(_, e)| e)
            .sum()
    }

    /// The monomial with one power of the `i`-th factor removed.
    fn lower(&self, i: usize) -> Monomial {
        let mut v = self.0.clone();
        if v[i].1 == 1 {
            v.remove(i);
        } else {
            v[i].1 -= 1;
        }
        Monomial(v)
    }

    /// Monomial with every occurrence of `s` removed.
    pub fn without(&self, s: &Symbol) -> Monomial {
        Monomial(self.0.iter().filter(|(t, _)| t != s).cloned().collect())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(coeff(n))
    }

    pub fn symbol(s: Symbol) -> Self {
        Poly::monomial(Monomial::symbol(s), Coeff::one())
    }

    pub fn monomial(m: Monomial, c: Coeff) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    /// The constant term, if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() || m.eps_degree() > 1 {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Coeff) -> Poly {
        let mut out = Poly::zero();
        for (n, k) in &self.terms {
            out.add_term(n.mul(m), k * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(s, _)| s.clone()))
            .collect()
    }

    pub fn any_symbol(&self, pred: impl Fn(&Symbol) -> bool) -> bool {
        self.terms
            .keys()
            .any(|m| m.factors().iter().any(|(s, _)| pred(s)))
    }

    /// Highest derivative order among field jet symbols.
    pub fn field_order(&self) -> usize {
        self.symbols()
            .iter()
            .filter(|s| s.is_jet())
            .map(Symbol::jet_order)
            .max()
            .unwrap_or(0)
    }

    pub fn has_field_jets(&self) -> bool {
        self.any_symbol(Symbol::is_jet)
    }

    /// Partial derivative with respect to one symbol, all others held fixed.
    pub fn partial(&self, s: &Symbol) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Ok(i) = m.0.binary_search_by(|(t, _)| t.cmp(s)) {
                let e = m.0[i].1;
                out.add_term(m.lower(i), c * coeff(e as i64));
            }
        }
        out
    }

    /// Applies the derivation that sends each symbol `s` to `rule(s)`
    /// (`None` meaning zero) and extends by the Leibniz rule.
    pub fn derivation<F>(&self, mut rule: F) -> Result<Poly>
    where
        F: FnMut(&Symbol) -> Result<Option<Poly>>,
    {
        let mut cache: HashMap<Symbol, Option<Poly>> = HashMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (i, (s, e)) in m.0.iter().enumerate() {
                if !cache.contains_key(s) {
                    let image = rule(s)?;
                    cache.insert(s.clone(), image);
                }
                let Some(ds) = &cache[s] else { continue };
                let k = c * coeff(*e as i64);
                let rest = m.lower(i);
                for (n, kn) in &ds.terms {
                    out.add_term(rest.mul(n), &k * kn);
                }
            }
        }
        Ok(out)
    }

    /// Simultaneous substitution of symbols by polynomials.
    pub fn substitute(&self, bindings: &HashMap<Symbol, Poly>) -> Poly {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut out = Poly::zero();
        let mut powers: HashMap<(Symbol, u32), Poly> = HashMap::new();
        for (m, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut acc = Poly::one();
            for (s, e) in m.factors() {
                match bindings.get(s) {
                    Some(p) => {
                        let pe = powers
                            .entry((s.clone(), *e))
                            .or_insert_with(|| p.pow(*e))
                            .clone();
                        acc = &acc * &pe;
                    }
                    None => kept = kept.mul(&Monomial::power(s.clone(), *e)),
                }
            }
            out += acc.mul_monomial(&kept, c);
        }
        out
    }

    /// Evaluates at a point given by `value(symbol)`.
    pub fn eval_with<F>(&self, mut value: F) -> Result<f64>
    where
        F: FnMut(&Symbol) -> Result<f64>,
    {
        let mut cache: HashMap<&Symbol, f64> = HashMap::new();
        let mut sum = 0.0;
        for (m, c) in &self.terms {
            let mut t = coeff_to_f64(c);
            for (s, e) in m.factors() {
                let v = match cache.get(s) {
                    Some(v) => *v,
                    None => {
                        let v = value(s)?;
                        cache.insert(s, v);
                        v
                    }
                };
                t *= v.powi(*e as i32);
            }
            sum += t;
        }
        Ok(sum)
    }

    /// Groups terms by the power of `s`: `self = sum_k s^k * out[k]`.
    pub fn collect(&self, s: &Symbol) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(s);
            out.entry(e).or_default().add_term(m.without(s), c.clone());
        }
        out
    }
}

pub fn coeff_to_f64(c: &Coeff) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        // ratio of huge integers: divide in floating point
        c.numer().to_f64().unwrap_or(f64::NAN) / c.denom().to_f64().unwrap_or(f64::NAN)
    })
}

pub fn coeff_from_f64(x: f64) -> Result<Coeff> {
    BigRational::from_float(x).ok_or_else(|| Error::Unsupported(format!("non-finite number {x}")))
}

impl From<Symbol> for Poly {
    fn from(s: Symbol) -> Self {
        Poly::symbol(s)
    }
}

impl AddAssign<Poly> for Poly {
    fn add_assign(&mut self, rhs: Poly) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += rhs;
        self
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&coeff(-1))
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (n, k) in &rhs.terms {
                out.add_term(m.mul(n), c * k);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl std::iter::Sum for Poly {
    fn sum<I: Iterator<Item = Poly>>(iter: I) -> Poly {
        let mut acc = Poly::zero();
        for p in iter {
            acc += p;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Poly {
        Poly::symbol(Symbol::field(0))
    }
    fn qd() -> Poly {
        Poly::symbol(Symbol::jet(0, &[0]))
    }

    #[test]
    fn square_expansion_cancels() {
        let s = &q() + &qd();
        let e = s.pow(2) - q().pow(2) - (&Poly::int(2) * &(&q() * &qd()));
        assert_eq!(e, qd().pow(2));
    }

    #[test]
    fn commutative_difference_is_zero() {
        let e = &(&qd() * &q()) - &(&q() * &qd());
        assert!(e.is_zero());
    }

    #[test]
    fn eps_squared_truncates() {
        let e = Poly::symbol(Symbol::eps());
        let de = Poly::symbol(Symbol::Eps {
            derivs: [0usize][..].into(),
        });
        assert!((&e * &e).is_zero());
        assert!((&e * &de).is_zero());
        assert_eq!((&e * &q()).len(), 1);
    }

    #[test]
    fn partial_and_collect() {
        let lam = Poly::symbol(Symbol::Lambda);
        let p = &(&lam.pow(2) * &q()) + &(&lam * &qd());
        assert_eq!(
            p.partial(&Symbol::Lambda),
            &(&Poly::int(2) * &(&lam * &q())) + &qd()
        );
        let by = p.collect(&Symbol::Lambda);
        assert_eq!(by[&2], q());
        assert_eq!(by[&1], qd());
    }

    #[test]
    fn substitution_is_simultaneous() {
        let p = &q() * &qd();
        let mut b = HashMap::new();
        b.insert(Symbol::field(0), qd());
        b.insert(Symbol::jet(0, &[0]), q());
        assert_eq!(p.substitute(&b), p);
    }
}
