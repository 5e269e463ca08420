//! Expression kernel: trees over jet variables, canonical polynomial
//! form, substitution and numeric evaluation.

mod dsl;
mod poly;
mod symbol;
mod system;

use std::collections::HashMap;
use std::ops;
use std::sync::Arc;

pub use dsl::{parse, print};
pub use poly::{coeff, coeff_from_f64, coeff_to_f64, ratio, Coeff, Monomial, Poly};
pub use symbol::{MultiIndex, Symbol};
pub use system::{is_reserved, ExternDecl, ExternDef, FieldSystem};

use crate::error::{Error, Result};

/// Expression tree. Arbitrary trees are accepted; [`Expr::canonicalize`]
/// maps every supported tree to its unique expanded form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(Coeff),
    Sym(Symbol),
    /// Extern function applied to an argument (must be a base coordinate).
    Apply(Arc<str>, Box<Expr>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn zero() -> Self {
        Expr::Num(coeff(0))
    }

    pub fn one() -> Self {
        Expr::Num(coeff(1))
    }

    pub fn int(n: i64) -> Self {
        Expr::Num(coeff(n))
    }

    pub fn rational(p: i64, q: i64) -> Self {
        Expr::Num(ratio(p, q))
    }

    pub fn coord(mu: usize) -> Self {
        Expr::Sym(Symbol::Coord(mu))
    }

    pub fn field(alpha: usize) -> Self {
        Expr::Sym(Symbol::field(alpha))
    }

    /// Jet variable; derivative indices may be given in any order.
    pub fn jet(alpha: usize, derivs: &[usize]) -> Self {
        Expr::Sym(Symbol::jet(alpha, derivs))
    }

    pub fn gauge(mu: usize) -> Self {
        Expr::Sym(Symbol::gauge(mu))
    }

    /// d_nu A_mu.
    pub fn gauge_deriv(mu: usize, nu: usize) -> Self {
        Expr::Sym(Symbol::Gauge {
            comp: mu,
            derivs: MultiIndex::new(vec![nu]),
        })
    }

    /// Field strength F_{mu nu} = d_mu A_nu - d_nu A_mu, expanded.
    pub fn field_strength(mu: usize, nu: usize) -> Self {
        Expr::gauge_deriv(nu, mu) - Expr::gauge_deriv(mu, nu)
    }

    pub fn eps() -> Self {
        Expr::Sym(Symbol::eps())
    }

    pub fn eps_deriv(derivs: &[usize]) -> Self {
        Expr::Sym(Symbol::Eps {
            derivs: derivs.into(),
        })
    }

    pub fn lambda() -> Self {
        Expr::Sym(Symbol::Lambda)
    }

    pub fn apply(name: &str, mu: usize) -> Self {
        Expr::Apply(Arc::from(name), Box::new(Expr::coord(mu)))
    }

    pub fn pow(self, e: u32) -> Self {
        Expr::Pow(Box::new(self), e)
    }

    /// Converts the tree to canonical polynomial form.
    pub fn to_poly(&self) -> Result<Poly> {
        Ok(match self {
            Expr::Num(c) => Poly::constant(c.clone()),
            Expr::Sym(s) => Poly::symbol(s.clone()),
            Expr::Apply(name, arg) => match arg.as_ref() {
                Expr::Sym(Symbol::Coord(mu)) => Poly::symbol(Symbol::Extern {
                    name: name.clone(),
                    arg: *mu,
                }),
                other => {
                    return Err(Error::Unsupported(format!(
                        "extern `{name}` applied to a non-coordinate argument {other:?}"
                    )))
                }
            },
            Expr::Add(xs) => {
                let mut acc = Poly::zero();
                for x in xs {
                    acc += x.to_poly()?;
                }
                acc
            }
            Expr::Mul(xs) => {
                let mut acc = Poly::one();
                for x in xs {
                    acc = &acc * &x.to_poly()?;
                    if acc.is_zero() {
                        break;
                    }
                }
                acc
            }
            Expr::Pow(b, e) => b.to_poly()?.pow(*e),
        })
    }

    /// Builds the canonical tree of a polynomial. The printer and parser
    /// are exact inverses on trees produced here.
    pub fn from_poly(p: &Poly) -> Expr {
        let mut terms: Vec<Expr> = p.terms().map(|(m, c)| monomial_tree(m, c)).collect();
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr::Add(terms),
        }
    }

    pub fn canonicalize(&self) -> Result<Expr> {
        Ok(Expr::from_poly(&self.to_poly()?))
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(self.to_poly()?.is_zero())
    }

    /// Semantic equality (equality of canonical forms).
    pub fn equiv(&self, other: &Expr) -> Result<bool> {
        Ok(self.to_poly()? == other.to_poly()?)
    }

    /// Simultaneous replacement of symbols, then canonicalization.
    pub fn substitute(&self, bindings: &HashMap<Symbol, Expr>) -> Result<Expr> {
        let b = bindings
            .iter()
            .map(|(s, e)| Ok((s.clone(), e.to_poly()?)))
            .collect::<Result<HashMap<_, _>>>()?;
        Ok(Expr::from_poly(&self.to_poly()?.substitute(&b)))
    }

    /// IEEE evaluation of the tree as written at `point`.
    pub fn eval(&self, point: &Point, sys: &FieldSystem) -> Result<f64> {
        Ok(match self {
            Expr::Num(c) => coeff_to_f64(c),
            Expr::Sym(s) => point.eval(&Poly::symbol(s.clone()), sys)?,
            Expr::Apply(name, arg) => sys.eval_extern(name, arg.eval(point, sys)?)?,
            Expr::Add(xs) => xs.iter().map(|x| x.eval(point, sys)).sum::<Result<f64>>()?,
            Expr::Mul(xs) => xs
                .iter()
                .map(|x| x.eval(point, sys))
                .product::<Result<f64>>()?,
            Expr::Pow(b, e) => b.eval(point, sys)?.powi(*e as i32),
        })
    }
}

fn symbol_tree(s: &Symbol) -> Expr {
    match s {
        Symbol::Extern { name, arg } => Expr::Apply(name.clone(), Box::new(Expr::coord(*arg))),
        other => Expr::Sym(other.clone()),
    }
}

fn monomial_tree(m: &Monomial, c: &Coeff) -> Expr {
    let mut factors: Vec<Expr> = m
        .factors()
        .iter()
        .map(|(s, e)| {
            if *e == 1 {
                symbol_tree(s)
            } else {
                symbol_tree(s).pow(*e)
            }
        })
        .collect();
    if factors.is_empty() {
        return Expr::Num(c.clone());
    }
    if *c != coeff(1) {
        factors.insert(0, Expr::Num(c.clone()));
    }
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        Expr::Mul(factors)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        symbol_tree(&s)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, rhs])
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, Expr::Mul(vec![Expr::int(-1), rhs])])
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(vec![self, rhs])
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Mul(vec![Expr::int(-1), self])
    }
}

/// Numeric assignment for evaluation: base coordinates plus values for
/// jet, gauge and other symbols. Externs are evaluated from their numeric
/// definitions at the assigned coordinate.
#[derive(Clone, Debug, Default)]
pub struct Point {
    pub coords: Vec<f64>,
    pub values: HashMap<Symbol, f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point {
            coords,
            values: HashMap::new(),
        }
    }

    pub fn with(mut self, s: Symbol, v: f64) -> Self {
        self.values.insert(s, v);
        self
    }

    pub fn set(&mut self, s: Symbol, v: f64) {
        self.values.insert(s, v);
    }

    fn coord(&self, mu: usize) -> Result<f64> {
        self.coords
            .get(mu)
            .copied()
            .ok_or_else(|| Error::MissingValue(format!("x{mu}")))
    }

    pub fn eval(&self, p: &Poly, sys: &FieldSystem) -> Result<f64> {
        p.eval_with(|s| match s {
            Symbol::Coord(mu) => self.coord(*mu),
            Symbol::Extern { name, arg } => sys.eval_extern(name, self.coord(*arg)?),
            other => self
                .values
                .get(other)
                .copied()
                .ok_or_else(|| Error::MissingValue(other.to_string())),
        })
    }
}
