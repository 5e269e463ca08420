//! Total derivatives, Euler-Lagrange derivatives, prolongation of
//! vertical vector fields and the generator type.
//!
//! Field jets are kept at order at most two and gauge-potential jets at
//! order at most one. Operations expand first and only reject symbols
//! that survive canonicalization. The Euler-Lagrange derivative of a
//! second-order density may reach order four and is exempt.

use crate::error::{Error, Result};
use crate::expr::{print, Expr, FieldSystem, Poly, Symbol};

pub const MAX_FIELD_ORDER: usize = 2;
pub const MAX_GAUGE_ORDER: usize = 1;

/// Image of a single symbol under d_mu.
fn d_symbol(s: &Symbol, mu: usize, sys: &FieldSystem) -> Result<Option<Poly>> {
    Ok(match s {
        Symbol::Coord(nu) => (*nu == mu).then(Poly::one),
        Symbol::Jet { field, derivs } => Some(Poly::symbol(Symbol::Jet {
            field: *field,
            derivs: derivs.with(mu),
        })),
        Symbol::Gauge { comp, derivs } => Some(Poly::symbol(Symbol::Gauge {
            comp: *comp,
            derivs: derivs.with(mu),
        })),
        Symbol::Eps { derivs } => Some(Poly::symbol(Symbol::Eps {
            derivs: derivs.with(mu),
        })),
        Symbol::Lambda => None,
        Symbol::Extern { name, arg } => {
            if *arg != mu {
                None
            } else {
                let decl = sys
                    .extern_decl(name)
                    .ok_or_else(|| Error::UndeclaredExtern(name.to_string()))?;
                let dname = decl
                    .derivative
                    .as_deref()
                    .ok_or_else(|| Error::MissingDerivative(name.to_string()))?;
                let dname = sys
                    .extern_name(dname)
                    .ok_or_else(|| Error::UndeclaredExtern(dname.to_string()))?;
                Some(Poly::symbol(Symbol::Extern {
                    name: dname,
                    arg: *arg,
                }))
            }
        }
    })
}

/// d_mu without any order restriction.
pub(crate) fn d_poly(p: &Poly, mu: usize, sys: &FieldSystem) -> Result<Poly> {
    p.derivation(|s| d_symbol(s, mu, sys))
}

/// Successive total derivatives along every index of `derivs`.
pub(crate) fn d_multi(p: &Poly, derivs: &[usize], sys: &FieldSystem) -> Result<Poly> {
    let mut acc = p.clone();
    for &mu in derivs {
        acc = d_poly(&acc, mu, sys)?;
    }
    Ok(acc)
}

/// Rejects field jets above second order and gauge jets above first order.
pub fn check_order(p: &Poly, sys: &FieldSystem) -> Result<()> {
    for s in p.symbols() {
        let too_high = match &s {
            Symbol::Jet { derivs, .. } => derivs.order() > MAX_FIELD_ORDER,
            Symbol::Gauge { derivs, .. } => derivs.order() > MAX_GAUGE_ORDER,
            _ => false,
        };
        if too_high {
            return Err(Error::JetOrderOverflow(print(&Expr::from(s), sys)));
        }
    }
    Ok(())
}

/// Total derivative d_mu of an expression.
pub fn total_derivative(e: &Expr, mu: usize, sys: &FieldSystem) -> Result<Expr> {
    check_index(mu, sys)?;
    let out = d_poly(&e.to_poly()?, mu, sys)?;
    check_order(&out, sys)?;
    Ok(Expr::from_poly(&out))
}

/// Total derivative without the jet-order cap.
pub fn total_derivative_unbounded(e: &Expr, mu: usize, sys: &FieldSystem) -> Result<Expr> {
    check_index(mu, sys)?;
    Ok(Expr::from_poly(&d_poly(&e.to_poly()?, mu, sys)?))
}

fn check_index(mu: usize, sys: &FieldSystem) -> Result<()> {
    if mu >= sys.dim() {
        return Err(Error::IndexOutOfRange {
            index: mu,
            dim: sys.dim(),
        });
    }
    Ok(())
}

/// Euler-Lagrange derivative with respect to field `alpha` of a density
/// of at most second order:
/// dL/dphi - d_mu dL/dphi_mu + sum_{mu<=nu} d_mu d_nu dL/dphi_{mu nu}.
pub(crate) fn el_poly(l: &Poly, alpha: usize, sys: &FieldSystem) -> Result<Poly> {
    let mut out = l.partial(&Symbol::field(alpha));
    for s in l.symbols() {
        let Symbol::Jet { field, derivs } = &s else {
            continue;
        };
        if *field != alpha || derivs.order() == 0 {
            continue;
        }
        let part = l.partial(&s);
        match derivs.order() {
            1 => out -= &d_multi(&part, derivs.indices(), sys)?,
            2 => out += &d_multi(&part, derivs.indices(), sys)?,
            _ => {
                return Err(Error::Unsupported(format!(
                    "Euler-Lagrange derivative of a density containing {}",
                    print(&Expr::from(s.clone()), sys)
                )))
            }
        }
    }
    Ok(out)
}

pub fn euler_lagrange(l: &Expr, alpha: usize, sys: &FieldSystem) -> Result<Expr> {
    if alpha >= sys.num_fields() {
        return Err(Error::InvalidGenerator(format!(
            "field index {alpha} out of range"
        )));
    }
    Ok(Expr::from_poly(&el_poly(&l.to_poly()?, alpha, sys)?))
}

/// All Euler-Lagrange derivatives, one per field.
pub(crate) fn el_all(l: &Poly, sys: &FieldSystem) -> Result<Vec<Poly>> {
    (0..sys.num_fields()).map(|a| el_poly(l, a, sys)).collect()
}

/// Jet prolongation of the vertical field with components `y0` applied to `e`.
pub(crate) fn prolong_poly(y0: &[Poly], e: &Poly, sys: &FieldSystem) -> Result<Poly> {
    e.derivation(|s| match s {
        Symbol::Jet { field, derivs } => d_multi(&y0[*field], derivs.indices(), sys).map(Some),
        _ => Ok(None),
    })
}

pub fn prolong_apply(y0: &[Expr], e: &Expr, sys: &FieldSystem) -> Result<Expr> {
    if y0.len() != sys.num_fields() {
        return Err(Error::InvalidGenerator(format!(
            "vertical generator has {} components, expected {}",
            y0.len(),
            sys.num_fields()
        )));
    }
    let y0 = to_polys(y0)?;
    let out = prolong_poly(&y0, &e.to_poly()?, sys)?;
    check_order(&out, sys)?;
    Ok(Expr::from_poly(&out))
}

pub(crate) fn to_polys(es: &[Expr]) -> Result<Vec<Poly>> {
    es.iter().map(Expr::to_poly).collect()
}

pub(crate) fn to_exprs(ps: &[Poly]) -> Vec<Expr> {
    ps.iter().map(Expr::from_poly).collect()
}

/// Horizontal generator `x` (one component per base coordinate, free of
/// field jets) and vertical generator `y0` (one per field, at most first
/// order). Stored canonicalized.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    x: Vec<Poly>,
    y0: Vec<Poly>,
}

impl Generator {
    pub fn new(x: &[Expr], y0: &[Expr], sys: &FieldSystem) -> Result<Self> {
        Generator::from_polys(to_polys(x)?, to_polys(y0)?, sys)
    }

    pub(crate) fn from_polys(x: Vec<Poly>, y0: Vec<Poly>, sys: &FieldSystem) -> Result<Self> {
        if x.len() != sys.dim() {
            return Err(Error::InvalidGenerator(format!(
                "horizontal generator has {} components, expected {}",
                x.len(),
                sys.dim()
            )));
        }
        if y0.len() != sys.num_fields() {
            return Err(Error::InvalidGenerator(format!(
                "vertical generator has {} components, expected {}",
                y0.len(),
                sys.num_fields()
            )));
        }
        for (mu, c) in x.iter().enumerate() {
            if c.has_field_jets() {
                return Err(Error::InvalidGenerator(format!(
                    "X^{mu} depends on the fields"
                )));
            }
        }
        for (alpha, c) in y0.iter().enumerate() {
            if c.field_order() > 1 {
                return Err(Error::InvalidGenerator(format!(
                    "Y0^{alpha} depends on second derivatives"
                )));
            }
        }
        Ok(Generator { x, y0 })
    }

    pub fn zero(sys: &FieldSystem) -> Self {
        Generator {
            x: vec![Poly::zero(); sys.dim()],
            y0: vec![Poly::zero(); sys.num_fields()],
        }
    }

    /// Vertical generator `Y0`, horizontal generator zero.
    pub fn vertical(y0: &[Expr], sys: &FieldSystem) -> Result<Self> {
        Generator::new(&vec![Expr::zero(); sys.dim()], y0, sys)
    }

    pub fn x(&self) -> Vec<Expr> {
        to_exprs(&self.x)
    }

    pub fn y0(&self) -> Vec<Expr> {
        to_exprs(&self.y0)
    }

    pub(crate) fn x_polys(&self) -> &[Poly] {
        &self.x
    }

    pub(crate) fn y0_polys(&self) -> &[Poly] {
        &self.y0
    }

    /// Full generator Y^alpha = Y0^alpha + phi^alpha_mu X^mu.
    pub fn y(&self) -> Vec<Expr> {
        self.y0
            .iter()
            .enumerate()
            .map(|(alpha, y0)| {
                let mut acc = y0.clone();
                for (mu, x) in self.x.iter().enumerate() {
                    acc += &Poly::symbol(Symbol::jet(alpha, &[mu])) * x;
                }
                Expr::from_poly(&acc)
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.x.iter().chain(&self.y0).all(Poly::is_zero)
    }
}

/// Splits a full generator `(X, Y)` into horizontal and vertical parts,
/// Y0^alpha = Y^alpha - phi^alpha_mu X^mu.
pub fn decompose(x: &[Expr], y: &[Expr], sys: &FieldSystem) -> Result<Generator> {
    let x = to_polys(x)?;
    let y = to_polys(y)?;
    if x.len() != sys.dim() {
        return Err(Error::InvalidGenerator(format!(
            "X has {} components, expected {}",
            x.len(),
            sys.dim()
        )));
    }
    if y.len() != sys.num_fields() {
        return Err(Error::InvalidGenerator(format!(
            "Y has {} components, expected {}",
            y.len(),
            sys.num_fields()
        )));
    }
    for (mu, c) in x.iter().enumerate() {
        if c.has_field_jets() {
            return Err(Error::InvalidGenerator(format!(
                "X^{mu} depends on the fields"
            )));
        }
    }
    let y0 = y
        .iter()
        .enumerate()
        .map(|(alpha, ya)| {
            let mut acc = ya.clone();
            for (mu, xm) in x.iter().enumerate() {
                acc -= &(&Poly::symbol(Symbol::jet(alpha, &[mu])) * xm);
            }
            acc
        })
        .collect();
    Generator::from_polys(x, y0, sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, ExternDecl};

    fn sys() -> FieldSystem {
        let mut s = FieldSystem::new(1, ["q"]).unwrap();
        s.declare_extern(
            "F",
            ExternDecl {
                arg: 0,
                derivative: Some("Fdot".into()),
                antiderivative: None,
                def: None,
            },
        )
        .unwrap();
        s.declare_extern(
            "Fdot",
            ExternDecl {
                arg: 0,
                derivative: None,
                antiderivative: None,
                def: None,
            },
        )
        .unwrap();
        s.declare_extern(
            "V",
            ExternDecl {
                arg: 0,
                derivative: Some("Vdot".into()),
                antiderivative: None,
                def: None,
            },
        )
        .unwrap();
        s.declare_extern(
            "Vdot",
            ExternDecl {
                arg: 0,
                derivative: None,
                antiderivative: None,
                def: None,
            },
        )
        .unwrap();
        s
    }

    fn p(text: &str) -> Expr {
        parse(text, &sys()).unwrap()
    }

    fn same(a: &Expr, b: &str) -> bool {
        a.equiv(&p(b)).unwrap()
    }

    #[test]
    fn total_derivative_examples() {
        let s = sys();
        let d = total_derivative(&p("(* 1/2 (pow (d q 0) 2))"), 0, &s).unwrap();
        assert!(same(&d, "(* (d q 0) (d q 0 0))"));
        let d = total_derivative(&p("(* q (F x0))"), 0, &s).unwrap();
        assert!(same(&d, "(+ (* (d q 0) (F x0)) (* q (Fdot x0)))"));
        let d = total_derivative(&p("(pow q 2)"), 0, &s).unwrap();
        assert!(same(&d, "(* 2 q (d q 0))"));
        assert!(euler_lagrange(&d, 0, &s).unwrap().is_zero().unwrap());
    }

    #[test]
    fn total_derivative_errors() {
        let s = sys();
        assert!(matches!(
            total_derivative(&p("(d q 0 0)"), 0, &s),
            Err(Error::JetOrderOverflow(_))
        ));
        assert_eq!(
            total_derivative(&p("(Fdot x0)"), 0, &s),
            Err(Error::MissingDerivative("Fdot".into()))
        );
        // a third-order symbol that cancels is accepted
        let e = p("(+ (d q 0 0) (* -1 (d q 0 0)) q)");
        assert!(same(&total_derivative(&e, 0, &s).unwrap(), "(d q 0)"));
    }

    #[test]
    fn euler_lagrange_examples() {
        let s = sys();
        let el = euler_lagrange(&p("(+ (* 1/2 (pow (d q 0) 2)) (* q (F x0)))"), 0, &s).unwrap();
        assert!(same(&el, "(+ (F x0) (* -1 (d q 0 0)))"));
        let el = euler_lagrange(&p("(+ (* 1/2 (pow (d q 0) 2)) (* -1 (V x0)))"), 0, &s).unwrap();
        assert!(same(&el, "(* -1 (d q 0 0))"));
        assert!(euler_lagrange(&p("(* 2 q (d q 0))"), 0, &s)
            .unwrap()
            .is_zero()
            .unwrap());
        assert!(
            euler_lagrange(&p("(+ (* q (d q 0 0)) (pow (d q 0) 2))"), 0, &s)
                .unwrap()
                .is_zero()
                .unwrap()
        );
    }

    #[test]
    fn euler_lagrange_mixed_second_derivative() {
        // L = u * u_{01} in d = 2 has EL = 2 u_{01}
        let s = FieldSystem::new(2, ["u"]).unwrap();
        let l = parse("(* u (d u 1 0))", &s).unwrap();
        let el = euler_lagrange(&l, 0, &s).unwrap();
        assert!(el.equiv(&parse("(* 2 (d u 0 1))", &s).unwrap()).unwrap());
    }

    #[test]
    fn prolongation_examples() {
        let s = sys();
        let l = p("(+ (* 1/2 (pow (d q 0) 2)) (* q (F x0)))");
        assert!(same(
            &prolong_apply(&[Expr::one()], &l, &s).unwrap(),
            "(F x0)"
        ));
        let l = p("(+ (* 1/2 (pow (d q 0) 2)) (* -1 (V x0)))");
        let out = prolong_apply(&[p("(d q 0)")], &l, &s).unwrap();
        assert!(same(&out, "(* (d q 0) (d q 0 0))"));
        assert!(prolong_apply(&[p("q")], &Expr::int(7), &s)
            .unwrap()
            .is_zero()
            .unwrap());
    }

    #[test]
    fn decompose_examples() {
        let s = sys();
        let g = decompose(&[Expr::int(-1)], &[Expr::zero()], &s).unwrap();
        assert!(same(&g.y0()[0], "(d q 0)"));
        assert!(same(&g.y()[0], "0"));
        let g = decompose(&[Expr::zero()], &[Expr::one()], &s).unwrap();
        assert!(same(&g.y0()[0], "1"));
        let g = decompose(&[Expr::zero()], &[Expr::zero()], &s).unwrap();
        assert!(g.is_zero());
        assert!(matches!(
            decompose(&[p("q")], &[Expr::zero()], &s),
            Err(Error::InvalidGenerator(_))
        ));
    }

    #[test]
    fn generator_rejects_second_order_vertical_part() {
        let s = sys();
        assert!(Generator::vertical(&[p("(d q 0 0)")], &s).is_err());
        assert!(Generator::new(&[], &[Expr::one()], &s).is_err());
    }
}
