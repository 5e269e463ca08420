//! Divergence potentials for densities with identically vanishing
//! Euler-Lagrange derivatives.
//!
//! The fields are scaled, `phi -> lam * phi` for `lam` in `[0, 1]`. The
//! lam-derivative of the scaled density is a total divergence `d_mu
//! Lt^mu` once the Euler-Lagrange term drops out, so
//! `L - L|_{phi=0} = d_mu int_0^1 Lt^mu dlam`. The field-free remainder
//! `h = L|_{phi=0}` is integrated along `x0`.
//!
//! For a second-order density the potential integrand is
//!
//! ```text
//! Lt^mu = P^mu phi + sum_nu ( S^{mu nu} phi_nu - (d_nu S^{mu nu}) phi )
//! ```
//!
//! with `P^mu = dL/dphi_mu` and `S^{mu nu}` the symmetric second-order
//! partial: `dL/dphi_{mu mu}` on the diagonal and `1/2 dL/dphi_{mu nu}`
//! off the diagonal (each mixed jet is a single sorted symbol). On the
//! diagonal this is `(P - 2 d_mu S) phi + d_mu (S phi)`.
//!
//! Every scaled quantity is polynomial in `lam`, so the `lam` integral is
//! exact: `int_0^1 lam^k = 1/(k+1)`.

use std::collections::HashMap;

use num_traits::One;

use crate::error::{Error, Result};
use crate::expr::{coeff, print, ratio, Coeff, Expr, FieldSystem, Monomial, Poly, Symbol};
use crate::jet::{d_poly, el_all, to_exprs, MAX_FIELD_ORDER};

#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyResult {
    /// Potential components, `L = d_mu lambda[mu]`.
    pub lambda: Vec<Expr>,
    /// `h = L|_{phi=0}`.
    pub zero_field_part: Expr,
    /// Antiderivative of `h` along `x0`, already included in `lambda[0]`.
    pub h0: Expr,
}

pub(crate) struct HomotopyPolys {
    pub lambda: Vec<Poly>,
    pub zero_field_part: Poly,
    pub h0: Poly,
}

impl HomotopyPolys {
    fn to_result(&self) -> HomotopyResult {
        HomotopyResult {
            lambda: to_exprs(&self.lambda),
            zero_field_part: Expr::from_poly(&self.zero_field_part),
            h0: Expr::from_poly(&self.h0),
        }
    }
}

pub fn homotopy_potential(l: &Expr, sys: &FieldSystem) -> Result<HomotopyResult> {
    Ok(homotopy_poly(&l.to_poly()?, sys)?.to_result())
}

fn jet_vars(p: &Poly) -> Vec<Symbol> {
    p.symbols().into_iter().filter(Symbol::is_jet).collect()
}

fn integrate_lambda(p: &Poly) -> Poly {
    let mut out = Poly::zero();
    for (k, c) in p.collect(&Symbol::Lambda) {
        out += c.scale(&ratio(1, k as i64 + 1));
    }
    out
}

pub(crate) fn homotopy_poly(l: &Poly, sys: &FieldSystem) -> Result<HomotopyPolys> {
    let vars = jet_vars(l);
    if let Some(s) = vars.iter().find(|s| s.jet_order() > MAX_FIELD_ORDER) {
        return Err(Error::Unsupported(format!(
            "homotopy of a density containing {}",
            print(&Expr::from(s.clone()), sys)
        )));
    }
    for (field, el) in el_all(l, sys)?.into_iter().enumerate() {
        if !el.is_zero() {
            return Err(Error::NotNullLagrangian {
                field,
                residual: print(&Expr::from_poly(&el), sys),
            });
        }
    }

    let lam = Poly::symbol(Symbol::Lambda);
    let scaling: HashMap<Symbol, Poly> = vars
        .iter()
        .map(|s| (s.clone(), &lam * &Poly::symbol(s.clone())))
        .collect();

    let dim = sys.dim();
    let half = ratio(1, 2);
    let mut integrand = vec![Poly::zero(); dim];
    for s in &vars {
        let Symbol::Jet { field, derivs } = s else {
            unreachable!()
        };
        let phi = Poly::symbol(Symbol::field(*field));
        let phi_d = |nu: usize| Poly::symbol(Symbol::jet(*field, &[nu]));
        let part = l.partial(s).substitute(&scaling);
        match derivs.indices() {
            [] => {}
            &[mu] => integrand[mu] += &part * &phi,
            &[a, b] => {
                // S^{ab} phi_b - (d_b S^{ab}) phi for each ordered pair
                let weight = if a == b { Coeff::one() } else { half.clone() };
                let pairs: &[(usize, usize)] = if a == b { &[(a, a)] } else { &[(a, b), (b, a)] };
                for &(mu, nu) in pairs {
                    let term = &(&part * &phi_d(nu)) - &(&d_poly(&part, nu, sys)? * &phi);
                    integrand[mu] += term.scale(&weight);
                }
            }
            _ => unreachable!(),
        }
    }
    let mut lambda: Vec<Poly> = integrand.iter().map(integrate_lambda).collect();

    let (h, h0) = zero_field_poly(l, sys)?;
    lambda[0] += &h0;

    let mut div = Poly::zero();
    for (mu, c) in lambda.iter().enumerate() {
        div += d_poly(c, mu, sys)?;
    }
    if div != *l {
        return Err(Error::Internal(format!(
            "homotopy potential divergence differs from the density by {}",
            print(&Expr::from_poly(&(&div - l)), sys)
        )));
    }
    Ok(HomotopyPolys {
        lambda,
        zero_field_part: h,
        h0,
    })
}

/// Field-free part `h = L|_{phi=0}` and its antiderivative along `x0`.
pub fn zero_field_part(l: &Expr, sys: &FieldSystem) -> Result<(Expr, Expr)> {
    let (h, h0) = zero_field_poly(&l.to_poly()?, sys)?;
    Ok((Expr::from_poly(&h), Expr::from_poly(&h0)))
}

pub(crate) fn zero_field_poly(l: &Poly, sys: &FieldSystem) -> Result<(Poly, Poly)> {
    let zero: HashMap<Symbol, Poly> = jet_vars(l).into_iter().map(|s| (s, Poly::zero())).collect();
    let h = l.substitute(&zero);
    let h0 = antiderivative_x0(&h, sys)?;
    Ok((h, h0))
}

fn antiderivative_name(name: &str, sys: &FieldSystem) -> Result<Symbol> {
    let decl = sys
        .extern_decl(name)
        .ok_or_else(|| Error::UndeclaredExtern(name.to_string()))?;
    let anti = decl.antiderivative.as_deref().ok_or_else(|| {
        Error::MissingAntiderivative(format!("extern `{name}` has no declared antiderivative"))
    })?;
    let interned = sys
        .extern_name(anti)
        .ok_or_else(|| Error::UndeclaredExtern(anti.to_string()))?;
    Ok(Symbol::Extern {
        name: interned,
        arg: decl.arg,
    })
}

/// Term-by-term antiderivative along `x0` of a field-free polynomial.
/// `x0^k G(x0)` is integrated by parts through `k + 1` declared
/// antiderivatives of `G`; products of several `x0`-externs are rejected.
pub(crate) fn antiderivative_x0(h: &Poly, sys: &FieldSystem) -> Result<Poly> {
    let x0 = Symbol::Coord(0);
    let mut out = Poly::zero();
    for (m, c) in h.terms() {
        let k = m.exponent(&x0);
        let mut rest = Monomial::one();
        let mut along: Vec<(&Symbol, u32)> = Vec::new();
        for (s, e) in m.factors() {
            match s {
                Symbol::Coord(0) => {}
                Symbol::Extern { arg: 0, .. } => along.push((s, *e)),
                _ => rest = rest.mul(&Monomial::power(s.clone(), *e)),
            }
        }
        match along.as_slice() {
            [] => {
                let term = Monomial::power(x0.clone(), k + 1).mul(&rest);
                out.add_term(term, c * ratio(1, k as i64 + 1));
            }
            [(Symbol::Extern { name, .. }, 1)] => {
                // int x^k G = sum_j (-1)^j k!/(k-j)! x^(k-j) G_(j+1)
                let mut anti = antiderivative_name(name, sys)?;
                let mut factor = coeff(1);
                for j in 0..=k {
                    let term = Monomial::power(x0.clone(), k - j)
                        .mul(&Monomial::symbol(anti.clone()))
                        .mul(&rest);
                    out.add_term(term, c * &factor);
                    if j < k {
                        factor = -factor * coeff((k - j) as i64);
                        let Symbol::Extern { name, .. } = &anti else {
                            unreachable!()
                        };
                        anti = antiderivative_name(&name.clone(), sys)?;
                    }
                }
            }
            _ => {
                let names: Vec<String> = along.iter().map(|(s, e)| format!("{s}^{e}")).collect();
                return Err(Error::MissingAntiderivative(format!(
                    "no antiderivative rule for the product {}",
                    names.join(" * ")
                )));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, ExternDecl, ExternDef};
    use crate::jet::total_derivative;

    fn sys() -> FieldSystem {
        let mut s = FieldSystem::new(1, ["q"]).unwrap();
        s.declare_family(
            "F",
            0,
            ExternDef::Sin {
                amp: 1.0,
                omega: 1.0,
                phase: 0.0,
            },
            &["Fdot"],
            &["Fint", "Fint2"],
        )
        .unwrap();
        s.declare_extern(
            "V",
            ExternDecl {
                arg: 0,
                derivative: None,
                antiderivative: Some("Vint".into()),
                def: None,
            },
        )
        .unwrap();
        s.declare_extern(
            "Vint",
            ExternDecl {
                arg: 0,
                derivative: Some("V".into()),
                antiderivative: None,
                def: None,
            },
        )
        .unwrap();
        s.declare_extern(
            "G",
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

    fn lambda0(text: &str) -> Expr {
        homotopy_potential(&p(text), &sys()).unwrap().lambda[0].clone()
    }

    #[test]
    fn potentials_for_one_dimensional_fixtures() {
        assert!(lambda0("(* 2 q (d q 0))").equiv(&p("(pow q 2)")).unwrap());
        assert!(lambda0("(d q 0)").equiv(&p("q")).unwrap());
        assert!(lambda0("(+ (* q (d q 0 0)) (pow (d q 0) 2))")
            .equiv(&p("(* q (d q 0))"))
            .unwrap());
        assert!(lambda0("(F x0)").equiv(&p("(Fint x0)")).unwrap());
        assert!(lambda0("0").is_zero().unwrap());
    }

    #[test]
    fn rejects_non_null_density() {
        let err = homotopy_potential(&p("(* 1/2 (pow (d q 0) 2))"), &sys()).unwrap_err();
        assert!(matches!(err, Error::NotNullLagrangian { field: 0, .. }));
    }

    #[test]
    fn missing_antiderivative_names_the_extern() {
        let err = homotopy_potential(&p("(G x0)"), &sys()).unwrap_err();
        assert_eq!(
            err,
            Error::MissingAntiderivative("extern `G` has no declared antiderivative".into())
        );
    }

    #[test]
    fn zero_field_part_examples() {
        let s = sys();
        let (h, h0) = zero_field_part(&p("(+ (* 1/2 (pow (d q 0) 2)) (* q (F x0)))"), &s).unwrap();
        assert!(h.is_zero().unwrap() && h0.is_zero().unwrap());
        let (h, h0) = zero_field_part(&p("(+ (* 1/2 (pow (d q 0) 2)) (* -1 (V x0)))"), &s).unwrap();
        assert!(h.equiv(&p("(* -1 (V x0))")).unwrap());
        assert!(h0.equiv(&p("(* -1 (Vint x0))")).unwrap());
        let (h, h0) = zero_field_part(&p("x0"), &s).unwrap();
        assert!(h.equiv(&p("x0")).unwrap());
        assert!(h0.equiv(&p("(* 1/2 (pow x0 2))")).unwrap());
    }

    #[test]
    fn integration_by_parts_along_x0() {
        let s = sys();
        let (_, h0) = zero_field_part(&p("(* x0 (F x0))"), &s).unwrap();
        assert!(h0
            .equiv(&p("(+ (* x0 (Fint x0)) (* -1 (Fint2 x0)))"))
            .unwrap());
        assert!(total_derivative(&h0, 0, &s)
            .unwrap()
            .equiv(&p("(* x0 (F x0))"))
            .unwrap());
        assert!(matches!(
            zero_field_part(&p("(pow (F x0) 2)"), &s),
            Err(Error::MissingAntiderivative(_))
        ));
    }

    #[test]
    fn mixed_second_derivatives_in_two_dimensions() {
        // d_0(u u_1) + d_1(u_0 u_1) contains the mixed jet u_{01}
        let s = FieldSystem::new(2, ["u"]).unwrap();
        let l = parse(
            "(+ (* (d u 0) (d u 1)) (* u (d u 0 1)) (* (d u 0 1) (d u 1)) (* (d u 0) (d u 1 1)))",
            &s,
        )
        .unwrap();
        let r = homotopy_potential(&l, &s).unwrap();
        let lam: Vec<Poly> = r.lambda.iter().map(|e| e.to_poly().unwrap()).collect();
        let div = d_poly(&lam[0], 0, &s).unwrap() + d_poly(&lam[1], 1, &s).unwrap();
        assert_eq!(div, l.to_poly().unwrap());
    }
}
