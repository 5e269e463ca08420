//! Bare and improved currents, the obstruction function, quasi-symmetry
//! classification and the off-shell Noether identity.

mod region;

pub use region::{
    fixed_region_check, FieldSample, FixedRegionReport, Region, RegionCheckConfig, SampleIntegrals,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{print, Expr, FieldSystem, Poly};
use crate::homotopy::{homotopy_poly, HomotopyResult};
use crate::jet::{d_poly, el_all, to_exprs, to_polys, Generator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    ExactSymmetry,
    QuasiSymmetry,
    NotQuasiSymmetry,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoetherReport {
    /// Euler-Lagrange derivatives of the density, one per field.
    pub euler_lagrange: Vec<Expr>,
    /// Bare current j^mu.
    pub j: Vec<Expr>,
    /// Obstruction f = EL . Y0 + d_mu j^mu.
    pub f: Expr,
    pub classification: Classification,
    /// Divergence potential with f = d_mu f_pot^mu.
    pub f_pot: Option<Vec<Expr>>,
    /// Improved current J^mu = j^mu - f_pot^mu.
    pub improved: Option<Vec<Expr>>,
    /// d_mu J^mu + EL . Y0, zero whenever `improved` is present.
    pub residual: Option<Expr>,
    /// EL(f) per field when f is not a divergence.
    pub el_of_f: Option<Vec<Expr>>,
    pub homotopy: Option<HomotopyResult>,
}

fn require_first_order(l: &Poly, sys: &FieldSystem) -> Result<()> {
    if l.field_order() > 1 {
        return Err(Error::Unsupported(format!(
            "density must be first order in the jets: {}",
            print(&Expr::from_poly(l), sys)
        )));
    }
    Ok(())
}

fn div(currents: &[Poly], sys: &FieldSystem) -> Result<Poly> {
    let mut acc = Poly::zero();
    for (mu, c) in currents.iter().enumerate() {
        acc += d_poly(c, mu, sys)?;
    }
    Ok(acc)
}

fn contract(el: &[Poly], y0: &[Poly]) -> Poly {
    el.iter().zip(y0).map(|(e, y)| e * y).sum()
}

pub(crate) fn bare_current_poly(l: &Poly, gen: &Generator, sys: &FieldSystem) -> Result<Vec<Poly>> {
    require_first_order(l, sys)?;
    Ok((0..sys.dim())
        .map(|mu| {
            let mut j = l * &gen.x_polys()[mu];
            for (alpha, y0) in gen.y0_polys().iter().enumerate() {
                j += &l.partial(&crate::expr::Symbol::jet(alpha, &[mu])) * y0;
            }
            j
        })
        .collect())
}

/// j^mu = (dL/dphi^alpha_mu) Y0^alpha + L X^mu.
pub fn bare_current(l: &Expr, gen: &Generator, sys: &FieldSystem) -> Result<Vec<Expr>> {
    Ok(to_exprs(&bare_current_poly(&l.to_poly()?, gen, sys)?))
}

fn obstruction_parts(
    l: &Poly,
    gen: &Generator,
    sys: &FieldSystem,
) -> Result<(Vec<Poly>, Vec<Poly>, Poly)> {
    let j = bare_current_poly(l, gen, sys)?;
    let el = el_all(l, sys)?;
    let f = contract(&el, gen.y0_polys()) + div(&j, sys)?;
    Ok((el, j, f))
}

/// f = EL(L) . Y0 + d_mu j^mu.
pub fn obstruction(l: &Expr, gen: &Generator, sys: &FieldSystem) -> Result<Expr> {
    Ok(Expr::from_poly(
        &obstruction_parts(&l.to_poly()?, gen, sys)?.2,
    ))
}

fn residual_poly(
    el: &[Poly],
    gen: &Generator,
    improved: &[Poly],
    sys: &FieldSystem,
) -> Result<Poly> {
    Ok(div(improved, sys)? + contract(el, gen.y0_polys()))
}

/// d_mu J^mu + EL(L) . Y0; zero exactly when the off-shell identity holds.
pub fn noether_identity_residual(
    l: &Expr,
    gen: &Generator,
    improved: &[Expr],
    sys: &FieldSystem,
) -> Result<Expr> {
    if improved.len() != sys.dim() {
        return Err(Error::InvalidGenerator(format!(
            "current has {} components, expected {}",
            improved.len(),
            sys.dim()
        )));
    }
    let el = el_all(&l.to_poly()?, sys)?;
    Ok(Expr::from_poly(&residual_poly(
        &el,
        gen,
        &to_polys(improved)?,
        sys,
    )?))
}

/// Runs the full pipeline: bare current, obstruction, classification,
/// divergence potential of the obstruction and improved current.
pub fn classify(l: &Expr, gen: &Generator, sys: &FieldSystem) -> Result<NoetherReport> {
    let l = l.to_poly()?;
    let (el, j, f) = obstruction_parts(&l, gen, sys)?;
    let mut report = NoetherReport {
        euler_lagrange: to_exprs(&el),
        j: to_exprs(&j),
        f: Expr::from_poly(&f),
        classification: Classification::NotQuasiSymmetry,
        f_pot: None,
        improved: None,
        residual: None,
        el_of_f: None,
        homotopy: None,
    };

    let f_pot = if f.is_zero() {
        report.classification = Classification::ExactSymmetry;
        vec![Poly::zero(); sys.dim()]
    } else {
        let el_f = el_all(&f, sys)?;
        if el_f.iter().any(|e| !e.is_zero()) {
            log::debug!("obstruction is not a divergence");
            report.el_of_f = Some(to_exprs(&el_f));
            return Ok(report);
        }
        report.classification = Classification::QuasiSymmetry;
        let hom = homotopy_poly(&f, sys)?;
        report.homotopy = Some(HomotopyResult {
            lambda: to_exprs(&hom.lambda),
            zero_field_part: Expr::from_poly(&hom.zero_field_part),
            h0: Expr::from_poly(&hom.h0),
        });
        hom.lambda
    };
    let improved: Vec<Poly> = j.iter().zip(&f_pot).map(|(a, b)| a - b).collect();
    let residual = residual_poly(&el, gen, &improved, sys)?;
    if !residual.is_zero() {
        return Err(Error::Internal(format!(
            "off-shell Noether identity fails with residual {}",
            print(&Expr::from_poly(&residual), sys)
        )));
    }
    report.f_pot = Some(to_exprs(&f_pot));
    report.improved = Some(to_exprs(&improved));
    report.residual = Some(Expr::from_poly(&residual));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, ExternDef};

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
            &["Fint"],
        )
        .unwrap();
        s.declare_family(
            "V",
            0,
            ExternDef::Cos {
                amp: 1.0,
                omega: 1.0,
                phase: 0.0,
            },
            &["Vdot"],
            &["Vint"],
        )
        .unwrap();
        s
    }

    fn p(t: &str) -> Expr {
        parse(t, &sys()).unwrap()
    }

    fn gen(x: &str, y0: &str) -> Generator {
        Generator::new(&[p(x)], &[p(y0)], &sys()).unwrap()
    }

    #[test]
    fn zero_generator_gives_zero_current_and_obstruction() {
        let s = sys();
        let l = p("(+ (* 1/2 (pow (d q 0) 2)) (* q (F x0)))");
        let g = Generator::zero(&s);
        assert!(bare_current(&l, &g, &s).unwrap()[0].is_zero().unwrap());
        assert!(obstruction(&l, &g, &s).unwrap().is_zero().unwrap());
    }

    #[test]
    fn free_particle_shift_is_exact() {
        let s = sys();
        let r = classify(&p("(* 1/2 (pow (d q 0) 2))"), &gen("0", "1"), &s).unwrap();
        assert_eq!(r.classification, Classification::ExactSymmetry);
        assert!(r.improved.unwrap()[0].equiv(&p("(d q 0)")).unwrap());
        assert!(r.f_pot.unwrap()[0].is_zero().unwrap());
    }

    #[test]
    fn galilean_boost_is_quasi() {
        let s = sys();
        let r = classify(&p("(* 1/2 (pow (d q 0) 2))"), &gen("0", "x0"), &s).unwrap();
        assert_eq!(r.classification, Classification::QuasiSymmetry);
        assert!(r.f.equiv(&p("(d q 0)")).unwrap());
        assert!(r.f_pot.as_ref().unwrap()[0].equiv(&p("q")).unwrap());
        assert!(r.improved.as_ref().unwrap()[0]
            .equiv(&p("(+ (* x0 (d q 0)) (* -1 q))"))
            .unwrap());
        assert!(r.residual.unwrap().is_zero().unwrap());
    }

    #[test]
    fn quadratic_shift_is_not_quasi() {
        let s = sys();
        let r = classify(&p("(* 1/2 (pow (d q 0) 2))"), &gen("0", "(pow q 2)"), &s).unwrap();
        assert_eq!(r.classification, Classification::NotQuasiSymmetry);
        assert!(r.improved.is_none() && r.residual.is_none());
        assert!(!r.el_of_f.unwrap()[0].is_zero().unwrap());
    }

    #[test]
    fn corrupted_current_is_detected() {
        let s = sys();
        let l = p("(+ (* 1/2 (pow (d q 0) 2)) (* q (F x0)))");
        let g = gen("0", "1");
        let good = p("(+ (d q 0) (* -1 (Fint x0)))");
        assert!(
            noether_identity_residual(&l, &g, std::slice::from_ref(&good), &s)
                .unwrap()
                .is_zero()
                .unwrap()
        );
        let bad = good + p("q");
        let res = noether_identity_residual(&l, &g, &[bad], &s).unwrap();
        assert!(res.equiv(&p("(d q 0)")).unwrap());
    }

    #[test]
    fn second_order_density_is_rejected() {
        let s = sys();
        assert!(matches!(
            bare_current(&p("(* q (d q 0 0))"), &gen("0", "1"), &s),
            Err(Error::Unsupported(_))
        ));
    }
}
