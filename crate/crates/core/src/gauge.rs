//! Minimal coupling of a global u(1) quasi-symmetry.
//!
//! The local transformation acts by `delta phi^a = eps Y0^a` and
//! `delta A_mu = d_mu eps`, where `eps` is a formal first-order
//! infinitesimal with its own jets. The covariant derivative is
//! `D_mu phi^a = phi^a_mu - A_mu Y0^a`, and the gauged density is
//! `L~ + A_mu f~^mu`, with `~` replacing every `phi_mu` by `D_mu phi`.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{print, Expr, FieldSystem, MultiIndex, Poly, Symbol};
use crate::jet::{d_multi, d_poly, prolong_poly, to_exprs, to_polys, Generator};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AssumptionViolation {
    HorizontalGenerator { mu: usize },
    DerivativeDependentVertical { alpha: usize },
}

impl fmt::Display for AssumptionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssumptionViolation::HorizontalGenerator { mu } => {
                write!(f, "X ≠ 0 (component X^{mu})")
            }
            AssumptionViolation::DerivativeDependentVertical { alpha } => {
                write!(f, "Y0 depends on ∂φ (component Y0^{alpha})")
            }
        }
    }
}

/// Minimal-coupling preconditions: `X = 0` and `Y0 = Y0(phi, x)`.
/// Returns every violated clause; empty means the generator qualifies.
pub fn check_assumptions(gen: &Generator) -> Vec<AssumptionViolation> {
    let mut out = Vec::new();
    for (mu, x) in gen.x_polys().iter().enumerate() {
        if !x.is_zero() {
            out.push(AssumptionViolation::HorizontalGenerator { mu });
        }
    }
    for (alpha, y) in gen.y0_polys().iter().enumerate() {
        if y.field_order() > 0 {
            out.push(AssumptionViolation::DerivativeDependentVertical { alpha });
        }
    }
    out
}

fn require_assumptions(gen: &Generator) -> Result<()> {
    match check_assumptions(gen).first() {
        Some(v) => Err(Error::AssumptionViolated(v.to_string())),
        None => Ok(()),
    }
}

fn minimal_extension_poly(h: &Poly, y0: &[Poly], sys: &FieldSystem) -> Result<Poly> {
    if h.field_order() > 1 {
        return Err(Error::Unsupported(format!(
            "minimal extension needs a first-order expression: {}",
            print(&Expr::from_poly(h), sys)
        )));
    }
    let mut bindings = HashMap::new();
    for (alpha, y) in y0.iter().enumerate() {
        for mu in 0..sys.dim() {
            let cov =
                &Poly::symbol(Symbol::jet(alpha, &[mu])) - &(&Poly::symbol(Symbol::gauge(mu)) * y);
            bindings.insert(Symbol::jet(alpha, &[mu]), cov);
        }
    }
    Ok(h.substitute(&bindings))
}

/// Replaces every phi^a_mu by D_mu phi^a = phi^a_mu - A_mu Y0^a.
pub fn minimal_extension(h: &Expr, y0: &[Expr], sys: &FieldSystem) -> Result<Expr> {
    if y0.len() != sys.num_fields() {
        return Err(Error::InvalidGenerator(format!(
            "expected {} components of Y0",
            sys.num_fields()
        )));
    }
    Ok(Expr::from_poly(&minimal_extension_poly(
        &h.to_poly()?,
        &to_polys(y0)?,
        sys,
    )?))
}

fn eps() -> Poly {
    Poly::symbol(Symbol::eps())
}

/// First-order variation under the local transformation generated by `y0`.
pub(crate) fn gauge_variation_poly(p: &Poly, y0: &[Poly], sys: &FieldSystem) -> Result<Poly> {
    let eps = eps();
    p.derivation(|s| match s {
        Symbol::Jet { field, derivs } => {
            d_multi(&(&eps * &y0[*field]), derivs.indices(), sys).map(Some)
        }
        Symbol::Gauge { comp, derivs } => Ok(Some(Poly::symbol(Symbol::Eps {
            derivs: derivs.with(*comp),
        }))),
        _ => Ok(None),
    })
}

pub fn gauge_variation(e: &Expr, gen: &Generator, sys: &FieldSystem) -> Result<Expr> {
    require_assumptions(gen)?;
    Ok(Expr::from_poly(&gauge_variation_poly(
        &e.to_poly()?,
        gen.y0_polys(),
        sys,
    )?))
}

/// delta(D_mu phi^a) - eps D_mu Y0^a, indexed `[mu][alpha]`; zero for
/// every admissible generator.
pub fn covariance_residual(gen: &Generator, sys: &FieldSystem) -> Result<Vec<Vec<Expr>>> {
    require_assumptions(gen)?;
    let y0 = gen.y0_polys();
    let eps = eps();
    let mut out = Vec::with_capacity(sys.dim());
    for mu in 0..sys.dim() {
        let a_mu = Poly::symbol(Symbol::gauge(mu));
        let mut row = Vec::with_capacity(y0.len());
        for (alpha, y) in y0.iter().enumerate() {
            let cov_phi = &Poly::symbol(Symbol::jet(alpha, &[mu])) - &(&a_mu * y);
            let lhs = gauge_variation_poly(&cov_phi, y0, sys)?;
            let mut cov_y = d_poly(y, mu, sys)?;
            for (beta, yb) in y0.iter().enumerate() {
                cov_y -= &(&a_mu * &(yb * &y.partial(&Symbol::field(beta))));
            }
            row.push(Expr::from_poly(&(lhs - &eps * &cov_y)));
        }
        out.push(row);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PotentialConditions {
    /// df^mu/dphi^a_nu = -(mu <-> nu).
    pub antisymmetric: bool,
    /// (df^mu/dphi^a_nu) Y0^a = 0.
    pub contraction: bool,
}

fn potential_conditions_poly(
    f_pot: &[Poly],
    y0: &[Poly],
    sys: &FieldSystem,
) -> (PotentialConditions, Option<String>, Option<String>) {
    let d = sys.dim();
    let partial =
        |mu: usize, alpha: usize, nu: usize| f_pot[mu].partial(&Symbol::jet(alpha, &[nu]));
    let mut contraction_fail = None;
    let mut antisym_fail = None;
    for mu in 0..d {
        for nu in 0..d {
            let c: Poly = (0..y0.len()).map(|a| &partial(mu, a, nu) * &y0[a]).sum();
            if !c.is_zero() && contraction_fail.is_none() {
                contraction_fail = Some(format!(
                    "contraction condition (df^{mu}/dphi_{nu}) Y0 = 0 fails: {}",
                    print(&Expr::from_poly(&c), sys)
                ));
            }
            for alpha in 0..y0.len() {
                let s = &partial(mu, alpha, nu) + &partial(nu, alpha, mu);
                if !s.is_zero() && antisym_fail.is_none() {
                    antisym_fail = Some(format!(
                        "antisymmetry condition df^{mu}/dphi^{alpha}_{nu} = -df^{nu}/dphi^{alpha}_{mu} fails: {}",
                        print(&Expr::from_poly(&s), sys)
                    ));
                }
            }
        }
    }
    (
        PotentialConditions {
            antisymmetric: antisym_fail.is_none(),
            contraction: contraction_fail.is_none(),
        },
        contraction_fail,
        antisym_fail,
    )
}

/// Evaluates both conditions on a candidate potential f^mu.
pub fn potential_conditions(
    f_pot: &[Expr],
    gen: &Generator,
    sys: &FieldSystem,
) -> Result<PotentialConditions> {
    Ok(potential_conditions_poly(&to_polys(f_pot)?, gen.y0_polys(), sys).0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugedSystem {
    pub l_gauged: Expr,
    pub f_tilde: Vec<Expr>,
    /// delta L_gauged - d_mu(eps f~^mu); always zero on success.
    pub transform_residual: Expr,
    pub conditions: PotentialConditions,
}

/// Builds the minimally coupled density L~ + A_mu f~^mu and verifies that
/// its local variation is the divergence d_mu(eps f~^mu).
pub fn gauge_lagrangian(
    l: &Expr,
    gen: &Generator,
    f_pot: &[Expr],
    sys: &FieldSystem,
) -> Result<GaugedSystem> {
    require_assumptions(gen)?;
    let l = l.to_poly()?;
    if l.field_order() > 1 {
        return Err(Error::Unsupported(
            "gauging needs a first-order density".into(),
        ));
    }
    if f_pot.len() != sys.dim() {
        return Err(Error::InvalidGenerator(format!(
            "potential has {} components, expected {}",
            f_pot.len(),
            sys.dim()
        )));
    }
    let f_pot = to_polys(f_pot)?;
    if f_pot.iter().any(|p| p.field_order() > 1) {
        return Err(Error::FPotCondition(
            "f^mu depends on second derivatives".into(),
        ));
    }
    let y0 = gen.y0_polys();

    let f = prolong_poly(y0, &l, sys)?;
    let mut div = Poly::zero();
    for (mu, c) in f_pot.iter().enumerate() {
        div += d_poly(c, mu, sys)?;
    }
    if div != f {
        return Err(Error::FPotCondition(format!(
            "d_mu f^mu differs from f by {}",
            print(&Expr::from_poly(&(&div - &f)), sys)
        )));
    }

    let (conditions, contraction_fail, antisym_fail) = potential_conditions_poly(&f_pot, y0, sys);
    if let Some(msg) = contraction_fail.or(antisym_fail) {
        return Err(Error::FPotCondition(msg));
    }

    let l_tilde = minimal_extension_poly(&l, y0, sys)?;
    let f_tilde = f_pot
        .iter()
        .map(|p| minimal_extension_poly(p, y0, sys))
        .collect::<Result<Vec<_>>>()?;
    let mut gauged = l_tilde;
    for (mu, ft) in f_tilde.iter().enumerate() {
        gauged += &Poly::symbol(Symbol::gauge(mu)) * ft;
    }

    let eps = eps();
    let mut residual = gauge_variation_poly(&gauged, y0, sys)?;
    for (mu, ft) in f_tilde.iter().enumerate() {
        residual -= &d_poly(&(&eps * ft), mu, sys)?;
    }
    if !residual.is_zero() {
        return Err(Error::Internal(format!(
            "gauged density is not quasi-invariant: residual {}",
            print(&Expr::from_poly(&residual), sys)
        )));
    }
    Ok(GaugedSystem {
        l_gauged: Expr::from_poly(&gauged),
        f_tilde: to_exprs(&f_tilde),
        transform_residual: Expr::from_poly(&residual),
        conditions,
    })
}

/// Sets A_mu and all its derivatives to zero.
pub fn drop_gauge_field(e: &Expr) -> Result<Expr> {
    let p = e.to_poly()?;
    let bindings: HashMap<Symbol, Poly> = p
        .symbols()
        .into_iter()
        .filter(|s| matches!(s, Symbol::Gauge { .. }))
        .map(|s| (s, Poly::zero()))
        .collect();
    Ok(Expr::from_poly(&p.substitute(&bindings)))
}

/// F_{mu nu} as a polynomial in the gauge jets.
pub fn field_strength(mu: usize, nu: usize) -> Expr {
    let d = |comp: usize, by: usize| {
        Expr::Sym(Symbol::Gauge {
            comp,
            derivs: MultiIndex::new(vec![by]),
        })
    };
    d(nu, mu) - d(mu, nu)
}
