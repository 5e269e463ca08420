//! Numeric layer for one-dimensional base spaces: RK4 integration of the
//! Euler-Lagrange equations, currents along trajectories, finite-difference
//! cross-checks of total derivatives and sample fields for region checks.

mod random;

pub use random::{
    random_divergence, random_lagrangian, random_polynomial, random_potential, RandomBounds,
};

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{coeff_to_f64, print, Expr, ExternDef, FieldSystem, Point, Poly, Symbol};
use crate::jet::{d_poly, el_all, Generator};
use crate::noether::{FieldSample, NoetherReport};

/// Initial-value problem on `[t0, t1]` with a fixed RK4 step.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub system: FieldSystem,
    pub lagrangian: Expr,
    pub generator: Generator,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub q0: Vec<f64>,
    pub qdot0: Vec<f64>,
    /// Relative drift tolerance for conserved currents.
    pub tol_c: f64,
    /// Finite-difference tolerance.
    pub tol_fd: f64,
}

impl Scenario {
    /// Number of RK4 steps; fails unless the step divides the interval.
    pub fn steps(&self) -> Result<usize> {
        if self.system.dim() != 1 {
            return Err(Error::InvalidScenario(
                "numeric integration needs a one-dimensional base".into(),
            ));
        }
        let n = self.system.num_fields();
        if self.q0.len() != n || self.qdot0.len() != n {
            return Err(Error::InvalidScenario(format!(
                "initial data must have {n} components"
            )));
        }
        if self.t0.is_nan() || self.t1.is_nan() || self.t0 >= self.t1 {
            return Err(Error::InvalidScenario(format!(
                "t0 = {} is not below t1 = {}",
                self.t0, self.t1
            )));
        }
        if self.dt.is_nan() || self.dt <= 0.0 {
            return Err(Error::InvalidScenario(format!(
                "step {} is not positive",
                self.dt
            )));
        }
        grid_steps(self.t0, self.t1, self.dt).ok_or_else(|| {
            Error::InvalidScenario(format!(
                "step {} does not divide [{}, {}]",
                self.dt, self.t0, self.t1
            ))
        })
    }
}

fn grid_steps(t0: f64, t1: f64, dt: f64) -> Option<usize> {
    let len = t1 - t0;
    let n = (len / dt).round();
    (n >= 1.0 && (n * dt - len).abs() <= 1e-9 * len.max(1.0)).then_some(n as usize)
}

/// Slot-indexed evaluator for polynomials on a d = 1 jet point
/// `[t, q.., qdot.., qddot..]`.
#[derive(Clone, Debug)]
struct Compiled {
    terms: Vec<(f64, Vec<(Slot, i32)>)>,
}

#[derive(Clone, Debug)]
enum Slot {
    Value(usize),
    Extern(ExternDef),
}

impl Compiled {
    fn new(p: &Poly, sys: &FieldSystem) -> Result<Self> {
        let n = sys.num_fields();
        let slot = |s: &Symbol| -> Result<Slot> {
            match s {
                Symbol::Coord(0) => Ok(Slot::Value(0)),
                Symbol::Jet { field, derivs } => match derivs.order() {
                    0 => Ok(Slot::Value(1 + field)),
                    1 => Ok(Slot::Value(1 + n + field)),
                    2 => Ok(Slot::Value(1 + 2 * n + field)),
                    _ => Err(Error::JetOrderOverflow(print(&Expr::Sym(s.clone()), sys))),
                },
                Symbol::Extern { name, .. } => {
                    let decl = sys
                        .extern_decl(name)
                        .ok_or_else(|| Error::UndeclaredExtern(name.to_string()))?;
                    decl.def
                        .clone()
                        .map(Slot::Extern)
                        .ok_or_else(|| Error::MissingDefinition(name.to_string()))
                }
                other => Err(Error::MissingValue(other.to_string())),
            }
        };
        let terms = p
            .terms()
            .map(|(m, c)| {
                let factors = m
                    .factors()
                    .iter()
                    .map(|(s, k)| Ok((slot(s)?, *k as i32)))
                    .collect::<Result<Vec<_>>>()?;
                Ok((coeff_to_f64(c), factors))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Compiled { terms })
    }

    fn eval(&self, state: &[f64]) -> f64 {
        let t = state[0];
        self.terms
            .iter()
            .map(|(c, factors)| {
                factors.iter().fold(*c, |acc, (slot, k)| {
                    let v = match slot {
                        Slot::Value(i) => state[*i],
                        Slot::Extern(def) => def.eval(t),
                    };
                    acc * v.powi(*k)
                })
            })
            .sum()
    }
}

/// Explicit form q'' = M^{-1} b of the Euler-Lagrange system, with
/// EL_a = b_a - M_ab q''_b.
struct Dynamics {
    n: usize,
    mass: Vec<Compiled>,
    rhs: Vec<Compiled>,
}

impl Dynamics {
    fn new(l: &Expr, sys: &FieldSystem) -> Result<Self> {
        let l = l.to_poly()?;
        if l.field_order() > 1 {
            return Err(Error::Unsupported(
                "numeric integration needs a first-order Lagrangian".into(),
            ));
        }
        let n = sys.num_fields();
        let el = el_all(&l, sys)?;
        let acc: Vec<Symbol> = (0..n).map(|a| Symbol::jet(a, &[0, 0])).collect();
        let zero_acc = acc.iter().map(|s| (s.clone(), Poly::zero())).collect();
        let mut mass = Vec::with_capacity(n * n);
        let mut rhs = Vec::with_capacity(n);
        for e in &el {
            for s in &acc {
                mass.push(Compiled::new(&-e.partial(s), sys)?);
            }
            rhs.push(Compiled::new(&e.substitute(&zero_acc), sys)?);
        }
        Ok(Dynamics { n, mass, rhs })
    }

    fn acceleration(&self, t: f64, q: &[f64], qd: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let mut state = Vec::with_capacity(1 + 3 * n);
        state.push(t);
        state.extend_from_slice(q);
        state.extend_from_slice(qd);
        state.resize(1 + 3 * n, 0.0);
        let m = DMatrix::from_iterator(n, n, self.mass.iter().map(|c| c.eval(&state))).transpose();
        let b = DVector::from_iterator(n, self.rhs.iter().map(|c| c.eval(&state)));
        match m.lu().solve(&b) {
            Some(x) if x.iter().all(|v| v.is_finite()) => Ok(x.iter().copied().collect()),
            _ => Err(Error::SingularMassMatrix(t)),
        }
    }
}

/// Sampled solution. `q[a][i]` is field `a` at `times[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub q: Vec<Vec<f64>>,
    pub qdot: Vec<Vec<f64>>,
    pub qddot: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn num_fields(&self) -> usize {
        self.q.len()
    }

    fn state(&self, i: usize) -> Vec<f64> {
        let mut s = Vec::with_capacity(1 + 3 * self.num_fields());
        s.push(self.times[i]);
        s.extend(self.q.iter().map(|v| v[i]));
        s.extend(self.qdot.iter().map(|v| v[i]));
        s.extend(self.qddot.iter().map(|v| v[i]));
        s
    }

    fn point_from_state(s: &[f64], n: usize) -> Point {
        let mut p = Point::new(vec![s[0]]);
        for a in 0..n {
            p.set(Symbol::field(a), s[1 + a]);
            p.set(Symbol::jet(a, &[0]), s[1 + n + a]);
            p.set(Symbol::jet(a, &[0, 0]), s[1 + 2 * n + a]);
        }
        p
    }

    /// Jet point at sample `i`.
    pub fn point(&self, i: usize) -> Point {
        Trajectory::point_from_state(&self.state(i), self.num_fields())
    }

    /// Values of `e` at every sample.
    pub fn evaluate(&self, e: &Expr, sys: &FieldSystem) -> Result<Vec<f64>> {
        let c = Compiled::new(&e.to_poly()?, sys)?;
        Ok((0..self.len()).map(|i| c.eval(&self.state(i))).collect())
    }

    /// CSV with header `t,q0,qdot0,qddot0,q1,...`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = vec!["t".to_string()];
        for a in 0..self.num_fields() {
            header.extend([format!("q{a}"), format!("qdot{a}"), format!("qddot{a}")]);
        }
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.len() {
            let mut row = vec![format!("{:e}", self.times[i])];
            for a in 0..self.num_fields() {
                row.extend(
                    [self.q[a][i], self.qdot[a][i], self.qddot[a][i]].map(|v| format!("{v:e}")),
                );
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Index of the sample at `t`, if `t` lies on the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let s = (t - self.t0) / self.dt;
        let i = s.round();
        ((s - i).abs() <= 1e-6 && i >= 0.0 && (i as usize) < self.len()).then_some(i as usize)
    }

    /// Sub-trajectory between two grid times.
    pub fn window(&self, t0: f64, t1: f64) -> Result<Trajectory> {
        let (i, j) = match (self.index_of(t0), self.index_of(t1)) {
            (Some(i), Some(j)) if i < j => (i, j),
            _ => {
                return Err(Error::RegionOutsideDomain(format!(
                    "[{t0}, {t1}] is not a grid window of the trajectory"
                )))
            }
        };
        let cut = |v: &Vec<Vec<f64>>| v.iter().map(|f| f[i..=j].to_vec()).collect();
        Ok(Trajectory {
            t0: self.times[i],
            dt: self.dt,
            times: self.times[i..=j].to_vec(),
            q: cut(&self.q),
            qdot: cut(&self.qdot),
            qddot: cut(&self.qddot),
        })
    }

    /// Adds `amp sin(omega t)` to every field, with matching derivatives.
    /// The result is generally not a solution.
    pub fn perturbed(&self, amp: f64, omega: f64) -> Trajectory {
        let mut out = self.clone();
        for a in 0..self.num_fields() {
            for (i, &t) in self.times.iter().enumerate() {
                let (s, c) = (omega * t).sin_cos();
                out.q[a][i] += amp * s;
                out.qdot[a][i] += amp * omega * c;
                out.qddot[a][i] -= amp * omega * omega * s;
            }
        }
        out
    }
}

impl FieldSample for Trajectory {
    fn domain(&self) -> Vec<(f64, f64)> {
        vec![(self.times[0], *self.times.last().unwrap())]
    }

    /// Grid samples are returned exactly. Between samples q and qdot use
    /// cubic Hermite interpolation and qddot is linear.
    fn jet_point(&self, x: &[f64]) -> Result<Point> {
        let t = x[0];
        if let Some(i) = self.index_of(t) {
            return Ok(self.point(i));
        }
        let (lo, hi) = self.domain()[0];
        if t < lo || t > hi {
            return Err(Error::RegionOutsideDomain(format!(
                "t = {t} outside [{lo}, {hi}]"
            )));
        }
        let i = (((t - self.t0) / self.dt).floor() as usize).min(self.len() - 2);
        let h = self.dt;
        let s = (t - self.times[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let herm = |y: &[f64], dy: &[f64]| {
            h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1]
        };
        let n = self.num_fields();
        let mut state = vec![t];
        state.extend((0..n).map(|a| herm(&self.q[a], &self.qdot[a])));
        state.extend((0..n).map(|a| herm(&self.qdot[a], &self.qddot[a])));
        state.extend((0..n).map(|a| (1.0 - s) * self.qddot[a][i] + s * self.qddot[a][i + 1]));
        Ok(Trajectory::point_from_state(&state, n))
    }
}

/// Classical RK4 on the first-order system (q, qdot).
pub fn integrate(s: &Scenario) -> Result<Trajectory> {
    let steps = s.steps()?;
    let sys = &s.system;
    let dynamics = Dynamics::new(&s.lagrangian, sys)?;
    let n = sys.num_fields();
    let h = s.dt;
    let mut q = s.q0.clone();
    let mut qd = s.qdot0.clone();
    let mut tr = Trajectory {
        t0: s.t0,
        dt: h,
        times: Vec::with_capacity(steps + 1),
        q: vec![Vec::with_capacity(steps + 1); n],
        qdot: vec![Vec::with_capacity(steps + 1); n],
        qddot: vec![Vec::with_capacity(steps + 1); n],
    };
    let axpy = |x: &[f64], a: f64, y: &[f64]| -> Vec<f64> {
        x.iter().zip(y).map(|(x, y)| x + a * y).collect()
    };

    for i in 0..=steps {
        let t = if i == steps {
            s.t1
        } else {
            s.t0 + i as f64 * h
        };
        let acc = dynamics.acceleration(t, &q, &qd)?;
        tr.times.push(t);
        for a in 0..n {
            tr.q[a].push(q[a]);
            tr.qdot[a].push(qd[a]);
            tr.qddot[a].push(acc[a]);
        }
        if i == steps {
            break;
        }
        let k1q = qd.clone();
        let k1v = acc;
        let q2 = axpy(&q, h / 2.0, &k1q);
        let v2 = axpy(&qd, h / 2.0, &k1v);
        let k2v = dynamics.acceleration(t + h / 2.0, &q2, &v2)?;
        let q3 = axpy(&q, h / 2.0, &v2);
        let v3 = axpy(&qd, h / 2.0, &k2v);
        let k3v = dynamics.acceleration(t + h / 2.0, &q3, &v3)?;
        let q4 = axpy(&q, h, &v3);
        let v4 = axpy(&qd, h, &k3v);
        let k4v = dynamics.acceleration(t + h, &q4, &v4)?;
        for a in 0..n {
            q[a] += h / 6.0 * (k1q[a] + 2.0 * v2[a] + 2.0 * v3[a] + v4[a]);
            qd[a] += h / 6.0 * (k1v[a] + 2.0 * k2v[a] + 2.0 * k3v[a] + k4v[a]);
        }
    }
    log::debug!("integrated {} steps on [{}, {}]", steps, s.t0, s.t1);
    Ok(tr)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftReport {
    pub initial: f64,
    /// max |J(t) - J(t_i)|.
    pub max_drift: f64,
    /// max J - min J.
    pub spread: f64,
    /// Largest central-difference rate |dJ/dt| over interior samples.
    pub max_rate: f64,
    /// tol_c (1 + |J(t_i)|).
    pub threshold: f64,
    pub pass: bool,
}

/// Drift statistics of an arbitrary current component along `tr`.
pub fn current_drift(
    current: &Expr,
    tr: &Trajectory,
    tol_c: f64,
    sys: &FieldSystem,
) -> Result<DriftReport> {
    let values = tr.evaluate(current, sys)?;
    let initial = values[0];
    let max_drift = values
        .iter()
        .map(|v| (v - initial).abs())
        .fold(0.0, f64::max);
    let max_rate = values
        .windows(3)
        .map(|w| ((w[2] - w[0]) / (2.0 * tr.dt)).abs())
        .fold(0.0, f64::max);
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let threshold = tol_c * (1.0 + initial.abs());
    Ok(DriftReport {
        initial,
        max_drift,
        spread: hi - lo,
        max_rate,
        threshold,
        pass: max_drift <= threshold,
    })
}

/// Drift of the improved current J^0 of `report` along `tr`.
pub fn conservation_report(
    s: &Scenario,
    report: &NoetherReport,
    tr: &Trajectory,
) -> Result<DriftReport> {
    let j = report
        .improved
        .as_ref()
        .ok_or_else(|| Error::MissingCurrent("report has no improved current".into()))?;
    current_drift(&j[0], tr, s.tol_c, &s.system)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteDiffReport {
    pub max_error: f64,
    pub pass: bool,
}

/// Compares d_0 e against five-point central differences of e along `tr`;
/// the two samples at each end are skipped.
pub fn finite_diff_check(
    e: &Expr,
    tr: &Trajectory,
    tol_fd: f64,
    sys: &FieldSystem,
) -> Result<FiniteDiffReport> {
    let p = e.to_poly()?;
    if p.field_order() > 1 {
        return Err(Error::Unsupported(
            "finite-difference check needs a first-order expression".into(),
        ));
    }
    let values = tr.evaluate(e, sys)?;
    let exact = tr.evaluate(&Expr::from_poly(&d_poly(&p, 0, sys)?), sys)?;
    let h = tr.dt;
    let mut max_error: f64 = 0.0;
    for i in 2..values.len().saturating_sub(2) {
        let fd = (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2])
            / (12.0 * h);
        max_error = max_error.max((fd - exact[i]).abs());
    }
    Ok(FiniteDiffReport {
        max_error,
        pass: max_error <= tol_fd,
    })
}

/// A field configuration given by closed-form expressions in the base
/// coordinates, with exact symbolic derivatives.
#[derive(Clone, Debug)]
pub struct AnalyticField {
    system: FieldSystem,
    domain: Vec<(f64, f64)>,
    /// `jets[a]` lists (symbol, expression) for phi^a and all its
    /// derivatives up to second order.
    jets: Vec<Vec<(Symbol, Poly)>>,
}

impl AnalyticField {
    pub fn new(values: &[Expr], domain: Vec<(f64, f64)>, sys: &FieldSystem) -> Result<Self> {
        if values.len() != sys.num_fields() || domain.len() != sys.dim() {
            return Err(Error::InvalidScenario(
                "sample field shape does not match the system".into(),
            ));
        }
        let d = sys.dim();
        let mut jets = Vec::with_capacity(values.len());
        for (a, v) in values.iter().enumerate() {
            let p = v.to_poly()?;
            if p.has_field_jets() {
                return Err(Error::InvalidScenario(format!(
                    "sample field {a} depends on field jets"
                )));
            }
            let mut list = vec![(Symbol::field(a), p.clone())];
            for mu in 0..d {
                let pm = d_poly(&p, mu, sys)?;
                for nu in mu..d {
                    list.push((Symbol::jet(a, &[mu, nu]), d_poly(&pm, nu, sys)?));
                }
                list.push((Symbol::jet(a, &[mu]), pm));
            }
            jets.push(list);
        }
        Ok(AnalyticField {
            system: sys.clone(),
            domain,
            jets,
        })
    }
}

impl FieldSample for AnalyticField {
    fn domain(&self) -> Vec<(f64, f64)> {
        self.domain.clone()
    }

    fn jet_point(&self, x: &[f64]) -> Result<Point> {
        let base = Point::new(x.to_vec());
        let mut p = base.clone();
        for list in &self.jets {
            for (s, e) in list {
                p.set(s.clone(), base.eval(e, &self.system)?);
            }
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::noether::classify;
    use std::f64::consts::PI;

    fn forced() -> FieldSystem {
        let mut s = FieldSystem::new(1, ["q"]).unwrap();
        s.declare_family(
            "F",
            0,
            ExternDef::Sin {
                amp: 1.0,
                omega: 2.0 * PI,
                phase: 0.0,
            },
            &["Fdot"],
            &["Fint"],
        )
        .unwrap();
        s
    }

    fn scenario(sys: FieldSystem, l: &str, y0: &str, t1: f64, q0: f64, qd0: f64) -> Scenario {
        let lagrangian = parse(l, &sys).unwrap();
        let generator = Generator::vertical(&[parse(y0, &sys).unwrap()], &sys).unwrap();
        Scenario {
            system: sys,
            lagrangian,
            generator,
            t0: 0.0,
            t1,
            dt: 1e-3,
            q0: vec![q0],
            qdot0: vec![qd0],
            tol_c: 1e-6,
            tol_fd: 1e-6,
        }
    }

    fn oscillator() -> Scenario {
        let sys = FieldSystem::new(1, ["q"]).unwrap();
        scenario(
            sys,
            "(+ (* 1/2 (pow (d q 0) 2)) (* -1/2 (pow q 2)))",
            "(d q 0)",
            10.0,
            1.0,
            0.0,
        )
    }

    #[test]
    fn forced_particle_velocity() {
        let s = scenario(
            forced(),
            "(+ (* 1/2 (pow (d q 0) 2)) (* q (F x0)))",
            "1",
            1.0,
            0.0,
            0.0,
        );
        let tr = integrate(&s).unwrap();
        assert_eq!(tr.len(), 1001);
        for (i, &t) in tr.times.iter().enumerate() {
            let exact = (1.0 - (2.0 * PI * t).cos()) / (2.0 * PI);
            assert!((tr.qdot[0][i] - exact).abs() < 1e-8);
        }
        assert!(tr.qdot[0].last().unwrap().abs() < 1e-8);

        let r = classify(&s.lagrangian, &s.generator, &s.system).unwrap();
        let drift = conservation_report(&s, &r, &tr).unwrap();
        assert!(drift.max_drift < 1e-8 && drift.pass);

        let e = parse("(* q (F x0))", &s.system).unwrap();
        assert!(finite_diff_check(&e, &tr, 1e-6, &s.system).unwrap().pass);
    }

    #[test]
    fn free_particle_is_exact() {
        let sys = FieldSystem::new(1, ["q"]).unwrap();
        let s = scenario(sys, "(* 1/2 (pow (d q 0) 2))", "1", 1.0, 0.0, 1.0);
        let tr = integrate(&s).unwrap();
        for (i, &t) in tr.times.iter().enumerate() {
            assert!((tr.q[0][i] - t).abs() < 1e-10);
        }
    }

    #[test]
    fn oscillator_energy() {
        let s = oscillator();
        let tr = integrate(&s).unwrap();
        assert!((tr.q[0].last().unwrap() - 10f64.cos()).abs() < 1e-8);
        let r = classify(&s.lagrangian, &s.generator, &s.system).unwrap();
        let drift = conservation_report(&s, &r, &tr).unwrap();
        assert!(drift.max_drift < 1e-8);

        let sq = parse("(pow q 2)", &s.system).unwrap();
        assert!(finite_diff_check(&sq, &tr, 1e-6, &s.system).unwrap().pass);
        let c = finite_diff_check(&Expr::int(3), &tr, 0.0, &s.system).unwrap();
        assert_eq!(c.max_error, 0.0);

        let off = tr.perturbed(0.01, 2.0);
        assert!(conservation_report(&s, &r, &off).unwrap().max_drift > 1e-3);
    }

    #[test]
    fn scenario_validation() {
        let mut s = oscillator();
        s.dt = 0.3;
        assert!(matches!(integrate(&s), Err(Error::InvalidScenario(_))));
        let mut s = oscillator();
        s.t1 = -1.0;
        assert!(matches!(integrate(&s), Err(Error::InvalidScenario(_))));
        let sys = FieldSystem::new(1, ["q"]).unwrap();
        let s = scenario(sys, "(* q (d q 0))", "1", 1.0, 0.0, 0.0);
        assert!(matches!(integrate(&s), Err(Error::SingularMassMatrix(_))));
    }

    #[test]
    fn interpolated_samples_and_csv() {
        let s = oscillator();
        let tr = integrate(&s).unwrap().window(0.0, 1.0).unwrap();
        let p = tr.jet_point(&[0.12345]).unwrap();
        assert!((p.values[&Symbol::field(0)] - 0.12345f64.cos()).abs() < 1e-10);
        assert!((p.values[&Symbol::jet(0, &[0])] + 0.12345f64.sin()).abs() < 1e-10);
        assert!(tr.jet_point(&[1.5]).is_err());

        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,q0,qdot0,qddot0\n"));
        assert_eq!(text.lines().count(), 1002);
    }

    #[test]
    fn analytic_field_jets() {
        let sys = FieldSystem::new(2, ["u"]).unwrap();
        let v = parse("(* x0 (pow x1 2))", &sys).unwrap();
        let f = AnalyticField::new(&[v], vec![(0.0, 1.0), (0.0, 1.0)], &sys).unwrap();
        let p = f.jet_point(&[2.0, 3.0]).unwrap();
        assert_eq!(p.values[&Symbol::jet(0, &[0, 1])], 6.0);
        assert_eq!(p.values[&Symbol::jet(0, &[1, 1])], 4.0);
        assert_eq!(p.values[&Symbol::jet(0, &[0])], 9.0);
    }
}
