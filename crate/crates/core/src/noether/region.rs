//! Fixed-region functionals. F_V = int_V f is computed by composite
//! Simpson quadrature and compared with the boundary flux of f_pot.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, FieldSystem, Point, Poly};
use crate::jet::to_polys;

/// A numeric field configuration that can supply all jets up to second
/// order at points of its domain.
pub trait FieldSample {
    /// Closed box the sample is defined on, one interval per base coordinate.
    fn domain(&self) -> Vec<(f64, f64)>;

    /// Coordinates plus values for every jet symbol up to second order.
    fn jet_point(&self, x: &[f64]) -> Result<Point>;
}

/// Axis-aligned box `[lo_mu, hi_mu]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Region {
    pub bounds: Vec<(f64, f64)>,
}

impl Region {
    pub fn interval(t0: f64, t1: f64) -> Self {
        Region {
            bounds: vec![(t0, t1)],
        }
    }

    pub fn boxed(bounds: Vec<(f64, f64)>) -> Self {
        Region { bounds }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionCheckConfig {
    /// Simpson intervals per coordinate direction.
    pub intervals: usize,
    /// Allowed |F_V - boundary flux|.
    pub tol_quadrature: f64,
    /// |F_V| below this counts as a symmetry of the fixed region.
    pub tol_symmetry: f64,
}

impl Default for RegionCheckConfig {
    fn default() -> Self {
        RegionCheckConfig {
            intervals: 64,
            tol_quadrature: 1e-6,
            tol_symmetry: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleIntegrals {
    /// F_V = int_V f.
    pub volume: f64,
    /// sum over faces of f_pot . n, when a potential is given.
    pub boundary: Option<f64>,
    pub difference: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedRegionReport {
    pub region: Region,
    pub samples: Vec<SampleIntegrals>,
    /// dS_V = 0 on every sample.
    pub fixed_region_symmetry: bool,
    /// Volume integral equals boundary flux on every sample (true when no
    /// potential was supplied).
    pub boundary_consistent: bool,
}

/// Composite Simpson weights for `n` equal intervals of width `h`. Odd
/// `n >= 3` closes with a 3/8 panel; `n = 1` is the trapezoid rule.
pub(crate) fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 1);
    let mut w = vec![0.0; n + 1];
    if n == 1 {
        w[0] = h / 2.0;
        w[1] = h / 2.0;
        return w;
    }
    let simpson_end = if n.is_multiple_of(2) { n } else { n - 3 };
    for i in (0..simpson_end).step_by(2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if n % 2 == 1 {
        let s = simpson_end;
        for (k, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
            w[s + k] += 3.0 * h / 8.0 * c;
        }
    }
    w
}

/// Tensor-product Simpson quadrature of `g` over the box.
fn integrate_box(
    bounds: &[(f64, f64)],
    n: usize,
    g: &mut dyn FnMut(&[f64]) -> Result<f64>,
) -> Result<f64> {
    let d = bounds.len();
    if d == 0 {
        return g(&[]);
    }
    let axes: Vec<(Vec<f64>, Vec<f64>)> = bounds
        .iter()
        .map(|&(lo, hi)| {
            let h = (hi - lo) / n as f64;
            let nodes = (0..=n)
                .map(|i| if i == n { hi } else { lo + i as f64 * h })
                .collect();
            (nodes, simpson_weights(n, h))
        })
        .collect();
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for k in 0..d {
            x[k] = axes[k].0[idx[k]];
            w *= axes[k].1[idx[k]];
        }
        total += w * g(&x)?;
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] <= n {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == d {
                return Ok(total);
            }
        }
    }
}

fn check_inside(region: &Region, sample: &dyn FieldSample) -> Result<()> {
    let dom = sample.domain();
    if dom.len() != region.bounds.len() {
        return Err(Error::RegionOutsideDomain(format!(
            "region has {} coordinates, sample has {}",
            region.bounds.len(),
            dom.len()
        )));
    }
    for (mu, (&(lo, hi), &(dlo, dhi))) in region.bounds.iter().zip(&dom).enumerate() {
        let slack = 1e-9 * (1.0 + dlo.abs().max(dhi.abs()));
        if lo.is_nan() || hi.is_nan() || lo >= hi || lo < dlo - slack || hi > dhi + slack {
            return Err(Error::RegionOutsideDomain(format!(
                "x{mu} range [{lo}, {hi}] not inside [{dlo}, {dhi}]"
            )));
        }
    }
    Ok(())
}

/// Evaluates F_V = int_V f for each sample and, when `f_pot` is given,
/// the boundary form sum_mu (int_{x^mu = hi} f_pot^mu - int_{x^mu = lo} f_pot^mu).
/// For one base dimension the boundary form is f_pot(t_f) - f_pot(t_i).
pub fn fixed_region_check(
    f: &Expr,
    f_pot: Option<&[Expr]>,
    region: &Region,
    samples: &[&dyn FieldSample],
    cfg: &RegionCheckConfig,
    sys: &FieldSystem,
) -> Result<FixedRegionReport> {
    let d = sys.dim();
    if region.bounds.len() != d {
        return Err(Error::RegionOutsideDomain(format!(
            "region must have {d} coordinate ranges"
        )));
    }
    let f = f.to_poly()?;
    let pot: Option<Vec<Poly>> = f_pot.map(to_polys).transpose()?;
    if let Some(p) = &pot {
        if p.len() != d {
            return Err(Error::InvalidGenerator(format!(
                "potential has {} components, expected {d}",
                p.len()
            )));
        }
    }
    let n = cfg.intervals.max(1);

    let mut results = Vec::with_capacity(samples.len());
    for sample in samples {
        check_inside(region, *sample)?;
        let volume = integrate_box(&region.bounds, n, &mut |x| {
            sample.jet_point(x)?.eval(&f, sys)
        })?;
        let boundary = match &pot {
            None => None,
            Some(pot) => {
                let mut flux = 0.0;
                for mu in 0..d {
                    let face: Vec<(f64, f64)> = region
                        .bounds
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != mu)
                        .map(|(_, b)| *b)
                        .collect();
                    let (lo, hi) = region.bounds[mu];
                    for (side, sign) in [(hi, 1.0), (lo, -1.0)] {
                        let mut g = |y: &[f64]| {
                            let mut x = Vec::with_capacity(d);
                            x.extend_from_slice(&y[..mu]);
                            x.push(side);
                            x.extend_from_slice(&y[mu..]);
                            sample.jet_point(&x)?.eval(&pot[mu], sys)
                        };
                        flux += sign * integrate_box(&face, n, &mut g)?;
                    }
                }
                Some(flux)
            }
        };
        results.push(SampleIntegrals {
            volume,
            boundary,
            difference: boundary.map(|b| volume - b),
        });
    }
    let fixed_region_symmetry = results.iter().all(|r| r.volume.abs() <= cfg.tol_symmetry);
    let boundary_consistent = results
        .iter()
        .all(|r| r.difference.is_none_or(|e| e.abs() <= cfg.tol_quadrature));
    Ok(FixedRegionReport {
        region: region.clone(),
        samples: results,
        fixed_region_symmetry,
        boundary_consistent,
    })
}
