//! Reproducible random polynomials for property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{ratio, Expr, FieldSystem, Monomial, Poly, Symbol};
use crate::jet::d_poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomBounds {
    pub max_degree: u32,
    pub max_dim: usize,
    pub max_fields: usize,
    pub max_terms: usize,
}

impl Default for RandomBounds {
    fn default() -> Self {
        RandomBounds {
            max_degree: 3,
            max_dim: 1,
            max_fields: 1,
            max_terms: 4,
        }
    }
}

fn random_system(rng: &mut ChaCha8Rng, b: &RandomBounds) -> FieldSystem {
    let d = rng.gen_range(1..=b.max_dim.max(1));
    let n = rng.gen_range(1..=b.max_fields.max(1));
    let names: &[&str] = if d == 1 {
        &["q", "r", "s"]
    } else {
        &["u", "v", "w"]
    };
    FieldSystem::new(d, names[..n.min(3)].iter().copied()).expect("fixed field names are valid")
}

fn first_order_pool(sys: &FieldSystem) -> Vec<Symbol> {
    let mut pool: Vec<Symbol> = (0..sys.dim()).map(Symbol::Coord).collect();
    for a in 0..sys.num_fields() {
        pool.push(Symbol::field(a));
        for mu in 0..sys.dim() {
            pool.push(Symbol::jet(a, &[mu]));
        }
    }
    pool
}

fn poly_from(rng: &mut ChaCha8Rng, pool: &[Symbol], max_degree: u32, max_terms: usize) -> Poly {
    let mut p = Poly::zero();
    let terms = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..terms {
        let deg = rng.gen_range(0..=max_degree);
        let mut m = Monomial::one();
        for _ in 0..deg {
            m = m.mul(&Monomial::symbol(
                pool[rng.gen_range(0..pool.len())].clone(),
            ));
        }
        let num = [-3i64, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
        let den = rng.gen_range(1..=2i64);
        p += Poly::monomial(m, ratio(num, den));
    }
    p
}

/// Random polynomial in `symbols` with at most `max_degree` factors per
/// term and at most `max_terms` terms.
pub fn random_polynomial(seed: u64, symbols: &[Symbol], max_degree: u32, max_terms: usize) -> Expr {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Expr::from_poly(&poly_from(&mut rng, symbols, max_degree, max_terms))
}

/// Random first-order density on a random system within `b`.
pub fn random_lagrangian(seed: u64, b: &RandomBounds) -> (FieldSystem, Expr) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sys = random_system(&mut rng, b);
    let pool = first_order_pool(&sys);
    let l = poly_from(&mut rng, &pool, b.max_degree, b.max_terms);
    (sys, Expr::from_poly(&l))
}

/// Random first-order components Lambda^mu.
pub fn random_potential(seed: u64, b: &RandomBounds) -> (FieldSystem, Vec<Expr>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sys = random_system(&mut rng, b);
    let pool = first_order_pool(&sys);
    let lam = (0..sys.dim())
        .map(|_| Expr::from_poly(&poly_from(&mut rng, &pool, b.max_degree, b.max_terms)))
        .collect();
    (sys, lam)
}

/// d_mu Lambda^mu for the potential drawn by `random_potential` with the
/// same seed.
pub fn random_divergence(seed: u64, b: &RandomBounds) -> (FieldSystem, Expr) {
    let (sys, lam) = random_potential(seed, b);
    let mut l = Poly::zero();
    for (mu, c) in lam.iter().enumerate() {
        l += d_poly(&c.to_poly().expect("polynomial"), mu, &sys).expect("first-order potential");
    }
    (sys, Expr::from_poly(&l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::print;
    use crate::jet::euler_lagrange;

    #[test]
    fn seed_zero_is_fixed() {
        let (sys, l) = random_lagrangian(0, &RandomBounds::default());
        assert_eq!(print(&l, &sys), SEED_ZERO);
        assert_eq!(random_lagrangian(0, &RandomBounds::default()).1, l);
    }

    const SEED_ZERO: &str = "(+ (* -3/2 x0 q) (* x0 (pow (d q 0) 2)) (pow (d q 0) 2))";

    #[test]
    fn divergences_have_vanishing_euler_lagrange() {
        let b = RandomBounds {
            max_dim: 2,
            max_fields: 2,
            ..RandomBounds::default()
        };
        for seed in 0..20 {
            let (sys, l) = random_divergence(seed, &b);
            for a in 0..sys.num_fields() {
                assert!(euler_lagrange(&l, a, &sys).unwrap().is_zero().unwrap());
            }
        }
    }
}
