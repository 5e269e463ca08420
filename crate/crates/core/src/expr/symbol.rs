use std::fmt;
use std::sync::Arc;

/// Sorted list of base-coordinate indices a jet symbol has been
/// differentiated by. `[0, 1]` is the mixed second derivative.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        MultiIndex(indices)
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// The multi-index after one more derivative along `mu`.
    pub fn with(&self, mu: usize) -> Self {
        let mut v = self.0.clone();
        let pos = v.partition_point(|&i| i <= mu);
        v.insert(pos, mu);
        MultiIndex(v)
    }
}

impl From<&[usize]> for MultiIndex {
    fn from(v: &[usize]) -> Self {
        MultiIndex::new(v.to_vec())
    }
}

/// The atoms polynomials are built from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// Base coordinate x^mu.
    Coord(usize),
    /// Field phi^alpha and its formal derivatives.
    Jet { field: usize, derivs: MultiIndex },
    /// Abelian gauge potential A_mu and its derivatives (`derivs = [nu]` is d_nu A_mu).
    Gauge { comp: usize, derivs: MultiIndex },
    /// Infinitesimal gauge parameter and its derivatives. Products of two
    /// of these are dropped.
    Eps { derivs: MultiIndex },
    /// Homotopy scaling parameter.
    Lambda,
    /// Declared external function applied to one base coordinate.
    Extern { name: Arc<str>, arg: usize },
}

impl Symbol {
    pub fn field(field: usize) -> Self {
        Symbol::Jet {
            field,
            derivs: MultiIndex::empty(),
        }
    }

    pub fn jet(field: usize, derivs: &[usize]) -> Self {
        Symbol::Jet {
            field,
            derivs: derivs.into(),
        }
    }

    pub fn gauge(comp: usize) -> Self {
        Symbol::Gauge {
            comp,
            derivs: MultiIndex::empty(),
        }
    }

    pub fn eps() -> Self {
        Symbol::Eps {
            derivs: MultiIndex::empty(),
        }
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Symbol::Jet { .. })
    }

    /// Derivative order for jet-like symbols, 0 otherwise.
    pub fn jet_order(&self) -> usize {
        match self {
            Symbol::Jet { derivs, .. } | Symbol::Gauge { derivs, .. } | Symbol::Eps { derivs } => {
                derivs.order()
            }
            _ => 0,
        }
    }

    pub fn is_eps(&self) -> bool {
        matches!(self, Symbol::Eps { .. })
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn with_derivs(f: &mut fmt::Formatter<'_>, base: &str, d: &MultiIndex) -> fmt::Result {
            if d.order() == 0 {
                return write!(f, "{base}");
            }
            write!(f, "(d {base}")?;
            for i in d.indices() {
                write!(f, " {i}")?;
            }
            write!(f, ")")
        }
        match self {
            Symbol::Coord(mu) => write!(f, "x{mu}"),
            Symbol::Jet { field, derivs } => with_derivs(f, &format!("phi{field}"), derivs),
            Symbol::Gauge { comp, derivs } => with_derivs(f, &format!("A{comp}"), derivs),
            Symbol::Eps { derivs } => with_derivs(f, "eps", derivs),
            Symbol::Lambda => write!(f, "lam"),
            Symbol::Extern { name, arg } => write!(f, "({name} x{arg})"),
        }
    }
}
