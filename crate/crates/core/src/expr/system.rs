//! Field systems: base dimension, field names and declared external
//! functions of one base coordinate.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numeric definition of an external function of one coordinate.
/// Each kind is closed under differentiation and integration, so a
/// whole derivative/antiderivative chain can be generated from one entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExternDef {
    /// `amp * sin(omega * x + phase)`
    Sin {
        amp: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `amp * cos(omega * x + phase)`
    Cos {
        amp: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `amp * exp(rate * x)`
    Exp { amp: f64, rate: f64 },
    /// `sum_k coeffs[k] * x^k`
    Poly { coeffs: Vec<f64> },
}

impl ExternDef {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ExternDef::Sin { amp, omega, phase } => amp * (omega * x + phase).sin(),
            ExternDef::Cos { amp, omega, phase } => amp * (omega * x + phase).cos(),
            ExternDef::Exp { amp, rate } => amp * (rate * x).exp(),
            ExternDef::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
        }
    }

    pub fn derivative(&self) -> ExternDef {
        match *self {
            ExternDef::Sin { amp, omega, phase } => ExternDef::Cos {
                amp: amp * omega,
                omega,
                phase,
            },
            ExternDef::Cos { amp, omega, phase } => ExternDef::Sin {
                amp: -amp * omega,
                omega,
                phase,
            },
            ExternDef::Exp { amp, rate } => ExternDef::Exp {
                amp: amp * rate,
                rate,
            },
            ExternDef::Poly { ref coeffs } => ExternDef::Poly {
                coeffs: coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| c * k as f64)
                    .collect(),
            },
        }
    }

    /// Antiderivative with zero integration constant (for `Poly`, zero at the origin).
    pub fn antiderivative(&self) -> Result<ExternDef> {
        match *self {
            ExternDef::Sin { omega, .. } | ExternDef::Cos { omega, .. } if omega == 0.0 => Err(
                Error::InvalidSystem("trigonometric extern with omega = 0".into()),
            ),
            ExternDef::Sin { amp, omega, phase } => Ok(ExternDef::Cos {
                amp: -amp / omega,
                omega,
                phase,
            }),
            ExternDef::Cos { amp, omega, phase } => Ok(ExternDef::Sin {
                amp: amp / omega,
                omega,
                phase,
            }),
            ExternDef::Exp { rate: 0.0, .. } => Err(Error::InvalidSystem(
                "exponential extern with rate = 0".into(),
            )),
            ExternDef::Exp { amp, rate } => Ok(ExternDef::Exp {
                amp: amp / rate,
                rate,
            }),
            ExternDef::Poly { ref coeffs } => {
                let mut out = vec![0.0];
                out.extend(coeffs.iter().enumerate().map(|(k, c)| c / (k as f64 + 1.0)));
                Ok(ExternDef::Poly { coeffs: out })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExternDecl {
    /// Index of the base coordinate this function takes.
    pub arg: usize,
    pub derivative: Option<String>,
    pub antiderivative: Option<String>,
    pub def: Option<ExternDef>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldSystem {
    dim: usize,
    fields: Vec<String>,
    externs: BTreeMap<Arc<str>, ExternDecl>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Names the DSL reserves: operators, `eps`, `lam`, `x<k>` and `A<k>`.
pub fn is_reserved(s: &str) -> bool {
    if matches!(s, "d" | "pow" | "eps" | "lam") {
        return true;
    }
    for prefix in ["x", "A"] {
        if let Some(rest) = s.strip_prefix(prefix) {
            if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
                return true;
            }
        }
    }
    false
}

impl FieldSystem {
    pub fn new<S: Into<String>>(dim: usize, fields: impl IntoIterator<Item = S>) -> Result<Self> {
        let fields: Vec<String> = fields.into_iter().map(Into::into).collect();
        if dim == 0 {
            return Err(Error::InvalidSystem(
                "base dimension must be positive".into(),
            ));
        }
        if fields.is_empty() {
            return Err(Error::InvalidSystem(
                "at least one field is required".into(),
            ));
        }
        for (i, f) in fields.iter().enumerate() {
            if !is_identifier(f) || is_reserved(f) {
                return Err(Error::InvalidSystem(format!("invalid field name `{f}`")));
            }
            if fields[..i].contains(f) {
                return Err(Error::InvalidSystem(format!("duplicate field name `{f}`")));
            }
        }
        Ok(FieldSystem {
            dim,
            fields,
            externs: BTreeMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_fields(&self) -> usize {
        self.fields.len()
    }

    pub fn field_names(&self) -> &[String] {
        &self.fields
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f == name)
    }

    pub fn extern_decl(&self, name: &str) -> Option<&ExternDecl> {
        self.externs.get(name)
    }

    pub fn externs(&self) -> impl Iterator<Item = (&str, &ExternDecl)> {
        self.externs.iter().map(|(k, v)| (&**k, v))
    }

    /// Interned name of a declared extern.
    pub fn extern_name(&self, name: &str) -> Option<Arc<str>> {
        self.externs.get_key_value(name).map(|(k, _)| k.clone())
    }

    /// Declares a single extern. Derivative and antiderivative links may
    /// refer to externs declared later; [`FieldSystem::validate`] checks them.
    pub fn declare_extern(&mut self, name: &str, decl: ExternDecl) -> Result<()> {
        if !is_identifier(name) || is_reserved(name) || self.field_index(name).is_some() {
            return Err(Error::InvalidSystem(format!(
                "invalid extern name `{name}`"
            )));
        }
        if self.externs.contains_key(name) {
            return Err(Error::InvalidSystem(format!("duplicate extern `{name}`")));
        }
        if decl.arg >= self.dim {
            return Err(Error::IndexOutOfRange {
                index: decl.arg,
                dim: self.dim,
            });
        }
        self.externs.insert(Arc::from(name), decl);
        Ok(())
    }

    /// Declares `name` with numeric definition `def` together with a chain
    /// of derivatives (`derivatives[0]` is the first derivative) and
    /// antiderivatives (`antiderivatives[0]` integrates `name` once).
    /// Numeric definitions for the whole chain are generated from `def`.
    pub fn declare_family(
        &mut self,
        name: &str,
        arg: usize,
        def: ExternDef,
        derivatives: &[&str],
        antiderivatives: &[&str],
    ) -> Result<()> {
        // chain ordered from the deepest antiderivative up to the highest derivative
        let mut names: Vec<&str> = antiderivatives.iter().rev().copied().collect();
        let base = names.len();
        names.push(name);
        names.extend_from_slice(derivatives);

        let mut defs = vec![None; names.len()];
        defs[base] = Some(def.clone());
        for k in (0..base).rev() {
            defs[k] = Some(defs[k + 1].as_ref().unwrap().antiderivative()?);
        }
        for k in base + 1..names.len() {
            defs[k] = Some(defs[k - 1].as_ref().unwrap().derivative());
        }
        for (k, n) in names.iter().enumerate() {
            let decl = ExternDecl {
                arg,
                derivative: names.get(k + 1).map(|s| s.to_string()),
                antiderivative: k.checked_sub(1).map(|j| names[j].to_string()),
                def: defs[k].clone(),
            };
            self.declare_extern(n, decl)?;
        }
        Ok(())
    }

    /// Checks that every derivative/antiderivative link names a declared
    /// extern on the same coordinate.
    pub fn validate(&self) -> Result<()> {
        for (name, decl) in &self.externs {
            for link in [&decl.derivative, &decl.antiderivative]
                .into_iter()
                .flatten()
            {
                match self.externs.get(link.as_str()) {
                    None => return Err(Error::UndeclaredExtern(link.clone())),
                    Some(other) if other.arg != decl.arg => {
                        return Err(Error::InvalidSystem(format!(
                            "extern `{name}` links to `{link}` on a different coordinate"
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    pub fn eval_extern(&self, name: &str, x: f64) -> Result<f64> {
        let decl = self
            .externs
            .get(name)
            .ok_or_else(|| Error::UndeclaredExtern(name.to_string()))?;
        decl.def
            .as_ref()
            .map(|d| d.eval(x))
            .ok_or_else(|| Error::MissingDefinition(name.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn family_links_and_numeric_chain() {
        let mut sys = FieldSystem::new(1, ["q"]).unwrap();
        sys.declare_family(
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
        sys.validate().unwrap();
        let f = sys.extern_decl("F").unwrap();
        assert_eq!(f.derivative.as_deref(), Some("Fdot"));
        assert_eq!(f.antiderivative.as_deref(), Some("Fint"));
        assert_eq!(sys.extern_decl("Fdot").unwrap().derivative, None);
        assert_eq!(sys.extern_decl("Fint").unwrap().antiderivative, None);
        let t = 0.3;
        assert!(
            (sys.eval_extern("Fdot", t).unwrap() - 2.0 * PI * (2.0 * PI * t).cos()).abs() < 1e-12
        );
        assert!(
            (sys.eval_extern("Fint", t).unwrap() + (2.0 * PI * t).cos() / (2.0 * PI)).abs() < 1e-12
        );
    }

    #[test]
    fn polynomial_chain() {
        let d = ExternDef::Poly {
            coeffs: vec![1.0, 2.0, 3.0],
        };
        assert_eq!(
            d.derivative(),
            ExternDef::Poly {
                coeffs: vec![2.0, 6.0]
            }
        );
        assert_eq!(
            d.antiderivative().unwrap(),
            ExternDef::Poly {
                coeffs: vec![0.0, 1.0, 1.0, 1.0]
            }
        );
        assert_eq!(d.eval(2.0), 17.0);
    }

    #[test]
    fn rejects_bad_names() {
        assert!(FieldSystem::new(1, ["x0"]).is_err());
        assert!(FieldSystem::new(1, ["q", "q"]).is_err());
        assert!(FieldSystem::new(0, ["q"]).is_err());
        let mut sys = FieldSystem::new(1, ["q"]).unwrap();
        let decl = ExternDecl {
            arg: 1,
            derivative: None,
            antiderivative: None,
            def: None,
        };
        assert!(sys.declare_extern("F", decl).is_err());
        let decl = ExternDecl {
            arg: 0,
            derivative: Some("G".into()),
            antiderivative: None,
            def: None,
        };
        sys.declare_extern("F", decl).unwrap();
        assert_eq!(sys.validate(), Err(Error::UndeclaredExtern("G".into())));
    }
}
