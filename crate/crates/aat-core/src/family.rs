//! The concrete mapping families with an addition theorem, and their
//! parameters.

use std::collections::BTreeMap;
use std::fmt;

use aat_algebra::{rat, rat_frac, Rat};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// `e^{c u}`.
    Exp { c: Rat },
    /// `a u + b`.
    Rational { a: Rat, b: Rat },
    /// `wp(u; g2, g3)`.
    Weierstrass { g2: Rat, g3: Rat },
    /// `(u1, u2)`.
    Case1,
    /// `(u1, e^{u2})`.
    Case2,
    /// `(e^{u1}, e^{u2})`.
    Case3,
    /// `(wp(u1), u2 - eps zeta(u1))`, `eps` in {0, 1}.
    Case4 { eps: u8, g2: Rat, g3: Rat },
    /// `(wp(u1), e^{u2} sigma(u1 - a) / sigma(u1))`.
    Case5 { a: Rat, g2: Rat, g3: Rat },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("unknown family `{0}`")]
    Unknown(String),
    #[error("family `{family}` requires parameter `{param}`")]
    MissingParameter { family: String, param: String },
    #[error("invalid value for parameter `{param}`: {reason}")]
    InvalidParameter { param: String, reason: String },
}

fn get(
    params: &BTreeMap<String, Rat>,
    family: &str,
    name: &str,
    default: Option<Rat>,
) -> Result<Rat, FamilyError> {
    params
        .get(name)
        .cloned()
        .or(default)
        .ok_or_else(|| FamilyError::MissingParameter {
            family: family.to_string(),
            param: name.to_string(),
        })
}

impl Family {
    /// Resolves a family identifier and its numeric parameters. Returns
    /// `Ok(None)` for `none`.
    pub fn from_id(id: &str, params: &BTreeMap<String, Rat>) -> Result<Option<Family>, FamilyError> {
        let lem = |name: &str| -> Result<(Rat, Rat), FamilyError> {
            Ok((
                get(params, name, "g2", Some(rat(4)))?,
                get(params, name, "g3", Some(rat(0)))?,
            ))
        };
        let fam = match id {
            "none" => return Ok(None),
            "exp" => Family::Exp {
                c: get(params, id, "c", Some(rat(1)))?,
            },
            "rational" => Family::Rational {
                a: get(params, id, "a", Some(rat(1)))?,
                b: get(params, id, "b", Some(rat(0)))?,
            },
            "weierstrass" => Family::Weierstrass {
                g2: get(params, id, "g2", None)?,
                g3: get(params, id, "g3", None)?,
            },
            "singular2-case1" => Family::Case1,
            "singular2-case2" => Family::Case2,
            "singular2-case3" => Family::Case3,
            "singular2-case4" => {
                let eps = get(params, id, "epsilon", Some(rat(1)))?;
                let eps = if eps == rat(0) {
                    0
                } else if eps == rat(1) {
                    1
                } else {
                    return Err(FamilyError::InvalidParameter {
                        param: "epsilon".into(),
                        reason: "must be 0 or 1".into(),
                    });
                };
                let (g2, g3) = lem(id)?;
                Family::Case4 { eps, g2, g3 }
            }
            "singular2-case5" => {
                let (g2, g3) = lem(id)?;
                Family::Case5 {
                    a: get(params, id, "a", Some(rat_frac(1, 2)))?,
                    g2,
                    g3,
                }
            }
            other => return Err(FamilyError::Unknown(other.to_string())),
        };
        if let Family::Exp { c } = &fam {
            if *c == rat(0) {
                return Err(FamilyError::InvalidParameter {
                    param: "c".into(),
                    reason: "rate must be nonzero".into(),
                });
            }
        }
        if let Family::Rational { a, .. } = &fam {
            if *a == rat(0) {
                return Err(FamilyError::InvalidParameter {
                    param: "a".into(),
                    reason: "slope must be nonzero".into(),
                });
            }
        }
        Ok(Some(fam))
    }

    pub fn id(&self) -> &'static str {
        match self {
            Family::Exp { .. } => "exp",
            Family::Rational { .. } => "rational",
            Family::Weierstrass { .. } => "weierstrass",
            Family::Case1 => "singular2-case1",
            Family::Case2 => "singular2-case2",
            Family::Case3 => "singular2-case3",
            Family::Case4 { .. } => "singular2-case4",
            Family::Case5 { .. } => "singular2-case5",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Family::Exp { .. } | Family::Rational { .. } | Family::Weierstrass { .. } => 1,
            _ => 2,
        }
    }

    /// Lattice invariants for families built on `wp`.
    pub fn invariants(&self) -> Option<(&Rat, &Rat)> {
        match self {
            Family::Weierstrass { g2, g3 } | Family::Case4 { g2, g3, .. } | Family::Case5 { g2, g3, .. } => {
                Some((g2, g3))
            }
            _ => None,
        }
    }

    /// Families whose first-order relations are taken from the registry
    /// rather than derived by elimination.
    pub fn numeric_only(&self) -> bool {
        matches!(self, Family::Case4 { eps: 1, .. } | Family::Case5 { .. })
    }

    /// Parameter assignments describing the family, for report echoes.
    pub fn parameters(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        match self {
            Family::Exp { c } => {
                m.insert("c".into(), c.to_string());
            }
            Family::Rational { a, b } => {
                m.insert("a".into(), a.to_string());
                m.insert("b".into(), b.to_string());
            }
            Family::Weierstrass { g2, g3 } => {
                m.insert("g2".into(), g2.to_string());
                m.insert("g3".into(), g3.to_string());
            }
            Family::Case4 { eps, g2, g3 } => {
                m.insert("epsilon".into(), eps.to_string());
                m.insert("g2".into(), g2.to_string());
                m.insert("g3".into(), g3.to_string());
            }
            Family::Case5 { a, g2, g3 } => {
                m.insert("a".into(), a.to_string());
                m.insert("g2".into(), g2.to_string());
                m.insert("g3".into(), g3.to_string());
            }
            _ => {}
        }
        m
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.parameters();
        if params.is_empty() {
            return f.write_str(self.id());
        }
        let inner: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}({})", self.id(), inner.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ids_with_defaults() {
        let mut p = BTreeMap::new();
        assert_eq!(Family::from_id("exp", &p).unwrap(), Some(Family::Exp { c: rat(1) }));
        assert_eq!(Family::from_id("none", &p).unwrap(), None);
        assert!(matches!(
            Family::from_id("weierstrass", &p),
            Err(FamilyError::MissingParameter { .. })
        ));
        p.insert("g2".into(), rat(4));
        p.insert("g3".into(), rat(0));
        let w = Family::from_id("weierstrass", &p).unwrap().unwrap();
        assert_eq!(w.to_string(), "weierstrass(g2=4, g3=0)");
        assert!(matches!(Family::from_id("sine", &p), Err(FamilyError::Unknown(_))));
    }
}
