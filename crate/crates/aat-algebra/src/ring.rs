use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{AlgebraError, Result};

/// Ordered variable and parameter alphabet shared by a family of polynomials.
///
/// Exponent vectors index variables first (in declaration order) and
/// parameters after them. Parameters behave as transcendental constants:
/// they take part in arithmetic and GCDs, but cannot be differentiated or
/// eliminated.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VarRing {
    vars: Vec<String>,
    params: Vec<String>,
}

impl VarRing {
    pub fn new<S: Into<String>>(
        vars: impl IntoIterator<Item = S>,
        params: impl IntoIterator<Item = S>,
    ) -> Result<Arc<Self>> {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        let params: Vec<String> = params.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for name in vars.iter().chain(params.iter()) {
            if name.is_empty() {
                return Err(AlgebraError::InvalidRing("empty symbol name".into()));
            }
            if !is_identifier(name) {
                return Err(AlgebraError::InvalidRing(format!(
                    "`{name}` is not a valid identifier"
                )));
            }
            if !seen.insert(name.as_str()) {
                return Err(AlgebraError::InvalidRing(format!(
                    "symbol `{name}` declared twice"
                )));
            }
        }
        Ok(Arc::new(VarRing { vars, params }))
    }

    /// Number of exponent slots (variables plus parameters).
    pub fn arity(&self) -> usize {
        self.vars.len() + self.params.len()
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    /// Slot index of a variable (not a parameter).
    pub fn var(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))
    }

    /// Slot index of any symbol, variable or parameter.
    pub fn symbol(&self, name: &str) -> Option<usize> {
        self.vars
            .iter()
            .chain(self.params.iter())
            .position(|v| v == name)
    }

    pub fn name(&self, slot: usize) -> &str {
        if slot < self.vars.len() {
            &self.vars[slot]
        } else {
            &self.params[slot - self.vars.len()]
        }
    }

    pub fn is_param(&self, slot: usize) -> bool {
        slot >= self.vars.len()
    }
}

impl fmt::Debug for VarRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VarRing{:?}", self.vars)?;
        if !self.params.is_empty() {
            write!(f, "[params {:?}]", self.params)?;
        }
        Ok(())
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Returns true when both handles describe the same ring.
pub(crate) fn same_ring(a: &Arc<VarRing>, b: &Arc<VarRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_overlap() {
        assert!(VarRing::new(["x1", "x1"], []).is_err());
        assert!(VarRing::new(["x1", "g2"], ["g2"]).is_err());
        assert!(VarRing::new(["", "x"], []).is_err());
        assert!(VarRing::new(["1x"], []).is_err());
    }

    #[test]
    fn slots() {
        let r = VarRing::new(["theta", "x1"], ["g2"]).unwrap();
        assert_eq!(r.arity(), 3);
        assert_eq!(r.var("x1").unwrap(), 1);
        assert!(r.var("g2").is_err());
        assert_eq!(r.symbol("g2"), Some(2));
        assert!(r.is_param(2));
        assert_eq!(r.name(2), "g2");
    }
}
