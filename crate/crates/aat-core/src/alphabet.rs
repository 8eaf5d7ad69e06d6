//! The closed variable alphabet shared by every pipeline stage.
//!
//! For `n` functions the standard ring declares, in this order:
//! `theta`, `z{k}_{p}`, `w{k}_{p}`, `L1..Ln`, `x1..xn`, `y1..yn`, then the
//! problem parameters. The lexicographic term order follows the declaration
//! order, so `theta` and the derivative slots lead when printed.

use std::sync::Arc;

use aat_algebra::{Result, VarRing};

pub const THETA: &str = "theta";

pub fn lam(k: usize) -> String {
    format!("L{k}")
}

pub fn x(k: usize) -> String {
    format!("x{k}")
}

pub fn y(k: usize) -> String {
    format!("y{k}")
}

/// Derivative of the `k`-th function with respect to `u_p`, at `u`.
pub fn z(k: usize, p: usize) -> String {
    format!("z{k}_{p}")
}

/// Derivative of the `k`-th function with respect to `v_p`, at `v`.
pub fn w(k: usize, p: usize) -> String {
    format!("w{k}_{p}")
}

/// Names of the standard ring variables for `n` functions.
pub fn standard_vars(n: usize) -> Vec<String> {
    let mut vars = vec![THETA.to_string()];
    for k in 1..=n {
        for p in 1..=n {
            vars.push(z(k, p));
        }
    }
    for k in 1..=n {
        for p in 1..=n {
            vars.push(w(k, p));
        }
    }
    vars.extend((1..=n).map(lam));
    vars.extend((1..=n).map(x));
    vars.extend((1..=n).map(y));
    vars
}

pub fn standard_ring(n: usize, params: &[String]) -> Result<Arc<VarRing>> {
    VarRing::new(standard_vars(n), params.iter().cloned())
}

/// Ring of addition formulas: `x0..xn`, `y0..yn` where slot 0 holds theta.
pub fn formula_ring(n: usize, params: &[String]) -> Result<Arc<VarRing>> {
    let mut vars: Vec<String> = (0..=n).map(x).collect();
    vars.extend((0..=n).map(y));
    VarRing::new(vars, params.iter().cloned())
}

/// Symbols allowed in an addition-theorem polynomial.
pub fn is_aat_symbol(name: &str, n: usize) -> bool {
    (1..=n).any(|k| name == lam(k) || name == x(k) || name == y(k))
}

/// Renaming that swaps the `u` and `v` sides: `x_i <-> y_i`, `z_ip <-> w_ip`.
pub fn swap_pairs(n: usize) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for k in 1..=n {
        out.push((x(k), y(k)));
        out.push((y(k), x(k)));
        for p in 1..=n {
            out.push((z(k, p), w(k, p)));
            out.push((w(k, p), z(k, p)));
        }
    }
    out
}

pub fn as_refs(pairs: &[(String, String)]) -> Vec<(&str, &str)> {
    pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
}
