//! Small dense linear and mixed-integer programs.
//!
//! [`LinearProgram`] is a plain model container (bounded variables, linear
//! rows, a maximisation objective). [`solve_lp`] runs a bounded-variable
//! primal simplex; [`solve_mip`] runs depth-first branch and bound on the
//! integer variables, warm-starting every node with a dual simplex from its
//! parent's tableau.

mod bnb;
mod format;
mod simplex;

use alloc::string::String;
use alloc::vec::Vec;

pub(crate) use bnb::branch_and_bound;
pub use bnb::{solve_mip, MipOptions, MipSolution};
pub use format::write_lp;
pub use simplex::{solve_lp, LpSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `max objective . x + offset` subject to rows and variable bounds.
///
/// Every variable needs a finite lower bound.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    pub vars: Vec<Variable>,
    pub rows: Vec<Row>,
    pub objective: Vec<(usize, f64)>,
    pub offset: f64,
}

impl LinearProgram {
    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> usize {
        self.vars.push(Variable {
            name: name.into(),
            lower,
            upper,
            integer: false,
        });
        self.vars.len() - 1
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> usize {
        let v = self.add_var(name, 0.0, 1.0);
        self.vars[v].integer = true;
        v
    }

    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> usize {
        self.rows.push(Row {
            name: name.into(),
            coeffs,
            sense,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.offset + self.objective.iter().map(|&(j, c)| c * x[j]).sum::<f64>()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.vars
            .iter()
            .zip(x)
            .fold(self.max_violation_rows(x), |w, (v, &xj)| {
                w.max(v.lower - xj).max(xj - v.upper)
            })
    }

    /// Largest row violation of `x`, ignoring variable bounds.
    pub fn max_violation_rows(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for r in &self.rows {
            let lhs: f64 = r.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let viol = match r.sense {
                Sense::Le => lhs - r.rhs,
                Sense::Ge => r.rhs - lhs,
                Sense::Eq => (lhs - r.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }
}
