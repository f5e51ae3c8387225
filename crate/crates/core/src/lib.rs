//! Exact solver and axiom workbench for relative fair choice rules over
//! comprehensive utility sets.

pub mod error;
pub mod geometry;
pub mod lp;
pub mod oracle;
pub mod rational;
pub mod real;
pub mod rules;
pub mod harness;
pub mod weights;

pub use error::{Error, Result};
pub use geometry::{hausdorff_upper, make_problem, scmp_hull, Permutation, Point, Problem};
pub use rational::{rat, Rat};
pub use real::{Cmp, Real, Scalar, Truth};
pub use rules::{solve, ChoiceSet, Rule, RuleKind, Welfare};
