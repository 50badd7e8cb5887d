//! Selections and fixed points of set-valued maps over pluggable convexity
//! structures.
//!
//! A convexity structure supplies admissible finite supports, hulls, and a
//! continuous way to combine finitely many points with simplex weights. On top
//! of that the crate builds almost-continuous selections, a Michael-type
//! iteration for exact selections, a Sperner-based Brouwer solver, and a staged
//! fixed-point engine for compositions of set-valued maps.

pub mod checker;
pub mod cli;
pub mod combination;
pub mod convexity;
pub mod fixedpoint;
pub mod hull;
pub mod multifunction;
pub mod problem;
pub mod report;
pub mod selection;
pub mod space;
