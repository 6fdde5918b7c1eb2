//! Ternary-logic netlist toolkit.
//!
//! Switch-level simulation of multi-threshold CNFET circuits over the
//! `{0V, ½VDD, VDD}` lattice, compiler-style simplification passes that turn
//! complete ternary full adders into partial ones, generators for reference
//! adder circuits in several logic styles, and a small catalog of published
//! adder measurements.

pub mod catalog;
pub mod genlib;
pub mod metrics;
pub mod netlist;
pub mod sim;
pub mod simplify;
pub mod trit;
