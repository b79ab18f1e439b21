//! Exact desk-scale laboratory for distributed graph computation: labeled
//! graphs and views, locally checkable labelings, outcome distributions
//! with LOCAL/SLOCAL simulators, distributed linear programs with
//! dequantization by expectation, the linearizable maximal-matching
//! encoding, and the gadget constructions used to lift it.

pub mod error;
pub mod gadgets;
pub mod graph;
pub mod lcl;
pub mod linearizable;
pub mod lp;
pub mod outcome;
pub mod rational;

pub use error::{Error, Result};
