//! Quick checking of proof obligations for a small VDM-SL style
//! specification language.

pub mod cli;
pub mod engine;
pub mod interp;
pub mod lang;
pub mod pog;
pub mod strategies;
pub mod values;
