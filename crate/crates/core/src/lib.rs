//! Combinatorial topology of toric hyperkähler spaces and their
//! circle-action modifications.

pub mod arrangement;
pub mod exact;
pub mod flatlab;
pub mod modify;
pub mod toric;
