pub mod axioms;
pub mod beta;
pub mod distort;
pub mod projection;
pub mod sobolev;
pub mod tubes;
