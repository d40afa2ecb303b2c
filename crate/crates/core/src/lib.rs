//! Telephone broadcast: instances, protocols, exact solvers and the two
//! hardness reductions (from (3,3)-SAT and from numerical 3D matching).

pub mod cli;
pub mod gadget;
pub mod gen;
pub mod graph;
pub mod io;
pub mod protocol;
pub mod reduction_matching;
pub mod reduction_sat;
pub mod sat;
pub mod solvers;
