//! Ribbon hypergraphs, their representation on cyclic words, and the
//! algebraic checks built on top of it.

pub mod holieb;
pub mod hypergraph;
pub mod mcstar;
pub mod permcore;
pub mod prop;
pub mod rep;
pub mod scalar;
pub mod theta;
pub mod verify;
pub mod words;
