//! Core algorithms of the positive model theory workbench: finite
//! structures, positive logic, homomorphism search and the class-level
//! analyses built on bounded model enumeration.

pub mod analysis;
pub mod corpus;
pub mod logic;
pub mod morphisms;
pub mod sexpr;
pub mod structures;
