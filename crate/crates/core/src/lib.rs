pub mod error;
pub mod linalg;
pub mod standard_subspace;
pub mod quadrature;
pub mod schrodinger_ray;
pub mod one_particle;
pub mod fock;
pub mod geometry;
pub mod acceptance;
