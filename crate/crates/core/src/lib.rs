//! Toolkit for eta-weak-pseudo-Hermitian position-dependent-mass
//! Schrodinger problems: expression parsing with forward AD, mass
//! profiles and coordinate maps, complex potentials from generating
//! functions, dense finite-difference operators, a complex eigensolver,
//! closed-form model spectra, and structural verification checks.

pub mod analytic;
pub mod discretize;
pub mod eig;
pub mod expr;
pub mod maps;
pub mod potentials;
pub mod verify;
