//! Exact computations with the graded nonlocal q̲-vertex algebras `V_{c,1}` generated by the
//! Frenkel–Jing current `x(z) ⊗ t` on level-`c` Fock modules of `U_q(ŝl₂)`.

pub mod scalars;
pub mod laurent;
pub mod qcalc;
pub mod fock;
pub mod levelc;
pub mod qva;
pub mod quasiparticle;
pub mod combinatorics;
