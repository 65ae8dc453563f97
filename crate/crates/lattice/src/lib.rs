//! Integer and rational lattice computations: cellular cohomology of singular
//! torus fibres, local systems on the sphere, Leray tables and the K3 mirror map.

pub mod snf;
pub mod cells;
pub mod models;
pub mod k3;
pub mod leray;
pub mod sheaf;
pub mod surd;
