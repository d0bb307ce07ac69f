pub mod bench;
pub mod carrier;
pub mod error;
pub mod grid;
pub mod paths;
pub mod reconstruction;
pub mod residual;
pub mod schrodinger;
pub mod spectral;
pub mod underdetermination;
pub mod wigner;
