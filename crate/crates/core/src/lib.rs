pub mod exactlin;
pub mod flock;
pub mod format;
pub mod fourier;
pub mod herdoid;
pub mod instances;
pub mod kan;
pub mod lincat;
pub mod verify;
