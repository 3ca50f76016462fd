pub mod algebra;
pub mod coeff;
pub mod error;
pub mod escape;
pub mod green;
pub mod logpolar;
pub mod weights;
