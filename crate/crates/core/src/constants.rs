//! Physical constants, CODATA 2018 (exact SI defining values).

/// Planck constant h, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Boltzmann constant k_B, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Speed of light in vacuum c, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
