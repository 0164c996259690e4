//! Line-of-sight mm-wave/THz MIMO channel between uniform linear arrays and
//! its decomposition into parallel SISO channels.
//!
//! Multipath (more than one [`PathSpec`]) is accepted and handled generically,
//! but only the single line-of-sight path has been checked against reference
//! data.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{domain, Error, Result};
use crate::linalg;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-12;

/// Uniform linear array with identical elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArraySpec {
    pub elements: usize,
    /// Linear (not dB) gain of one element.
    pub element_gain: f64,
    /// Element spacing d_a / λ.
    pub spacing_over_wavelength: f64,
}

impl ArraySpec {
    pub const DEFAULT_SPACING: f64 = 0.25;

    pub fn new(elements: usize, element_gain: f64, spacing_over_wavelength: f64) -> Result<Self> {
        if elements == 0 {
            return Err(domain("array needs at least one element"));
        }
        if !(element_gain > 0.0) || !element_gain.is_finite() {
            return Err(domain(format!(
                "element gain must be positive, got {element_gain}"
            )));
        }
        if !(spacing_over_wavelength > 0.0) || !spacing_over_wavelength.is_finite() {
            return Err(domain(format!(
                "element spacing must be positive, got {spacing_over_wavelength}"
            )));
        }
        Ok(Self {
            elements,
            element_gain,
            spacing_over_wavelength,
        })
    }

    pub fn with_gain_dbi(elements: usize, gain_dbi: f64) -> Result<Self> {
        Self::new(elements, dbi_to_linear(gain_dbi), Self::DEFAULT_SPACING)
    }

    /// Total array gain N · G_a.
    pub fn array_gain(&self) -> f64 {
        self.elements as f64 * self.element_gain
    }
}

pub fn dbi_to_linear(dbi: f64) -> f64 {
    10f64.powf(dbi / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    /// Power gain γ of the path (dimensionless, > 0).
    pub loss: f64,
    /// Propagation delay τ, seconds.
    pub delay: f64,
    /// Angle of departure, radians.
    pub aod: f64,
    /// Angle of arrival, radians.
    pub aoa: f64,
}

impl PathSpec {
    pub fn line_of_sight(loss: f64) -> Result<Self> {
        Self::new(loss, 0.0, 0.0, 0.0)
    }

    pub fn new(loss: f64, delay: f64, aod: f64, aoa: f64) -> Result<Self> {
        if !(loss > 0.0) || !loss.is_finite() {
            return Err(domain(format!("path gain must be positive, got {loss}")));
        }
        if !(delay.is_finite() && aod.is_finite() && aoa.is_finite()) {
            return Err(domain("path delay and angles must be finite"));
        }
        Ok(Self {
            loss,
            delay,
            aod,
            aoa,
        })
    }
}

/// Array response ψ_K(θ) = K^{-1/2} [1, e^{j2π s sinθ}, …, e^{j2π s (K-1) sinθ}]ᵀ.
pub fn steering_vector(
    elements: usize,
    theta: f64,
    spacing_over_wavelength: f64,
) -> Result<DVector<Complex64>> {
    if elements == 0 {
        return Err(domain("steering vector needs at least one element"));
    }
    let norm = 1.0 / (elements as f64).sqrt();
    let step = 2.0 * std::f64::consts::PI * spacing_over_wavelength * theta.sin();
    Ok(DVector::from_fn(elements, |k, _| {
        Complex64::from_polar(norm, step * k as f64)
    }))
}

/// Free-space plus absorption power gain of the LOS path,
/// G_t G_r (λ / 4πd)² 10^{-δ d_km / 10}, with `distance` in meters and
/// `absorption_db_per_km` in dB/km. Values above 1 are returned unclamped.
pub fn path_loss(
    carrier_frequency: f64,
    distance: f64,
    absorption_db_per_km: f64,
    tx: &ArraySpec,
    rx: &ArraySpec,
) -> Result<f64> {
    if !(carrier_frequency > 0.0) {
        return Err(domain(format!(
            "carrier frequency must be positive, got {carrier_frequency}"
        )));
    }
    if !(distance > 0.0) || !distance.is_finite() {
        return Err(domain(format!("distance must be positive, got {distance}")));
    }
    if !(absorption_db_per_km >= 0.0) {
        return Err(domain(format!(
            "absorption must be >= 0, got {absorption_db_per_km}"
        )));
    }
    let wavelength = SPEED_OF_LIGHT / carrier_frequency;
    let spreading = wavelength / (4.0 * std::f64::consts::PI * distance);
    let absorption = 10f64.powf(-absorption_db_per_km * (distance / 1000.0) / 10.0);
    Ok(tx.array_gain() * rx.array_gain() * spreading * spreading * absorption)
}

fn path_terms(
    paths: &[PathSpec],
    carrier_frequency: f64,
    tx: &ArraySpec,
    rx: &ArraySpec,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    if paths.is_empty() {
        return Err(domain("at least one propagation path is required"));
    }
    let mut a = DMatrix::zeros(rx.elements, paths.len());
    let mut b = DMatrix::zeros(tx.elements, paths.len());
    for (l, p) in paths.iter().enumerate() {
        let phase = 2.0 * std::f64::consts::PI * carrier_frequency * p.delay;
        let coeff = Complex64::from_polar(p.loss.sqrt(), phase);
        let psi_r = steering_vector(rx.elements, p.aoa, rx.spacing_over_wavelength)?;
        let psi_t = steering_vector(tx.elements, p.aod, tx.spacing_over_wavelength)?;
        a.set_column(l, &(psi_r * coeff));
        b.set_column(l, &psi_t);
    }
    Ok((a, b))
}

/// H = Σ_l √γ_l e^{j2π f τ_l} ψ_{N_r}(φ_{r,l}) ψ_{N_t}(φ_{t,l})†, shape N_r × N_t.
pub fn channel_matrix(
    paths: &[PathSpec],
    carrier_frequency: f64,
    tx: &ArraySpec,
    rx: &ArraySpec,
) -> Result<DMatrix<Complex64>> {
    let (a, b) = path_terms(paths, carrier_frequency, tx, rx)?;
    Ok(a * b.adjoint())
}

/// Transmissivities of the parallel channels, descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpectrum {
    transmissivities: Vec<f64>,
    /// Set when a squared singular value exceeded 1 and was clamped.
    pub clamped: bool,
}

impl ChannelSpectrum {
    /// Keeps values above `RANK_TOL²` of the largest, clamping anything above 1.
    fn from_eigenvalues(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(|a, b| b.total_cmp(a));
        let largest = values.first().copied().unwrap_or(0.0);
        if !(largest > 0.0) {
            return Err(Error::DegenerateChannel("channel matrix is zero".into()));
        }
        let cutoff = largest * RANK_TOL * RANK_TOL;
        let mut clamped = false;
        let transmissivities = values
            .into_iter()
            .take_while(|&t| t > cutoff)
            .map(|t| {
                if t > 1.0 {
                    clamped = true;
                    1.0
                } else {
                    t
                }
            })
            .collect();
        Ok(Self {
            transmissivities,
            clamped,
        })
    }

    pub fn transmissivities(&self) -> &[f64] {
        &self.transmissivities
    }

    pub fn rank(&self) -> usize {
        self.transmissivities.len()
    }

    /// Σ T_i, i.e. tr(H†H) after clamping.
    pub fn trace(&self) -> f64 {
        self.transmissivities.iter().sum()
    }
}

/// Transmissivities straight from the path description: the nonzero
/// eigenvalues of H†H = B A†A B† equal those of the L × L matrix
/// (A†A)^{1/2} (B†B) (A†A)^{1/2}, so arrays of any size cost O(L² N).
pub fn path_spectrum(
    paths: &[PathSpec],
    carrier_frequency: f64,
    tx: &ArraySpec,
    rx: &ArraySpec,
) -> Result<ChannelSpectrum> {
    let (a, b) = path_terms(paths, carrier_frequency, tx, rx)?;
    let ga = a.adjoint() * &a;
    let gb = b.adjoint() * &b;
    if paths.len() == 1 {
        return ChannelSpectrum::from_eigenvalues(vec![ga[(0, 0)].re * gb[(0, 0)].re]);
    }
    // Gram matrices are tiny (L × L): take the Hermitian square root via A†A = R R, R = (A†A)^{1/2}.
    let ga_re = hermitian_as_real(&ga);
    let (d, q) = linalg::symmetric_eigen(&ga_re)?;
    let root_re = &q * DMatrix::from_diagonal(&d.map(|l| l.max(0.0).sqrt())) * q.transpose();
    let root = real_as_hermitian(&root_re);
    let m = &root * gb * &root;
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    ChannelSpectrum::from_eigenvalues(linalg::hermitian_eigenvalues(&m)?)
}

/// Real 2n × 2n embedding [[Re, -Im], [Im, Re]] of an n × n Hermitian matrix.
fn hermitian_as_real(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Inverse of [`hermitian_as_real`] for matrices that are functions of the embedding.
fn real_as_hermitian(r: &DMatrix<f64>) -> DMatrix<Complex64> {
    let n = r.nrows() / 2;
    DMatrix::from_fn(n, n, |i, j| Complex64::new(r[(i, j)], r[(i + n, j)]))
}

/// SVD of a channel matrix, H = U Σ V†.
#[derive(Debug, Clone)]
pub struct ChannelDecomposition {
    pub matrix: DMatrix<Complex64>,
    pub spectrum: ChannelSpectrum,
    /// N_r × N_r unitary.
    pub u: DMatrix<Complex64>,
    /// N_t × N_t unitary.
    pub v: DMatrix<Complex64>,
    /// All min(N_r, N_t) singular values, descending.
    pub singular_values: Vec<f64>,
}

impl ChannelDecomposition {
    pub fn transmissivities(&self) -> &[f64] {
        self.spectrum.transmissivities()
    }

    pub fn rank(&self) -> usize {
        self.spectrum.rank()
    }

    /// tr(H†H) of the unclamped matrix.
    pub fn trace_hh(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}

pub fn decompose(h: &DMatrix<Complex64>) -> Result<ChannelDecomposition> {
    if h.is_empty() {
        return Err(Error::Shape("empty channel matrix".into()));
    }
    if h.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Err(Error::DegenerateChannel("channel matrix is zero".into()));
    }
    let svd = linalg::svd(h)?;
    let spectrum =
        ChannelSpectrum::from_eigenvalues(svd.singular_values.iter().map(|s| s * s).collect())?;
    Ok(ChannelDecomposition {
        matrix: h.clone(),
        spectrum,
        u: svd.u,
        v: svd.v,
        singular_values: svd.singular_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iso(n: usize) -> ArraySpec {
        ArraySpec::new(n, 1.0, 0.25).unwrap()
    }

    #[test]
    fn steering_examples() {
        let v = steering_vector(1, 0.7, 0.25).unwrap();
        assert_eq!(v[0], Complex64::new(1.0, 0.0));
        let v = steering_vector(5, 0.0, 0.25).unwrap();
        assert!(v
            .iter()
            .all(|z| (*z - Complex64::new(5f64.sqrt().recip(), 0.0)).norm() < 1e-15));
        let v = steering_vector(2, std::f64::consts::FRAC_PI_2, 0.25).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[0] - Complex64::new(s, 0.0)).norm() < 1e-15);
        assert!((v[1] - Complex64::new(0.0, s)).norm() < 1e-15);
        assert!(steering_vector(0, 0.0, 0.25).is_err());
    }

    #[test]
    fn friis_unit_distance() {
        let f = 1e11;
        let d = SPEED_OF_LIGHT / f / (4.0 * std::f64::consts::PI);
        let g = path_loss(f, d, 0.0, &iso(1), &iso(1)).unwrap();
        assert!((g - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reference_link_budget() {
        let a = ArraySpec::with_gain_dbi(32, 30.0).unwrap();
        let g = path_loss(1e11, 700.0, 0.4, &a, &a).unwrap();
        assert!((g / 1.115_13e-4 - 1.0).abs() < 1e-5, "{g}");
    }

    #[test]
    fn absorption_exponent() {
        // δ d_km = 3 dB more halves the gain (10^-0.3).
        let a = iso(4);
        let g0 = path_loss(3e11, 1000.0, 1.0, &a, &a).unwrap();
        let g1 = path_loss(3e11, 1000.0, 4.0, &a, &a).unwrap();
        assert!((g1 / g0 - 10f64.powf(-0.3)).abs() < 1e-12);
    }

    #[test]
    fn path_loss_errors() {
        assert!(path_loss(1e11, 0.0, 0.4, &iso(1), &iso(1)).is_err());
        assert!(path_loss(1e11, -5.0, 0.4, &iso(1), &iso(1)).is_err());
        assert!(path_loss(1e11, 5.0, -0.4, &iso(1), &iso(1)).is_err());
    }

    #[test]
    fn single_path_matrix() {
        let p = PathSpec::new(0.25, 1e-9, 0.3, -0.2).unwrap();
        let h = channel_matrix(&[p], 1e11, &iso(1), &iso(1)).unwrap();
        let expect = Complex64::from_polar(0.5, 2.0 * std::f64::consts::PI * 1e11 * 1e-9);
        assert!((h[(0, 0)] - expect).norm() < 1e-15);
        assert!(channel_matrix(&[], 1e11, &iso(1), &iso(1)).is_err());

        let h = channel_matrix(&[p], 1e11, &iso(6), &iso(4)).unwrap();
        assert_eq!(h.shape(), (4, 6));
        let trace: f64 = h.iter().map(|z| z.norm_sqr()).sum();
        assert!((trace - 0.25).abs() < 1e-15);
        let d = decompose(&h).unwrap();
        assert_eq!(d.rank(), 1);
        assert!((d.transmissivities()[0] / 0.25 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn scalar_decomposition() {
        let h = DMatrix::from_element(1, 1, Complex64::new(0.5f64.sqrt(), 0.0));
        let d = decompose(&h).unwrap();
        assert_eq!(d.rank(), 1);
        assert!((d.transmissivities()[0] - 0.5).abs() < 1e-15);
        assert!(!d.spectrum.clamped);
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        let h = DMatrix::zeros(3, 2);
        assert!(matches!(decompose(&h), Err(Error::DegenerateChannel(_))));
    }

    #[test]
    fn strong_channel_is_clamped() {
        let h = DMatrix::from_element(1, 1, Complex64::new(2.0, 0.0));
        let d = decompose(&h).unwrap();
        assert_eq!(d.transmissivities(), &[1.0]);
        assert!(d.spectrum.clamped);
    }

    #[test]
    fn factored_route_matches_svd() {
        let paths = [
            PathSpec::new(1e-4, 0.0, 0.1, -0.3).unwrap(),
            PathSpec::new(3e-5, 2e-9, -0.6, 0.5).unwrap(),
            PathSpec::new(7e-6, 5e-9, 0.9, 0.2).unwrap(),
        ];
        let (tx, rx) = (iso(8), iso(6));
        let fast = path_spectrum(&paths, 2e11, &tx, &rx).unwrap();
        let slow = decompose(&channel_matrix(&paths, 2e11, &tx, &rx).unwrap()).unwrap();
        assert_eq!(fast.rank(), 3);
        assert_eq!(slow.rank(), 3);
        for (a, b) in fast.transmissivities().iter().zip(slow.transmissivities()) {
            assert!((a / b - 1.0).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn unitary_factors() {
        let paths = [
            PathSpec::new(0.3, 0.0, 0.2, 0.4).unwrap(),
            PathSpec::new(0.1, 1e-9, -0.5, 0.1).unwrap(),
        ];
        let h = channel_matrix(&paths, 1e11, &iso(5), &iso(3)).unwrap();
        let d = decompose(&h).unwrap();
        assert_eq!(d.u.shape(), (3, 3));
        assert_eq!(d.v.shape(), (5, 5));
        let eye3 = DMatrix::<Complex64>::identity(3, 3);
        let eye5 = DMatrix::<Complex64>::identity(5, 5);
        assert!((d.u.adjoint() * &d.u - eye3).camax() < 1e-10);
        assert!((d.v.adjoint() * &d.v - eye5).camax() < 1e-10);
        let sigma = d.u.adjoint() * &h * &d.v;
        for r in 0..3 {
            for c in 0..5 {
                let expect = if r == c && r < d.rank() {
                    d.transmissivities()[r].sqrt()
                } else {
                    0.0
                };
                assert!((sigma[(r, c)] - Complex64::new(expect, 0.0)).norm() < 1e-10);
            }
        }
    }
}
