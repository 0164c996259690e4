//! Gaussian-state covariance matrices and the entangling-cloner Holevo oracle.
//!
//! Quadratures are ordered (q₁, p₁, q₂, p₂, …) and the vacuum has variance 1.
//! The symplectic form is Ω = ⊕ [[0, 1], [-1, 0]].

use nalgebra::DMatrix;

use crate::error::{check_transmissivity, domain, Error, Result};
use crate::keyrate::entropy_h;
use crate::linalg;

const SYMMETRY_TOL: f64 = 1e-12;
const BONA_FIDE_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Q,
    P,
}

impl Quadrature {
    fn offset(self) -> usize {
        match self {
            Quadrature::Q => 0,
            Quadrature::P => 1,
        }
    }
}

/// Second-moment matrix of an N-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    matrix: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates shape, symmetry (to 1e-12 relative to the largest entry) and
    /// the uncertainty principle. The stored matrix is exactly symmetrised.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let cm = Self::from_symmetric(matrix)?;
        let nu = cm.symplectic_eigenvalues()?;
        if let Some(bad) = nu.iter().find(|&&v| v < 1.0 - BONA_FIDE_TOL) {
            return Err(domain(format!(
                "not a physical state: symplectic eigenvalue {bad} < 1"
            )));
        }
        Ok(cm)
    }

    fn from_symmetric(matrix: DMatrix<f64>) -> Result<Self> {
        let (r, c) = matrix.shape();
        if r != c || r == 0 || r % 2 != 0 {
            return Err(Error::Shape(format!(
                "covariance matrix must be 2N x 2N, got {r} x {c}"
            )));
        }
        let scale = matrix.amax().max(1.0);
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::Shape(format!(
                "covariance matrix not symmetric (|σ - σᵀ| = {asym})"
            )));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::Shape(
                "covariance matrix has non-finite entries".into(),
            ));
        }
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        Ok(Self { matrix })
    }

    pub fn vacuum(modes: usize) -> Self {
        Self::thermal(&vec![1.0; modes]).expect("vacuum is a valid state")
    }

    /// Product of thermal states, mode i having variance `variances[i]` in both quadratures.
    pub fn thermal(variances: &[f64]) -> Result<Self> {
        if variances.is_empty() {
            return Err(Error::Shape("at least one mode required".into()));
        }
        if let Some(v) = variances.iter().find(|&&v| !(v >= 1.0)) {
            return Err(domain(format!("thermal variance {v} < 1")));
        }
        let diag: Vec<f64> = variances.iter().flat_map(|&v| [v, v]).collect();
        Ok(Self {
            matrix: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)),
        })
    }

    /// Direct sum σ₁ ⊕ σ₂; modes of `other` follow those of `self`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.matrix.nrows(), other.matrix.nrows());
        let mut m = DMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.matrix);
        m.view_mut((a, a), (b, b)).copy_from(&other.matrix);
        Self { matrix: m }
    }

    pub fn modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Reduced state on the listed modes, in the given order.
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        let n = self.modes();
        if modes.is_empty() {
            return Err(Error::Shape("empty mode list".into()));
        }
        if let Some(&m) = modes.iter().find(|&&m| m >= n) {
            return Err(Error::Shape(format!("mode {m} out of range for {n} modes")));
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let k = idx.len();
        let m = DMatrix::from_fn(k, k, |i, j| self.matrix[(idx[i], idx[j])]);
        Ok(Self { matrix: m })
    }

    /// S σ Sᵀ.
    pub fn transform(&self, s: &SymplecticTransform) -> Result<Self> {
        if s.matrix.nrows() != self.matrix.nrows() {
            return Err(Error::Shape(format!(
                "transform is {0}x{0} but state is {1}x{1}",
                s.matrix.nrows(),
                self.matrix.nrows()
            )));
        }
        Self::from_symmetric(&s.matrix * &self.matrix * s.matrix.transpose())
    }

    /// Symplectic spectrum, sorted descending.
    ///
    /// Multi-mode states diagonalise (σ^{1/2} Ω σ^{1/2})ᵀ(σ^{1/2} Ω σ^{1/2}),
    /// which stays accurate near degenerate spectra where the two-mode
    /// invariant formula loses half its digits.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        let m = &self.matrix;
        let mut nu = match self.modes() {
            1 => vec![det2(m, 0, 0).max(0.0).sqrt()],
            _ => symplectic_eigenvalues_dense(m)?,
        };
        nu.sort_by(|a, b| b.total_cmp(a));
        Ok(nu)
    }

    /// von Neumann entropy in bits, Σ h(νᵢ).
    pub fn entropy(&self) -> Result<f64> {
        self.symplectic_eigenvalues()?
            .into_iter()
            .map(entropy_h)
            .sum()
    }

    /// State of the unmeasured modes after homodyning `mode` along `quadrature`.
    pub fn homodyne_condition(&self, mode: usize, quadrature: Quadrature) -> Result<Self> {
        let n = self.modes();
        if n < 2 {
            return Err(Error::Shape(
                "homodyne conditioning needs at least two modes".into(),
            ));
        }
        if mode >= n {
            return Err(Error::Shape(format!(
                "mode {mode} out of range for {n} modes"
            )));
        }
        let keep: Vec<usize> = (0..n).filter(|&m| m != mode).collect();
        let rest = self.reduced(&keep)?;
        let row = 2 * mode + quadrature.offset();
        let var = self.matrix[(row, row)];
        // (Π σ_B Π)⁺ is 1/var on the measured quadrature, or zero when it is rank deficient.
        if var <= RANK_TOL * self.matrix.amax().max(1.0) {
            return Ok(rest);
        }
        let idx: Vec<usize> = keep.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let cross = nalgebra::DVector::from_fn(idx.len(), |i, _| self.matrix[(idx[i], row)]);
        let conditioned = rest.matrix - (&cross * cross.transpose()) / var;
        Self::from_symmetric(conditioned)
    }
}

fn det2(m: &DMatrix<f64>, r: usize, c: usize) -> f64 {
    m[(r, c)] * m[(r + 1, c + 1)] - m[(r, c + 1)] * m[(r + 1, c)]
}

fn symplectic_eigenvalues_dense(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = m.nrows();
    let (eigenvalues, q) = linalg::symmetric_eigen(m)?;
    if eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(domain("covariance matrix is not positive definite"));
    }
    let root = &q * DMatrix::from_diagonal(&eigenvalues.map(f64::sqrt)) * q.transpose();
    // A = σ^{1/2} Ω σ^{1/2} is antisymmetric with eigenvalues ±iνₖ; AᵀA has ν² twice.
    let a = &root * symplectic_form(dim / 2) * &root;
    let ata = a.transpose() * &a;
    let mut sq: Vec<f64> = linalg::symmetric_eigen(&ata)?.0.iter().copied().collect();
    sq.sort_by(|x, y| y.total_cmp(x));
    Ok(sq
        .chunks(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect())
}

/// Ω for `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut om = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        om[(2 * k, 2 * k + 1)] = 1.0;
        om[(2 * k + 1, 2 * k)] = -1.0;
    }
    om
}

/// A linear map on quadrature vectors that preserves Ω.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
}

impl SymplecticTransform {
    pub fn identity(modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * modes, 2 * modes),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Largest entry of |S Ω Sᵀ - Ω|.
    pub fn symplectic_defect(&self) -> f64 {
        let om = symplectic_form(self.matrix.nrows() / 2);
        (&self.matrix * &om * self.matrix.transpose() - om).amax()
    }

    /// Applies `self` after `first`.
    pub fn compose(&self, first: &Self) -> Result<Self> {
        if self.matrix.nrows() != first.matrix.nrows() {
            return Err(Error::Shape("transform dimensions differ".into()));
        }
        Ok(Self {
            matrix: &self.matrix * &first.matrix,
        })
    }

    /// Beam splitter of transmissivity `eta` acting on `modes = (a, b)`:
    /// a' = √η a + √(1-η) b, b' = -√(1-η) a + √η b, identically on q and p.
    pub fn beamsplitter(eta: f64, modes: (usize, usize), total_modes: usize) -> Result<Self> {
        check_transmissivity(eta)?;
        let (a, b) = modes;
        if a == b {
            return Err(Error::Shape(
                "beam splitter needs two distinct modes".into(),
            ));
        }
        if a >= total_modes || b >= total_modes {
            return Err(Error::Shape(format!(
                "modes ({a}, {b}) out of range for {total_modes} modes"
            )));
        }
        let t = eta.sqrt();
        let r = (1.0 - eta).sqrt();
        let mut s = DMatrix::identity(2 * total_modes, 2 * total_modes);
        for k in 0..2 {
            let (i, j) = (2 * a + k, 2 * b + k);
            s[(i, i)] = t;
            s[(i, j)] = r;
            s[(j, i)] = -r;
            s[(j, j)] = t;
        }
        Ok(Self { matrix: s })
    }

    /// Single-mode squeezer diag(e^{-r}, e^{r}) on `mode`.
    pub fn squeezer(r: f64, mode: usize, total_modes: usize) -> Result<Self> {
        if mode >= total_modes {
            return Err(Error::Shape(format!(
                "mode {mode} out of range for {total_modes} modes"
            )));
        }
        if !r.is_finite() {
            return Err(domain("squeezing parameter must be finite"));
        }
        let mut s = DMatrix::identity(2 * total_modes, 2 * total_modes);
        s[(2 * mode, 2 * mode)] = (-r).exp();
        s[(2 * mode + 1, 2 * mode + 1)] = r.exp();
        Ok(Self { matrix: s })
    }
}

/// Two-mode squeezed vacuum whose reduced states have variance `w`.
pub fn tmsv_cm(w: f64) -> Result<CovarianceMatrix> {
    if !(w >= 1.0) || !w.is_finite() {
        return Err(domain(format!("TMSV variance must be >= 1, got {w}")));
    }
    let c = (w * w - 1.0).sqrt();
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        w,   0.0, c,   0.0,
        0.0, w,   0.0, -c,
        c,   0.0, w,   0.0,
        0.0, -c,  0.0, w,
    ]);
    CovarianceMatrix::from_symmetric(m)
}

pub fn symplectic_eigenvalues(cm: &CovarianceMatrix) -> Result<Vec<f64>> {
    cm.symplectic_eigenvalues()
}

pub fn beamsplitter_symplectic(
    eta: f64,
    mode_pair: (usize, usize),
    total_modes: usize,
) -> Result<SymplecticTransform> {
    SymplecticTransform::beamsplitter(eta, mode_pair, total_modes)
}

pub fn homodyne_condition(
    cm: &CovarianceMatrix,
    measured_mode: usize,
    quadrature: Quadrature,
) -> Result<CovarianceMatrix> {
    cm.homodyne_condition(measured_mode, quadrature)
}

/// How Eve's two stored modes are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EveEntropyModel {
    /// Entropy of the joint (e, E′) state.
    Joint,
    /// Sum of the single-mode entropies of e and E′, discarding their mutual
    /// correlations. Coincides with `Joint` when W = 1.
    SingleModeMarginals,
}

/// Entangling-cloner network after the beam splitter, modes ordered
/// (B, e, E′).
pub fn cloner_output(t: f64, alice_variance: f64, eve_variance: f64) -> Result<CovarianceMatrix> {
    check_transmissivity(t)?;
    if !(alice_variance >= 1.0) {
        return Err(domain(format!(
            "alice variance must be >= 1, got {alice_variance}"
        )));
    }
    // (A, e, E): Alice's average state, then Eve's TMSV (idler e, injected E).
    let input = CovarianceMatrix::thermal(&[alice_variance])?.direct_sum(&tmsv_cm(eve_variance)?);
    input.transform(&SymplecticTransform::beamsplitter(t, (0, 2), 3)?)
}

/// Eve's Holevo information on Bob's q-homodyne outcome, H_E - H_{E|b}, in bits.
pub fn holevo_oracle(t: f64, alice_variance: f64, eve_variance: f64) -> Result<f64> {
    holevo_oracle_with(EveEntropyModel::Joint, t, alice_variance, eve_variance)
}

pub fn holevo_oracle_with(
    model: EveEntropyModel,
    t: f64,
    alice_variance: f64,
    eve_variance: f64,
) -> Result<f64> {
    let out = cloner_output(t, alice_variance, eve_variance)?;
    let eve = out.reduced(&[1, 2])?;
    let eve_given_bob = out.homodyne_condition(0, Quadrature::Q)?;
    let score = |cm: &CovarianceMatrix| -> Result<f64> {
        match model {
            EveEntropyModel::Joint => cm.entropy(),
            EveEntropyModel::SingleModeMarginals => {
                (0..cm.modes()).map(|m| cm.reduced(&[m])?.entropy()).sum()
            }
        }
    };
    Ok(score(&eve)? - score(&eve_given_bob)?)
}
