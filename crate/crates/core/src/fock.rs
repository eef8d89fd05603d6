//! Truncated Fock-space linear algebra.
//!
//! States live on a labeled tensor product of finite subsystems: the qubit
//! (dimension 2, basis `|g⟩ = 0`, `|e⟩ = 1`) and one or two truncated
//! oscillator modes. Every truncation goes through a [`TruncationPolicy`],
//! which rejects cutoffs whose discarded probability exceeds its tolerance;
//! the kept amplitudes are then renormalized.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for the Hermiticity, trace and positivity checks.
pub const STATE_TOLERANCE: f64 = 1e-10;
/// Eigenvalues below this are treated as exact zeros in entropies.
pub const EIGEN_CLAMP: f64 = 1e-14;

pub const QUBIT: &str = "qubit";
/// Cavity mode resonant with the qubit in |g⟩.
pub const MODE_G: &str = "mode_g";
/// Cavity mode resonant with the qubit in |e⟩.
pub const MODE_E: &str = "mode_e";
/// Default label of a lone oscillator mode.
pub const MODE: &str = "mode";

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Photon-number cutoff together with the largest tail mass it may discard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    dim: usize,
    tail_tolerance: f64,
}

impl TruncationPolicy {
    pub fn new(dim: usize, tail_tolerance: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("truncation dimension must be at least 1".into()));
        }
        if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
            return Err(Error::Config(format!(
                "tail tolerance must lie in (0, 1), got {tail_tolerance}"
            )));
        }
        Ok(Self { dim, tail_tolerance })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    /// Same tolerance, different cutoff.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        Self::new(dim, self.tail_tolerance)
    }

    fn admit(&self, tail: f64) -> Result<()> {
        if tail > self.tail_tolerance {
            Err(Error::TailTooHeavy {
                tail,
                tolerance: self.tail_tolerance,
                dim: self.dim,
            })
        } else {
            Ok(())
        }
    }
}

/// Pure state of one truncated oscillator mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: DVector<Complex64>,
    renormalization: f64,
    tail: f64,
    normalized: bool,
}

impl FockVector {
    /// Wraps raw amplitudes without normalizing them.
    pub fn unnormalized(amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Config("Fock vector needs dim >= 1".into()));
        }
        Ok(Self {
            amplitudes,
            renormalization: 1.0,
            tail: 0.0,
            normalized: false,
        })
    }

    /// Number state `|n⟩` in a space of dimension `dim`.
    pub fn number(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::Domain(format!("|{n}⟩ does not fit in dim {dim}")));
        }
        let mut amplitudes = DVector::from_element(dim, ZERO);
        amplitudes[n] = ONE;
        Ok(Self {
            amplitudes,
            renormalization: 1.0,
            tail: 0.0,
            normalized: true,
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// Factor applied to the truncated amplitudes to restore unit norm.
    pub fn renormalization(&self) -> f64 {
        self.renormalization
    }

    /// Probability mass discarded above the cutoff.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`, zero-padding the shorter vector.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    /// The projector `|ψ⟩⟨ψ|` as a single-mode density matrix.
    pub fn to_density(&self, label: &str) -> Result<DensityMatrix> {
        DensityMatrix::pure(&self.amplitudes, vec![self.dim()], vec![label.to_string()])
    }
}

/// Probability that a Poisson variable of the given mean is `>= from`,
/// summed term by term above the cutoff.
pub(crate) fn poisson_tail(mean: f64, from: usize) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    let ln_mean = mean.ln();
    let mut ln_p = -mean;
    let mut tail = 0.0;
    let mut n = 0usize;
    loop {
        if n >= from {
            let p = ln_p.exp();
            tail += p;
            if n as f64 > mean && (p < 1e-18 * tail.max(1e-300) || p == 0.0) {
                break;
            }
        }
        n += 1;
        ln_p += ln_mean - (n as f64).ln();
        if n > from + 100_000 {
            break;
        }
    }
    tail
}

/// Coherent state `|α⟩` truncated at `policy.dim()` and renormalized.
pub fn coherent_state(alpha: Complex64, policy: &TruncationPolicy) -> Result<FockVector> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::Domain("coherent amplitude must be finite".into()));
    }
    let dim = policy.dim();
    let mean = alpha.norm_sqr();
    let tail = poisson_tail(mean, dim);
    policy.admit(tail)?;

    let mut amplitudes = DVector::from_element(dim, ZERO);
    let mut c = Complex64::new((-mean / 2.0).exp(), 0.0);
    amplitudes[0] = c;
    for n in 1..dim {
        c = c * alpha / (n as f64).sqrt();
        amplitudes[n] = c;
    }
    let kept: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
    let renormalization = 1.0 / kept.sqrt();
    amplitudes *= Complex64::new(renormalization, 0.0);
    Ok(FockVector {
        amplitudes,
        renormalization,
        tail,
        normalized: true,
    })
}

/// Bose–Einstein (geometric) photon-number distribution of mean `nbar`,
/// truncated and renormalized. Returns `(populations, discarded tail)`.
pub fn thermal_populations(nbar: f64, policy: &TruncationPolicy) -> Result<(Vec<f64>, f64)> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::Domain(format!("mean occupancy must be >= 0, got {nbar}")));
    }
    let dim = policy.dim();
    let ratio = nbar / (nbar + 1.0);
    let tail = ratio.powi(dim as i32);
    policy.admit(tail)?;

    let mut populations = Vec::with_capacity(dim);
    let mut p = 1.0 / (nbar + 1.0);
    for _ in 0..dim {
        populations.push(p);
        p *= ratio;
    }
    let kept: f64 = populations.iter().sum();
    populations.iter_mut().for_each(|p| *p /= kept);
    Ok((populations, tail))
}

/// Thermal state of mean occupancy `nbar` on a lone mode labeled [`MODE`].
pub fn thermal_state(nbar: f64, policy: &TruncationPolicy) -> Result<DensityMatrix> {
    let (populations, _) = thermal_populations(nbar, policy)?;
    DensityMatrix::diagonal(&populations, MODE)
}

/// Hermitian, positive, unit-trace operator on a labeled tensor product.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<Complex64>,
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl DensityMatrix {
    /// Validates and wraps `matrix`.
    pub fn new(matrix: DMatrix<Complex64>, dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        let rho = Self::unchecked(matrix, dims, labels)?;
        rho.validate()?;
        Ok(rho)
    }

    fn unchecked(matrix: DMatrix<Complex64>, dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidState("subsystem dimensions must be >= 1".into()));
        }
        if dims.len() != labels.len() {
            return Err(Error::InvalidState(format!(
                "{} dimensions but {} labels",
                dims.len(),
                labels.len()
            )));
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        let size: usize = dims.iter().product();
        if matrix.nrows() != size || matrix.ncols() != size {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{} but dims {:?} imply {size}",
                matrix.nrows(),
                matrix.ncols(),
                dims
            )));
        }
        Ok(Self { matrix, dims, labels })
    }

    fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        let mut asym: f64 = 0.0;
        for (i, j) in nonzero_entries(m) {
            asym = asym.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
        if asym > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {asym:.3e})")));
        }
        let trace = m.trace();
        if (trace - ONE).norm() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector `psi`.
    pub fn pure(psi: &DVector<Complex64>, dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        Self::new(psi * psi.adjoint(), dims, labels)
    }

    /// Diagonal state with the given populations on one subsystem.
    pub fn diagonal(populations: &[f64], label: &str) -> Result<Self> {
        let diag = DVector::from_iterator(
            populations.len(),
            populations.iter().map(|&p| Complex64::new(p, 0.0)),
        );
        Self::new(
            DMatrix::from_diagonal(&diag),
            vec![populations.len()],
            vec![label.to_string()],
        )
    }

    /// Qubit state from its 2×2 matrix in the `{|g⟩, |e⟩}` basis.
    pub fn qubit(matrix: [[Complex64; 2]; 2]) -> Result<Self> {
        let m = DMatrix::from_fn(2, 2, |i, j| matrix[i][j]);
        Self::new(m, vec![2], vec![QUBIT.to_string()])
    }

    /// `|+⟩⟨+|` with `|+⟩ = (|g⟩ + |e⟩)/√2`.
    pub fn qubit_plus() -> Self {
        let h = Complex64::new(0.5, 0.0);
        Self::qubit([[h, h], [h, h]]).expect("|+⟩⟨+| is a valid state")
    }

    pub fn qubit_ground() -> Self {
        Self::qubit([[ONE, ZERO], [ZERO, ZERO]]).expect("|g⟩⟨g| is a valid state")
    }

    pub fn qubit_excited() -> Self {
        Self::qubit([[ZERO, ZERO], [ZERO, ONE]]).expect("|e⟩⟨e| is a valid state")
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    /// Real diagonal (populations in the product basis).
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|c| c.re).collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Renames the subsystems.
    pub fn relabel<S: Into<String>>(self, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels = labels.into_iter().map(Into::into).collect();
        Self::unchecked(self.matrix, self.dims, labels)
    }

    /// Row-major index of a product-basis state given one digit per subsystem.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.dims.len());
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&digit, &d)| acc * d + digit)
    }

    /// Largest elementwise distance to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &DMatrix<Complex64>) -> f64 {
        self.matrix
            .iter()
            .zip(other.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Digits of `index` in the mixed radix given by `dims`.
fn digits_of(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

/// Kronecker product `a ⊗ b`; dims and labels concatenate.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    if let Some(label) = b.labels.iter().find(|l| a.labels.contains(l)) {
        return Err(Error::DuplicateLabel(label.clone()));
    }
    let matrix = a.matrix.kronecker(&b.matrix);
    let dims = a.dims.iter().chain(&b.dims).copied().collect();
    let labels = a.labels.iter().chain(&b.labels).cloned().collect();
    DensityMatrix::new(matrix, dims, labels)
}

/// Reduced state on the subsystems in `keep`, in their original order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[&str]) -> Result<DensityMatrix> {
    let mut kept = vec![false; rho.dims.len()];
    for label in keep {
        kept[rho.position(label)?] = true;
    }
    if kept.iter().all(|&k| k) {
        return Ok(rho.clone());
    }
    let keep_dims: Vec<usize> = rho.dims.iter().zip(&kept).filter(|(_, &k)| k).map(|(&d, _)| d).collect();
    let keep_labels: Vec<String> = rho
        .labels
        .iter()
        .zip(&kept)
        .filter(|(_, &k)| k)
        .map(|(l, _)| l.clone())
        .collect();
    let keep_size: usize = keep_dims.iter().product();
    let trace_size = rho.dim() / keep_size.max(1);

    // Bucket product-basis indices by their traced-out part.
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(keep_size); trace_size];
    let mut digits = vec![0; rho.dims.len()];
    for index in 0..rho.dim() {
        digits_of(index, &rho.dims, &mut digits);
        let (mut ki, mut ti) = (0, 0);
        for ((&digit, &d), &k) in digits.iter().zip(&rho.dims).zip(&kept) {
            if k {
                ki = ki * d + digit;
            } else {
                ti = ti * d + digit;
            }
        }
        groups[ti].push((index, ki));
    }

    let mut out = DMatrix::from_element(keep_size, keep_size, ZERO);
    for group in &groups {
        for &(s, ks) in group {
            for &(r, kr) in group {
                out[(kr, ks)] += rho.matrix[(r, s)];
            }
        }
    }
    DensityMatrix::new(out, keep_dims, keep_labels)
}

/// Logarithm base for entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    /// Bits.
    #[default]
    Two,
    /// Nats.
    E,
}

/// `−Σ λ log λ` over the spectrum, with eigenvalues below [`EIGEN_CLAMP`] dropped.
pub fn von_neumann_entropy(rho: &DensityMatrix, base: LogBase) -> f64 {
    let nats: f64 = rho
        .eigenvalues()
        .into_iter()
        .filter(|&l| l > EIGEN_CLAMP)
        .map(|l| -l * l.ln())
        .sum();
    let s = match base {
        LogBase::Two => nats / std::f64::consts::LN_2,
        LogBase::E => nats,
    };
    s.max(0.0)
}

/// Unread projective measurement of the listed modes in the Fock basis:
/// coherences between different photon numbers of those modes are removed.
pub fn dephase_fock_basis(rho: &DensityMatrix, modes: &[&str]) -> Result<DensityMatrix> {
    let mut positions = Vec::with_capacity(modes.len());
    for mode in modes {
        if *mode == QUBIT {
            return Err(Error::Domain("the qubit is not a Fock mode".into()));
        }
        positions.push(rho.position(mode)?);
    }
    let n = rho.dim();
    let mut keys = vec![0usize; n];
    let mut digits = vec![0; rho.dims.len()];
    for (index, key) in keys.iter_mut().enumerate() {
        digits_of(index, &rho.dims, &mut digits);
        *key = positions.iter().fold(0, |acc, &p| acc * rho.dims[p] + digits[p]);
    }
    let matrix = DMatrix::from_fn(n, n, |r, s| {
        if keys[r] == keys[s] {
            rho.matrix[(r, s)]
        } else {
            ZERO
        }
    });
    DensityMatrix::new(matrix, rho.dims.clone(), rho.labels.clone())
}

/// Positions `(row, col)` of the non-zero entries, scanned in storage order.
fn nonzero_entries(m: &DMatrix<Complex64>) -> Vec<(usize, usize)> {
    let n = m.nrows();
    m.as_slice()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != ZERO)
        .map(|(k, _)| (k % n, k / n))
        .collect()
}

/// Index sets of the connected components of the non-zero pattern of `m`.
/// A Hermitian matrix is block diagonal over these sets up to permutation.
fn coupled_blocks(m: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, j) in nonzero_entries(m) {
        if i != j {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[root]].push(i);
    }
    blocks
}

fn sub_matrix(m: &DMatrix<Complex64>, block: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(block.len(), block.len(), |i, j| m[(block[i], block[j])])
}

/// Eigenvalues of a Hermitian matrix, diagonalizing each decoupled block separately.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut values = Vec::with_capacity(m.nrows());
    for block in coupled_blocks(m) {
        if block.len() == 1 {
            values.push(m[(block[0], block[0])].re);
        } else {
            let eig = SymmetricEigen::new(sub_matrix(m, &block));
            values.extend(eig.eigenvalues.iter().copied());
        }
    }
    values
}

/// Full eigendecomposition `(λ, v)` of a Hermitian matrix, block by block.
pub fn hermitian_eigh(m: &DMatrix<Complex64>) -> Vec<(f64, DVector<Complex64>)> {
    let n = m.nrows();
    let mut pairs = Vec::with_capacity(n);
    for block in coupled_blocks(m) {
        if block.len() == 1 {
            let mut v = DVector::from_element(n, ZERO);
            v[block[0]] = ONE;
            pairs.push((m[(block[0], block[0])].re, v));
        } else {
            let eig = SymmetricEigen::new(sub_matrix(m, &block));
            for (k, &value) in eig.eigenvalues.iter().enumerate() {
                let mut v = DVector::from_element(n, ZERO);
                for (local, &global) in block.iter().enumerate() {
                    v[global] = eig.eigenvectors[(local, k)];
                }
                pairs.push((value, v));
            }
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy(dim: usize) -> TruncationPolicy {
        TruncationPolicy::new(dim, 1e-9).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn policy_rejects_bad_parameters() {
        assert!(TruncationPolicy::new(0, 1e-9).is_err());
        assert!(TruncationPolicy::new(4, 0.0).is_err());
        assert!(TruncationPolicy::new(4, 1.0).is_err());
    }

    #[test]
    fn vacuum_coherent_state() {
        let v = coherent_state(c(0.0), &policy(8)).unwrap();
        assert_eq!(v.amplitudes()[0], ONE);
        assert!(v.amplitudes().iter().skip(1).all(|a| *a == ZERO));
        assert_eq!(v.tail(), 0.0);
    }

    #[test]
    fn coherent_vacuum_overlap_at_unit_amplitude() {
        let v = coherent_state(c(1.0), &TruncationPolicy::new(16, 1e-12).unwrap()).unwrap();
        assert!((v.amplitudes()[0].norm_sqr() - (-1.0f64).exp()).abs() < 1e-12);
        assert!((v.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coherent_cutoff_too_small() {
        // Oracle: complement of the kept Poisson(4) mass, n = 0..3.
        let kept: f64 = [1.0, 4.0, 8.0, 32.0 / 3.0].iter().sum::<f64>() * (-4.0f64).exp();
        let expected_tail = 1.0 - kept;
        assert!((expected_tail - 0.5665).abs() < 1e-3);
        match coherent_state(c(2.0), &TruncationPolicy::new(4, 0.5).unwrap()) {
            Err(Error::TailTooHeavy { tail, .. }) => assert!((tail - expected_tail).abs() < 1e-12),
            other => panic!("expected TailTooHeavy, got {other:?}"),
        }
    }

    #[test]
    fn thermal_populations_geometric() {
        let rho = thermal_state(1.0, &TruncationPolicy::new(32, 1e-9).unwrap()).unwrap();
        let p = rho.populations();
        assert!((p[0] - 0.5).abs() < 1e-9);
        assert!((p[1] - 0.25).abs() < 1e-9);
        let rho = thermal_state(0.5, &policy(40)).unwrap();
        assert!((rho.populations()[0] - 2.0 / 3.0).abs() < 1e-12);
        let vac = thermal_state(0.0, &policy(4)).unwrap();
        assert_eq!(vac.populations(), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn thermal_rejects_short_cutoff_and_negative_mean() {
        assert!(matches!(
            thermal_state(1.0, &policy(8)),
            Err(Error::TailTooHeavy { .. })
        ));
        assert!(thermal_state(-0.1, &policy(8)).is_err());
    }

    #[test]
    fn new_rejects_invalid_matrices() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.0), c(0.5)]);
        assert!(matches!(
            DensityMatrix::new(m, vec![2], vec!["a".into()]),
            Err(Error::InvalidState(_))
        ));
        let m = DMatrix::from_row_slice(2, 2, &[c(0.6), c(0.0), c(0.0), c(0.5)]);
        assert!(DensityMatrix::new(m, vec![2], vec!["a".into()]).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[c(1.2), c(0.0), c(0.0), c(-0.2)]);
        assert!(DensityMatrix::new(m, vec![2], vec!["a".into()]).is_err());
        let m = DMatrix::identity(4, 4) * c(0.25);
        assert!(matches!(
            DensityMatrix::new(m, vec![2, 2], vec!["a".into(), "a".into()]),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn tensor_of_maximally_mixed_qubits() {
        let half = DensityMatrix::diagonal(&[0.5, 0.5], "a").unwrap();
        let other = half.clone().relabel(["b"]).unwrap();
        let rho = tensor(&half, &other).unwrap();
        assert_eq!(rho.dims(), &[2, 2]);
        assert!(rho.max_abs_diff(&(DMatrix::identity(4, 4) * c(0.25))) < 1e-15);
        assert!(matches!(tensor(&half, &half), Err(Error::DuplicateLabel(_))));
    }

    #[test]
    fn tensor_of_projectors_is_a_projector() {
        let a = DensityMatrix::diagonal(&[1.0, 0.0], "a").unwrap();
        let b = DensityMatrix::diagonal(&[0.0, 1.0], "b").unwrap();
        let rho = tensor(&a, &b).unwrap();
        let idx = rho.index_of(&[0, 1]);
        assert_eq!(idx, 1);
        assert_eq!(rho.populations(), vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn tensor_thermal_with_vacuum_interleaves() {
        let th = thermal_state(1.0, &TruncationPolicy::new(32, 1e-9).unwrap()).unwrap();
        let vac = DensityMatrix::diagonal(&[1.0, 0.0], "v").unwrap();
        let rho = tensor(&th, &vac).unwrap();
        let p = rho.populations();
        let pth = th.populations();
        for n in 0..32 {
            assert_eq!(p[2 * n], pth[n]);
            assert_eq!(p[2 * n + 1], 0.0);
        }
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = DVector::from_vec(vec![c(s), ZERO, ZERO, c(s)]);
        let rho = DensityMatrix::pure(&psi, vec![2, 2], vec!["a".into(), "b".into()]).unwrap();
        let red = partial_trace(&rho, &["a"]).unwrap();
        assert!(red.max_abs_diff(&(DMatrix::identity(2, 2) * c(0.5))) < 1e-15);
        assert!((von_neumann_entropy(&red, LogBase::Two) - 1.0).abs() < 1e-12);
        assert!(matches!(partial_trace(&rho, &["z"]), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn partial_trace_middle_subsystem() {
        let a = DensityMatrix::qubit_plus().relabel(["a"]).unwrap();
        let b = thermal_state(0.3, &policy(30)).unwrap();
        let cst = coherent_state(Complex64::new(0.4, -0.2), &policy(20))
            .unwrap()
            .to_density("c")
            .unwrap();
        let abc = tensor(&tensor(&a, &b).unwrap(), &cst).unwrap();
        let ac = partial_trace(&abc, &["c", "a"]).unwrap();
        assert_eq!(ac.labels(), &["a".to_string(), "c".to_string()]);
        let expected = tensor(&a, &cst).unwrap();
        assert!(ac.max_abs_diff(expected.matrix()) < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        let pure = coherent_state(c(0.7), &policy(24)).unwrap().to_density(MODE).unwrap();
        assert!(von_neumann_entropy(&pure, LogBase::Two).abs() < 1e-10);
        let mixed = DensityMatrix::diagonal(&[0.5, 0.5], "q").unwrap();
        assert!((von_neumann_entropy(&mixed, LogBase::Two) - 1.0).abs() < 1e-14);
        assert!((von_neumann_entropy(&mixed, LogBase::E) - std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn thermal_entropy_matches_closed_form() {
        let nbar: f64 = 1.0;
        let rho = thermal_state(nbar, &TruncationPolicy::new(64, 1e-12).unwrap()).unwrap();
        // (n̄+1) log(n̄+1) − n̄ log n̄ in bits
        let closed = (nbar + 1.0) * (nbar + 1.0).log2() - nbar * nbar.log2();
        assert!((closed - 2.0).abs() < 1e-15);
        assert!((von_neumann_entropy(&rho, LogBase::Two) - closed).abs() < 1e-6);
    }

    #[test]
    fn dephasing_keeps_diagonal_states() {
        let th = thermal_state(0.4, &policy(30)).unwrap();
        let q = DensityMatrix::diagonal(&[0.3, 0.7], QUBIT).unwrap();
        let rho = tensor(&q, &th).unwrap();
        let out = dephase_fock_basis(&rho, &[MODE]).unwrap();
        assert_eq!(out, rho);
        assert!(dephase_fock_basis(&rho, &[QUBIT]).is_err());
        assert!(matches!(dephase_fock_basis(&rho, &["x"]), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn dephasing_keeps_qubit_coherence_within_a_photon_number() {
        // (|g,1⟩ + |e,1⟩)/√2 is untouched by a Fock-basis measurement.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = DVector::from_vec(vec![ZERO, c(s), ZERO, c(s)]);
        let rho = DensityMatrix::pure(&psi, vec![2, 2], vec![QUBIT.into(), MODE.into()]).unwrap();
        let out = dephase_fock_basis(&rho, &[MODE]).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn block_eigensolver_matches_dense() {
        let psi = coherent_state(Complex64::new(0.3, 0.5), &policy(12)).unwrap();
        let pure = psi.to_density("a").unwrap();
        let th = thermal_state(0.2, &policy(12)).unwrap().relabel(["b"]).unwrap();
        let rho = tensor(&pure, &th).unwrap();
        let mut blocked = rho.eigenvalues();
        let mut dense: Vec<f64> = SymmetricEigen::new(rho.matrix().clone()).eigenvalues.iter().copied().collect();
        blocked.sort_by(f64::total_cmp);
        dense.sort_by(f64::total_cmp);
        for (a, b) in blocked.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-12);
        }
        let pairs = hermitian_eigh(rho.matrix());
        for (value, v) in pairs {
            let residual = (rho.matrix() * &v - &v * c(value)).norm();
            assert!(residual < 1e-12);
        }
    }
}
