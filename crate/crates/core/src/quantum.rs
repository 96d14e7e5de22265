//! Dense complex linear algebra for small qubit registers.
//!
//! Computational-basis indices put qubit 1 in the most significant bit, so
//! `|q1 q2 ... qn>` sits at index `q1·2^(n-1) + ... + qn`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on the norm of a [`PureState`].
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance on hermiticity and trace of a [`DensityMatrix`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest eigenvalue a [`DensityMatrix`] may have.
pub const MIN_EIGENVALUE: f64 = -1e-10;
/// Eigenvalues below this make [`matrix_sqrt_psd`] fail instead of clamping.
pub const SQRT_REJECT: f64 = -1e-8;

/// Largest register accepted by [`tensor_product`].
pub const MAX_QUBITS: usize = 12;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Returns `log2(dim)` when `dim` is a power of two.
pub fn qubit_count(dim: usize) -> Option<usize> {
    (dim.is_power_of_two() && dim >= 2).then(|| dim.trailing_zeros() as usize)
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: CVector,
}

impl PureState {
    /// Wraps `amps`, which must already have unit norm.
    pub fn new(amps: CVector) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self { amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self { amps: amps / Complex64::from(norm) })
    }

    pub fn from_slice(amps: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amps))
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(CVector::from_iterator(
            amps.len(),
            amps.iter().map(|&a| Complex64::new(a, 0.0)),
        ))
    }

    /// Computational basis vector `|index>` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = CVector::zeros(dim);
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// `|0>` and `|1>` as single-qubit states.
    pub fn zero() -> Self {
        Self::basis(2, 0).expect("valid basis state")
    }

    pub fn one() -> Self {
        Self::basis(2, 1).expect("valid basis state")
    }

    /// `(|0> + |1>)/√2`.
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real(&[h, h]).expect("valid plus state")
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn n_qubits(&self) -> Option<usize> {
        qubit_count(self.dim())
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    /// `|ψ><ψ|`.
    pub fn projector(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }

    /// Applies a unitary; the result is renormalized to absorb roundoff.
    pub fn apply(&self, unitary: &CMatrix) -> Result<Self> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: unitary.nrows(),
            });
        }
        Self::normalized(unitary * &self.amps)
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates all density-matrix invariants.
    pub fn new(entries: CMatrix) -> Result<Self> {
        let dim = entries.nrows();
        if dim == 0 || entries.ncols() != dim {
            return Err(Error::InvalidState(format!(
                "density matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let dev = hermitian_deviation(&entries);
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max deviation {dev:e})"
            )));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > HERMITIAN_TOL || tr.im.abs() > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = hermitian_eigenvalues(&entries)
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < MIN_EIGENVALUE {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { entries })
    }

    /// Hermitizes and renormalizes the trace before validating.
    pub fn from_unnormalized(mut entries: CMatrix) -> Result<Self> {
        entries = hermitize(&entries);
        let tr = entries.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr} is not positive")));
        }
        entries /= Complex64::from(tr);
        Self::new(entries)
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            entries: psi.projector(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim) / Complex64::from(dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_qubits(&self) -> Option<usize> {
        qubit_count(self.dim())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    /// `<ψ|ρ|ψ>`.
    pub fn expectation(&self, psi: &PureState) -> Result<f64> {
        check_dim(self.dim(), psi.dim())?;
        let a = psi.amplitudes();
        Ok((a.adjoint() * &self.entries * a)[(0, 0)].re)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok((&self.entries - &other.entries).norm())
    }
}

/// A weighted ensemble of pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    elements: Vec<(f64, PureState)>,
}

impl Decomposition {
    pub fn new(elements: Vec<(f64, PureState)>) -> Result<Self> {
        let Some((_, first)) = elements.first() else {
            return Err(Error::InvalidState("empty decomposition".into()));
        };
        let dim = first.dim();
        let mut total = 0.0;
        for (w, psi) in &elements {
            if !(*w >= 0.0) {
                return Err(Error::InvalidState(format!("negative weight {w}")));
            }
            check_dim(dim, psi.dim())?;
            total += w;
        }
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[(f64, PureState)] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].1.dim()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(f64, PureState)> {
        self.elements.iter()
    }
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Largest elementwise `|m - m†|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `(m + m†)/2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::from(0.5)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Kronecker product in the given qubit order.
pub fn tensor_product(factors: &[PureState]) -> Result<PureState> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidState("empty factor list".into()))?;
    let total: usize = factors.iter().map(PureState::dim).product();
    if total > 1 << MAX_QUBITS {
        return Err(Error::InvalidState(format!(
            "product dimension {total} exceeds 2^{MAX_QUBITS}"
        )));
    }
    let amps = rest
        .iter()
        .fold(first.amplitudes().clone(), |acc, f| acc.kronecker(f.amplitudes()));
    PureState::normalized(amps)
}

/// GHZ basis of `n` qubits: `(|x> ± |x̄>)/√2` for every `x` with leading bit 0,
/// ordered by ascending `x` with `+` before `-`. Entries 0 and 1 are GHZ⁺ and GHZ⁻.
pub fn ghz_basis(n: usize) -> Result<Vec<PureState>> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("GHZ basis needs n >= 2, got {n}")));
    }
    if n > MAX_QUBITS {
        return Err(Error::InvalidParams(format!("n={n} exceeds {MAX_QUBITS} qubits")));
    }
    let dim = 1usize << n;
    let mask = dim - 1;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(dim);
    for x in 0..dim / 2 {
        for sign in [1.0, -1.0] {
            let mut amps = CVector::zeros(dim);
            amps[x] = Complex64::new(h, 0.0);
            amps[x ^ mask] = Complex64::new(sign * h, 0.0);
            basis.push(PureState { amps });
        }
    }
    Ok(basis)
}

/// `(|0…0> ± |1…1>)/√2`.
pub fn ghz_state(n: usize, plus: bool) -> Result<PureState> {
    let mut basis = ghz_basis(n)?;
    Ok(basis.swap_remove(if plus { 0 } else { 1 }))
}

/// `Σ p_i |ψ_i><ψ_i|`.
pub fn density_from_mixture(dec: &Decomposition) -> Result<DensityMatrix> {
    let dim = dec.dim();
    let mut m = CMatrix::zeros(dim, dim);
    for (w, psi) in dec.iter() {
        check_dim(dim, psi.dim())?;
        m += psi.projector() * Complex64::from(*w);
    }
    DensityMatrix::new(hermitize(&m))
}

/// Hermitian square root of a PSD matrix via eigendecomposition.
///
/// Eigenvalues in `[SQRT_REJECT, 0)` are treated as roundoff and clamped to zero.
pub fn matrix_sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            actual: m.ncols(),
        });
    }
    let eig = hermitize(m).symmetric_eigen();
    let mut roots = Vec::with_capacity(eig.eigenvalues.len());
    for &lambda in eig.eigenvalues.iter() {
        if lambda < SQRT_REJECT {
            return Err(Error::NotPsd(lambda));
        }
        roots.push(Complex64::from(lambda.max(0.0).sqrt()));
    }
    let v = &eig.eigenvectors;
    let d = CMatrix::from_diagonal(&CVector::from_vec(roots));
    Ok(hermitize(&(v * d * v.adjoint())))
}

/// Uhlmann fidelity `[Tr √(√ρ σ √ρ)]²`, clamped to `[0, 1]`.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dim(rho.dim(), sigma.dim())?;
    let sr = matrix_sqrt_psd(rho.matrix())?;
    let inner = &sr * sigma.matrix() * &sr;
    let tr: f64 = hermitian_eigenvalues(&inner)
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

/// `<φ|ψ>`, conjugating the first slot.
pub fn overlap(psi: &PureState, phi: &PureState) -> Result<Complex64> {
    check_dim(phi.dim(), psi.dim())?;
    Ok(phi.amplitudes().dotc(psi.amplitudes()))
}

/// Pauli Z.
pub fn sigma_z() -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
    ]))
}

/// `exp(i φ σ_z) = diag(e^{iφ}, e^{-iφ})`.
pub fn z_rotation(phi: f64) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_vec(vec![
        Complex64::from_polar(1.0, phi),
        Complex64::from_polar(1.0, -phi),
    ]))
}

/// Kronecker product of single-site operators.
pub fn kron_all(ops: &[CMatrix]) -> CMatrix {
    ops.iter()
        .skip(1)
        .fold(ops[0].clone(), |acc, op| acc.kronecker(op))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn tensor_product_basis_cases() {
        let z = PureState::zero();
        let t = tensor_product(&[z.clone(), z.clone(), z.clone()]).unwrap();
        assert_eq!(t.dim(), 8);
        assert!((t.amplitudes()[0] - c(1.0)).norm() < TOL);
        assert!(t.amplitudes().iter().skip(1).all(|a| a.norm() < TOL));

        let p = PureState::plus();
        let t = tensor_product(&[p.clone(), p.clone(), p.clone()]).unwrap();
        let u = 1.0 / 8f64.sqrt();
        assert!(t.amplitudes().iter().all(|a| (a - c(u)).norm() < TOL));

        let t = tensor_product(&[z, p]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [h, h, 0.0, 0.0];
        for (a, e) in t.amplitudes().iter().zip(expect) {
            assert!((a - c(e)).norm() < TOL);
        }
    }

    #[test]
    fn tensor_product_rejects_empty() {
        assert!(tensor_product(&[]).is_err());
    }

    #[test]
    fn ghz_basis_orthonormal_and_ordered() {
        for n in 2..=4 {
            let b = ghz_basis(n).unwrap();
            assert_eq!(b.len(), 1 << n);
            let mut completeness = CMatrix::zeros(1 << n, 1 << n);
            for (i, u) in b.iter().enumerate() {
                completeness += u.projector();
                for (j, v) in b.iter().enumerate() {
                    let g = overlap(u, v).unwrap();
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((g - c(e)).norm() < TOL, "n={n} i={i} j={j}");
                }
            }
            let id = CMatrix::identity(1 << n, 1 << n);
            assert!((completeness - id).norm() < TOL);
        }
        let b = ghz_basis(3).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((b[0].amplitudes()[0] - c(h)).norm() < TOL);
        assert!((b[0].amplitudes()[7] - c(h)).norm() < TOL);
        assert!((b[1].amplitudes()[7] - c(-h)).norm() < TOL);
        // third vector pairs |001> with |110>
        assert!((b[2].amplitudes()[1] - c(h)).norm() < TOL);
        assert!((b[2].amplitudes()[6] - c(h)).norm() < TOL);
        assert!(ghz_basis(1).is_err());
    }

    #[test]
    fn mixture_cases() {
        let d = Decomposition::new(vec![(1.0, PureState::basis(8, 0).unwrap())]).unwrap();
        let rho = density_from_mixture(&d).unwrap();
        assert!((rho.matrix()[(0, 0)] - c(1.0)).norm() < TOL);
        assert!((rho.matrix().norm() - 1.0).abs() < TOL);

        let d = Decomposition::new(vec![(0.5, PureState::zero()), (0.5, PureState::one())]).unwrap();
        let rho = density_from_mixture(&d).unwrap();
        let expect = CMatrix::identity(2, 2) * c(0.5);
        assert!((rho.matrix() - expect).norm() < TOL);

        let b = ghz_basis(3).unwrap();
        let d = Decomposition::new(b.into_iter().map(|v| (0.125, v)).collect()).unwrap();
        let rho = density_from_mixture(&d).unwrap();
        assert!(rho.frobenius_distance(&DensityMatrix::maximally_mixed(8)).unwrap() < TOL);
    }

    #[test]
    fn mixture_rejects_mismatched_dims() {
        let err = Decomposition::new(vec![
            (0.5, PureState::zero()),
            (0.5, PureState::basis(4, 0).unwrap()),
        ]);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
        assert!(Decomposition::new(vec![]).is_err());
        assert!(Decomposition::new(vec![(0.7, PureState::zero())]).is_err());
    }

    #[test]
    fn sqrt_cases() {
        let id8 = CMatrix::identity(8, 8) * c(1.0 / 8.0);
        let r = matrix_sqrt_psd(&id8).unwrap();
        let expect = CMatrix::identity(8, 8) * c(1.0 / 8f64.sqrt());
        assert!((r - expect).norm() < 1e-12);

        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.25), c(0.75)]));
        let r = matrix_sqrt_psd(&d).unwrap();
        assert!((r[(0, 0)] - c(0.5)).norm() < 1e-12);
        assert!((r[(1, 1)] - c(0.75f64.sqrt())).norm() < 1e-12);

        let p = ghz_state(3, true).unwrap().projector();
        let r = matrix_sqrt_psd(&p).unwrap();
        assert!((r - &p).norm() < 1e-9);
    }

    #[test]
    fn sqrt_clamps_roundoff_and_rejects_negative() {
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0), c(-5e-11)]));
        let r = matrix_sqrt_psd(&d).unwrap();
        assert_eq!(r[(1, 1)].re, 0.0);
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0), c(-1e-6)]));
        assert!(matches!(matrix_sqrt_psd(&d), Err(Error::NotPsd(_))));
    }

    #[test]
    fn fidelity_cases() {
        let rho = DensityMatrix::from_pure(&ghz_state(3, true).unwrap());
        assert!((uhlmann_fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);

        let psi = ghz_state(3, true).unwrap();
        let phi = tensor_product(&[PureState::plus(), PureState::plus(), PureState::zero()]).unwrap();
        let expect = overlap(&psi, &phi).unwrap().norm_sqr();
        let f = uhlmann_fidelity(&DensityMatrix::from_pure(&psi), &DensityMatrix::from_pure(&phi))
            .unwrap();
        assert!((f - expect).abs() < 1e-9);

        // commuting diagonals
        let p: [f64; 4] = [0.1, 0.2, 0.3, 0.4];
        let q = [0.4, 0.3, 0.2, 0.1];
        let diag = |v: &[f64]| {
            DensityMatrix::new(CMatrix::from_diagonal(&CVector::from_iterator(
                4,
                v.iter().map(|&x| c(x)),
            )))
            .unwrap()
        };
        let expect: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
        let f = uhlmann_fidelity(&diag(&p), &diag(&q)).unwrap();
        assert!((f - expect * expect).abs() < 1e-12);
        assert!(uhlmann_fidelity(&diag(&p), &DensityMatrix::maximally_mixed(8)).is_err());
    }

    #[test]
    fn overlap_cases() {
        let ghz = ghz_state(3, true).unwrap();
        let zero = PureState::basis(8, 0).unwrap();
        let o = overlap(&ghz, &zero).unwrap();
        assert!((o - c(std::f64::consts::FRAC_1_SQRT_2)).norm() < TOL);
        let p = PureState::plus();
        let ppp = tensor_product(&[p.clone(), p.clone(), p]).unwrap();
        assert!((overlap(&ghz, &ppp).unwrap() - c(0.5)).norm() < TOL);
        assert!((overlap(&ghz, &ghz).unwrap() - c(1.0)).norm() < TOL);
        assert!(overlap(&ghz, &PureState::zero()).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        let mut m = CMatrix::identity(2, 2) * c(0.5);
        m[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(DensityMatrix::new(m.clone()).is_err());
        m[(1, 0)] = Complex64::new(0.0, -0.1);
        assert!(DensityMatrix::new(m).is_ok());
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.2), c(-0.2)]));
        assert!(matches!(DensityMatrix::new(neg), Err(Error::NotPsd(_))));
        let bad_trace = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(bad_trace).is_err());
    }
}
