//! Dense eigen-analysis of the instantaneous Hamiltonian.

use faer::{Mat, Side};
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::operators::SparseHermitian;
use crate::schedule::AnnealHamiltonian;

/// Largest matrix dimension the dense routines accept.
pub const MAX_DENSE_DIM: usize = 1 << 14;
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-6;
pub const DEFAULT_SPECTRUM_POINTS: usize = 101;

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` belongs to `eigenvalues[i]`.
    pub eigenvectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.column(i).iter().copied().collect()
    }

    /// Largest `‖H·v_i − λ_i·v_i‖₂` over all pairs.
    pub fn max_residual(&self, h: &SparseHermitian) -> f64 {
        let dense = h.to_dense();
        let hv = &dense * &self.eigenvectors;
        (0..self.eigenvalues.len())
            .map(|i| (hv.column(i) - self.eigenvectors.column(i) * self.eigenvalues[i]).norm())
            .fold(0.0, f64::max)
    }
}

/// Sorted instantaneous spectra over a progress grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSeries {
    pub s_grid: Vec<f64>,
    pub levels: Vec<Vec<f64>>,
}

/// Lowest eigenvalue and an orthonormal basis of every eigenvector within
/// `degeneracy_tol` of it.
#[derive(Clone, Debug)]
pub struct GroundSpace {
    pub energy: f64,
    pub basis: Vec<Vec<f64>>,
    pub degeneracy_tol: f64,
}

impl GroundSpace {
    pub fn degeneracy(&self) -> usize {
        self.basis.len()
    }
}

fn guard(dim: usize) -> Result<()> {
    if dim > MAX_DENSE_DIM {
        return Err(Error::Capability(format!(
            "dense eigendecomposition limited to dimension {MAX_DENSE_DIM}, got {dim}"
        )));
    }
    Ok(())
}

fn to_faer(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Ascending eigenvalues and matching eigenvector columns of a real symmetric matrix.
pub(crate) fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = to_faer(m).selfadjoint_eigendecomposition(Side::Lower);
    let (s, u) = (eig.s().column_vector(), eig.u());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| s.read(a).total_cmp(&s.read(b)));
    let values = order.iter().map(|&i| s.read(i)).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| u.read(r, order[c]));
    (values, vectors)
}

fn sorted_decomposition(m: DMatrix<f64>) -> EigenDecomposition {
    let (eigenvalues, eigenvectors) = symmetric_eigen(&m);
    EigenDecomposition { eigenvalues, eigenvectors }
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut vals = to_faer(&m).selfadjoint_eigenvalues(Side::Lower);
    vals.sort_by(f64::total_cmp);
    vals
}

pub fn eigen_decompose(h: &SparseHermitian) -> Result<EigenDecomposition> {
    guard(h.dimension())?;
    Ok(sorted_decomposition(h.to_dense()))
}

/// Ascending eigenvalues only.
pub fn eigenvalues(h: &SparseHermitian) -> Result<Vec<f64>> {
    guard(h.dimension())?;
    Ok(sorted_eigenvalues(h.to_dense()))
}

/// `n` uniformly spaced progress values from 0 to 1 inclusive.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| if i == n - 1 { 1.0 } else { i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

pub fn spectrum_series(ah: &AnnealHamiltonian, s_grid: &[f64]) -> Result<SpectrumSeries> {
    spectrum_series_with(ah, s_grid, Exec::default())
}

/// Grid points are independent and fan out under [`Exec::Parallel`].
pub fn spectrum_series_with(ah: &AnnealHamiltonian, s_grid: &[f64], exec: Exec) -> Result<SpectrumSeries> {
    guard(ah.dimension())?;
    if let Some(bad) = s_grid.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(Error::Range(format!("grid value {bad} outside [0, 1]")));
    }
    if s_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Range("spectrum grid must be ascending".into()));
    }
    let levels = exec::map(exec, s_grid, |&s| {
        ah.dense_at(s).map(sorted_eigenvalues)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumSeries { s_grid: s_grid.to_vec(), levels })
}

pub fn ground_space(h: &SparseHermitian, degeneracy_tol: f64) -> Result<GroundSpace> {
    let decomposition = eigen_decompose(h)?;
    ground_space_from(&decomposition, degeneracy_tol)
}

/// Ground space of an existing decomposition.
pub fn ground_space_from(decomposition: &EigenDecomposition, degeneracy_tol: f64) -> Result<GroundSpace> {
    if !(degeneracy_tol >= 0.0) {
        return Err(Error::Config(format!("degeneracy_tol must be >= 0, got {degeneracy_tol}")));
    }
    let energy = *decomposition
        .eigenvalues
        .first()
        .ok_or_else(|| Error::Contract("empty decomposition".into()))?;
    let basis = decomposition
        .eigenvalues
        .iter()
        .take_while(|&&e| e <= energy + degeneracy_tol)
        .enumerate()
        .map(|(i, _)| decomposition.eigenvector(i))
        .collect();
    Ok(GroundSpace { energy, basis, degeneracy_tol })
}

/// The `count` lowest eigenvectors regardless of degeneracy.
pub fn lowest_subspace(decomposition: &EigenDecomposition, count: usize) -> GroundSpace {
    let count = count.clamp(1, decomposition.eigenvalues.len());
    GroundSpace {
        energy: decomposition.eigenvalues[0],
        basis: (0..count).map(|i| decomposition.eigenvector(i)).collect(),
        degeneracy_tol: decomposition.eigenvalues[count - 1] - decomposition.eigenvalues[0],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_exchange_zeeman, build_staggered_driver, Bond, CouplingGraph};
    use crate::schedule::AnnealSchedule;

    /// Cyclic Jacobi rotations; independent of the production solver.
    fn jacobi_eigenvalues(mut a: DMatrix<f64>) -> Vec<f64> {
        let n = a.nrows();
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].powi(2))
                .sum();
            if off < 1e-26 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[(p, q)].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (akp, akq) = (a[(k, p)], a[(k, q)]);
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut v: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    fn pair(j: f64) -> SparseHermitian {
        build_exchange_zeeman(&CouplingGraph::new(2, vec![Bond::new(1, 2, j)]).unwrap(), 1.0)
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn two_spin_final_spectra() {
        assert_close(&eigen_decompose(&pair(5.0)).unwrap().eigenvalues, &[-6.0, -5.0, -4.0, 15.0], 1e-10);
        assert_close(&eigen_decompose(&pair(-5.0)).unwrap().eigenvalues, &[-15.0, 4.0, 5.0, 6.0], 1e-10);
    }

    #[test]
    fn matches_jacobi_for_small_chains() {
        let graphs = [
            CouplingGraph::new(2, vec![Bond::new(1, 2, 5.0)]).unwrap(),
            CouplingGraph::ring(&[5.0, 5.0, -5.0]).unwrap(),
            CouplingGraph::ring(&[1.3, -0.4, 2.2]).unwrap(),
        ];
        for g in &graphs {
            let ah = AnnealHamiltonian::new(
                build_exchange_zeeman(g, 1.0),
                build_staggered_driver(g.n_spins(), 20.0).unwrap(),
                AnnealSchedule::new(1.0).unwrap(),
            )
            .unwrap();
            for s in [0.0, 0.3, 0.77, 1.0] {
                let dense = ah.dense_at(s).unwrap();
                let oracle = jacobi_eigenvalues(dense.clone());
                assert_close(&sorted_eigenvalues(dense), &oracle, 1e-9);
            }
        }
    }

    #[test]
    fn decomposition_is_orthonormal_with_small_residuals() {
        let g = CouplingGraph::ring(&[5.0, -5.0, 5.0, -5.0, 5.0]).unwrap();
        let h = build_exchange_zeeman(&g, 1.0);
        let d = eigen_decompose(&h).unwrap();
        assert!(d.max_residual(&h) <= 1e-8 * h.max_row_sum().max(1.0));
        let gram = d.eigenvectors.transpose() * &d.eigenvectors;
        assert!((gram - DMatrix::identity(32, 32)).abs().max() < 1e-10);
        assert!(d.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = d.eigenvalues.iter().sum();
        assert!((sum - h.trace()).abs() <= 1e-8 * h.max_row_sum());
    }

    #[test]
    fn ground_space_examples() {
        let gs = ground_space(&pair(5.0), DEFAULT_DEGENERACY_TOL).unwrap();
        assert_eq!(gs.degeneracy(), 1);
        assert!((gs.energy + 6.0).abs() < 1e-10);
        assert!((gs.basis[0][0].abs() - 1.0).abs() < 1e-10);

        let gs = ground_space(&pair(-5.0), DEFAULT_DEGENERACY_TOL).unwrap();
        assert_eq!(gs.degeneracy(), 1);
        assert!((gs.energy + 15.0).abs() < 1e-10);
        let v = &gs.basis[0];
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[1].abs() - r).abs() < 1e-10 && (v[1] + v[2]).abs() < 1e-10);

        let ring = build_exchange_zeeman(&CouplingGraph::ring(&[5.0; 9]).unwrap(), 1.0);
        let d = eigen_decompose(&ring).unwrap();
        let gs = ground_space_from(&d, DEFAULT_DEGENERACY_TOL).unwrap();
        assert_eq!(gs.degeneracy(), 1);
        assert!((gs.energy + 49.5).abs() < 1e-8);
        assert!((d.eigenvalues[1] + 48.5).abs() < 1e-8);
    }

    #[test]
    fn degenerate_ground_space_collects_all_members() {
        // pure Zeeman with b0 = 0: everything degenerate
        let g = CouplingGraph::new(2, vec![]).unwrap();
        let h = build_exchange_zeeman(&g, 0.0);
        let gs = ground_space(&h, 1e-6).unwrap();
        assert_eq!(gs.degeneracy(), 4);
        let d2 = build_staggered_driver(2, 20.0).unwrap();
        let gs = ground_space(&d2, 1e-6).unwrap();
        assert_eq!(gs.degeneracy(), 1);
        assert!((gs.energy + 20.0).abs() < 1e-10);
    }

    #[test]
    fn series_endpoints() {
        let g = CouplingGraph::ring(&[5.0, 5.0, -5.0]).unwrap();
        let ah = AnnealHamiltonian::new(
            build_exchange_zeeman(&g, 1.0),
            build_staggered_driver(3, 20.0).unwrap(),
            AnnealSchedule::new(500.0).unwrap(),
        )
        .unwrap();
        let grid = uniform_grid(5);
        assert_eq!(grid, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let seq = spectrum_series_with(&ah, &grid, Exec::Sequential).unwrap();
        let par = spectrum_series_with(&ah, &grid, Exec::Parallel).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.levels[0], eigenvalues(ah.h_driver()).unwrap());
        assert_eq!(seq.levels[4], eigenvalues(ah.h_final()).unwrap());
        assert!(spectrum_series(&ah, &[0.5, 0.2]).is_err());
        assert!(spectrum_series(&ah, &[1.2]).is_err());
    }

    #[test]
    fn dense_guard() {
        let big = SparseHermitian::zeros(MAX_DENSE_DIM + 1);
        assert!(matches!(eigen_decompose(&big), Err(Error::Capability(_))));
    }
}
