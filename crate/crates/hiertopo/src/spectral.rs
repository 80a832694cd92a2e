//! Laplacian spectra: a dense symmetric eigensolver used as the oracle,
//! characteristic-polynomial machinery, the level-by-level spectrum
//! recursion for hierarchies, and the spectral bounds on diameter, mean
//! distance and the Cheeger constant.
//!
//! The recursion exploits the block structure of a weighted product
//! K over L: conjugating by the eigenbasis of K leaves one block
//! `beta * kappa * D + L` per K-eigenvalue kappa, whose characteristic
//! polynomial is `phi_L(x) - beta * kappa * phi_L'(x)` with `phi_L'` the
//! root-deleted polynomial. Solving that degree-n polynomial per block
//! eigenvalue walks the whole spectrum down the hierarchy without ever
//! forming the big matrix.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::products::HierarchySpec;

/// Largest base-graph order accepted by the polynomial machinery.
pub const CHAR_POLY_MAX: usize = 64;

const IMAG_TOL: f64 = 1e-9;

/// Sorted Laplacian eigenvalue multiset of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Spectrum { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Algebraic connectivity: the second-smallest eigenvalue.
    pub fn lambda2(&self) -> f64 {
        self.values[1]
    }
}

/// Eigenvalues of the Laplacian via a dense symmetric eigensolver.
pub fn dense_spectrum(g: &Graph) -> Spectrum {
    let eig = nalgebra::SymmetricEigen::new(g.laplacian_matrix());
    Spectrum::from_unsorted(eig.eigenvalues.iter().copied().collect())
}

/// Eigenvector for the second-smallest Laplacian eigenvalue.
pub fn fiedler_vector(g: &Graph) -> Vec<f64> {
    let eig = nalgebra::SymmetricEigen::new(g.laplacian_matrix());
    let mut order: Vec<usize> = (0..g.order()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let col = eig.eigenvectors.column(order[1]);
    col.iter().copied().collect()
}

/// Monic characteristic polynomials of a Laplacian and of the same matrix
/// with the root row and column removed. Coefficients are stored in
/// ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPolyPair {
    pub phi: Vec<f64>,
    pub phi_rootdeleted: Vec<f64>,
}

/// Builds both polynomials by expanding the eigenvalues of L and of the
/// root-deleted minor; stable at the small orders base graphs have.
pub fn char_polys(laplacian: &DMatrix<f64>, root: usize) -> Result<CharPolyPair> {
    let n = laplacian.nrows();
    if n > CHAR_POLY_MAX {
        return Err(Error::CharPolyTooLarge {
            n,
            max: CHAR_POLY_MAX,
        });
    }
    if root >= n {
        return Err(Error::NodeOutOfRange {
            index: root,
            order: n,
        });
    }
    let full = nalgebra::SymmetricEigen::new(laplacian.clone());
    let minor = laplacian.clone().remove_row(root).remove_column(root);
    let reduced = nalgebra::SymmetricEigen::new(minor);
    Ok(CharPolyPair {
        phi: poly_from_roots(full.eigenvalues.as_slice()),
        phi_rootdeleted: poly_from_roots(reduced.eigenvalues.as_slice()),
    })
}

/// Expands prod (x - r) into ascending monic coefficients.
fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= r * c;
        }
        coeffs = next;
    }
    coeffs
}

pub fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn eval_poly_complex(coeffs: &[f64], z: Complex<f64>) -> Complex<f64> {
    coeffs
        .iter()
        .rev()
        .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect()
}

/// Roots of a monic real polynomial: companion-matrix eigenvalues polished
/// by damped Newton steps. The polynomials solved here come from symmetric
/// matrices, so surviving imaginary parts beyond tolerance are an error.
fn real_roots(coeffs: &[f64], level: usize, mu: f64) -> Result<Vec<f64>> {
    let degree = coeffs.len() - 1;
    debug_assert!((coeffs[degree] - 1.0).abs() < 1e-12);
    let mut companion = DMatrix::zeros(degree, degree);
    for i in 0..degree {
        companion[(i, degree - 1)] = -coeffs[i];
        if i + 1 < degree {
            companion[(i + 1, i)] = 1.0;
        }
    }
    let schur = nalgebra::linalg::Schur::try_new(companion, 1e-14, 20_000).ok_or_else(|| {
        Error::RootFinding {
            level,
            mu,
            reason: "companion Schur decomposition did not converge".into(),
        }
    })?;
    let raw = schur.complex_eigenvalues();
    let deriv = derivative(coeffs);
    let mut roots = Vec::with_capacity(degree);
    for z0 in raw.iter() {
        let mut z = *z0;
        // Damped Newton; multiple roots converge linearly, so allow a
        // generous iteration cap.
        for _ in 0..200 {
            let p = eval_poly_complex(coeffs, z);
            let dp = eval_poly_complex(&deriv, z);
            if dp.norm() == 0.0 {
                break;
            }
            let mut step = p / dp;
            let limit = 1.0 + z.norm();
            if step.norm() > limit {
                step *= limit / step.norm();
            }
            z -= step;
            if step.norm() <= 1e-14 * (1.0 + z.norm()) {
                break;
            }
        }
        if z.im.abs() > IMAG_TOL * z.re.abs().max(1.0) {
            return Err(Error::ComplexRoot {
                level,
                mu,
                imag: z.im,
            });
        }
        roots.push(z.re);
    }
    Ok(roots)
}

/// Per-level solver state: eigenvalues shared between the base Laplacian
/// and its root-deleted minor persist in every block polynomial (their
/// eigenvectors vanish at the root), so they are split off once and the
/// remaining pencil is solved with simple roots.
struct LevelSolver {
    persistent: Vec<f64>,
    phi_reduced: Vec<f64>,
    phi_rootdeleted_reduced: Vec<f64>,
    base_values: Vec<f64>,
}

impl LevelSolver {
    fn new(base: &Graph) -> Result<Self> {
        let lap = base.laplacian_matrix();
        let full = nalgebra::SymmetricEigen::new(lap.clone());
        let minor = lap.clone().remove_row(base.root()).remove_column(base.root());
        let reduced = nalgebra::SymmetricEigen::new(minor);
        let mut full_vals: Vec<f64> = full.eigenvalues.iter().copied().collect();
        let mut minor_vals: Vec<f64> = reduced.eigenvalues.iter().copied().collect();
        full_vals.sort_by(f64::total_cmp);
        minor_vals.sort_by(f64::total_cmp);
        let match_tol = 1e-8 * lap.norm().max(1.0);

        // Greedy matching of shared eigenvalues; multiplicity of the common
        // factor is the smaller of the two multiplicities.
        let mut persistent = Vec::new();
        let mut minor_used = vec![false; minor_vals.len()];
        let mut full_used = vec![false; full_vals.len()];
        for (i, &lam) in full_vals.iter().enumerate() {
            if let Some(j) = (0..minor_vals.len())
                .find(|&j| !minor_used[j] && (minor_vals[j] - lam).abs() <= match_tol)
            {
                minor_used[j] = true;
                full_used[i] = true;
                persistent.push(lam);
            }
        }
        let phi_roots: Vec<f64> = full_vals
            .iter()
            .zip(&full_used)
            .filter(|&(_, &used)| !used)
            .map(|(&v, _)| v)
            .collect();
        let phi_rd_roots: Vec<f64> = minor_vals
            .iter()
            .zip(&minor_used)
            .filter(|&(_, &used)| !used)
            .map(|(&v, _)| v)
            .collect();
        Ok(LevelSolver {
            persistent,
            phi_reduced: poly_from_roots(&phi_roots),
            phi_rootdeleted_reduced: poly_from_roots(&phi_rd_roots),
            base_values: full_vals,
        })
    }

    /// Block spectrum for one eigenvalue of the level above, with relative
    /// weight beta: persistent roots plus the roots of the reduced pencil
    /// `phi_red(x) - beta mu phi_rd_red(x)`.
    fn block_spectrum(&self, beta: f64, mu: f64, level: usize, out: &mut Vec<f64>) -> Result<()> {
        out.extend_from_slice(&self.persistent);
        let c = beta * mu;
        let mut poly = self.phi_reduced.clone();
        for (i, &coef) in self.phi_rootdeleted_reduced.iter().enumerate() {
            poly[i] -= c * coef;
        }
        out.extend(real_roots(&poly, level, mu)?);
        Ok(())
    }
}

/// Laplacian spectrum of a non-truncated hierarchy by the level recursion.
///
/// Starting from the dense spectrum of the top base, each level i maps
/// every eigenvalue mu of the partial product above it to the n_i roots of
/// `phi_i(x) - (alpha_{i+1}/alpha_i) mu phi_i'(x)`. The zero eigenvalue
/// short-circuits to the base spectrum, which the polynomial degenerates
/// to exactly.
pub fn recursive_spectrum(spec: &HierarchySpec) -> Result<Spectrum> {
    if spec.is_truncated() {
        return Err(Error::TruncatedSpectrumUnsupported);
    }
    let k = spec.levels();
    let bases = spec.bases();
    let alphas = spec.alphas();
    for base in bases {
        if base.order() > CHAR_POLY_MAX {
            return Err(Error::CharPolyTooLarge {
                n: base.order(),
                max: CHAR_POLY_MAX,
            });
        }
    }
    let mut values: Vec<f64> = dense_spectrum(&bases[k - 1]).values().to_vec();
    for level in (1..k).rev() {
        let base = &bases[level - 1];
        let beta = alphas[level] / alphas[level - 1];
        let solver = LevelSolver::new(base)?;
        let zero_tol = 1e-9 * values.last().copied().unwrap_or(1.0).max(1.0);
        let mut next = Vec::with_capacity(values.len() * base.order());
        for &mu in &values {
            if mu.abs() <= zero_tol {
                next.extend_from_slice(&solver.base_values);
            } else {
                solver.block_spectrum(beta, mu, level, &mut next)?;
            }
        }
        values = next;
    }
    Ok(Spectrum::from_unsorted(values))
}

/// The matrix the level recursion assembles: starting from the top base
/// Laplacian, each step takes the relative-weight product with the next
/// base down. Equals the direct Kronecker-sum Laplacian of the hierarchy.
pub fn recursion_matrix(spec: &HierarchySpec) -> Result<DMatrix<f64>> {
    if spec.is_truncated() {
        return Err(Error::TruncatedSpectrumUnsupported);
    }
    let k = spec.levels();
    let bases = spec.bases();
    let alphas = spec.alphas();
    let mut m = bases[k - 1].laplacian_matrix();
    for level in (1..k).rev() {
        let base = &bases[level - 1];
        let beta = alphas[level] / alphas[level - 1];
        let mut d = DMatrix::zeros(base.order(), base.order());
        d[(base.root(), base.root())] = 1.0;
        let eye = DMatrix::identity(m.nrows(), m.nrows());
        m = m.kronecker(&d) * beta + eye.kronecker(&base.laplacian_matrix());
    }
    Ok(m)
}

/// Spectral sandwiches on diameter, mean distance and the Cheeger constant
/// from the algebraic connectivity and the maximum valency.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBounds {
    pub lambda2: f64,
    pub diameter_lo: f64,
    pub diameter_hi: f64,
    pub mean_dist_lo: f64,
    pub mean_dist_hi: f64,
    pub cheeger_lo: f64,
    pub cheeger_hi: f64,
}

pub fn spectral_bounds(g: &Graph) -> Result<SpectralBounds> {
    let lambda2 = dense_spectrum(g).lambda2();
    if lambda2 <= IMAG_TOL {
        return Err(Error::ZeroSpectralGap(lambda2));
    }
    let n = g.order() as f64;
    let delta = g.max_valency();
    let log_term = ((delta + lambda2) / (4.0 * lambda2) * (n - 1.0).ln()).ceil();
    Ok(SpectralBounds {
        lambda2,
        diameter_lo: 4.0 / (n * lambda2),
        diameter_hi: 2.0 * log_term,
        mean_dist_lo: 2.0 / ((n - 1.0) * lambda2) + 0.5,
        mean_dist_hi: log_term,
        cheeger_lo: lambda2 / 2.0,
        cheeger_hi: (lambda2 * (2.0 * delta - lambda2)).sqrt(),
    })
}
