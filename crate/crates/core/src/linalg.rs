//! Dense complex linear algebra for small open-system problems.
//!
//! Every operator, density matrix and superoperator in the crate is a
//! [`CMatrix`]. Multi-factor spaces use the row-major tensor convention of
//! [`kron`]: factor 0 is the most significant index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest matrix dimension the dense backend accepts (a 6-site Liouvillian).
pub const MAX_DENSE_DIM: usize = 4096;
/// Absolute max-norm tolerance used when an input is declared Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Default relative singular-value threshold for kernel detection.
pub const KERNEL_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn check_dim(dim: usize) -> Result<()> {
    if dim > MAX_DENSE_DIM {
        Err(Error::DimensionOverflow {
            dim,
            max: MAX_DENSE_DIM,
        })
    } else {
        Ok(())
    }
}

fn check_square(m: &CMatrix, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn diag(entries: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        entries.len(),
        entries.iter().map(|&x| c(x, 0.0)),
    ))
}

/// Tensor product with `result[(i*nb + k, j*nb + l)] = a[(i, j)] * b[(k, l)]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_dim(a.nrows() * b.nrows())?;
    check_dim(a.ncols() * b.ncols())?;
    Ok(a.kronecker(b))
}

/// Left-to-right tensor product of all factors.
pub fn kron_all(factors: &[CMatrix]) -> Result<CMatrix> {
    let mut it = factors.iter();
    let first = it
        .next()
        .ok_or_else(|| Error::DimensionMismatch("empty tensor product".into()))?;
    it.try_fold(first.clone(), |acc, f| kron(&acc, f))
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

pub fn trace(a: &CMatrix) -> C64 {
    a.diagonal().sum()
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn ensure_finite(a: &CMatrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_hermitian(a: &CMatrix, tol: f64) -> Result<()> {
    check_square(a, "Hermitian input")?;
    ensure_finite(a)?;
    let deviation = hermiticity_deviation(a);
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }
    Ok(())
}

pub fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix: real eigenvalues and the
/// unitary whose columns are the eigenvectors.
pub fn eigh(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    ensure_hermitian(h, HERMITICITY_TOL)?;
    let eig = hermitize(h).symmetric_eigen();
    Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
}

pub fn eigvalsh(h: &CMatrix) -> Result<Vec<f64>> {
    ensure_hermitian(h, HERMITICITY_TOL)?;
    let mut vals: Vec<f64> = hermitize(h)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Dense product. Above a small size the complex product is split into
/// four real ones, which run on nalgebra's blocked f64 kernel.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    if a.nrows().max(a.ncols()).max(b.ncols()) < 48 {
        return a * b;
    }
    let (ar, ai) = (a.map(|z| z.re), a.map(|z| z.im));
    let (br, bi) = (b.map(|z| z.re), b.map(|z| z.im));
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    re.zip_map(&im, C64::new)
}

/// `exp(-i t h)` for Hermitian `h`, through its eigen-decomposition.
pub fn herm_expm(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let (vals, vecs) = eigh(h)?;
    let phases = CVector::from_iterator(
        vals.len(),
        vals.iter().map(|&e| C64::from_polar(1.0, -t * e)),
    );
    let mut scaled = vecs.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    Ok(matmul(&scaled, &vecs.adjoint()))
}

/// Row-major multi-index helper for a tensor-product space.
#[derive(Debug, Clone)]
struct Strides {
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl Strides {
    fn new(dims: &[usize]) -> Self {
        let mut strides = vec![1; dims.len()];
        for s in (0..dims.len().saturating_sub(1)).rev() {
            strides[s] = strides[s + 1] * dims[s + 1];
        }
        Self {
            dims: dims.to_vec(),
            strides,
        }
    }

    fn digit(&self, index: usize, slot: usize) -> usize {
        (index / self.strides[slot]) % self.dims[slot]
    }
}

/// Trace out every factor not listed in `keep`. The kept factors appear in
/// the result in their original order.
pub fn partial_trace(rho: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_square(rho, "partial-trace input")?;
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch(
            "factor dimensions must be positive".into(),
        ));
    }
    let total: usize = dims.iter().product();
    if total != rho.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "factor dimensions {dims:?} multiply to {total}, matrix has dimension {}",
            rho.nrows()
        )));
    }
    if keep.is_empty() {
        return Err(Error::DimensionMismatch(
            "partial trace must keep at least one factor".into(),
        ));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "invalid kept factor set {keep:?}"
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|s| !kept.contains(s)).collect();

    let full = Strides::new(dims);
    let kept_dims: Vec<usize> = kept.iter().map(|&s| dims[s]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&s| dims[s]).collect();
    let kept_strides = Strides::new(&kept_dims);
    let traced_strides = Strides::new(&traced_dims);
    let d_keep: usize = kept_dims.iter().product();
    let d_trace: usize = traced_dims.iter().product();

    // table[t][k] = full index whose kept digits encode k and traced digits encode t
    let mut table = vec![vec![0usize; d_keep]; d_trace];
    for idx in 0..total {
        let mut k = 0;
        for (pos, &s) in kept.iter().enumerate() {
            k += full.digit(idx, s) * kept_strides.strides[pos];
        }
        let mut t = 0;
        for (pos, &s) in traced.iter().enumerate() {
            t += full.digit(idx, s) * traced_strides.strides[pos];
        }
        table[t][k] = idx;
    }

    let mut out = CMatrix::zeros(d_keep, d_keep);
    for row in &table {
        for (r, &ir) in row.iter().enumerate() {
            for (cc, &ic) in row.iter().enumerate() {
                out[(r, cc)] += rho[(ir, ic)];
            }
        }
    }
    Ok(out)
}

/// Column-stacking vectorization.
pub fn vec_of(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

/// Inverse of [`vec_of`] for a `dim x dim` matrix.
pub fn unvec(v: &CVector, dim: usize) -> Result<CMatrix> {
    if v.len() != dim * dim {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} cannot be reshaped to {dim}x{dim}",
            v.len()
        )));
    }
    Ok(CMatrix::from_column_slice(dim, dim, v.as_slice()))
}

/// Largest singular value.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    a.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// `½ ‖a − b‖₁` for Hermitian `a`, `b`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let diff = hermitize(&(a - b));
    Ok(0.5 * eigvalsh(&diff)?.iter().map(|x| x.abs()).sum::<f64>())
}

/// Orthonormal basis of the numerical kernel of a square matrix.
#[derive(Debug, Clone)]
pub struct NullSpace {
    pub vectors: Vec<CVector>,
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
}

impl NullSpace {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn largest_singular_value(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Largest singular value classified as kernel.
    pub fn largest_kernel_value(&self) -> f64 {
        let n = self.singular_values.len();
        self.singular_values[n - self.dim()]
    }

    /// Smallest singular value outside the kernel, if any.
    pub fn next_value(&self) -> Option<f64> {
        let n = self.singular_values.len();
        (self.dim() < n).then(|| self.singular_values[n - self.dim() - 1])
    }

    /// Ratio between the first non-kernel singular value and the largest
    /// kernel one; infinite when the kernel values are exactly zero or the
    /// kernel is the whole space.
    pub fn gap_ratio(&self) -> f64 {
        match self.next_value() {
            None => f64::INFINITY,
            Some(next) => {
                let k = self.largest_kernel_value();
                if k == 0.0 {
                    f64::INFINITY
                } else {
                    next / k
                }
            }
        }
    }
}

/// Kernel via full SVD: every right singular direction whose singular value
/// is at most `tol` times the largest one (or exactly zero).
pub fn null_space(m: &CMatrix, tol: f64) -> Result<NullSpace> {
    check_square(m, "null-space input")?;
    ensure_finite(m)?;
    let n = m.nrows();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let threshold = tol * sigma_max;

    let vectors: Vec<CVector> = (0..n)
        .filter(|&k| singular_values[k] <= threshold)
        .map(|k| v_t.row(k).adjoint())
        .collect();
    if vectors.is_empty() {
        let smallest = singular_values.last().copied().unwrap_or(0.0);
        return Err(Error::EmptyKernel {
            tol,
            smallest: smallest / sigma_max,
        });
    }
    Ok(NullSpace {
        vectors,
        singular_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{pauli, Pauli};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
        hermitize(&random_matrix(rng, n))
    }

    fn random_vector(rng: &mut impl Rng, n: usize) -> CVector {
        CVector::from_fn(n, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    /// Index-level oracle for the tensor product.
    fn kron_oracle(a: &CMatrix, b: &CMatrix) -> CMatrix {
        let (na, nb) = (a.nrows(), b.nrows());
        let mut out = CMatrix::zeros(na * nb, na * nb);
        for i in 0..na {
            for j in 0..na {
                for k in 0..nb {
                    for l in 0..nb {
                        out[(i * nb + k, j * nb + l)] = a[(i, j)] * b[(k, l)];
                    }
                }
            }
        }
        out
    }

    fn kron_vec(x: &CVector, y: &CVector) -> CVector {
        CVector::from_fn(x.len() * y.len(), |r, _| x[r / y.len()] * y[r % y.len()])
    }

    #[test]
    fn split_product_matches_direct() {
        let a = CMatrix::from_fn(50, 60, |i, j| {
            c((i as f64 * 0.3 - j as f64).sin(), (i * j) as f64 * 1e-3)
        });
        let b = CMatrix::from_fn(60, 55, |i, j| {
            c((i + 2 * j) as f64 * 0.01, (j as f64 - i as f64).cos())
        });
        assert!(max_abs_diff(&matmul(&a, &b), &(&a * &b)) < 1e-12);
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let out = kron(&identity(2), &identity(2)).unwrap();
        assert_eq!(out, identity(4));
    }

    #[test]
    fn kron_of_sigma_z() {
        let z = pauli(Pauli::Z);
        assert_eq!(kron(&z, &z).unwrap(), diag(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_acts_factorwise_on_product_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 2);
            let b = random_matrix(&mut rng, 2);
            let x = random_vector(&mut rng, 2);
            let y = random_vector(&mut rng, 2);
            let ab = kron(&a, &b).unwrap();
            assert_abs_diff_eq!(max_abs_diff(&ab, &kron_oracle(&a, &b)), 0.0);
            let lhs = &ab * kron_vec(&x, &y);
            let rhs = kron_vec(&(&a * &x), &(&b * &y));
            assert!((lhs - rhs).camax() < 1e-14);
        }
    }

    #[test]
    fn kron_rejects_oversized_products() {
        let big = identity(128);
        assert!(matches!(
            kron(&big, &big),
            Err(Error::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn partial_trace_of_product_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_matrix(&mut rng, 3);
        let b = random_matrix(&mut rng, 2);
        let ab = kron(&a, &b).unwrap();
        let tr_b = partial_trace(&ab, &[3, 2], &[0]).unwrap();
        assert!(max_abs_diff(&tr_b, &(a.clone() * trace(&b))) < 1e-14);
        let tr_a = partial_trace(&ab, &[3, 2], &[1]).unwrap();
        assert!(max_abs_diff(&tr_a, &(b * trace(&a))) < 1e-14);
    }

    #[test]
    fn bell_state_marginals_are_maximally_mixed() {
        let s = 1.0 / 2f64.sqrt();
        let psi = CVector::from_vec(vec![c(s, 0.0), ZERO, ZERO, c(s, 0.0)]);
        let proj = &psi * psi.adjoint();
        for keep in [0, 1] {
            let marginal = partial_trace(&proj, &[2, 2], &[keep]).unwrap();
            assert!(max_abs_diff(&marginal, &identity(2).scale(0.5)) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_over_middle_factor_matches_index_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_matrix(&mut rng, 8);
        let out = partial_trace(&rho, &[2, 2, 2], &[0, 2]).unwrap();
        let mut oracle = CMatrix::zeros(4, 4);
        for a in 0..2 {
            for cc in 0..2 {
                for a2 in 0..2 {
                    for c2 in 0..2 {
                        for m in 0..2 {
                            oracle[(a * 2 + cc, a2 * 2 + c2)] +=
                                rho[(a * 4 + m * 2 + cc, a2 * 4 + m * 2 + c2)];
                        }
                    }
                }
            }
        }
        assert!(max_abs_diff(&out, &oracle) < 1e-15);
        assert!((trace(&out) - trace(&rho)).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_inconsistent_dims() {
        let rho = identity(8);
        assert!(partial_trace(&rho, &[2, 3], &[0]).is_err());
        assert!(partial_trace(&rho, &[2, 2, 2], &[]).is_err());
        assert!(partial_trace(&rho, &[2, 2, 2], &[3]).is_err());
    }

    #[test]
    fn expm_of_zero_is_identity() {
        for n in [1, 2, 5] {
            let u = herm_expm(&CMatrix::zeros(n, n), 1.0).unwrap();
            assert!(max_abs_diff(&u, &identity(n)) < 1e-15);
        }
    }

    #[test]
    fn expm_of_sigma_x_at_quarter_turn() {
        // exp(-i θ σx) = cos θ I − i sin θ σx, θ = π/2
        let x = pauli(Pauli::X);
        let u = herm_expm(&x, std::f64::consts::FRAC_PI_2).unwrap();
        let expected = x.map(|z| z * c(0.0, -1.0));
        assert!(max_abs_diff(&u, &expected) < 1e-15);
    }

    #[test]
    fn expm_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = random_hermitian(&mut rng, 4);
        let u = herm_expm(&h, 0.3).unwrap();
        assert!(max_abs_diff(&(u.adjoint() * &u), &identity(4)) < 1e-12);
        assert!(max_abs_diff(&(&u * u.adjoint()), &identity(4)) < 1e-12);
    }

    #[test]
    fn expm_rejects_non_hermitian_input() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = ONE;
        assert!(matches!(
            herm_expm(&m, 1.0),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn null_space_of_zero_is_everything() {
        let ns = null_space(&CMatrix::zeros(4, 4), KERNEL_TOL).unwrap();
        assert_eq!(ns.dim(), 4);
    }

    #[test]
    fn null_space_of_diagonal() {
        let ns = null_space(&diag(&[1.0, 1.0, 1.0, 0.0]), KERNEL_TOL).unwrap();
        assert_eq!(ns.dim(), 1);
        let v = &ns.vectors[0];
        assert!((v[3].norm() - 1.0).abs() < 1e-14);
        assert!(v.rows(0, 3).camax() < 1e-14);
    }

    #[test]
    fn null_space_empty_is_an_error() {
        assert!(matches!(
            null_space(&identity(3), KERNEL_TOL),
            Err(Error::EmptyKernel { .. })
        ));
    }

    #[test]
    fn vec_stacks_columns() {
        let a =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let v = vec_of(&a);
        assert_eq!(
            v.as_slice(),
            &[c(1.0, 0.0), c(3.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]
        );
        assert_eq!(unvec(&v, 2).unwrap(), a);
    }

    #[test]
    fn vec_identity_for_triple_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 3);
        let b = random_matrix(&mut rng, 3);
        let cm = random_matrix(&mut rng, 3);
        let lhs = vec_of(&(&a * &b * &cm));
        let rhs = kron(&cm.transpose(), &a).unwrap() * vec_of(&b);
        assert!((lhs - rhs).camax() < 1e-13);
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states_is_one() {
        let d = trace_distance(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-15);
    }
}
