//! Steady states as the kernel of the vectorized generator.

use crate::error::{Error, Result};
use crate::linalg::{
    eigvalsh, hermitize, identity, null_space, spectral_norm, trace, unvec, vec_of, CMatrix,
    CVector, KERNEL_TOL,
};
use crate::lindblad::{build_liouvillian, dissipators, lindblad_action, Liouvillian};
use crate::models::{build_hamiltonian, BathPair, ChainSpec, ModelKind, Reservoir, SpinDrive};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyOptions {
    /// Singular values below `kernel_tol · σ_max` count as kernel.
    pub kernel_tol: f64,
    /// Required ratio between the first non-kernel singular value and the
    /// largest kernel one.
    pub gap_factor: f64,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self {
            kernel_tol: KERNEL_TOL,
            gap_factor: 100.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: CMatrix,
    /// ‖M vec(ρ)‖₂.
    pub residual: f64,
    pub nullspace_dim: usize,
    /// Smallest eigenvalue of ρ.
    pub min_eig: f64,
    /// ‖M‖₂ of the generator the state was solved from.
    pub generator_norm: f64,
    /// Orthonormal kernel basis, unvectorized.
    pub kernel: Vec<CMatrix>,
}

impl SteadyState {
    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    /// Trace-normalized projection of `seed` onto the kernel. With the
    /// identity as seed this is the canonical representative.
    pub fn kernel_state(&self, seed: &CMatrix) -> Result<CMatrix> {
        project_onto_kernel(&self.kernel, seed)
    }
}

fn project_onto_kernel(kernel: &[CMatrix], seed: &CMatrix) -> Result<CMatrix> {
    let s = vec_of(seed);
    let mut p = CVector::zeros(s.len());
    for k in kernel {
        let v = vec_of(k);
        p += &v * v.dotc(&s);
    }
    let d = seed.nrows();
    let rho = hermitize(&unvec(&p, d)?);
    let tr = trace(&rho).re;
    let scale = rho.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if tr.is_nan() || tr <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NoPositiveTraceState);
    }
    Ok(rho.unscale(tr))
}

fn min_eigenvalue(rho: &CMatrix) -> Result<f64> {
    Ok(eigvalsh(rho)?.first().copied().unwrap_or(0.0))
}

pub fn solve_steady(liou: &Liouvillian) -> Result<SteadyState> {
    solve_steady_with(liou, &SteadyOptions::default())
}

pub fn solve_steady_with(liou: &Liouvillian, opts: &SteadyOptions) -> Result<SteadyState> {
    let ns = null_space(&liou.m, opts.kernel_tol)?;
    if ns.gap_ratio() < opts.gap_factor {
        return Err(Error::IllConditionedKernel {
            largest_kernel: ns.largest_kernel_value(),
            next: ns.next_value().unwrap_or(f64::NAN),
        });
    }
    let d = liou.dim;
    let kernel = ns
        .vectors
        .iter()
        .map(|v| unvec(v, d))
        .collect::<Result<Vec<_>>>()?;
    let rho = project_onto_kernel(&kernel, &identity(d))?;
    let residual = (&liou.m * vec_of(&rho)).norm();
    Ok(SteadyState {
        min_eig: min_eigenvalue(&rho)?,
        rho,
        residual,
        nullspace_dim: kernel.len(),
        generator_norm: ns.largest_singular_value(),
        kernel,
    })
}

/// Builds the generator for a chain and solves it. XXZ chains with two
/// active, non-saturated baths must have a one-dimensional kernel.
pub fn solve_chain(
    spec: &ChainSpec,
    baths: &BathPair,
    opts: &SteadyOptions,
) -> Result<SteadyState> {
    let liou = build_liouvillian(spec, baths)?;
    let ss = solve_steady_with(&liou, opts)?;
    if spec.kind == ModelKind::Xxz && expects_unique(baths) && ss.nullspace_dim != 1 {
        return Err(Error::UnexpectedDegeneracy {
            dim: ss.nullspace_dim,
        });
    }
    Ok(ss)
}

fn expects_unique(baths: &BathPair) -> bool {
    baths.iter().all(|b| match b.reservoir {
        Reservoir::Spin { gamma, drive } => {
            let f = match drive {
                SpinDrive::Polarization { f } => f,
                SpinDrive::Thermal { beta, h } => -(beta * h / 2.0).tanh(),
            };
            gamma > 0.0 && f.abs() < 1.0
        }
        Reservoir::Bosonic { .. } => false,
    })
}

/// Populations-only solve for Ising chains, where the diagonal sector is
/// closed under the generator.
pub fn solve_diagonal_ansatz(spec: &ChainSpec, baths: &BathPair) -> Result<SteadyState> {
    if spec.kind != ModelKind::Ising {
        return Err(Error::WrongModel(
            "the diagonal ansatz applies to Ising chains only".into(),
        ));
    }
    let h = build_hamiltonian(spec)?;
    let d = h.nrows();
    let off_diag = (0..d)
        .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| h[(i, j)].norm())
        .fold(0.0, f64::max);
    if off_diag > 1e-14 {
        return Err(Error::NotDiagonal(format!(
            "Hamiltonian off-diagonal magnitude {off_diag:e}"
        )));
    }

    // dp_k/dt = Σ_j |L_kj|² p_j − Σ_j |L_jk|² p_k
    let mut w = CMatrix::zeros(d, d);
    for diss in dissipators(spec, baths)? {
        for l in diss.jump_operators() {
            let ldl = l.adjoint() * &l;
            for col in 0..d {
                let nonzero = (0..d).filter(|&row| l[(row, col)].norm() > 0.0).count();
                if nonzero > 1 {
                    return Err(Error::NotDiagonal(
                        "jump operator mixes basis states".into(),
                    ));
                }
                for row in 0..d {
                    if row != col && ldl[(row, col)].norm() > 1e-14 {
                        return Err(Error::NotDiagonal(
                            "jump operator creates coherences".into(),
                        ));
                    }
                    let rate = l[(row, col)].norm_sqr();
                    w[(row, col)] += rate;
                    w[(col, col)] -= rate;
                }
            }
        }
    }

    let ns = null_space(&w, KERNEL_TOL)?;
    let ones = CVector::from_element(d, 1.0.into());
    let mut p = CVector::zeros(d);
    for v in &ns.vectors {
        p += v * v.dotc(&ones);
    }
    let pops: Vec<f64> = p.iter().map(|z| z.re).collect();
    let total: f64 = pops.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::NoPositiveTraceState);
    }
    let rho = crate::linalg::diag(&pops.iter().map(|x| x / total).collect::<Vec<_>>());
    let kernel = ns
        .vectors
        .iter()
        .map(CMatrix::from_diagonal)
        .collect::<Vec<_>>();
    let residual = vec_of(&lindblad_action(spec, baths, &rho)?).norm();
    Ok(SteadyState {
        min_eig: min_eigenvalue(&rho)?,
        generator_norm: spectral_norm(&w),
        residual,
        nullspace_dim: kernel.len(),
        kernel,
        rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, max_abs_diff};
    use crate::lindblad::Dissipator;
    use crate::models::{bath_f, BathSpec, Side};

    fn boson_pair(beta_shift: f64) -> BathPair {
        BathPair::new(
            BathSpec::bosonic(Side::L, 0.8 + beta_shift, 1.3, 0.7),
            BathSpec::bosonic(Side::R, 2.1, 0.6, 1.1),
        )
        .unwrap()
    }

    fn spin_pair() -> BathPair {
        BathPair::new(
            BathSpec::spin(Side::L, 1.2, 0.9, 0.7),
            BathSpec::spin(Side::R, 0.5, -1.4, 1.3),
        )
        .unwrap()
    }

    fn x_rates(b: &BathSpec) -> (f64, f64, f64) {
        let f = bath_f(b).unwrap();
        let Reservoir::Spin { gamma, .. } = b.reservoir else {
            unreachable!()
        };
        (2.0 * gamma * (1.0 + f), 2.0 * gamma * (1.0 - f), gamma)
    }

    #[test]
    fn single_qubit_relaxes_to_bath_polarization() {
        let bath = BathSpec::spin(Side::L, 1.3, 0.8, 0.6);
        let f = bath_f(&bath).unwrap();
        let d = Dissipator::spin(&bath, 1, 1).unwrap();
        let liou = Liouvillian::from_parts(&CMatrix::zeros(2, 2), &[d]).unwrap();
        let ss = solve_steady(&liou).unwrap();
        assert_eq!(ss.nullspace_dim, 1);
        assert!(max_abs_diff(&ss.rho, &diag(&[(1.0 + f) / 2.0, (1.0 - f) / 2.0])) < 1e-12);
    }

    #[test]
    fn ising_two_site_bosonic_is_maximally_mixed() {
        let spec = ChainSpec::ising(2, 0.7).with_field(0.4);
        let ss = solve_chain(&spec, &boson_pair(0.0), &SteadyOptions::default()).unwrap();
        assert_eq!(ss.nullspace_dim, 1);
        assert!(max_abs_diff(&ss.rho, &identity(4).scale(0.25)) < 1e-12);
    }

    #[test]
    fn ising_three_site_bosonic_kernel_is_two_dimensional() {
        let spec = ChainSpec::ising(3, 0.9).with_field(0.3).with_delta_13(0.4);
        let ss = solve_chain(&spec, &boson_pair(0.0), &SteadyOptions::default()).unwrap();
        assert_eq!(ss.nullspace_dim, 2);
        for k in &ss.kernel {
            let p = |i: usize| k[(i - 1, i - 1)];
            for (a, b) in [(1, 2), (1, 5), (1, 6), (3, 4), (3, 7), (3, 8)] {
                assert!((p(a) - p(b)).norm() < 1e-10);
            }
        }
        assert!(max_abs_diff(&ss.rho, &identity(8).scale(0.125)) < 1e-12);
    }

    #[test]
    fn ising_two_site_spin_baths_product_form() {
        let baths = spin_pair();
        let spec = ChainSpec::ising(2, 1.1).with_field(0.5);
        let ss = solve_chain(&spec, &baths, &SteadyOptions::default()).unwrap();
        let (lp, lm, gl) = x_rates(&baths.left);
        let (rp, rm, gr) = x_rates(&baths.right);
        let n = 16.0 * gl * gr;
        // printed in (↓, ↑) order; reversing the basis maps it to (↑, ↓)
        let printed = [rm * lm / n, rp * lm / n, rm * lp / n, rp * lp / n];
        let expected = diag(&[printed[3], printed[2], printed[1], printed[0]]);
        assert!(max_abs_diff(&ss.rho, &expected) < 1e-12);
    }

    #[test]
    fn diagonal_ansatz_matches_dense_solver() {
        for spec in [
            ChainSpec::ising(2, 0.6).with_field(-0.3),
            ChainSpec::ising(3, 0.8).with_field(0.2).with_delta_13(0.5),
        ] {
            for baths in [spin_pair(), boson_pair(0.3)] {
                let dense = solve_chain(&spec, &baths, &SteadyOptions::default()).unwrap();
                let ansatz = solve_diagonal_ansatz(&spec, &baths).unwrap();
                assert_eq!(dense.nullspace_dim, ansatz.nullspace_dim);
                assert!(max_abs_diff(&dense.rho, &ansatz.rho) < 1e-10);
                assert!(ansatz.residual < 1e-12);
            }
        }
    }

    #[test]
    fn three_site_spin_baths_pin_the_ends() {
        let baths = spin_pair();
        let spec = ChainSpec::ising(3, 0.8).with_delta_13(0.5);
        let ss = solve_diagonal_ansatz(&spec, &baths).unwrap();
        let (lp, lm, _) = x_rates(&baths.left);
        let (rp, rm, _) = x_rates(&baths.right);
        let l = [lp / (lp + lm), lm / (lp + lm)];
        let r = [rp / (rp + rm), rm / (rp + rm)];
        for i in 0..8 {
            let (a, b) = (i >> 2, i & 1);
            assert!((ss.rho[(i, i)].re - 0.5 * l[a] * r[b]).abs() < 1e-12);
        }
    }

    #[test]
    fn ansatz_rejects_xxz() {
        let spec = ChainSpec::xxz(3, 1.0, 0.0, 1.0);
        assert!(matches!(
            solve_diagonal_ansatz(&spec, &spin_pair()),
            Err(Error::WrongModel(_))
        ));
    }

    #[test]
    fn xxz_state_is_physical_and_unique() {
        let spec = ChainSpec::xxz(3, 1.0, 0.4, 1.0).with_field(0.2);
        let ss = solve_chain(&spec, &spin_pair(), &SteadyOptions::default()).unwrap();
        assert_eq!(ss.nullspace_dim, 1);
        assert!((trace(&ss.rho).re - 1.0).abs() < 1e-12);
        assert!(crate::linalg::hermiticity_deviation(&ss.rho) < 1e-10);
        assert!(ss.min_eig >= -1e-9);
        assert!(ss.residual <= 1e-8 * ss.generator_norm);
    }

    #[test]
    fn kernel_state_from_other_seed_stays_in_kernel() {
        let spec = ChainSpec::ising(3, 0.9).with_delta_13(0.4);
        let liou = build_liouvillian(&spec, &boson_pair(0.0)).unwrap();
        let ss = solve_steady(&liou).unwrap();
        let seed = diag(&[0.3, 0.0, 0.1, 0.05, 0.2, 0.1, 0.15, 0.1]);
        let rho = ss.kernel_state(&seed).unwrap();
        assert!((&liou.m * vec_of(&rho)).norm() < 1e-10);
        assert!(max_abs_diff(&rho, &ss.rho) > 1e-3);
    }
}
