//! Boundary dissipators and the Lindblad generator, as an action on density
//! matrices and as a column-stacked superoperator.

use crate::error::{Error, Result};
use crate::linalg::{anticommutator, identity, kron, vec_of, CMatrix, I};
use crate::models::{
    bath_f, bath_n, build_hamiltonian, BathPair, BathSpec, ChainSpec, Reservoir, Side,
};
use crate::operators::{site_op, Pauli};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DissipatorKind {
    /// `X⁺[σ⁺ρσ⁻ − ½{σ⁻σ⁺, ρ}] + X⁻[σ⁻ρσ⁺ − ½{σ⁺σ⁻, ρ}]`, X^± = 2γ(1 ± f).
    Spin { x_plus: f64, x_minus: f64 },
    /// `(γ⁻ + γ⁺)(σˣρσˣ − ρ)`, γ⁻ = (1 + n)g², γ⁺ = n g².
    Bosonic { rate: f64 },
}

/// A single-site boundary dissipator on an `n_sites` chain.
#[derive(Debug, Clone)]
pub struct Dissipator {
    pub site: usize,
    pub n_sites: usize,
    pub kind: DissipatorKind,
    plus: CMatrix,
    minus: CMatrix,
    x: CMatrix,
}

fn check_boundary(bath: &BathSpec, site: usize, n_sites: usize) -> Result<()> {
    if site != bath.side.boundary_site(n_sites) {
        return Err(Error::NonBoundarySite {
            site,
            side: bath.side,
            n_sites,
        });
    }
    Ok(())
}

impl Dissipator {
    fn with_kind(kind: DissipatorKind, site: usize, n_sites: usize) -> Result<Self> {
        Ok(Self {
            site,
            n_sites,
            kind,
            plus: site_op(Pauli::Plus, site, n_sites)?,
            minus: site_op(Pauli::Minus, site, n_sites)?,
            x: site_op(Pauli::X, site, n_sites)?,
        })
    }

    pub fn spin(bath: &BathSpec, site: usize, n_sites: usize) -> Result<Self> {
        bath.validate()?;
        let Reservoir::Spin { gamma, .. } = bath.reservoir else {
            return Err(Error::WrongBathKind {
                expected: "spin-polarization",
                found: bath.kind_name(),
            });
        };
        check_boundary(bath, site, n_sites)?;
        let f = bath_f(bath)?;
        let kind = DissipatorKind::Spin {
            x_plus: 2.0 * gamma * (1.0 + f),
            x_minus: 2.0 * gamma * (1.0 - f),
        };
        Self::with_kind(kind, site, n_sites)
    }

    pub fn bosonic(bath: &BathSpec, site: usize, n_sites: usize) -> Result<Self> {
        bath.validate()?;
        let Reservoir::Bosonic { g, .. } = bath.reservoir else {
            return Err(Error::WrongBathKind {
                expected: "bosonic",
                found: bath.kind_name(),
            });
        };
        check_boundary(bath, site, n_sites)?;
        let n = bath_n(bath)?;
        let rate = (1.0 + n) * g * g + n * g * g;
        Self::with_kind(DissipatorKind::Bosonic { rate }, site, n_sites)
    }

    /// Dissipator of `bath` acting on its own boundary site.
    pub fn for_bath(bath: &BathSpec, n_sites: usize) -> Result<Self> {
        let site = bath.side.boundary_site(n_sites);
        match bath.reservoir {
            Reservoir::Spin { .. } => Self::spin(bath, site, n_sites),
            Reservoir::Bosonic { .. } => Self::bosonic(bath, site, n_sites),
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// D(ρ) in the explicit rate form.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.dim() || rho.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix of dimension {} on a {}-site chain",
                rho.nrows(),
                self.n_sites
            )));
        }
        Ok(match self.kind {
            DissipatorKind::Spin { x_plus, x_minus } => {
                let (p, m) = (&self.plus, &self.minus);
                let up = p * rho * m - anticommutator(&(m * p), rho).scale(0.5);
                let down = m * rho * p - anticommutator(&(p * m), rho).scale(0.5);
                up.scale(x_plus) + down.scale(x_minus)
            }
            DissipatorKind::Bosonic { rate } => (&self.x * rho * &self.x - rho).scale(rate),
        })
    }

    /// Heisenberg-picture action D†(X), so that Tr(X D(ρ)) = Tr(D†(X) ρ).
    pub fn adjoint_apply(&self, op: &CMatrix) -> CMatrix {
        match self.kind {
            DissipatorKind::Spin { x_plus, x_minus } => {
                let (p, m) = (&self.plus, &self.minus);
                let up = m * op * p - anticommutator(&(m * p), op).scale(0.5);
                let down = p * op * m - anticommutator(&(p * m), op).scale(0.5);
                up.scale(x_plus) + down.scale(x_minus)
            }
            DissipatorKind::Bosonic { rate } => (&self.x * op * &self.x - op).scale(rate),
        }
    }

    /// Jump operators L_k with D(ρ) = Σ L_k ρ L_k† − ½{L_k†L_k, ρ}.
    pub fn jump_operators(&self) -> Vec<CMatrix> {
        match self.kind {
            DissipatorKind::Spin { x_plus, x_minus } => {
                vec![
                    self.plus.scale(x_plus.sqrt()),
                    self.minus.scale(x_minus.sqrt()),
                ]
            }
            DissipatorKind::Bosonic { rate } => vec![self.x.scale(rate.sqrt())],
        }
    }

    /// Column-stacked superoperator assembled from the jump operators.
    pub fn superoperator(&self) -> Result<CMatrix> {
        let d = self.dim();
        let id = identity(d);
        let mut m = CMatrix::zeros(d * d, d * d);
        for l in self.jump_operators() {
            let ldl = l.adjoint() * &l;
            m += kron(&l.map(|z| z.conj()), &l)?;
            m -= kron(&id, &ldl)?.scale(0.5);
            m -= kron(&ldl.transpose(), &id)?.scale(0.5);
        }
        Ok(m)
    }
}

/// Left and right dissipators of a chain.
pub fn dissipators(spec: &ChainSpec, baths: &BathPair) -> Result<[Dissipator; 2]> {
    spec.validate()?;
    baths.validate()?;
    Ok([
        Dissipator::for_bath(&baths.left, spec.n_sites)?,
        Dissipator::for_bath(&baths.right, spec.n_sites)?,
    ])
}

pub fn dissipator_for_side(spec: &ChainSpec, baths: &BathPair, side: Side) -> Result<Dissipator> {
    spec.validate()?;
    Dissipator::for_bath(baths.get(side), spec.n_sites)
}

/// Right-hand side `−i[H_S, ρ] + D_L(ρ) + D_R(ρ)`.
pub fn lindblad_action(spec: &ChainSpec, baths: &BathPair, rho: &CMatrix) -> Result<CMatrix> {
    let h = build_hamiltonian(spec)?;
    if rho.nrows() != h.nrows() || rho.ncols() != h.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "density matrix {}x{} on a chain of dimension {}",
            rho.nrows(),
            rho.ncols(),
            h.nrows()
        )));
    }
    let mut out = (&h * rho - rho * &h) * (-I);
    for d in dissipators(spec, baths)? {
        out += d.apply(rho)?;
    }
    Ok(out)
}

/// Vectorized generator `M` with `d|ρ⟩/dt = M|ρ⟩`, column stacking.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub m: CMatrix,
    /// Hilbert-space dimension d; `m` is d² × d².
    pub dim: usize,
}

impl Liouvillian {
    pub fn from_parts(h: &CMatrix, dissipators: &[Dissipator]) -> Result<Self> {
        let d = h.nrows();
        let id = identity(d);
        let mut m = (kron(&id, h)? - kron(&h.transpose(), &id)?) * (-I);
        for diss in dissipators {
            if diss.dim() != d {
                return Err(Error::DimensionMismatch(
                    "dissipator and Hamiltonian dimensions differ".into(),
                ));
            }
            m += diss.superoperator()?;
        }
        Ok(Self { m, dim: d })
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        crate::linalg::unvec(&(&self.m * vec_of(rho)), self.dim)
    }

    /// ‖vec(I)† M‖_max; zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let v = vec_of(&identity(self.dim));
        (v.adjoint() * &self.m)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

pub fn build_liouvillian(spec: &ChainSpec, baths: &BathPair) -> Result<Liouvillian> {
    let h = build_hamiltonian(spec)?;
    Liouvillian::from_parts(&h, &dissipators(spec, baths)?)
}
