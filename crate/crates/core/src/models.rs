//! Chain Hamiltonians and reservoir parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::operators::{site_op, Pauli};

/// Largest chain handled by the dense backend (Liouvillian dimension 4^6).
pub const MAX_SITES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    Xxz,
    Ising,
}

/// System Hamiltonian parameters.
///
/// XXZ: `Σ α(σˣσˣ + σʸσʸ) + Δ_{i,i+1} σᶻσᶻ + Σ (h_i/2) σᶻ_i`.
/// Ising: `Σ (h_i/2) σᶻ_i + Σ (Δ_{i,j}/2) σᶻ_i σᶻ_j`, optionally with a
/// long-range `Δ_{1,3}` on three sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub kind: ModelKind,
    pub n_sites: usize,
    pub alpha: f64,
    /// Mean anisotropy Δ.
    pub delta_mean: f64,
    /// Asymmetry δ: on three sites Δ_{1,2} = Δ − δ and Δ_{2,3} = Δ + δ.
    pub asymmetry: f64,
    /// Per-bond couplings overriding (Δ, δ).
    pub bond_delta: Option<Vec<f64>>,
    /// Uniform field shortcut.
    pub h: f64,
    /// Per-site fields; wins over `h` when present.
    pub field: Option<Vec<f64>>,
    pub delta_13: Option<f64>,
}

impl ChainSpec {
    pub fn xxz(n_sites: usize, alpha: f64, delta_mean: f64, asymmetry: f64) -> Self {
        Self {
            kind: ModelKind::Xxz,
            n_sites,
            alpha,
            delta_mean,
            asymmetry,
            bond_delta: None,
            h: 0.0,
            field: None,
            delta_13: None,
        }
    }

    pub fn ising(n_sites: usize, delta_mean: f64) -> Self {
        Self {
            kind: ModelKind::Ising,
            alpha: 0.0,
            ..Self::xxz(n_sites, 0.0, delta_mean, 0.0)
        }
    }

    pub fn with_field(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_site_fields(mut self, fields: Vec<f64>) -> Self {
        self.field = Some(fields);
        self
    }

    pub fn with_bond_deltas(mut self, deltas: Vec<f64>) -> Self {
        self.bond_delta = Some(deltas);
        self
    }

    pub fn with_delta_13(mut self, d13: f64) -> Self {
        self.delta_13 = Some(d13);
        self
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_sites;
        if !(2..=MAX_SITES).contains(&n) {
            return Err(Error::InvalidChain(format!(
                "need 2..={MAX_SITES} sites, got {n}"
            )));
        }
        if let Some(b) = &self.bond_delta {
            if b.len() != n - 1 {
                return Err(Error::InvalidChain(format!(
                    "bond_delta has {} entries, chain has {} bonds",
                    b.len(),
                    n - 1
                )));
            }
        }
        if let Some(f) = &self.field {
            if f.len() != n {
                return Err(Error::InvalidChain(format!(
                    "field has {} entries, chain has {n} sites",
                    f.len()
                )));
            }
        }
        if self.delta_13.is_some() && !(self.kind == ModelKind::Ising && n == 3) {
            return Err(Error::InvalidChain(
                "delta_13 is only defined for the 3-site Ising chain".into(),
            ));
        }
        let scalars = [
            self.alpha,
            self.delta_mean,
            self.asymmetry,
            self.h,
            self.delta_13.unwrap_or(0.0),
        ];
        let lists = self.bond_delta.iter().chain(self.field.iter()).flatten();
        if scalars.iter().chain(lists).any(|x| !x.is_finite()) {
            return Err(Error::InvalidChain("non-finite parameter".into()));
        }
        Ok(())
    }

    pub fn site_fields(&self) -> Vec<f64> {
        self.field
            .clone()
            .unwrap_or_else(|| vec![self.h; self.n_sites])
    }

    /// Δ_{i,i+1} for each bond. Without an override, the couplings ramp
    /// linearly from Δ − δ on the first bond to Δ + δ on the last.
    pub fn bond_deltas(&self) -> Vec<f64> {
        if let Some(b) = &self.bond_delta {
            return b.clone();
        }
        let bonds = self.n_sites - 1;
        if bonds == 1 {
            return vec![self.delta_mean - self.asymmetry];
        }
        (0..bonds)
            .map(|i| self.delta_mean + self.asymmetry * (2.0 * i as f64 / (bonds - 1) as f64 - 1.0))
            .collect()
    }

    /// σᶻσᶻ terms as (site, site, coefficient in H), sites 1-based.
    pub fn zz_terms(&self) -> Vec<(usize, usize, f64)> {
        let scale = match self.kind {
            ModelKind::Xxz => 1.0,
            ModelKind::Ising => 0.5,
        };
        let mut terms: Vec<(usize, usize, f64)> = self
            .bond_deltas()
            .into_iter()
            .enumerate()
            .map(|(i, d)| (i + 1, i + 2, scale * d))
            .collect();
        if let Some(d13) = self.delta_13 {
            terms.push((1, 3, scale * d13));
        }
        terms
    }

    /// Coefficient of (σˣσˣ + σʸσʸ) on each nearest-neighbour bond.
    pub fn xy_coupling(&self) -> f64 {
        match self.kind {
            ModelKind::Xxz => self.alpha,
            ModelKind::Ising => 0.0,
        }
    }
}

fn zz(i: usize, j: usize, n: usize) -> Result<CMatrix> {
    Ok(site_op(Pauli::Z, i, n)? * site_op(Pauli::Z, j, n)?)
}

fn xy(i: usize, j: usize, n: usize) -> Result<CMatrix> {
    Ok(site_op(Pauli::X, i, n)? * site_op(Pauli::X, j, n)?
        + site_op(Pauli::Y, i, n)? * site_op(Pauli::Y, j, n)?)
}

pub fn build_hamiltonian(spec: &ChainSpec) -> Result<CMatrix> {
    spec.validate()?;
    let n = spec.n_sites;
    let mut h = CMatrix::zeros(spec.dim(), spec.dim());
    let alpha = spec.xy_coupling();
    if alpha != 0.0 {
        for i in 1..n {
            h += xy(i, i + 1, n)?.scale(alpha);
        }
    }
    for (i, j, coeff) in spec.zz_terms() {
        h += zz(i, j, n)?.scale(coeff);
    }
    for (i, hi) in spec.site_fields().into_iter().enumerate() {
        h += site_op(Pauli::Z, i + 1, n)?.scale(hi / 2.0);
    }
    Ok(h)
}

/// Bond energy ε_{i,i+1} = h_{i,i+1} + b_{i,i+1} of the XXZ chain; the
/// boundary sites carry their whole field in their only bond.
pub fn bond_energy(spec: &ChainSpec, bond: usize) -> Result<CMatrix> {
    spec.validate()?;
    if spec.kind != ModelKind::Xxz {
        return Err(Error::WrongModel(
            "bond energies are defined for the XXZ chain".into(),
        ));
    }
    let n = spec.n_sites;
    if !(1..n).contains(&bond) {
        return Err(Error::SiteOutOfRange(format!(
            "bond {bond} outside 1..={}",
            n - 1
        )));
    }
    let delta = spec.bond_deltas()[bond - 1];
    let fields = spec.site_fields();
    let weight = |site: usize| if site == 1 || site == n { 2.0 } else { 1.0 };
    let mut e = xy(bond, bond + 1, n)?.scale(spec.alpha) + zz(bond, bond + 1, n)?.scale(delta);
    for site in [bond, bond + 1] {
        let coeff = 0.5 * weight(site) * fields[site - 1] / 2.0;
        e += site_op(Pauli::Z, site, n)?.scale(coeff);
    }
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn boundary_site(self, n_sites: usize) -> usize {
        match self {
            Side::L => 1,
            Side::R => n_sites,
        }
    }
}

/// How a spin reservoir fixes its polarization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpinDrive {
    /// Gibbs state of `H = h σᶻ/2` at inverse temperature β.
    Thermal { beta: f64, h: f64 },
    /// Only the polarization is known; enough for the master equation,
    /// not for splitting heat from work.
    Polarization { f: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Reservoir {
    Spin {
        gamma: f64,
        drive: SpinDrive,
    },
    /// One boson mode `ω a†a` coupled through `g σˣ (a + a†)`.
    Bosonic {
        beta: f64,
        omega: f64,
        g: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub side: Side,
    pub reservoir: Reservoir,
}

impl BathSpec {
    pub fn spin(side: Side, beta: f64, h: f64, gamma: f64) -> Self {
        Self {
            side,
            reservoir: Reservoir::Spin {
                gamma,
                drive: SpinDrive::Thermal { beta, h },
            },
        }
    }

    pub fn spin_polarized(side: Side, f: f64, gamma: f64) -> Self {
        Self {
            side,
            reservoir: Reservoir::Spin {
                gamma,
                drive: SpinDrive::Polarization { f },
            },
        }
    }

    pub fn bosonic(side: Side, beta: f64, omega: f64, g: f64) -> Self {
        Self {
            side,
            reservoir: Reservoir::Bosonic { beta, omega, g },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.reservoir {
            Reservoir::Spin { .. } => "spin-polarization",
            Reservoir::Bosonic { .. } => "bosonic",
        }
    }

    /// Inverse temperature, when the bath has one.
    pub fn beta(&self) -> Option<f64> {
        match self.reservoir {
            Reservoir::Spin {
                drive: SpinDrive::Thermal { beta, .. },
                ..
            } => Some(beta),
            Reservoir::Spin {
                drive: SpinDrive::Polarization { .. },
                ..
            } => None,
            Reservoir::Bosonic { beta, .. } => Some(beta),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive_beta = |beta: f64| {
            if beta.is_finite() && beta > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidBath(format!(
                    "inverse temperature must be positive, got {beta}"
                )))
            }
        };
        match self.reservoir {
            Reservoir::Spin { gamma, drive } => {
                if !(gamma.is_finite() && gamma >= 0.0) {
                    return Err(Error::InvalidBath(format!(
                        "gamma must be non-negative, got {gamma}"
                    )));
                }
                match drive {
                    SpinDrive::Thermal { beta, h } => {
                        positive_beta(beta)?;
                        if !h.is_finite() {
                            return Err(Error::InvalidBath("non-finite bath field".into()));
                        }
                    }
                    SpinDrive::Polarization { f } => {
                        if !(-1.0..=1.0).contains(&f) {
                            return Err(Error::InvalidBath(format!(
                                "polarization must lie in [-1, 1], got {f}"
                            )));
                        }
                    }
                }
            }
            Reservoir::Bosonic { beta, omega, g } => {
                positive_beta(beta)?;
                if !(omega.is_finite() && omega > 0.0) {
                    return Err(Error::InvalidBath(format!(
                        "boson frequency must be positive, got {omega}"
                    )));
                }
                if !g.is_finite() {
                    return Err(Error::InvalidBath("non-finite coupling".into()));
                }
            }
        }
        Ok(())
    }
}

/// Bath polarization f = ⟨σᶻ⟩ = −tanh(βh/2).
pub fn bath_f(bath: &BathSpec) -> Result<f64> {
    match bath.reservoir {
        Reservoir::Spin {
            drive: SpinDrive::Thermal { beta, h },
            ..
        } => Ok(-(beta * h / 2.0).tanh()),
        Reservoir::Spin {
            drive: SpinDrive::Polarization { f },
            ..
        } => Ok(f),
        Reservoir::Bosonic { .. } => Err(Error::WrongBathKind {
            expected: "spin-polarization",
            found: "bosonic",
        }),
    }
}

/// Bose-Einstein occupation n = 1/(e^{βω} − 1).
pub fn bath_n(bath: &BathSpec) -> Result<f64> {
    match bath.reservoir {
        Reservoir::Bosonic { beta, omega, .. } => Ok(1.0 / (beta * omega).exp_m1()),
        Reservoir::Spin { .. } => Err(Error::WrongBathKind {
            expected: "bosonic",
            found: "spin-polarization",
        }),
    }
}

/// Left and right reservoirs of a boundary-driven chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathPair {
    pub left: BathSpec,
    pub right: BathSpec,
}

impl BathPair {
    pub fn new(left: BathSpec, right: BathSpec) -> Result<Self> {
        let pair = Self { left, right };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        if self.left.side != Side::L || self.right.side != Side::R {
            return Err(Error::InvalidBath("bath pair must be (L, R)".into()));
        }
        self.left.validate()?;
        self.right.validate()
    }

    pub fn get(&self, side: Side) -> &BathSpec {
        match side {
            Side::L => &self.left,
            Side::R => &self.right,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &BathSpec> {
        [&self.left, &self.right].into_iter()
    }
}

/// Expectation value helper used by the closed-form currents.
pub fn expect(op: &CMatrix, rho: &CMatrix) -> f64 {
    crate::linalg::trace_product(op, rho).re
}

/// Physical field entry `h σᶻ/2` of a spin bath.
pub(crate) fn spin_bath_field(bath: &BathSpec) -> Result<f64> {
    match bath.reservoir {
        Reservoir::Spin {
            drive: SpinDrive::Thermal { h, .. },
            ..
        } => Ok(h),
        Reservoir::Spin {
            drive: SpinDrive::Polarization { .. },
            ..
        } => Err(Error::UndeterminedSplit { side: bath.side }),
        Reservoir::Bosonic { .. } => Err(Error::WrongBathKind {
            expected: "spin-polarization",
            found: "bosonic",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, hermiticity_deviation, max_abs, max_abs_diff, trace};

    #[test]
    fn xxz_three_site_asymmetric() {
        let spec = ChainSpec::xxz(3, 1.0, 0.0, 1.0);
        assert_eq!(spec.bond_deltas(), vec![-1.0, 1.0]);
        let h = build_hamiltonian(&spec).unwrap();
        assert_eq!(h.nrows(), 8);
        assert!(hermiticity_deviation(&h) < 1e-15);
        assert!(trace(&h).norm() < 1e-14);
    }

    #[test]
    fn xxz_with_zero_couplings_is_zero() {
        let h = build_hamiltonian(&ChainSpec::xxz(3, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(max_abs(&h), 0.0);
    }

    #[test]
    fn ising_two_site_carries_half_coupling() {
        let spec = ChainSpec::ising(2, 2.0);
        let h = build_hamiltonian(&spec).unwrap();
        assert!(max_abs_diff(&h, &diag(&[1.0, -1.0, -1.0, 1.0])) < 1e-15);
    }

    #[test]
    fn ising_is_diagonal() {
        let spec = ChainSpec::ising(3, 0.4)
            .with_bond_deltas(vec![0.3, -1.2])
            .with_site_fields(vec![0.5, -0.2, 1.1])
            .with_delta_13(0.7);
        let h = build_hamiltonian(&spec).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    assert_eq!(h[(i, j)].norm(), 0.0);
                }
            }
        }
        // |↑↑↑⟩: (0.5 − 0.2 + 1.1)/2 + (0.3 − 1.2 + 0.7)/2
        assert!((h[(0, 0)].re - 0.6).abs() < 1e-14);
    }

    #[test]
    fn bonds_sum_to_hamiltonian() {
        let spec = ChainSpec::xxz(4, 0.7, 0.3, -0.4).with_site_fields(vec![0.2, -0.8, 1.3, 0.5]);
        let h = build_hamiltonian(&spec).unwrap();
        let sum = (1..4)
            .map(|i| bond_energy(&spec, i).unwrap())
            .fold(CMatrix::zeros(16, 16), |a, b| a + b);
        assert!(max_abs_diff(&h, &sum) < 1e-14);
    }

    #[test]
    fn single_bond_is_whole_hamiltonian() {
        let spec = ChainSpec::xxz(2, 1.3, 0.5, 0.2).with_field(0.9);
        let h = build_hamiltonian(&spec).unwrap();
        assert!(max_abs_diff(&h, &bond_energy(&spec, 1).unwrap()) < 1e-15);
    }

    #[test]
    fn boundary_field_weights() {
        // uniform h on 3 sites: b_{1,2} holds h/2 σᶻ₁ fully and h/4 σᶻ₂
        let h = 0.8;
        let spec = ChainSpec::xxz(3, 0.0, 0.0, 0.0).with_field(h);
        let b12 = bond_energy(&spec, 1).unwrap();
        let expected = site_op(Pauli::Z, 1, 3).unwrap().scale(h / 2.0)
            + site_op(Pauli::Z, 2, 3).unwrap().scale(h / 4.0);
        assert!(max_abs_diff(&b12, &expected) < 1e-15);
        assert!(bond_energy(&spec, 3).is_err());
        assert!(bond_energy(&spec, 0).is_err());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(ChainSpec::xxz(1, 1.0, 0.0, 0.0).validate().is_err());
        assert!(ChainSpec::xxz(3, 1.0, 0.0, 0.0)
            .with_delta_13(1.0)
            .validate()
            .is_err());
        assert!(ChainSpec::ising(2, 1.0)
            .with_delta_13(1.0)
            .validate()
            .is_err());
        assert!(ChainSpec::xxz(3, 1.0, 0.0, 0.0)
            .with_bond_deltas(vec![1.0])
            .validate()
            .is_err());
        assert!(ChainSpec::xxz(3, 1.0, 0.0, 0.0)
            .with_site_fields(vec![1.0])
            .validate()
            .is_err());
        assert!(ChainSpec::xxz(7, 1.0, 0.0, 0.0).validate().is_err());
    }

    #[test]
    fn site_fields_override_uniform() {
        let spec = ChainSpec::xxz(2, 1.0, 0.0, 0.0)
            .with_field(3.0)
            .with_site_fields(vec![1.0, 2.0]);
        assert_eq!(spec.site_fields(), vec![1.0, 2.0]);
        assert_eq!(
            ChainSpec::xxz(2, 1.0, 0.0, 0.0)
                .with_field(3.0)
                .site_fields(),
            vec![3.0, 3.0]
        );
    }

    #[test]
    fn polarization_and_occupation() {
        assert_eq!(
            bath_f(&BathSpec::spin(Side::L, 3.0, 0.0, 1.0)).unwrap(),
            0.0
        );
        let f = bath_f(&BathSpec::spin(Side::L, 2.0, 1.0, 1.0)).unwrap();
        assert!((f + 1f64.tanh()).abs() < 1e-15);
        let n = bath_n(&BathSpec::bosonic(Side::R, 2f64.ln(), 1.0, 1.0)).unwrap();
        assert!((n - 1.0).abs() < 1e-14);
        assert!(bath_f(&BathSpec::bosonic(Side::R, 1.0, 1.0, 1.0)).is_err());
        assert!(bath_n(&BathSpec::spin(Side::R, 1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn negative_temperature_is_rejected() {
        assert!(BathSpec::spin(Side::L, -1.0, 1.0, 1.0).validate().is_err());
        assert!(BathSpec::bosonic(Side::L, 0.0, 1.0, 1.0)
            .validate()
            .is_err());
        let l = BathSpec::spin(Side::L, 1.0, 1.0, 1.0);
        assert!(BathPair::new(l, l).is_err());
    }
}
