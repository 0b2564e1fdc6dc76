//! Heat, work and energy currents of a steady state, with entropy
//! production, spin current and machine-regime classification.
//!
//! The general rates evaluate `Q̇ = ½⟨[v,[v,H_r]]⟩` and
//! `Ẇ = −½⟨[v,[v,H_S + H_r]]⟩` on `ρ ⊗ ω_r`, with the interaction kept as a
//! sum of tensor products `v = Σ A_k ⊗ B_k` so every trace factorizes into a
//! system part and a bath part.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{diag, eigvalsh, identity, trace_product, CMatrix};
use crate::lindblad::Dissipator;
use crate::models::{
    bath_f, bath_n, build_hamiltonian, expect, spin_bath_field, BathPair, BathSpec, ChainSpec,
    Reservoir, Side,
};
use crate::operators::{annihilation, number, pauli, site_op, Pauli};
use crate::steady_state::SteadyState;

/// Thermal tail weight allowed beyond the boson truncation when rates are
/// evaluated. The truncated double commutator misses a fraction
/// `(n_max + 1) p(n_max)` of the heat current, so this sits well below the
/// rate tolerances.
pub const RATE_BOSON_TAIL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurrentOptions {
    pub boson_tail_tol: f64,
    pub first_law_tol: f64,
    pub regime_tol: f64,
}

impl Default for CurrentOptions {
    fn default() -> Self {
        Self {
            boson_tail_tol: RATE_BOSON_TAIL,
            first_law_tol: 1e-9,
            regime_tol: 1e-12,
        }
    }
}

/// Highest kept Fock level `n_max = ⌈ln(1/tail)/(βω)⌉ + 2`, at least 3.
pub fn boson_cutoff(beta: f64, omega: f64, tail: f64) -> usize {
    let n = ((1.0 / tail).ln() / (beta * omega)).ceil() + 2.0;
    if n.is_finite() {
        (n as usize).max(3)
    } else {
        3
    }
}

/// Weight of the untruncated thermal distribution above level `n_max`.
pub fn thermal_tail_weight(beta: f64, omega: f64, n_max: usize) -> f64 {
    (-beta * omega * (n_max as f64 + 1.0)).exp()
}

/// One reservoir copy coupled to its boundary site.
#[derive(Debug, Clone)]
pub struct BathCoupling {
    pub side: Side,
    /// `A_k` on the chain space.
    pub sys_ops: Vec<CMatrix>,
    /// `B_k` on the bath copy.
    pub bath_ops: Vec<CMatrix>,
    pub h_bath: CMatrix,
    /// Bath state ω_r.
    pub state: CMatrix,
}

impl BathCoupling {
    /// Spin bath: `v = √γ(σˣσˣ + σʸσʸ)`, `H_r = h σᶻ/2`. Bosonic bath:
    /// `v = g σˣ (a + a†)`, `H_r = ω a†a`, truncated by [`boson_cutoff`].
    pub fn new(bath: &BathSpec, n_sites: usize, boson_tail: f64) -> Result<Self> {
        let levels = match bath.reservoir {
            Reservoir::Bosonic { beta, omega, .. } => boson_cutoff(beta, omega, boson_tail) + 1,
            Reservoir::Spin { .. } => 2,
        };
        Self::with_levels(bath, n_sites, levels, boson_tail)
    }

    /// As [`BathCoupling::new`] with an explicit bath dimension; bosonic
    /// truncations whose thermal tail exceeds `boson_tail` are rejected.
    pub fn with_levels(
        bath: &BathSpec,
        n_sites: usize,
        levels: usize,
        boson_tail: f64,
    ) -> Result<Self> {
        bath.validate()?;
        let site = bath.side.boundary_site(n_sites);
        match bath.reservoir {
            Reservoir::Spin { gamma, .. } => {
                let h = spin_bath_field(bath)?;
                let f = bath_f(bath)?;
                let s = gamma.sqrt();
                Ok(Self {
                    side: bath.side,
                    sys_ops: vec![
                        site_op(Pauli::X, site, n_sites)?.scale(s),
                        site_op(Pauli::Y, site, n_sites)?.scale(s),
                    ],
                    bath_ops: vec![pauli(Pauli::X), pauli(Pauli::Y)],
                    h_bath: pauli(Pauli::Z).scale(h / 2.0),
                    state: diag(&[(1.0 + f) / 2.0, (1.0 - f) / 2.0]),
                })
            }
            Reservoir::Bosonic { beta, omega, g } => {
                if levels < 2 {
                    return Err(Error::InvalidBath(
                        "a boson mode needs at least two levels".into(),
                    ));
                }
                let tail = thermal_tail_weight(beta, omega, levels - 1);
                if tail > boson_tail {
                    return Err(Error::TruncationInsufficient {
                        tail,
                        tol: boson_tail,
                    });
                }
                let a = annihilation(levels);
                let weights: Vec<f64> = (0..levels)
                    .map(|n| (-beta * omega * n as f64).exp())
                    .collect();
                let z: f64 = weights.iter().sum();
                Ok(Self {
                    side: bath.side,
                    sys_ops: vec![site_op(Pauli::X, site, n_sites)?.scale(g)],
                    bath_ops: vec![&a + a.adjoint()],
                    h_bath: number(levels).scale(omega),
                    state: diag(&weights.iter().map(|w| w / z).collect::<Vec<_>>()),
                })
            }
        }
    }

    pub fn bath_dim(&self) -> usize {
        self.state.nrows()
    }

    /// `Tr([v,[v, S ⊗ T]] ρ ⊗ ω)`.
    pub fn double_commutator(&self, s: &CMatrix, t: &CMatrix, rho: &CMatrix) -> f64 {
        let (a, b) = (&self.sys_ops, &self.bath_ops);
        let omega = &self.state;
        let mut total = 0.0;
        for k in 0..a.len() {
            for l in 0..a.len() {
                let aa = &a[k] * &a[l];
                let bb = &b[k] * &b[l];
                let left = trace_product(&(&aa * s), rho) * trace_product(&(&bb * t), omega);
                let mid = trace_product(&(&a[k] * s * &a[l]), rho)
                    * trace_product(&(&b[k] * t * &b[l]), omega);
                let right = trace_product(&(s * &aa), rho) * trace_product(&(t * &bb), omega);
                total += (left - mid * 2.0 + right).re;
            }
        }
        total
    }

    /// `−½ Tr_r [v,[v, ρ ⊗ ω]]`, the dissipator generated by this coupling.
    pub fn reduced_dissipator(&self, rho: &CMatrix) -> CMatrix {
        let (a, b) = (&self.sys_ops, &self.bath_ops);
        let omega = &self.state;
        let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
        for k in 0..a.len() {
            for l in 0..a.len() {
                let aa = &a[k] * &a[l];
                let c_kl = trace_product(&(&b[k] * &b[l]), omega);
                let c_lk = trace_product(&(&b[l] * &b[k]), omega);
                // Tr(B_k ω B_l) = Tr(B_l B_k ω)
                out += &a[k] * rho * &a[l] * c_lk;
                out -= (&aa * rho + rho * &aa) * (c_kl * 0.5);
            }
        }
        out
    }

    pub fn heat_rate(&self, rho: &CMatrix) -> f64 {
        let d = rho.nrows();
        0.5 * self.double_commutator(&identity(d), &self.h_bath, rho)
    }

    pub fn work_rate(&self, h_s: &CMatrix, rho: &CMatrix) -> f64 {
        let d = rho.nrows();
        let r = self.bath_dim();
        -0.5 * (self.double_commutator(h_s, &identity(r), rho)
            + self.double_commutator(&identity(d), &self.h_bath, rho))
    }
}

fn check_state(spec: &ChainSpec, rho: &CMatrix) -> Result<()> {
    if rho.nrows() != spec.dim() || rho.ncols() != spec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} on a {}-site chain",
            rho.nrows(),
            spec.n_sites
        )));
    }
    Ok(())
}

/// Heat current from `bath` into the chain, general trace formula.
pub fn heat_rate_general(spec: &ChainSpec, bath: &BathSpec, rho: &CMatrix) -> Result<f64> {
    spec.validate()?;
    check_state(spec, rho)?;
    Ok(BathCoupling::new(bath, spec.n_sites, RATE_BOSON_TAIL)?.heat_rate(rho))
}

/// Work rate of the `bath` coupling, general trace formula.
pub fn work_rate_general(spec: &ChainSpec, bath: &BathSpec, rho: &CMatrix) -> Result<f64> {
    check_state(spec, rho)?;
    let h_s = build_hamiltonian(spec)?;
    Ok(BathCoupling::new(bath, spec.n_sites, RATE_BOSON_TAIL)?.work_rate(&h_s, rho))
}

struct SpinBoundary {
    gamma: f64,
    f: f64,
    h_bath: f64,
    site: usize,
    s: f64,
}

fn spin_boundary(spec: &ChainSpec, bath: &BathSpec, rho: &CMatrix) -> Result<SpinBoundary> {
    spec.validate()?;
    check_state(spec, rho)?;
    let Reservoir::Spin { gamma, .. } = bath.reservoir else {
        return Err(Error::WrongBathKind {
            expected: "spin-polarization",
            found: bath.kind_name(),
        });
    };
    let site = bath.side.boundary_site(spec.n_sites);
    Ok(SpinBoundary {
        gamma,
        f: bath_f(bath)?,
        h_bath: spin_bath_field(bath)?,
        site,
        s: expect(&site_op(Pauli::Z, site, spec.n_sites)?, rho),
    })
}

/// `Q̇ = 2γ h_r (f_r − ⟨σᶻ_b⟩)` at the boundary site b.
pub fn heat_rate_xxz_closed(spec: &ChainSpec, bath: &BathSpec, rho: &CMatrix) -> Result<f64> {
    let b = spin_boundary(spec, bath, rho)?;
    Ok(2.0 * b.gamma * b.h_bath * (b.f - b.s))
}

/// `Ẇ = 2γ(h_b − h_r)(f − ⟨σᶻ_b⟩) − 2γα⟨σˣσˣ + σʸσʸ⟩_{b,nb} + 4γ Σ_j J_bj (f⟨σᶻ_j⟩ − ⟨σᶻ_bσᶻ_j⟩)`
/// where `J_bj` are the σᶻσᶻ coefficients of H touching the boundary site.
/// Also valid for Ising chains (α = 0, halved couplings).
pub fn work_rate_xxz_closed(spec: &ChainSpec, bath: &BathSpec, rho: &CMatrix) -> Result<f64> {
    let b = spin_boundary(spec, bath, rho)?;
    let n = spec.n_sites;
    let (g, f) = (b.gamma, b.f);
    let h_site = spec.site_fields()[b.site - 1];
    let mut w = 2.0 * g * (h_site - b.h_bath) * (f - b.s);

    let alpha = spec.xy_coupling();
    if alpha != 0.0 && n > 1 {
        let nb = if b.site == 1 { 2 } else { n - 1 };
        let xy = site_op(Pauli::X, b.site, n)? * site_op(Pauli::X, nb, n)?
            + site_op(Pauli::Y, b.site, n)? * site_op(Pauli::Y, nb, n)?;
        w -= 2.0 * g * alpha * expect(&xy, rho);
    }
    let zb = site_op(Pauli::Z, b.site, n)?;
    for (i, j, coeff) in spec.zz_terms() {
        let other = match (i == b.site, j == b.site) {
            (true, false) => j,
            (false, true) => i,
            _ => continue,
        };
        let zj = site_op(Pauli::Z, other, n)?;
        w += 4.0 * g * coeff * (f * expect(&zj, rho) - expect(&(&zb * &zj), rho));
    }
    Ok(w)
}

/// `Tr(H_S D_side(ρ))`, the energy entering through `side`.
pub fn energy_inflow(spec: &ChainSpec, baths: &BathPair, rho: &CMatrix, side: Side) -> Result<f64> {
    check_state(spec, rho)?;
    let h = build_hamiltonian(spec)?;
    let d = Dissipator::for_bath(baths.get(side), spec.n_sites)?;
    Ok(trace_product(&h, &d.apply(rho)?).re)
}

/// Spin-current operator `ĵ_i = 2α(σˣ_iσʸ_{i+1} − σʸ_iσˣ_{i+1})`.
pub fn spin_current_operator(spec: &ChainSpec, bond: usize) -> Result<CMatrix> {
    spec.validate()?;
    let n = spec.n_sites;
    if !(1..n).contains(&bond) {
        return Err(Error::SiteOutOfRange(format!(
            "bond {bond} outside 1..={}",
            n - 1
        )));
    }
    let xy = site_op(Pauli::X, bond, n)? * site_op(Pauli::Y, bond + 1, n)?;
    let yx = site_op(Pauli::Y, bond, n)? * site_op(Pauli::X, bond + 1, n)?;
    Ok((xy - yx).scale(2.0 * spec.xy_coupling()))
}

pub fn spin_current_bond(spec: &ChainSpec, rho: &CMatrix, bond: usize) -> Result<f64> {
    check_state(spec, rho)?;
    Ok(expect(&spin_current_operator(spec, bond)?, rho))
}

/// Spin current through the first bond; bond-independent in steady state.
pub fn spin_current(spec: &ChainSpec, rho: &CMatrix) -> Result<f64> {
    spin_current_bond(spec, rho, 1)
}

/// Closed-form energy current of the three-site chain at α = δ = γ = 1,
/// h = Δ = 0.
pub fn energy_current_closed_form_3site(beta_l: f64, h_l: f64, beta_r: f64, h_r: f64) -> f64 {
    let (ex, ey) = ((beta_l * h_l).exp(), (beta_r * h_r).exp());
    -160.0 * (ex - ey).powi(2)
        / ((ex + 1.0) * (ey + 1.0) * (121.0 * ex + 117.0 * ex * ey + 121.0 * ey + 117.0))
}

/// Boundary heat and work rates without the derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRates {
    pub qdot_l: f64,
    pub qdot_r: f64,
    pub wdot_l: f64,
    pub wdot_r: f64,
}

impl BoundaryRates {
    pub fn energy_current(&self) -> f64 {
        self.qdot_l + self.wdot_l
    }
}

/// Transcribed three-site rates for `f_L = f = −f_R` with XXZ parameters
/// (α, γ, δ, Δ), bath fields h_L, h_R and uniform chain field h.
#[allow(clippy::too_many_arguments)]
pub fn appendix_c_reference_currents(
    alpha: f64,
    gamma: f64,
    delta: f64,
    big_delta: f64,
    f: f64,
    h_l: f64,
    h_r: f64,
    h: f64,
) -> BoundaryRates {
    let (a2, g2, d2, dd2, f2) = (
        alpha * alpha,
        gamma * gamma,
        delta * delta,
        big_delta * big_delta,
        f * f,
    );
    let (a4, a6, a8, a10) = (a2 * a2, a2.powi(3), a2.powi(4), a2.powi(5));
    let (g4, g6) = (g2 * g2, g2.powi(3));
    let (d4, d6) = (d2 * d2, d2.powi(3));
    let dd4 = dd2 * dd2;
    let f4 = f2 * f2;
    let gd = g2 + d2;
    let dm = d2 - dd2;
    let dp = d2 + dd2;

    let p = gd
        * gd
        * (81.0 * g4 - 18.0 * g2 * (2.0 * f2 - 3.0) * dp + (3.0 - 2.0 * f2).powi(2) * dm * dm)
        + a6 * (72.0 * g2 + 3.0 * dd2 + 4.0 * d2 * (5.0 * f2 + 9.0))
        + a2 * gd
            * (216.0 * g4
                - 3.0 * g2 * (4.0 * d2 * (f2 - 9.0) + dd2 * (16.0 * f2 - 27.0))
                - (2.0 * f2 - 3.0) * (dd4 + 4.0 * d4 * (f2 + 1.0) + d2 * dd2 * (13.0 - 4.0 * f2)))
        + 2.0
            * a4
            * (99.0 * g4 + g2 * (2.0 * d2 * (7.0 * f2 + 48.0) + 3.0 * dd2 * (5.0 - 2.0 * f2))
                - 3.0 * d2 * dd2 * (f2 - 4.0)
                + d4 * (2.0 * f4 - 6.0 * f2 + 15.0))
        + 9.0 * a8;

    let den = a8 * (81.0 * g2 + 3.0 * dd2 + d2 * (20.0 * f2 + 39.0))
        + gd * gd
            * (81.0 * g6
                + g2 * (d4 * (27.0 - 8.0 * f4)
                    + 2.0 * d2 * dd2 * (8.0 * f4 + 9.0)
                    + dd4 * (27.0 - 8.0 * f4))
                + 9.0 * g4 * (2.0 * f2 + 9.0) * dp
                - (2.0 * f2 - 3.0) * dm * dm * dp)
        + 2.0
            * a6
            * (135.0 * g4
                + 3.0 * g2 * (7.0 * d2 * (f2 + 6.0) + dd2 * (7.0 - 2.0 * f2))
                + d2 * dd2 * (17.0 - 3.0 * f2)
                + d4 * (2.0 * f4 - 3.0 * f2 + 21.0))
        + 2.0
            * a4
            * (207.0 * g6
                + g4 * (d2 * (291.0 - 7.0 * f2) + 3.0 * dd2 * (26.0 - 7.0 * f2))
                + g2 * (-dd4 * (f2 - 3.0)
                    + d4 * (-8.0 * f4 - 16.0 * f2 + 107.0)
                    + d2 * dd2 * (4.0 * f4 - 37.0 * f2 + 104.0))
                - d2 * (dd4 * (f2 - 3.0) + d4 * (4.0 * f4 + f2 - 11.0)
                    - 2.0 * d2 * dd2 * (2.0 * f4 - 9.0 * f2 + 14.0)))
        + a2 * gd
            * (297.0 * g6 - 3.0 * g4 * (d2 * (22.0 * f2 - 105.0) + 2.0 * dd2 * (2.0 * f2 - 33.0))
                + g2 * (d4 * (20.0 * f4 - 44.0 * f2 + 111.0)
                    - 4.0 * d2 * dd2 * (6.0 * f4 + 2.0 * f2 - 33.0)
                    + dd4 * (4.0 * f4 - 20.0 * f2 + 33.0))
                + d6 * (4.0 * f4 - 10.0 * f2 + 13.0)
                - 2.0 * d4 * dd2 * (4.0 * f4 - 14.0 * f2 + 1.0)
                + d2 * dd4 * (4.0 * f4 - 18.0 * f2 + 25.0))
        + 9.0 * a10;

    let fd = f * delta;
    let s = -12.0 * fd * dd2 * a6
        + 4.0
            * fd
            * (9.0 * g4 + 2.0 * (5.0 * d2 - 6.0 * f2 * dd2) * g2 + d4
                - dd4
                - 2.0 * (f2 - 3.0) * d2 * dd2)
            * a4
        + gd * 4.0
            * fd
            * (54.0 * g4
                + 3.0 * (2.0 * (3.0 * f2 + 7.0) * d2 + (5.0 - 6.0 * f2) * dd2) * g2
                + 2.0 * (f2 + 2.0) * d4
                + (1.0 - 2.0 * f2) * dd4
                + 13.0 * d2 * dd2)
            * a2
        - gd * gd
            * 4.0
            * fd
            * (-81.0 * g4 + 18.0 * ((f2 - 2.0) * d2 - f2 * dd2) * g2 + (2.0 * f2 - 3.0) * dm * dm);

    let pre = 2.0 * gamma * f * a2 / den;
    BoundaryRates {
        qdot_l: pre * h_l * p,
        qdot_r: -pre * h_r * p,
        wdot_l: -pre * ((h_l - h) * p + s),
        wdot_r: pre * ((h_r - h) * p + s),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Refrigerator,
    Engine,
    Heater,
    Other,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Refrigerator => "refrigerator",
            Regime::Engine => "engine",
            Regime::Heater => "heater",
            Regime::Other => "other",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Steady-state thermodynamic summary of a boundary-driven chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurrentReport {
    pub qdot_l: f64,
    pub qdot_r: f64,
    pub wdot_l: f64,
    pub wdot_r: f64,
    /// Energy current entering from the left, `Q̇_L + Ẇ_L`.
    pub f_energy: f64,
    pub wdot_total: f64,
    pub pi_ss: f64,
    pub j_spin: f64,
    pub regime: Regime,
}

impl CurrentReport {
    pub fn compute(
        spec: &ChainSpec,
        baths: &BathPair,
        ss: &SteadyState,
        opts: &CurrentOptions,
    ) -> Result<Self> {
        let rho = &ss.rho;
        check_state(spec, rho)?;
        let h_s = build_hamiltonian(spec)?;
        let left = BathCoupling::new(&baths.left, spec.n_sites, opts.boson_tail_tol)?;
        let right = BathCoupling::new(&baths.right, spec.n_sites, opts.boson_tail_tol)?;
        let rates = BoundaryRates {
            qdot_l: left.heat_rate(rho),
            qdot_r: right.heat_rate(rho),
            wdot_l: left.work_rate(&h_s, rho),
            wdot_r: right.work_rate(&h_s, rho),
        };
        let j_spin = if spec.n_sites > 1 {
            spin_current(spec, rho)?
        } else {
            0.0
        };
        Self::from_rates(rates, baths, j_spin, opts.regime_tol)
    }

    pub fn from_rates(
        r: BoundaryRates,
        baths: &BathPair,
        j_spin: f64,
        regime_tol: f64,
    ) -> Result<Self> {
        let mut report = Self {
            qdot_l: r.qdot_l,
            qdot_r: r.qdot_r,
            wdot_l: r.wdot_l,
            wdot_r: r.wdot_r,
            f_energy: r.qdot_l + r.wdot_l,
            wdot_total: r.wdot_l + r.wdot_r,
            pi_ss: 0.0,
            j_spin,
            regime: Regime::Other,
        };
        report.pi_ss = entropy_production(&report, baths)?;
        report.regime = classify_regime(&report, baths, regime_tol);
        Ok(report)
    }

    pub fn rates(&self) -> BoundaryRates {
        BoundaryRates {
            qdot_l: self.qdot_l,
            qdot_r: self.qdot_r,
            wdot_l: self.wdot_l,
            wdot_r: self.wdot_r,
        }
    }

    pub fn max_rate(&self) -> f64 {
        [self.qdot_l, self.qdot_r, self.wdot_l, self.wdot_r]
            .iter()
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `Q̇_L + Ẇ_L + Q̇_R + Ẇ_R`, zero in steady state.
    pub fn first_law_residual(&self) -> f64 {
        self.qdot_l + self.wdot_l + self.qdot_r + self.wdot_r
    }

    /// First law within `tol · max(max_rate, floor)`; the floor keeps
    /// identically vanishing currents from demanding exact cancellation.
    pub fn satisfies_first_law(&self, tol: f64, floor: f64) -> bool {
        self.first_law_residual().abs() <= tol * self.max_rate().max(floor)
    }
}

/// `Π_SS = −Σ_r β_r Q̇_r`.
pub fn entropy_production(report: &CurrentReport, baths: &BathPair) -> Result<f64> {
    let beta = |b: &BathSpec| b.beta().ok_or(Error::UndeterminedSplit { side: b.side });
    Ok(-(beta(&baths.left)? * report.qdot_l + beta(&baths.right)? * report.qdot_r))
}

/// `−Tr(ρ ln ρ)`.
pub fn von_neumann_entropy(rho: &CMatrix) -> Result<f64> {
    Ok(eigvalsh(rho)?
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum())
}

/// Cold end is the bath with the larger β. Sign patterns of
/// (Q̇_cold, Q̇_hot, Ẇ_total): refrigerator (+, −, +), heater (−, +, +),
/// engine (−, +, −); anything else, equal temperatures, or magnitudes
/// within `tol` of zero give `Other`.
pub fn classify_regime(report: &CurrentReport, baths: &BathPair, tol: f64) -> Regime {
    let (Some(bl), Some(br)) = (baths.left.beta(), baths.right.beta()) else {
        return Regime::Other;
    };
    if bl == br {
        return Regime::Other;
    }
    let (q_cold, q_hot) = if bl > br {
        (report.qdot_l, report.qdot_r)
    } else {
        (report.qdot_r, report.qdot_l)
    };
    let sign = |x: f64| {
        if x > tol {
            1
        } else if x < -tol {
            -1
        } else {
            0
        }
    };
    match (sign(q_cold), sign(q_hot), sign(report.wdot_total)) {
        (1, -1, 1) => Regime::Refrigerator,
        (-1, 1, 1) => Regime::Heater,
        (-1, 1, -1) => Regime::Engine,
        _ => Regime::Other,
    }
}

/// Bose-Einstein factor `2n + 1` of a bosonic bath.
pub fn bosonic_rate_factor(bath: &BathSpec) -> Result<f64> {
    Ok(2.0 * bath_n(bath)? + 1.0)
}
