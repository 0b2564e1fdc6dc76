//! Finite-τ repeated interactions: each cycle couples the chain to fresh
//! copies of both reservoirs for a time τ and traces them out again.

use serde::{Deserialize, Serialize};

use crate::currents::{boson_cutoff, BathCoupling};
use crate::error::{Error, Result};
use crate::linalg::{
    check_dim, herm_expm, identity, kron, matmul, partial_trace, spectral_norm, trace,
    trace_distance, trace_product, unvec, vec_of, CMatrix, C64, ZERO,
};
use crate::models::{build_hamiltonian, BathPair, BathSpec, ChainSpec, Reservoir};
use crate::operators::{op_at, Layout, SiteIndex};
use crate::steady_state::SteadyState;

/// Default thermal tail weight allowed beyond the boson truncation.
pub const RI_BOSON_TAIL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiConfig {
    pub tau: f64,
    /// Cycle budget for the fixed-point iteration.
    pub n_cycles: usize,
    /// Highest kept Fock level; derived from `boson_tail_tol` when absent.
    pub n_max: Option<usize>,
    pub convergence_tol: f64,
    pub boson_tail_tol: f64,
    /// Consecutive cycles below `convergence_tol` required to stop.
    pub consecutive: usize,
}

impl RiConfig {
    pub fn new(tau: f64) -> Self {
        Self {
            tau,
            n_cycles: 1_000_000,
            n_max: None,
            convergence_tol: 1e-12,
            boson_tail_tol: RI_BOSON_TAIL,
            consecutive: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if self.n_max == Some(0) {
            return Err(Error::InvalidConfig("n_max must be at least 1".into()));
        }
        if self.convergence_tol.is_nan()
            || self.convergence_tol <= 0.0
            || self.boson_tail_tol.is_nan()
            || self.boson_tail_tol <= 0.0
        {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.consecutive == 0 {
            return Err(Error::InvalidConfig(
                "consecutive must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn levels(&self, bath: &BathSpec) -> usize {
        match bath.reservoir {
            Reservoir::Spin { .. } => 2,
            Reservoir::Bosonic { beta, omega, .. } => {
                self.n_max
                    .unwrap_or_else(|| boson_cutoff(beta, omega, self.boson_tail_tol))
                    + 1
            }
        }
    }
}

/// Energy bookkeeping of one cycle. Heat is the energy lost by each bath
/// copy; work closes the first law, and the `direct` entries recompute it
/// per bath from the interaction energy `Tr(V_r(ρ_before − ρ_after))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleLog {
    pub dq_l: f64,
    pub dq_r: f64,
    pub dw: f64,
    pub de: f64,
    pub dw_l_direct: f64,
    pub dw_r_direct: f64,
    /// Trace distance between the chain states before and after the cycle.
    pub trace_distance: f64,
}

impl CycleLog {
    pub fn first_law_residual(&self) -> f64 {
        self.de - self.dw - self.dq_l - self.dq_r
    }

    /// Mismatch between first-law work and interaction-energy work.
    pub fn work_mismatch(&self) -> f64 {
        self.dw - self.dw_l_direct - self.dw_r_direct
    }
}

/// Precompiled cycle for one chain, bath pair and τ.
#[derive(Debug, Clone)]
pub struct RiSystem {
    pub tau: f64,
    pub n_sites: usize,
    pub layout: Layout,
    h_s: CMatrix,
    u: CMatrix,
    bath_states: [CMatrix; 2],
    bath_energy: [f64; 2],
    /// Coupling operators on the extended space, already scaled by 1/√τ.
    v_ext: [CMatrix; 2],
    h_bath_ext: [CMatrix; 2],
    /// `v_r` factors on the chain and bath copy, unscaled.
    couplings: [BathCoupling; 2],
    transfer: CMatrix,
    /// Heisenberg-evolved bath energies and interactions folded onto the chain.
    heat_ops: [CMatrix; 2],
    interaction_ops: [CMatrix; 2],
    top_level_ops: [Option<CMatrix>; 2],
    boson_tail_tol: f64,
}

fn embed_system(op: &CMatrix, layout: &Layout) -> Result<CMatrix> {
    let left = identity(layout.bath_l.unwrap_or(1));
    let right = identity(layout.bath_r.unwrap_or(1));
    kron(&kron(&left, op)?, &right)
}

impl RiSystem {
    pub fn new(spec: &ChainSpec, baths: &BathPair, cfg: &RiConfig) -> Result<Self> {
        cfg.validate()?;
        baths.validate()?;
        let n = spec.n_sites;
        let (ll, lr) = (cfg.levels(&baths.left), cfg.levels(&baths.right));
        let layout = Layout::extended(n, Some(ll), Some(lr));
        check_dim(layout.total_dim())?;

        let couplings = [
            BathCoupling::with_levels(&baths.left, n, ll, cfg.boson_tail_tol)?,
            BathCoupling::with_levels(&baths.right, n, lr, cfg.boson_tail_tol)?,
        ];
        let places = [SiteIndex::BathL, SiteIndex::BathR];
        let h_s = build_hamiltonian(spec)?;
        let scale = 1.0 / cfg.tau.sqrt();

        let mut h_tot = embed_system(&h_s, &layout)?;
        let mut v_ext = [CMatrix::zeros(0, 0), CMatrix::zeros(0, 0)];
        let mut h_bath_ext = [CMatrix::zeros(0, 0), CMatrix::zeros(0, 0)];
        for r in 0..2 {
            let c = &couplings[r];
            let mut v = CMatrix::zeros(layout.total_dim(), layout.total_dim());
            for (a, b) in c.sys_ops.iter().zip(&c.bath_ops) {
                v += match places[r] {
                    SiteIndex::BathL => kron(b, &kron(a, &identity(lr))?)?,
                    _ => kron(&identity(ll), &kron(a, b)?)?,
                };
            }
            v_ext[r] = v.scale(scale);
            h_bath_ext[r] = op_at(&c.h_bath, places[r], &layout)?;
            h_tot += &h_bath_ext[r] + &v_ext[r];
        }
        let u = herm_expm(&h_tot, cfg.tau)?;
        let bath_states = [couplings[0].state.clone(), couplings[1].state.clone()];
        let bath_energy = [
            trace_product(&couplings[0].h_bath, &bath_states[0]).re,
            trace_product(&couplings[1].h_bath, &bath_states[1]).re,
        ];

        let mut sys = Self {
            tau: cfg.tau,
            n_sites: n,
            layout,
            h_s,
            u,
            bath_states,
            bath_energy,
            v_ext,
            h_bath_ext,
            couplings,
            transfer: CMatrix::zeros(0, 0),
            heat_ops: [CMatrix::zeros(0, 0), CMatrix::zeros(0, 0)],
            interaction_ops: [CMatrix::zeros(0, 0), CMatrix::zeros(0, 0)],
            top_level_ops: [None, None],
            boson_tail_tol: cfg.boson_tail_tol,
        };
        sys.transfer = sys.compile_transfer();
        for r in 0..2 {
            sys.heat_ops[r] = sys.fold(&sys.h_bath_ext[r]);
            sys.interaction_ops[r] = sys.fold(&sys.v_ext[r]);
            if let Reservoir::Bosonic { .. } = [&baths.left, &baths.right][r].reservoir {
                let levels = sys.couplings[r].bath_dim();
                let mut top = CMatrix::zeros(levels, levels);
                top[(levels - 1, levels - 1)] = C64::new(1.0, 0.0);
                sys.top_level_ops[r] = Some(sys.fold(&op_at(&top, places[r], &sys.layout)?));
            }
        }
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    fn bath_dims(&self) -> (usize, usize) {
        (self.couplings[0].bath_dim(), self.couplings[1].bath_dim())
    }

    fn ext_index(&self, l: usize, i: usize, r: usize) -> usize {
        let (_, dr) = self.bath_dims();
        (l * self.dim() + i) * dr + r
    }

    fn weights(&self) -> Vec<(usize, usize, f64)> {
        let (dl, dr) = self.bath_dims();
        let mut w = Vec::with_capacity(dl * dr);
        for l in 0..dl {
            for r in 0..dr {
                let p = self.bath_states[0][(l, l)].re * self.bath_states[1][(r, r)].re;
                if p > 0.0 {
                    w.push((l, r, p));
                }
            }
        }
        w
    }

    /// Chain operator `R(O)` with `Tr(O U(ρ⊗ω_L⊗ω_R)U†) = Tr(R(O) ρ)` after
    /// reordering the factors.
    fn fold(&self, op: &CMatrix) -> CMatrix {
        let ou = matmul(op, &self.u);
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for (l, r, p) in self.weights() {
            let cols: Vec<usize> = (0..d).map(|i| self.ext_index(l, i, r)).collect();
            out += (self.u.select_columns(&cols).adjoint() * ou.select_columns(&cols)).scale(p);
        }
        out
    }

    /// Column-stacked superoperator of one cycle, `Σ conj(K) ⊗ K` over the
    /// Kraus operators `K = √(p_l p_r) ⟨l' r'|U|l r⟩`.
    fn compile_transfer(&self) -> CMatrix {
        let d = self.dim();
        let (dl, dr) = self.bath_dims();
        let mut t = CMatrix::zeros(d * d, d * d);
        let mut k = CMatrix::zeros(d, d);
        for (l, r, p) in self.weights() {
            let s = p.sqrt();
            for lp in 0..dl {
                for rp in 0..dr {
                    for a in 0..d {
                        for i in 0..d {
                            k[(a, i)] =
                                self.u[(self.ext_index(lp, a, rp), self.ext_index(l, i, r))] * s;
                        }
                    }
                    for j in 0..d {
                        for b in 0..d {
                            let kc = k[(b, j)].conj();
                            if kc == ZERO {
                                continue;
                            }
                            for i in 0..d {
                                for a in 0..d {
                                    t[(b * d + a, j * d + i)] += kc * k[(a, i)];
                                }
                            }
                        }
                    }
                }
            }
        }
        t
    }

    pub fn transfer(&self) -> &CMatrix {
        &self.transfer
    }

    /// One cycle through the precompiled channel.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        unvec(&(&self.transfer * vec_of(rho)), self.dim())
    }

    fn initial_interaction(&self, r: usize, rho: &CMatrix) -> f64 {
        let c = &self.couplings[r];
        let s = 1.0 / self.tau.sqrt();
        c.sys_ops
            .iter()
            .zip(&c.bath_ops)
            .map(|(a, b)| (trace_product(a, rho) * trace_product(b, &c.state)).re * s)
            .sum()
    }

    fn log(&self, rho: &CMatrix, next: &CMatrix) -> Result<CycleLog> {
        let tr = trace(rho).re;
        let dq_l = self.bath_energy[0] * tr - trace_product(&self.heat_ops[0], rho).re;
        let dq_r = self.bath_energy[1] * tr - trace_product(&self.heat_ops[1], rho).re;
        let de = trace_product(&self.h_s, &(next - rho)).re;
        let direct = |r: usize| {
            self.initial_interaction(r, rho) - trace_product(&self.interaction_ops[r], rho).re
        };
        Ok(CycleLog {
            dq_l,
            dq_r,
            dw: de - dq_l - dq_r,
            de,
            dw_l_direct: direct(0),
            dw_r_direct: direct(1),
            trace_distance: trace_distance(next, rho)?,
        })
    }

    fn check_truncation(&self, rho: &CMatrix) -> Result<()> {
        for op in self.top_level_ops.iter().flatten() {
            let tail = trace_product(op, rho).re;
            if tail > self.boson_tail_tol {
                return Err(Error::TruncationInsufficient {
                    tail,
                    tol: self.boson_tail_tol,
                });
            }
        }
        Ok(())
    }

    /// One cycle through the precompiled channel, with bookkeeping.
    pub fn step(&self, rho: &CMatrix) -> Result<(CMatrix, CycleLog)> {
        self.check_input(rho)?;
        let next = self.apply(rho)?;
        let log = self.log(rho, &next)?;
        self.check_truncation(rho)?;
        Ok((next, log))
    }

    /// One cycle on the full extended space: evolve ρ ⊗ ω_L ⊗ ω_R and trace
    /// out the bath copies.
    pub fn step_direct(&self, rho: &CMatrix) -> Result<(CMatrix, CycleLog)> {
        self.check_input(rho)?;
        let before = kron(&kron(&self.bath_states[0], rho)?, &self.bath_states[1])?;
        let after = &self.u * &before * self.u.adjoint();
        let dims = self.layout.dims();
        let next = partial_trace(&after, &dims, &self.layout.system_slots())?;

        let dq = |r: usize| trace_product(&self.h_bath_ext[r], &(&before - &after)).re;
        let dw_direct = |r: usize| trace_product(&self.v_ext[r], &(&before - &after)).re;
        let (dq_l, dq_r) = (dq(0), dq(1));
        let de = trace_product(&self.h_s, &(&next - rho)).re;
        for (r, slot) in [(0usize, 0usize), (1, dims.len() - 1)] {
            if self.top_level_ops[r].is_some() {
                let bath = partial_trace(&after, &dims, &[slot])?;
                let levels = bath.nrows();
                let tail = bath[(levels - 1, levels - 1)].re;
                if tail > self.boson_tail_tol {
                    return Err(Error::TruncationInsufficient {
                        tail,
                        tol: self.boson_tail_tol,
                    });
                }
            }
        }
        let log = CycleLog {
            dq_l,
            dq_r,
            dw: de - dq_l - dq_r,
            de,
            dw_l_direct: dw_direct(0),
            dw_r_direct: dw_direct(1),
            trace_distance: trace_distance(&next, rho)?,
        };
        Ok((next, log))
    }

    fn check_input(&self, rho: &CMatrix) -> Result<()> {
        if rho.nrows() != self.dim() || rho.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state of dimension {} on a {}-site chain",
                rho.nrows(),
                self.n_sites
            )));
        }
        Ok(())
    }
}

/// One repeated-interaction cycle on the extended space.
pub fn ri_step(
    rho: &CMatrix,
    spec: &ChainSpec,
    baths: &BathPair,
    cfg: &RiConfig,
) -> Result<(CMatrix, CycleLog)> {
    RiSystem::new(spec, baths, cfg)?.step_direct(rho)
}

/// Per-unit-time rates of the stationary cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiRates {
    pub qdot_l: f64,
    pub qdot_r: f64,
    pub wdot_l: f64,
    pub wdot_r: f64,
    pub wdot_total: f64,
}

#[derive(Debug, Clone)]
pub struct RiFixedPoint {
    pub steady: SteadyState,
    pub history: Vec<CycleLog>,
    pub rates: RiRates,
}

/// Iterates the cycle map from the maximally mixed state until successive
/// states are within `convergence_tol` for `consecutive` cycles.
pub fn ri_fixed_point(spec: &ChainSpec, baths: &BathPair, cfg: &RiConfig) -> Result<RiFixedPoint> {
    let sys = RiSystem::new(spec, baths, cfg)?;
    let d = sys.dim();
    let mut rho = identity(d).unscale(d as f64);
    let mut history = Vec::new();
    let mut streak = 0;
    for _ in 0..cfg.n_cycles {
        let (next, log) = sys.step(&rho)?;
        history.push(log);
        rho = next;
        streak = if log.trace_distance <= cfg.convergence_tol {
            streak + 1
        } else {
            0
        };
        if streak >= cfg.consecutive {
            let rho = crate::linalg::hermitize(&rho);
            let rho = rho.unscale(trace(&rho).re);
            let (_, last) = sys.step(&rho)?;
            let tau = cfg.tau;
            let rates = RiRates {
                qdot_l: last.dq_l / tau,
                qdot_r: last.dq_r / tau,
                wdot_l: last.dw_l_direct / tau,
                wdot_r: last.dw_r_direct / tau,
                wdot_total: last.dw / tau,
            };
            let gen = (sys.transfer() - identity(d * d)).unscale(tau);
            let residual = (&gen * vec_of(&rho)).norm();
            let min_eig = crate::linalg::eigvalsh(&rho)?
                .first()
                .copied()
                .unwrap_or(0.0);
            let steady = SteadyState {
                kernel: vec![rho.clone()],
                rho,
                residual,
                nullspace_dim: 1,
                min_eig,
                generator_norm: spectral_norm(&gen),
            };
            return Ok(RiFixedPoint {
                steady,
                history,
                rates,
            });
        }
    }
    Err(Error::NotConverged {
        cycles: cfg.n_cycles,
        distance: history.last().map(|l| l.trace_distance).unwrap_or(f64::NAN),
    })
}
