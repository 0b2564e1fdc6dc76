//! Single-site spin and boson operators embedded in tensor-product spaces.
//!
//! Extended spaces are always ordered `[bath L] ⊗ [site 1 … site N] ⊗ [bath R]`;
//! either bath factor may be absent. Sites are 1-based.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, check_dim, identity, kron_all, CMatrix, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
    /// σ⁺ = (σˣ + iσʸ)/2, raises ↓ to ↑.
    Plus,
    /// σ⁻ = (σˣ − iσʸ)/2.
    Minus,
}

/// Basis order is (↑, ↓), so σᶻ = diag(1, −1).
pub fn pauli(kind: Pauli) -> CMatrix {
    let m = |a, b, cc, d| CMatrix::from_row_slice(2, 2, &[a, b, cc, d]);
    match kind {
        Pauli::I => identity(2),
        Pauli::X => m(ZERO, ONE, ONE, ZERO),
        Pauli::Y => m(ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO),
        Pauli::Z => m(ONE, ZERO, ZERO, -ONE),
        Pauli::Plus => m(ZERO, ONE, ZERO, ZERO),
        Pauli::Minus => m(ZERO, ZERO, ONE, ZERO),
    }
}

/// Boson annihilation operator truncated to `levels` Fock states.
pub fn annihilation(levels: usize) -> CMatrix {
    let mut a = CMatrix::zeros(levels, levels);
    for n in 1..levels {
        a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn number(levels: usize) -> CMatrix {
    crate::linalg::diag(&(0..levels).map(|n| n as f64).collect::<Vec<_>>())
}

/// Which tensor factor an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteIndex {
    /// Chain site, 1-based.
    Site(usize),
    BathL,
    BathR,
}

/// Factor layout of a (possibly bath-extended) chain space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub n_sites: usize,
    pub bath_l: Option<usize>,
    pub bath_r: Option<usize>,
}

impl Layout {
    pub fn chain(n_sites: usize) -> Self {
        Self {
            n_sites,
            bath_l: None,
            bath_r: None,
        }
    }

    pub fn extended(n_sites: usize, bath_l: Option<usize>, bath_r: Option<usize>) -> Self {
        Self {
            n_sites,
            bath_l,
            bath_r,
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.n_sites + 2);
        dims.extend(self.bath_l);
        dims.extend(std::iter::repeat_n(2, self.n_sites));
        dims.extend(self.bath_r);
        dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims().iter().product()
    }

    /// Factor positions of the chain sites.
    pub fn system_slots(&self) -> Vec<usize> {
        let off = usize::from(self.bath_l.is_some());
        (off..off + self.n_sites).collect()
    }

    pub fn slot(&self, place: SiteIndex) -> Result<usize> {
        let off = usize::from(self.bath_l.is_some());
        match place {
            SiteIndex::Site(s) if (1..=self.n_sites).contains(&s) => Ok(off + s - 1),
            SiteIndex::Site(s) => Err(Error::SiteOutOfRange(format!(
                "site {s} outside 1..={}",
                self.n_sites
            ))),
            SiteIndex::BathL if self.bath_l.is_some() => Ok(0),
            SiteIndex::BathR if self.bath_r.is_some() => Ok(off + self.n_sites),
            _ => Err(Error::SiteOutOfRange(format!(
                "{place:?} is not part of this space"
            ))),
        }
    }
}

/// Embed `op` at factor `slot` of the space with factor dimensions `dims`.
pub fn embed(op: &CMatrix, slot: usize, dims: &[usize]) -> Result<CMatrix> {
    if slot >= dims.len() {
        return Err(Error::SiteOutOfRange(format!(
            "slot {slot} of {} factors",
            dims.len()
        )));
    }
    if op.nrows() != dims[slot] || op.ncols() != dims[slot] {
        return Err(Error::DimensionMismatch(format!(
            "operator of dimension {} placed on a factor of dimension {}",
            op.nrows(),
            dims[slot]
        )));
    }
    check_dim(dims.iter().product())?;
    let factors: Vec<CMatrix> = dims
        .iter()
        .enumerate()
        .map(|(s, &d)| if s == slot { op.clone() } else { identity(d) })
        .collect();
    kron_all(&factors)
}

pub fn op_at(op: &CMatrix, place: SiteIndex, layout: &Layout) -> Result<CMatrix> {
    embed(op, layout.slot(place)?, &layout.dims())
}

/// Pauli operator on chain site `site` (1-based) of a bare `n_sites` chain.
pub fn site_op(kind: Pauli, site: usize, n_sites: usize) -> Result<CMatrix> {
    op_at(&pauli(kind), SiteIndex::Site(site), &Layout::chain(n_sites))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, diag, kron, max_abs, max_abs_diff};

    #[test]
    fn pauli_definitions() {
        assert_eq!(pauli(Pauli::Z), diag(&[1.0, -1.0]));
        let plus = pauli(Pauli::Plus);
        assert_eq!(
            plus,
            CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
        );
        let from_xy = (pauli(Pauli::X) + pauli(Pauli::Y) * c(0.0, 1.0)).scale(0.5);
        assert_eq!(plus, from_xy);
        let minus_xy = (pauli(Pauli::X) - pauli(Pauli::Y) * c(0.0, 1.0)).scale(0.5);
        assert_eq!(pauli(Pauli::Minus), minus_xy);
    }

    #[test]
    fn ladder_algebra() {
        let p = pauli(Pauli::Plus);
        let m = pauli(Pauli::Minus);
        assert_eq!(&p * &m + &m * &p, identity(2));
    }

    #[test]
    fn embedding_on_two_sites() {
        let z = pauli(Pauli::Z);
        let layout = Layout::chain(2);
        let z1 = op_at(&z, SiteIndex::Site(1), &layout).unwrap();
        let z2 = op_at(&z, SiteIndex::Site(2), &layout).unwrap();
        assert_eq!(z1, kron(&z, &identity(2)).unwrap());
        assert_eq!(max_abs(&commutator(&z1, &z2)), 0.0);
    }

    #[test]
    fn embedding_matches_kron_chain() {
        let y = pauli(Pauli::Y);
        let got = site_op(Pauli::Y, 2, 3).unwrap();
        let oracle = kron(&kron(&identity(2), &y).unwrap(), &identity(2)).unwrap();
        assert_eq!(max_abs_diff(&got, &oracle), 0.0);
    }

    #[test]
    fn distinct_sites_commute_exactly() {
        let kinds = [Pauli::X, Pauli::Y, Pauli::Z, Pauli::Plus, Pauli::Minus];
        for &a in &kinds {
            for &b in &kinds {
                let oa = site_op(a, 1, 3).unwrap();
                let ob = site_op(b, 3, 3).unwrap();
                assert_eq!(max_abs(&commutator(&oa, &ob)), 0.0);
            }
        }
    }

    #[test]
    fn extended_layout_slots() {
        let layout = Layout::extended(3, Some(2), Some(5));
        assert_eq!(layout.dims(), vec![2, 2, 2, 2, 5]);
        assert_eq!(layout.slot(SiteIndex::BathL).unwrap(), 0);
        assert_eq!(layout.slot(SiteIndex::Site(1)).unwrap(), 1);
        assert_eq!(layout.slot(SiteIndex::BathR).unwrap(), 4);
        assert_eq!(layout.system_slots(), vec![1, 2, 3]);
        assert!(Layout::chain(3).slot(SiteIndex::BathL).is_err());
        assert!(layout.slot(SiteIndex::Site(4)).is_err());
    }

    #[test]
    fn embedding_rejects_wrong_factor_dim() {
        let layout = Layout::extended(2, None, Some(4));
        assert!(op_at(&pauli(Pauli::X), SiteIndex::BathR, &layout).is_err());
        assert!(op_at(&annihilation(4), SiteIndex::BathR, &layout).is_ok());
    }

    #[test]
    fn truncated_boson_commutator() {
        let a = annihilation(5);
        let comm = &a * a.adjoint() - a.adjoint() * &a;
        assert!(max_abs_diff(&comm, &diag(&[1.0, 1.0, 1.0, 1.0, -4.0])) < 1e-14);
        assert!(max_abs_diff(&(a.adjoint() * &a), &number(5)) < 1e-14);
    }
}
