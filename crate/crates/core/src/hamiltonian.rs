//! Parent Hamiltonians of MPS tensors and their exact ground spaces.
//!
//! The local term at interaction length `l` is the orthogonal projector onto
//! the complement of the physical subspace on `l` sites. The open-boundary
//! Hamiltonian sums its translates over the `n - l + 1` contiguous windows;
//! the periodic one adds the `l - 1` wrap-around windows and commutes with
//! the cyclic translation. Both are Hermitian, positive semidefinite sums of
//! projectors, so the ground energy is nonnegative and vanishes exactly in
//! the frustration-free case.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{
    self, containment_residual, hermitian_eigen_sorted, CMatrix, DenseCap, Subspace, Tolerance,
};
use crate::mps::{self, MpsTensor};

/// Guard against absurd dense-operator allocations: `(d^n)^2` complex entries
/// at 16 bytes each must stay below this.
const MAX_OPERATOR_BYTES: usize = 4 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

impl core::fmt::Display for Boundary {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Boundary::Open => write!(f, "obc"),
            Boundary::Periodic => write!(f, "pbc"),
        }
    }
}

/// An assembled parent Hamiltonian: the dense Hermitian operator plus the
/// data it was built from.
#[derive(Clone, Debug)]
pub struct ParentHamiltonian {
    pub tensor: MpsTensor,
    pub ell: usize,
    pub n: usize,
    pub boundary: Boundary,
    pub operator: CMatrix,
}

/// Exact ground-space data. `frustration_free` holds when the ground energy
/// vanishes within the absolute window `eig_zero * max(1, ||H||)`.
#[derive(Clone, Debug)]
pub struct GroundSpaceResult {
    pub energy: f64,
    pub space: Subspace,
    pub frustration_free: bool,
    pub degeneracy: usize,
}

/// Outcome of comparing a ground space against the MPS subspace it should
/// equal.
#[derive(Clone, Debug)]
pub struct GroundComparison {
    pub equal: bool,
    pub gs_dim: usize,
    pub mps_dim: usize,
    pub max_residual: f64,
    pub energy: f64,
    pub frustration_free: bool,
}

/// The local term `h = I - P` where `P` projects onto the physical subspace
/// on `ell` sites. Errors when that subspace is the whole local space, since
/// then no parent Hamiltonian exists at this interaction length.
pub fn local_term(a: &MpsTensor, ell: usize, tol: Tolerance, cap: DenseCap) -> Result<CMatrix> {
    let s = mps::physical_subspace(a, ell, tol, cap)?;
    let dim = s.ambient_dim();
    if s.dim() == dim {
        return Err(Error::NotProperSubspace(format!(
            "the physical subspace on {ell} sites fills the whole {dim}-dimensional space"
        )));
    }
    Ok(s.complement_projector())
}

/// Adds `h` acting on the `ell` sites starting at `start` (cyclically) into
/// the accumulator, identity elsewhere. Site 0 is the most significant digit.
fn add_embedded(acc: &mut CMatrix, h: &CMatrix, d: usize, ell: usize, n: usize, start: usize) {
    let positions: Vec<usize> = (0..ell).map(|k| (start + k) % n).collect();
    let mut acting = [false; 64];
    let mut acting_vec;
    let acting: &mut [bool] = if n <= 64 {
        &mut acting[..n]
    } else {
        acting_vec = alloc::vec![false; n];
        &mut acting_vec
    };
    for &p in &positions {
        acting[p] = true;
    }
    let others: Vec<usize> = (0..n).filter(|&p| !acting[p]).collect();
    // weight of each site position in the flat index (big-endian)
    let weight: Vec<usize> = (0..n).map(|p| d.pow((n - 1 - p) as u32)).collect();
    let local_dim = d.pow(ell as u32);
    let rest_dim = d.pow((n - ell) as u32);

    for rest in 0..rest_dim {
        // spread the spectator digits over their positions
        let mut base = 0usize;
        let mut r = rest;
        for &p in others.iter().rev() {
            base += (r % d) * weight[p];
            r /= d;
        }
        for hr in 0..local_dim {
            let mut row = base;
            let mut t = hr;
            for &p in positions.iter().rev() {
                row += (t % d) * weight[p];
                t /= d;
            }
            for hc in 0..local_dim {
                let entry = h[(hr, hc)];
                if entry.re == 0.0 && entry.im == 0.0 {
                    continue;
                }
                let mut col = base;
                let mut t = hc;
                for &p in positions.iter().rev() {
                    col += (t % d) * weight[p];
                    t /= d;
                }
                acc[(row, col)] += entry;
            }
        }
    }
}

/// Assembles the `ell`-local parent Hamiltonian on `n` sites. Open boundary
/// sums the `n - ell + 1` contiguous windows; periodic boundary sums all `n`
/// cyclic windows.
pub fn build(
    a: &MpsTensor,
    ell: usize,
    n: usize,
    boundary: Boundary,
    tol: Tolerance,
    cap: DenseCap,
) -> Result<ParentHamiltonian> {
    if ell == 0 || ell > n {
        return Err(Error::ContractViolation(format!(
            "interaction length {ell} must satisfy 1 <= ell <= n = {n}"
        )));
    }
    let dim = cap.checked_dim(a.phys_dim(), n)?;
    if dim.saturating_mul(dim).saturating_mul(16) > MAX_OPERATOR_BYTES {
        return Err(Error::ResourceLimit(format!(
            "dense {dim} x {dim} operator exceeds the allocation guard"
        )));
    }
    let h = local_term(a, ell, tol, cap)?;
    let starts: Vec<usize> = match boundary {
        Boundary::Open => (0..=n - ell).collect(),
        Boundary::Periodic => (0..n).collect(),
    };
    let mut operator = CMatrix::zeros(dim, dim);
    for start in starts {
        add_embedded(&mut operator, &h, a.phys_dim(), ell, n, start);
    }
    let operator = (&operator + operator.adjoint()).scale(0.5);
    Ok(ParentHamiltonian {
        tensor: a.clone(),
        ell,
        n,
        boundary,
        operator,
    })
}

/// Ground energy and exact ground eigenspace. In the frustration-free case
/// the space is the kernel of the operator.
pub fn ground_space(h: &ParentHamiltonian, tol: Tolerance) -> Result<GroundSpaceResult> {
    let (eigenvalues, eigenvectors) = hermitian_eigen_sorted(&h.operator)?;
    if eigenvalues.is_empty() {
        return Err(Error::NumericalFailure("empty operator".into()));
    }
    let energy = eigenvalues[0];
    let norm = eigenvalues.iter().fold(0.0_f64, |a, &l| a.max(l.abs()));
    let frustration_free = energy <= tol.eig_zero * norm.max(1.0);
    let cut = if frustration_free {
        // kernel semantics: eigenvalues at most eig_zero times the largest
        tol.eig_zero * norm
    } else {
        energy + tol.eig_zero * norm.max(1.0)
    };
    let degeneracy = eigenvalues.iter().take_while(|&&l| l <= cut).count();
    let basis = eigenvectors.columns(0, degeneracy).into_owned();
    let space = Subspace::from_orthonormal(basis, tol)?;
    Ok(GroundSpaceResult {
        energy,
        space,
        frustration_free,
        degeneracy,
    })
}

/// Builds the parent Hamiltonian, solves for its ground space, and checks
/// mutual containment against the physical (open) or periodic (periodic) MPS
/// subspace.
pub fn verify_ground_equals_mps(
    a: &MpsTensor,
    ell: usize,
    n: usize,
    boundary: Boundary,
    tol: Tolerance,
    cap: DenseCap,
) -> Result<GroundComparison> {
    let h = build(a, ell, n, boundary, tol, cap)?;
    let gs = ground_space(&h, tol)?;
    let reference = match boundary {
        Boundary::Open => mps::physical_subspace(a, n, tol, cap)?,
        Boundary::Periodic => mps::periodic_subspace(a, n, tol, cap)?,
    };
    compare_ground_space(&gs, &reference)
}

/// Containment comparison between a computed ground space and a reference
/// subspace (usually an MPS subspace, possibly of a different tensor).
pub fn compare_ground_space(gs: &GroundSpaceResult, reference: &Subspace) -> Result<GroundComparison> {
    let r1 = containment_residual(&gs.space, reference)?;
    let r2 = containment_residual(reference, &gs.space)?;
    let max_residual = r1.max(r2);
    let tol = gs.space.tol().join(reference.tol());
    Ok(GroundComparison {
        equal: max_residual <= tol.eig_zero,
        gs_dim: gs.degeneracy,
        mps_dim: reference.dim(),
        max_residual,
        energy: gs.energy,
        frustration_free: gs.frustration_free,
    })
}
