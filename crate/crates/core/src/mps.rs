//! MPS tensors, their contracted states, and the subspaces they generate.
//!
//! An MPS tensor is a family of `d` complex `D x D` matrices `A_0 .. A_{d-1}`.
//! Against a boundary matrix `X` it produces the `n`-site state with
//! amplitudes `Tr(X A_{i_1} ... A_{i_n})`, where site 1 is the most
//! significant digit of the amplitude index. The physical subspace on `n`
//! sites is the span of these states over all boundaries; the virtual
//! subspace at length `j` is the span of all length-`j` matrix products
//! inside the `D x D` matrix space (flattened column-major to dimension
//! `D^2`).

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, intersect, orthonormal_basis, CMatrix, CVector, DenseCap, Subspace, Tolerance,
};

/// A family of `d` complex `D x D` matrices. At least one matrix must be
/// nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct MpsTensor {
    phys_dim: usize,
    bond_dim: usize,
    matrices: Vec<CMatrix>,
}

impl MpsTensor {
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::InvalidTensor("physical dimension is zero".into()));
        }
        let bond_dim = matrices[0].nrows();
        if bond_dim == 0 {
            return Err(Error::InvalidTensor("bond dimension is zero".into()));
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.nrows() != bond_dim || m.ncols() != bond_dim {
                return Err(Error::InvalidTensor(format!(
                    "matrix {i} is {} x {}, expected {bond_dim} x {bond_dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        if matrices
            .iter()
            .all(|m| m.iter().all(|z| z.re == 0.0 && z.im == 0.0))
        {
            return Err(Error::InvalidTensor("all matrices are zero".into()));
        }
        Ok(MpsTensor {
            phys_dim: matrices.len(),
            bond_dim,
            matrices,
        })
    }

    /// Physical dimension `d`.
    pub fn phys_dim(&self) -> usize {
        self.phys_dim
    }

    /// Bond dimension `D`.
    pub fn bond_dim(&self) -> usize {
        self.bond_dim
    }

    pub fn matrix(&self, i: usize) -> &CMatrix {
        &self.matrices[i]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }
}

/// A dense state on `n` sites of local dimension `d`; amplitude index order
/// is big-endian in the site index (site 1 is the most significant digit).
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    sites: usize,
    local_dim: usize,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(sites: usize, local_dim: usize, amplitudes: CVector) -> Result<Self> {
        let expected = local_dim
            .checked_pow(sites.try_into().map_err(|_| {
                Error::ResourceLimit(format!("site count {sites} out of range"))
            })?)
            .ok_or_else(|| Error::ResourceLimit("d^n overflows usize".into()))?;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "amplitude vector has length {}, expected {expected}",
                amplitudes.len()
            )));
        }
        Ok(StateVector {
            sites,
            local_dim,
            amplitudes,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// Contracts one site family into every amplitude block below `prefix`.
fn fill_amplitudes(
    prefix: &CMatrix,
    site: usize,
    families: &[&[CMatrix]],
    out: &mut [Complex64],
) {
    if site == families.len() {
        out[0] = prefix.trace();
        return;
    }
    let d = families[site].len();
    let block = out.len() / d;
    for (i, m) in families[site].iter().enumerate() {
        let next = prefix * m;
        fill_amplitudes(&next, site + 1, families, &mut out[i * block..(i + 1) * block]);
    }
}

/// The state with amplitudes `Tr(X M^{(1)}_{i_1} ... M^{(n)}_{i_n})` for a
/// chain with an independent matrix family per site. All families must share
/// one physical dimension and match the boundary's bond dimension.
pub fn chain_state(
    x: &CMatrix,
    site_families: &[&[CMatrix]],
    cap: DenseCap,
) -> Result<StateVector> {
    let n = site_families.len();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty chain".into()));
    }
    let d = site_families[0].len();
    let bond = x.nrows();
    if x.ncols() != bond {
        return Err(Error::DimensionMismatch("boundary matrix is not square".into()));
    }
    for family in site_families {
        if family.len() != d {
            return Err(Error::DimensionMismatch(
                "site families have different physical dimensions".into(),
            ));
        }
        for m in *family {
            if m.nrows() != bond || m.ncols() != bond {
                return Err(Error::DimensionMismatch(format!(
                    "site matrix is {} x {}, expected {bond} x {bond}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
    }
    let dim = cap.checked_dim(d, n)?;
    let mut amplitudes = CVector::zeros(dim);
    fill_amplitudes(x, 0, site_families, amplitudes.as_mut_slice());
    StateVector::new(n, d, amplitudes)
}

/// The `n`-site MPS with boundary `X`: amplitudes `Tr(X A_{i_1} ... A_{i_n})`.
pub fn mps_state(a: &MpsTensor, x: &CMatrix, n: usize, cap: DenseCap) -> Result<StateVector> {
    if n == 0 {
        return Err(Error::ContractViolation("site count must be at least 1".into()));
    }
    if x.nrows() != a.bond_dim() || x.ncols() != a.bond_dim() {
        return Err(Error::DimensionMismatch(format!(
            "boundary is {} x {}, tensor bond dimension is {}",
            x.nrows(),
            x.ncols(),
            a.bond_dim()
        )));
    }
    let families: Vec<&[CMatrix]> = (0..n).map(|_| a.matrices()).collect();
    chain_state(x, &families, cap)
}

/// The matrix unit `|mu><nu|` in `D x D`.
pub fn matrix_unit(bond: usize, mu: usize, nu: usize) -> CMatrix {
    let mut m = CMatrix::zeros(bond, bond);
    m[(mu, nu)] = Complex64::ONE;
    m
}

/// The physical MPS subspace on `n` sites: the span of the boundary states
/// over the `D^2` matrix units, taken in row-major `(mu, nu)` order before
/// orthonormalization. Its dimension is at most `D^2`.
pub fn physical_subspace(
    a: &MpsTensor,
    n: usize,
    tol: Tolerance,
    cap: DenseCap,
) -> Result<Subspace> {
    let dim = cap.checked_dim(a.phys_dim(), n)?;
    let bond = a.bond_dim();
    let mut states = Vec::with_capacity(bond * bond);
    for mu in 0..bond {
        for nu in 0..bond {
            let x = matrix_unit(bond, mu, nu);
            states.push(mps_state(a, &x, n, cap)?.into_amplitudes());
        }
    }
    orthonormal_basis(dim, &states, tol)
}

/// Orthonormalized span of all pairwise products of two families of matrices,
/// flattened into the `D^2` matrix space.
fn product_span(left: &Subspace, right: &Subspace, bond: usize, tol: Tolerance) -> Result<Subspace> {
    if left.is_zero() || right.is_zero() {
        return Ok(Subspace::zero(bond * bond, tol));
    }
    let lmats: Vec<CMatrix> = left
        .basis_vectors()
        .map(|v| linalg::unvectorize(&v, bond, bond))
        .collect::<Result<_>>()?;
    let rmats: Vec<CMatrix> = right
        .basis_vectors()
        .map(|v| linalg::unvectorize(&v, bond, bond))
        .collect::<Result<_>>()?;
    let mut products = Vec::with_capacity(lmats.len() * rmats.len());
    for l in &lmats {
        for r in &rmats {
            products.push(linalg::vectorize(&(l * r)));
        }
    }
    orthonormal_basis(bond * bond, &products, tol)
}

/// The virtual MPS subspace at length `j`: the span, inside the flattened
/// `D x D` matrix space, of all length-`j` products of the tensor's matrices.
/// Computed by repeated squaring on subspace bases, so the cost grows with
/// `log j`.
pub fn virtual_subspace(a: &MpsTensor, j: usize, tol: Tolerance) -> Result<Subspace> {
    if j == 0 {
        return Err(Error::ContractViolation("length must be at least 1".into()));
    }
    let bond = a.bond_dim();
    let v1 = orthonormal_basis(
        bond * bond,
        &a.matrices().iter().map(linalg::vectorize).collect::<Vec<_>>(),
        tol,
    )?;
    let mut result: Option<Subspace> = None;
    let mut base = v1;
    let mut exponent = j;
    loop {
        if exponent & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => product_span(&r, &base, bond, tol)?,
            });
        }
        exponent >>= 1;
        if exponent == 0 {
            break;
        }
        base = product_span(&base, &base, bond, tol)?;
    }
    Ok(result.expect("j >= 1"))
}

/// Cyclic translation: site contents move one site to the right, the last
/// site wraps to the front.
pub fn translate(v: &StateVector) -> StateVector {
    StateVector {
        sites: v.sites,
        local_dim: v.local_dim,
        amplitudes: translate_amplitudes(&v.amplitudes, v.local_dim),
    }
}

fn translate_amplitudes(v: &CVector, local_dim: usize) -> CVector {
    if v.len() <= 1 || local_dim <= 1 {
        return v.clone();
    }
    let block = v.len() / local_dim;
    let mut out = CVector::zeros(v.len());
    for t in 0..v.len() {
        out[(t % local_dim) * block + t / local_dim] = v[t];
    }
    out
}

/// Conjugates an operator on `n` sites by the cyclic translation:
/// `tau M tau^{-1}`.
pub fn translate_operator(m: &CMatrix, local_dim: usize, n: usize) -> Result<CMatrix> {
    let dim = m.nrows();
    if m.ncols() != dim {
        return Err(Error::DimensionMismatch("operator is not square".into()));
    }
    let expected = local_dim
        .checked_pow(n as u32)
        .ok_or_else(|| Error::ResourceLimit("d^n overflows usize".into()))?;
    if dim != expected {
        return Err(Error::DimensionMismatch(format!(
            "operator dimension {dim} is not {local_dim}^{n}"
        )));
    }
    if dim <= 1 || local_dim <= 1 {
        return Ok(m.clone());
    }
    let block = dim / local_dim;
    // tau |t> = |p(t)>; (tau M tau^{-1})[r, c] = M[p^{-1}(r), p^{-1}(c)]
    let pre = |s: usize| (s % block) * local_dim + s / block;
    let mut out = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            out[(r, c)] = m[(pre(r), pre(c))];
        }
    }
    Ok(out)
}

fn translate_subspace(s: &Subspace, local_dim: usize) -> Result<Subspace> {
    let columns: Vec<CVector> = s
        .basis_vectors()
        .map(|v| translate_amplitudes(&v, local_dim))
        .collect();
    if columns.is_empty() {
        return Ok(s.clone());
    }
    Subspace::from_orthonormal(CMatrix::from_columns(&columns), s.tol())
}

/// The largest translation-invariant subspace of the physical MPS subspace:
/// the intersection of all cyclic translates of it.
pub fn periodic_subspace(
    a: &MpsTensor,
    n: usize,
    tol: Tolerance,
    cap: DenseCap,
) -> Result<Subspace> {
    let s = physical_subspace(a, n, tol, cap)?;
    let mut acc = s.clone();
    let mut translated = s;
    for _ in 1..n {
        translated = translate_subspace(&translated, a.phys_dim())?;
        acc = intersect(&acc, &translated)?;
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// Gauge conjugation: the tensor with matrices `T A_i T^{-1}`. `T` must be
/// invertible with condition number below `1 / eig_zero`.
pub fn conjugate(a: &MpsTensor, t: &CMatrix, tol: Tolerance) -> Result<MpsTensor> {
    let bond = a.bond_dim();
    if t.nrows() != bond || t.ncols() != bond {
        return Err(Error::DimensionMismatch(format!(
            "gauge matrix is {} x {}, tensor bond dimension is {bond}",
            t.nrows(),
            t.ncols()
        )));
    }
    let svd = t
        .clone()
        .try_svd(false, false, f64::EPSILON, 1_000_000)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let sigma_max = svd.singular_values.max();
    let sigma_min = svd.singular_values.min();
    if sigma_min <= 0.0 || sigma_max / sigma_min >= 1.0 / tol.eig_zero {
        return Err(Error::ContractViolation(format!(
            "gauge matrix is singular or ill-conditioned (sigma_min = {sigma_min:.3e})"
        )));
    }
    let inv = t
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::ContractViolation("gauge matrix is not invertible".into()))?;
    let matrices = a.matrices().iter().map(|m| t * m * &inv).collect();
    MpsTensor::new(matrices)
}

/// Block-diagonal direct sum of two tensors with the same physical dimension.
pub fn direct_sum(a: &MpsTensor, b: &MpsTensor) -> Result<MpsTensor> {
    if a.phys_dim() != b.phys_dim() {
        return Err(Error::DimensionMismatch(format!(
            "physical dimensions differ: {} vs {}",
            a.phys_dim(),
            b.phys_dim()
        )));
    }
    let (da, db) = (a.bond_dim(), b.bond_dim());
    let matrices = a
        .matrices()
        .iter()
        .zip(b.matrices())
        .map(|(ma, mb)| {
            let mut m = CMatrix::zeros(da + db, da + db);
            m.view_mut((0, 0), (da, da)).copy_from(ma);
            m.view_mut((da, da), (db, db)).copy_from(mb);
            m
        })
        .collect();
    MpsTensor::new(matrices)
}

/// Entrywise transpose of every matrix (no conjugation).
pub fn transpose_tensor(a: &MpsTensor) -> MpsTensor {
    MpsTensor {
        phys_dim: a.phys_dim,
        bond_dim: a.bond_dim,
        matrices: a.matrices.iter().map(|m| m.transpose()).collect(),
    }
}

/// Result of splitting a tensor along an invariant projector: the
/// block-normal tensor plus the moving-wave remainder, which together
/// reproduce every boundary state of the original tensor.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub block_normal: MpsTensor,
    pub wave: MovingWave,
}

/// The moving-wave remainder of a block decomposition: a superposition over
/// the position of a single hop from the upper block to the lower one.
#[derive(Clone, Debug)]
pub struct MovingWave {
    upper: Vec<CMatrix>,
    hop: Vec<CMatrix>,
    lower: Vec<CMatrix>,
    projector: CMatrix,
    complement: CMatrix,
    local_dim: usize,
}

impl MovingWave {
    /// The sum over hop positions `l = 1 .. n-1` of the chain states with
    /// boundary `P⊥ X P`, `l-1` upper-block sites, one hop site, and `n-l`
    /// lower-block sites. Empty for `n = 1`.
    pub fn state(&self, x: &CMatrix, n: usize, cap: DenseCap) -> Result<StateVector> {
        let bond = self.projector.nrows();
        if x.nrows() != bond || x.ncols() != bond {
            return Err(Error::DimensionMismatch(format!(
                "boundary is {} x {}, expected {bond} x {bond}",
                x.nrows(),
                x.ncols()
            )));
        }
        if n == 0 {
            return Err(Error::ContractViolation("site count must be at least 1".into()));
        }
        let dim = cap.checked_dim(self.local_dim, n)?;
        let boundary = &self.complement * x * &self.projector;
        let mut total = CVector::zeros(dim);
        for l in 1..n {
            let mut families: Vec<&[CMatrix]> = Vec::with_capacity(n);
            for _ in 0..l - 1 {
                families.push(&self.upper);
            }
            families.push(&self.hop);
            for _ in 0..n - l {
                families.push(&self.lower);
            }
            total += chain_state(&boundary, &families, cap)?.into_amplitudes();
        }
        StateVector::new(n, self.local_dim, total)
    }
}

/// Splits `A` along an invariant projector `P` (idempotent, with
/// `A_i P = P A_i P` for every `i`) into the block-normal tensor with
/// matrices `P A_i P + P⊥ A_i P⊥` and the moving-wave remainder, so that
/// for every boundary `X` and length `n`:
/// `state(A, X, n) = state(B, X, n) + wave.state(X, n)`.
pub fn block_decompose(a: &MpsTensor, p: &CMatrix, tol: Tolerance) -> Result<BlockDecomposition> {
    let bond = a.bond_dim();
    if p.nrows() != bond || p.ncols() != bond {
        return Err(Error::DimensionMismatch(format!(
            "projector is {} x {}, tensor bond dimension is {bond}",
            p.nrows(),
            p.ncols()
        )));
    }
    let p_scale = p.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
    let idem_dev = (p * p - p).iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if idem_dev > tol.eig_zero * p_scale {
        return Err(Error::ContractViolation(format!(
            "P is not a projector (||P^2 - P|| = {idem_dev:.3e})"
        )));
    }
    let complement = CMatrix::identity(bond, bond) - p;
    for (i, m) in a.matrices().iter().enumerate() {
        let scale = m.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
        let dev = (m * p - p * m * p)
            .iter()
            .fold(0.0_f64, |acc, z| acc.max(z.norm()));
        if dev > tol.eig_zero * scale {
            return Err(Error::ContractViolation(format!(
                "P is not invariant: A_{i} P != P A_{i} P (deviation {dev:.3e})"
            )));
        }
    }
    let upper: Vec<CMatrix> = a.matrices().iter().map(|m| p * m * p).collect();
    let hop: Vec<CMatrix> = a.matrices().iter().map(|m| p * m * &complement).collect();
    let lower: Vec<CMatrix> = a
        .matrices()
        .iter()
        .map(|m| &complement * m * &complement)
        .collect();
    let block_matrices: Vec<CMatrix> = upper.iter().zip(&lower).map(|(u, l)| u + l).collect();
    let block_normal = MpsTensor::new(block_matrices).map_err(|_| {
        Error::ConstructionFailure("block-normal tensor vanishes identically".into())
    })?;
    Ok(BlockDecomposition {
        block_normal,
        wave: MovingWave {
            upper,
            hop,
            lower,
            projector: p.clone(),
            complement,
            local_dim: a.phys_dim(),
        },
    })
}
