//! Controllability/observability analysis and the refined canonical
//! transformations.
//!
//! The transform is built from constrained cyclic-subspace chains: for each
//! input column (output row) taken in caller order, the chain `b, Ab, A²b, …`
//! is extended while each new vector stays independent of everything
//! collected so far, and stops at the first dependence. Extending each
//! source maximally before moving on guarantees that the spilled vector
//! `A^len·b` lies in the span of the chains collected up to that point,
//! which is exactly what makes the transformed state matrix block
//! triangular with companion diagonal blocks.

use crate::error::{Error, Result};
use crate::matrix::{
    default_rank_tol, solve_linear, IncrementalRank, Matrix,
};
use crate::model::StateSpaceModel;

/// Whether a decomposition works on input columns or output rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainKind {
    Controller,
    Observer,
}

impl ChainKind {
    fn source_count(self, m: &StateSpaceModel) -> usize {
        match self {
            ChainKind::Controller => m.p(),
            ChainKind::Observer => m.q(),
        }
    }

    fn source_vector(self, m: &StateSpaceModel, j: usize) -> Vec<f64> {
        match self {
            ChainKind::Controller => m.b.col(j),
            ChainKind::Observer => m.c.row(j).to_vec(),
        }
    }

    /// One multiplication step along a chain: `A·v` for controller chains,
    /// `v·A` (as a row) for observer chains.
    fn advance(self, m: &StateSpaceModel, v: &[f64]) -> Vec<f64> {
        match self {
            ChainKind::Controller => m.a.mul_vec(v),
            ChainKind::Observer => {
                let n = m.n();
                (0..n)
                    .map(|k| (0..n).map(|i| v[i] * m.a[(i, k)]).sum())
                    .collect()
            }
        }
    }
}

/// One chain: which source generated it and how many vectors it contributed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub source: usize,
    pub length: usize,
}

/// Direct-sum decomposition of the state space into cyclic-subspace chains,
/// in discovery order.
#[derive(Clone, Debug)]
pub struct ChainDecomposition {
    pub kind: ChainKind,
    pub chains: Vec<Chain>,
    n: usize,
}

impl ChainDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of sources actually used.
    pub fn used_count(&self) -> usize {
        self.chains.len()
    }

    pub fn total_length(&self) -> usize {
        self.chains.iter().map(|c| c.length).sum()
    }
}

/// The controllability matrix `[B, AB, …, A^{n-1}B]`.
pub fn controllability_matrix(m: &StateSpaceModel) -> Matrix {
    let (n, p) = (m.n(), m.p());
    let mut out = Matrix::zeros(n, n * p);
    let mut power = m.b.clone();
    for k in 0..n {
        out.set_block(0, k * p, &power);
        if k + 1 < n {
            power = m.a.mul(&power);
        }
    }
    out
}

/// The observability matrix stacking `C, CA, …, CA^{n-1}`.
pub fn observability_matrix(m: &StateSpaceModel) -> Matrix {
    let (n, q) = (m.n(), m.q());
    let mut out = Matrix::zeros(n * q, n);
    let mut power = m.c.clone();
    for k in 0..n {
        out.set_block(k * q, 0, &power);
        if k + 1 < n {
            power = power.mul(&m.a);
        }
    }
    out
}

/// Default rank tolerance for chain building, derived from the
/// controllability or observability matrix of the model.
pub fn default_chain_tol(m: &StateSpaceModel, kind: ChainKind) -> f64 {
    match kind {
        ChainKind::Controller => default_rank_tol(&controllability_matrix(m)),
        ChainKind::Observer => default_rank_tol(&observability_matrix(m)),
    }
}

/// Greedily extract chains in `source_order`, extending each source
/// maximally before moving to the next.
///
/// Sources whose very first vector is already dependent are skipped; the
/// build succeeds when the chain lengths sum to `n` and fails with
/// [`Error::NotControllable`] / [`Error::NotObservable`] otherwise.
pub fn build_chains(
    m: &StateSpaceModel,
    kind: ChainKind,
    source_order: &[usize],
    tol: f64,
) -> Result<ChainDecomposition> {
    let count = kind.source_count(m);
    validate_permutation(source_order, count)?;
    let n = m.n();
    let mut inc = IncrementalRank::new(n, tol);
    let mut chains = Vec::new();

    for &j in source_order {
        if inc.rank() == n {
            break;
        }
        let mut v = kind.source_vector(m, j);
        if !inc.try_add(&v) {
            continue;
        }
        let mut length = 1;
        loop {
            v = kind.advance(m, &v);
            if !inc.try_add(&v) {
                break;
            }
            length += 1;
        }
        chains.push(Chain { source: j, length });
    }

    let total: usize = chains.iter().map(|c| c.length).sum();
    if total < n {
        let lengths = chains.iter().map(|c| (c.source, c.length)).collect();
        return Err(match kind {
            ChainKind::Controller => Error::NotControllable {
                achieved: total,
                n,
                lengths,
            },
            ChainKind::Observer => Error::NotObservable {
                achieved: total,
                n,
                lengths,
            },
        });
    }
    Ok(ChainDecomposition { kind, chains, n })
}

fn validate_permutation(order: &[usize], count: usize) -> Result<()> {
    if order.len() != count {
        return Err(Error::InvalidArgument(format!(
            "source order has {} entries, expected {}",
            order.len(),
            count
        )));
    }
    let mut seen = vec![false; count];
    for &j in order {
        if j >= count || seen[j] {
            return Err(Error::InvalidArgument(format!(
                "source order {:?} is not a permutation of 0..{}",
                order, count
            )));
        }
        seen[j] = true;
    }
    Ok(())
}

/// Position of one diagonal block in the transformed matrix layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpan {
    /// Input column / output row that generated the block.
    pub source: usize,
    /// First row/column of the block in the transformed matrix.
    pub start: usize,
    pub size: usize,
}

/// A canonical similarity transform together with the transformed model
/// matrices and the residuals of the structural validation.
#[derive(Clone, Debug)]
pub struct CanonicalTransform {
    pub kind: ChainKind,
    /// `P` (controller) or `Q` (observer).
    pub t: Matrix,
    pub t_inverse: Matrix,
    /// `P⁻¹AP` or `QAQ⁻¹`.
    pub transformed_a: Matrix,
    /// `P⁻¹B` (controller) or `CQ⁻¹` (observer).
    pub transformed_io: Matrix,
    /// Diagonal blocks in matrix layout order.
    pub blocks: Vec<BlockSpan>,
    pub condition: f64,
    /// Largest deviation from the block-triangular companion structure.
    pub form_residual: f64,
    pub warnings: Vec<String>,
}

impl CanonicalTransform {
    /// Cumulative block boundaries `[0, …, n]` in layout order.
    pub fn block_boundaries(&self) -> Vec<usize> {
        let mut b: Vec<usize> = self.blocks.iter().map(|bl| bl.start).collect();
        b.push(self.t.rows());
        b
    }

    /// Tolerance the structural residuals are judged against.
    pub fn form_tolerance(&self, a: &Matrix) -> f64 {
        form_tolerance(a, self.condition)
    }

    fn block_of(&self, index: usize) -> usize {
        self.blocks
            .iter()
            .rposition(|b| b.start <= index)
            .expect("index inside the matrix")
    }
}

/// Structural tolerance: residuals scale with the conditioning of the
/// transform.
pub fn form_tolerance(a: &Matrix, condition: f64) -> f64 {
    1e-8 * (1.0 + a.norm_max()) * (condition / 1e6).max(1.0)
}

/// Conditioning beyond this emits a warning on the transform (powers of A
/// make this common; designs may still verify).
pub const CONDITION_WARN_THRESHOLD: f64 = 1e12;

/// Assemble the transformation matrix for a chain decomposition, transform
/// the model, and validate the block-triangular companion structure.
///
/// Controller layout places the last-discovered chain leftmost and orders
/// each block `A^{len-1}b, …, Ab, b`; observer layout places the first
/// chain topmost with rows `c, cA, …, cA^{len-1}`.
pub fn assemble_transform(
    m: &StateSpaceModel,
    chains: &ChainDecomposition,
) -> Result<CanonicalTransform> {
    let n = m.n();
    assert_eq!(chains.total_length(), n, "chains must span the state space");
    let kind = chains.kind;

    let layout: Vec<&Chain> = match kind {
        ChainKind::Controller => chains.chains.iter().rev().collect(),
        ChainKind::Observer => chains.chains.iter().collect(),
    };
    let mut blocks = Vec::with_capacity(layout.len());
    let mut t = Matrix::zeros(n, n);
    let mut offset = 0;
    for chain in &layout {
        blocks.push(BlockSpan {
            source: chain.source,
            start: offset,
            size: chain.length,
        });
        let mut v = kind.source_vector(m, chain.source);
        for i in 0..chain.length {
            match kind {
                ChainKind::Controller => {
                    // highest power leftmost within the block
                    let col = offset + chain.length - 1 - i;
                    for r in 0..n {
                        t[(r, col)] = v[r];
                    }
                }
                ChainKind::Observer => {
                    let row = offset + i;
                    for c in 0..n {
                        t[(row, c)] = v[c];
                    }
                }
            }
            if i + 1 < chain.length {
                v = kind.advance(m, &v);
            }
        }
        offset += chain.length;
    }

    let map_singular = |e: Error| match e {
        Error::SingularMatrix { step, pivot, tol } => Error::SingularTransform(format!(
            "pivot {pivot:.3e} below {tol:.3e} at elimination step {step}"
        )),
        other => other,
    };
    let t_inverse = solve_linear(&t, &Matrix::identity(n)).map_err(map_singular)?;
    let condition = t.norm_inf() * t_inverse.norm_inf();

    // transform through solves rather than the explicit inverse
    let (transformed_a, transformed_io) = match kind {
        ChainKind::Controller => {
            let a_t = solve_linear(&t, &m.a.mul(&t)).map_err(map_singular)?;
            let b_t = solve_linear(&t, &m.b).map_err(map_singular)?;
            (a_t, b_t)
        }
        ChainKind::Observer => {
            let tt = t.transpose();
            let a_t = solve_linear(&tt, &t.mul(&m.a).transpose())
                .map_err(map_singular)?
                .transpose();
            let c_t = solve_linear(&tt, &m.c.transpose())
                .map_err(map_singular)?
                .transpose();
            (a_t, c_t)
        }
    };

    let mut warnings = Vec::new();
    if condition > CONDITION_WARN_THRESHOLD {
        warnings.push(format!(
            "transform condition {condition:.3e} exceeds {CONDITION_WARN_THRESHOLD:.0e}; results may lose accuracy"
        ));
    }

    let mut transform = CanonicalTransform {
        kind,
        t,
        t_inverse,
        transformed_a,
        transformed_io,
        blocks,
        condition,
        form_residual: 0.0,
        warnings,
    };
    let tol = transform.form_tolerance(&m.a);
    transform.form_residual = structural_residual(&transform, tol)?;
    Ok(transform)
}

/// Largest deviation of the transformed state matrix from the
/// block-triangular companion template; errors when it exceeds `tol`.
fn structural_residual(t: &CanonicalTransform, tol: f64) -> Result<f64> {
    let a = &t.transformed_a;
    let n = a.rows();
    let mut worst = 0.0f64;
    let mut check = |row: usize, col: usize, expected: f64, context: &str| -> Result<()> {
        let dev = (a[(row, col)] - expected).abs();
        if dev > tol {
            return Err(Error::FormViolation {
                row,
                col,
                value: a[(row, col)] - expected,
                tol,
                context: context.into(),
            });
        }
        worst = worst.max(dev);
        Ok(())
    };

    for r in 0..n {
        for c in 0..n {
            let br = t.block_of(r);
            let bc = t.block_of(c);
            let zero_side = match t.kind {
                ChainKind::Controller => br < bc, // block lower triangular
                ChainKind::Observer => br > bc,   // block upper triangular
            };
            if zero_side {
                check(r, c, 0.0, "off-triangular block")?;
            } else if br == bc {
                let block = &t.blocks[br];
                let (i, j) = (r - block.start, c - block.start);
                let free = match t.kind {
                    ChainKind::Controller => j == 0,
                    ChainKind::Observer => i == block.size - 1,
                };
                if !free {
                    let expected = if j == i + 1 { 1.0 } else { 0.0 };
                    check(r, c, expected, "companion block")?;
                }
            }
        }
    }
    Ok(worst)
}

/// Result of checking the transformed input/output matrix against its
/// special canonical pattern.
#[derive(Clone, Debug)]
pub struct SpecialFormReport {
    /// Largest deviation over the constrained (used-source) entries.
    pub max_deviation: f64,
    /// Sources without a chain; their columns/rows are unconstrained.
    pub unused_sources: Vec<usize>,
    /// Largest magnitude seen in the unconstrained columns/rows.
    pub unused_magnitude: f64,
}

/// Check `P⁻¹B` against the one-per-block trailing-unit pattern
/// (controller) or `CQ⁻¹` against the one-per-block leading-unit pattern
/// (observer). Only used sources are constrained.
pub fn validate_special_forms(t: &CanonicalTransform) -> Result<SpecialFormReport> {
    let io = &t.transformed_io;
    let n = t.t.rows();
    let source_count = match t.kind {
        ChainKind::Controller => io.cols(),
        ChainKind::Observer => io.rows(),
    };
    let tol = {
        // Same scaling rule as the state-matrix check; B/C entries are
        // O(1) after a valid transform, so the A-norm factor is dropped.
        1e-8 * (t.condition / 1e6).max(1.0)
    };

    let mut max_deviation = 0.0f64;
    for block in &t.blocks {
        for idx in 0..n {
            let (expected_at, value, row, col) = match t.kind {
                ChainKind::Controller => {
                    (block.start + block.size - 1, io[(idx, block.source)], idx, block.source)
                }
                ChainKind::Observer => (block.start, io[(block.source, idx)], block.source, idx),
            };
            let expected = if idx == expected_at { 1.0 } else { 0.0 };
            let dev = (value - expected).abs();
            if dev > tol {
                return Err(Error::FormViolation {
                    row,
                    col,
                    value: value - expected,
                    tol,
                    context: "special input/output form".into(),
                });
            }
            max_deviation = max_deviation.max(dev);
        }
    }

    let used: Vec<usize> = t.blocks.iter().map(|b| b.source).collect();
    let unused_sources: Vec<usize> = (0..source_count).filter(|j| !used.contains(j)).collect();
    let mut unused_magnitude = 0.0f64;
    for &j in &unused_sources {
        for idx in 0..n {
            let value = match t.kind {
                ChainKind::Controller => io[(idx, j)],
                ChainKind::Observer => io[(j, idx)],
            };
            unused_magnitude = unused_magnitude.max(value.abs());
        }
    }
    Ok(SpecialFormReport {
        max_deviation,
        unused_sources,
        unused_magnitude,
    })
}
