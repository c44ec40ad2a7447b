use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::{is_symmetric, Mat};
use crate::{Error, Result};

/// Matrix-valued affine expression `C + Σ y_k A_k` over the scalar decision vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMatrix {
    constant: Mat,
    /// Sorted by scalar index, no duplicates.
    terms: Vec<(usize, Mat)>,
}

impl AffineMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { constant: Mat::zeros(rows, cols), terms: Vec::new() }
    }

    pub fn constant(m: Mat) -> Self {
        Self { constant: m, terms: Vec::new() }
    }

    pub fn from_parts(constant: Mat, mut terms: Vec<(usize, Mat)>) -> Result<Self> {
        terms.sort_by_key(|t| t.0);
        if terms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Dimension("duplicate scalar index in affine expression".into()));
        }
        if terms.iter().any(|(_, m)| m.shape() != constant.shape()) {
            return Err(Error::Dimension("coefficient shape differs from constant".into()));
        }
        Ok(Self { constant, terms })
    }

    pub fn rows(&self) -> usize {
        self.constant.nrows()
    }

    pub fn cols(&self) -> usize {
        self.constant.ncols()
    }

    pub fn constant_part(&self) -> &Mat {
        &self.constant
    }

    pub fn terms(&self) -> &[(usize, Mat)] {
        &self.terms
    }

    fn map(&self, f: impl Fn(&Mat) -> Mat) -> Self {
        Self {
            constant: f(&self.constant),
            terms: self.terms.iter().map(|(k, m)| (*k, f(m))).collect(),
        }
    }

    pub fn mul_left(&self, lhs: &Mat) -> Self {
        self.map(|m| lhs * m)
    }

    pub fn mul_right(&self, rhs: &Mat) -> Self {
        self.map(|m| m * rhs)
    }

    pub fn transpose(&self) -> Self {
        self.map(|m| m.transpose())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|m| m * s)
    }

    pub fn sym(&self) -> Self {
        self.map(|m| (m + m.transpose()) * 0.5)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.constant.shape(), other.constant.shape(), "affine shapes differ");
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let a = self.terms.get(i);
            let b = other.terms.get(j);
            match (a, b) {
                (Some((ka, ma)), Some((kb, mb))) if ka == kb => {
                    terms.push((*ka, ma + mb));
                    i += 1;
                    j += 1;
                }
                (Some((ka, ma)), Some((kb, _))) if ka < kb => {
                    terms.push((*ka, ma.clone()));
                    i += 1;
                }
                (Some((ka, ma)), None) => {
                    terms.push((*ka, ma.clone()));
                    i += 1;
                }
                (_, Some((kb, mb))) => {
                    terms.push((*kb, mb.clone()));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Self { constant: &self.constant + &other.constant, terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn add_constant(&self, m: &Mat) -> Self {
        Self { constant: &self.constant + m, terms: self.terms.clone() }
    }

    /// Rows `row_idx` and columns `col_idx`.
    pub fn select(&self, row_idx: &[usize], col_idx: &[usize]) -> Self {
        self.map(|m| Mat::from_fn(row_idx.len(), col_idx.len(), |r, c| m[(row_idx[r], col_idx[c])]))
    }

    pub fn principal(&self, idx: &[usize]) -> Self {
        self.select(idx, idx)
    }

    /// Assembles a block matrix; every row of `grid` must have the same length and
    /// blocks in a grid row share their height.
    pub fn blocks(grid: &[Vec<AffineMatrix>]) -> Self {
        let heights: Vec<usize> = grid.iter().map(|row| row[0].rows()).collect();
        let widths: Vec<usize> = grid[0].iter().map(|b| b.cols()).collect();
        let (rows, cols) = (heights.iter().sum(), widths.iter().sum());
        let mut out = Self::zeros(rows, cols);
        let mut r0 = 0;
        for (row, h) in grid.iter().zip(&heights) {
            let mut c0 = 0;
            for (block, w) in row.iter().zip(&widths) {
                assert_eq!((block.rows(), block.cols()), (*h, *w), "block grid shape mismatch");
                let mut placed = Self::zeros(rows, cols);
                placed.constant.view_mut((r0, c0), (*h, *w)).copy_from(&block.constant);
                placed.terms = block
                    .terms
                    .iter()
                    .map(|(k, m)| {
                        let mut big = Mat::zeros(rows, cols);
                        big.view_mut((r0, c0), (*h, *w)).copy_from(m);
                        (*k, big)
                    })
                    .collect();
                out = out.add(&placed);
                c0 += w;
            }
            r0 += h;
        }
        out
    }

    pub fn eval(&self, y: &[f64]) -> Mat {
        let mut out = self.constant.clone();
        for (k, m) in &self.terms {
            out += m * y[*k];
        }
        out
    }

    fn is_symmetric(&self) -> bool {
        is_symmetric(&self.constant, 1e-12) && self.terms.iter().all(|(_, m)| is_symmetric(m, 1e-12))
    }

    /// Largest absolute entry over the constant and every coefficient.
    pub fn scale_factor(&self) -> f64 {
        let s = self.terms.iter().map(|(_, m)| m.amax()).fold(self.constant.amax(), f64::max);
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }
}

/// A (symmetric or rectangular) matrix unknown mapped onto a slice of the scalar vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixVariable {
    pub id: usize,
    pub rows: usize,
    pub cols: usize,
    pub symmetric: bool,
    pub offset: usize,
}

impl MatrixVariable {
    pub fn scalar_count(&self) -> usize {
        if self.symmetric {
            self.rows * (self.rows + 1) / 2
        } else {
            self.rows * self.cols
        }
    }

    /// Scalar index → matrix entries (upper triangle, row-major, for symmetric variables).
    fn entries(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.scalar_count());
        for r in 0..self.rows {
            let start = if self.symmetric { r } else { 0 };
            for c in start..self.cols {
                out.push((r, c));
            }
        }
        out
    }

    pub fn expr(&self) -> AffineMatrix {
        let terms = self
            .entries()
            .into_iter()
            .enumerate()
            .map(|(k, (r, c))| {
                let mut m = Mat::zeros(self.rows, self.cols);
                m[(r, c)] = 1.0;
                if self.symmetric {
                    m[(c, r)] = 1.0;
                }
                (self.offset + k, m)
            })
            .collect();
        AffineMatrix { constant: Mat::zeros(self.rows, self.cols), terms }
    }

    pub fn value(&self, y: &[f64]) -> Mat {
        let mut m = Mat::zeros(self.rows, self.cols);
        for (k, (r, c)) in self.entries().into_iter().enumerate() {
            m[(r, c)] = y[self.offset + k];
            if self.symmetric {
                m[(c, r)] = y[self.offset + k];
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Sense {
    /// Block ≻ 0.
    Positive,
    /// Block ≺ 0.
    Negative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmiBlock {
    pub label: String,
    pub expr: AffineMatrix,
    pub sense: Sense,
    /// Extra absolute margin demanded on top of the solver's relative one.
    pub shift: f64,
}

impl LmiBlock {
    /// The block mapped to `⪰ 0` form: `F` or `-F`, minus `shift · I`.
    pub(crate) fn oriented(&self) -> AffineMatrix {
        let base = match self.sense {
            Sense::Positive => self.expr.clone(),
            Sense::Negative => self.expr.scale(-1.0),
        };
        let n = base.rows();
        base.add_constant(&(Mat::identity(n, n) * -self.shift))
    }

    /// Signed margin of a value: smallest eigenvalue of the oriented block.
    pub fn margin_of(&self, value: &Mat) -> Result<BlockMargin> {
        let (min_eig, max_eig) = crate::linalg::eig_extremes(value)?;
        let margin = match self.sense {
            Sense::Positive => min_eig,
            Sense::Negative => -max_eig,
        } - self.shift;
        Ok(BlockMargin { min_eig, max_eig, margin })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SdpProblem {
    variables: Vec<MatrixVariable>,
    scalar_count: usize,
    blocks: Vec<LmiBlock>,
    objective: Option<Vec<f64>>,
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    fn add_variable(&mut self, rows: usize, cols: usize, symmetric: bool) -> MatrixVariable {
        let var = MatrixVariable { id: self.variables.len(), rows, cols, symmetric, offset: self.scalar_count };
        self.scalar_count += var.scalar_count();
        self.variables.push(var.clone());
        var
    }

    pub fn add_symmetric(&mut self, n: usize) -> MatrixVariable {
        self.add_variable(n, n, true)
    }

    pub fn add_matrix(&mut self, rows: usize, cols: usize) -> MatrixVariable {
        self.add_variable(rows, cols, false)
    }

    pub fn add_block(&mut self, label: impl Into<String>, expr: AffineMatrix, sense: Sense) -> Result<usize> {
        self.push_block(LmiBlock { label: label.into(), expr, sense, shift: 0.0 })
    }

    pub fn push_block(&mut self, block: LmiBlock) -> Result<usize> {
        let index = self.blocks.len();
        if block.expr.rows() != block.expr.cols() {
            return Err(Error::Dimension(alloc::format!("block {index} is not square")));
        }
        if block.expr.terms.iter().any(|(k, _)| *k >= self.scalar_count) {
            return Err(Error::Dimension(alloc::format!("block {index} refers to an unknown scalar")));
        }
        if !block.expr.is_symmetric() {
            return Err(Error::NotSymmetric { block: index });
        }
        self.blocks.push(block);
        Ok(index)
    }

    /// Minimise `Σ c_k y_k`.
    pub fn minimize(&mut self, cost: Vec<f64>) -> Result<()> {
        if cost.len() != self.scalar_count {
            return Err(Error::Dimension("objective length differs from scalar count".into()));
        }
        self.objective = Some(cost);
        Ok(())
    }

    /// Minimise the trace of a (scalar) variable's expression.
    pub fn minimize_trace(&mut self, var: &MatrixVariable) -> Result<()> {
        let mut cost = alloc::vec![0.0; self.scalar_count];
        for (k, m) in var.expr().terms {
            cost[k] = m.trace();
        }
        self.minimize(cost)
    }

    pub fn from_parts(
        variables: Vec<MatrixVariable>,
        blocks: Vec<LmiBlock>,
        objective: Option<Vec<f64>>,
    ) -> Result<Self> {
        let mut p = Self::new();
        for v in &variables {
            let got = p.add_variable(v.rows, v.cols, v.symmetric);
            if got != *v {
                return Err(Error::Dimension(alloc::format!("variable {} layout is inconsistent", v.id)));
            }
        }
        for b in blocks {
            p.push_block(b)?;
        }
        if let Some(c) = objective {
            p.minimize(c)?;
        }
        Ok(p)
    }

    pub fn variables(&self) -> &[MatrixVariable] {
        &self.variables
    }

    pub fn blocks(&self) -> &[LmiBlock] {
        &self.blocks
    }

    pub fn objective(&self) -> Option<&[f64]> {
        self.objective.as_deref()
    }

    pub fn scalar_count(&self) -> usize {
        self.scalar_count
    }

    /// Scales one block by a positive factor; feasibility is unchanged.
    pub fn scale_block(&mut self, index: usize, factor: f64) {
        let b = &mut self.blocks[index];
        b.expr = b.expr.scale(factor);
        b.shift *= factor;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    NumericalFailure,
}

impl SolveStatus {
    pub fn is_solved(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }
}

impl core::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NumericalFailure => "numerical-failure",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockMargin {
    pub min_eig: f64,
    pub max_eig: f64,
    /// Positive when the block has the required sign.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub status: SolveStatus,
    pub values: Vec<f64>,
    pub margins: Vec<BlockMargin>,
    /// Largest uniform normalized margin found by the feasibility phase.
    pub feasibility_margin: f64,
    pub objective: Option<f64>,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn value(&self, var: &MatrixVariable) -> Mat {
        var.value(&self.values)
    }

    /// Index of the first block whose re-verified margin is not positive.
    pub fn first_violation(&self) -> Option<usize> {
        self.margins.iter().position(|m| !(m.margin > 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn symmetric_variable_roundtrip() {
        let mut p = SdpProblem::new();
        let x = p.add_symmetric(3);
        let y: Vec<f64> = (0..6).map(|k| k as f64).collect();
        let v = x.value(&y);
        assert_eq!(v, x.expr().eval(&y));
        assert_eq!(v[(0, 2)], 2.0);
        assert_eq!(v[(2, 0)], 2.0);
        assert_eq!(v[(2, 2)], 5.0);
    }

    #[test]
    fn block_assembly_and_principal() {
        let mut p = SdpProblem::new();
        let x = p.add_symmetric(2);
        let m = p.add_matrix(1, 2);
        let y = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let top = vec![x.expr(), m.expr().transpose()];
        let bottom = vec![m.expr(), AffineMatrix::constant(Mat::from_element(1, 1, -1.0))];
        let big = AffineMatrix::blocks(&[top, bottom]);
        let v = big.eval(&y);
        assert_eq!(v.shape(), (3, 3));
        assert_eq!(v[(2, 0)], 4.0);
        assert_eq!(v[(0, 2)], 4.0);
        assert_eq!(v[(2, 2)], -1.0);
        assert_eq!(big.principal(&[0, 2]).eval(&y)[(1, 0)], 4.0);
    }

    #[test]
    fn rejects_asymmetric_block() {
        let mut p = SdpProblem::new();
        let m = p.add_matrix(2, 2);
        assert_eq!(p.add_block("bad", m.expr(), Sense::Positive), Err(Error::NotSymmetric { block: 0 }));
        assert!(p.minimize(vec![1.0]).is_err());
    }
}
