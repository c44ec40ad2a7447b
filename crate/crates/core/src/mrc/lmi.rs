use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{AugmentedModel, SynthesisSpec};
use crate::linalg::{inverse, Mat};
use crate::sdp::{AffineMatrix, MatrixVariable, SdpProblem, Sense};
use crate::{Error, Result};

/// Constraint family of an assembled block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmiFamily {
    Positivity,
    DecayMin,
    DecayMax,
    Cone,
    BoundedReal,
}

impl LmiFamily {
    pub fn name(self) -> &'static str {
        match self {
            LmiFamily::Positivity => "positivity",
            LmiFamily::DecayMin => "decay-min",
            LmiFamily::DecayMax => "decay-max",
            LmiFamily::Cone => "cone",
            LmiFamily::BoundedReal => "bounded-real",
        }
    }
}

impl core::fmt::Display for LmiFamily {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// The assembled problem together with the handles needed to read gains back.
///
/// `X` is block diagonal between the shaped coordinates (plant and integrators)
/// and the reference-model coordinates. Pole-region blocks constrain only the
/// shaped part; the reference poles are fixed by construction and need not lie
/// in the region.
#[derive(Debug, Clone)]
pub struct MrcLmi {
    pub problem: SdpProblem,
    pub x_shaped: MatrixVariable,
    pub x_reference: MatrixVariable,
    pub m: Vec<MatrixVariable>,
    pub gamma_sq: Option<MatrixVariable>,
    pub families: Vec<LmiFamily>,
    pub pairs: Vec<(usize, usize)>,
    shaped: Vec<usize>,
    reference: Vec<usize>,
}

impl MrcLmi {
    pub fn x_value(&self, y: &[f64]) -> Mat {
        let n = self.shaped.len() + self.reference.len();
        let mut x = Mat::zeros(n, n);
        let xs = self.x_shaped.value(y);
        let xr = self.x_reference.value(y);
        for (a, &i) in self.shaped.iter().enumerate() {
            for (b, &j) in self.shaped.iter().enumerate() {
                x[(i, j)] = xs[(a, b)];
            }
        }
        for (a, &i) in self.reference.iter().enumerate() {
            for (b, &j) in self.reference.iter().enumerate() {
                x[(i, j)] = xr[(a, b)];
            }
        }
        x
    }

    /// `K_j = M_j X⁻¹`.
    pub fn gains(&self, y: &[f64]) -> Result<Vec<Mat>> {
        let x_inv = inverse(&self.x_value(y))?;
        Ok(self.m.iter().map(|m| m.value(y) * &x_inv).collect())
    }

    pub fn gamma(&self, y: &[f64], spec: &SynthesisSpec) -> f64 {
        match &self.gamma_sq {
            Some(g) => g.value(y)[(0, 0)].max(0.0).sqrt(),
            None => spec.gamma,
        }
    }
}

fn embedding(rows: usize, idx: &[usize]) -> Mat {
    let mut p = Mat::zeros(rows, idx.len());
    for (k, &i) in idx.iter().enumerate() {
        p[(i, k)] = 1.0;
    }
    p
}

fn scaled_identity(n: usize, s: f64) -> AffineMatrix {
    AffineMatrix::constant(Mat::identity(n, n) * s)
}

/// Builds the positivity, decay, cone and bounded-real blocks for every active pair.
/// `spec` is not validated here so that degenerate regions can be posed.
pub fn assemble_lmis(aug: &[AugmentedModel], pairs: &[(usize, usize)], spec: &SynthesisSpec) -> Result<MrcLmi> {
    if pairs.is_empty() {
        return Err(Error::EmptyPairs);
    }
    let first = aug.first().ok_or(Error::EmptyPairs)?;
    let (n, m, w, q) = (first.states(), first.inputs(), first.e.ncols(), first.c.nrows());
    if aug.iter().any(|a| a.a.shape() != first.a.shape() || a.b.shape() != first.b.shape() || a.c.shape() != first.c.shape())
    {
        return Err(Error::Dimension("augmented submodels differ in shape".into()));
    }
    if let Some(&(i, j)) = pairs.iter().find(|(i, j)| *i >= aug.len() || *j >= aug.len()) {
        return Err(Error::Dimension(alloc::format!("pair ({i}, {j}) outside {} submodels", aug.len())));
    }

    let shaped = first.shaped_indices();
    let reference = first.reference_indices();
    let mut problem = SdpProblem::new();
    let x_shaped = problem.add_symmetric(shaped.len());
    let x_reference = problem.add_symmetric(reference.len());
    let m_vars: Vec<MatrixVariable> = (0..aug.len()).map(|_| problem.add_matrix(m, n)).collect();
    let gamma_sq = (!spec.fixed_gamma).then(|| problem.add_symmetric(1));

    let ps = embedding(n, &shaped);
    let pr = embedding(n, &reference);
    let x = x_shaped
        .expr()
        .mul_left(&ps)
        .mul_right(&ps.transpose())
        .add(&x_reference.expr().mul_left(&pr).mul_right(&pr.transpose()));
    let xs = x_shaped.expr();

    let neg_gamma_sq = match &gamma_sq {
        Some(g) => AffineMatrix::from_parts(Mat::zeros(w, w), vec![(g.offset, -Mat::identity(w, w))])?,
        None => scaled_identity(w, -spec.gamma * spec.gamma),
    };
    let region = spec.region();
    let (sin, cos) = (region.half_angle.sin(), region.half_angle.cos());

    let mut families = Vec::with_capacity(1 + 4 * pairs.len());
    let mut add = |problem: &mut SdpProblem, family: LmiFamily, label: String, expr: AffineMatrix, sense| {
        families.push(family);
        problem.add_block(label, expr, sense)
    };
    add(&mut problem, LmiFamily::Positivity, "positivity".to_string(), x.clone(), Sense::Positive)?;

    let m_exprs: Vec<AffineMatrix> = m_vars.iter().map(|v| v.expr()).collect();
    for &(i, j) in pairs {
        let sys = &aug[i];
        let ax = x.mul_left(&sys.a).sub(&m_exprs[j].mul_left(&sys.b));
        let phi = ax.add(&ax.transpose());
        let psi = ax.sub(&ax.transpose());
        let phi_s = phi.principal(&shaped);
        let psi_s = psi.principal(&shaped);
        let tag = |f: LmiFamily| alloc::format!("{f} ({i},{j})");

        add(
            &mut problem,
            LmiFamily::DecayMin,
            tag(LmiFamily::DecayMin),
            phi_s.add(&xs.scale(2.0 * spec.alpha_min)),
            Sense::Negative,
        )?;
        add(
            &mut problem,
            LmiFamily::DecayMax,
            tag(LmiFamily::DecayMax),
            phi_s.add(&xs.scale(2.0 * spec.alpha_max)),
            Sense::Positive,
        )?;
        let cone = AffineMatrix::blocks(&[
            vec![phi_s.scale(sin), psi_s.scale(cos)],
            vec![psi_s.scale(-cos), phi_s.scale(sin)],
        ]);
        add(&mut problem, LmiFamily::Cone, tag(LmiFamily::Cone), cone, Sense::Negative)?;

        let xc = x.mul_right(&sys.c.transpose());
        let bounded_real = AffineMatrix::blocks(&[
            vec![phi, AffineMatrix::constant(sys.e.clone()), xc.clone()],
            vec![AffineMatrix::constant(sys.e.transpose()), neg_gamma_sq.clone(), AffineMatrix::zeros(w, q)],
            vec![xc.transpose(), AffineMatrix::zeros(q, w), scaled_identity(q, -1.0)],
        ]);
        add(&mut problem, LmiFamily::BoundedReal, tag(LmiFamily::BoundedReal), bounded_real, Sense::Negative)?;
    }
    if let Some(g) = &gamma_sq {
        problem.minimize_trace(g)?;
    }
    Ok(MrcLmi { problem, x_shaped, x_reference, m: m_vars, gamma_sq, families, pairs: pairs.to_vec(), shaped, reference })
}
