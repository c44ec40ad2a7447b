//! Infeasible-start primal-dual interior-point method (HKM direction with
//! Mehrotra predictor-corrector) for problems in the dual form
//!
//! ```text
//! maximise bᵀy  subject to  C_k - Σ_i y_i A_ki ⪰ 0,   c - A y ≥ 0.
//! ```
//!
//! LMI problems are solved in two phases. The feasibility phase maximises a
//! uniform margin `t` on every block normalized by its own scale, inside a box
//! `|y_i| ≤ R`; the problem is feasible when `t* > 0`. When an objective is
//! present, a second phase minimises it with every block held at its margin.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DVector, SymmetricEigen};

use super::problem::{AffineMatrix, SdpProblem, SdpSolution, SolveStatus};
use crate::linalg::{cholesky, sym, Mat};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Strictness margin relative to each block's scale.
    pub margin: f64,
    /// Bound on every scalar unknown.
    pub box_radius: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 100, margin: 1e-7, box_radius: 1e4 }
    }
}

struct DenseBlock {
    c: Mat,
    a: Vec<(usize, Mat)>,
}

#[derive(Default)]
struct LinearRows {
    c: Vec<f64>,
    a: Vec<Vec<(usize, f64)>>,
}

struct DualForm {
    b: DVector<f64>,
    dense: Vec<DenseBlock>,
    lp: LinearRows,
}

struct Outcome {
    y: DVector<f64>,
    converged: bool,
    iterations: usize,
}

struct Iterate {
    x: Vec<Mat>,
    z: Vec<Mat>,
    y: DVector<f64>,
    xl: DVector<f64>,
    zl: DVector<f64>,
}

struct Direction {
    dx: Vec<Mat>,
    dz: Vec<Mat>,
    dy: DVector<f64>,
    dxl: DVector<f64>,
    dzl: DVector<f64>,
}

impl DualForm {
    fn m(&self) -> usize {
        self.b.len()
    }

    /// `C_k - Σ y_i A_ki`.
    fn slack(&self, k: usize, y: &DVector<f64>) -> Mat {
        let blk = &self.dense[k];
        let mut s = blk.c.clone();
        for (i, a) in &blk.a {
            s -= a * y[*i];
        }
        s
    }

    fn slack_lp(&self, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.lp.c.len(),
            self.lp.c.iter().zip(&self.lp.a).map(|(c, row)| c - row.iter().map(|(i, a)| a * y[*i]).sum::<f64>()),
        )
    }
}

fn max_step(x: &Mat, dx: &Mat) -> f64 {
    let Some(chol) = cholesky(x) else {
        return 0.0;
    };
    let l = chol.l();
    let Some(half) = l.solve_lower_triangular(dx) else {
        return 0.0;
    };
    let Some(w) = l.solve_lower_triangular(&half.transpose()) else {
        return 0.0;
    };
    let lmin = SymmetricEigen::new(sym(&w)).eigenvalues.min();
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

fn max_step_lp(x: &DVector<f64>, dx: &DVector<f64>) -> f64 {
    x.iter()
        .zip(dx.iter())
        .filter(|(_, d)| **d < 0.0)
        .map(|(v, d)| -v / d)
        .fold(f64::INFINITY, f64::min)
}

fn interior_point(form: &DualForm, opts: &SolveOptions) -> Outcome {
    let m = form.m();
    let n_lp = form.lp.c.len();
    let total_dim: usize = form.dense.iter().map(|b| b.c.nrows()).sum::<usize>() + n_lp;
    let b_norm = form.b.norm();
    let c_norm = (form.dense.iter().map(|b| b.c.norm_squared()).sum::<f64>()
        + form.lp.c.iter().map(|v| v * v).sum::<f64>())
    .sqrt();

    let mut it = {
        let mut x = Vec::with_capacity(form.dense.len());
        let mut z = Vec::with_capacity(form.dense.len());
        for blk in &form.dense {
            let n = blk.c.nrows() as f64;
            let mut xi = 10.0_f64.max(n.sqrt());
            let mut eta = 10.0_f64.max(n.sqrt()).max(blk.c.norm());
            for (i, a) in &blk.a {
                let an = a.norm();
                xi = xi.max(n * (1.0 + form.b[*i].abs()) / (1.0 + an));
                eta = eta.max(an);
            }
            x.push(Mat::identity(blk.c.nrows(), blk.c.nrows()) * xi);
            z.push(Mat::identity(blk.c.nrows(), blk.c.nrows()) * eta);
        }
        let mut xl = DVector::from_element(n_lp, 10.0_f64);
        let mut zl = DVector::from_element(n_lp, 10.0_f64);
        for r in 0..n_lp {
            let an = form.lp.a[r].iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
            zl[r] = zl[r].max(form.lp.c[r].abs()).max(an);
            xl[r] = form.lp.a[r]
                .iter()
                .map(|(i, v)| (1.0 + form.b[*i].abs()) / (1.0 + v.abs()))
                .fold(xl[r], f64::max);
        }
        Iterate { x, z, y: DVector::zeros(m), xl, zl }
    };

    let mut stalls = 0;
    for iteration in 0..opts.max_iter {
        // residuals
        let rd: Vec<Mat> = (0..form.dense.len()).map(|k| form.slack(k, &it.y) - &it.z[k]).collect();
        let rdl = form.slack_lp(&it.y) - &it.zl;
        let mut rp = form.b.clone();
        for (k, blk) in form.dense.iter().enumerate() {
            for (i, a) in &blk.a {
                rp[*i] -= a.dot(&it.x[k]);
            }
        }
        for (r, row) in form.lp.a.iter().enumerate() {
            for (i, a) in row {
                rp[*i] -= a * it.xl[r];
            }
        }
        let gap: f64 = it.x.iter().zip(&it.z).map(|(x, z)| x.dot(z)).sum::<f64>() + it.xl.dot(&it.zl);
        let mu = gap / total_dim as f64;
        let pobj: f64 = form.dense.iter().zip(&it.x).map(|(b, x)| b.c.dot(x)).sum::<f64>()
            + form.lp.c.iter().zip(it.xl.iter()).map(|(c, x)| c * x).sum::<f64>();
        let dobj = form.b.dot(&it.y);
        let rel_gap = gap.abs() / (1.0 + pobj.abs() + dobj.abs());
        let pinf = rp.norm() / (1.0 + b_norm);
        let dinf = (rd.iter().map(|r| r.norm_squared()).sum::<f64>() + rdl.norm_squared()).sqrt() / (1.0 + c_norm);
        if rel_gap < opts.tol && pinf < opts.tol && dinf < opts.tol {
            return Outcome { y: it.y, converged: true, iterations: iteration };
        }

        let zinv: Vec<Mat> = match it.z.iter().map(|z| cholesky(z).map(|c| c.inverse())).collect::<Option<Vec<_>>>() {
            Some(v) => v,
            None => break,
        };

        // Schur complement M_ij = Σ_k ⟨A_kj, X_k A_ki Z_k⁻¹⟩ + Σ_r a_ri a_rj x_r / z_r
        let mut schur = Mat::zeros(m, m);
        for (k, blk) in form.dense.iter().enumerate() {
            let g: Vec<Mat> = blk.a.iter().map(|(_, a)| &it.x[k] * a * &zinv[k]).collect();
            for (p, ((ip, _), gp)) in blk.a.iter().zip(&g).enumerate() {
                for (offset, (iq, aq)) in blk.a[p..].iter().enumerate() {
                    let v = aq.dot(gp);
                    schur[(*ip, *iq)] += v;
                    if offset > 0 {
                        schur[(*iq, *ip)] += v;
                    }
                }
            }
        }
        for (r, row) in form.lp.a.iter().enumerate() {
            let w = it.xl[r] / it.zl[r];
            for (i, ai) in row {
                for (j, aj) in row {
                    schur[(*i, *j)] += ai * aj * w;
                }
            }
        }
        let schur = sym(&schur);
        let factor = match cholesky(&schur) {
            Some(c) => c,
            None => {
                let reg = 1e-14 * schur.diagonal().amax().max(1.0);
                match cholesky(&(&schur + Mat::identity(m, m) * reg)) {
                    Some(c) => c,
                    None => break,
                }
            }
        };

        let direction = |sigma_mu: f64, corr: Option<&Direction>| -> Direction {
            // R_k = σμ Z⁻¹ - X - X Rd Z⁻¹ - dXa dZa Z⁻¹
            let mut rhs = rp.clone();
            let mut base = Vec::with_capacity(form.dense.len());
            for (k, blk) in form.dense.iter().enumerate() {
                let mut r = &zinv[k] * sigma_mu - &it.x[k] - &it.x[k] * &rd[k] * &zinv[k];
                if let Some(c) = corr {
                    r -= &c.dx[k] * &c.dz[k] * &zinv[k];
                }
                for (i, a) in &blk.a {
                    rhs[*i] -= a.dot(&r);
                }
                base.push(r);
            }
            let mut base_lp = DVector::zeros(n_lp);
            for r in 0..n_lp {
                let mut v = sigma_mu / it.zl[r] - it.xl[r] - it.xl[r] * rdl[r] / it.zl[r];
                if let Some(c) = corr {
                    v -= c.dxl[r] * c.dzl[r] / it.zl[r];
                }
                for (i, a) in &form.lp.a[r] {
                    rhs[*i] -= a * v;
                }
                base_lp[r] = v;
            }
            let dy = factor.solve(&rhs);
            let mut dx = Vec::with_capacity(form.dense.len());
            let mut dz = Vec::with_capacity(form.dense.len());
            for (k, blk) in form.dense.iter().enumerate() {
                let mut dzk = rd[k].clone();
                for (i, a) in &blk.a {
                    dzk -= a * dy[*i];
                }
                let mut dxk = &zinv[k] * sigma_mu - &it.x[k] - &it.x[k] * &dzk * &zinv[k];
                if let Some(c) = corr {
                    dxk -= &c.dx[k] * &c.dz[k] * &zinv[k];
                }
                dx.push(sym(&dxk));
                dz.push(dzk);
            }
            let mut dzl = rdl.clone();
            for (r, row) in form.lp.a.iter().enumerate() {
                for (i, a) in row {
                    dzl[r] -= a * dy[*i];
                }
            }
            let mut dxl = DVector::zeros(n_lp);
            for r in 0..n_lp {
                dxl[r] = base_lp[r] - it.xl[r] * (dzl[r] - rdl[r]) / it.zl[r];
            }
            Direction { dx, dz, dy, dxl, dzl }
        };

        let steps = |d: &Direction| -> (f64, f64) {
            let mut ap = max_step_lp(&it.xl, &d.dxl);
            let mut ad = max_step_lp(&it.zl, &d.dzl);
            for k in 0..form.dense.len() {
                ap = ap.min(max_step(&it.x[k], &d.dx[k]));
                ad = ad.min(max_step(&it.z[k], &d.dz[k]));
            }
            (ap, ad)
        };

        let predictor = direction(0.0, None);
        let (ap, ad) = steps(&predictor);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mut gap_aff = 0.0;
        for k in 0..form.dense.len() {
            let xa = &it.x[k] + &predictor.dx[k] * ap;
            let za = &it.z[k] + &predictor.dz[k] * ad;
            gap_aff += xa.dot(&za);
        }
        gap_aff += (&it.xl + &predictor.dxl * ap).dot(&(&it.zl + &predictor.dzl * ad));
        let sigma = (gap_aff / gap).clamp(0.0, 1.0).powi(3);

        let corrector = direction(sigma * mu, Some(&predictor));
        let (ap, ad) = steps(&corrector);
        let ap = (0.98 * ap).min(1.0);
        let ad = (0.98 * ad).min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            stalls += 1;
            if stalls >= 3 {
                return Outcome { y: it.y, converged: false, iterations: iteration };
            }
        } else {
            stalls = 0;
        }
        for k in 0..form.dense.len() {
            it.x[k] = sym(&(&it.x[k] + &corrector.dx[k] * ap));
            it.z[k] = sym(&(&it.z[k] + &corrector.dz[k] * ad));
        }
        it.xl += &corrector.dxl * ap;
        it.zl += &corrector.dzl * ad;
        it.y += &corrector.dy * ad;
    }
    let iterations = opts.max_iter;
    Outcome { y: it.y, converged: false, iterations }
}

/// Oriented, normalized and margin-shifted blocks.
fn normalized_blocks(problem: &SdpProblem, opts: &SolveOptions) -> Vec<AffineMatrix> {
    problem
        .blocks()
        .iter()
        .map(|b| {
            let g = b.oriented();
            let s = g.scale_factor();
            let n = g.rows();
            g.scale(1.0 / s).add_constant(&(Mat::identity(n, n) * -opts.margin))
        })
        .collect()
}

fn dual_form(blocks: &[AffineMatrix], m: usize, margin_var: Option<usize>, b: DVector<f64>, radius: f64) -> DualForm {
    let dense = blocks
        .iter()
        .map(|g| {
            let n = g.rows();
            let mut a: Vec<(usize, Mat)> = g.terms().iter().map(|(i, coef)| (*i, -coef)).collect();
            if let Some(t) = margin_var {
                a.push((t, Mat::identity(n, n)));
            }
            DenseBlock { c: g.constant_part().clone(), a }
        })
        .collect();
    let mut lp = LinearRows::default();
    for i in 0..m {
        for sign in [1.0, -1.0] {
            lp.c.push(radius);
            lp.a.push(vec![(i, sign)]);
        }
    }
    DualForm { b, dense, lp }
}

fn verify(problem: &SdpProblem, y: &[f64]) -> Result<Vec<super::BlockMargin>> {
    problem.blocks().iter().map(|b| b.margin_of(&b.expr.eval(y))).collect()
}

/// Solves an LMI feasibility or minimisation problem and re-verifies every
/// block at the returned point by an independent eigensolve.
pub fn solve(problem: &SdpProblem, opts: &SolveOptions) -> Result<SdpSolution> {
    let m = problem.scalar_count();
    let blocks = normalized_blocks(problem, opts);

    let mut b = DVector::zeros(m + 1);
    b[m] = 1.0;
    let phase1 = interior_point(&dual_form(&blocks, m, Some(m), b, opts.box_radius), opts);
    let t_star = phase1.y[m];
    let y1: Vec<f64> = phase1.y.iter().take(m).copied().collect();
    let margins = verify(problem, &y1)?;
    let verified = margins.iter().all(|g| g.margin > 0.0);
    let status = match (phase1.converged, t_star > 0.0, verified) {
        (_, true, true) => SolveStatus::Feasible,
        (true, false, _) => SolveStatus::Infeasible,
        _ => SolveStatus::NumericalFailure,
    };
    let objective_of = |y: &[f64]| problem.objective().map(|c| c.iter().zip(y).map(|(a, b)| a * b).sum());
    let feasible = SdpSolution {
        status,
        objective: objective_of(&y1),
        values: y1,
        margins,
        feasibility_margin: t_star,
        iterations: phase1.iterations,
    };
    let Some(cost) = problem.objective() else {
        return Ok(feasible);
    };
    if status != SolveStatus::Feasible {
        return Ok(feasible);
    }

    let b = -DVector::from_column_slice(cost);
    let phase2 = interior_point(&dual_form(&blocks, m, None, b, opts.box_radius), opts);
    let y2: Vec<f64> = phase2.y.iter().copied().collect();
    let margins = verify(problem, &y2)?;
    if phase2.converged && margins.iter().all(|g| g.margin > 0.0) {
        Ok(SdpSolution {
            status: SolveStatus::Optimal,
            objective: objective_of(&y2),
            values: y2,
            margins,
            feasibility_margin: t_star,
            iterations: feasible.iterations + phase2.iterations,
        })
    } else {
        Ok(feasible)
    }
}
