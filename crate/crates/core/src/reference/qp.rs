//! Dense convex QP with linear equalities and two-sided linear bounds:
//!
//! ```text
//! min 1/2 x'Hx + q'x   s.t.   A x = b,   lo <= G x <= hi
//! ```
//!
//! Equalities are eliminated through an SVD null-space basis; the reduced
//! problem is solved by a primal active-set method started from the
//! least-squares point of the bound rows.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub struct QpProblem {
    pub h: DMatrix<f64>,
    pub q: DVector<f64>,
    pub a_eq: DMatrix<f64>,
    pub b_eq: DVector<f64>,
    pub g: DMatrix<f64>,
    pub lo: DVector<f64>,
    pub hi: DVector<f64>,
    /// Target of the least-squares start, usually the midpoint of the bounds.
    pub start_target: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: DVector<f64>,
    pub iterations: usize,
    pub equality_residual: f64,
    pub active: usize,
}

const MAX_ITER: usize = 2000;
const FEAS_TOL: f64 = 1e-10;

/// Null-space basis and least-norm particular solution of `A x = b`.
fn eliminate(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.ncols();
    let m = a.nrows();
    let mut sq = DMatrix::zeros(n.max(m), n);
    sq.rows_mut(0, m).copy_from(a);
    let svd = sq.svd(true, true);
    let v_t = svd.v_t.as_ref().expect("requested V");
    let u = svd.u.as_ref().expect("requested U");
    let smax = svd.singular_values.max();
    let tol = smax * 1e-12 * n as f64;
    let mut xp = DVector::zeros(n);
    let mut null_cols = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        let vk = v_t.row(k).transpose();
        if s > tol {
            let uk = u.column(k);
            let coef = uk.rows(0, m).dot(b) / s;
            xp += vk * coef;
        } else {
            null_cols.push(vk);
        }
    }
    let z = if null_cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&null_cols)
    };
    (xp, z)
}

/// Constraint in the reduced space: `a' z >= b`.
struct Row {
    a: DVector<f64>,
    b: f64,
}

pub fn solve(p: &QpProblem) -> Result<QpSolution> {
    let (xp, nz) = eliminate(&p.a_eq, &p.b_eq);
    let eq_res = (&p.a_eq * &xp - &p.b_eq).amax();
    if eq_res > 1e-8 * (1.0 + p.b_eq.amax()) {
        return Err(Error::Infeasible(format!(
            "equality constraints inconsistent (residual {eq_res:e})"
        )));
    }
    let m = nz.ncols();
    let gx = &p.g * &xp;
    let gn = &p.g * &nz;

    if m == 0 {
        let viol = bound_violation(&gx, &p.lo, &p.hi);
        if viol > FEAS_TOL {
            return Err(Error::Infeasible(format!(
                "fully determined point violates bounds by {viol:e}"
            )));
        }
        return Ok(QpSolution {
            x: xp,
            iterations: 0,
            equality_residual: eq_res,
            active: 0,
        });
    }

    let hr = nz.transpose() * &p.h * &nz;
    let qr = nz.transpose() * (&p.h * &xp + &p.q);

    // feasible start: least squares on the bound rows
    let rhs = &p.start_target - &gx;
    let mut z = gn
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::Infeasible(e.to_string()))?;
    let viol = bound_violation(&(&gx + &gn * &z), &p.lo, &p.hi);
    if viol > FEAS_TOL {
        return Err(Error::Infeasible(format!(
            "least-squares start violates bounds by {viol:e}"
        )));
    }

    let mut rows = Vec::with_capacity(2 * gn.nrows());
    for i in 0..gn.nrows() {
        let a = gn.row(i).transpose();
        rows.push(Row {
            a: a.clone(),
            b: p.lo[i] - gx[i],
        });
        rows.push(Row {
            a: -a,
            b: gx[i] - p.hi[i],
        });
    }

    let mut working: Vec<usize> = Vec::new();
    for it in 0..MAX_ITER {
        let g = &hr * &z + &qr;
        let k = working.len();
        let mut kkt = DMatrix::zeros(m + k, m + k);
        kkt.view_mut((0, 0), (m, m)).copy_from(&hr);
        for (j, &w) in working.iter().enumerate() {
            let a = &rows[w].a;
            for i in 0..m {
                kkt[(i, m + j)] = -a[i];
                kkt[(m + j, i)] = a[i];
            }
        }
        let mut rhs = DVector::zeros(m + k);
        rhs.rows_mut(0, m).copy_from(&(-&g));
        let sol = match kkt.clone().lu().solve(&rhs) {
            Some(s) if s.iter().all(|v| v.is_finite()) => s,
            _ => kkt
                .svd(true, true)
                .solve(&rhs, 1e-12)
                .map_err(|e| Error::Infeasible(e.to_string()))?,
        };
        let step = sol.rows(0, m).into_owned();
        let scale = 1.0 + z.amax();
        if step.amax() <= 1e-12 * scale {
            let lambda = sol.rows(m, k);
            match lambda
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
            {
                Some((j, &l)) if l < -1e-12 => {
                    working.remove(j);
                    continue;
                }
                _ => {
                    let x = &xp + &nz * &z;
                    return Ok(QpSolution {
                        equality_residual: (&p.a_eq * &x - &p.b_eq).amax(),
                        x,
                        iterations: it,
                        active: working.len(),
                    });
                }
            }
        }
        let mut alpha = 1.0;
        let mut blocking = None;
        for (i, r) in rows.iter().enumerate() {
            if working.contains(&i) {
                continue;
            }
            let ap = r.a.dot(&step);
            if ap < -1e-14 {
                let room = (r.b - r.a.dot(&z)) / ap;
                let room = room.max(0.0);
                if room < alpha {
                    alpha = room;
                    blocking = Some(i);
                }
            }
        }
        z += step * alpha;
        if let Some(i) = blocking {
            working.push(i);
        }
    }
    let g = &hr * &z + &qr;
    Err(Error::SolverNonConvergence {
        iterations: MAX_ITER,
        residual: g.amax(),
    })
}

fn bound_violation(v: &DVector<f64>, lo: &DVector<f64>, hi: &DVector<f64>) -> f64 {
    v.iter()
        .zip(lo.iter().zip(hi.iter()))
        .map(|(&x, (&l, &h))| (l - x).max(x - h).max(0.0))
        .fold(0.0, f64::max)
}
