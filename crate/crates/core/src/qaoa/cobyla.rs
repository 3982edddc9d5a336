//! Derivative-free minimisation by linear approximation (COBYLA) for the
//! unconstrained case.
//!
//! The method keeps a simplex of `n + 1` points, fits the linear
//! interpolant through them and steps to the minimiser of that model inside
//! a ball of radius `rho`. Poor steps either repair the simplex geometry or
//! halve `rho`; the run converges once a poor step happens at `rho = rhoend`.

use serde::{Deserialize, Serialize};

/// Simplex acceptability: minimum relative vertex distance from the opposite face.
const ALPHA: f64 = 0.25;
/// Simplex acceptability: maximum relative edge length.
const BETA: f64 = 2.1;
/// Length of a geometry-repair step, relative to `rho`.
const GAMMA: f64 = 0.5;
/// Edges longer than `DELTA * rho` are penalised when choosing a vertex to drop.
const DELTA: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CobylaConfig {
    pub rhobeg: f64,
    pub rhoend: f64,
    /// Maximum number of objective evaluations.
    pub maxfun: usize,
}

impl Default for CobylaConfig {
    fn default() -> Self {
        CobylaConfig {
            rhobeg: 0.5,
            rhoend: 1e-3,
            maxfun: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CobylaOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    /// The trust radius reached `rhoend` before the evaluation budget ran out.
    pub converged: bool,
    /// Objective value of every evaluation, in order.
    pub history: Vec<f64>,
}

struct Counted<F> {
    f: F,
    history: Vec<f64>,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        let v = (self.f)(x);
        self.history.push(v);
        // NaN would poison every comparison below
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    fn count(&self) -> usize {
        self.history.len()
    }
}

/// Minimises `f` starting from `x0`.
pub fn minimize<F>(f: F, x0: &[f64], cfg: &CobylaConfig) -> CobylaOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut obj = Counted {
        f,
        history: Vec::new(),
    };
    let mut rho = cfg.rhobeg;
    let maxfun = cfg.maxfun.max(1);

    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    let mut fvals = vec![obj.eval(x0)];
    if n == 0 {
        return CobylaOutcome {
            x: x0.to_vec(),
            f: fvals[0],
            evaluations: 1,
            converged: true,
            history: obj.history,
        };
    }
    for j in 0..n {
        if obj.count() >= maxfun {
            break;
        }
        let mut x = x0.to_vec();
        x[j] += rho;
        fvals.push(obj.eval(&x));
        pts.push(x);
    }

    let mut converged = false;
    let mut after_trial = false;
    while pts.len() == n + 1 && obj.count() < maxfun {
        // pivot on the best vertex (lowest index among ties)
        let best = (0..=n)
            .min_by(|&a, &b| fvals[a].total_cmp(&fvals[b]).then(a.cmp(&b)))
            .expect("non-empty simplex");
        pts.swap(0, best);
        fvals.swap(0, best);

        let d: Vec<Vec<f64>> = (1..=n)
            .map(|j| pts[j].iter().zip(&pts[0]).map(|(a, b)| a - b).collect())
            .collect();
        let Some(m) = invert(&d) else {
            // degenerate simplex: rebuild around the pivot
            let x0 = pts[0].clone();
            for j in 0..n {
                if obj.count() >= maxfun {
                    break;
                }
                let mut x = x0.clone();
                x[j] += rho;
                fvals[j + 1] = obj.eval(&x);
                pts[j + 1] = x;
            }
            continue;
        };
        let df: Vec<f64> = (1..=n).map(|j| fvals[j] - fvals[0]).collect();
        // g = D^{-1} df; column j of M is orthogonal to every edge but d_j
        let g: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m[i][j] * df[j]).sum()).collect();
        let col_norm = |j: usize| (0..n).map(|i| m[i][j] * m[i][j]).sum::<f64>().sqrt();
        let vsig: Vec<f64> = (0..n).map(|j| 1.0 / col_norm(j)).collect();
        let veta: Vec<f64> = d.iter().map(|dj| norm(dj)).collect();
        let acceptable = vsig.iter().all(|&s| s >= ALPHA * rho) && veta.iter().all(|&e| e <= BETA * rho);

        if !after_trial && !acceptable {
            let l = if veta.iter().any(|&e| e > BETA * rho) {
                argmax(&veta)
            } else {
                argmin(&vsig)
            };
            let mut step: Vec<f64> = (0..n).map(|i| GAMMA * rho * vsig[l] * m[i][l]).collect();
            if dot(&g, &step) > 0.0 {
                step.iter_mut().for_each(|s| *s = -*s);
            }
            let x: Vec<f64> = pts[0].iter().zip(&step).map(|(a, s)| a + s).collect();
            fvals[l + 1] = obj.eval(&x);
            pts[l + 1] = x;
            continue;
        }

        let gnorm = norm(&g);
        let poor = if gnorm > 0.0 && gnorm.is_finite() {
            let step: Vec<f64> = g.iter().map(|gi| -rho * gi / gnorm).collect();
            let x: Vec<f64> = pts[0].iter().zip(&step).map(|(a, s)| a + s).collect();
            let fnew = obj.eval(&x);
            after_trial = true;
            let predicted = rho * gnorm;
            let actual = fvals[0] - fnew;

            let edgmax = DELTA * rho;
            let mut vmold = if actual > 0.0 { 0.0 } else { 1.0 };
            let mut replace = None;
            for j in 0..n {
                let mut temp = (0..n).map(|i| m[i][j] * step[i]).sum::<f64>().abs();
                let dist = norm(&d[j].iter().zip(&step).map(|(a, b)| a - b).collect::<Vec<_>>());
                if dist > edgmax {
                    temp *= dist / edgmax;
                }
                if temp > vmold {
                    vmold = temp;
                    replace = Some(j + 1);
                }
            }
            if let Some(l) = replace {
                pts[l] = x;
                fvals[l] = fnew;
            }
            !(actual > 0.0 && actual >= 0.1 * predicted)
        } else {
            true
        };

        if poor {
            if !acceptable {
                after_trial = false;
                continue;
            }
            if rho <= cfg.rhoend {
                converged = true;
                break;
            }
            rho *= 0.5;
            if rho <= 1.5 * cfg.rhoend {
                rho = cfg.rhoend;
            }
        }
    }

    let best = (0..pts.len())
        .min_by(|&a, &b| fvals[a].total_cmp(&fvals[b]).then(a.cmp(&b)))
        .expect("non-empty simplex");
    CobylaOutcome {
        x: pts[best].clone(),
        f: fvals[best],
        evaluations: obj.count(),
        converged,
        history: obj.history,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b]).then(b.cmp(&a))).unwrap()
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b))).unwrap()
}

/// Gauss-Jordan inverse with partial pivoting; `None` if singular.
fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    let mut aug: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs()))?;
        if aug[piv][col].abs() <= 1e-14 * scale {
            return None;
        }
        aug.swap(col, piv);
        let p = aug[col][col];
        aug[col].iter_mut().for_each(|x| *x /= p);
        for r in 0..n {
            if r != col {
                let factor = aug[r][col];
                if factor != 0.0 {
                    for c in 0..2 * n {
                        aug[r][c] -= factor * aug[col][c];
                    }
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}
