//! Dense two-phase simplex for `max c.x  s.t.  A x <= b`, `x` free.
//!
//! Free variables are split as `x = x+ - x-`. Pivoting follows Bland's rule,
//! so the method terminates in exact arithmetic; a generous iteration cap
//! guards against floating-point cycling.

const PIVOT_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;
const MAX_ITER: usize = 50_000;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Unbounded,
    Infeasible,
    /// The pivot budget ran out; nothing is known.
    Stalled,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Maximize `cost . z` over columns `< active`. Returns false if unbounded.
    fn optimize(&mut self, cost: &[f64], active: usize) -> Option<bool> {
        for _ in 0..MAX_ITER {
            let entering = (0..active).find(|&j| {
                let reduced = cost[j]
                    - self
                        .basis
                        .iter()
                        .zip(&self.rows)
                        .map(|(&b, row)| cost[b] * row[j])
                        .sum::<f64>();
                reduced > PIVOT_EPS
            });
            let Some(c) = entering else {
                return Some(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-15 || (ratio <= lr + 1e-15 && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Some(false),
                Some((r, _)) => self.pivot(r, c),
            }
        }
        None
    }
}

/// Solve `max c.x` subject to `a[i] . x <= b[i]` with `x` unrestricted in sign.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    let n_art = b.iter().filter(|&&v| v < 0.0).count();
    let width = 2 * n + m + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = 2 * n + m;
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; width + 1];
        for j in 0..n {
            row[j] = sign * a[i][j];
            row[n + j] = -sign * a[i][j];
        }
        row[2 * n + i] = sign;
        row[width] = sign * b[i];
        if sign < 0.0 {
            row[next_art] = 1.0;
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(2 * n + i);
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, basis, width };
    let real_cols = 2 * n + m;

    if n_art > 0 {
        let mut phase1 = vec![0.0; width];
        for v in phase1.iter_mut().skip(real_cols) {
            *v = -1.0;
        }
        match t.optimize(&phase1, width) {
            None => return LpOutcome::Stalled,
            Some(false) => unreachable!("phase one objective is bounded by zero"),
            Some(true) => {}
        }
        let infeasibility: f64 = (0..t.rows.len()).filter(|&i| t.basis[i] >= real_cols).map(|i| t.rhs(i)).sum();
        if infeasibility > FEAS_EPS {
            return LpOutcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis, dropping rows that
        // turn out to be linear combinations of others.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= real_cols {
                match (0..real_cols).find(|&j| t.rows[i][j].abs() > FEAS_EPS) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut cost = vec![0.0; width];
    for j in 0..n {
        cost[j] = c[j];
        cost[n + j] = -c[j];
    }
    match t.optimize(&cost, real_cols) {
        None => LpOutcome::Stalled,
        Some(false) => LpOutcome::Unbounded,
        Some(true) => {
            let mut z = vec![0.0; width];
            for (i, &bcol) in t.basis.iter().enumerate() {
                z[bcol] = t.rhs(i);
            }
            let x: Vec<f64> = (0..n).map(|j| z[j] - z[n + j]).collect();
            let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
            LpOutcome::Optimal { value, x }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(out: LpOutcome) -> f64 {
        match out {
            LpOutcome::Optimal { value, .. } => value,
            o => panic!("expected optimum, got {o:?}"),
        }
    }

    #[test]
    fn box_maximum() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
        let b = vec![1.0, 2.0, 0.0, 0.0];
        assert!((value(maximize(&[1.0, 1.0], &a, &b)) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn pentagon_vertex() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
        let b = vec![1.0, 1.0, 1.5, 0.0, 0.0];
        assert!((value(maximize(&[2.0, 1.0], &a, &b)) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_needs_phase_one() {
        // x >= 1, y >= 2, x + y <= 4: max x is 2.
        let a = vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]];
        let b = vec![-1.0, -2.0, 4.0];
        assert!((value(maximize(&[1.0, 0.0], &a, &b)) - 2.0).abs() < 1e-12);
        assert!((value(maximize(&[-1.0, 0.0], &a, &b)) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let a = vec![vec![1.0], vec![-1.0]];
        assert_eq!(maximize(&[1.0], &a, &[1.0, -2.0]), LpOutcome::Infeasible);
        assert_eq!(maximize(&[1.0], &[vec![-1.0]], &[0.0]), LpOutcome::Unbounded);
    }

    #[test]
    fn free_variables_go_negative() {
        // max -x s.t. x >= -3.
        assert!((value(maximize(&[-1.0], &[vec![-1.0]], &[3.0])) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_equalities() {
        // x + y <= 1 and -x - y <= -1 pin x + y = 1; x <= 0.25 twice.
        let a = vec![vec![1.0, 1.0], vec![-1.0, -1.0], vec![1.0, 0.0], vec![1.0, 0.0], vec![-1.0, 0.0]];
        let b = vec![1.0, -1.0, 0.25, 0.25, 0.0];
        assert!((value(maximize(&[0.0, 1.0], &a, &b)) - 1.0).abs() < 1e-12);
    }
}
