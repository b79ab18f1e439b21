//! Dense two-phase simplex over exact rationals with Bland's rule.

use num_traits::{Signed, Zero};

use crate::rational::{zero, Rational};

use super::Relation;

/// One row `coefficients · x (relation) bound` in dense form.
pub(crate) struct DenseRow {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub bound: Rational,
}

pub(crate) enum SimplexResult {
    Optimal { value: Rational, point: Vec<Rational> },
    Unbounded,
    Infeasible,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x /= &p;
        }
        self.rhs[r] /= &p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (x, y) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost · x` over columns `0..allowed`.
    fn minimize(&mut self, cost: &[Rational], allowed: usize) -> Phase {
        loop {
            // Bland: lowest-index column with negative reduced cost.
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut reduced = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        reduced -= &cost[b] * &self.rows[i][j];
                    }
                }
                reduced.is_negative()
            });
            let Some(c) = entering else {
                return Phase::Optimal;
            };
            let mut best: Option<(Rational, usize, usize)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][c].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][c];
                    let better = match &best {
                        None => true,
                        Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                Some((_, r, _)) => self.pivot(r, c),
                None => return Phase::Unbounded,
            }
        }
    }
}

/// Minimizes `cost · x` subject to `rows` and `x >= 0`.
pub(crate) fn minimize(cost: &[Rational], rows: &[DenseRow]) -> SimplexResult {
    let n = cost.len();
    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.relation != Relation::Eq).count();
    let width = n + slack_count + m;
    let mut t = Tableau { rows: Vec::with_capacity(m), rhs: Vec::with_capacity(m), basis: Vec::with_capacity(m) };
    let mut slack = n;
    for (i, row) in rows.iter().enumerate() {
        let mut dense = vec![zero(); width];
        dense[..n].clone_from_slice(&row.coefficients);
        match row.relation {
            Relation::Le => {
                dense[slack] = Rational::from_integer(1.into());
                slack += 1;
            }
            Relation::Ge => {
                dense[slack] = Rational::from_integer((-1).into());
                slack += 1;
            }
            Relation::Eq => {}
        }
        let mut rhs = row.bound.clone();
        if rhs.is_negative() {
            dense.iter_mut().for_each(|x| *x = -x.clone());
            rhs = -rhs;
        }
        dense[n + slack_count + i] = Rational::from_integer(1.into());
        t.rows.push(dense);
        t.rhs.push(rhs);
        t.basis.push(n + slack_count + i);
    }

    let structural = n + slack_count;
    let mut phase1 = vec![zero(); width];
    phase1[structural..].iter_mut().for_each(|x| *x = Rational::from_integer(1.into()));
    t.minimize(&phase1, width);
    let infeasibility: Rational = t.basis.iter().zip(&t.rhs).filter(|(&b, _)| b >= structural).map(|(_, v)| v.clone()).sum();
    if infeasibility.is_positive() {
        return SimplexResult::Infeasible;
    }
    // Drive remaining (zero-valued) artificials out of the basis.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= structural {
            match (0..structural).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    // Redundant row.
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut phase2 = vec![zero(); width];
    phase2[..n].clone_from_slice(cost);
    if let Phase::Unbounded = t.minimize(&phase2, structural) {
        return SimplexResult::Unbounded;
    }
    let mut point = vec![zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            point[b] = t.rhs[i].clone();
        }
    }
    let value = cost.iter().zip(&point).map(|(c, x)| c * x).sum();
    SimplexResult::Optimal { value, point }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn row(c: &[i64], relation: Relation, b: i64) -> DenseRow {
        DenseRow { coefficients: c.iter().map(|&x| int(x)).collect(), relation, bound: int(b) }
    }

    #[test]
    fn small_max_problem() {
        // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3  ->  x=3, y=1, 11.
        let rows = [row(&[1, 1], Relation::Le, 4), row(&[1, 3], Relation::Le, 6), row(&[1, 0], Relation::Le, 3)];
        match minimize(&[int(-3), int(-2)], &rows) {
            SimplexResult::Optimal { value, point } => {
                assert_eq!(value, int(-11));
                assert_eq!(point, vec![int(3), int(1)]);
            }
            _ => panic!("expected optimum"),
        }
    }

    #[test]
    fn fractional_optimum() {
        // min x + y s.t. 2x + y >= 1, x + 2y >= 1  ->  1/3 each.
        let rows = [row(&[2, 1], Relation::Ge, 1), row(&[1, 2], Relation::Ge, 1)];
        match minimize(&[int(1), int(1)], &rows) {
            SimplexResult::Optimal { value, .. } => assert_eq!(value, ratio(2, 3)),
            _ => panic!("expected optimum"),
        }
    }

    #[test]
    fn unbounded_and_infeasible() {
        assert!(matches!(minimize(&[int(-1)], &[row(&[1], Relation::Ge, 1)]), SimplexResult::Unbounded));
        let rows = [row(&[1], Relation::Le, 1), row(&[1], Relation::Ge, 2)];
        assert!(matches!(minimize(&[int(1)], &rows), SimplexResult::Infeasible));
    }

    #[test]
    fn equality_and_redundant_rows() {
        let rows = [row(&[1, 1], Relation::Eq, 2), row(&[2, 2], Relation::Eq, 4), row(&[1, -1], Relation::Eq, 0)];
        match minimize(&[int(1), int(0)], &rows) {
            SimplexResult::Optimal { value, point } => {
                assert_eq!(value, int(1));
                assert_eq!(point, vec![int(1), int(1)]);
            }
            _ => panic!("expected optimum"),
        }
    }
}
