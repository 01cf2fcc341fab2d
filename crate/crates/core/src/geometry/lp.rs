use microlp::{ComparisonOp, OptimizationDirection, Problem};

use super::{HalfSpace, Region, Side};

/// Minimum clearance a witness must have from every bounding hyperplane.
pub const EPS_FEAS: f64 = 1e-9;

fn dot(a: &[f64], w: &[f64]) -> f64 {
    a.iter().zip(w).map(|(x, y)| x * y).sum()
}

/// Chebyshev-style centre of `region ∩ {a·w + b >= 0}`: maximizes the minimum
/// normalized slack (capped at 1). Returns the point and its recomputed slack,
/// or `None` when the intersection is empty.
pub fn max_slack(rows: &[(Vec<f64>, f64)], region: &Region) -> Option<(Vec<f64>, f64)> {
    let dim = region.dim();
    let mut normalized: Vec<(Vec<f64>, f64)> = Vec::with_capacity(rows.len() + region.facets().len());
    for (a, b) in rows {
        let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-14 * (1.0 + b.abs()) {
            if *b > 0.0 {
                continue;
            }
            return None;
        }
        normalized.push((a.iter().map(|x| x / norm).collect(), b / norm));
    }
    normalized.extend(region.facets().iter().cloned());

    let mut p = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..dim).map(|_| p.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let s = p.add_var(1.0, (f64::NEG_INFINITY, 1.0));
    for (a, b) in &normalized {
        let mut expr: Vec<(microlp::Variable, f64)> = vars.iter().copied().zip(a.iter().copied()).collect();
        expr.push((s, -1.0));
        p.add_constraint(expr, ComparisonOp::Ge, -b);
    }
    let solution = p.solve().ok()?.into_solution().ok()?;
    let w: Vec<f64> = vars.iter().map(|&v| solution.var_value(v)).collect();
    let slack = normalized
        .iter()
        .map(|(a, b)| dot(a, &w) + b)
        .fold(f64::INFINITY, f64::min);
    (slack > EPS_FEAS).then_some((w, slack))
}

/// Interior witness of `region ∩ signed constraints`, or `None` if the
/// intersection has no interior.
pub fn cell_feasible(constraints: &[(HalfSpace, Side)], region: &Region) -> Option<Vec<f64>> {
    if constraints.is_empty() {
        return Some(region.pivot().to_vec());
    }
    let rows: Vec<(Vec<f64>, f64)> = constraints
        .iter()
        .map(|(h, side)| {
            let sign = side.sign();
            (h.a.iter().map(|x| sign * x).collect(), sign * h.b)
        })
        .collect();
    max_slack(&rows, region).map(|(w, _)| w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(a: Vec<f64>, b: f64) -> HalfSpace {
        HalfSpace { a, b, winner: 0, loser: 1 }
    }

    #[test]
    fn empty_gives_pivot() {
        let r = Region::parse("0.1,0.5x0.2,0.4").unwrap();
        assert_eq!(cell_feasible(&[], &r).unwrap(), r.pivot().to_vec());
    }

    #[test]
    fn opposing_infeasible() {
        let r = Region::parse("0.1,0.5x0.2,0.4").unwrap();
        // w1 + w2 >= 0.65 and w1 + w2 <= 0.6
        let c = [(hs(vec![1.0, 1.0], -0.65), Side::Pos), (hs(vec![1.0, 1.0], -0.6), Side::Neg)];
        assert!(cell_feasible(&c, &r).is_none());
        let c = [(hs(vec![1.0, 1.0], -0.65), Side::Pos)];
        let w = cell_feasible(&c, &r).unwrap();
        assert!(w[0] + w[1] > 0.65 && r.contains(&w, 0.0));
    }

    #[test]
    fn degenerate_constraints() {
        let r = Region::parse("0.1,0.5").unwrap();
        assert!(cell_feasible(&[(hs(vec![0.0], 0.0), Side::Pos)], &r).is_none());
        assert!(cell_feasible(&[(hs(vec![0.0], 1.0), Side::Pos)], &r).is_some());
        assert!(cell_feasible(&[(hs(vec![0.0], 1.0), Side::Neg)], &r).is_none());
    }
}
