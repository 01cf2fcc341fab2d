use rand::Rng;

use crate::error::{Error, Result};

/// Convex polytope in the reduced preference domain, kept both as a corner
/// list and as unit-normal facet inequalities `a·w + b >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    dim: usize,
    corners: Vec<Vec<f64>>,
    pivot: Vec<f64>,
    facets: Vec<(Vec<f64>, f64)>,
    bounds: Vec<(f64, f64)>,
    rectangle: bool,
}

const SIMPLEX_TOL: f64 = 1e-12;

impl Region {
    /// Axis-parallel box `Π [lo_i, hi_i]`.
    pub fn rectangle(bounds: &[(f64, f64)]) -> Result<Self> {
        let dim = bounds.len();
        if dim == 0 {
            return Err(Error::Geometry("region needs at least one dimension (d >= 2)".into()));
        }
        if bounds.iter().any(|&(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(Error::Geometry("each interval needs lo < hi".into()));
        }
        let corners: Vec<Vec<f64>> = (0..1usize << dim)
            .map(|mask| {
                bounds
                    .iter()
                    .enumerate()
                    .map(|(i, &(lo, hi))| if mask >> i & 1 == 1 { hi } else { lo })
                    .collect()
            })
            .collect();
        let mut facets = Vec::with_capacity(2 * dim);
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            let mut a = vec![0.0; dim];
            a[i] = 1.0;
            facets.push((a.clone(), -lo));
            a[i] = -1.0;
            facets.push((a, hi));
        }
        Self::finish(dim, corners, facets, true)
    }

    /// General convex polytope given by its corners (extra interior points are
    /// tolerated but ignored for facet computation).
    pub fn polytope(corners: Vec<Vec<f64>>) -> Result<Self> {
        let dim = corners.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::Geometry("region needs at least one corner of dimension >= 1".into()));
        }
        if corners.iter().any(|c| c.len() != dim || c.iter().any(|x| !x.is_finite())) {
            return Err(Error::Geometry("corners must share one finite dimension".into()));
        }
        let facets = facets_of(&corners, dim);
        if facets.len() < dim + 1 {
            return Err(Error::Geometry("region is not full-dimensional".into()));
        }
        Self::finish(dim, corners, facets, false)
    }

    fn finish(dim: usize, corners: Vec<Vec<f64>>, facets: Vec<(Vec<f64>, f64)>, rectangle: bool) -> Result<Self> {
        for c in &corners {
            if c.iter().any(|&x| x < -SIMPLEX_TOL) || c.iter().sum::<f64>() > 1.0 + SIMPLEX_TOL {
                return Err(Error::Geometry(format!("corner {c:?} lies outside the weight simplex")));
            }
        }
        let n = corners.len() as f64;
        let pivot: Vec<f64> = (0..dim).map(|i| corners.iter().map(|c| c[i]).sum::<f64>() / n).collect();
        let bounds = (0..dim)
            .map(|i| {
                corners.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
                    (lo.min(c[i]), hi.max(c[i]))
                })
            })
            .collect();
        Ok(Self { dim, corners, pivot, facets, bounds, rectangle })
    }

    /// Parses `lo1,hi1xlo2,hi2[x...]`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Geometry(format!("bad region `{s}`; expected lo,hi[xlo,hi...]"));
        let bounds = s
            .split('x')
            .map(|part| {
                let (lo, hi) = part.split_once(',').ok_or_else(bad)?;
                Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        Self::rectangle(&bounds)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn corners(&self) -> &[Vec<f64>] {
        &self.corners
    }

    pub fn pivot(&self) -> &[f64] {
        &self.pivot
    }

    /// Unit-normal facet inequalities `a·w + b >= 0`.
    pub fn facets(&self) -> &[(Vec<f64>, f64)] {
        &self.facets
    }

    /// Axis-aligned bounding box.
    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn is_rectangle(&self) -> bool {
        self.rectangle
    }

    /// Whether `w` is inside with at least `margin` clearance from every facet.
    pub fn contains(&self, w: &[f64], margin: f64) -> bool {
        self.facets
            .iter()
            .all(|(a, b)| a.iter().zip(w).map(|(x, y)| x * y).sum::<f64>() + b > margin)
    }

    /// Uniform sample by rejection from the bounding box.
    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        loop {
            let w: Vec<f64> = self.bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect();
            if self.contains(&w, 0.0) {
                return w;
            }
        }
    }
}

fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    det
}

/// Normal of the hyperplane through `pts` (exactly `dim` points).
fn normal_through(pts: &[&Vec<f64>], dim: usize) -> Vec<f64> {
    let rows: Vec<Vec<f64>> = pts[1..].iter().map(|p| p.iter().zip(pts[0]).map(|(a, b)| a - b).collect()).collect();
    (0..dim)
        .map(|j| {
            let minor: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * if minor.is_empty() { 1.0 } else { det(minor) }
        })
        .collect()
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), f);
}

fn facets_of(corners: &[Vec<f64>], dim: usize) -> Vec<(Vec<f64>, f64)> {
    let scale = corners.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let tol = 1e-9 * scale;
    let mut out: Vec<(Vec<f64>, f64)> = Vec::new();
    combinations(corners.len(), dim, &mut |idx| {
        let pts: Vec<&Vec<f64>> = idx.iter().map(|&i| &corners[i]).collect();
        let mut a = normal_through(&pts, dim);
        let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return;
        }
        a.iter_mut().for_each(|x| *x /= norm);
        let mut b = -a.iter().zip(pts[0]).map(|(x, y)| x * y).sum::<f64>();
        let vals: Vec<f64> = corners.iter().map(|c| a.iter().zip(c).map(|(x, y)| x * y).sum::<f64>() + b).collect();
        let (lo, hi) = vals.iter().fold((0.0f64, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        if lo < -tol && hi > tol {
            return;
        }
        if hi <= tol {
            if lo >= -tol {
                return;
            }
            a.iter_mut().for_each(|x| *x = -*x);
            b = -b;
        }
        let dup = out
            .iter()
            .any(|(a2, b2)| (b - b2).abs() < tol && a.iter().zip(a2).all(|(x, y)| (x - y).abs() < 1e-9));
        if !dup {
            out.push((a, b));
        }
    });
    out
}
