//! Reference computations that share no code with `ppm-core`.
//!
//! Each routine is the slow, obviously-correct version of something the
//! core library does quickly: they exist to be compared against.

/// Minimum mistakes of a one-dimensional threshold classifier, over every
/// gap between sorted distinct values, both orientations, and the two
/// constant labelings.
pub fn threshold_erm_1d(xs: &[f64], ys: &[bool]) -> u64 {
    assert_eq!(xs.len(), ys.len());
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    let n = xs.len();
    let total_ones = ys.iter().filter(|&&y| y).count() as u64;
    let total_zeros = n as u64 - total_ones;
    // all inside / all outside
    let mut best = total_ones.min(total_zeros);
    let mut left_ones = 0u64;
    let mut left_zeros = 0u64;
    for (pos, &i) in order.iter().enumerate() {
        if ys[i] {
            left_ones += 1;
        } else {
            left_zeros += 1;
        }
        let next = order.get(pos + 1).map(|&j| xs[j]);
        if next == Some(xs[i]) {
            continue;
        }
        let right_ones = total_ones - left_ones;
        let right_zeros = total_zeros - left_zeros;
        // label 1 on the right: mistakes are left ones and right zeros
        best = best.min(left_ones + right_zeros);
        // label 1 on the left
        best = best.min(left_zeros + right_ones);
    }
    best
}

/// Solves `a x = b` for square `a`; `None` when (numerically) singular.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &v)| r.iter().copied().chain([v]).collect()).collect();
    let scale = m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())?;
        if m[p][c].abs() < 1e-10 * scale {
            return None;
        }
        m.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..=n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    Some((0..n).map(|r| m[r][n] / m[r][r]).collect())
}

/// A constraint `a · x >= b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub a: Vec<f64>,
    pub b: f64,
}

impl Constraint {
    pub fn new(a: Vec<f64>, b: f64) -> Self {
        Self { a, b }
    }

    fn holds(&self, x: &[f64], tol: f64) -> bool {
        let lhs: f64 = self.a.iter().zip(x).map(|(p, q)| p * q).sum();
        lhs >= self.b - tol * (1.0 + self.b.abs())
    }
}

/// Feasibility of `{x : a_i · x >= b_i - tol (1 + |b_i|)}` inside the box
/// `[-bound, bound]^d` by enumerating every vertex of the arrangement.
///
/// A non-empty bounded polytope has a vertex, and every vertex is the
/// solution of `d` tight constraints.
pub fn feasible_by_vertices(constraints: &[Constraint], dim: usize, bound: f64, tol: f64) -> bool {
    let mut all = constraints.to_vec();
    for j in 0..dim {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        all.push(Constraint::new(e.clone(), -bound));
        e[j] = -1.0;
        all.push(Constraint::new(e, -bound));
    }
    let m = all.len();
    let mut idx: Vec<usize> = (0..dim).collect();
    loop {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| all[i].a.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| all[i].b).collect();
        if let Some(x) = solve(&a, &b) {
            if all.iter().all(|c| c.holds(&x, tol)) {
                return true;
            }
        }
        // next combination
        let mut k = dim;
        loop {
            if k == 0 {
                return false;
            }
            k -= 1;
            if idx[k] < m - dim + k {
                break;
            }
        }
        idx[k] += 1;
        for t in k + 1..dim {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

/// Exponential-mechanism probabilities `exp(-ε m_i / 2) / Σ_j exp(-ε m_j / 2)`
/// evaluated directly, without shifting.
pub fn direct_mechanism_probs(mistakes: &[u32], epsilon: f64) -> Vec<f64> {
    let w: Vec<f64> = mistakes.iter().map(|&m| (-epsilon * m as f64 / 2.0).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

/// `max_i |ln p_i - ln q_i|`.
pub fn max_abs_log_ratio(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    p.iter().zip(q).map(|(a, b)| (a.ln() - b.ln()).abs()).fold(0.0, f64::max)
}

/// Percentile `q` in `[0, 1]` of sorted values, linearly interpolated.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}
