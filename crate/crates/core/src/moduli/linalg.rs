use nalgebra::DMatrix;
use serde::Serialize;

/// Singular values of a matrix and the numerical rank they certify.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankSummary {
    /// Descending.
    pub singular_values: Vec<f64>,
    /// `rel_eps × σ_max`.
    pub threshold: f64,
    pub rank: usize,
    pub smallest_kept: Option<f64>,
    pub largest_dropped: Option<f64>,
}

impl RankSummary {
    /// `smallest_kept / threshold` (infinite when nothing is kept or dropped).
    pub fn gap_ratio(&self) -> f64 {
        match self.smallest_kept {
            Some(s) if self.threshold > 0.0 => s / self.threshold,
            _ => f64::INFINITY,
        }
    }

    /// Kept values at least `factor` above the threshold, dropped ones at least
    /// `factor` below it.
    pub fn has_gap(&self, factor: f64) -> bool {
        let kept = self.smallest_kept.is_none_or(|s| s >= factor * self.threshold);
        let dropped = self.largest_dropped.is_none_or(|s| s * factor <= self.threshold);
        kept && dropped
    }
}

fn sorted_svd(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let u = DMatrix::from_fn(u.nrows(), idx.len(), |r, c| u[(r, idx[c])]);
    let vt = DMatrix::from_fn(idx.len(), vt.ncols(), |r, c| vt[(idx[r], c)]);
    (sv, u, vt)
}

pub fn rank_summary(m: &DMatrix<f64>, rel_eps: f64) -> RankSummary {
    if m.is_empty() {
        return RankSummary {
            singular_values: Vec::new(),
            threshold: 0.0,
            rank: 0,
            smallest_kept: None,
            largest_dropped: None,
        };
    }
    let (sv, _, _) = sorted_svd(m);
    summarize(sv, rel_eps)
}

fn summarize(sv: Vec<f64>, rel_eps: f64) -> RankSummary {
    let max = sv.first().copied().unwrap_or(0.0);
    let threshold = rel_eps * max;
    let rank = if max == 0.0 { 0 } else { sv.iter().filter(|&&s| s > threshold).count() };
    RankSummary {
        smallest_kept: rank.checked_sub(1).map(|i| sv[i]),
        largest_dropped: sv.get(rank).copied(),
        singular_values: sv,
        threshold,
        rank,
    }
}

/// Orthonormal basis (columns) of the null space of `m`, which has `n` columns.
pub fn kernel_basis(m: &DMatrix<f64>, n: usize, rel_eps: f64) -> DMatrix<f64> {
    if m.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    // pad with zero rows so that V is square
    let rows = m.nrows().max(n);
    let padded = DMatrix::from_fn(rows, n, |r, c| if r < m.nrows() { m[(r, c)] } else { 0.0 });
    let (sv, _, vt) = sorted_svd(&padded);
    let s = summarize(sv, rel_eps);
    let k = n - s.rank;
    DMatrix::from_fn(n, k, |r, c| vt[(s.rank + c, r)])
}

/// Orthonormal basis of the column space of `m`.
pub fn range_basis(m: &DMatrix<f64>, rel_eps: f64) -> DMatrix<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let (sv, u, _) = sorted_svd(m);
    let rank = summarize(sv, rel_eps).rank;
    u.columns(0, rank).into_owned()
}

/// Largest principal angle between the column spans of two orthonormal
/// bases; `π/2` when the dimensions differ.
pub fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let one_way = |x: &DMatrix<f64>, y: &DMatrix<f64>| {
        let residual = y - x * (x.transpose() * y);
        residual.svd(false, false).singular_values.max().min(1.0).asin()
    };
    one_way(a, b).max(one_way(b, a))
}

/// `I − Q Qᵀ` applied to `m`.
pub fn project_out(q: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    if q.ncols() == 0 {
        return m.clone();
    }
    m - q * (q.transpose() * m)
}
