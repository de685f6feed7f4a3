use crate::error::{Error, Result};
use crate::linalg::{dot, squared_distance, Matrix, Rng};
use crate::scalar::Real;

/// A pair of dataset rows and borrowed views of their layer-`(l-1)` features.
#[derive(Debug, Clone, Copy)]
pub struct CandidatePair<'a, T> {
    pub idx1: usize,
    pub idx2: usize,
    pub feat1: &'a [T],
    pub feat2: &'a [T],
    /// Sampling weight; zero until [`pair_weights`] fills it in.
    pub weight: T,
}

/// Number of candidate pairs for a layer of `nodes` nodes over `rows` data points:
/// `varsigma * ceil(nodes / rows) * rows`.
pub fn candidate_count(rows: usize, nodes: usize, varsigma: usize) -> usize {
    varsigma * nodes.div_ceil(rows) * rows
}

/// Attempts allowed per requested pair before the data is declared degenerate.
pub const REJECTION_FACTOR: usize = 100;

/// Draws `candidate_count(M, nodes, varsigma)` index pairs uniformly from
/// `M x M`, rejecting pairs whose feature rows are identical.
pub fn generate_candidates<'a, T: Real>(
    features: &'a Matrix<T>,
    nodes: usize,
    varsigma: usize,
    rng: &mut Rng,
) -> Result<Vec<CandidatePair<'a, T>>> {
    let m = features.rows();
    if m < 2 {
        return Err(Error::DegenerateData(format!("{m} data point(s); pairs need at least 2")));
    }
    if nodes == 0 || varsigma == 0 {
        return Err(Error::invalid("node count and varsigma must be positive"));
    }
    let first = features.row(0);
    if features.iter_rows().all(|r| r == first) {
        return Err(Error::DegenerateData("every feature row is identical; no pair can be formed".into()));
    }

    let target = candidate_count(m, nodes, varsigma);
    let budget = REJECTION_FACTOR * target;
    let mut pairs = Vec::with_capacity(target);
    let mut attempts = 0usize;
    while pairs.len() < target {
        if attempts == budget {
            return Err(Error::DegenerateData(format!(
                "only {} of {target} distinct pairs found in {budget} draws",
                pairs.len()
            )));
        }
        attempts += 1;
        let idx1 = rng.index(m);
        let idx2 = rng.index(m);
        let (feat1, feat2) = (features.row(idx1), features.row(idx2));
        if feat1 != feat2 {
            pairs.push(CandidatePair { idx1, idx2, feat1, feat2, weight: T::zero() });
        }
    }
    Ok(pairs)
}

/// Fills in `P = ‖y₂ − y₁‖_∞ / max(‖x₂ − x₁‖, ε_eff)` where `ε_eff` is 0 at
/// layer 1 and `epsilon` from layer 2 on.
pub fn pair_weights<'a, T: Real>(
    mut pairs: Vec<CandidatePair<'a, T>>,
    targets: &Matrix<T>,
    epsilon: T,
    layer: usize,
) -> Result<Vec<CandidatePair<'a, T>>> {
    if !(epsilon >= T::zero()) {
        return Err(Error::invalid(format!("epsilon must be >= 0, got {epsilon}")));
    }
    if layer == 0 {
        return Err(Error::invalid("layers are numbered from 1"));
    }
    let floor = if layer == 1 { T::zero() } else { epsilon };
    for (i, p) in pairs.iter_mut().enumerate() {
        if p.idx1 >= targets.rows() || p.idx2 >= targets.rows() {
            return Err(Error::dims("pair_weights", format!("index < {}", targets.rows()), p.idx1.max(p.idx2)));
        }
        let numerator = targets
            .row(p.idx2)
            .iter()
            .zip(targets.row(p.idx1))
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
        let denominator = squared_distance(p.feat1, p.feat2).sqrt().max(floor);
        if !(denominator > T::zero()) {
            return Err(Error::DegenerateData(format!("pair {i} has coincident features at layer {layer}")));
        }
        let w = numerator / denominator;
        if !w.is_finite() {
            return Err(Error::NonFinite(format!("weight of pair {i} at layer {layer}")));
        }
        p.weight = w;
    }
    Ok(pairs)
}

/// Weight `w = s1 (x₂ − x₁) / ‖x₂ − x₁‖²` and bias `b = ⟨w, x₁⟩ + s2`.
///
/// With the network's `⟨w, x⟩ − b` convention the node's pre-activation is
/// `−s2` at `x₁` and `s1 − s2` at `x₂`.
pub fn construct_node_params<T: Real>(feat1: &[T], feat2: &[T], s1: T, s2: T) -> Result<(Vec<T>, T)> {
    if feat1.len() != feat2.len() {
        return Err(Error::dims("construct_node_params", feat1.len(), feat2.len()));
    }
    let sq = squared_distance(feat1, feat2);
    if !(sq > T::zero()) {
        return Err(Error::DegenerateData("node pair has coincident features".into()));
    }
    let scale = s1 / sq;
    let w: Vec<T> = feat1.iter().zip(feat2).map(|(&a, &b)| scale * (b - a)).collect();
    let b = dot(&w, feat1) + s2;
    if !b.is_finite() || w.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("node parameters".into()));
    }
    Ok((w, b))
}
