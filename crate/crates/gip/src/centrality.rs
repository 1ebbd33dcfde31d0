//! Katz and degree centralities.
//!
//! The Katz vector here weights walks *leaving* each node,
//! `c_i = sum_{t>=1} factor^t (W^t 1)_i`, which is the coefficient of node `i`
//! in the linear-regime influence objective. It is computed by the truncated
//! power series rather than a matrix inversion, so it stays sparse.

use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum CentralityError {
    #[error("Katz series diverges: factor * spectral radius = {product} >= 1")]
    DivergentSeries { product: f64 },
    #[error("series did not converge within {max_iter} iterations")]
    NonConvergent { max_iter: usize },
    #[error("k = {k} exceeds node count {n}")]
    KTooLarge { k: usize, n: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CentralityKind {
    Katz { factor: f64 },
    Degree,
}

#[derive(Debug, Clone)]
pub struct CentralityVector {
    pub values: Vec<f64>,
    pub kind: CentralityKind,
}

/// Truncated-series Katz centrality with the given attenuation factor.
///
/// Terms are `factor^t W^t 1`; accumulation stops once the elementwise
/// increment drops below `tol`. Fails with `DivergentSeries` when
/// `factor * rho(W) >= 1`.
pub fn katz_centrality(
    g: &Graph,
    factor: f64,
    tol: f64,
    max_iter: usize,
) -> Result<CentralityVector, CentralityError> {
    assert!(factor > 0.0 && factor <= 1.0, "factor must lie in (0, 1]");
    let n = g.n();
    if n == 0 {
        return Ok(CentralityVector {
            values: Vec::new(),
            kind: CentralityKind::Katz { factor },
        });
    }
    let rho = g.spectral_radius(1e-9, max_iter.max(10_000))?;
    if factor * rho >= 1.0 {
        return Err(CentralityError::DivergentSeries {
            product: factor * rho,
        });
    }
    let mut c = vec![0.0; n];
    let mut term = vec![1.0; n];
    let mut next = vec![0.0; n];
    for _ in 0..max_iter {
        for x in next.iter_mut() {
            *x = 0.0;
        }
        for (i, slot) in next.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &(j, w) in g.out_edges(i) {
                acc += w * term[j as usize];
            }
            *slot = factor * acc;
        }
        std::mem::swap(&mut term, &mut next);
        let mut max_term = 0.0f64;
        for (ci, &ti) in c.iter_mut().zip(term.iter()) {
            *ci += ti;
            max_term = max_term.max(ti);
        }
        if max_term < tol {
            return Ok(CentralityVector {
                values: c,
                kind: CentralityKind::Katz { factor },
            });
        }
    }
    Err(CentralityError::NonConvergent { max_iter })
}

/// Out-degree count per node (unweighted).
pub fn degree_centrality(g: &Graph) -> CentralityVector {
    CentralityVector {
        values: (0..g.n()).map(|i| g.out_degree(i) as f64).collect(),
        kind: CentralityKind::Degree,
    }
}

/// The `k` nodes maximizing `h0[j] * c[j]`, ties broken by ascending index.
pub fn top_k(c: &CentralityVector, h0: &[f64], k: usize) -> Result<Vec<u32>, CentralityError> {
    let n = c.values.len();
    assert_eq!(h0.len(), n, "h0 length must match node count");
    if k > n {
        return Err(CentralityError::KTooLarge { k, n });
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        let sa = h0[a as usize] * c.values[a as usize];
        let sb = h0[b as usize] * c.values[b as usize];
        sb.total_cmp(&sa).then(a.cmp(&b))
    });
    let mut picked: Vec<u32> = order.into_iter().take(k).collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Score vector `h0[j] * c[j]` used for selection and poll ordering.
pub fn selection_scores(c: &CentralityVector, h0: &[f64]) -> Vec<f64> {
    c.values
        .iter()
        .zip(h0.iter())
        .map(|(&ci, &hi)| ci * hi)
        .collect()
}
