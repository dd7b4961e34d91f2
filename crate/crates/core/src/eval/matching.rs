//! Optimal one-to-one matching of predicted to ground-truth object masks.

use super::EvalError;
use crate::scene::MaskMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchPair {
    pub gt: u16,
    /// `None` when the object is unmatched or only matched with zero overlap.
    pub pred: Option<u16>,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// One entry per ground-truth object, ascending by label.
    pub pairs: Vec<MatchPair>,
}

impl Matching {
    pub fn total_iou(&self) -> f64 {
        self.pairs.iter().map(|p| p.iou).sum()
    }

    /// Mean matched IoU over ground-truth objects; `None` without objects.
    pub fn mean_iou(&self) -> Option<f64> {
        if self.pairs.is_empty() {
            None
        } else {
            Some(self.total_iou() / self.pairs.len() as f64)
        }
    }
}

/// IoU between every ground-truth object (rows) and predicted object (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct IouMatrix {
    pub gt_ids: Vec<u16>,
    pub pred_ids: Vec<u16>,
    /// Row-major, `gt_ids.len() × pred_ids.len()`.
    pub values: Vec<f64>,
}

impl IouMatrix {
    pub fn get(&self, g: usize, p: usize) -> f64 {
        self.values[g * self.pred_ids.len() + p]
    }
}

fn check_dims(pred: &MaskMap, gt: &MaskMap) -> Result<(), EvalError> {
    if pred.dims() != gt.dims() {
        return Err(EvalError::ShapeMismatch {
            expected: gt.dims(),
            found: pred.dims(),
        });
    }
    Ok(())
}

/// Pairwise IoU over non-background labels.
pub fn iou_matrix(pred: &MaskMap, gt: &MaskMap) -> Result<IouMatrix, EvalError> {
    check_dims(pred, gt)?;
    let gt_ids = gt.object_ids();
    let pred_ids = pred.object_ids();
    let mut gi = vec![usize::MAX; u16::MAX as usize + 1];
    let mut pi = vec![usize::MAX; u16::MAX as usize + 1];
    for (i, &l) in gt_ids.iter().enumerate() {
        gi[l as usize] = i;
    }
    for (i, &l) in pred_ids.iter().enumerate() {
        pi[l as usize] = i;
    }
    let (ng, np) = (gt_ids.len(), pred_ids.len());
    let mut inter = vec![0u64; ng * np];
    let mut gt_area = vec![0u64; ng];
    let mut pred_area = vec![0u64; np];
    for (&g, &p) in gt.labels().iter().zip(pred.labels()) {
        let g = if g == 0 { usize::MAX } else { gi[g as usize] };
        let p = if p == 0 { usize::MAX } else { pi[p as usize] };
        if g != usize::MAX {
            gt_area[g] += 1;
        }
        if p != usize::MAX {
            pred_area[p] += 1;
        }
        if g != usize::MAX && p != usize::MAX {
            inter[g * np + p] += 1;
        }
    }
    let values = (0..ng * np)
        .map(|k| {
            let (g, p) = (k / np, k % np);
            let i = inter[k];
            if i == 0 {
                0.0
            } else {
                i as f64 / (gt_area[g] + pred_area[p] - i) as f64
            }
        })
        .collect();
    Ok(IouMatrix {
        gt_ids,
        pred_ids,
        values,
    })
}

/// Minimum-cost assignment of rows to distinct columns (`rows <= cols`).
///
/// Shortest augmenting path with potentials, `O(rows² · cols)`.
pub fn hungarian(cost: &[f64], rows: usize, cols: usize) -> Vec<usize> {
    assert!(rows <= cols, "hungarian needs rows <= cols");
    assert_eq!(cost.len(), rows * cols);
    let c = |i: usize, j: usize| cost[(i - 1) * cols + (j - 1)];
    let mut u = vec![0.0f64; rows + 1];
    let mut v = vec![0.0f64; cols + 1];
    let mut p = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    for i in 1..=rows {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=cols {
                if !used[j] {
                    let cur = c(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0usize; rows];
    for j in 1..=cols {
        if p[j] != 0 {
            out[p[j] - 1] = j - 1;
        }
    }
    out
}

/// One-to-one assignment of ground-truth to predicted objects maximizing total IoU.
pub fn match_masks(pred: &MaskMap, gt: &MaskMap) -> Result<Matching, EvalError> {
    let m = iou_matrix(pred, gt)?;
    let (ng, np) = (m.gt_ids.len(), m.pred_ids.len());
    // Pad with zero-IoU dummy columns so every ground-truth row gets a column.
    let cols = np.max(ng);
    let mut cost = vec![0.0; ng * cols];
    for g in 0..ng {
        for p in 0..np {
            cost[g * cols + p] = -m.get(g, p);
        }
    }
    let assign = hungarian(&cost, ng, cols);
    let pairs = (0..ng)
        .map(|g| {
            let p = assign[g];
            let iou = if p < np { m.get(g, p) } else { 0.0 };
            MatchPair {
                gt: m.gt_ids[g],
                pred: if iou > 0.0 { Some(m.pred_ids[p]) } else { None },
                iou,
            }
        })
        .collect();
    Ok(Matching { pairs })
}

/// Mean over ground-truth objects of matched IoU. `None` when `gt` has no objects.
pub fn mean_iou(pred: &MaskMap, gt: &MaskMap) -> Result<Option<f64>, EvalError> {
    Ok(match_masks(pred, gt)?.mean_iou())
}
