//! Scalar metrics over opinion states.

use crate::graph::BlockLabel;

/// mean over the R block minus mean over the L block; None unless both
/// blocks are present.
pub fn polarization(x: &[f64], labels: &[BlockLabel]) -> Option<f64> {
    let mut sum_l = 0.0;
    let mut n_l = 0usize;
    let mut sum_r = 0.0;
    let mut n_r = 0usize;
    for (&v, &lab) in x.iter().zip(labels) {
        match lab {
            BlockLabel::L => {
                sum_l += v;
                n_l += 1;
            }
            BlockLabel::R => {
                sum_r += v;
                n_r += 1;
            }
            BlockLabel::Unlabeled => {}
        }
    }
    if n_l == 0 || n_r == 0 {
        return None;
    }
    Some(sum_r / n_r as f64 - sum_l / n_l as f64)
}

/// Equal-weight l1 distance from neutrality: mean of |x_i|.
pub fn extremism(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|v| v.abs()).sum::<f64>() / x.len() as f64
}

/// Linear-interpolation quantile of an already sorted slice.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_extremes_are_exact() {
        let labels = [BlockLabel::L, BlockLabel::L, BlockLabel::R, BlockLabel::R];
        let x = [-1.0, -1.0, 1.0, 1.0];
        assert_eq!(polarization(&x, &labels), Some(2.0));
        assert_eq!(extremism(&x), 1.0);
    }

    #[test]
    fn missing_block_gives_none() {
        let labels = [BlockLabel::L, BlockLabel::L];
        assert_eq!(polarization(&[0.1, 0.2], &labels), None);
    }

    #[test]
    fn quantile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_eq!(quantile(&v, 0.5), 2.5);
    }
}
