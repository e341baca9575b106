use ndarray::{Array2, ArrayD, Axis, IxDyn};
use serde::{Deserialize, Serialize};

/// Variance of one tensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Upper,
    Lower,
}

/// Dense numeric tensor at a point. `slots[a]` is the variance of array
/// axis `a`, so index layout is explicit (e.g. `∂_m Γ^k_ij` is
/// `[Lower, Upper, Lower, Lower]`).
#[derive(Debug, Clone, PartialEq)]
pub struct TensorValue {
    pub slots: Vec<Slot>,
    pub data: ArrayD<f64>,
    pub point: Vec<f64>,
}

impl TensorValue {
    pub fn new(slots: Vec<Slot>, data: ArrayD<f64>, point: &[f64]) -> Self {
        assert_eq!(slots.len(), data.ndim(), "slot list must match tensor rank");
        let n = point.len();
        assert!(
            data.shape().iter().all(|&s| s == n),
            "tensor shape {:?} inconsistent with dimension {n}",
            data.shape()
        );
        TensorValue {
            slots,
            data,
            point: point.to_vec(),
        }
    }

    pub fn from_array<D: ndarray::Dimension>(slots: &[Slot], data: ndarray::Array<f64, D>, point: &[f64]) -> Self {
        Self::new(slots.to_vec(), data.into_dyn(), point)
    }

    pub fn scalar(value: f64, point: &[f64]) -> Self {
        TensorValue {
            slots: Vec::new(),
            data: ArrayD::from_elem(IxDyn(&[]), value),
            point: point.to_vec(),
        }
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    /// `(contravariant, covariant)` counts.
    pub fn signature(&self) -> (usize, usize) {
        let up = self.slots.iter().filter(|s| **s == Slot::Upper).count();
        (up, self.slots.len() - up)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn sub(&self, other: &TensorValue) -> TensorValue {
        assert_eq!(self.slots, other.slots, "cannot subtract tensors of different type");
        TensorValue {
            slots: self.slots.clone(),
            data: &self.data - &other.data,
            point: self.point.clone(),
        }
    }

    /// Pointwise norm from a full contraction with the metric: lower every
    /// upper slot with `g`, raise every lower slot with `g_inv`, contract
    /// against the original and take the square root.
    pub fn g_norm(&self, g: &Array2<f64>, g_inv: &Array2<f64>) -> f64 {
        let mut dual = self.data.clone();
        for (axis, slot) in self.slots.iter().enumerate() {
            let m = match slot {
                Slot::Upper => g,
                Slot::Lower => g_inv,
            };
            for mut lane in dual.lanes_mut(Axis(axis)) {
                let v = lane.to_owned();
                lane.assign(&m.dot(&v));
            }
        }
        let sq: f64 = self.data.iter().zip(dual.iter()).map(|(a, b)| a * b).sum();
        sq.max(0.0).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr1, arr2};

    #[test]
    fn euclidean_norm_when_metric_is_identity() {
        let g = Array2::<f64>::eye(2);
        let t = TensorValue::from_array(
            &[Slot::Lower, Slot::Lower],
            arr2(&[[2.0, 0.0], [0.0, 2.0]]),
            &[0.0, 0.0],
        );
        assert!((t.g_norm(&g, &g) - 8.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn vector_and_covector_norms_agree_under_index_lowering() {
        let g = arr2(&[[4.0, 0.0], [0.0, 9.0]]);
        let g_inv = arr2(&[[0.25, 0.0], [0.0, 1.0 / 9.0]]);
        let v = TensorValue::from_array(&[Slot::Upper], arr1(&[1.0, 1.0]), &[0.0, 0.0]);
        let w = TensorValue::from_array(&[Slot::Lower], g.dot(&arr1(&[1.0, 1.0])), &[0.0, 0.0]);
        assert!((v.g_norm(&g, &g_inv) - 13.0_f64.sqrt()).abs() < 1e-14);
        assert!((w.g_norm(&g, &g_inv) - 13.0_f64.sqrt()).abs() < 1e-14);
        assert_eq!(v.signature(), (1, 0));
    }
}
