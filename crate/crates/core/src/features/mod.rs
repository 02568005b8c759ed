//! Appearance descriptors and distances: HSV color histograms, the
//! Bhattacharyya distance and the composite part distance with a pluggable
//! auxiliary term.

mod color;
mod raster;

pub use color::{hsv_to_rgb, rgb_to_hsv};
pub use raster::{hsv_histogram, Raster};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bin layout of the joint HSV histogram. Hue gets the finest quantization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramLayout {
    pub h_bins: usize,
    pub s_bins: usize,
    pub v_bins: usize,
}

impl Default for HistogramLayout {
    fn default() -> Self {
        HistogramLayout {
            h_bins: 16,
            s_bins: 4,
            v_bins: 4,
        }
    }
}

impl HistogramLayout {
    pub fn total_bins(&self) -> usize {
        self.h_bins * self.s_bins * self.v_bins
    }

    /// Flat bin index for an (h, s, v) triple; h in [0, 360), s and v in [0, 1].
    pub fn bin_index(&self, h: f64, s: f64, v: f64) -> usize {
        let hb = ((h / 360.0 * self.h_bins as f64) as usize).min(self.h_bins - 1);
        let sb = ((s * self.s_bins as f64) as usize).min(self.s_bins - 1);
        let vb = ((v * self.v_bins as f64) as usize).min(self.v_bins - 1);
        (hb * self.s_bins + sb) * self.v_bins + vb
    }
}

/// A non-negative histogram. Descriptor histograms are L1-normalized, except
/// for the all-zero histogram which marks an empty crop. Serializes as the
/// plain bins array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Histogram {
    pub bins: Vec<f64>,
}

impl Histogram {
    pub fn zeros(n: usize) -> Histogram {
        Histogram { bins: vec![0.0; n] }
    }

    /// Build from raw non-negative weights, L1-normalizing in place.
    pub fn normalized(mut bins: Vec<f64>) -> Result<Histogram> {
        let sum: f64 = bins.iter().sum();
        if bins.iter().any(|&b| b < 0.0 || !b.is_finite()) {
            return Err(Error::contract("histogram bins must be finite and non-negative"));
        }
        if sum > 0.0 {
            for b in &mut bins {
                *b /= sum;
            }
        }
        Ok(Histogram { bins })
    }

    pub fn sum(&self) -> f64 {
        self.bins.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.iter().all(|&b| b == 0.0)
    }

    pub fn is_normalized(&self) -> bool {
        (self.sum() - 1.0).abs() <= 1e-9
    }
}

/// Appearance descriptor of one part proposal: the normalized HSV histogram
/// plus an optional opaque auxiliary payload consumed by a pluggable metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub hsv: Histogram,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<Vec<f64>>,
}

impl Descriptor {
    pub fn new(hsv: Histogram) -> Descriptor {
        Descriptor { hsv, aux: None }
    }
}

/// Bhattacharyya distance sqrt(1 - sum_i sqrt(h1_i * h2_i)), clamped into
/// [0, 1]. Inputs must be L1-normalized or all-zero (empty crop); a zero
/// histogram is at distance 1 from everything except another zero histogram,
/// which compares at distance 1 as well.
pub fn bhattacharyya(h1: &Histogram, h2: &Histogram) -> Result<f64> {
    if h1.bins.len() != h2.bins.len() {
        return Err(Error::contract(format!(
            "histogram lengths differ: {} vs {}",
            h1.bins.len(),
            h2.bins.len()
        )));
    }
    for h in [h1, h2] {
        if !h.is_normalized() && !h.is_empty() {
            return Err(Error::contract(format!(
                "histogram not L1-normalized (sum = {})",
                h.sum()
            )));
        }
    }
    let coeff: f64 = h1
        .bins
        .iter()
        .zip(h2.bins.iter())
        .map(|(a, b)| (a * b).sqrt())
        .sum();
    Ok((1.0 - coeff.min(1.0)).max(0.0).sqrt().clamp(0.0, 1.0))
}

/// Pluggable second term of the composite part distance. Receives the aux
/// payloads of the two descriptors (either may be absent).
pub type AuxMetric = dyn Fn(Option<&[f64]>, Option<&[f64]>) -> f64 + Send + Sync;

/// Composite appearance distance between two descriptors: Bhattacharyya on
/// the HSV histograms plus an injected auxiliary metric (zero by default).
#[derive(Clone)]
pub struct PartDistance {
    aux: Option<Arc<AuxMetric>>,
}

impl Default for PartDistance {
    fn default() -> Self {
        PartDistance { aux: None }
    }
}

impl std::fmt::Debug for PartDistance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PartDistance")
            .field("aux", &self.aux.is_some())
            .finish()
    }
}

impl PartDistance {
    pub fn with_aux(
        f: impl Fn(Option<&[f64]>, Option<&[f64]>) -> f64 + Send + Sync + 'static,
    ) -> PartDistance {
        PartDistance {
            aux: Some(Arc::new(f)),
        }
    }

    pub fn eval(&self, a: &Descriptor, b: &Descriptor) -> Result<f64> {
        let base = bhattacharyya(&a.hsv, &b.hsv)?;
        let extra = match &self.aux {
            Some(f) => f(a.aux.as_deref(), b.aux.as_deref()),
            None => 0.0,
        };
        Ok(base + extra)
    }
}
