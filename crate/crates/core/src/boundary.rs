//! Per-meridian layout boundaries: extraction from class maps and robust
//! cleanup.
//!
//! A boundary stores one polar angle per column. Columns without a usable
//! boundary carry `valid = false` and a NaN latitude. All window operations
//! treat the vector as a function on the circle.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labeling::{LayoutClass, LayoutClassMap};
use crate::stats::median;

/// Which wall edge a boundary describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    /// Ceiling to wall.
    Top,
    /// Wall to floor.
    Bottom,
}

#[derive(Debug, Clone)]
pub struct BoundaryVector {
    kind: BoundaryKind,
    latitudes: Vec<f64>,
    valid: Vec<bool>,
}

/// Equal when kinds and validity agree and valid latitudes are equal;
/// the NaN placeholders of invalid meridians are ignored.
impl PartialEq for BoundaryVector {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.valid == other.valid
            && self
                .latitudes
                .iter()
                .zip(&other.latitudes)
                .zip(&self.valid)
                .all(|((a, b), &ok)| !ok || a == b)
    }
}

impl BoundaryVector {
    /// Validates lengths and that valid latitudes are finite and in `[0, π]`.
    /// Invalid entries are normalized to NaN.
    pub fn new(kind: BoundaryKind, mut latitudes: Vec<f64>, valid: Vec<bool>) -> Result<Self> {
        if latitudes.len() != valid.len() {
            return Err(Error::Domain(format!(
                "boundary has {} latitudes but {} validity flags",
                latitudes.len(),
                valid.len()
            )));
        }
        if latitudes.is_empty() {
            return Err(Error::Domain(
                "boundary must cover at least one meridian".into(),
            ));
        }
        for (u, (lat, &ok)) in latitudes.iter_mut().zip(&valid).enumerate() {
            if ok {
                if !lat.is_finite() || !(0.0..=PI).contains(lat) {
                    return Err(Error::Domain(format!(
                        "meridian {u}: latitude {lat} is not a valid polar angle"
                    )));
                }
            } else {
                *lat = f64::NAN;
            }
        }
        Ok(Self {
            kind,
            latitudes,
            valid,
        })
    }

    /// Every finite latitude is valid, NaN marks an invalid meridian.
    pub fn from_latitudes(kind: BoundaryKind, latitudes: Vec<f64>) -> Result<Self> {
        let valid = latitudes.iter().map(|x| !x.is_nan()).collect();
        Self::new(kind, latitudes, valid)
    }

    pub fn invalid(kind: BoundaryKind, width: usize) -> Self {
        Self {
            kind,
            latitudes: vec![f64::NAN; width],
            valid: vec![false; width],
        }
    }

    #[inline]
    pub fn kind(&self) -> BoundaryKind {
        self.kind
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.latitudes.len()
    }

    pub fn latitudes(&self) -> &[f64] {
        &self.latitudes
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    #[inline]
    pub fn is_valid(&self, u: usize) -> bool {
        self.valid[u % self.width()]
    }

    /// Latitude at meridian `u` (wrapping) when valid.
    #[inline]
    pub fn latitude(&self, u: usize) -> Option<f64> {
        let u = u % self.width();
        self.valid[u].then_some(self.latitudes[u])
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    pub(crate) fn set(&mut self, u: usize, value: Option<f64>) {
        match value {
            Some(x) => {
                self.latitudes[u] = x;
                self.valid[u] = true;
            }
            None => {
                self.latitudes[u] = f64::NAN;
                self.valid[u] = false;
            }
        }
    }

    /// Rolls meridians right by `offset`, matching [`EquirectGrid::roll_columns`].
    ///
    /// [`EquirectGrid::roll_columns`]: crate::pano::EquirectGrid::roll_columns
    pub fn roll(&self, offset: isize) -> Self {
        let w = self.width() as isize;
        let mut out = self.clone();
        for u in 0..self.width() {
            let src = (u as isize - offset).rem_euclid(w) as usize;
            out.latitudes[u] = self.latitudes[src];
            out.valid[u] = self.valid[src];
        }
        out
    }

    /// Reverses meridian order, `u -> W - 1 - u`.
    pub fn flip(&self) -> Self {
        let mut out = self.clone();
        out.latitudes.reverse();
        out.valid.reverse();
        out
    }
}

/// Scans every column for the first ceiling→non-ceiling transition from the
/// zenith and the first floor→non-floor transition from the nadir.
///
/// Latitudes are placed on the edge shared by the two rows. Columns without
/// such a transition, or whose transition lies on the wrong side of the
/// horizon, are invalid.
pub fn greedy_vertical_edges(layout: &LayoutClassMap) -> (BoundaryVector, BoundaryVector) {
    let (w, h) = layout.dims();
    let row_step = PI / h as f64;
    let mut top = BoundaryVector::invalid(BoundaryKind::Top, w);
    let mut bottom = BoundaryVector::invalid(BoundaryKind::Bottom, w);
    for u in 0..w {
        let t = (0..h.saturating_sub(1)).find(|&v| {
            layout.get(u, v) == LayoutClass::Ceiling && layout.get(u, v + 1) != LayoutClass::Ceiling
        });
        if let Some(v) = t {
            let theta = (v + 1) as f64 * row_step;
            if theta < FRAC_PI_2 {
                top.set(u, Some(theta));
            }
        }
        let b = (1..h).rev().find(|&v| {
            layout.get(u, v) == LayoutClass::Floor && layout.get(u, v - 1) != LayoutClass::Floor
        });
        if let Some(v) = b {
            let theta = v as f64 * row_step;
            if theta > FRAC_PI_2 {
                bottom.set(u, Some(theta));
            }
        }
    }
    (top, bottom)
}

/// Circular median over the valid meridians of each window.
///
/// A meridian is valid in the output iff its window holds at least one
/// valid sample, so short gaps get filled.
pub fn median_filter_boundary(b: &BoundaryVector, window: usize) -> Result<BoundaryVector> {
    if window == 0 || window % 2 == 0 {
        return Err(Error::Config(format!(
            "median window must be odd and positive, got {window}"
        )));
    }
    let w = b.width();
    let half = (window / 2) as isize;
    let mut out = BoundaryVector::invalid(b.kind, w);
    let mut samples = Vec::with_capacity(window);
    for u in 0..w {
        samples.clear();
        for k in -half..=half {
            let j = (u as isize + k).rem_euclid(w as isize) as usize;
            if let Some(x) = b.latitude(j) {
                samples.push(x);
            }
        }
        out.set(u, median(&mut samples));
    }
    Ok(out)
}

/// Diagnostics of a MAD rejection pass.
#[derive(Debug, Clone, PartialEq)]
pub struct MadReport {
    pub median: Option<f64>,
    pub mad: Option<f64>,
    pub rejected: usize,
    /// Set when fewer than [`MAD_MIN_SAMPLES`] meridians were valid and the
    /// boundary was passed through unchanged.
    pub skipped: bool,
}

pub const MAD_MIN_SAMPLES: usize = 8;

/// Consistency constant relating MAD to a normal standard deviation.
const MODIFIED_Z_SCALE: f64 = 0.6745;
/// Ratio of standard deviation to mean absolute deviation for a normal.
const MEAN_AD_SCALE: f64 = 1.253314;

/// Invalidates meridians whose modified z-score
/// `0.6745·|θ − median| / MAD` exceeds `z_threshold`.
///
/// When more than half the samples coincide the MAD collapses to zero; the
/// score then falls back to `|θ − median| / (1.253314·MeanAD)`. A constant
/// boundary has both at zero and nothing is rejected.
pub fn mad_reject(b: &BoundaryVector, z_threshold: f64) -> (BoundaryVector, MadReport) {
    let mut values: Vec<f64> = (0..b.width()).filter_map(|u| b.latitude(u)).collect();
    if values.len() < MAD_MIN_SAMPLES {
        return (
            b.clone(),
            MadReport {
                median: None,
                mad: None,
                rejected: 0,
                skipped: true,
            },
        );
    }
    let med = median(&mut values).expect("non-empty");
    let mut deviations: Vec<f64> = values.iter().map(|x| (x - med).abs()).collect();
    let mad = median(&mut deviations).expect("non-empty");
    let mean_ad = deviations.iter().sum::<f64>() / deviations.len() as f64;
    let scale = if mad > 0.0 {
        Some(mad / MODIFIED_Z_SCALE)
    } else if mean_ad > 0.0 {
        Some(MEAN_AD_SCALE * mean_ad)
    } else {
        None
    };
    let mut out = b.clone();
    let mut rejected = 0;
    if let Some(scale) = scale {
        for u in 0..b.width() {
            if let Some(x) = b.latitude(u) {
                let score = (x - med).abs() / scale;
                if score > z_threshold {
                    out.set(u, None);
                    rejected += 1;
                }
            }
        }
    }
    (
        out,
        MadReport {
            median: Some(med),
            mad: Some(mad),
            rejected,
            skipped: false,
        },
    )
}

/// Top boundary as normalized heights `l = 1 − θ/(π/2)`: 1 at the zenith,
/// 0 at the horizon. Invalid meridians map to NaN.
pub fn to_normalized(b: &BoundaryVector) -> Result<Vec<f64>> {
    if b.kind != BoundaryKind::Top {
        return Err(Error::Domain(
            "normalized heights are only defined for top boundaries".into(),
        ));
    }
    (0..b.width())
        .map(|u| match b.latitude(u) {
            None => Ok(f64::NAN),
            Some(theta) if theta <= FRAC_PI_2 => Ok(1.0 - theta / FRAC_PI_2),
            Some(theta) => Err(Error::Domain(format!(
                "meridian {u}: top latitude {theta} lies below the horizon"
            ))),
        })
        .collect()
}

/// Inverse of [`to_normalized`], `θ = (π/2)(1 − l)`. NaN entries become
/// invalid meridians.
pub fn from_normalized(heights: &[f64]) -> Result<BoundaryVector> {
    let lats = heights
        .iter()
        .enumerate()
        .map(|(u, &l)| {
            if l.is_nan() {
                Ok(f64::NAN)
            } else if (0.0..=1.0).contains(&l) {
                Ok(FRAC_PI_2 * (1.0 - l))
            } else {
                Err(Error::Domain(format!(
                    "meridian {u}: normalized height {l} outside [0, 1]"
                )))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    BoundaryVector::from_latitudes(BoundaryKind::Top, lats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn column_map(h: usize, ceiling_end: usize, wall_end: usize) -> LayoutClassMap {
        let mut ids = vec![0u8; 2 * h];
        for v in 0..h {
            let c = if v < ceiling_end {
                0
            } else if v < wall_end {
                1
            } else {
                2
            };
            ids[v * 2] = c;
            ids[v * 2 + 1] = 1;
        }
        LayoutClassMap::from_ids(2, h, &ids).unwrap()
    }

    #[test]
    fn direct_scan() {
        // ceiling rows 0..=9, wall 10..=20, floor 21..=31
        let map = column_map(32, 10, 21);
        let (top, bottom) = greedy_vertical_edges(&map);
        assert_eq!(top.latitude(0), Some(10.0 * PI / 32.0));
        assert_eq!(bottom.latitude(0), Some(21.0 * PI / 32.0));
        // column 1 is all wall
        assert!(!top.is_valid(1));
        assert!(!bottom.is_valid(1));
    }

    #[test]
    fn transition_on_wrong_side_of_horizon_is_invalid() {
        let map = column_map(32, 20, 25);
        let (top, bottom) = greedy_vertical_edges(&map);
        assert!(!top.is_valid(0));
        assert!(bottom.is_valid(0));
    }

    fn constant(width: usize, x: f64) -> BoundaryVector {
        BoundaryVector::from_latitudes(BoundaryKind::Top, vec![x; width]).unwrap()
    }

    #[test]
    fn median_examples() {
        let flat = constant(16, 0.8);
        assert_eq!(median_filter_boundary(&flat, 5).unwrap(), flat);

        let mut spiky = flat.clone();
        spiky.set(0, Some(1.1));
        assert_eq!(median_filter_boundary(&spiky, 5).unwrap(), flat);
        assert_eq!(median_filter_boundary(&spiky, 1).unwrap(), spiky);
        assert!(median_filter_boundary(&spiky, 4).is_err());
        assert!(median_filter_boundary(&spiky, 0).is_err());
    }

    #[test]
    fn median_fills_short_gaps_only() {
        let mut b = constant(12, 0.6);
        for u in 3..8 {
            b.set(u, None);
        }
        let out = median_filter_boundary(&b, 3).unwrap();
        assert!(out.is_valid(3) && out.is_valid(7));
        assert!(!out.is_valid(4) && !out.is_valid(5) && !out.is_valid(6));
    }

    #[test]
    fn median_idempotent_on_spike_input() {
        let mut b = constant(20, 0.9);
        b.set(11, Some(0.2));
        let once = median_filter_boundary(&b, 3).unwrap();
        let twice = median_filter_boundary(&once, 3).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn mad_examples() {
        let flat = constant(512, 0.9);
        let (out, report) = mad_reject(&flat, 3.5);
        assert_eq!(out, flat);
        assert_eq!(report.mad, Some(0.0));
        assert_eq!(report.rejected, 0);

        // MAD of a constant-plus-one-outlier set is 0, so add mild spread to
        // exercise the score path: the outlier's score is huge.
        let mut lats: Vec<f64> = (0..512)
            .map(|u| 0.9 + 0.01 * ((u % 7) as f64 - 3.0))
            .collect();
        lats[100] = 2.0;
        let b = BoundaryVector::from_latitudes(BoundaryKind::Top, lats).unwrap();
        let (out, report) = mad_reject(&b, 3.5);
        assert!(!out.is_valid(100));
        assert_eq!(report.rejected, 1);
        let (same, _) = mad_reject(&b, f64::INFINITY);
        assert_eq!(same.valid(), b.valid());
    }

    #[test]
    fn mad_outlier_against_constant_background() {
        // 511 meridians at 0.9 and one at 2.0: median 0.9, MAD 0,
        // MeanAD = 1.1/512, score = 1.1 / (1.253314 · 1.1/512) ≈ 408.5.
        let mut lats = vec![0.9; 512];
        lats[7] = 2.0;
        let b = BoundaryVector::from_latitudes(BoundaryKind::Top, lats).unwrap();
        let (out, report) = mad_reject(&b, 3.5);
        assert_eq!(report.mad, Some(0.0));
        assert!(!out.is_valid(7));
        assert_eq!(report.rejected, 1);
        let (kept, _) = mad_reject(&b, 409.0);
        assert!(kept.is_valid(7));
    }

    #[test]
    fn mad_too_few_samples() {
        let mut b = constant(16, 0.5);
        for u in 0..10 {
            b.set(u, None);
        }
        let (out, report) = mad_reject(&b, 3.5);
        assert!(report.skipped);
        assert_eq!(out, b);
    }

    #[test]
    fn normalized_examples() {
        let b =
            BoundaryVector::from_latitudes(BoundaryKind::Top, vec![FRAC_PI_2, 0.0, 0.5]).unwrap();
        let l = to_normalized(&b).unwrap();
        assert_eq!(l[0], 0.0);
        assert_eq!(l[1], 1.0);
        let back = from_normalized(&l).unwrap();
        for (a, b) in back.latitudes().iter().zip(b.latitudes()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(
            from_normalized(&[0.0]).unwrap().latitude(0),
            Some(FRAC_PI_2)
        );
        assert_eq!(from_normalized(&[1.0]).unwrap().latitude(0), Some(0.0));
        assert!(from_normalized(&[1.5]).is_err());
        assert!(from_normalized(&[-0.1]).is_err());

        let bottom = BoundaryVector::from_latitudes(BoundaryKind::Bottom, vec![2.0]).unwrap();
        assert!(to_normalized(&bottom).is_err());
    }

    #[test]
    fn constructor_checks() {
        assert!(BoundaryVector::new(BoundaryKind::Top, vec![0.1], vec![true, true]).is_err());
        assert!(BoundaryVector::new(BoundaryKind::Top, vec![f64::NAN], vec![true]).is_err());
        assert!(BoundaryVector::new(BoundaryKind::Top, vec![4.0], vec![true]).is_err());
        let b = BoundaryVector::new(BoundaryKind::Top, vec![4.0], vec![false]).unwrap();
        assert!(b.latitudes()[0].is_nan());
    }

    fn arb_boundary() -> impl Strategy<Value = BoundaryVector> {
        proptest::collection::vec(proptest::option::weighted(0.8, 0.1f64..1.5), 8..64).prop_map(
            |v| {
                let lats = v.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect();
                BoundaryVector::from_latitudes(BoundaryKind::Top, lats).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn mad_never_revalidates(b in arb_boundary(), z in 0.5f64..5.0) {
            let (out, _) = mad_reject(&b, z);
            for u in 0..b.width() {
                prop_assert!(b.is_valid(u) || !out.is_valid(u));
            }
        }

        #[test]
        fn median_commutes_with_roll(b in arb_boundary(), k in -70isize..70) {
            let a = median_filter_boundary(&b.roll(k), 5).unwrap();
            let c = median_filter_boundary(&b, 5).unwrap().roll(k);
            prop_assert_eq!(a, c);
        }

        #[test]
        fn greedy_commutes_with_roll(ids in proptest::collection::vec(0u8..4, 8 * 6), k in -20isize..20) {
            let map = LayoutClassMap::from_ids(8, 6, &ids).unwrap();
            let (t1, b1) = greedy_vertical_edges(&map.roll_columns(k));
            let (t0, b0) = greedy_vertical_edges(&map);
            prop_assert_eq!(t1, t0.roll(k));
            prop_assert_eq!(b1, b0.roll(k));
        }
    }
}
