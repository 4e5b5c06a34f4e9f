//! Fully connected CRF over the four layout classes.
//!
//! Two Gaussian pairwise kernels with Potts compatibility: a spatial
//! smoothness kernel and a bilateral kernel over pixel distance and surface
//! normal distance. Horizontal pixel distance wraps around the seam.
//!
//! Messages are computed exactly. The spatial Gaussian is separable, so the
//! smoothness term is a row pass followed by a column pass. For the
//! bilateral term, pixels that share a bit-identical normal form a group:
//! the normal factor is then constant over the group and the group's message
//! is one separable filter of its masked marginals. Pixels in groups too
//! small to be worth a full filter are summed pair by pair.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::classes::{LayoutClass, LayoutClassMap, UnaryField};
use crate::error::{check_shape, Error, Result};
use crate::pano::{normal_is_valid, Cart3, EquirectGrid};

const K: usize = 4;

/// Taps below this weight are dropped; their total is far below f64 rounding
/// of the message sums.
const TAP_CUTOFF: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrfParams {
    pub sigma_smooth_px: f64,
    pub sigma_bilateral_px: f64,
    pub sigma_normal: f64,
    pub iterations: usize,
    pub smooth_weight: f64,
    pub bilateral_weight: f64,
    /// Inference runs on `downsample × downsample` blocks when above 1.
    pub downsample: usize,
}

impl Default for CrfParams {
    fn default() -> Self {
        Self {
            sigma_smooth_px: 7.0,
            sigma_bilateral_px: 35.0,
            sigma_normal: 0.2,
            iterations: 5,
            smooth_weight: 1.0,
            bilateral_weight: 1.0,
            downsample: 1,
        }
    }
}

impl CrfParams {
    pub fn validate(&self) -> Result<()> {
        let sigmas = [
            self.sigma_smooth_px,
            self.sigma_bilateral_px,
            self.sigma_normal,
        ];
        if sigmas.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::Config(format!(
                "crf sigmas must be positive and finite, got {sigmas:?}"
            )));
        }
        if self.iterations == 0 {
            return Err(Error::Config("crf iterations must be at least 1".into()));
        }
        for (name, w) in [
            ("smooth_weight", self.smooth_weight),
            ("bilateral_weight", self.bilateral_weight),
        ] {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::Config(format!(
                    "crf {name} must be non-negative, got {w}"
                )));
            }
        }
        if self.downsample == 0 {
            return Err(Error::Config(
                "crf downsample factor must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Symmetric 1-D Gaussian taps `exp(−d²/2σ²)` for `d = 0..len`, cut where
/// they fall below [`TAP_CUTOFF`].
fn gaussian_taps(sigma: f64, len: usize) -> Vec<f64> {
    let c = 0.5 / (sigma * sigma);
    (0..len)
        .map(|d| (-((d * d) as f64) * c).exp())
        .take_while(|&t| t >= TAP_CUTOFF)
        .collect()
}

/// Separable spatial Gaussian over a 4-channel field.
#[derive(Debug, Clone)]
struct SpatialFilter {
    width: usize,
    height: usize,
    /// Indexed by wrapped column distance, at most `W/2`.
    taps_u: Vec<f64>,
    taps_v: Vec<f64>,
}

impl SpatialFilter {
    fn new(sigma: f64, width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            taps_u: gaussian_taps(sigma, width / 2 + 1),
            taps_v: gaussian_taps(sigma, height),
        }
    }

    /// Weight between two pixels; zero past the cutoff.
    #[inline]
    fn weight(&self, du: usize, dv: usize) -> f64 {
        let du = du.min(self.width - du);
        match (self.taps_u.get(du), self.taps_v.get(dv)) {
            (Some(a), Some(b)) => a * b,
            _ => 0.0,
        }
    }

    /// Full 2-D filter including the centre tap. Neighbours at `±d` are added
    /// before weighting, which keeps the sum order invariant under circular
    /// shifts and mirroring of the columns.
    fn apply(&self, field: &[[f64; K]], rows: &mut Vec<[f64; K]>, out: &mut Vec<[f64; K]>) {
        let (w, h) = (self.width, self.height);
        rows.clear();
        rows.resize(w * h, [0.0; K]);
        let reach = self.taps_u.len() - 1;
        let half_even = w % 2 == 0 && reach >= w / 2;
        let pairs = if half_even {
            w / 2 - 1
        } else {
            reach.min((w - 1) / 2)
        };
        for v in 0..h {
            let row = &field[v * w..(v + 1) * w];
            let dst = &mut rows[v * w..(v + 1) * w];
            for u in 0..w {
                let mut acc = row[u].map(|x| x * self.taps_u[0]);
                for d in 1..=pairs {
                    let (a, b) = (row[(u + d) % w], row[(u + w - d) % w]);
                    let t = self.taps_u[d];
                    for l in 0..K {
                        acc[l] += t * (a[l] + b[l]);
                    }
                }
                if half_even {
                    let a = row[(u + w / 2) % w];
                    let t = self.taps_u[w / 2];
                    for l in 0..K {
                        acc[l] += t * a[l];
                    }
                }
                dst[u] = acc;
            }
        }
        out.clear();
        out.resize(w * h, [0.0; K]);
        let reach = self.taps_v.len() - 1;
        for v in 0..h {
            for u in 0..w {
                let mut acc = rows[v * w + u].map(|x| x * self.taps_v[0]);
                for d in 1..=reach.min(h - 1) {
                    let up = if v >= d {
                        Some(rows[(v - d) * w + u])
                    } else {
                        None
                    };
                    let down = if v + d < h {
                        Some(rows[(v + d) * w + u])
                    } else {
                        None
                    };
                    let t = self.taps_v[d];
                    let pair = match (up, down) {
                        (Some(a), Some(b)) => [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]],
                        (Some(a), None) | (None, Some(a)) => a,
                        (None, None) => break,
                    };
                    for l in 0..K {
                        acc[l] += t * pair[l];
                    }
                }
                out[v * w + u] = acc;
            }
        }
    }
}

/// Pixels sharing one bit-identical normal.
#[derive(Debug, Clone)]
struct NormalGroup {
    normal: Cart3,
    members: Vec<usize>,
}

fn normal_key(n: &[f32]) -> [u32; 3] {
    // adding +0.0 folds -0.0 into +0.0
    [
        (n[0] + 0.0).to_bits(),
        (n[1] + 0.0).to_bits(),
        (n[2] + 0.0).to_bits(),
    ]
}

/// Mean-field state for one CRF instance.
///
/// The update is `Q_i(l) ∝ P_i(l) · exp(Σ_m w_m Σ_{j≠i} k_m(i, j) Q_j(l))`,
/// which is the Potts message with the label-independent part dropped.
#[derive(Debug, Clone)]
pub struct MeanField {
    width: usize,
    height: usize,
    params: CrfParams,
    log_unary: Vec<[f64; K]>,
    q: Vec<[f64; K]>,
    normals: Vec<Option<Cart3>>,
    smooth: SpatialFilter,
    bilateral: SpatialFilter,
    /// Groups filtered as a whole.
    dense: Vec<NormalGroup>,
    /// Pixels in small groups, summed pair by pair.
    sparse: Vec<usize>,
}

impl MeanField {
    /// Sets up inference at the resolution of the inputs. The `downsample`
    /// field of `params` is ignored here; see [`crf_marginals`].
    pub fn new(unary: &UnaryField, normals: &EquirectGrid, params: &CrfParams) -> Result<Self> {
        params.validate()?;
        unary.same_shape(normals.dims())?;
        if normals.channels() != 3 {
            return Err(Error::Domain(format!(
                "normal map needs 3 channels, got {}",
                normals.channels()
            )));
        }
        let (width, height) = unary.dims();
        let log_unary: Vec<[f64; K]> = unary
            .probs()
            .iter()
            .map(|p| p.map(|x| x.max(f64::MIN_POSITIVE).ln()))
            .collect();
        let q = log_unary.iter().map(softmax).collect();

        let mut groups: BTreeMap<[u32; 3], Vec<usize>> = BTreeMap::new();
        let mut normal_vecs = Vec::with_capacity(width * height);
        for v in 0..height {
            for u in 0..width {
                let n = normals.pixel(u, v);
                if normal_is_valid(n) {
                    groups.entry(normal_key(n)).or_default().push(v * width + u);
                    normal_vecs.push(Some(Cart3::new(n[0] as f64, n[1] as f64, n[2] as f64)));
                } else {
                    normal_vecs.push(None);
                }
            }
        }
        // A group filter costs about W + H operations per pixel of the whole
        // grid; pairwise summation costs one per member per pixel.
        let dense_min = (width + height).max(1);
        let mut dense = Vec::new();
        let mut sparse = Vec::new();
        for members in groups.into_values() {
            if members.len() >= dense_min {
                let normal = normal_vecs[members[0]].expect("grouped pixels have normals");
                dense.push(NormalGroup { normal, members });
            } else {
                sparse.extend(members);
            }
        }
        sparse.sort_unstable();

        Ok(Self {
            width,
            height,
            params: *params,
            log_unary,
            q,
            normals: normal_vecs,
            smooth: SpatialFilter::new(params.sigma_smooth_px, width, height),
            bilateral: SpatialFilter::new(params.sigma_bilateral_px, width, height),
            dense,
            sparse,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Current marginals, row-major, in class-id order.
    pub fn marginals(&self) -> &[[f64; K]] {
        &self.q
    }

    /// One parallel mean-field update of every pixel.
    pub fn step(&mut self) {
        let n = self.width * self.height;
        let mut logits = self.log_unary.clone();
        let mut rows = Vec::new();
        let mut filtered = Vec::new();

        if self.params.smooth_weight > 0.0 {
            self.smooth.apply(&self.q, &mut rows, &mut filtered);
            let ws = self.params.smooth_weight;
            for i in 0..n {
                for l in 0..K {
                    logits[i][l] += ws * (filtered[i][l] - self.q[i][l]);
                }
            }
        }

        if self.params.bilateral_weight > 0.0 {
            let wb = self.params.bilateral_weight;
            let c = 0.5 / (self.params.sigma_normal * self.params.sigma_normal);
            let mut masked = vec![[0.0; K]; n];
            for group in &self.dense {
                masked.iter_mut().for_each(|x| *x = [0.0; K]);
                for &j in &group.members {
                    masked[j] = self.q[j];
                }
                self.bilateral.apply(&masked, &mut rows, &mut filtered);
                for i in 0..n {
                    let Some(ni) = self.normals[i] else { continue };
                    let kn = (-(ni - group.normal).norm_squared() * c).exp();
                    if kn == 0.0 {
                        continue;
                    }
                    for l in 0..K {
                        logits[i][l] += wb * kn * filtered[i][l];
                    }
                }
                for &i in &group.members {
                    for l in 0..K {
                        logits[i][l] -= wb * self.q[i][l];
                    }
                }
            }
            if !self.sparse.is_empty() {
                let w = self.width;
                for i in 0..n {
                    let Some(ni) = self.normals[i] else { continue };
                    let (ui, vi) = (i % w, i / w);
                    let mut acc = [0.0; K];
                    for &j in &self.sparse {
                        if j == i {
                            continue;
                        }
                        let (uj, vj) = (j % w, j / w);
                        let ks = self.bilateral.weight(ui.abs_diff(uj), vi.abs_diff(vj));
                        if ks == 0.0 {
                            continue;
                        }
                        let nj = self.normals[j].expect("sparse pixels have normals");
                        let k = ks * (-(ni - nj).norm_squared() * c).exp();
                        for l in 0..K {
                            acc[l] += k * self.q[j][l];
                        }
                    }
                    for l in 0..K {
                        logits[i][l] += wb * acc[l];
                    }
                }
            }
        }

        for (q, x) in self.q.iter_mut().zip(&logits) {
            *q = softmax(x);
        }
    }

    pub fn iterate(&mut self) {
        for _ in 0..self.params.iterations {
            self.step();
        }
    }

    /// Per-pixel argmax; ties go to the lower class id.
    pub fn labels(&self) -> LayoutClassMap {
        let classes = self.q.iter().map(argmax).collect();
        LayoutClassMap::from_classes(self.width, self.height, classes)
            .expect("dims come from a validated unary field")
    }
}

fn softmax(x: &[f64; K]) -> [f64; K] {
    let m = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e = x.map(|v| (v - m).exp());
    let s: f64 = e.iter().sum();
    e.map(|v| v / s)
}

fn argmax(p: &[f64; K]) -> LayoutClass {
    let mut best = 0;
    for l in 1..K {
        if p[l] > p[best] {
            best = l;
        }
    }
    LayoutClass::ALL[best]
}

/// Final marginals at the input resolution.
///
/// With `downsample = f > 1` the unary is block-averaged, normals are
/// averaged over the valid pixels of each block, the spatial sigmas are
/// divided by `f`, and the coarse marginals are copied back to every pixel
/// of their block. Width and height must be divisible by `f`.
pub fn crf_marginals(
    unary: &UnaryField,
    normals: &EquirectGrid,
    params: &CrfParams,
) -> Result<Vec<[f64; K]>> {
    params.validate()?;
    check_shape(unary.dims(), normals.dims())?;
    let f = params.downsample;
    if f == 1 {
        let mut mf = MeanField::new(unary, normals, params)?;
        mf.iterate();
        return Ok(mf.q);
    }
    let (w, h) = unary.dims();
    if w % f != 0 || h % f != 0 || w / f < 2 {
        return Err(Error::Config(format!(
            "crf downsample factor {f} does not divide {w}x{h}"
        )));
    }
    let (cw, ch) = (w / f, h / f);
    let area = (f * f) as f64;
    let mut probs = vec![[0.0; K]; cw * ch];
    let mut coarse_normals = EquirectGrid::new(cw, ch, 3)?;
    for cv in 0..ch {
        for cu in 0..cw {
            let mut p = [0.0; K];
            let mut n = Cart3::zeros();
            for v in cv * f..(cv + 1) * f {
                for u in cu * f..(cu + 1) * f {
                    let src = unary.probs()[v * w + u];
                    for l in 0..K {
                        p[l] += src[l] / area;
                    }
                    let px = normals.pixel(u, v);
                    if normal_is_valid(px) {
                        n += Cart3::new(px[0] as f64, px[1] as f64, px[2] as f64);
                    }
                }
            }
            let s: f64 = p.iter().sum();
            probs[cv * cw + cu] = p.map(|x| x / s);
            let len = n.norm();
            if len > 0.0 {
                let n = n / len;
                let dst = coarse_normals.pixel_mut(cu, cv);
                dst.copy_from_slice(&[n.x as f32, n.y as f32, n.z as f32]);
            }
        }
    }
    let coarse_unary = UnaryField::from_probs(cw, ch, probs)?;
    let coarse_params = CrfParams {
        sigma_smooth_px: params.sigma_smooth_px / f as f64,
        sigma_bilateral_px: params.sigma_bilateral_px / f as f64,
        downsample: 1,
        ..*params
    };
    let mut mf = MeanField::new(&coarse_unary, &coarse_normals, &coarse_params)?;
    mf.iterate();
    let mut out = Vec::with_capacity(w * h);
    for v in 0..h {
        for u in 0..w {
            out.push(mf.q[(v / f) * cw + u / f]);
        }
    }
    Ok(out)
}

/// Mean-field refinement followed by a per-pixel argmax.
pub fn crf_refine(
    unary: &UnaryField,
    normals: &EquirectGrid,
    params: &CrfParams,
) -> Result<LayoutClassMap> {
    let q = crf_marginals(unary, normals, params)?;
    let (w, h) = unary.dims();
    LayoutClassMap::from_classes(w, h, q.iter().map(argmax).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::build_unary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct O(N²) evaluation of the same update.
    fn brute_force(
        unary: &UnaryField,
        normals: &EquirectGrid,
        p: &CrfParams,
    ) -> Vec<Vec<[f64; K]>> {
        let (w, h) = unary.dims();
        let n = w * h;
        let logp: Vec<[f64; K]> = unary
            .probs()
            .iter()
            .map(|x| x.map(|v| v.max(f64::MIN_POSITIVE).ln()))
            .collect();
        let mut q: Vec<[f64; K]> = logp.iter().map(softmax).collect();
        let nv: Vec<Option<Cart3>> = (0..n)
            .map(|i| {
                let px = normals.pixel(i % w, i / w);
                normal_is_valid(px).then(|| Cart3::new(px[0] as f64, px[1] as f64, px[2] as f64))
            })
            .collect();
        let mut history = Vec::new();
        for _ in 0..p.iterations {
            let mut next = Vec::with_capacity(n);
            for i in 0..n {
                let mut logits = logp[i];
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let du = (i % w).abs_diff(j % w);
                    let du = du.min(w - du) as f64;
                    let dv = (i / w).abs_diff(j / w) as f64;
                    let d2 = du * du + dv * dv;
                    let mut k = p.smooth_weight * (-d2 / (2.0 * p.sigma_smooth_px.powi(2))).exp();
                    if let (Some(a), Some(b)) = (nv[i], nv[j]) {
                        k += p.bilateral_weight
                            * (-d2 / (2.0 * p.sigma_bilateral_px.powi(2))
                                - (a - b).norm_squared() / (2.0 * p.sigma_normal.powi(2)))
                            .exp();
                    }
                    for l in 0..K {
                        logits[l] += k * q[j][l];
                    }
                }
                next.push(softmax(&logits));
            }
            q = next;
            history.push(q.clone());
        }
        history
    }

    fn random_instance(
        seed: u64,
        w: usize,
        h: usize,
        distinct_normals: usize,
    ) -> (UnaryField, EquirectGrid) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probs = (0..w * h)
            .map(|_| {
                let raw: [f64; K] = std::array::from_fn(|_| rng.random_range(0.05..1.0));
                let s: f64 = raw.iter().sum();
                raw.map(|x| x / s)
            })
            .collect();
        let palette: Vec<Cart3> = (0..distinct_normals)
            .map(|_| {
                Cart3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
                .normalize()
            })
            .collect();
        let normals = EquirectGrid::from_fn(w, h, 3, |_, _, px| {
            if rng.random_bool(0.05) {
                return;
            }
            let n = palette[rng.random_range(0..palette.len())];
            px.copy_from_slice(&[n.x as f32, n.y as f32, n.z as f32]);
        })
        .unwrap();
        (UnaryField::from_probs(w, h, probs).unwrap(), normals)
    }

    fn small_params() -> CrfParams {
        // weights scaled so messages and unaries are of similar size
        CrfParams {
            sigma_smooth_px: 3.0,
            sigma_bilateral_px: 10.0,
            sigma_normal: 0.2,
            iterations: 5,
            smooth_weight: 0.05,
            bilateral_weight: 0.01,
            downsample: 1,
        }
    }

    fn assert_close(a: &[[f64; K]], b: &[[f64; K]], tol: f64) {
        for (x, y) in a.iter().zip(b) {
            for l in 0..K {
                assert!((x[l] - y[l]).abs() < tol, "{x:?} vs {y:?}");
            }
        }
    }

    #[test]
    fn matches_brute_force_with_sparse_normals() {
        let (unary, normals) = random_instance(1, 24, 12, 1000);
        let p = small_params();
        let reference = brute_force(&unary, &normals, &p);
        let mut mf = MeanField::new(&unary, &normals, &p).unwrap();
        assert!(mf.dense.is_empty());
        for expect in &reference {
            mf.step();
            assert_close(mf.marginals(), expect, 1e-9);
        }
    }

    #[test]
    fn matches_brute_force_with_grouped_normals() {
        let (unary, normals) = random_instance(2, 24, 12, 3);
        let p = small_params();
        let reference = brute_force(&unary, &normals, &p);
        let mut mf = MeanField::new(&unary, &normals, &p).unwrap();
        assert!(!mf.dense.is_empty());
        for expect in &reference {
            mf.step();
            assert_close(mf.marginals(), expect, 1e-9);
        }
    }

    #[test]
    fn default_parameters_match_brute_force() {
        let (unary, normals) = random_instance(3, 32, 16, 4);
        let p = CrfParams::default();
        let reference = brute_force(&unary, &normals, &p);
        let mut mf = MeanField::new(&unary, &normals, &p).unwrap();
        mf.iterate();
        let last = reference.last().unwrap();
        let agree = mf
            .marginals()
            .iter()
            .zip(last)
            .filter(|(a, b)| argmax(a) == argmax(b))
            .count();
        assert_eq!(agree, 32 * 16);
    }

    #[test]
    fn marginals_normalized_every_step() {
        let (unary, normals) = random_instance(4, 32, 16, 5);
        let mut mf = MeanField::new(&unary, &normals, &CrfParams::default()).unwrap();
        for _ in 0..5 {
            mf.step();
            for q in mf.marginals() {
                assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(q.iter().all(|x| (0.0..=1.0).contains(x)));
            }
        }
    }

    #[test]
    fn iterations_zero_rejected_one_accepted() {
        let (unary, normals) = random_instance(5, 8, 4, 2);
        let p = CrfParams {
            iterations: 0,
            ..CrfParams::default()
        };
        assert!(crf_refine(&unary, &normals, &p).is_err());
        let p = CrfParams {
            iterations: 1,
            ..CrfParams::default()
        };
        let q = crf_marginals(&unary, &normals, &p).unwrap();
        assert!(q
            .iter()
            .all(|x| (x.iter().sum::<f64>() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn size_mismatch_rejected() {
        let (unary, _) = random_instance(6, 8, 4, 2);
        let normals = EquirectGrid::new(10, 4, 3).unwrap();
        assert!(matches!(
            crf_refine(&unary, &normals, &CrfParams::default()),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn consistent_input_is_fixed_point() {
        let (w, h) = (32, 16);
        let classes: Vec<LayoutClass> = (0..w * h)
            .map(|i| match i / w {
                v if v < 5 => LayoutClass::Ceiling,
                v if v < 11 => LayoutClass::Wall,
                _ => LayoutClass::Floor,
            })
            .collect();
        let map = LayoutClassMap::from_classes(w, h, classes).unwrap();
        let normals = EquirectGrid::from_fn(w, h, 3, |_, v, px| {
            let n = match map.get(0, v) {
                LayoutClass::Ceiling => [0.0, -1.0, 0.0],
                LayoutClass::Floor => [0.0, 1.0, 0.0],
                _ => [0.0, 0.0, -1.0],
            };
            px.copy_from_slice(&n);
        })
        .unwrap();
        let unary = build_unary(&map, 1.0 - 1e-9).unwrap();
        assert_eq!(
            crf_refine(&unary, &normals, &CrfParams::default()).unwrap(),
            map
        );
    }

    #[test]
    fn isolated_hole_absorbed() {
        let mut map = LayoutClassMap::filled(32, 16, LayoutClass::Wall).unwrap();
        map.set(13, 7, LayoutClass::NotLayout);
        let unary = build_unary(&map, 0.75).unwrap();
        let normals = EquirectGrid::new(32, 16, 3).unwrap();
        let p = CrfParams {
            sigma_smooth_px: 20.0,
            bilateral_weight: 0.0,
            ..CrfParams::default()
        };
        let out = crf_refine(&unary, &normals, &p).unwrap();
        assert_eq!(out.get(13, 7), LayoutClass::Wall);
    }

    #[test]
    fn shift_equivariant_bitwise() {
        let (unary, normals) = random_instance(7, 32, 16, 3);
        let shift = 8;
        let rolled_probs = {
            let mut v = unary.probs().to_vec();
            for row in v.chunks_mut(32) {
                row.rotate_right(shift);
            }
            v
        };
        let rolled = UnaryField::from_probs(32, 16, rolled_probs).unwrap();
        let p = CrfParams::default();
        let a = crf_refine(&unary, &normals, &p)
            .unwrap()
            .roll_columns(shift as isize);
        let b = crf_refine(&rolled, &normals.roll_columns(shift as isize), &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn downsampled_inference_keeps_shape() {
        let (unary, normals) = random_instance(8, 32, 16, 3);
        let p = CrfParams {
            downsample: 2,
            ..CrfParams::default()
        };
        let q = crf_marginals(&unary, &normals, &p).unwrap();
        assert_eq!(q.len(), 32 * 16);
        assert_eq!(q[0], q[1]);
        assert_eq!(q[0], q[32]);
        let p = CrfParams {
            downsample: 3,
            ..CrfParams::default()
        };
        assert!(crf_marginals(&unary, &normals, &p).is_err());
    }
}
