use std::f64::consts::{FRAC_PI_2, PI, TAU};

use panolayout::attention::{
    apply_residual_attention, build_attention, spherical_blur, AttentionMode, AttentionParams,
};
use panolayout::boundary::{BoundaryKind, BoundaryVector};
use panolayout::eval::layout_rmse;
use panolayout::pano::{ang_to_pix, haversine_lat, pix_to_ang, EquirectGrid};
use panolayout::recon::{reconstruct_bottom, reconstruct_bottom_exact, PlaneHeights};
use panolayout::transforms::{circular_shift, photometric, Sample};
use proptest::prelude::*;

fn arb_top(width: usize) -> impl Strategy<Value = BoundaryVector> {
    prop::collection::vec((0.15f64..1.4, prop::bool::weighted(0.9)), width).prop_map(|v| {
        let (lat, ok): (Vec<f64>, Vec<bool>) = v.into_iter().unzip();
        BoundaryVector::new(BoundaryKind::Top, lat, ok).unwrap()
    })
}

fn arb_radii(width: usize) -> impl Strategy<Value = Vec<Option<f64>>> {
    prop::collection::vec(prop::option::weighted(0.95, 0.5f64..6.0), width)
}

fn roll_vec<T: Clone>(v: &[T], k: isize) -> Vec<T> {
    let w = v.len() as isize;
    (0..w)
        .map(|u| v[(u - k).rem_euclid(w) as usize].clone())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pixel_centers_round_trip(w in 2usize..400, h in 1usize..200, fu in 0.0f64..1.0, fv in 0.0f64..1.0) {
        let u = ((w as f64 * fu) as usize).min(w - 1);
        let v = ((h as f64 * fv) as usize).min(h - 1);
        let (x, y) = ang_to_pix(pix_to_ang(u, v, w, h).unwrap(), w, h);
        prop_assert!((x - u as f64).abs() < 1e-9 && (y - v as f64).abs() < 1e-9);
    }

    #[test]
    fn haversine_antisymmetric_and_periodic(a in -TAU..TAU, b in -TAU..TAU) {
        prop_assert!((haversine_lat(a, b) + haversine_lat(b, a)).abs() < 1e-12);
        prop_assert!(haversine_lat(a, a + TAU).abs() < 1e-7);
    }

    #[test]
    fn bottom_latitudes_stay_below_horizon(
        top in arb_top(24),
        radii in arb_radii(24),
        ceil in 0.3f64..2.0,
        floor in 0.3f64..2.0,
    ) {
        let hts = PlaneHeights::from_means(ceil, -floor).unwrap();
        for b in [
            reconstruct_bottom(&top, &radii, &hts).unwrap(),
            reconstruct_bottom_exact(&top, &radii, &hts).unwrap(),
        ] {
            for u in 0..b.width() {
                if let Some(t) = b.latitude(u) {
                    prop_assert!(t > FRAC_PI_2 && t <= PI, "meridian {u}: {t}");
                }
            }
        }
    }

    #[test]
    fn reconstruction_commutes_with_roll(
        top in arb_top(20),
        radii in arb_radii(20),
        k in -40isize..40,
        floor in 0.3f64..2.0,
    ) {
        let hts = PlaneHeights::from_means(1.1, -floor).unwrap();
        let rolled_radii = roll_vec(&radii, k);
        let a = reconstruct_bottom(&top, &radii, &hts).unwrap().roll(k);
        let b = reconstruct_bottom(&top.roll(k), &rolled_radii, &hts).unwrap();
        prop_assert_eq!(a, b);
        let a = reconstruct_bottom_exact(&top, &radii, &hts).unwrap().roll(k);
        let b = reconstruct_bottom_exact(&top.roll(k), &rolled_radii, &hts).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn attention_commutes_with_roll(top in arb_top(32), k in -64isize..64) {
        let p = AttentionParams::default();
        let a = build_attention(&top, &p, 32, 16).unwrap();
        let b = build_attention(&top.roll(k), &p, 32, 16).unwrap();
        prop_assert_eq!(&a.grid.roll_columns(k), &b.grid);
        let (ba, bb) = (spherical_blur(&a, &p).unwrap(), spherical_blur(&b, &p).unwrap());
        prop_assert_eq!(ba.grid.roll_columns(k), bb.grid);
    }

    #[test]
    fn blur_never_raises_the_maximum(top in arb_top(32)) {
        let p = AttentionParams::default();
        let a = build_attention(&top, &p, 32, 16).unwrap();
        let b = spherical_blur(&a, &p).unwrap();
        let max = |g: &EquirectGrid| g.data().iter().copied().fold(f32::MIN, f32::max);
        prop_assert!(max(&b.grid) <= max(&a.grid) * (1.0 + 1e-6));
    }

    #[test]
    fn residual_attention_only_adds(
        top in arb_top(16),
        feats in prop::collection::vec(0.0f32..10.0, 16 * 8 * 2),
        normalize in any::<bool>(),
    ) {
        let p = AttentionParams::default();
        let a = spherical_blur(&build_attention(&top, &p, 16, 8).unwrap(), &p).unwrap();
        let f = EquirectGrid::from_vec(16, 8, 2, feats).unwrap();
        for mode in [AttentionMode::Direct, AttentionMode::Complement] {
            let out = apply_residual_attention(&f, &a, mode, normalize).unwrap();
            for (o, i) in out.data().iter().zip(f.data()) {
                prop_assert!(o >= i);
            }
        }
    }

    #[test]
    fn layout_rmse_ignores_roll(pred in arb_top(24), gt in arb_top(24), k in -48isize..48) {
        match (layout_rmse(&pred, &gt, None), layout_rmse(&pred.roll(k), &gt.roll(k), None)) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0)),
            (a, b) => prop_assert!(a.is_err() && b.is_err()),
        }
    }

    #[test]
    fn photometric_leaves_geometry_alone(
        gamma in 0.5f64..2.0,
        brightness in -0.2f64..0.2,
        contrast in 0.7f64..1.3,
        seed in any::<u16>(),
    ) {
        let s = sample(seed as u64);
        let out = photometric(&s, gamma, brightness, contrast).unwrap();
        prop_assert_eq!(&out.depth, &s.depth);
        prop_assert_eq!(&out.normals, &s.normals);
        prop_assert_eq!(&out.top, &s.top);
        prop_assert_eq!(&out.mask, &s.mask);
    }

    #[test]
    fn shifted_normals_stay_unit(seed in any::<u16>(), k in -30isize..30) {
        let out = circular_shift(&sample(seed as u64), k).unwrap();
        let n = out.normals.unwrap();
        for px in n.data().chunks(3) {
            let len = px.iter().map(|&c| (c as f64).powi(2)).sum::<f64>().sqrt();
            prop_assert!((len - 1.0).abs() < 1e-6, "length {len}");
        }
    }
}

fn sample(seed: u64) -> Sample {
    let (w, h) = (12, 6);
    let angle = |u: usize, v: usize| (seed as f64 * 0.37 + u as f64 * 0.9 + v as f64 * 0.4) % TAU;
    let color = EquirectGrid::from_fn(w, h, 3, |u, v, px| {
        px.copy_from_slice(&[(u * 20) as f32, (v * 40) as f32, (seed % 256) as f32])
    })
    .unwrap();
    let depth =
        EquirectGrid::from_fn(w, h, 1, |u, v, px| px[0] = 1.0 + (u + v) as f32 * 0.1).unwrap();
    let normals = EquirectGrid::from_fn(w, h, 3, |u, v, px| {
        let a = angle(u, v);
        let (s, c) = (0.6 * a.sin(), 0.6 * a.cos());
        px.copy_from_slice(&[s as f32, 0.8, c as f32]);
    })
    .unwrap();
    let mask = EquirectGrid::filled(w, h, 1, 1.0).unwrap();
    let top = BoundaryVector::from_latitudes(
        BoundaryKind::Top,
        (0..w).map(|u| 0.8 + 0.02 * u as f64).collect(),
    )
    .unwrap();
    Sample {
        color: Some(color),
        depth: Some(depth),
        normals: Some(normals),
        top: Some(top),
        mask: Some(mask),
        ..Sample::default()
    }
}
