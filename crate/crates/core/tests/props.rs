//! Property tests over the geometric and appearance primitives.

use partreid::features::{bhattacharyya, Histogram, PartDistance, Descriptor};
use partreid::model::{iou, BodyModel, Joint, OrientedRect, PartProposal, PartType};
use proptest::prelude::*;

fn rect_strategy() -> impl Strategy<Value = OrientedRect> {
    (
        -50.0f64..50.0,
        -50.0f64..50.0,
        0.5f64..30.0,
        0.5f64..30.0,
        -3.2f64..3.2,
    )
        .prop_map(|(x, y, w, h, theta)| OrientedRect::new([x, y], w, h, theta))
}

fn hist_strategy() -> impl Strategy<Value = Histogram> {
    proptest::collection::vec(0.0f64..1.0, 16)
        .prop_filter("nonzero mass", |v| v.iter().sum::<f64>() > 1e-6)
        .prop_map(|v| Histogram::normalized(v).unwrap())
}

proptest! {
    #[test]
    fn iou_is_symmetric_and_bounded(a in rect_strategy(), b in rect_strategy()) {
        let ab = iou(&a, &b);
        let ba = iou(&b, &a);
        prop_assert!((ab - ba).abs() < 1e-9, "asymmetry: {ab} vs {ba}");
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn iou_of_rect_with_itself_is_one(a in rect_strategy()) {
        prop_assert!((iou(&a, &a) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn iou_is_rigid_invariant(
        a in rect_strategy(),
        b in rect_strategy(),
        angle in -3.0f64..3.0,
        tx in -20.0f64..20.0,
        ty in -20.0f64..20.0,
    ) {
        let (sin, cos) = angle.sin_cos();
        let transform = |r: &OrientedRect| {
            let mut corners = r.corners;
            for c in &mut corners {
                let (x, y) = (c[0], c[1]);
                c[0] = x * cos - y * sin + tx;
                c[1] = x * sin + y * cos + ty;
            }
            OrientedRect { corners }
        };
        let before = iou(&a, &b);
        let after = iou(&transform(&a), &transform(&b));
        prop_assert!((before - after).abs() < 1e-6, "{before} vs {after}");
    }

    #[test]
    fn rect_area_scales_quadratically(
        s in 0.1f64..4.0,
        height in 50.0f64..300.0,
        theta in -3.2f64..3.2,
    ) {
        let body = BodyModel::default();
        let p = PartProposal {
            part: PartType::Torso,
            x: 0.0,
            y: 0.0,
            theta,
            s,
            score: 1.0,
            descriptor: None,
            source_id: String::new(),
        };
        let r = body.rect_of(&p, height).unwrap();
        let (w, h) = body.size_of(PartType::Torso);
        let expect = w * h * s * s * height * height;
        prop_assert!((r.area() - expect).abs() <= 1e-9 * expect);
    }

    #[test]
    fn joint_anchor_translates_with_the_proposal(
        dx in -100.0f64..100.0,
        dy in -100.0f64..100.0,
        theta in -3.2f64..3.2,
        s in 0.2f64..3.0,
    ) {
        let body = BodyModel::default();
        let joint = Joint::new(PartType::LeftCalf).unwrap();
        let p = PartProposal {
            part: PartType::LeftCalf,
            x: 10.0,
            y: 20.0,
            theta,
            s,
            score: 1.0,
            descriptor: None,
            source_id: String::new(),
        };
        let mut q = p.clone();
        q.x += dx;
        q.y += dy;
        let fp = body.joint_transform(&p, joint, 175.0).unwrap();
        let fq = body.joint_transform(&q, joint, 175.0).unwrap();
        prop_assert!((fq.u - fp.u - dx).abs() < 1e-9);
        prop_assert!((fq.v - fp.v - dy).abs() < 1e-9);
    }

    #[test]
    fn bhattacharyya_is_symmetric_bounded_and_zero_on_self(
        a in hist_strategy(),
        b in hist_strategy(),
    ) {
        let ab = bhattacharyya(&a, &b).unwrap();
        let ba = bhattacharyya(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
        // The square root amplifies normalization rounding: the coefficient
        // sum lands within ~1e-15 of 1, so the self-distance can reach
        // sqrt(1e-15) ~ 3e-8.
        prop_assert!(bhattacharyya(&a, &a).unwrap() < 1e-7);
    }

    #[test]
    fn part_distance_symmetric_under_symmetric_aux(
        a in hist_strategy(),
        b in hist_strategy(),
        xa in 0.0f64..5.0,
        xb in 0.0f64..5.0,
    ) {
        let metric = PartDistance::with_aux(|u, v| {
            let u = u.map_or(0.0, |s| s[0]);
            let v = v.map_or(0.0, |s| s[0]);
            (u - v).abs()
        });
        let da = Descriptor { hsv: a, aux: Some(vec![xa]) };
        let db = Descriptor { hsv: b, aux: Some(vec![xb]) };
        let ab = metric.eval(&da, &db).unwrap();
        let ba = metric.eval(&db, &da).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
    }
}
