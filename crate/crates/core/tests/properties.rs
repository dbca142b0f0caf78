use proptest::prelude::*;
use weakmax::bounds::{g_fa, root_threshold, solve_k, t1};
use weakmax::extremal::{extreme_point_excess, extreme_point_k, extreme_point_profile, extremizer_for};
use weakmax::grid::{weak_norm_sorted, GridFunction};
use weakmax::profile::power_density;
use weakmax::{domain_check, maximal_operator, normalize, ConstraintTriple, Exponents, Profile, Segment, TreeSpec};

fn exps(p: f64, q: f64) -> Exponents {
    Exponents::new(p, q).unwrap()
}

fn exponent_pair() -> impl Strategy<Value = Exponents> {
    (1.2f64..6.0, 0.05f64..0.95).prop_map(|(p, s)| exps(p, 1.0 + s * (p - 1.0)))
}

/// A feasible `(f, A)` with `A` a fraction `s` of the way up from `f^q`.
fn feasible(x: &Exponents, f: f64, s: f64) -> (f64, f64) {
    let lo = f.powf(x.q());
    (f, lo + s * (x.max_lq_mass(f) - lo))
}

/// Nonincreasing profile: optional power head, then up to four plateaus.
fn profile() -> impl Strategy<Value = Profile> {
    (
        1.3f64..5.0,
        prop::option::of(0.01f64..0.5),
        prop::collection::vec((0.01f64..0.3, 0.0f64..1.0), 0..5),
    )
        .prop_map(|(p, head, steps)| {
            let mut segments = Vec::new();
            let mut used = 0.0;
            let mut ceiling = 3.0;
            if let Some(c) = head {
                segments.push(Segment::Power { length: c });
                used = c;
                ceiling = power_density(p, c);
            }
            for (len, frac) in steps {
                if used + len > 1.0 {
                    break;
                }
                ceiling *= frac;
                segments.push(Segment::Constant { length: len, value: ceiling });
                used += len;
            }
            Profile::new(p, segments).unwrap()
        })
}

fn grid(cells: usize) -> impl Strategy<Value = GridFunction> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..5.0, 0.0f64..0.1], cells)
        .prop_map(|v| GridFunction::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weak_norm_matches_dense_grid(g in profile()) {
        let p = g.p();
        let n = 1usize << 16;
        let mut ts: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
        let mut edge = 0.0;
        for s in g.segments() {
            edge += s.length();
            ts.push(edge);
        }
        let dense = ts
            .iter()
            .map(|&t| g.running_integral_clamped(t) * t.powf(-1.0 + 1.0 / p))
            .fold(0.0, f64::max);
        let w = g.weak_norm();
        prop_assert!((dense - w).abs() <= 1e-12 * w.max(1.0), "dense {dense} vs {w}");
    }

    #[test]
    fn running_integral_is_concave(g in profile()) {
        let h = 1.0 / 512.0;
        let r: Vec<f64> = (0..=512).map(|i| g.running_integral_clamped(i as f64 * h)).collect();
        for w in r.windows(3) {
            prop_assert!(w[0] - 2.0 * w[1] + w[2] <= 1e-12);
        }
    }

    #[test]
    fn norm_sandwich(u in grid(64), p in 1.2f64..6.0) {
        let (quasi, weak) = (u.quasi_norm(p), u.weak_norm(p));
        prop_assert!(quasi <= weak * (1.0 + 1e-12));
        prop_assert!(weak <= p / (p - 1.0) * quasi * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn rearrangement_preserves_moments(u in grid(37), q in 1.1f64..4.0) {
        let r = u.decreasing_rearrangement();
        prop_assert!((r.integral() - u.integral()).abs() <= 1e-12 * u.integral().max(1.0));
        prop_assert!((r.lq_mass(q) - u.lq_mass(q)).abs() <= 1e-12 * u.lq_mass(q).max(1.0));
        prop_assert!(r.values().windows(2).all(|w| w[0] >= w[1]));
    }

    /// With 8 cells, every subset can be tried: the largest
    /// `|E|^{-1+1/p} ∫_E u` is the prefix-ratio weak norm.
    #[test]
    fn weak_norm_is_the_best_subset(u in grid(8), p in 1.2f64..6.0) {
        let v = u.values();
        let mut best: f64 = 0.0;
        for mask in 1u32..256 {
            let cells = mask.count_ones() as f64;
            let mass: f64 = (0..8).filter(|i| mask >> i & 1 == 1).map(|i| v[i]).sum::<f64>() / 8.0;
            best = best.max((cells / 8.0).powf(-1.0 + 1.0 / p) * mass);
        }
        prop_assert!((best - u.weak_norm(p)).abs() <= 1e-12 * best.max(1.0));
    }

    #[test]
    fn domain_membership_is_scale_invariant(x in exponent_pair(), f in 0.01f64..1.2, s in -0.2f64..1.2, big_f in 0.1f64..10.0) {
        let lo = f.powf(x.q());
        let a = (lo + s * (x.max_lq_mass(f) - lo)).max(1e-6);
        let unit = ConstraintTriple::unit(f, a).unwrap();
        let scaled = ConstraintTriple::new(f * big_f, a * big_f.powf(x.q()), big_f).unwrap();
        let v = domain_check(&x, &scaled);
        let (n, scale) = normalize(&x, &scaled);
        prop_assert!((scale - big_f).abs() == 0.0);
        prop_assert_eq!(v.member, domain_check(&x, &n).member);
        // Away from the boundaries the scaled and unit triples agree exactly.
        if (s - 0.0).abs() > 1e-6 && (s - 1.0).abs() > 1e-6 && (f - 1.0).abs() > 1e-6 {
            prop_assert_eq!(v, domain_check(&x, &unit));
        }
    }

    #[test]
    fn t1_nonincreasing_in_lambda(x in exponent_pair(), f in 0.05f64..1.0, s in 0.01f64..1.0) {
        let (f, a) = feasible(&x, f, s);
        let mut prev = f64::INFINITY;
        for i in 1..=300 {
            let lambda = 0.01 * i as f64;
            let t = t1(f, a, lambda, &x).unwrap().t_value;
            prop_assert!(t <= prev + 1e-12, "λ = {lambda}: {t} > {prev}");
            prop_assert_eq!(t == 1.0, lambda <= f);
            prev = t;
        }
    }

    #[test]
    fn g_is_continuous_at_its_joints(x in exponent_pair(), f in 0.05f64..0.95, s in 0.05f64..1.0) {
        let (f, a) = feasible(&x, f, s);
        let eps = 1e-6;
        for joint in [f, root_threshold(f, a, x.q())] {
            let below = g_fa(f, a, joint - eps, &x).unwrap();
            let above = g_fa(f, a, joint + eps, &x).unwrap();
            prop_assert!((below - above).abs() <= 1e-4, "joint {joint}: {below} vs {above}");
        }
    }

    #[test]
    fn t1_nondecreasing_in_a(x in exponent_pair(), f in 0.05f64..1.0, lambda in 0.05f64..4.0) {
        let mut prev = 0.0;
        for j in 0..=40 {
            let (_, a) = feasible(&x, f, j as f64 / 40.0);
            let t = t1(f, a, lambda, &x).unwrap().t_value;
            prop_assert!(t >= prev - 1e-12);
            prev = t;
        }
    }

    #[test]
    fn k_root_residual_and_bracket(x in exponent_pair(), f in 0.05f64..0.95, s in 0.01f64..1.0, stretch in 1.0f64..5.0) {
        let (f, a) = feasible(&x, f, s);
        let lambda = root_threshold(f, a, x.q()).max(f * 1.0001) * stretch;
        let q = x.q();
        prop_assert!(f.powf(q) <= a && a <= f * lambda.powf(q - 1.0) * (1.0 + 1e-12));
        let root = solve_k(f, a, lambda, &x).unwrap();
        prop_assert!(root.residual <= 1e-12);
        prop_assert!((0.0..=f / lambda).contains(&root.x));
    }

    #[test]
    fn extremizers_are_valid_and_attain(x in exponent_pair(), f in 0.05f64..1.0, s in 0.0f64..1.0, lambda in 0.05f64..4.0) {
        let (f, a) = feasible(&x, f, s);
        let (g, _) = extremizer_for(f, a, lambda, &x).unwrap();
        let t = t1(f, a, lambda, &x).unwrap().t_value;
        prop_assert!((g.integral() - f).abs() <= 1e-9);
        prop_assert!((g.lq_mass_for(&x) - a).abs() <= 1e-9);
        prop_assert!(g.weak_norm() <= 1.0 + 1e-9);
        prop_assert!(g.running_integral_clamped(t) >= t * lambda - 1e-9);
    }

    #[test]
    fn extreme_points_saturate_prefix_ratios(n in 2u32..10, f in 0.05f64..1.0, p in 1.3f64..5.0) {
        let cells = 1usize << n;
        let x = exps(p, 1.0 + 0.5 * (p - 1.0));
        let g = extreme_point_profile(n, f, &x).unwrap();
        for i in 1..=extreme_point_k(n, f, p) {
            let t = i as f64 / cells as f64;
            let ratio = g.running_integral_clamped(t) * t.powf(-1.0 + 1.0 / p);
            prop_assert!((ratio - 1.0).abs() <= 1e-12, "i = {i}: {ratio}");
        }
        prop_assert!(g.weak_norm() <= 1.0 + 1e-12);
        let excess = extreme_point_excess(n, f, &x);
        prop_assert!(g.lq_mass_for(&x) - x.max_lq_mass(f) <= excess + 1e-12);
        prop_assert!(excess <= 2f64.powf(-(n as f64) * (1.0 - x.q() / p)) + 1e-12);
    }

    #[test]
    fn weak_type_one_one_on_the_level_set(u in grid(256), lambda in 0.01f64..5.0) {
        let tree = TreeSpec::dyadic(8).unwrap();
        let m = maximal_operator(&u, &tree).unwrap();
        let (mut measure, mut on_set) = (0.0, 0.0);
        for (mv, uv) in m.values.iter().zip(u.values()) {
            if *mv >= lambda {
                measure += 1.0 / 256.0;
                on_set += uv / 256.0;
            }
        }
        prop_assert!(lambda * measure <= on_set * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn maximal_operator_norm_bounds(u in grid(243), p in prop_oneof![Just(2.0), Just(3.0)], ternary in any::<bool>()) {
        let tree = if ternary { TreeSpec::new(3, 5).unwrap() } else { TreeSpec::dyadic(7).unwrap() };
        let u = if ternary { u } else { GridFunction::new(u.values()[..128].to_vec()).unwrap() };
        let m = maximal_operator(&u, &tree).unwrap().to_grid();
        prop_assert!(m.quasi_norm(p) <= u.weak_norm(p) * (1.0 + 1e-12));
        prop_assert!(m.lp_norm(p) <= p / (p - 1.0) * u.lp_norm(p) * (1.0 + 1e-12));
        // M dominates the global average and the function itself.
        let avg = u.integral();
        prop_assert!(m.values().iter().zip(u.values()).all(|(mv, uv)| *mv >= avg * (1.0 - 1e-12) && *mv >= *uv));
    }

    #[test]
    fn maximal_operator_is_monotone(u in grid(64), bump in prop::collection::vec(0.0f64..1.0, 64)) {
        let tree = TreeSpec::dyadic(6).unwrap();
        let v = GridFunction::new(u.values().iter().zip(&bump).map(|(a, b)| a + b).collect()).unwrap();
        let mu = maximal_operator(&u, &tree).unwrap();
        let mv = maximal_operator(&v, &tree).unwrap();
        prop_assert!(mu.values.iter().zip(&mv.values).all(|(a, b)| a <= b));
    }
}

#[test]
fn gamma_exceeds_one_and_grows_with_q() {
    // d/dq log Γ = log(1 - 1/p) + 1/(p - q) > 0, so Γ increases from its
    // limit 1 at q = 1.
    for i in 0..40 {
        let p = 1.1 + 0.2 * i as f64;
        let mut prev = 1.0;
        for j in 1..50 {
            let q = 1.0 + (p - 1.0) * j as f64 / 50.0;
            let g = exps(p, q).gamma();
            assert!(g > 1.0 && g > prev, "p = {p}, q = {q}: {g} after {prev}");
            prev = g;
        }
    }
}

#[test]
fn attained_measure_is_continuous_along_lambda() {
    let x = exps(3.0, 2.0);
    for (f, a) in [(0.5, 0.3), (0.5, 0.9), (0.8, 0.7), (0.2, 0.1)] {
        let mut prev: Option<f64> = None;
        for i in 50..3000 {
            let lambda = 1e-3 * i as f64;
            let (_, r) = extremizer_for(f, a, lambda, &x).unwrap();
            if let Some(prev) = prev {
                assert!((r.alpha - prev).abs() <= 5e-3, "(f, A) = ({f}, {a}), λ = {lambda}: {prev} → {}", r.alpha);
            }
            prev = Some(r.alpha);
        }
    }
}

#[test]
fn discretization_keeps_the_integral() {
    let x = exps(3.0, 2.0);
    for lambda in [0.4, 0.8, 1.0, 1.5, 2.5] {
        for (f, a) in [(0.5, 0.3), (0.5, 0.9), (0.8, 0.7)] {
            let (g, _) = extremizer_for(f, a, lambda, &x).unwrap();
            let d10 = g.discretize(10);
            assert!((d10.integral() - g.integral()).abs() <= 1e-14, "({f},{a},{lambda}): {}", d10.integral() - g.integral());
            let lq = g.lq_mass_for(&x);
            let gap = |n: u32| lq - g.discretize(n).lq_mass(2.0);
            // Averaging lowers the L^q mass. Step profiles lose it only in the
            // cells straddling a jump; a power head loses a fixed fraction of
            // each cell's mass, so there the gap decays only like 2^{-N(1-q/p)}.
            assert!(gap(16) >= -1e-12);
            let gaps: Vec<f64> = (10..=18).step_by(2).map(gap).collect();
            assert!(gaps.windows(2).all(|w| w[1] <= w[0]), "({f},{a},{lambda}): {gaps:?}");
            if !g.has_power_piece() {
                assert!(gap(16) <= 1e-3 * lq, "({f},{a},{lambda}): {}", gap(16));
            }
            assert!(weak_norm_sorted(g.discretize(16).values(), 3.0) <= g.weak_norm() + 1e-12);
        }
    }
}

#[test]
fn remaining_average_blocks_stay_near_target() {
    use weakmax::extract_equal_average_block;
    let x = exps(3.0, 2.0);
    let (g, _) = extremizer_for(0.5, 0.9, 1.5, &x).unwrap();
    let mut head: Vec<f64> = g.discretize(12).into_values()[..1213].to_vec();
    let cell_scale = head[0];
    for width in [1024, 128, 32, 16, 8, 4, 1] {
        let s = head.iter().sum::<f64>() / head.len() as f64;
        let r = extract_equal_average_block(&head, width, s).unwrap();
        let avg = head[r..r + width].iter().sum::<f64>() / width as f64;
        assert!(avg >= s - 1e-12 && avg - s <= cell_scale / width as f64);
        head.drain(r..r + width);
    }
}
