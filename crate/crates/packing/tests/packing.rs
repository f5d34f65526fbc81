use matrixkit::{polar_orthogonal_factor, thin_svd, two_to_infinity_norm, DenseMatrix};
use netmodel::{DiagonalMode, ProbabilityMatrix};
use packing::{
    balanced_sign_vector, bernoulli_kl, build_base_frame_constant, build_base_frame_growing, build_packing_constant,
    build_packing_growing, default_zeta, exact_kl, perturbation_vector, rank_one_update_svd, verify_family, zhou_bound,
    CheckKind, CheckStatus, CompressedPair, Derived, PackingError, PackingParams, PairSampling, VerifyOptions,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = norm(&v);
    v.into_iter().map(|x| x / n).collect()
}

/// `λ₁ = κ⌊n/(3κ)⌋`, the largest multiple of κ with `3λ₁ ≤ n`.
fn constant_params(n: usize, p: usize, q: usize, kappa: f64, c0: f64) -> PackingParams {
    let lambda1 = kappa * (n as f64 / (3.0 * kappa)).floor();
    PackingParams::constant(n, p, q, kappa, lambda1, c0)
}

/// Smallest `|Σ s_ℓ |a_ℓ||/√d` over all `2^d` sign patterns.
fn exhaustive_balance(a: &[f64]) -> f64 {
    let d = a.len();
    (0..1u32 << d)
        .map(|mask| (0..d).map(|l| if mask >> l & 1 == 1 { a[l].abs() } else { -a[l].abs() }).sum::<f64>().abs())
        .fold(f64::INFINITY, f64::min)
        / (d as f64).sqrt()
}

// ---------------------------------------------------------------------------
// Balanced sign vectors

#[test]
fn balanced_sign_vector_small_cases() {
    let z = balanced_sign_vector(&[1.0, 0.0]).unwrap();
    let h = 1.0 / 2f64.sqrt();
    assert!(z.iter().all(|v| (v.abs() - h).abs() < 1e-15));
    assert!((dot(&z, &[1.0, 0.0]).abs() - h).abs() < 1e-15);

    let a = vec![0.5; 4];
    let z = balanced_sign_vector(&a).unwrap();
    assert_eq!(dot(&z, &a), 0.0);
    assert!(z.iter().all(|v| (v.abs() - 0.5).abs() < 1e-15));
}

#[test]
fn balanced_sign_vector_matches_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let bound = (2.0f64 / 3.0).sqrt();
    for _ in 0..100 {
        let a = unit((0..8).map(|_| rng.gen_range(-1.0..1.0)).collect());
        // Existence of a balanced split, checked directly on subsets.
        let exists = (0..1u32 << 8).any(|mask| {
            let inside: f64 = (0..8).filter(|l| mask >> l & 1 == 1).map(|l| a[l] * a[l]).sum();
            inside <= 2.0 / 3.0 && 1.0 - inside <= 2.0 / 3.0
        });
        assert!(exists);
        let z = balanced_sign_vector(&a).unwrap();
        assert!(z.iter().all(|v| (v.abs() - 1.0 / 8f64.sqrt()).abs() < 1e-15));
        let got = dot(&z, &a).abs();
        assert!(got <= bound);
        assert!((got - exhaustive_balance(&a)).abs() < 1e-14, "not the optimal split");
    }
}

#[test]
fn balanced_sign_vector_rejects_bad_input() {
    assert!(balanced_sign_vector(&[1.0]).is_err());
    assert!(balanced_sign_vector(&[1.0, 1.0]).is_err());
}

// ---------------------------------------------------------------------------
// Constant-κ base frame and perturbations

#[test]
fn base_frame_constant_shapes() {
    let (u, k0, m, r) = build_base_frame_constant(10, 1).unwrap();
    assert_eq!((k0, m, r), (0, 10, 0));
    assert!(u.data().iter().all(|&v| v == 1.0 / 10f64.sqrt()));

    let (u, k0, m, r) = build_base_frame_constant(16, 3).unwrap();
    assert_eq!((k0, m, r), (2, 4, 0));
    assert!(u.orthonormality_defect() < 1e-12);

    let (n, d) = (18, 3);
    let (u, k0, m, r) = build_base_frame_constant(n, d).unwrap();
    assert_eq!((k0, m, r), (2, 4, 2));
    assert!(u.orthonormality_defect() < 1e-12);
    for i in 16..18 {
        assert_eq!(&u.row(i)[1..], &[0.0, 0.0]);
    }
    let (lo, hi) = ((d as f64 / n as f64).sqrt(), (d as f64 / (n - r) as f64).sqrt());
    for i in 0..16 {
        let rn = norm(u.row(i));
        assert!(rn >= lo - 1e-15 && rn <= hi + 1e-15, "row {i} norm {rn}");
        assert!(u.row(i).iter().all(|v| v.abs() <= 1.0 / ((n - r) as f64).sqrt() + 1e-15));
    }

    assert!(matches!(build_base_frame_constant(3, 3), Err(PackingError::TooSmall { n: 3, needed: 4 })));
}

#[test]
fn perturbation_vectors_at_reference_size() {
    let params = constant_params(1024, 2, 1, 9.0, 0.02);
    let (u0, _, _, _) = build_base_frame_constant(1024, 3).unwrap();
    let lambdas = params.lambdas();
    for i in 0..1024 {
        let u = u0.row(i);
        let x = perturbation_vector(u, &lambdas, params.c0, params.n).unwrap();
        let scaled: Vec<f64> = x.iter().zip(&lambdas).map(|(v, l)| v.abs() * l).collect();
        assert!(scaled.iter().all(|s| (s - scaled[0]).abs() < 1e-15 * scaled[0]));
        assert!(dot(&x, u) >= 0.0);
        assert!(dot(&x, u).abs() / (norm(&x) * norm(u)) < 3f64.sqrt() / 2.0);
        assert!(dot(&x, &x) <= params.c0 * params.c0 * params.kappa / params.n as f64);
    }
    assert!(matches!(perturbation_vector(&[1.0], &[1.0], 0.1, 100), Err(PackingError::CosineUnattainable { .. })));
}

// ---------------------------------------------------------------------------
// Closed-form rank-one SVD

/// Distance between the lines spanned by two unit vectors, `min ‖a ∓ b‖`;
/// unlike `√(1 − (aᵀb)²)` it stays accurate for tiny angles.
fn line_distance(a: &[f64], b: &[f64]) -> f64 {
    let minus: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let plus: f64 = a.iter().zip(b).map(|(x, y)| (x + y).powi(2)).sum();
    minus.min(plus).sqrt()
}

#[test]
fn rank_one_svd_matches_numeric_svd() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let n = 256;
    let (u0, _, _, _) = build_base_frame_constant(n, 3).unwrap();
    let lambdas = constant_params(n, 2, 1, 9.0, 0.02).lambdas();
    for _ in 0..100 {
        let i = rng.gen_range(0..n);
        let c0 = rng.gen_range(0.01..5.0);
        let x = perturbation_vector(u0.row(i), &lambdas, c0, n).unwrap();
        let r = rank_one_update_svd(&u0, i, &x).unwrap();
        let mut g = u0.clone();
        g.row_mut(i).iter_mut().zip(&x).for_each(|(a, b)| *a += b);
        let svd = thin_svd(&g).unwrap();
        let mut analytic = r.singular_values(3);
        analytic.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in analytic.iter().zip(&svd.sigma) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        // Right singular vectors: exact eigen-residual against GᵀG, and angle
        // to the numeric vectors up to the Jacobi accuracy over the gap.
        let gram = g.t_matmul(&g).unwrap();
        for (k, sigma) in [r.sigma_plus, r.sigma_minus].into_iter().enumerate() {
            let v = r.v_span.row(k);
            let gv = gram.matvec(v);
            let resid = norm(&gv.iter().zip(v).map(|(a, b)| a - (1.0 + sigma) * b).collect::<Vec<_>>());
            assert!(resid < 1e-13, "residual {resid}");
        }
        let (s0, s1) = (line_distance(r.v_span.row(0), &svd.v.column(0)), line_distance(r.v_span.row(1), &svd.v.column(2)));
        assert!(s0.max(s1) < 1e-8, "{s0} {s1}");
        // Invariants of the closed form.
        assert!(1.0 + r.sigma_minus > 0.0 && r.sigma_minus <= 0.0 && r.sigma_plus >= 0.0);
        assert!(r.alpha_plus >= 1.0);
        let (xx, xu, uu) = (dot(&x, &x), dot(&x, u0.row(i)), dot(u0.row(i), u0.row(i)));
        let vieta = -(uu + xu) / xx;
        assert!((r.alpha_plus * r.alpha_minus - vieta).abs() <= 1e-12 * vieta.abs());
        let direct_minus = xu + r.alpha_minus * xx;
        assert!((direct_minus - r.sigma_minus).abs() <= 1e-12 * r.sigma_minus.abs().max(1e-300));
        // Polar factor agrees with the generic one.
        let polar = r.polar_factor(&u0, i, &x).unwrap();
        assert!(polar.sub(&polar_orthogonal_factor(&g).unwrap()).unwrap().max_abs() < 1e-12);
    }
}

#[test]
fn rank_one_svd_small_perturbation_limit() {
    let (u0, _, _, _) = build_base_frame_constant(64, 3).unwrap();
    let x = [1e-9, -2e-9, 0.5e-9];
    let r = rank_one_update_svd(&u0, 5, &x).unwrap();
    assert!(r.sigma_plus.abs() < 1e-9 && r.sigma_minus.abs() < 1e-9);
    assert!(r.singular_values(3).iter().all(|s| (s - 1.0).abs() < 1e-9));
}

#[test]
fn rank_one_svd_errors() {
    let (u0, _, _, _) = build_base_frame_constant(64, 3).unwrap();
    assert!(matches!(rank_one_update_svd(&u0, 0, &[1.0, 0.0, 0.0]), Err(PackingError::PerturbationTooLarge(_))));
    let parallel: Vec<f64> = u0.row(0).iter().map(|v| v * 0.1).collect();
    assert!(matches!(rank_one_update_svd(&u0, 0, &parallel), Err(PackingError::LinearlyDependent(_))));
}

#[test]
fn rank_one_bounds_hold_on_reference_family() {
    let params = constant_params(1024, 2, 1, 9.0, 0.02);
    let family = build_packing_constant(&params).unwrap();
    let Derived::Constant { r, .. } = family.derived else { panic!("constant regime") };
    let (n, d) = (params.n as f64, 3.0);
    let u0 = family.base.frame();
    let lambdas = params.lambdas();
    let signed = family.signed_lambdas();
    for (i, x) in family.perturbations.iter().enumerate() {
        let u = u0.row(i);
        let nx = norm(x);
        let rs = rank_one_update_svd(u0, i, x).unwrap();
        // ‖Σ̃ − I‖ ≤ ½‖x‖² + 2√(d/(n−r))‖x‖.
        let op = rs.d_plus.abs().max(rs.d_minus.abs());
        assert!(op <= 0.5 * nx * nx + 2.0 * (d / (n - r as f64)).sqrt() * nx);
        // ‖Ũ‖_{2,∞} (equal to that of the polar factor) ≤ √(d/(n−r) + ‖x‖/(1−‖x‖)).
        let tti = two_to_infinity_norm(&family.members[i]);
        assert!(tti <= (d / (n - r as f64) + nx / (1.0 - nx)).sqrt());
        // ‖(Σ̃ − I)Ṽᵀ Λ̃‖²_F ≤ 17(‖u‖² + ‖x‖²)(xᵀΛ²x + uᵀΛ²u).
        let lhs: f64 = [rs.d_plus, rs.d_minus]
            .iter()
            .enumerate()
            .map(|(k, dk)| dk * dk * rs.v_span.row(k).iter().zip(&signed).map(|(v, l)| (v * l).powi(2)).sum::<f64>())
            .sum();
        let quad = |v: &[f64]| v.iter().zip(&lambdas).map(|(a, l)| (a * l).powi(2)).sum::<f64>();
        assert!(lhs <= 17.0 * (dot(u, u) + nx * nx) * (quad(x) + quad(u)));
    }
}

// ---------------------------------------------------------------------------
// Constant-κ family

#[test]
fn constant_family_structure() {
    let params = constant_params(1024, 2, 1, 9.0, 0.02);
    let family = build_packing_constant(&params).unwrap();
    let Derived::Constant { k0, m, r } = family.derived else { panic!("constant regime") };
    assert_eq!((k0, m, r), (2, 256, 0));
    assert_eq!(family.member_count(), 4 * 256);
    let cap = 2.0 * params.c0 * (params.kappa / (3.0 * 1024.0)).sqrt();
    for (k, member) in family.members.iter().enumerate() {
        assert!(member.orthonormality_defect() < 1e-10);
        let x_inf = family.perturbations[k].iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let diff = member.sub(family.base.frame()).unwrap().max_abs();
        assert!(diff <= 2.0 * x_inf && 2.0 * x_inf <= cap, "member {k}: {diff} vs {x_inf}");
    }
    // Dense scan of a few members: all probabilities strictly inside (0, 1).
    for idx in [1, 2, 517, 1024] {
        let p = family.probability_entries(idx);
        assert!(p.data().iter().all(|&v| v > 0.0 && v < 1.0));
    }
}

#[test]
fn parameter_validation() {
    let ok = constant_params(1024, 2, 1, 9.0, 0.02);
    assert!(ok.validate().is_ok());
    let cases = [
        PackingParams { kappa: 8.0, ..ok.clone() },
        PackingParams { lambda1: 400.0, ..ok.clone() },
        PackingParams { c0: 0.0, ..ok.clone() },
        PackingParams { p: 0, q: 3, ..ok.clone() },
        PackingParams::growing(1024, 2, 1, 32.0, 300.0, 1.01 * default_zeta(3)),
    ];
    for c in cases {
        assert!(matches!(c.validate(), Err(PackingError::InvalidParams(_))), "{c:?}");
    }
    let wrong_regime = PackingParams::growing(1024, 2, 1, 32.0, 300.0, default_zeta(3));
    assert!(build_packing_constant(&wrong_regime).is_err());
    assert!(build_packing_growing(&ok).is_err());
}

// ---------------------------------------------------------------------------
// Growing-κ family

#[test]
fn growing_base_frame_normalisation() {
    let params = PackingParams::growing(4096, 2, 1, 64.0, 4096.0 / 3.0, default_zeta(3));
    let gb = build_base_frame_growing(&params).unwrap();
    assert_eq!(gb.m_d, 512);
    assert!((gb.eta_d * gb.eta_d - 2.0).abs() < 0.01, "eta^2 = {}", gb.eta_d * gb.eta_d);
    assert!(gb.frame.orthonormality_defect() < 1e-10);
    for j in 0..3 {
        assert!((norm(&gb.frame.column(j)) - 1.0).abs() < 1e-12);
    }
    let first = gb.frame.column(0);
    for j in 1..3 {
        let col = gb.frame.column(j);
        let mut s = 0.0;
        for i in 0..4096 {
            s += first[i] * col[i];
        }
        assert_eq!(s, 0.0, "column {j}");
    }
}

#[test]
fn growing_base_probabilities_within_bounds() {
    let n = 1024;
    let params = PackingParams::growing(n, 2, 1, 32.0, n as f64 / 3.0, default_zeta(3));
    let family = build_packing_growing(&params).unwrap();
    let p0 = family.probability_entries(0);
    let lo = params.lambda1 / (3.0 * n as f64);
    assert!(p0.data().iter().all(|&v| v >= lo && v <= 2.0 / 3.0));
}

#[test]
fn growing_family_swaps() {
    let n = 1024;
    let params = PackingParams::growing(n, 2, 1, 32.0, n as f64 / 3.0, default_zeta(3));
    let family = build_packing_growing(&params).unwrap();
    assert_eq!(family.member_count(), n / 2);
    let u0 = family.base.frame();
    let signed = family.signed_lambdas();
    let y1 = u0.row(0).to_vec();
    let y0 = u0.row(n - 1).to_vec();
    let swap_rhs = 2.0 * (0..3).map(|j| (signed[j] * (y1[j] - y0[j])).powi(2)).sum::<f64>();
    for (k, member) in family.members.iter().enumerate() {
        let changed: Vec<usize> = (0..n).filter(|&i| member.row(i) != u0.row(i)).collect();
        assert_eq!(changed, vec![0, k + n / 2], "member {}", k + 1);
        assert!(member.orthonormality_defect() < 1e-10);
        let diff = member.sub(u0).unwrap().scale_columns(&signed);
        let lhs = diff.frobenius_norm().powi(2);
        assert!((lhs - swap_rhs).abs() <= 1e-14 * swap_rhs);
    }
}

#[test]
fn growing_errors() {
    assert!(matches!(
        build_base_frame_growing(&PackingParams::growing(12, 2, 1, 9.0, 4.0, default_zeta(3))),
        Err(PackingError::TooSmall { .. })
    ));
    // κ so large that the heavy block alone exceeds unit column norm.
    let params = PackingParams::growing(64, 2, 1, 1e6, 20.0, default_zeta(3));
    assert!(matches!(build_base_frame_growing(&params), Err(PackingError::Unsolvable(_))));
}

// ---------------------------------------------------------------------------
// KL divergence

fn pm(entries: Vec<f64>, n: usize) -> ProbabilityMatrix {
    ProbabilityMatrix::from_matrix(DenseMatrix::new(n, n, entries).unwrap(), 1.0).unwrap()
}

#[test]
fn exact_kl_reference_values() {
    let p = pm(vec![0.3, 0.5, 0.5, 0.3], 2);
    let q = pm(vec![0.3, 0.25, 0.25, 0.3], 2);
    assert_eq!(exact_kl(&p, &p).unwrap(), 0.0);
    let expected = 0.5 * (0.5f64 / 0.25).ln() + 0.5 * (0.5f64 / 0.75).ln();
    let got = exact_kl(&p, &q).unwrap();
    assert!((got - expected).abs() < 1e-15);
    assert!((got - 0.14384103622589042).abs() < 1e-15);
    assert_eq!(bernoulli_kl(0.0, 0.0), Some(0.0));
    assert!((bernoulli_kl(1.0, 0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
    let hard = pm(vec![0.0, 0.0, 0.0, 0.0], 2);
    assert!(matches!(exact_kl(&p, &hard), Err(PackingError::InfiniteDivergence { i: 0, j: 1, .. })));
}

#[test]
fn compressed_pair_matches_dense_evaluation() {
    let params = constant_params(256, 2, 1, 9.0, 0.5);
    let family = build_packing_constant(&params).unwrap();
    let p0 = ProbabilityMatrix::from_matrix(family.probability_entries(0), 1.0).unwrap();
    for idx in [1, 77, 256] {
        let pi = ProbabilityMatrix::from_matrix(family.probability_entries(idx), 1.0).unwrap();
        let c = CompressedPair::new(family.frame(idx), family.frame(0), &family.signed_lambdas()).unwrap();
        assert!(c.class_count() <= 8);
        let dense_kl = exact_kl(&pi, &p0).unwrap();
        assert!((c.kl().unwrap() - dense_kl).abs() <= 1e-9 * dense_kl);
        let dense_frob = pi.entries().sub(p0.entries()).unwrap().frobenius_norm().powi(2);
        assert!((c.frobenius_sq() - dense_frob).abs() <= 1e-9 * dense_frob);
        let dense_zhou = zhou_bound(&pi, &p0, false).unwrap();
        assert!((c.zhou(false) - dense_zhou).abs() <= 1e-9 * dense_zhou);
        let ((lo, (i, j)), (hi, _)) = c.range_a(false);
        assert!(i != j && (pi.get(i, j) - lo).abs() < 1e-15);
        let (dlo, dhi) = pi.entry_range(false);
        assert!((lo - dlo).abs() < 1e-15 && (hi - dhi).abs() < 1e-15, "{lo} {hi} vs {dlo} {dhi}");
    }
}

// ---------------------------------------------------------------------------
// Certification

#[test]
fn constant_family_certifies() {
    let family = build_packing_constant(&constant_params(1024, 2, 1, 9.0, 0.02)).unwrap();
    let opts = VerifyOptions { sample_pairs: 50, ..VerifyOptions::default() };
    let report = verify_family(&family, &opts);
    for c in &report.checks {
        assert_eq!(c.status, CheckStatus::Pass, "{:?}: worst {} bound {}", c.kind, c.worst_value, c.bound);
    }
    assert!(report.pass && report.fully_certified);
    assert_eq!(report.pair_sampling, PairSampling::Sampled { seed: 0, count: 50 });
    assert_eq!(report.check(CheckKind::Separation).unwrap().entries.len(), 50);
}

#[test]
fn growing_family_kl_within_budget() {
    let n = 1024;
    let family = build_packing_growing(&PackingParams::growing(n, 2, 1, 32.0, n as f64 / 3.0, default_zeta(3))).unwrap();
    let report = verify_family(&family, &VerifyOptions { sample_pairs: 20, ..VerifyOptions::default() });
    let kl = report.check(CheckKind::KlDivergence).unwrap();
    assert_eq!(kl.entries.len(), n / 2);
    let budget = 9.0 / 80.0 * (n as f64).ln();
    assert!(kl.entries.iter().all(|e| e.value <= budget && e.value <= e.secondary.unwrap()));
    assert!(report.pass);
}

#[test]
fn corrupted_member_is_reported() {
    let mut family = build_packing_constant(&constant_params(256, 2, 1, 9.0, 0.02)).unwrap();
    for v in family.members[4].row_mut(10) {
        *v = 0.0;
    }
    let report = verify_family(&family, &VerifyOptions { sample_pairs: 10, ..VerifyOptions::default() });
    let ortho = report.check(CheckKind::Orthonormality).unwrap();
    assert_eq!(ortho.status, CheckStatus::Fail);
    assert_eq!(ortho.witness, 5);
    assert!(ortho.margin < 0.0);
    assert!(!report.pass);
}

#[test]
fn unsupported_signature_is_partial() {
    let family = build_packing_constant(&constant_params(256, 3, 0, 9.0, 0.02)).unwrap();
    let report = verify_family(&family, &VerifyOptions { sample_pairs: 10, ..VerifyOptions::default() });
    let sep = report.check(CheckKind::Separation).unwrap();
    assert_eq!(sep.status, CheckStatus::Partial);
    assert!(sep.description.contains("partial"));
    assert!(report.pass && !report.fully_certified);
}

#[test]
fn small_family_checks_every_pair_and_is_reproducible() {
    let family = build_packing_constant(&constant_params(64, 2, 1, 9.0, 0.02)).unwrap();
    assert_eq!(family.member_count(), 64);
    let opts = VerifyOptions { grid_step: 1e-3, diagonal_mode: DiagonalMode::Bernoulli, ..VerifyOptions::default() };
    let a = verify_family(&family, &opts);
    assert_eq!(a.pair_sampling, PairSampling::All);
    assert_eq!(a.pairs_checked, 65 * 64 / 2);
    let b = verify_family(&family, &opts);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn balanced_sign_bound_holds(seed in any::<u64>(), d in 2usize..24) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = unit((0..d).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let z = balanced_sign_vector(&a).unwrap();
        prop_assert!(dot(&z, &a).abs() <= (2.0f64 / 3.0).sqrt());
        prop_assert!(z.iter().all(|v| (v.abs() - 1.0 / (d as f64).sqrt()).abs() < 1e-15));
    }

    #[test]
    fn kl_is_below_quadratic_bound(seed in any::<u64>(), n in 2usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sym = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| {
            let mut m = DenseMatrix::from_fn(n, n, |_, _| rng.gen_range(lo..hi));
            m.symmetrize();
            ProbabilityMatrix::from_matrix(m, 1.0).unwrap()
        };
        let p = sym(&mut rng, 0.0, 1.0);
        let q = sym(&mut rng, 0.05, 0.95);
        let kl = exact_kl(&p, &q).unwrap();
        prop_assert!(kl >= 0.0);
        prop_assert!(kl <= zhou_bound(&p, &q, true).unwrap());
    }
}
