use alignment::{
    align, block_procrustes, check_equivalence, dtilde_tti, dtilde_tti_oracle, grid_minimum, tti_distance,
    BlockRotation, Objective,
};
use matrixkit::{polar_orthogonal_factor, DenseMatrix};
use netmodel::{Signature, SpectralPair};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sig(p: usize, q: usize) -> Signature {
    Signature::new(p, q).unwrap()
}

fn random_matrix(n: usize, d: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    DenseMatrix::from_fn(n, d, |_, _| rng.gen_range(-1.0..1.0))
}

fn random_orthogonal(k: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    if k == 0 {
        return DenseMatrix::zeros(0, 0);
    }
    polar_orthogonal_factor(&random_matrix(k, k, rng)).unwrap()
}

fn random_block(s: Signature, rng: &mut ChaCha8Rng) -> BlockRotation {
    BlockRotation::new(random_orthogonal(s.p, rng), random_orthogonal(s.q, rng)).unwrap()
}

fn rotation_2d(theta: f64) -> DenseMatrix {
    let (c, s) = (theta.cos(), theta.sin());
    DenseMatrix::new(2, 2, vec![c, -s, s, c]).unwrap()
}

/// Element of `𝕆_{2,1}`: a rotation of the positive block followed by a
/// hyperbolic boost mixing coordinates 1 and 3.
fn indefinite_orthogonal(theta: f64, alpha: f64) -> DenseMatrix {
    let r = rotation_2d(theta);
    let rot = DenseMatrix::from_fn(3, 3, |i, j| if i < 2 && j < 2 { r.get(i, j) } else if i == j { 1.0 } else { 0.0 });
    let (ch, sh) = (alpha.cosh(), alpha.sinh());
    let boost = DenseMatrix::new(3, 3, vec![ch, 0.0, sh, 0.0, 1.0, 0.0, sh, 0.0, ch]).unwrap();
    rot.matmul(&boost).unwrap()
}

#[test]
fn identical_inputs_align_trivially() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = random_matrix(30, 3, &mut rng);
    let a = align(&x, &x, sig(2, 1)).unwrap();
    assert!(a.frobenius < 1e-12);
    assert_eq!(tti_distance(&x, &x, sig(2, 1)).unwrap(), a.two_to_infinity);
    assert!(a.rotation.assemble().sub(&DenseMatrix::identity(3)).unwrap().max_abs() < 1e-12);
}

#[test]
fn recovers_known_block_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = random_matrix(40, 3, &mut rng);
    let r = rotation_2d(0.7);
    let w = BlockRotation::new(r.clone(), DenseMatrix::identity(1)).unwrap();
    let xhat = w.apply(&x).unwrap();
    let found = block_procrustes(&xhat, &x, sig(2, 1)).unwrap();
    assert!(found.w_p().sub(&r.transpose()).unwrap().max_abs() < 1e-10);
    let resid = found.apply(&xhat).unwrap().sub(&x).unwrap();
    assert!(resid.frobenius_norm() <= 1e-10);
}

#[test]
fn closed_form_matches_angle_grid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let x = random_matrix(50, 3, &mut rng);
        let xhat = random_block(sig(2, 1), &mut rng).apply(&x).unwrap().add(&random_matrix(50, 3, &mut rng).scale(0.3)).unwrap();
        let closed = align(&xhat, &x, sig(2, 1)).unwrap().frobenius;
        let oracle = grid_minimum(&xhat, &x, sig(2, 1), Objective::Frobenius, 1e-4).unwrap();
        assert!(closed <= oracle.value * (1.0 + 1e-12));
        assert!(closed >= oracle.lower_bound);
        let gap = (oracle.value - closed) / closed;
        assert!(gap <= 1e-3, "relative gap {gap}");
    }
}

#[test]
fn one_block_reduces_to_classical_procrustes() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let x = random_matrix(25, 3, &mut rng);
        let xhat = random_matrix(25, 3, &mut rng);
        let w = block_procrustes(&xhat, &x, sig(3, 0)).unwrap();
        let classical = polar_orthogonal_factor(&xhat.t_matmul(&x).unwrap()).unwrap();
        assert!(w.assemble().sub(&classical).unwrap().max_abs() < 1e-12);
    }
}

#[test]
fn rank_deficient_cross_gram_is_flagged() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = random_matrix(20, 3, &mut rng);
    let mut xhat = x.clone();
    for i in 0..20 {
        xhat.set(i, 1, 0.0);
    }
    let w = block_procrustes(&xhat, &x, sig(2, 1)).unwrap();
    assert!(w.rank_deficient);
    assert!(w.assemble().orthonormality_defect() < 1e-12);
}

#[test]
fn tti_vanishes_on_group_orbits() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for s in [sig(2, 1), sig(3, 2), sig(1, 1), sig(4, 0)] {
        let x = random_matrix(30, s.d(), &mut rng);
        let y = random_block(s, &mut rng).apply(&x).unwrap();
        assert!(tti_distance(&y, &x, s).unwrap() < 1e-10);
    }
}

/// The plug-in value is an upper bound on the exact minimum, so it can never
/// fall below the oracle's certified lower bound. The size of the gap is
/// reported by the acceptance suite.
#[test]
fn tti_plug_in_dominates_exact_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let x = random_matrix(40, 3, &mut rng);
        let xhat = random_block(sig(2, 1), &mut rng).apply(&x).unwrap().add(&random_matrix(40, 3, &mut rng).scale(0.05)).unwrap();
        let plug_in = tti_distance(&xhat, &x, sig(2, 1)).unwrap();
        let oracle = grid_minimum(&xhat, &x, sig(2, 1), Objective::TwoToInfinity, 1e-4).unwrap();
        assert!(plug_in >= oracle.lower_bound);
        assert!(oracle.value >= oracle.lower_bound);
    }
}

#[test]
fn dtilde_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let s = sig(2, 1);
    let u = polar_orthogonal_factor(&random_matrix(20, 3, &mut rng)).unwrap();
    let a = SpectralPair::new(u.clone(), vec![3.0, 3.0, 1.0], s).unwrap();
    assert!(dtilde_tti(&a, &a).unwrap() < 1e-14);
    let w = BlockRotation::new(rotation_2d(1.1), DenseMatrix::identity(1).scale(-1.0)).unwrap();
    let b = SpectralPair::new(w.apply(&u).unwrap(), vec![3.0, 3.0, 1.0], s).unwrap();
    assert!(dtilde_tti(&a, &b).unwrap() < 1e-10);
    assert!(dtilde_tti_oracle(&a, &b, 1e-3).unwrap().value < 1e-9);
    let c = SpectralPair::new(u, vec![3.0, 1.0, 1.0], sig(1, 2)).unwrap();
    assert!(dtilde_tti(&a, &c).is_err());
}

#[test]
fn equivalence_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let s = sig(2, 1);
    let x = random_matrix(15, 3, &mut rng).scale(0.5);
    assert!(check_equivalence(&x, &x, s, 1e-12).unwrap());
    let q = indefinite_orthogonal(0.4, 0.9);
    let y = x.matmul(&q).unwrap();
    assert!(check_equivalence(&x, &y, s, 1e-10).unwrap());
    // Not orthogonal, so not reachable by any block rotation.
    assert!(tti_distance(&y, &x, s).unwrap() > 1e-3);
    let mut z = x.clone();
    z.set(0, 0, z.get(0, 0) + 0.1);
    assert!(!check_equivalence(&x, &z, s, 1e-8).unwrap());
}

#[test]
fn oracle_rejects_large_signatures() {
    let x = DenseMatrix::zeros(4, 4);
    assert!(grid_minimum(&x, &x, sig(3, 1), Objective::TwoToInfinity, 1e-3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn procrustes_never_worse_than_identity(seed in any::<u64>(), p in 0usize..4, q in 0usize..3) {
        prop_assume!(p + q >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sig(p, q);
        let x = random_matrix(12, s.d(), &mut rng);
        let xhat = random_matrix(12, s.d(), &mut rng);
        let a = align(&xhat, &x, s).unwrap();
        prop_assert!(a.frobenius <= xhat.sub(&x).unwrap().frobenius_norm() + 1e-12);
        let w = a.rotation.assemble();
        let ipq = s.matrix();
        let preserved = w.matmul(&ipq).unwrap().matmul(&w.transpose()).unwrap();
        prop_assert!(preserved.sub(&ipq).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn oracle_distance_satisfies_triangle_inequality(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sig(2, 1);
        let a = random_matrix(10, 3, &mut rng);
        let b = random_block(s, &mut rng).apply(&a).unwrap().add(&random_matrix(10, 3, &mut rng).scale(0.2)).unwrap();
        let c = random_block(s, &mut rng).apply(&b).unwrap().add(&random_matrix(10, 3, &mut rng).scale(0.2)).unwrap();
        let d = |x: &DenseMatrix, y: &DenseMatrix| grid_minimum(x, y, s, Objective::TwoToInfinity, 1e-3).unwrap().value;
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-6);
    }
}
