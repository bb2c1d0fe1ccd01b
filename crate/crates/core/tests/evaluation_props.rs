mod common;

use common::seeded;
use coreness::centrality::{CentralityScores, Method};
use coreness::evaluation::*;
use coreness::graph::{Group, Labeling};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn labeling(bits: &[bool]) -> Labeling {
    Labeling::new(bits.iter().map(|&b| if b { Group::Core } else { Group::Periphery }).collect())
}

fn random_labeling(rng: &mut impl rand::Rng, n: usize, k: usize) -> Labeling {
    let mut groups = vec![Group::Periphery; n];
    groups[..k].fill(Group::Core);
    groups.shuffle(rng);
    Labeling::new(groups)
}

#[test]
fn random_assignment_overlap_matches_hypergeometric_mean() {
    // With K core nodes in both labelings, the shared core count X is
    // hypergeometric(n, K, K) and the agreement is (n - 2K + 2X) / n.
    let mut rng = seeded(31);
    for &(n, k) in &[(100usize, 30usize), (50, 10), (200, 90)] {
        let (nf, kf) = (n as f64, k as f64);
        let mean_x = kf * kf / nf;
        let var_x = kf * (kf / nf) * ((nf - kf) / nf) * ((nf - kf) / (nf - 1.0));
        let largest = (nf - kf) / nf;
        let to_overlap = |x: f64| ((nf - 2.0 * kf + 2.0 * x) / nf - largest) / (1.0 - largest);
        let mean = to_overlap(mean_x);
        let sd = var_x.sqrt() * 2.0 / nf / (1.0 - largest);

        let truth = random_labeling(&mut rng, n, k);
        let draws = 1000;
        let total: f64 = (0..draws).map(|_| overlap(&random_labeling(&mut rng, n, k), &truth).unwrap()).sum();
        let observed = total / draws as f64;
        let se = sd / (draws as f64).sqrt();
        assert!((observed - mean).abs() < 3.0 * se, "n {n} k {k}: {observed} vs {mean} (se {se})");
    }
}

fn score_vector() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..10.0, 2..60).prop_filter("nonzero", |v| v.iter().any(|&x| x > 0.0))
}

proptest! {
    #[test]
    fn ipr_is_bounded_and_scale_invariant(v in score_vector(), c in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0]) {
        let n = v.len() as f64;
        let i = ipr_of(&v).unwrap();
        prop_assert!(i >= 1.0 / n - 1e-12 && i <= 1.0 + 1e-12);
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        prop_assert!((ipr_of(&scaled).unwrap() - i).abs() < 1e-12);
    }

    #[test]
    fn agreement_with_complement_sums_to_one(bits in prop::collection::vec(any::<bool>(), 1..80), seed in any::<u64>()) {
        let truth = labeling(&bits);
        let mut rng = seeded(seed);
        let mut guess = bits.clone();
        guess.shuffle(&mut rng);
        let t = labeling(&guess);
        let total = agreement(&t, &truth).unwrap() + agreement(&t.complement(), &truth).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(overlap(&t, &truth).map_or(true, |q| q <= 1.0));
    }

    #[test]
    fn pearson_matrix_ignores_node_order(
        rows in prop::collection::vec((0.0f64..5.0, 0.0f64..5.0, 0.0f64..5.0), 3..40),
        seed in any::<u64>(),
    ) {
        let column = |f: fn(&(f64, f64, f64)) -> f64, order: &[usize]| order.iter().map(|&i| f(&rows[i])).collect::<Vec<_>>();
        let build = |order: &[usize]| vec![
            CentralityScores::new(Method::Degree, column(|r| r.0, order)),
            CentralityScores::new(Method::PageRank, column(|r| r.1, order)),
            CentralityScores::new(Method::Eigenvector, column(|r| r.2, order)),
        ];
        let identity: Vec<usize> = (0..rows.len()).collect();
        let mut shuffled = identity.clone();
        shuffled.shuffle(&mut seeded(seed));
        let a = pearson_matrix(&build(&identity)).unwrap();
        let b = pearson_matrix(&build(&shuffled)).unwrap();
        for (ra, rb) in a.values.iter().zip(&b.values) {
            for (x, y) in ra.iter().zip(rb) {
                match (x, y) {
                    (Some(x), Some(y)) => {
                        prop_assert!((x - y).abs() < 1e-9);
                        prop_assert!((-1.0..=1.0).contains(x));
                    }
                    (None, None) => {}
                    _ => prop_assert!(false, "missing entry in only one ordering"),
                }
            }
        }
        for (i, row) in a.values.iter().enumerate() {
            prop_assert!(row[i].is_none() || row[i] == Some(1.0));
        }
    }
}
