use citemetrics_core::network::{eigenfactor_vector, JournalCitationMatrix, NetworkError, RankingParams};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("J{i}")).collect()
}

fn matrix(counts: Vec<Vec<u64>>, articles: Vec<u64>) -> JournalCitationMatrix {
    JournalCitationMatrix::from_dense(ids(counts.len()), &counts, articles, 2016, 5).unwrap()
}

/// Solves (I - a Pᵀ - a t dᵀ) pi = (1 - a) t directly, where P is the
/// row-normalized matrix without self-citations and d marks rows that cite
/// no other journal.
fn dense_eigenfactor(counts: &[Vec<u64>], articles: &[u64], damping: f64) -> Vec<f64> {
    let n = counts.len();
    let total_articles: u64 = articles.iter().sum();
    let t = DVector::from_iterator(n, articles.iter().map(|&a| a as f64 / total_articles as f64));
    let mut p = DMatrix::<f64>::zeros(n, n);
    let mut dangling = DVector::<f64>::zeros(n);
    for i in 0..n {
        let out: u64 = (0..n).filter(|&j| j != i).map(|j| counts[i][j]).sum();
        if out == 0 {
            dangling[i] = 1.0;
            continue;
        }
        for j in (0..n).filter(|&j| j != i) {
            p[(i, j)] = counts[i][j] as f64 / out as f64;
        }
    }
    let system = DMatrix::identity(n, n) - p.transpose() * damping - &t * dangling.transpose() * damping;
    let pi = system.lu().solve(&(&t * (1.0 - damping))).expect("system is nonsingular");
    let sum = pi.sum();
    pi.iter().map(|x| 100.0 * x / sum).collect()
}

fn dense_case() -> impl Strategy<Value = (Vec<Vec<u64>>, Vec<u64>)> {
    (1usize..=10).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(prop_oneof![3 => Just(0u64), 2 => 0u64..40], n), n),
            prop::collection::vec(1u64..60, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn power_iteration_matches_dense_solve((counts, articles) in dense_case()) {
        let m = matrix(counts.clone(), articles.clone());
        match eigenfactor_vector(&m, &RankingParams::default()) {
            Ok(scores) => {
                let expected = dense_eigenfactor(&counts, &articles, 0.85);
                for (a, b) in scores.iter().zip(&expected) {
                    prop_assert!((a - b).abs() <= 1e-6, "{scores:?} vs {expected:?}");
                }
                prop_assert!((scores.iter().sum::<f64>() - 100.0).abs() <= 1e-9);
            }
            Err(NetworkError::NoCitations) => {
                let off_diagonal = (0..counts.len())
                    .flat_map(|i| (0..counts.len()).map(move |j| (i, j)))
                    .any(|(i, j)| i != j && counts[i][j] > 0);
                prop_assert!(!off_diagonal);
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn scores_ignore_a_common_scale((counts, articles) in dense_case(), factor in 2u64..50) {
        let m = matrix(counts, articles);
        let params = RankingParams::default();
        if let Ok(a) = eigenfactor_vector(&m, &params) {
            let b = eigenfactor_vector(&m.scaled(factor), &params).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn ring_is_exactly_uniform() {
    for n in 2..=10 {
        let counts: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..n).map(|j| u64::from(j == (i + 1) % n) * 7).collect())
            .collect();
        let scores = eigenfactor_vector(&matrix(counts, vec![11; n]), &RankingParams::default()).unwrap();
        for s in &scores {
            assert!((s - 100.0 / n as f64).abs() <= 1e-12, "{n}: {scores:?}");
        }
    }
}

#[test]
fn three_cycle_with_one_iteration_does_not_converge() {
    let counts = vec![vec![0, 5, 0], vec![0, 0, 5], vec![5, 0, 0]];
    let m = matrix(counts, vec![10, 20, 70]);
    let params = RankingParams {
        max_iterations: 1,
        ..RankingParams::default()
    };
    assert_eq!(eigenfactor_vector(&m, &params), Err(NetworkError::NonConvergence { iterations: 1 }));
}
