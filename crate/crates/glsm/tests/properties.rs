//! Randomized invariants over the core linear-algebra layer.

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use glsm::config::{SamplePlan, SampleStrategy};
use glsm::golden::{golden_from_product, product_from_golden, ProductStructure, PHI};
use glsm::linalg::{radical, signature_of_gram, BilinearForm, Subspace};
use glsm::run::sample_points;

/// Euclidean reflection I - 2 v v^T / (v^T v): always an involution.
fn householder(v: &[f64]) -> ProductStructure {
    let n = v.len();
    let v = DVector::from_row_slice(v);
    let f = DMatrix::identity(n, n) - 2.0 / v.norm_squared() * &v * v.transpose();
    ProductStructure::new(f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn golden_product_round_trip(v in prop::collection::vec(0.2f64..2.0, 2..6)) {
        let f = householder(&v);
        prop_assert!(f.defect() < 1e-12);
        let p = golden_from_product(&f);
        prop_assert!(p.defect() < 1e-12);
        let back = product_from_golden(&p);
        assert_relative_eq!(back.matrix(), f.matrix(), epsilon = 1e-12);
        // trace moves affinely with the conversion
        assert_relative_eq!(
            p.matrix().trace(),
            0.5 * (v.len() as f64 + 5.0f64.sqrt() * f.matrix().trace()),
            epsilon = 1e-12
        );
        // phi shows up in the trace identity phi^2 = phi + 1
        prop_assert!((PHI * PHI - PHI - 1.0).abs() < 1e-15);
    }

    #[test]
    fn radical_rank_matches_zero_diagonal_count(
        diag in prop::collection::vec(-2i32..=2, 2..=6)
    ) {
        let n = diag.len();
        let d: Vec<f64> = diag.iter().map(|&v| v as f64).collect();
        let form = BilinearForm::from_diagonal(&d);
        let rad = radical(&form, &Subspace::full(n));
        let zeros = diag.iter().filter(|&&v| v == 0).count();
        prop_assert_eq!(rad.rank(), zeros);
        let (p, q, z) = signature_of_gram(form.gram());
        prop_assert_eq!(z, zeros);
        prop_assert_eq!(p, diag.iter().filter(|&&v| v > 0).count());
        prop_assert_eq!(q, diag.iter().filter(|&&v| v < 0).count());
        // every radical vector is orthogonal to the whole space
        for k in 0..rad.rank() {
            let v = rad.column(k);
            for j in 0..n {
                let mut e = DVector::zeros(n);
                e[j] = 1.0;
                prop_assert!(form.apply(&v, &e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sampling_respects_count_and_domain(
        points in 0usize..40,
        seed in 0u64..1000,
        grid in any::<bool>()
    ) {
        let plan = SamplePlan {
            points,
            seed,
            strategy: if grid { SampleStrategy::Grid } else { SampleStrategy::LowDiscrepancy },
        };
        let domain = [(-1.0, 2.0), (0.5, 0.75)];
        let pts = sample_points(&plan, &domain);
        prop_assert_eq!(pts.len(), points);
        for p in &pts {
            for (x, &(lo, hi)) in p.iter().zip(&domain) {
                prop_assert!(*x > lo && *x < hi);
            }
        }
    }
}
