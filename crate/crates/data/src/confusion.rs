//! Confusion-matrix metrics (positive class = fake) and the exhaustive
//! integer search that reconstructs a matrix from published metric values.

use serde::{Deserialize, Serialize};

use crate::error::{DataError, Result};

/// Default per-metric tolerance when reconstructing from values printed
/// to four decimal places (half an ulp of the fourth decimal).
pub const DEFAULT_RECONSTRUCTION_TOL: f64 = 5e-5;

/// Counts with fake as the positive class: `tp` fakes called fake, `fn`
/// fakes called real, `tn` reals called real, `fp` reals called fake.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
    pub fp: u64,
}

/// Sensitivity / specificity / accuracy, all in [0, 1], at full precision.
/// Display layers round to four decimals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricTriple {
    pub sensitivity: f64,
    pub specificity: f64,
    pub accuracy: f64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fn_: u64, tn: u64, fp: u64) -> Self {
        ConfusionMatrix { tp, fn_, tn, fp }
    }

    pub fn n_fake(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn n_real(&self) -> u64 {
        self.tn + self.fp
    }

    pub fn total(&self) -> u64 {
        self.n_fake() + self.n_real()
    }

    /// sensitivity = tp/(tp+fn), specificity = tn/(tn+fp),
    /// accuracy = (tp+tn)/total. Errors when either class is empty.
    pub fn metrics(&self) -> Result<MetricTriple> {
        if self.n_fake() == 0 {
            return Err(DataError::ZeroDenominator {
                detail: "no fake samples (tp + fn = 0)".into(),
            });
        }
        if self.n_real() == 0 {
            return Err(DataError::ZeroDenominator {
                detail: "no real samples (tn + fp = 0)".into(),
            });
        }
        Ok(MetricTriple {
            sensitivity: self.tp as f64 / self.n_fake() as f64,
            specificity: self.tn as f64 / self.n_real() as f64,
            accuracy: (self.tp + self.tn) as f64 / self.total() as f64,
        })
    }
}

impl MetricTriple {
    fn within(&self, other: &MetricTriple, tol: f64) -> bool {
        (self.sensitivity - other.sensitivity).abs() <= tol
            && (self.specificity - other.specificity).abs() <= tol
            && (self.accuracy - other.accuracy).abs() <= tol
    }
}

/// Searches every integer matrix with `tp + fn = n_fake` and
/// `tn + fp = n_real` for one whose metrics match `target` within `tol`
/// per metric. Exactly one match is required: zero matches and multiple
/// matches are distinct errors (the latter listing the contenders).
pub fn reconstruct_confusion(
    n_real: u64,
    n_fake: u64,
    target: &MetricTriple,
    tol: f64,
) -> Result<ConfusionMatrix> {
    if n_real == 0 || n_fake == 0 {
        return Err(DataError::InvalidParameter {
            detail: format!("both classes must be nonempty (n_real={n_real}, n_fake={n_fake})"),
        });
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(DataError::InvalidParameter {
            detail: format!("tolerance must be finite and nonnegative, got {tol}"),
        });
    }
    let mut matches = Vec::new();
    for tp in 0..=n_fake {
        for tn in 0..=n_real {
            let cm = ConfusionMatrix::new(tp, n_fake - tp, tn, n_real - tn);
            let m = cm.metrics().expect("both classes nonempty");
            if m.within(target, tol) {
                matches.push(cm);
            }
        }
    }
    match matches.len() {
        1 => Ok(matches[0]),
        0 => Err(DataError::NoMatch {
            detail: format!(
                "n_real={n_real}, n_fake={n_fake}, target=({:.4}, {:.4}, {:.4}), tol={tol}",
                target.sensitivity, target.specificity, target.accuracy
            ),
        }),
        n => Err(DataError::AmbiguousMatch {
            detail: format!(
                "{n} matrices match within tol={tol}; first two: {:?} and {:?}",
                matches[0], matches[1]
            ),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::round4;

    fn table3() -> MetricTriple {
        MetricTriple {
            sensitivity: 0.8030,
            specificity: 0.9091,
            accuracy: 0.8384,
        }
    }

    #[test]
    fn interpreter_matrix_reconstructs_uniquely() {
        let cm = reconstruct_confusion(33, 66, &table3(), DEFAULT_RECONSTRUCTION_TOL).unwrap();
        assert_eq!(cm, ConfusionMatrix::new(53, 13, 30, 3));
        let m = cm.metrics().unwrap();
        assert_eq!(round4(m.sensitivity), 0.8030);
        assert_eq!(round4(m.specificity), 0.9091);
        assert_eq!(round4(m.accuracy), 0.8384);
    }

    #[test]
    fn perfect_metrics_give_perfect_matrix() {
        let perfect = MetricTriple {
            sensitivity: 1.0,
            specificity: 1.0,
            accuracy: 1.0,
        };
        let cm = reconstruct_confusion(10, 10, &perfect, DEFAULT_RECONSTRUCTION_TOL).unwrap();
        assert_eq!(cm, ConfusionMatrix::new(10, 0, 10, 0));
        assert_eq!(
            cm.metrics().unwrap(),
            MetricTriple {
                sensitivity: 1.0,
                specificity: 1.0,
                accuracy: 1.0
            }
        );
    }

    #[test]
    fn all_wrong_gives_zero_metrics() {
        let m = ConfusionMatrix::new(0, 5, 0, 5).metrics().unwrap();
        assert_eq!((m.sensitivity, m.specificity, m.accuracy), (0.0, 0.0, 0.0));
    }

    #[test]
    fn loose_tolerance_is_ambiguous() {
        let err = reconstruct_confusion(33, 66, &table3(), 0.5).unwrap_err();
        assert!(matches!(err, DataError::AmbiguousMatch { .. }), "{err}");
    }

    #[test]
    fn impossible_target_has_no_match() {
        // With 2 fakes, sensitivity can only be 0, 0.5, or 1.
        let target = MetricTriple {
            sensitivity: 0.25,
            specificity: 1.0,
            accuracy: 0.9,
        };
        let err = reconstruct_confusion(2, 2, &target, 1e-6).unwrap_err();
        assert!(matches!(err, DataError::NoMatch { .. }), "{err}");
    }

    #[test]
    fn reconstruction_reproduces_target_within_tol() {
        // Round-trip: matrix → rounded metrics → reconstruction.
        for (tp, fn_, tn, fp) in [(7, 3, 8, 2), (1, 9, 9, 1), (10, 0, 0, 10), (5, 5, 5, 5)] {
            let cm = ConfusionMatrix::new(tp, fn_, tn, fp);
            let exact = cm.metrics().unwrap();
            let rounded = MetricTriple {
                sensitivity: round4(exact.sensitivity),
                specificity: round4(exact.specificity),
                accuracy: round4(exact.accuracy),
            };
            let back = reconstruct_confusion(
                cm.n_real(),
                cm.n_fake(),
                &rounded,
                DEFAULT_RECONSTRUCTION_TOL,
            )
            .unwrap();
            assert_eq!(back, cm);
            let reproduced = back.metrics().unwrap();
            assert!((reproduced.sensitivity - rounded.sensitivity).abs() <= 5e-5);
            assert!((reproduced.specificity - rounded.specificity).abs() <= 5e-5);
            assert!((reproduced.accuracy - rounded.accuracy).abs() <= 5e-5);
        }
    }

    #[test]
    fn degenerate_matrices_reject_metrics() {
        assert!(ConfusionMatrix::new(0, 0, 5, 5).metrics().is_err());
        assert!(ConfusionMatrix::new(5, 5, 0, 0).metrics().is_err());
        assert!(reconstruct_confusion(0, 5, &table3(), 1e-4).is_err());
        assert!(reconstruct_confusion(5, 5, &table3(), -1.0).is_err());
    }

    #[test]
    fn serde_uses_fn_field_name() {
        let cm = ConfusionMatrix::new(1, 2, 3, 4);
        let json = serde_json::to_string(&cm).unwrap();
        assert!(json.contains("\"fn\":2"), "got: {json}");
        let back: ConfusionMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cm);
    }
}
