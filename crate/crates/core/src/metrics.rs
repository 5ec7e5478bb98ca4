//! Confusion counts, derived rates, Wald intervals and rank AUC.
//! The target class is the positive class throughout.

use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{OccError, Result};

pub const Z95: f64 = 1.96;
pub const Z98: f64 = 2.33;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

pub fn confusion(truth: &[Label], pred: &[Label]) -> Result<ConfusionCounts> {
    if truth.len() != pred.len() {
        return Err(OccError::LengthMismatch {
            left: truth.len(),
            right: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(OccError::EmptyDataset);
    }
    let mut c = ConfusionCounts::default();
    for (t, p) in truth.iter().zip(pred) {
        match (t, p) {
            (Label::Target, Label::Target) => c.tp += 1,
            (Label::Outlier, Label::Outlier) => c.tn += 1,
            (Label::Outlier, Label::Target) => c.fp += 1,
            (Label::Target, Label::Outlier) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// Wald half-width z·sqrt(acc(1 − acc)/n).
pub fn wald_interval(accuracy: f64, n: u64, z: f64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    z * (accuracy * (1.0 - accuracy) / n as f64).max(0.0).sqrt()
}

/// Evaluation summary. Rates with a zero denominator are `None` and
/// serialize as null.
///
/// Field order (JSON and CSV): n, n_for_ci, tp, tn, fp, fn, accuracy,
/// precision, sensitivity, specificity, ci95, ci98, ci95_pct, ci98_pct, auc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: u64,
    pub n_for_ci: u64,
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub ci95: Option<f64>,
    pub ci98: Option<f64>,
    pub ci95_pct: Option<f64>,
    pub ci98_pct: Option<f64>,
    pub auc: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Rates from confusion counts. `n_for_ci` is the N of the Wald interval;
/// pass `None` to use the number of evaluated samples.
pub fn metrics(c: &ConfusionCounts, n_for_ci: Option<u64>) -> MetricsReport {
    let n = c.total();
    let n_ci = n_for_ci.unwrap_or(n);
    let accuracy = ratio(c.tp + c.tn, n);
    let ci95 = accuracy
        .filter(|_| n_ci > 0)
        .map(|a| wald_interval(a, n_ci, Z95));
    let ci98 = accuracy
        .filter(|_| n_ci > 0)
        .map(|a| wald_interval(a, n_ci, Z98));
    MetricsReport {
        n,
        n_for_ci: n_ci,
        tp: c.tp,
        tn: c.tn,
        fp: c.fp,
        fn_: c.fn_,
        accuracy,
        precision: ratio(c.tp, c.tp + c.fp),
        sensitivity: ratio(c.tp, c.tp + c.fn_),
        specificity: ratio(c.tn, c.tn + c.fp),
        ci95,
        ci98,
        ci95_pct: ci95.map(|v| 100.0 * v),
        ci98_pct: ci98.map(|v| 100.0 * v),
        auc: None,
    }
}

/// Confusion, rates and (when both classes are present) AUC in one call.
pub fn evaluate(truth: &[Label], scores: &[f64], n_for_ci: Option<u64>) -> Result<MetricsReport> {
    if truth.len() != scores.len() {
        return Err(OccError::LengthMismatch {
            left: truth.len(),
            right: scores.len(),
        });
    }
    let pred: Vec<Label> = scores
        .iter()
        .map(|&s| {
            if s >= 0.0 {
                Label::Target
            } else {
                Label::Outlier
            }
        })
        .collect();
    let mut report = metrics(&confusion(truth, &pred)?, n_for_ci);
    report.auc = match roc_auc(truth, scores) {
        Ok(a) => Some(a),
        Err(OccError::SingleClass) => None,
        Err(e) => return Err(e),
    };
    Ok(report)
}

/// Probability that a random target outscores a random outlier, ties
/// counting one half. Computed from midranks (Mann–Whitney U).
pub fn roc_auc(truth: &[Label], scores: &[f64]) -> Result<f64> {
    if truth.len() != scores.len() {
        return Err(OccError::LengthMismatch {
            left: truth.len(),
            right: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(OccError::Domain("scores contain NaN".into()));
    }
    let n_pos = truth.iter().filter(|l| l.is_target()).count();
    let n_neg = truth.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(OccError::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut k = 0;
    while k < order.len() {
        let mut end = k + 1;
        while end < order.len() && scores[order[end]] == scores[order[k]] {
            end += 1;
        }
        // ranks k+1..=end share their mean
        let mid = (k + 1 + end) as f64 / 2.0;
        for &i in &order[k..end] {
            if truth[i].is_target() {
                rank_sum += mid;
            }
        }
        k = end;
    }
    let (p, q) = (n_pos as f64, n_neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * q))
}

impl MetricsReport {
    pub const CSV_HEADER: &'static str = "n,n_for_ci,tp,tn,fp,fn,accuracy,precision,sensitivity,specificity,ci95,ci98,ci95_pct,ci98_pct,auc";

    /// Values in [`Self::CSV_HEADER`] order; undefined rates are empty.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        [
            self.n.to_string(),
            self.n_for_ci.to_string(),
            self.tp.to_string(),
            self.tn.to_string(),
            self.fp.to_string(),
            self.fn_.to_string(),
            opt(self.accuracy),
            opt(self.precision),
            opt(self.sensitivity),
            opt(self.specificity),
            opt(self.ci95),
            opt(self.ci98),
            opt(self.ci95_pct),
            opt(self.ci98_pct),
            opt(self.auc),
        ]
        .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Outlier as O, Target as T};

    fn pair(tp: usize, tn: usize, fp: usize, fn_: usize) -> (Vec<Label>, Vec<Label>) {
        let mut truth = Vec::new();
        let mut pred = Vec::new();
        for (n, t, p) in [(tp, T, T), (tn, O, O), (fp, O, T), (fn_, T, O)] {
            truth.extend(std::iter::repeat_n(t, n));
            pred.extend(std::iter::repeat_n(p, n));
        }
        (truth, pred)
    }

    #[test]
    fn confusion_examples() {
        let (t, p) = pair(50, 40, 5, 5);
        let c = confusion(&t, &p).unwrap();
        assert_eq!((c.tp, c.tn, c.fp, c.fn_), (50, 40, 5, 5));

        let truth = vec![T, O, T, O];
        let c = confusion(&truth, &truth).unwrap();
        assert_eq!((c.fp, c.fn_), (0, 0));
        let c = confusion(&truth, &[T; 4]).unwrap();
        assert_eq!((c.fn_, c.tn), (0, 0));

        assert!(matches!(
            confusion(&truth, &[T]),
            Err(OccError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn rate_examples() {
        let (t, p) = pair(50, 40, 5, 5);
        let m = metrics(&confusion(&t, &p).unwrap(), None);
        assert_eq!(m.accuracy, Some(0.9));
        assert!((m.precision.unwrap() - 50.0 / 55.0).abs() < 1e-15);
        assert!((m.sensitivity.unwrap() - 50.0 / 55.0).abs() < 1e-15);
        assert!((m.specificity.unwrap() - 40.0 / 45.0).abs() < 1e-15);
    }

    #[test]
    fn undefined_rates_are_null() {
        let m = metrics(
            &ConfusionCounts {
                tp: 3,
                tn: 0,
                fp: 0,
                fn_: 1,
            },
            None,
        );
        assert_eq!(m.specificity, None);
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"specificity\":null"));
        assert!(m.csv_row().split(',').nth(9).unwrap().is_empty());
    }

    #[test]
    fn wald_examples() {
        assert!((wald_interval(0.98, 1214, Z95) - 0.00787).abs() < 1e-4);
        assert!((wald_interval(0.98, 1214, Z98) - 0.00936).abs() < 1e-4);
        assert_eq!(wald_interval(1.0, 1214, Z95), 0.0);
        let m = metrics(
            &ConfusionCounts {
                tp: 10,
                tn: 0,
                fp: 0,
                fn_: 0,
            },
            Some(1214),
        );
        assert_eq!((m.ci95, m.ci98), (Some(0.0), Some(0.0)));
    }

    #[test]
    fn auc_examples() {
        assert_eq!(roc_auc(&[T, T, O, O], &[0.9, 0.8, 0.2, 0.1]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[T, O, T, O], &[0.5; 4]).unwrap(), 0.5);
        assert_eq!(roc_auc(&[T, O, T, O], &[0.9, 0.8, 0.7, 0.1]).unwrap(), 0.75);
        assert!(matches!(
            roc_auc(&[T, T], &[0.1, 0.2]),
            Err(OccError::SingleClass)
        ));
    }

    #[test]
    fn header_matches_row_width() {
        let m = metrics(
            &ConfusionCounts {
                tp: 1,
                tn: 1,
                fp: 1,
                fn_: 1,
            },
            None,
        );
        assert_eq!(
            m.csv_row().split(',').count(),
            MetricsReport::CSV_HEADER.split(',').count()
        );
        let json = serde_json::to_value(&m).unwrap();
        let keys: Vec<&String> = json.as_object().unwrap().keys().collect();
        let header: Vec<&str> = MetricsReport::CSV_HEADER.split(',').collect();
        assert_eq!(keys.len(), header.len());
    }
}
