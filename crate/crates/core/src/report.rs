use serde::Serialize;

/// One named numerical check with its measured residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

impl CheckResult {
    /// Passes when residual < threshold (NaN fails).
    pub fn below(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        let ok = residual < threshold;
        CheckResult {
            name: name.into(),
            residual,
            threshold,
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        }
    }

    /// Passes when residual > threshold, for checks that must detect a violation.
    pub fn above(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        let ok = residual > threshold;
        CheckResult {
            name: name.into(),
            residual,
            threshold,
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// Folds residuals into one check on their maximum; any NaN fails.
pub fn max_check(name: &str, residuals: impl IntoIterator<Item = f64>, threshold: f64) -> CheckResult {
    let mut worst = 0.0f64;
    for r in residuals {
        if r.is_nan() {
            return CheckResult::below(name, f64::NAN, threshold);
        }
        worst = worst.max(r);
    }
    CheckResult::below(name, worst, threshold)
}
