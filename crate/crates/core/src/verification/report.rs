use std::fmt;

/// One named check: observed worst value against its bound.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl CheckResult {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            passed: value <= bound,
        }
    }
}

/// Outcome of a verification suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckResult>,
}

pub const REPORT_CSV_HEADER: &str = "suite,check,trials,seed,value,bound,passed";

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{},{},{},{},{:e},{:e},{}",
                    self.suite, c.name, self.trials, self.seed, c.value, c.bound, c.passed
                )
            })
            .collect()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({} trials, seed {})", self.suite, self.trials, self.seed)?;
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {:<28} {:.3e} (bound {:.3e})",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.value,
                c.bound
            )?;
        }
        Ok(())
    }
}
