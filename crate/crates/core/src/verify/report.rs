use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Outcome of one residual check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub params: Map<String, Value>,
}

impl TestResult {
    /// Passes iff `|residual| <= tolerance`; NaN never passes.
    pub fn within(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        TestResult {
            name: name.into(),
            residual,
            tolerance,
            pass: residual.abs() <= tolerance,
            params: Map::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }
}

/// `pass` holds iff every test passes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub method: String,
    pub tests: Vec<TestResult>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(method: impl Into<String>, tests: Vec<TestResult>) -> Self {
        let pass = tests.iter().all(|t| t.pass);
        VerificationReport {
            method: method.into(),
            tests,
            pass,
        }
    }

    /// Concatenates reports; each test records the method it came from,
    /// keeping a tag set by an earlier merge.
    pub fn merge(reports: Vec<VerificationReport>) -> Self {
        let method = reports.iter().map(|r| r.method.as_str()).collect::<Vec<_>>().join(",");
        let tests = reports
            .into_iter()
            .flat_map(|r| {
                let m = r.method;
                r.tests.into_iter().map(move |t| {
                    if t.params.contains_key("method") {
                        t
                    } else {
                        t.with_param("method", m.clone())
                    }
                })
            })
            .collect();
        VerificationReport::new(method, tests)
    }

    pub fn failures(&self) -> impl Iterator<Item = &TestResult> {
        self.tests.iter().filter(|t| !t.pass)
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.tests.iter().map(|t| t.residual.abs()).fold(0.0, f64::max)
    }
}
