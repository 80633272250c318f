//! Suite results.

use std::time::Duration;

use crate::output::Cell;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// The worst residual must not exceed the tolerance.
    AtMost,
    /// The smallest value must reach the threshold.
    AtLeast,
}

impl Bound {
    pub fn symbol(self) -> &'static str {
        match self {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub invariant: String,
    pub cases: usize,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.value <= self.tolerance,
            Bound::AtLeast => self.value >= self.tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub checks: Vec<Check>,
    /// First error raised by a case, if any. A failing case also turns its
    /// residual into NaN so the check fails.
    pub errors: Vec<String>,
    pub wall: Duration,
}

impl SuiteReport {
    pub fn new(name: &str) -> Self {
        Self { name: name.into(), cases: 0, checks: Vec::new(), errors: Vec::new(), wall: Duration::ZERO }
    }

    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, invariant: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.invariant == invariant)
    }

    /// Records the maximum of `values` against `tol`.
    pub fn at_most<I>(&mut self, invariant: &str, tol: f64, values: I)
    where
        I: IntoIterator<Item = hquot::Result<f64>>,
    {
        self.push(invariant, tol, Bound::AtMost, values);
    }

    /// Records the minimum of `values` against `threshold`.
    pub fn at_least<I>(&mut self, invariant: &str, threshold: f64, values: I)
    where
        I: IntoIterator<Item = hquot::Result<f64>>,
    {
        self.push(invariant, threshold, Bound::AtLeast, values);
    }

    fn push<I>(&mut self, invariant: &str, tolerance: f64, bound: Bound, values: I)
    where
        I: IntoIterator<Item = hquot::Result<f64>>,
    {
        let mut cases = 0;
        let mut value = match bound {
            Bound::AtMost => f64::NEG_INFINITY,
            Bound::AtLeast => f64::INFINITY,
        };
        let mut poisoned = false;
        for v in values {
            cases += 1;
            match v {
                Ok(v) if v.is_nan() => poisoned = true,
                Ok(v) => match bound {
                    Bound::AtMost => value = value.max(v),
                    Bound::AtLeast => value = value.min(v),
                },
                Err(e) => {
                    poisoned = true;
                    if self.errors.len() < 4 {
                        self.errors.push(format!("{invariant}: {e}"));
                    }
                }
            }
        }
        if poisoned || cases == 0 {
            value = f64::NAN;
        }
        self.cases = self.cases.max(cases);
        self.checks.push(Check { invariant: invariant.into(), cases, value, tolerance, bound });
    }

    pub const COLUMNS: [&'static str; 7] = ["suite", "invariant", "cases", "value", "bound", "tolerance", "status"];

    /// One output row per check, in the order they were recorded.
    pub fn rows(&self) -> Vec<Vec<Cell>> {
        self.checks
            .iter()
            .map(|c| {
                vec![
                    self.name.as_str().into(),
                    c.invariant.as_str().into(),
                    c.cases.into(),
                    c.value.into(),
                    c.bound.symbol().into(),
                    c.tolerance.into(),
                    if c.passed() { "pass" } else { "fail" }.into(),
                ]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hquot::GeomError;

    #[test]
    fn maxima_and_minima() {
        let mut r = SuiteReport::new("s");
        r.at_most("a", 1e-3, [Ok(1e-5), Ok(2e-4)]);
        r.at_least("b", 0.5, [Ok(0.7), Ok(0.6)]);
        assert!(r.passed());
        assert_eq!(r.check("a").unwrap().value, 2e-4);
        assert_eq!(r.check("b").unwrap().value, 0.6);
        assert_eq!(r.cases, 2);
        assert_eq!(r.rows()[1][6], Cell::Text("pass".into()));
    }

    #[test]
    fn violations_and_errors_fail() {
        let mut r = SuiteReport::new("s");
        r.at_most("a", 1e-3, [Ok(1e-2)]);
        assert!(!r.passed());
        let mut r = SuiteReport::new("s");
        r.at_most("a", 1.0, [Err(GeomError::Domain("y <= 0".into())), Ok(0.0)]);
        assert!(r.check("a").unwrap().value.is_nan());
        assert!(!r.passed());
        assert_eq!(r.errors.len(), 1);
        let mut r = SuiteReport::new("s");
        r.at_most("a", 1.0, std::iter::empty());
        assert!(!r.passed());
    }
}
