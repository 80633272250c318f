//! `a:b:steps` range flags.

use std::str::FromStr;

/// Inclusive evenly spaced samples `a, ..., b`; a single number is a
/// one-point range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Range {
    pub fn point(v: f64) -> Self {
        Self { start: v, end: v, steps: 1 }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.start],
            m => (0..m)
                .map(|i| {
                    if i == m - 1 {
                        self.end
                    } else {
                        self.start + (self.end - self.start) * i as f64 / (m - 1) as f64
                    }
                })
                .collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.start.min(self.end)
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| -> Result<f64, String> {
            let v: f64 = t.trim().parse().map_err(|_| format!("'{t}' is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("'{t}' is not finite"))
            }
        };
        let parts: Vec<&str> = s.split(':').collect();
        let r = match parts.as_slice() {
            [v] => Range::point(num(v)?),
            [a, b, n] => Range {
                start: num(a)?,
                end: num(b)?,
                steps: n.trim().parse().map_err(|_| format!("'{n}' is not a step count"))?,
            },
            _ => return Err(format!("expected a:b:steps or a single value, got '{s}'")),
        };
        if r.steps == 0 {
            return Err(format!("range '{s}' is empty"));
        }
        if r.steps == 1 && r.start != r.end {
            return Err(format!("range '{s}' has one step but two end points"));
        }
        Ok(r)
    }
}
