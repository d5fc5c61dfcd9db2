//! Verification reports shared by every module.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One named identity checked over a sample.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    /// Reported but kept out of the verdict.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub informational: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    pub max: f64,
    pub argmax_point: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub verdict: Verdict,
    pub residuals: Residuals,
    pub per_check: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Default for Report {
    fn default() -> Self {
        Report::new()
    }
}

impl Report {
    pub fn new() -> Report {
        Report {
            verdict: Verdict::Pass,
            residuals: Residuals { max: 0.0, argmax_point: Vec::new() },
            per_check: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Record a check from its worst residual.
    pub fn check(&mut self, name: impl Into<String>, residual: f64, tol: f64, point: Option<Vec<f64>>) -> bool {
        let pass = residual.is_finite() && residual < tol;
        self.per_check.push(Check { name: name.into(), residual, tol, pass, point, informational: false });
        self.refresh();
        pass
    }

    /// Like [`Report::check`] but without influence on the verdict.
    pub fn inform(&mut self, name: impl Into<String>, residual: f64, tol: f64, point: Option<Vec<f64>>) {
        let pass = residual.is_finite() && residual < tol;
        self.per_check.push(Check { name: name.into(), residual, tol, pass, point, informational: true });
    }

    /// Running maximum over a sample: feed `(residual, point)` pairs.
    pub fn check_max<I>(&mut self, name: impl Into<String>, tol: f64, it: I) -> bool
    where
        I: IntoIterator<Item = (f64, Vec<f64>)>,
    {
        let (r, p) = worst(it);
        self.check(name, r, tol, p)
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.per_check.iter().find(|c| c.name == name)
    }

    /// Fold another report's checks in, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.per_check {
            c.name = format!("{prefix}{}", c.name);
            self.per_check.push(c);
        }
        self.notes.extend(other.notes);
        self.refresh();
    }

    /// Replace every tolerance and recompute the verdicts.
    pub fn retolerate(&mut self, tol: f64) {
        for c in &mut self.per_check {
            c.tol = tol;
            c.pass = c.residual.is_finite() && c.residual < tol;
        }
        self.refresh();
    }

    fn refresh(&mut self) {
        let mut max = 0.0f64;
        let mut arg = Vec::new();
        let mut ok = true;
        for c in self.per_check.iter().filter(|c| !c.informational) {
            ok &= c.pass;
            if !(c.residual <= max) {
                max = c.residual;
                arg = c.point.clone().unwrap_or_default();
            }
        }
        self.residuals = Residuals { max, argmax_point: arg };
        self.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    }
}

/// Maximum residual and where it occurred; NaN wins.
pub fn worst<I>(it: I) -> (f64, Option<Vec<f64>>)
where
    I: IntoIterator<Item = (f64, Vec<f64>)>,
{
    let mut best: (f64, Option<Vec<f64>>) = (0.0, None);
    for (r, p) in it {
        let nan_first = r.is_nan() && !best.0.is_nan();
        if best.1.is_none() || nan_first || r > best.0 {
            best = (r, Some(p));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_tracks_checks() {
        let mut r = Report::new();
        assert!(r.check("a", 1e-14, 1e-12, None));
        r.inform("b", 1.0, 1e-12, None);
        assert!(r.passed());
        r.check_max("c", 1e-12, vec![(1e-13, vec![0.0]), (2e-12, vec![1.0])]);
        assert!(!r.passed());
        assert_eq!(r.residuals.argmax_point, vec![1.0]);
        r.retolerate(1.0);
        assert!(r.passed());
    }
}
