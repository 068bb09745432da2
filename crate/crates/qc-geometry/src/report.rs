use std::fmt;

/// One named residual together with the tolerance it is held to.
#[derive(Debug, Clone)]
pub struct ResidualCheck {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
}

impl ResidualCheck {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tol,
        }
    }

    pub fn passed(&self) -> bool {
        self.residual.is_finite() && self.residual <= self.tol
    }
}

impl fmt::Display for ResidualCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<44} {} (residual {:.3e}, tol {:.1e})",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.residual,
            self.tol
        )
    }
}

/// A list of named residual checks, e.g. the quaternion-relation suite.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<ResidualCheck>,
}

impl ValidationReport {
    pub fn push(&mut self, check: ResidualCheck) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(ResidualCheck::passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().fold(0.0, |m, c| m.max(c.residual))
    }

    pub fn failures(&self) -> impl Iterator<Item = &ResidualCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            writeln!(f, "{check}")?;
        }
        Ok(())
    }
}
