//! Fitness values with runtime errors ranked strictly worst.

use std::cmp::Ordering;

use serde::Serialize;

/// Total case error of an individual. Any runtime error during evaluation
/// collapses the whole fitness to `Worst`, which compares worse than every
/// finite error total.
#[derive(Clone, Copy, Debug, Serialize)]
pub enum Fitness {
    ErrorTotal(f64),
    Worst,
}

impl Fitness {
    pub fn is_worst(&self) -> bool {
        matches!(self, Fitness::Worst)
    }

    pub fn error_total(&self) -> Option<f64> {
        match self {
            Fitness::ErrorTotal(e) => Some(*e),
            Fitness::Worst => None,
        }
    }
}

impl PartialEq for Fitness {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Fitness {}

impl PartialOrd for Fitness {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fitness {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Fitness::Worst, Fitness::Worst) => Ordering::Equal,
            (Fitness::Worst, Fitness::ErrorTotal(_)) => Ordering::Greater,
            (Fitness::ErrorTotal(_), Fitness::Worst) => Ordering::Less,
            (Fitness::ErrorTotal(a), Fitness::ErrorTotal(b)) => a.total_cmp(b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_ranks_last() {
        assert!(Fitness::ErrorTotal(1e300) < Fitness::Worst);
        assert!(Fitness::ErrorTotal(0.0) < Fitness::ErrorTotal(0.5));
        assert_eq!(Fitness::ErrorTotal(2.0), Fitness::ErrorTotal(2.0));
        assert_eq!(Fitness::Worst, Fitness::Worst);
    }
}
