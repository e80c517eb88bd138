//! Objective-evaluation accounting.

use std::fmt;

/// Signals that the evaluation budget has been used up.
///
/// This is a normal control signal for the solvers, not a fault.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExhausted;

impl fmt::Display for BudgetExhausted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("evaluation budget exhausted")
    }
}

impl std::error::Error for BudgetExhausted {}

/// Counts objective evaluations against an optional budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalCounter {
    count: u64,
    budget: Option<u64>,
}

impl EvalCounter {
    pub fn new(budget: Option<u64>) -> Self {
        Self { count: 0, budget }
    }

    pub fn unbounded() -> Self {
        Self::new(None)
    }

    pub fn with_budget(budget: u64) -> Self {
        Self::new(Some(budget))
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    /// Evaluations still available, `None` when unbounded.
    pub fn remaining(&self) -> Option<u64> {
        self.budget.map(|b| b.saturating_sub(self.count))
    }

    pub fn is_exhausted(&self) -> bool {
        self.remaining() == Some(0)
    }

    /// Records one evaluation. The count is left untouched when the budget
    /// would be exceeded.
    pub fn tick(&mut self) -> Result<u64, BudgetExhausted> {
        if self.is_exhausted() {
            return Err(BudgetExhausted);
        }
        self.count += 1;
        Ok(self.count)
    }
}
