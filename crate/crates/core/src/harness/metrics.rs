use super::HarnessError;

/// Accuracy of a set of replicated estimates against a known truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    /// NRMSE, or the plain RMSE when `normalized` is false (zero truth).
    pub value: f64,
    /// Delta-method standard error of `value`.
    pub standard_error: f64,
    pub normalized: bool,
}

/// `sqrt(mean (est - truth)^2) / |truth|`.
///
/// A zero truth yields [`HarnessError::ZeroTruth`] carrying the RMSE.
pub fn nrmse(estimates: &[f64], truth: f64) -> Result<f64, HarnessError> {
    let acc = accuracy(estimates, truth)?;
    if acc.normalized {
        Ok(acc.value)
    } else {
        Err(HarnessError::ZeroTruth { rmse: acc.value })
    }
}

/// NRMSE with its standard error; falls back to the RMSE when `truth == 0`.
pub fn accuracy(estimates: &[f64], truth: f64) -> Result<Accuracy, HarnessError> {
    if estimates.is_empty() {
        return Err(HarnessError::InvalidSpec("accuracy needs at least one estimate".into()));
    }
    let r = estimates.len() as f64;
    let sq: Vec<f64> = estimates.iter().map(|e| (e - truth).powi(2)).collect();
    let mse = sq.iter().sum::<f64>() / r;
    let rmse = mse.sqrt();
    let se_mse = if estimates.len() > 1 {
        (sq.iter().map(|s| (s - mse).powi(2)).sum::<f64>() / (r - 1.0) / r).sqrt()
    } else {
        0.0
    };
    let se_rmse = if rmse > 0.0 { se_mse / (2.0 * rmse) } else { 0.0 };
    let normalized = truth != 0.0;
    let scale = if normalized { truth.abs() } else { 1.0 };
    Ok(Accuracy { value: rmse / scale, standard_error: se_rmse / scale, normalized })
}

/// Smallest budget reaching `target` on a curve, linearly interpolated between points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BudgetNeed {
    Attained(f64),
    Unattained,
}

impl BudgetNeed {
    pub fn budget(&self) -> Option<f64> {
        match self {
            BudgetNeed::Attained(b) => Some(*b),
            BudgetNeed::Unattained => None,
        }
    }
}

pub fn budget_needed(budgets: &[f64], nrmse: &[f64], target: f64) -> BudgetNeed {
    for i in 0..budgets.len() {
        if nrmse[i] <= target {
            if i == 0 {
                return BudgetNeed::Attained(budgets[0]);
            }
            let (b0, b1, e0, e1) = (budgets[i - 1], budgets[i], nrmse[i - 1], nrmse[i]);
            let t = (e0 - target) / (e0 - e1);
            return BudgetNeed::Attained(b0 + t * (b1 - b0));
        }
    }
    BudgetNeed::Unattained
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetRatio {
    pub strategy: String,
    pub needed: BudgetNeed,
    /// `needed(reference) / needed(strategy)`; `None` when either is unattained.
    pub ratio: Option<f64>,
}

/// Budget ratio of `reference` against every strategy in `curves`.
///
/// Each curve is `(strategy, budgets, nrmse)` with ascending budgets.
pub fn budget_ratios(
    curves: &[(String, Vec<f64>, Vec<f64>)],
    reference: &str,
    target: f64,
) -> Result<Vec<BudgetRatio>, HarnessError> {
    if let Some((name, _, _)) = curves.iter().find(|(_, b, _)| b.len() < 2) {
        return Err(HarnessError::InvalidSpec(format!("strategy {name} has fewer than 2 budget points")));
    }
    let needs: Vec<BudgetNeed> = curves.iter().map(|(_, b, e)| budget_needed(b, e, target)).collect();
    if needs.iter().all(|n| *n == BudgetNeed::Unattained) {
        return Err(HarnessError::TargetUnattainable { target });
    }
    let reference_need = curves
        .iter()
        .position(|(name, _, _)| name == reference)
        .ok_or_else(|| HarnessError::InvalidSpec(format!("reference strategy {reference} not in report")))
        .map(|i| needs[i])?;
    Ok(curves
        .iter()
        .zip(needs)
        .map(|((name, _, _), needed)| BudgetRatio {
            strategy: name.clone(),
            needed,
            ratio: reference_need.budget().zip(needed.budget()).map(|(r, n)| r / n),
        })
        .collect())
}
