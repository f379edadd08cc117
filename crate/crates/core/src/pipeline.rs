//! Entry points that route between the basic and the extended solver.

use crate::assignment::{periodic_from_decomposition, PeriodicAssignment};
use crate::augment::augment;
use crate::coloring::color_first_week;
use crate::cover::find_decomposition;
use crate::error::{Result, RosterError};
use crate::extended::{build_periodic_plan_extended, decide_balanced_extended, ExtendedDecision};
use crate::merge::{decide_balanced_basic, solve_basic, BasicDecision};
use crate::model::Instance;

#[derive(Clone, Debug)]
pub enum Decision {
    Basic(BasicDecision),
    Extended(ExtendedDecision),
}

impl Decision {
    pub fn is_balanced(&self) -> bool {
        match self {
            Self::Basic(d) => d.is_balanced(),
            Self::Extended(d) => d.is_balanced(),
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Self::Basic(BasicDecision::Infeasible(_)) | Self::Extended(ExtendedDecision::Infeasible(_))
        )
    }

    pub fn certificate(&self) -> serde_json::Value {
        match self {
            Self::Basic(d) => d.certificate(),
            Self::Extended(d) => d.certificate(),
        }
    }
}

pub fn decide(instance: &Instance) -> Result<Decision> {
    instance.ensure_valid()?;
    if instance.is_extended() {
        decide_balanced_extended(instance).map(Decision::Extended)
    } else {
        decide_balanced_basic(instance).map(Decision::Basic)
    }
}

/// A balanced periodic plan, or `None` when none exists.
pub fn solve(instance: &Instance) -> Result<Option<PeriodicAssignment>> {
    instance.ensure_valid()?;
    if !instance.is_extended() {
        return solve_basic(instance);
    }
    if !decide_balanced_extended(instance)?.is_balanced() {
        return Ok(None);
    }
    build_periodic_plan_extended(instance).map(|p| Some(p.plan))
}

/// Whether any feasible assignment exists.
pub fn feasible(instance: &Instance) -> Result<bool> {
    Ok(feasible_plan(instance)?.is_some())
}

/// Some feasible periodic plan, balanced or not: one week decomposition of
/// the augmented instance repeated forever.
pub fn feasible_plan(instance: &Instance) -> Result<Option<PeriodicAssignment>> {
    instance.ensure_valid()?;
    let aug = match augment(instance) {
        Ok(a) => a,
        Err(RosterError::Infeasible(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let week = if instance.is_extended() {
        find_decomposition(&aug.augmented)?
    } else {
        color_first_week(&aug.augmented).ok().map(|c| c.to_decomposition())
    };
    match week {
        Some(week) => {
            let plan = periodic_from_decomposition(&aug.augmented, &week)?;
            Ok(Some(aug.restrict_plan(&plan).canonicalized(instance.workers)))
        }
        None => Ok(None),
    }
}
