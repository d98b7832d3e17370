//! Named numerical checks attached to computed values.

use serde::Serialize;

use crate::error::{Error, Result};

/// One postcondition: `value` compared against `tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip)]
    pub relation: Relation,
}

/// How `value` is compared with `tolerance`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Relation {
    #[default]
    AtMost,
    Below,
    Above,
    Holds,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value <= tolerance, relation: Relation::AtMost }
    }

    /// Passes when `value < bound`.
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, tolerance: bound, pass: value < bound, relation: Relation::Below }
    }

    /// Passes when `value > bound`.
    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, tolerance: bound, pass: value > bound, relation: Relation::Above }
    }

    /// Boolean check recorded as value 1 (true) or 0 (false).
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: if ok { 1.0 } else { 0.0 }, tolerance: 1.0, pass: ok, relation: Relation::Holds }
    }

    /// How close the value is to failing: the ratio of value to bound,
    /// inverted for lower bounds. Values above 1 fail (at 1 only `AtMost`
    /// still passes).
    pub fn severity(&self) -> f64 {
        match self.relation {
            Relation::AtMost | Relation::Below => ratio(self.value, self.tolerance),
            Relation::Above => ratio(self.tolerance, self.value),
            Relation::Holds => if self.pass { 0.0 } else { f64::INFINITY },
        }
    }

    pub fn into_error(self) -> Error {
        Error::Postcondition { name: self.name, value: self.value, tolerance: self.tolerance }
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if num.is_nan() || den.is_nan() {
        f64::INFINITY
    } else if den > 0.0 {
        num / den
    } else if num <= 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// A value with the checks that were run on it.
#[derive(Clone, Debug)]
pub struct Checked<T> {
    pub value: T,
    pub checks: Vec<Check>,
}

impl<T> Checked<T> {
    pub fn new(value: T, checks: Vec<Check>) -> Self {
        Self { value, checks }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// The value, or the first failed check as an error.
    pub fn into_result(self) -> Result<T> {
        match self.checks.into_iter().find(|c| !c.pass) {
            Some(c) => Err(c.into_error()),
            None => Ok(self.value),
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Checked<U> {
        Checked { value: f(self.value), checks: self.checks }
    }
}
