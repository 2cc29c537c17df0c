use serde::Serialize;

/// Outcome of one named inequality or identity check.
///
/// `margin` is signed: positive when the relation holds with room to spare.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub margin: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = ">=")]
    AtLeast,
}

impl Check {
    /// `value < bound`.
    pub fn less(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::build(name, value, Relation::Less, bound, bound - value, value < bound)
    }

    /// `value <= bound + slack`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, slack: f64) -> Self {
        Self::build(
            name,
            value,
            Relation::AtMost,
            bound,
            bound - value,
            value <= bound + slack,
        )
    }

    /// `value > bound`.
    pub fn greater(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::build(name, value, Relation::Greater, bound, value - bound, value > bound)
    }

    /// `value >= bound - slack`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64, slack: f64) -> Self {
        Self::build(
            name,
            value,
            Relation::AtLeast,
            bound,
            value - bound,
            value >= bound - slack,
        )
    }

    fn build(name: impl Into<String>, value: f64, relation: Relation, bound: f64, margin: f64, passed: bool) -> Self {
        Self {
            name: name.into(),
            value,
            relation,
            bound,
            margin,
            // NaN never passes.
            passed: passed && !value.is_nan(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Check::less("a", 1.0, 2.0).passed);
        assert!(!Check::less("a", 2.0, 2.0).passed);
        assert!(Check::at_most("a", 2.0 + 1e-12, 2.0, 1e-10).passed);
        assert!(!Check::greater("a", f64::NAN, 0.0).passed);
        assert!(Check::at_least("a", 1.0 - 1e-12, 1.0, 1e-10).passed);
        assert_eq!(Check::greater("a", 3.0, 1.0).margin, 2.0);
    }
}
