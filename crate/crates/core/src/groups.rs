//! Transitive permutation group labels `nTj` and the per-degree group counts
//! used to validate them.

use std::fmt;
use std::str::FromStr;

use crate::error::ModelError;

/// Largest degree accepted anywhere in the engine.
pub const MAX_DEGREE: u32 = 64;

/// Number of transitive groups of degree `n`, for `n = 1..=47`.
const TRANSITIVE_COUNTS: [u32; 47] = [
    1, 1, 2, 5, 5, 16, 7, 50, 34, 45, 8, 301, 9, 63, 104, 1954, 10, 983, 8, 1117, 164, 59, 7,
    25000, 211, 96, 2392, 1854, 8, 5712, 12, 2801324, 162, 115, 407, 121279, 11, 76, 306, 315842,
    10, 9491, 10, 2113, 10923, 56, 6,
];

/// Common names shown instead of the bare `nTj` label.
const COMMON_NAMES: &[(u32, u32, &str)] = &[
    (1, 1, "Trivial"),
    (2, 1, "C2"),
    (3, 1, "C3"),
    (3, 2, "S3"),
    (4, 1, "C4"),
    (4, 2, "V4"),
    (4, 3, "D4"),
    (4, 4, "A4"),
    (4, 5, "S4"),
    (5, 1, "C5"),
    (5, 2, "D5"),
    (5, 3, "F5"),
    (5, 4, "A5"),
    (5, 5, "S5"),
    (6, 1, "C6"),
    (6, 12, "PSL(2,5)"),
    (6, 14, "PGL(2,5)"),
    (6, 15, "A6"),
    (6, 16, "S6"),
    (7, 1, "C7"),
    (7, 2, "D7"),
    (7, 3, "F21"),
    (7, 4, "F42"),
    (7, 5, "GL(3,2)"),
    (7, 6, "A7"),
    (7, 7, "S7"),
    (8, 1, "C8"),
    (8, 37, "PSL(2,7)"),
    (8, 43, "PGL(2,7)"),
];

/// Count of transitive groups in degree `n`, when configured.
pub fn transitive_count(degree: u32) -> Option<u32> {
    if degree == 0 || degree > MAX_DEGREE {
        return None;
    }
    TRANSITIVE_COUNTS.get(degree as usize - 1).copied()
}

/// A transitive group `nTj`, identified by degree and T-number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupId {
    degree: u32,
    t_number: u32,
}

impl GroupId {
    pub fn new(degree: u32, t_number: u32) -> Result<Self, ModelError> {
        let count = transitive_count(degree).ok_or(ModelError::UnknownDegree(degree))?;
        if t_number == 0 || t_number > count {
            return Err(ModelError::TNumberOutOfRange {
                degree,
                t_number,
                count,
            });
        }
        Ok(GroupId { degree, t_number })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn t_number(&self) -> u32 {
        self.t_number
    }

    /// `"4T5"`.
    pub fn label(&self) -> String {
        format!("{}T{}", self.degree, self.t_number)
    }

    /// The common name when one is configured, else the label.
    pub fn display_name(&self) -> String {
        COMMON_NAMES
            .iter()
            .find(|(n, t, _)| *n == self.degree && *t == self.t_number)
            .map(|(_, _, name)| name.to_string())
            .unwrap_or_else(|| self.label())
    }

    /// Every group of the given degree.
    pub fn all_of_degree(degree: u32) -> Result<impl Iterator<Item = GroupId>, ModelError> {
        let count = transitive_count(degree).ok_or(ModelError::UnknownDegree(degree))?;
        Ok((1..=count).map(move |t_number| GroupId { degree, t_number }))
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}T{}", self.degree, self.t_number)
    }
}

impl FromStr for GroupId {
    type Err = ModelError;

    /// Accepts `nTj` labels and the configured common names (`"S4"`, `"D4"`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((n, t)) = s.split_once(['T', 't']) {
            if let (Ok(n), Ok(t)) = (n.parse::<u32>(), t.parse::<u32>()) {
                return GroupId::new(n, t);
            }
        }
        COMMON_NAMES
            .iter()
            .find(|(_, _, name)| *name == s)
            .map(|&(degree, t_number, _)| GroupId { degree, t_number })
            .ok_or_else(|| ModelError::UnknownGroup(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(transitive_count(8), Some(50));
        assert_eq!(transitive_count(4), Some(5));
        assert_eq!(transitive_count(32), Some(2_801_324));
        assert_eq!(transitive_count(48), None);
        assert_eq!(transitive_count(0), None);
    }

    #[test]
    fn parse_and_name() {
        let s4: GroupId = "4T5".parse().unwrap();
        assert_eq!(s4.display_name(), "S4");
        assert_eq!("S4".parse::<GroupId>().unwrap(), s4);
        assert_eq!(
            "8T37".parse::<GroupId>().unwrap().display_name(),
            "PSL(2,7)"
        );
        assert_eq!("9T32".parse::<GroupId>().unwrap().display_name(), "9T32");
        assert!("8T51".parse::<GroupId>().is_err());
        assert!("Q8".parse::<GroupId>().is_err());
        assert!(GroupId::new(4, 0).is_err());
    }
}
