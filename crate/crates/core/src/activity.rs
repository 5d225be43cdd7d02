use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The four activity classes recognised by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActivityClass {
    Empty,
    InPlace,
    Walking,
    Running,
}

impl ActivityClass {
    pub const ALL: [ActivityClass; 4] = [
        ActivityClass::Empty,
        ActivityClass::InPlace,
        ActivityClass::Walking,
        ActivityClass::Running,
    ];

    pub const COUNT: usize = 4;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ActivityClass::Empty => "Empty",
            ActivityClass::InPlace => "InPlace",
            ActivityClass::Walking => "Walking",
            ActivityClass::Running => "Running",
        }
    }

    /// True for every class with a person in the room.
    pub fn is_moving(self) -> bool {
        self != ActivityClass::Empty
    }
}

impl fmt::Display for ActivityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActivityClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}
