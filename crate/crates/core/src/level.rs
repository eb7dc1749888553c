use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// SAE driving-automation level. Ordering follows the level number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AutomationLevel {
    L0,
    L1,
    L2,
    L3,
    L4,
    L5,
}

impl AutomationLevel {
    pub const ALL: [AutomationLevel; 6] = [
        AutomationLevel::L0,
        AutomationLevel::L1,
        AutomationLevel::L2,
        AutomationLevel::L3,
        AutomationLevel::L4,
        AutomationLevel::L5,
    ];

    pub fn rank(self) -> u8 {
        self as u8
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AutomationLevel::L0 => "L0",
            AutomationLevel::L1 => "L1",
            AutomationLevel::L2 => "L2",
            AutomationLevel::L3 => "L3",
            AutomationLevel::L4 => "L4",
            AutomationLevel::L5 => "L5",
        }
    }
}

impl fmt::Display for AutomationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AutomationLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        let digits = trimmed
            .strip_prefix('L')
            .or_else(|| trimmed.strip_prefix('l'))
            .unwrap_or(trimmed);
        match digits {
            "0" => Ok(AutomationLevel::L0),
            "1" => Ok(AutomationLevel::L1),
            "2" => Ok(AutomationLevel::L2),
            "3" => Ok(AutomationLevel::L3),
            "4" => Ok(AutomationLevel::L4),
            "5" => Ok(AutomationLevel::L5),
            _ => Err(Error::Config(format!(
                "unknown automation level '{s}' (expected L0..L5)"
            ))),
        }
    }
}
