//! Canned configs for the figure reproductions.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harness::config::{parse_config, ExperimentConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig3,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
}

impl Figure {
    pub const ALL: [Figure; 7] = [
        Self::Fig3,
        Self::Fig6,
        Self::Fig7,
        Self::Fig8,
        Self::Fig9,
        Self::Fig10,
        Self::Fig11,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig3 => "fig3",
            Self::Fig6 => "fig6",
            Self::Fig7 => "fig7",
            Self::Fig8 => "fig8",
            Self::Fig9 => "fig9",
            Self::Fig10 => "fig10",
            Self::Fig11 => "fig11",
        }
    }

    /// Raw config texts as `(file name, contents)`.
    pub fn sources(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Self::Fig3 => &[("fig3.ini", include_str!("../../configs/fig3.ini"))],
            Self::Fig6 => &[("fig6.ini", include_str!("../../configs/fig6.ini"))],
            Self::Fig7 => &[("fig7.ini", include_str!("../../configs/fig7.ini"))],
            Self::Fig8 => &[("fig8.ini", include_str!("../../configs/fig8.ini"))],
            Self::Fig9 => &[("fig9.ini", include_str!("../../configs/fig9.ini"))],
            Self::Fig10 => &[
                ("fig10_pcp1.ini", include_str!("../../configs/fig10_pcp1.ini")),
                ("fig10_pcp2.ini", include_str!("../../configs/fig10_pcp2.ini")),
            ],
            Self::Fig11 => &[("fig11.ini", include_str!("../../configs/fig11.ini"))],
        }
    }

    pub fn configs(self) -> Result<Vec<ExperimentConfig>> {
        self.sources()
            .iter()
            .map(|(name, text)| parse_config(text, name))
            .collect()
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown figure `{s}`")))
    }
}
