//! Primary/auxiliary channel selection.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Roll,
    Pitch,
}

impl Channel {
    pub fn other(self) -> Self {
        match self {
            Self::Roll => Self::Pitch,
            Self::Pitch => Self::Roll,
        }
    }

    /// Index into `[roll, pitch]` arrays.
    pub fn index(self) -> usize {
        match self {
            Self::Roll => 0,
            Self::Pitch => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Roll => "roll",
            Self::Pitch => "pitch",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which tilt output drives the servo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaSource {
    /// `β_θ`, pitch held at its singular angle.
    Theta,
    /// `β_φ`, roll held at its singular angle.
    Phi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelSelection {
    pub primary: Channel,
    pub auxiliary: Channel,
    pub beta_source: BetaSource,
}

impl ChannelSelection {
    pub fn with_primary(primary: Channel) -> Self {
        Self {
            primary,
            auxiliary: primary.other(),
            beta_source: match primary {
                Channel::Pitch => BetaSource::Theta,
                Channel::Roll => BetaSource::Phi,
            },
        }
    }

    /// Strict comparison with no history: pitch leads on a surge-dominant
    /// demand, roll otherwise.
    pub fn from_demand(delta: [f64; 2]) -> Self {
        if delta[0].abs() > delta[1].abs() {
            Self::with_primary(Channel::Pitch)
        } else {
            Self::with_primary(Channel::Roll)
        }
    }
}

/// Switch with a hysteresis band so equal demands do not chatter.
pub fn primary_aux_switch(
    delta: [f64; 2],
    prev: ChannelSelection,
    hysteresis: f64,
) -> ChannelSelection {
    let (dx, dy) = (delta[0].abs(), delta[1].abs());
    if dx > dy + hysteresis {
        ChannelSelection::with_primary(Channel::Pitch)
    } else if dy > dx + hysteresis {
        ChannelSelection::with_primary(Channel::Roll)
    } else {
        prev
    }
}

/// Band used by the controller: a fraction of the larger demand, floored.
pub fn hysteresis_band(delta: [f64; 2], fraction: f64, floor: f64) -> f64 {
    (fraction * delta[0].abs().max(delta[1].abs())).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surge_dominant_selects_pitch() {
        let prev = ChannelSelection::with_primary(Channel::Roll);
        let s = primary_aux_switch([1.0, 0.2], prev, 0.05);
        assert_eq!(s.primary, Channel::Pitch);
        assert_eq!(s.auxiliary, Channel::Roll);
        assert_eq!(s.beta_source, BetaSource::Theta);
    }

    #[test]
    fn sway_dominant_selects_roll() {
        let prev = ChannelSelection::with_primary(Channel::Pitch);
        let s = primary_aux_switch([0.2, 1.0], prev, 0.05);
        assert_eq!(s.primary, Channel::Roll);
        assert_eq!(s.auxiliary, Channel::Pitch);
        assert_eq!(s.beta_source, BetaSource::Phi);
    }

    #[test]
    fn tie_keeps_previous() {
        let prev = ChannelSelection::with_primary(Channel::Pitch);
        assert_eq!(primary_aux_switch([0.7, -0.7], prev, 0.05), prev);
        let prev = ChannelSelection::with_primary(Channel::Roll);
        assert_eq!(primary_aux_switch([0.72, 0.7], prev, 0.05), prev);
    }

    #[test]
    fn exactly_one_primary() {
        for c in [Channel::Roll, Channel::Pitch] {
            let s = ChannelSelection::with_primary(c);
            assert_ne!(s.primary, s.auxiliary);
        }
    }

    #[test]
    fn band() {
        assert_eq!(hysteresis_band([0.0, 0.0], 0.05, 0.01), 0.01);
        assert!((hysteresis_band([2.0, -1.0], 0.05, 0.01) - 0.1).abs() < 1e-15);
    }
}
