//! Ranks and suits.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rank {
    Ace,
    Two,
    Three,
    Four,
    Five,
    Six,
    Seven,
    Eight,
    Nine,
    Ten,
    Jack,
    Queen,
    King,
}

impl Rank {
    /// Template order, which is also the tie-break order.
    pub const ALL: [Rank; 13] = [
        Rank::Ace,
        Rank::Two,
        Rank::Three,
        Rank::Four,
        Rank::Five,
        Rank::Six,
        Rank::Seven,
        Rank::Eight,
        Rank::Nine,
        Rank::Ten,
        Rank::Jack,
        Rank::Queen,
        Rank::King,
    ];

    /// Printed label: `A`, `2`..`10`, `J`, `Q`, `K`.
    pub fn label(self) -> &'static str {
        match self {
            Rank::Ace => "A",
            Rank::Two => "2",
            Rank::Three => "3",
            Rank::Four => "4",
            Rank::Five => "5",
            Rank::Six => "6",
            Rank::Seven => "7",
            Rank::Eight => "8",
            Rank::Nine => "9",
            Rank::Ten => "10",
            Rank::Jack => "J",
            Rank::Queen => "Q",
            Rank::King => "K",
        }
    }

    /// Single-character glyph that identifies the rank. The ten is read
    /// from its zero.
    pub fn glyph(self) -> char {
        match self {
            Rank::Ten => '0',
            other => other.label().chars().next().expect("non-empty label"),
        }
    }

    pub fn from_glyph(c: char) -> Option<Rank> {
        Rank::ALL.into_iter().find(|r| r.glyph() == c)
    }

    /// Pip count for number cards, `None` for court cards.
    pub fn pips(self) -> Option<usize> {
        match self {
            Rank::Ace => Some(1),
            Rank::Jack | Rank::Queen | Rank::King => None,
            other => Some(other as usize + 1),
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Rank {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Rank::ALL
            .into_iter()
            .find(|r| r.label().eq_ignore_ascii_case(s))
            .or_else(|| (s == "0").then_some(Rank::Ten))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown rank {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suit {
    Spade,
    Heart,
    Club,
    Diamond,
}

impl Suit {
    pub const ALL: [Suit; 4] = [Suit::Spade, Suit::Heart, Suit::Club, Suit::Diamond];

    pub fn name(self) -> &'static str {
        match self {
            Suit::Spade => "spade",
            Suit::Heart => "heart",
            Suit::Club => "club",
            Suit::Diamond => "diamond",
        }
    }

    pub fn is_red(self) -> bool {
        matches!(self, Suit::Heart | Suit::Diamond)
    }
}

impl fmt::Display for Suit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let stem = lower.strip_suffix('s').unwrap_or(&lower);
        Suit::ALL
            .into_iter()
            .find(|suit| suit.name() == stem)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suit {s:?}")))
    }
}

/// All 52 cards, suit-major.
pub fn deck() -> impl Iterator<Item = (Rank, Suit)> {
    Suit::ALL
        .into_iter()
        .flat_map(|s| Rank::ALL.into_iter().map(move |r| (r, s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        for r in Rank::ALL {
            assert_eq!(r.label().parse::<Rank>().unwrap(), r);
            assert_eq!(Rank::from_glyph(r.glyph()), Some(r));
        }
        assert_eq!("0".parse::<Rank>().unwrap(), Rank::Ten);
        assert_eq!("q".parse::<Rank>().unwrap(), Rank::Queen);
        assert!("11".parse::<Rank>().is_err());
        for s in Suit::ALL {
            assert_eq!(s.name().parse::<Suit>().unwrap(), s);
        }
        assert_eq!("Hearts".parse::<Suit>().unwrap(), Suit::Heart);
        assert!("star".parse::<Suit>().is_err());
    }

    #[test]
    fn pips_and_deck() {
        assert_eq!(Rank::Ten.pips(), Some(10));
        assert_eq!(Rank::Two.pips(), Some(2));
        assert_eq!(Rank::King.pips(), None);
        assert_eq!(deck().count(), 52);
    }
}
