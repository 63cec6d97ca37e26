use std::fmt;

use serde::{Deserialize, Serialize};

/// Congruence classes that gate three- and four-square representability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum EligibilityClass {
    /// `4 ∤ n` and `n ≢ 7 (mod 8)`.
    ThreeSquareEligible = 0,
    DivisibleBy4 = 1,
    SevenMod8 = 2,
    /// `8 ∤ n`.
    FourSquareEligible = 3,
    EightDividesN = 4,
    /// Not of the form `4^l (8k + 7)`.
    GaussEligible = 5,
    GaussExcluded = 6,
}

impl EligibilityClass {
    pub const ALL: [EligibilityClass; 7] = [
        Self::ThreeSquareEligible,
        Self::DivisibleBy4,
        Self::SevenMod8,
        Self::FourSquareEligible,
        Self::EightDividesN,
        Self::GaussEligible,
        Self::GaussExcluded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ThreeSquareEligible => "ThreeSquareEligible",
            Self::DivisibleBy4 => "DivisibleBy4",
            Self::SevenMod8 => "SevenMod8",
            Self::FourSquareEligible => "FourSquareEligible",
            Self::EightDividesN => "EightDividesN",
            Self::GaussEligible => "GaussEligible",
            Self::GaussExcluded => "GaussExcluded",
        }
    }

    pub fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

/// A set of [`EligibilityClass`] tags stored as a bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EligibilitySet(u8);

impl EligibilitySet {
    pub fn from_bits(bits: u8) -> Self {
        Self(bits & 0x7f)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, class: EligibilityClass) -> bool {
        self.0 & class.bit() != 0
    }

    pub fn insert(&mut self, class: EligibilityClass) {
        self.0 |= class.bit();
    }

    pub fn iter(self) -> impl Iterator<Item = EligibilityClass> {
        EligibilityClass::ALL.into_iter().filter(move |c| self.contains(*c))
    }

    pub fn is_three_square_eligible(self) -> bool {
        self.contains(EligibilityClass::ThreeSquareEligible)
    }

    pub fn is_four_square_eligible(self) -> bool {
        self.contains(EligibilityClass::FourSquareEligible)
    }
}

impl FromIterator<EligibilityClass> for EligibilitySet {
    fn from_iter<I: IntoIterator<Item = EligibilityClass>>(iter: I) -> Self {
        let mut set = Self::default();
        for c in iter {
            set.insert(c);
        }
        set
    }
}

impl fmt::Display for EligibilitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.iter().map(EligibilityClass::name).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// Whether `n` has the shape `4^l (8k + 7)`.
pub fn is_gauss_excluded(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    while m % 4 == 0 {
        m /= 4;
    }
    m % 8 == 7
}

/// Every tag that applies to `n >= 1`.
pub fn classify(n: u64) -> EligibilitySet {
    use EligibilityClass::*;
    let mut set = EligibilitySet::default();
    let div4 = n % 4 == 0;
    let seven = n % 8 == 7;
    if div4 {
        set.insert(DivisibleBy4);
    }
    if seven {
        set.insert(SevenMod8);
    }
    if !div4 && !seven {
        set.insert(ThreeSquareEligible);
    }
    if n % 8 == 0 {
        set.insert(EightDividesN);
    } else {
        set.insert(FourSquareEligible);
    }
    if is_gauss_excluded(n) {
        set.insert(GaussExcluded);
    } else {
        set.insert(GaussEligible);
    }
    set
}

#[cfg(test)]
mod tests {
    use super::EligibilityClass::*;
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(
            classify(7),
            [SevenMod8, GaussExcluded, FourSquareEligible].into_iter().collect()
        );
        assert_eq!(
            classify(28),
            [DivisibleBy4, GaussExcluded, FourSquareEligible].into_iter().collect()
        );
        assert_eq!(
            classify(5),
            [ThreeSquareEligible, GaussEligible, FourSquareEligible].into_iter().collect()
        );
        assert!(classify(16).contains(EightDividesN));
    }

    #[test]
    fn three_square_eligible_implies_gauss_eligible() {
        for n in 1..=200_000u64 {
            let c = classify(n);
            if c.is_three_square_eligible() {
                assert!(c.contains(GaussEligible), "n = {n}");
            }
            assert_ne!(c.contains(GaussEligible), c.contains(GaussExcluded));
            assert_eq!(c.is_four_square_eligible(), n % 8 != 0);
        }
    }

    #[test]
    fn display_lists_tags() {
        assert_eq!(
            classify(5).to_string(),
            "{ThreeSquareEligible, FourSquareEligible, GaussEligible}"
        );
    }
}
