use serde::{Deserialize, Serialize};

/// Share of alphabetic characters a script needs to claim a description.
const DOMINANT_SHARE_PERCENT: usize = 90;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DescriptionLanguage {
    English,
    Bulgarian,
    Mixed,
}

impl DescriptionLanguage {
    pub const ALL: [DescriptionLanguage; 3] = [
        DescriptionLanguage::English,
        DescriptionLanguage::Bulgarian,
        DescriptionLanguage::Mixed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DescriptionLanguage::English => "english",
            DescriptionLanguage::Bulgarian => "bulgarian",
            DescriptionLanguage::Mixed => "mixed",
        }
    }
}

fn is_latin(c: char) -> bool {
    matches!(c as u32, 0x41..=0x5A | 0x61..=0x7A | 0xC0..=0x24F | 0x1E00..=0x1EFF)
}

fn is_cyrillic(c: char) -> bool {
    matches!(c as u32, 0x400..=0x52F)
}

/// Labels a description by the script of its letters.
///
/// Only alphabetic characters count. At least 90% Latin letters is English,
/// at least 90% Cyrillic is Bulgarian, anything else (including text with no
/// letters at all) is mixed.
pub fn classify_description_language(text: &str) -> DescriptionLanguage {
    let (mut letters, mut latin, mut cyrillic) = (0usize, 0usize, 0usize);
    for c in text.chars().filter(|c| c.is_alphabetic()) {
        letters += 1;
        if is_latin(c) {
            latin += 1;
        } else if is_cyrillic(c) {
            cyrillic += 1;
        }
    }
    let dominant = |count: usize| letters > 0 && count * 100 >= letters * DOMINANT_SHARE_PERCENT;
    if dominant(latin) {
        DescriptionLanguage::English
    } else if dominant(cyrillic) {
        DescriptionLanguage::Bulgarian
    } else {
        DescriptionLanguage::Mixed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use DescriptionLanguage::*;

    #[test]
    fn pure_scripts() {
        assert_eq!(classify_description_language("Returns current weather for a city"), English);
        assert_eq!(classify_description_language("Генерира цифров подпис"), Bulgarian);
    }

    #[test]
    fn mixed_by_hand_count() {
        // Cyrillic letters: Връща(5) + отговор(7) + от(2) = 14; Latin: JSON(4) + API(3) = 7.
        // 14/21 and 7/21 both fall short of 90%.
        let text = "Връща JSON отговор от API";
        let cyr = text.chars().filter(|c| ('\u{400}'..='\u{4FF}').contains(c)).count();
        let lat = text.chars().filter(|c| c.is_ascii_alphabetic()).count();
        assert_eq!((cyr, lat), (14, 7));
        assert_eq!(classify_description_language(text), Mixed);
    }

    #[test]
    fn threshold_is_inclusive() {
        // 9 Latin + 1 Cyrillic = exactly 90% Latin.
        assert_eq!(classify_description_language("abcdefghi ж"), English);
        // 8 Latin + 1 Cyrillic ≈ 88.9% Latin.
        assert_eq!(classify_description_language("abcdefgh ж"), Mixed);
        assert_eq!(classify_description_language("жжжжжжжжж a"), Bulgarian);
    }

    #[test]
    fn digits_and_punctuation_are_ignored() {
        assert_eq!(classify_description_language("Връща 42 (JSON)!!!"), Mixed);
        assert_eq!(classify_description_language("v2.0 — 100%"), English);
        assert_eq!(classify_description_language("1234 ..."), Mixed);
        assert_eq!(classify_description_language(""), Mixed);
    }
}
