use unicode_normalization::UnicodeNormalization;

/// Bulgarian Streamlined System, lowercase letters only (input is case-folded
/// first).
fn streamlined(c: char) -> Option<&'static str> {
    Some(match c {
        'а' => "a",
        'б' => "b",
        'в' => "v",
        'г' => "g",
        'д' => "d",
        'е' => "e",
        'ж' => "zh",
        'з' => "z",
        'и' => "i",
        'ѝ' => "i",
        'й' => "y",
        'к' => "k",
        'л' => "l",
        'м' => "m",
        'н' => "n",
        'о' => "o",
        'п' => "p",
        'р' => "r",
        'с' => "s",
        'т' => "t",
        'у' => "u",
        'ф' => "f",
        'х' => "h",
        'ц' => "ts",
        'ч' => "ch",
        'ш' => "sh",
        'щ' => "sht",
        'ъ' => "a",
        'ь' => "y",
        'ю' => "yu",
        'я' => "ya",
        _ => return None,
    })
}

/// Transliterates lowercase Bulgarian Cyrillic to Latin.
///
/// Word-final "ия" becomes "ia" (София → sofia), as the streamlined system
/// prescribes; every other letter maps through the fixed table. Characters
/// outside the table pass through unchanged.
pub fn transliterate(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len() * 2);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == 'и'
            && chars.get(i + 1) == Some(&'я')
            && !chars.get(i + 2).is_some_and(|n| n.is_alphabetic())
        {
            out.push_str("ia");
            i += 2;
            continue;
        }
        match streamlined(c) {
            Some(latin) => out.push_str(latin),
            None => out.push(c),
        }
        i += 1;
    }
    out
}

/// Canonical form used for lenient text comparison.
///
/// Steps, in order: NFC composition, lowercase folding, streamlined
/// transliteration, removal of every character that is neither alphanumeric
/// nor whitespace, whitespace collapse, trim.
pub fn normalize_text(s: &str) -> String {
    let composed: String = s.nfc().collect();
    let folded = composed.to_lowercase();
    let latin = transliterate(&folded);
    let stripped: String = latin
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect();
    stripped.split_whitespace().collect::<Vec<_>>().join(" ")
}
