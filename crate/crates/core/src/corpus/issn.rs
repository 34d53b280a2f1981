//! ISSN validation and keyword-window extraction from plain text.
//!
//! An ISSN is eight characters written `XXXX-XXXX`. The first seven are
//! digits weighted 8 down to 2; the eighth is a check value in `0..=10`,
//! with `X` standing for 10. The weighted sum including the check value
//! must be divisible by 11.

/// Number of tokens inspected after each `ISSN` keyword.
pub const KEYWORD_WINDOW: usize = 5;

const TOKEN_BOUNDARIES: &[char] = &[',', ';', '(', ')', '<', '>', '"', '\''];

/// Returns true iff `candidate` is shaped `XXXX-XXXX` and its check digit holds.
pub fn validate_issn(candidate: &str) -> bool {
    let bytes = candidate.as_bytes();
    if bytes.len() != 9 || bytes[4] != b'-' {
        return false;
    }
    let mut sum = 0u32;
    let mut weight = 8u32;
    for &b in bytes[..4].iter().chain(&bytes[5..8]) {
        if !b.is_ascii_digit() {
            return false;
        }
        sum += u32::from(b - b'0') * weight;
        weight -= 1;
    }
    let check = match bytes[8] {
        b'X' => 10,
        b @ b'0'..=b'9' => u32::from(b - b'0'),
        _ => return false,
    };
    (sum + check) % 11 == 0
}

/// Computes the check character for seven leading digits, if they are digits.
pub fn check_character(first_seven: &str) -> Option<char> {
    let digits: Vec<u32> = first_seven
        .chars()
        .map(|c| c.to_digit(10))
        .collect::<Option<_>>()?;
    if digits.len() != 7 {
        return None;
    }
    let sum: u32 = digits.iter().zip((2..=8).rev()).map(|(d, w)| d * w).sum();
    match (11 - sum % 11) % 11 {
        10 => Some('X'),
        v => char::from_digit(v, 10),
    }
}

/// Keyword-window ISSN extraction.
#[derive(Debug, Clone, Copy)]
pub struct IssnExtractor {
    pub case_insensitive: bool,
}

impl Default for IssnExtractor {
    fn default() -> Self {
        Self {
            case_insensitive: true,
        }
    }
}

impl IssnExtractor {
    /// Scans the [`KEYWORD_WINDOW`] tokens following every `ISSN` / `ISSN:`
    /// keyword and returns the valid ISSNs found there, deduplicated in
    /// first-appearance order.
    pub fn extract(&self, text: &str) -> Vec<String> {
        let tokens: Vec<&str> = text
            .split(|c: char| c.is_whitespace() || TOKEN_BOUNDARIES.contains(&c))
            .filter(|t| !t.is_empty())
            .collect();

        let mut found: Vec<String> = Vec::new();
        let mut push = |candidate: &str| {
            if validate_issn(candidate) && !found.iter().any(|f| f == candidate) {
                found.push(candidate.to_string());
            }
        };

        for (pos, token) in tokens.iter().enumerate() {
            let Some(rest) = self.strip_keyword(token) else {
                continue;
            };
            // "ISSN:0317-8471" carries its first candidate inside the keyword token.
            let mut budget = KEYWORD_WINDOW;
            if !rest.is_empty() {
                push(rest);
                budget -= 1;
            }
            for candidate in tokens.iter().skip(pos + 1).take(budget) {
                push(candidate);
            }
        }
        found
    }

    /// Returns the remainder of `token` after the keyword, or `None` when the
    /// token is not a keyword.
    fn strip_keyword<'a>(&self, token: &'a str) -> Option<&'a str> {
        if token.len() < 4 || !token.is_char_boundary(4) {
            return None;
        }
        let (head, tail) = token.split_at(4);
        let is_keyword = if self.case_insensitive {
            head.eq_ignore_ascii_case("ISSN")
        } else {
            head == "ISSN"
        };
        if !is_keyword {
            return None;
        }
        match tail {
            "" | ":" => Some(""),
            t => t.strip_prefix(':'),
        }
    }
}

/// [`IssnExtractor::extract`] with the default case-insensitive keyword match.
pub fn extract_issns(text: &str) -> Vec<String> {
    IssnExtractor::default().extract(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        assert!(validate_issn("0317-8471"));
        assert!(!validate_issn("0317-8472"));
        assert!(validate_issn("2434-561X"));
    }

    #[test]
    fn malformed_shapes_are_rejected() {
        for s in ["", "03178471", "0317-847", "0317_8471", "0317-8471 ", "2434-561x", "A317-8471"] {
            assert!(!validate_issn(s), "{s:?}");
        }
    }

    #[test]
    fn check_character_round_trips() {
        assert_eq!(check_character("0317847"), Some('1'));
        assert_eq!(check_character("2434561"), Some('X'));
        assert_eq!(check_character("12a4567"), None);
    }

    #[test]
    fn keyword_window() {
        assert_eq!(extract_issns("ISSN: 0317-8471"), vec!["0317-8471"]);
        assert!(extract_issns("ISSN print 0317-8472 online").is_empty());
        assert!(extract_issns("see 2434-561X for details").is_empty());
    }

    #[test]
    fn window_is_five_tokens() {
        assert_eq!(extract_issns("ISSN a b c d 2434-561X"), vec!["2434-561X"]);
        assert!(extract_issns("ISSN a b c d e 2434-561X").is_empty());
    }

    #[test]
    fn punctuation_and_glued_keyword() {
        assert_eq!(
            extract_issns("(ISSN:0317-8471; eISSN 2434-561X), issn (2434-561X)"),
            vec!["0317-8471", "2434-561X"]
        );
    }

    #[test]
    fn case_sensitivity_flag() {
        let strict = IssnExtractor {
            case_insensitive: false,
        };
        assert!(strict.extract("issn 0317-8471").is_empty());
        assert_eq!(extract_issns("issn 0317-8471"), vec!["0317-8471"]);
    }
}
