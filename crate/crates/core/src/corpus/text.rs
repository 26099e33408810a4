// Offsets throughout the crate count Unicode scalar values, not bytes.

pub fn char_len(text: &str) -> usize {
    text.chars().count()
}

fn byte_offset(text: &str, char_pos: usize) -> Option<usize> {
    if char_pos == 0 {
        return Some(0);
    }
    let mut count = 0;
    for (byte, _) in text.char_indices() {
        if count == char_pos {
            return Some(byte);
        }
        count += 1;
    }
    (count == char_pos).then_some(text.len())
}

/// Slice of `text` covering characters `[start, end)`.
pub fn char_slice(text: &str, start: usize, end: usize) -> Option<&str> {
    if start > end {
        return None;
    }
    let b0 = byte_offset(text, start)?;
    let b1 = byte_offset(text, end)?;
    Some(&text[b0..b1])
}

fn fold_eq(a: char, b: char) -> bool {
    a == b || a.to_lowercase().eq(b.to_lowercase())
}

/// Case-insensitive search for `needle` in `haystack` starting at character
/// `from`. Returns the character offset of the first match. Folding is done
/// per character so returned offsets index the original text.
pub fn find_ci(haystack: &[char], needle: &[char], from: usize) -> Option<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return None;
    }
    (from..=haystack.len() - needle.len()).find(|&i| {
        needle
            .iter()
            .zip(&haystack[i..i + needle.len()])
            .all(|(&n, &h)| fold_eq(n, h))
    })
}
