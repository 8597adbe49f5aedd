//! Post-processing of model replies: code fences and embedded JSON.

/// The body of the first fenced block, or the reply unchanged when it has
/// no fence. The inner bytes are kept exactly, including the final newline
/// before the closing fence.
pub fn strip_code_fences(reply: &str) -> &str {
    let Some(open) = fence_line(reply, 0) else {
        return reply;
    };
    let body_start = match reply[open..].find('\n') {
        Some(nl) => open + nl + 1,
        None => return "",
    };
    match fence_line(reply, body_start) {
        Some(close) => &reply[body_start..close],
        None => &reply[body_start..],
    }
}

/// Byte offset of the first line at or after `from` that starts with a
/// fence (leading spaces allowed).
fn fence_line(text: &str, from: usize) -> Option<usize> {
    let mut at = from;
    while at <= text.len() {
        let line_end = text[at..].find('\n').map(|i| at + i).unwrap_or(text.len());
        if text[at..line_end].trim_start().starts_with("```") {
            return Some(at);
        }
        if line_end == text.len() {
            return None;
        }
        at = line_end + 1;
    }
    None
}

/// The first bracket-balanced `[...]` slice that parses as JSON.
pub fn extract_json_array(reply: &str) -> Option<&str> {
    let bytes = reply.as_bytes();
    let mut start = 0;
    while let Some(offset) = reply[start..].find('[') {
        let open = start + offset;
        if let Some(close) = balanced_end(bytes, open) {
            let candidate = &reply[open..=close];
            if serde_json::from_str::<serde_json::Value>(candidate).is_ok() {
                return Some(candidate);
            }
        }
        start = open + 1;
    }
    None
}

/// Index of the bracket closing the one at `open`, skipping string bodies.
fn balanced_end(bytes: &[u8], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate().skip(open) {
        if in_string {
            match (escaped, b) {
                (true, _) => escaped = false,
                (false, b'\\') => escaped = true,
                (false, b'"') => in_string = false,
                _ => {}
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'[' | b'{' => depth += 1,
            b']' | b'}' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}
