use bediv_core::generators::GeneratorKind;

/// Input shape with every value-chosen token blanked out: digits, operators,
/// tag and attribute names, attribute values and text.
pub fn skeleton(kind: GeneratorKind, text: &str) -> String {
    match kind {
        GeneratorKind::Tree => collapse_digits(text),
        GeneratorKind::Expr => collapse_digits(text)
            .chars()
            .map(|c| if "+-*/%".contains(c) { 'o' } else { c })
            .collect(),
        GeneratorKind::Xml => xml_skeleton(text),
    }
}

fn collapse_digits(text: &str) -> String {
    let mut out = String::new();
    for c in text.chars() {
        if c.is_ascii_digit() {
            if !out.ends_with('#') {
                out.push('#');
            }
        } else {
            out.push(c);
        }
    }
    out
}

fn xml_skeleton(text: &str) -> String {
    let mut out = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '<' {
            continue;
        }
        let closing = chars.peek() == Some(&'/');
        out.push_str(if closing { "</" } else { "<" });
        let mut in_value = false;
        for c in chars.by_ref() {
            match c {
                '"' => in_value = !in_value,
                ' ' if !in_value => out.push('@'),
                '>' if !in_value => break,
                _ => {}
            }
        }
        out.push('>');
    }
    out
}
