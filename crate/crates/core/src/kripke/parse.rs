use super::{KripkeBuilder, KripkeError, KripkeStructure};

/// Parses the line-based `.kr` format:
///
/// ```text
/// states: s0 s1
/// init: s0
/// ap: a b
/// label: s0 a b
/// trans: s0 -> s0 s1
/// ```
///
/// Propositions missing from a `label` line are false; `#` starts a comment.
pub fn parse_kripke(text: &str) -> Result<KripkeStructure, KripkeError> {
    let mut b = KripkeBuilder::new();
    let mut seen_states = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: &str| KripkeError::Syntax {
            line: line_no,
            message: message.to_string(),
        };
        let (key, rest) = line.split_once(':').ok_or_else(|| syntax("expected `key: value`"))?;
        let words: Vec<&str> = rest.split_whitespace().collect();
        for w in &words {
            if *w != "->" && !is_name(w) {
                return Err(syntax(&format!("invalid name `{w}`")));
            }
        }
        match key.trim() {
            "states" => {
                if words.is_empty() {
                    return Err(syntax("empty state list"));
                }
                seen_states = true;
                b = b.states(words);
            }
            "init" => match words.as_slice() {
                [s] => b = b.init(s),
                _ => return Err(syntax("expected exactly one initial state")),
            },
            "ap" => b = b.ap(words),
            "label" => match words.split_first() {
                Some((s, aps)) => b = b.label(s, aps.iter().copied()),
                None => return Err(syntax("expected a state name")),
            },
            "trans" => match words.as_slice() {
                [from, "->", tos @ ..] if !tos.is_empty() && !tos.contains(&"->") => {
                    b = b.trans(from, tos.iter().copied())
                }
                _ => return Err(syntax("expected `trans: s -> t1 t2 ...`")),
            },
            other => return Err(syntax(&format!("unknown key `{other}`"))),
        }
    }
    if !seen_states {
        return Err(KripkeError::NoStates);
    }
    b.build()
}

fn is_name(w: &str) -> bool {
    !w.is_empty()
        && w.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '@' | '(' | ')' | ','))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_STATE: &str = "\
# two states
states: s0 s1
init: s0
ap: a b
label: s0 a b
label: s1 b
trans: s0 -> s0 s1
trans: s1 -> s0
";

    #[test]
    fn reads_two_state_file() {
        let k = parse_kripke(TWO_STATE).unwrap();
        assert_eq!(k.num_states(), 2);
        assert_eq!(k.state_name(k.initial()), "s0");
        assert_eq!(k.successors(0), &[0, 1]);
        assert_eq!(k.label(0).len(), 2);
        assert_eq!(k.label(1).iter().collect::<Vec<_>>(), vec!["b"]);
    }

    #[test]
    fn display_round_trips() {
        let k = parse_kripke(TWO_STATE).unwrap();
        assert_eq!(parse_kripke(&k.to_string()).unwrap(), k);
    }

    #[test]
    fn missing_trans_line_is_a_dead_end() {
        let src = "states: s0 s1\ninit: s0\ntrans: s0 -> s1\n";
        assert_eq!(parse_kripke(src), Err(KripkeError::DeadEnd("s1".into())));
    }

    #[test]
    fn undeclared_label_proposition() {
        let src = "states: s0\ninit: s0\nap: a\nlabel: s0 c\ntrans: s0 -> s0\n";
        assert!(matches!(parse_kripke(src), Err(KripkeError::UnknownAP { ap, .. }) if ap == "c"));
    }

    #[test]
    fn dangling_successor() {
        let src = "states: s0\ninit: s0\ntrans: s0 -> s9\n";
        assert!(matches!(parse_kripke(src), Err(KripkeError::DanglingState { to, .. }) if to == "s9"));
    }

    #[test]
    fn syntax_errors_report_lines() {
        let src = "states: s0\ninit s0\n";
        assert!(matches!(parse_kripke(src), Err(KripkeError::Syntax { line: 2, .. })));
        let src = "states: s0\ninit: s0\ntrans: s0 s0\n";
        assert!(matches!(parse_kripke(src), Err(KripkeError::Syntax { line: 3, .. })));
        let src = "states: s0\nfoo: bar\n";
        assert!(matches!(parse_kripke(src), Err(KripkeError::Syntax { line: 2, .. })));
    }
}
