//! Rewrites RED-style short options into the long flags.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unrecognized RED option `{0}`")]
pub struct CompatError(pub String);

/// Expands one RED option token, e.g. `-AoGcGd1` becomes
/// `--refute --big-chunks --level 1`. `-Z` asks for non-Zeno runs.
pub fn expand(token: &str) -> Result<Vec<String>, CompatError> {
    let bad = || CompatError(token.to_string());
    let body = token.strip_prefix('-').filter(|b| !b.is_empty() && !b.starts_with('-')).ok_or_else(bad)?;
    let chars: Vec<char> = body.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        match (chars[i], chars.get(i + 1)) {
            ('A', Some('o')) => out.push("--refute".to_string()),
            ('A', Some('u')) => out.push("--prove".to_string()),
            ('G', Some('c')) => out.push("--big-chunks".to_string()),
            ('G', Some('d')) => {
                let digits: String = chars[i + 2..].iter().take_while(|c| c.is_ascii_digit()).collect();
                if digits.is_empty() {
                    return Err(bad());
                }
                out.push("--level".to_string());
                out.push(digits.clone());
                i += 2 + digits.len();
                continue;
            }
            ('Z', _) => {
                out.push("--non-zeno".to_string());
                i += 1;
                continue;
            }
            _ => return Err(bad()),
        }
        i += 2;
    }
    Ok(out)
}

/// Rewrites the argument list when `--red-compat` is present: the flag is
/// dropped and every RED token is expanded. Other arguments pass through.
pub fn rewrite(args: Vec<String>) -> Result<Vec<String>, CompatError> {
    if !args.iter().any(|a| a == "--red-compat") {
        return Ok(args);
    }
    let mut out = Vec::new();
    for (i, a) in args.into_iter().enumerate() {
        if a == "--red-compat" {
            continue;
        }
        let red = i > 0 && a.len() > 1 && a.starts_with('-') && !a.starts_with("--") && looks_red(&a);
        if red {
            out.extend(expand(&a)?);
        } else {
            out.push(a);
        }
    }
    Ok(out)
}

fn looks_red(token: &str) -> bool {
    matches!(token.chars().nth(1), Some('A' | 'G' | 'Z'))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn combined_tokens() {
        assert_eq!(expand("-AoGd0").unwrap(), strs(&["--refute", "--level", "0"]));
        assert_eq!(expand("-AoGcGd12").unwrap(), strs(&["--refute", "--big-chunks", "--level", "12"]));
        assert_eq!(expand("-Au").unwrap(), strs(&["--prove"]));
        assert_eq!(expand("-Z").unwrap(), strs(&["--non-zeno"]));
        assert_eq!(expand("-ZAo").unwrap(), strs(&["--non-zeno", "--refute"]));
    }

    #[test]
    fn malformed_tokens() {
        for t in ["-Ax", "-Gd", "-G", "-Q", "-"] {
            assert_eq!(expand(t), Err(CompatError(t.to_string())));
        }
    }

    #[test]
    fn rewrite_only_with_flag() {
        let plain = strs(&["nzf-check", "-Z", "m.ta"]);
        assert_eq!(rewrite(plain.clone()).unwrap(), plain);
        let red = strs(&["nzf-check", "--red-compat", "-AoGd1", "m.ta", "EG q"]);
        assert_eq!(rewrite(red).unwrap(), strs(&["nzf-check", "--refute", "--level", "1", "m.ta", "EG q"]));
    }
}
