//! Point lists: one rational (`p/q` or `p`) per line, `#` starts a comment.

use std::path::Path;

use crate::error::{Error, Result};
use crate::rat::Rat;

pub fn parse_points(text: &str) -> Result<Vec<Rat>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let t = body.trim();
        if t.is_empty() {
            continue;
        }
        let column = body.find(t).unwrap_or(0) + 1;
        let x = t.parse::<Rat>().map_err(|e| Error::Parse {
            line: i + 1,
            column,
            message: format!("bad rational '{t}': {e}"),
        })?;
        out.push(x);
    }
    Ok(out)
}

pub fn read_points(path: &Path) -> Result<Vec<Rat>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_points(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn comments_and_blank_lines() {
        let text = "# points\n3\n\n  7/2   # trailing\n-1/3\n";
        assert_eq!(
            parse_points(text).unwrap(),
            vec![Rat::int(3), rat(7, 2), rat(-1, 3)]
        );
    }

    #[test]
    fn error_carries_line() {
        match parse_points("1\n2\n  x/3\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 3)),
            other => panic!("{other:?}"),
        }
        assert!(parse_points("1/0").is_err());
    }
}
