use alloc::string::String;
use alloc::vec::Vec;

use crate::error::TextError;
use crate::model::ControlType;

use super::{HiddenChildren, TopologyView, ViewNode, SHARED_DIVIDER};

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(src: &str, line: usize) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn err(&self, reason: impl Into<String>) -> TextError {
        TextError::MalformedText {
            line: self.line,
            column: self.pos + 1,
            reason: reason.into(),
        }
    }

    fn expect(&mut self, want: char) -> Result<(), TextError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.err(alloc::format!("expected {want:?}, found {c:?}"))),
            None => Err(self.err(alloc::format!("expected {want:?}, found end of line"))),
        }
    }

    /// Escaped text up to (not including) an unescaped `stop` character.
    fn text_until(&mut self, stop: char) -> Result<String, TextError> {
        let mut s = String::new();
        loop {
            match self.peek() {
                None => return Err(self.err(alloc::format!("unterminated text, expected {stop:?}"))),
                Some(c) if c == stop => return Ok(s),
                Some('\\') => {
                    self.pos += 1;
                    match self.bump() {
                        Some('n') => s.push('\n'),
                        Some('r') => s.push('\r'),
                        Some(c) => s.push(c),
                        None => return Err(self.err("dangling escape")),
                    }
                }
                Some(c @ ('(' | ')' | '[' | ']' | ',' | '_' | '<' | '>')) if c != stop => {
                    return Err(self.err(alloc::format!("unescaped {c:?} in text")));
                }
                Some(c) => {
                    s.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn number(&mut self) -> Result<u64, TextError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().map_err(|_| self.err("number out of range"))
    }

    fn id(&mut self) -> Result<u32, TextError> {
        let n = self.number()?;
        u32::try_from(n).map_err(|_| self.err("id out of range"))
    }

    fn node(&mut self) -> Result<ViewNode, TextError> {
        let name = self.text_until('(')?;
        self.expect('(')?;
        let type_start = self.pos;
        let type_name = self.text_until(')')?;
        let control_type: ControlType = type_name.parse().map_err(|_| TextError::MalformedText {
            line: self.line,
            column: type_start + 1,
            reason: alloc::format!("unknown control type {type_name:?}"),
        })?;
        self.expect(')')?;
        let mut description = None;
        if self.peek() == Some('(') {
            self.pos += 1;
            description = Some(self.text_until(')')?);
            self.expect(')')?;
        }
        self.expect('_')?;
        let id = self.id()?;
        let mut node = ViewNode {
            id,
            name,
            control_type,
            description,
            children: Vec::new(),
            hidden: None,
        };
        if self.peek() == Some('[') {
            self.pos += 1;
            loop {
                if self.peek() == Some('<') {
                    node.hidden = Some(self.placeholder(id)?);
                    // a placeholder always closes the child list
                    self.expect(']')?;
                    break;
                }
                node.children.push(self.node()?);
                match self.bump() {
                    Some(',') => continue,
                    Some(']') => break,
                    Some(c) => {
                        self.pos -= 1;
                        return Err(self.err(alloc::format!("expected ',' or ']', found {c:?}")));
                    }
                    None => {
                        self.pos -= 1;
                        return Err(self.err("unbalanced '['"));
                    }
                }
            }
            if node.children.is_empty() && node.hidden.is_none() {
                return Err(self.err("empty child list"));
            }
        }
        Ok(node)
    }

    fn placeholder(&mut self, parent: u32) -> Result<HiddenChildren, TextError> {
        self.expect('<')?;
        let count = self.number()? as usize;
        for c in " more, further_query ".chars() {
            self.expect(c)?;
        }
        let further_query = self.id()?;
        self.expect('>')?;
        if further_query != parent {
            return Err(self.err("placeholder names a different parent"));
        }
        Ok(HiddenChildren { count, further_query })
    }
}

fn entry_line(line: &str) -> Option<(u32, u32)> {
    let rest = line.strip_prefix("ref ")?;
    let (r, root) = rest.split_once(" -> subtree ")?;
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(r) || !digits(root) {
        return None;
    }
    Some((r.parse().ok()?, root.parse().ok()?))
}

/// Parses text produced by the serializer back into a structural view.
pub fn parse_topology(text: &str) -> Result<TopologyView, TextError> {
    let mut view = TopologyView::default();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.is_empty() {
            continue;
        }
        if line == SHARED_DIVIDER {
            if view.shared_start.is_some() {
                return Err(TextError::MalformedText {
                    line: line_no,
                    column: 1,
                    reason: "repeated shared divider".into(),
                });
            }
            view.shared_start = Some(view.trees.len());
            continue;
        }
        if let Some((r, root)) = entry_line(line) {
            view.entries.insert(r, root);
            continue;
        }
        let mut cur = Cursor::new(line, line_no);
        let node = cur.node()?;
        if cur.peek().is_some() {
            return Err(cur.err("trailing characters after tree"));
        }
        view.trees.push(node);
    }
    Ok(view)
}
