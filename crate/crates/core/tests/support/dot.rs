//! Recursive-descent checker for the Graphviz DOT language grammar.

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Punct(char),
    EdgeOp(&'static str),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '/' && chars.get(i + 1) == Some(&'/') || c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            while i + 1 < chars.len() && !(chars[i] == '*' && chars[i + 1] == '/') {
                i += 1;
            }
            if i + 1 >= chars.len() {
                return Err("unterminated comment".into());
            }
            i += 2;
        } else if c == '-' && matches!(chars.get(i + 1), Some('>') | Some('-')) {
            out.push(Tok::EdgeOp(if chars[i + 1] == '>' { "->" } else { "--" }));
            i += 2;
        } else if "{}[];,=:".contains(c) {
            out.push(Tok::Punct(c));
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') if i + 1 < chars.len() => {
                        s.push(chars[i + 1]);
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Id(s));
        } else if c == '<' {
            let mut depth = 0;
            let start = i;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated HTML string".into()),
                    Some('<') => depth += 1,
                    Some('>') => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                i += 1;
            }
            i += 1;
            out.push(Tok::Id(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' || (c as u32) >= 0x80 {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || (chars[i] as u32) >= 0x80) {
                i += 1;
            }
            out.push(Tok::Id(chars[start..i].iter().collect()));
        } else if c.is_ascii_digit() || c == '.' || c == '-' {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            if s == "-" || s.matches('.').count() > 1 {
                return Err(format!("bad numeral `{s}`"));
            }
            out.push(Tok::Id(s));
        } else {
            return Err(format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

/// What the checker saw in a well-formed graph.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct DotSummary {
    pub directed: bool,
    pub node_statements: usize,
    pub edges: Vec<(String, String, Vec<(String, String)>)>,
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    summary: DotSummary,
}

fn keyword(t: &Tok, k: &str) -> bool {
    matches!(t, Tok::Id(s) if s.eq_ignore_ascii_case(k))
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn punct(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        if self.punct(c) { Ok(()) } else { Err(format!("expected `{c}` at token {}", self.pos)) }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.peek() {
            Some(Tok::Id(s)) if !["node", "edge", "graph", "digraph", "subgraph", "strict"]
                .iter()
                .any(|k| s.eq_ignore_ascii_case(k)) =>
            {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            other => Err(format!("expected ID, found {other:?}")),
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        if self.peek().is_some_and(|t| keyword(t, "strict")) {
            self.pos += 1;
        }
        match self.peek() {
            Some(t) if keyword(t, "digraph") => self.summary.directed = true,
            Some(t) if keyword(t, "graph") => self.summary.directed = false,
            other => return Err(format!("expected graph or digraph, found {other:?}")),
        }
        self.pos += 1;
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.id()?;
        }
        self.expect('{')?;
        self.stmt_list()?;
        self.expect('}')?;
        if self.pos != self.toks.len() {
            return Err("trailing tokens after graph".into());
        }
        Ok(())
    }

    fn stmt_list(&mut self) -> Result<(), String> {
        while !matches!(self.peek(), Some(Tok::Punct('}')) | None) {
            self.stmt()?;
            self.punct(';');
        }
        Ok(())
    }

    fn attr_list(&mut self) -> Result<Vec<(String, String)>, String> {
        let mut attrs = Vec::new();
        while self.punct('[') {
            while !self.punct(']') {
                let key = self.id()?;
                self.expect('=')?;
                let value = self.id()?;
                attrs.push((key, value));
                if !self.punct(';') {
                    self.punct(',');
                }
                if self.peek().is_none() {
                    return Err("unterminated attribute list".into());
                }
            }
        }
        Ok(attrs)
    }

    fn node_id(&mut self) -> Result<String, String> {
        let id = self.id()?;
        if self.punct(':') {
            self.id()?;
            if self.punct(':') {
                self.id()?;
            }
        }
        Ok(id)
    }

    fn subgraph(&mut self) -> Result<(), String> {
        if self.peek().is_some_and(|t| keyword(t, "subgraph")) {
            self.pos += 1;
            if matches!(self.peek(), Some(Tok::Id(_))) {
                self.id()?;
            }
        }
        self.expect('{')?;
        self.stmt_list()?;
        self.expect('}')
    }

    fn stmt(&mut self) -> Result<(), String> {
        match self.peek() {
            Some(t) if keyword(t, "graph") || keyword(t, "node") || keyword(t, "edge") => {
                self.pos += 1;
                if self.attr_list()?.is_empty() && !matches!(self.toks.get(self.pos - 1), Some(Tok::Punct(']'))) {
                    return Err("attribute statement without attribute list".into());
                }
                return Ok(());
            }
            Some(t) if keyword(t, "subgraph") => return self.subgraph(),
            Some(Tok::Punct('{')) => return self.subgraph(),
            _ => {}
        }
        let first = self.node_id()?;
        if self.punct('=') {
            self.id()?;
            return Ok(());
        }
        let mut chain = vec![first];
        while let Some(Tok::EdgeOp(op)) = self.peek() {
            let directed_op = *op == "->";
            if directed_op != self.summary.directed {
                return Err(format!("edge operator `{op}` does not match graph kind"));
            }
            self.pos += 1;
            chain.push(self.node_id()?);
        }
        let attrs = self.attr_list()?;
        if chain.len() == 1 {
            self.summary.node_statements += 1;
        } else {
            for w in chain.windows(2) {
                self.summary.edges.push((w[0].clone(), w[1].clone(), attrs.clone()));
            }
        }
        Ok(())
    }
}

/// Parses `text` as one DOT graph.
pub fn check_dot(text: &str) -> Result<DotSummary, String> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0, summary: DotSummary::default() };
    p.graph()?;
    Ok(p.summary)
}
