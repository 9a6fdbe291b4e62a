//! CPLEX-style LP text: writer and a reader for the subset it writes (plus
//! the usual keyword aliases).

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use super::model::{MilpModel, ModelError, ObjectiveSense, Sense, VarId, VarKind};

const TERMS_PER_LINE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("names `{0}` and `{1}` collide after sanitization")]
    NameCollision(String, String),
    #[error("constraint `{0}` has no terms")]
    EmptyConstraint(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Replaces characters outside `[A-Za-z0-9_.]` and guards a leading digit
/// or dot.
pub fn sanitize_name(name: &str) -> String {
    let mut out: String =
        name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '.' { c } else { '_' }).collect();
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        out.insert(0, '_');
    }
    out
}

fn sanitized_all<'a>(names: impl Iterator<Item = &'a str>) -> Result<Vec<String>, LpError> {
    let mut seen: HashMap<String, &str> = HashMap::new();
    let mut out = Vec::new();
    for name in names {
        let s = sanitize_name(name);
        if let Some(prev) = seen.insert(s.clone(), name) {
            return Err(LpError::NameCollision(prev.to_string(), name.to_string()));
        }
        out.push(s);
    }
    Ok(out)
}

fn num(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

fn write_terms(out: &mut String, terms: &[(VarId, f64)], names: &[String]) {
    for (k, &(v, a)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let sign = if a.is_sign_negative() { '-' } else { '+' };
        let mag = a.abs();
        if k == 0 && sign == '+' {
            let _ = write!(out, " {} {}", num(mag), names[v.0]);
        } else {
            let _ = write!(out, " {sign} {} {}", num(mag), names[v.0]);
        }
    }
}

/// Writes the model. Every variable gets a bounds line, in declaration
/// order, so reading the file back restores the variable order.
pub fn export_lp(model: &MilpModel) -> Result<String, LpError> {
    let names = sanitized_all(model.variables().iter().map(|v| v.name.as_str()))?;
    let row_names = sanitized_all(model.constraints().iter().map(|c| c.name.as_str()))?;
    let mut out = String::new();
    let _ = writeln!(out, "\\ Problem: {}", model.name);
    out.push_str(match model.objective().sense {
        ObjectiveSense::Minimize => "Minimize\n",
        ObjectiveSense::Maximize => "Maximize\n",
    });
    out.push_str(" obj:");
    write_terms(&mut out, &model.objective().terms, &names);
    out.push_str("\nSubject To\n");
    for (c, name) in model.constraints().iter().zip(&row_names) {
        if c.terms.is_empty() {
            return Err(LpError::EmptyConstraint(c.name.clone()));
        }
        let _ = write!(out, " {name}:");
        write_terms(&mut out, &c.terms, &names);
        let sense = match c.sense {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        };
        let _ = writeln!(out, " {sense} {}", num(c.rhs));
    }
    out.push_str("Bounds\n");
    for (v, name) in model.variables().iter().zip(&names) {
        if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
            let _ = writeln!(out, " {name} free");
        } else {
            let _ = writeln!(out, " {} <= {name} <= {}", num(v.lower), num(v.upper));
        }
    }
    for (kind, header) in [(VarKind::Binary, "Binaries"), (VarKind::Integer, "Generals")] {
        let list: Vec<&str> =
            model.variables().iter().zip(&names).filter(|(v, _)| v.kind == kind).map(|(_, n)| n.as_str()).collect();
        if list.is_empty() {
            continue;
        }
        let _ = writeln!(out, "{header}");
        for chunk in list.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Objective,
    Constraints,
    Bounds,
    Binaries,
    Generals,
    End,
}

fn section_of(line: &str) -> Option<(Section, Option<ObjectiveSense>)> {
    let lower = line.trim().to_ascii_lowercase();
    let words: Vec<&str> = lower.split_whitespace().collect();
    Some(match words.as_slice() {
        ["minimize" | "minimise" | "minimum" | "min"] => (Section::Objective, Some(ObjectiveSense::Minimize)),
        ["maximize" | "maximise" | "maximum" | "max"] => (Section::Objective, Some(ObjectiveSense::Maximize)),
        ["subject", "to"] | ["such", "that"] | ["st"] | ["s.t."] => (Section::Constraints, None),
        ["bounds" | "bound"] => (Section::Bounds, None),
        ["binaries" | "binary" | "bin"] => (Section::Binaries, None),
        ["generals" | "general" | "gen" | "integers" | "integer"] => (Section::Generals, None),
        ["end"] => (Section::End, None),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Num(f64),
    Sign(f64),
    Colon,
    Cmp(Sense),
}

fn tokenize(text: &str, line: usize) -> Result<Vec<(Tok, usize)>, LpError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c == ':' {
            out.push((Tok::Colon, line));
            k += 1;
        } else if c == '+' || c == '-' {
            // signed infinity is a number, not a sign
            let rest: String = chars[k + 1..].iter().take(8).collect::<String>().to_ascii_lowercase();
            if rest.starts_with("inf") {
                let len = if rest.starts_with("infinity") { 8 } else { 3 };
                out.push((Tok::Num(if c == '+' { f64::INFINITY } else { f64::NEG_INFINITY }), line));
                k += 1 + len;
            } else {
                out.push((Tok::Sign(if c == '+' { 1.0 } else { -1.0 }), line));
                k += 1;
            }
        } else if c == '<' || c == '>' || c == '=' {
            let mut op = String::from(c);
            if k + 1 < chars.len() && matches!(chars[k + 1], '<' | '>' | '=') {
                op.push(chars[k + 1]);
            }
            k += op.len();
            let sense = match op.as_str() {
                "<" | "<=" | "=<" => Sense::Le,
                ">" | ">=" | "=>" => Sense::Ge,
                "=" | "==" => Sense::Eq,
                _ => return Err(LpError::Syntax { line, message: format!("bad operator `{op}`") }),
            };
            out.push((Tok::Cmp(sense), line));
        } else {
            let start = k;
            while k < chars.len() && !chars[k].is_whitespace() && !matches!(chars[k], ':' | '<' | '>' | '=' | '+' | '-')
            {
                k += 1;
                // exponent signs belong to the number
                if k < chars.len()
                    && matches!(chars[k], '+' | '-')
                    && matches!(chars[k - 1], 'e' | 'E')
                    && chars[start].is_ascii_digit()
                {
                    k += 1;
                }
            }
            let word: String = chars[start..k].iter().collect();
            let lower = word.to_ascii_lowercase();
            if chars[start].is_ascii_digit() || chars[start] == '.' {
                let v = word.parse::<f64>().map_err(|_| LpError::Syntax { line, message: format!("bad number `{word}`") })?;
                out.push((Tok::Num(v), line));
            } else if lower == "inf" || lower == "infinity" {
                out.push((Tok::Num(f64::INFINITY), line));
            } else {
                out.push((Tok::Word(word), line));
            }
        }
    }
    Ok(out)
}

struct Reader {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Reader {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }
    fn peek_at(&self, off: usize) -> Option<&Tok> {
        self.toks.get(self.pos + off).map(|(t, _)| t)
    }
    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(0, |(_, l)| *l)
    }
    fn err<T>(&self, message: impl Into<String>) -> Result<T, LpError> {
        Err(LpError::Syntax { line: self.line(), message: message.into() })
    }

    fn label(&mut self) -> Option<String> {
        if let (Some(Tok::Word(w)), Some(Tok::Colon)) = (self.peek(), self.peek_at(1)) {
            let w = w.clone();
            self.pos += 2;
            return Some(w);
        }
        None
    }

    /// Linear expression up to a comparison, a label, or the end.
    fn expression(&mut self) -> Result<Vec<(String, f64)>, LpError> {
        let mut terms = Vec::new();
        loop {
            if matches!(self.peek(), None | Some(Tok::Cmp(_))) {
                return Ok(terms);
            }
            if matches!((self.peek(), self.peek_at(1)), (Some(Tok::Word(_)), Some(Tok::Colon))) {
                return Ok(terms);
            }
            let mut coef = 1.0;
            let mut seen_sign = false;
            while let Some(Tok::Sign(s)) = self.peek() {
                coef *= s;
                seen_sign = true;
                self.pos += 1;
            }
            if !seen_sign && !terms.is_empty() {
                return self.err("expected `+` or `-` between terms");
            }
            if let Some(Tok::Num(v)) = self.peek() {
                coef *= v;
                self.pos += 1;
            }
            match self.peek() {
                Some(Tok::Word(w)) => {
                    terms.push((w.clone(), coef));
                    self.pos += 1;
                }
                _ => return self.err("expected a variable name"),
            }
        }
    }

    fn signed_number(&mut self) -> Result<f64, LpError> {
        let mut sign = 1.0;
        while let Some(Tok::Sign(s)) = self.peek() {
            sign *= s;
            self.pos += 1;
        }
        match self.peek() {
            Some(Tok::Num(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(sign * v)
            }
            _ => self.err("expected a number"),
        }
    }
}

#[derive(Default)]
struct Draft {
    order: Vec<String>,
    known: HashSet<String>,
    bounds: HashMap<String, (f64, f64)>,
    kinds: HashMap<String, VarKind>,
}

impl Draft {
    fn touch(&mut self, name: &str) {
        if self.known.insert(name.to_string()) {
            self.order.push(name.to_string());
        }
    }
}

fn parse_bound(r: &mut Reader, draft: &mut Draft) -> Result<(), LpError> {
    // forms: `x free`, `lo <= x <= hi`, `x <= hi`, `x >= lo`, `x = v`, `lo <= x`
    let first_is_num = matches!(r.peek(), Some(Tok::Num(_)) | Some(Tok::Sign(_)));
    if first_is_num {
        let lo = r.signed_number()?;
        let Some(Tok::Cmp(op)) = r.peek().cloned() else { return r.err("expected comparison in bound") };
        r.pos += 1;
        let Some(Tok::Word(name)) = r.peek().cloned() else { return r.err("expected variable in bound") };
        r.pos += 1;
        draft.touch(&name);
        let entry = draft.bounds.entry(name.clone()).or_insert((0.0, f64::INFINITY));
        match op {
            Sense::Le => entry.0 = lo,
            Sense::Ge => entry.1 = lo,
            Sense::Eq => *entry = (lo, lo),
        }
        if let Some(Tok::Cmp(op2)) = r.peek().cloned() {
            r.pos += 1;
            let hi = r.signed_number()?;
            let entry = draft.bounds.get_mut(&name).expect("inserted above");
            match op2 {
                Sense::Le => entry.1 = hi,
                Sense::Ge => entry.0 = hi,
                Sense::Eq => *entry = (hi, hi),
            }
        }
        return Ok(());
    }
    let Some(Tok::Word(name)) = r.peek().cloned() else { return r.err("expected bound") };
    r.pos += 1;
    draft.touch(&name);
    if let Some(Tok::Word(w)) = r.peek() {
        if w.eq_ignore_ascii_case("free") {
            r.pos += 1;
            draft.bounds.insert(name, (f64::NEG_INFINITY, f64::INFINITY));
            return Ok(());
        }
    }
    let Some(Tok::Cmp(op)) = r.peek().cloned() else { return r.err("expected comparison in bound") };
    r.pos += 1;
    let v = r.signed_number()?;
    let entry = draft.bounds.entry(name).or_insert((0.0, f64::INFINITY));
    match op {
        Sense::Le => entry.1 = v,
        Sense::Ge => entry.0 = v,
        Sense::Eq => *entry = (v, v),
    }
    Ok(())
}

/// Reads LP text written by [`export_lp`] or a compatible tool. Variables
/// are declared in order of first appearance in the bounds section, then
/// in order of first appearance elsewhere.
pub fn import_lp(text: &str) -> Result<MilpModel, LpError> {
    let mut sections: Vec<(Section, Vec<(Tok, usize)>)> = Vec::new();
    let mut sense = None;
    let mut name = String::from("lp");
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        if let Some(rest) = raw.trim_start().strip_prefix('\\') {
            if let Some(n) = rest.trim().strip_prefix("Problem:") {
                name = n.trim().to_string();
            }
            continue;
        }
        let content = raw.split('\\').next().unwrap_or("");
        if let Some((sec, s)) = section_of(content) {
            if s.is_some() {
                sense = s;
            }
            sections.push((sec, Vec::new()));
            continue;
        }
        if content.trim().is_empty() {
            continue;
        }
        let Some((_, toks)) = sections.last_mut() else {
            return Err(LpError::Syntax { line, message: "content before the objective section".into() });
        };
        toks.extend(tokenize(content, line)?);
    }
    let Some(sense) = sense else {
        return Err(LpError::Syntax { line: 1, message: "missing Minimize/Maximize".into() });
    };

    let mut draft = Draft::default();
    let mut objective = Vec::new();
    let mut rows = Vec::new();
    let mut bound_section = Vec::new();
    for (sec, toks) in sections {
        let mut r = Reader { toks, pos: 0 };
        match sec {
            Section::Objective => {
                r.label();
                objective.extend(r.expression()?);
                if r.peek().is_some() {
                    return r.err("unexpected token in objective");
                }
            }
            Section::Constraints => {
                while r.peek().is_some() {
                    let label = r.label().unwrap_or_else(|| format!("c{}", rows.len() + 1));
                    let terms = r.expression()?;
                    let Some(Tok::Cmp(op)) = r.peek().cloned() else { return r.err("expected comparison") };
                    r.pos += 1;
                    let rhs = r.signed_number()?;
                    rows.push((label, terms, op, rhs));
                }
            }
            Section::Bounds => bound_section.push(r),
            Section::Binaries | Section::Generals => {
                let kind = if sec == Section::Binaries { VarKind::Binary } else { VarKind::Integer };
                while let Some(tok) = r.peek().cloned() {
                    let Tok::Word(w) = tok else { return r.err("expected variable names") };
                    r.pos += 1;
                    draft.kinds.insert(w, kind);
                }
            }
            Section::End => {
                if r.peek().is_some() {
                    return r.err("content after End");
                }
            }
        }
    }
    for mut r in bound_section {
        while r.peek().is_some() {
            parse_bound(&mut r, &mut draft)?;
        }
    }
    for (n, _) in &objective {
        draft.touch(n);
    }
    for (_, terms, _, _) in &rows {
        for (n, _) in terms {
            draft.touch(n);
        }
    }
    let mut kinds: Vec<_> = draft.kinds.keys().cloned().collect();
    kinds.sort();
    for n in kinds {
        draft.touch(&n);
    }

    let mut model = MilpModel::new(name, sense);
    for n in &draft.order {
        let kind = draft.kinds.get(n).copied().unwrap_or(VarKind::Continuous);
        let default = if kind == VarKind::Binary { (0.0, 1.0) } else { (0.0, f64::INFINITY) };
        let (lo, hi) = draft.bounds.get(n).copied().unwrap_or(default);
        model.add_var(n.clone(), lo, hi, kind)?;
    }
    let id = |model: &MilpModel, n: &str| model.var_by_name(n).expect("declared above");
    let obj = objective.iter().map(|(n, c)| (id(&model, n), *c)).collect();
    model.set_objective(sense, obj);
    for (label, terms, op, rhs) in rows {
        let terms = terms.iter().map(|(n, c)| (id(&model, n), *c)).collect();
        model.add_constraint(label, terms, op, rhs)?;
    }
    Ok(model)
}
