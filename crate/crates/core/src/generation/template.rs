//! Template files: formatting directives plus condition-guarded, ordered
//! template lines per goal kind.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("template line {line}: {message}")]
pub struct TemplateError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub key: String,
    pub value: String,
    pub negated: bool,
}

impl Condition {
    pub fn holds(&self, facts: &BTreeMap<&str, String>) -> bool {
        let equal = facts.get(self.key.as_str()).is_some_and(|v| *v == self.value);
        equal != self.negated
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub kind: String,
    pub conditions: Vec<Condition>,
    pub body: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TemplateSet {
    pub directives: BTreeMap<String, String>,
    /// In file order, which is preference order.
    pub templates: Vec<Template>,
}

fn unquote(s: &str) -> &str {
    s.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(s)
}

impl TemplateSet {
    pub fn parse(text: &str) -> Result<TemplateSet, TemplateError> {
        let mut set = TemplateSet::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| TemplateError { line: i + 1, message: message.to_string() };
            if let Some(rest) = line.strip_prefix('@') {
                let (name, value) = rest.split_once(char::is_whitespace).ok_or_else(|| err("directive without value"))?;
                set.directives.insert(name.to_string(), unquote(value.trim()).to_string());
                continue;
            }
            let (head, body) = line.split_once(" : ").ok_or_else(|| err("expected `kind conditions : body`"))?;
            let mut words = head.split_whitespace();
            let kind = words.next().ok_or_else(|| err("missing kind"))?.to_string();
            let mut conditions = Vec::new();
            for w in words {
                let (key, value, negated) = if let Some((k, v)) = w.split_once("!=") {
                    (k, v, true)
                } else if let Some((k, v)) = w.split_once('=') {
                    (k, v, false)
                } else {
                    return Err(err(&format!("bad condition '{w}'")));
                };
                conditions.push(Condition { key: key.into(), value: value.into(), negated });
            }
            if body.trim().is_empty() {
                return Err(err("empty body"));
            }
            set.templates.push(Template { kind, conditions, body: body.trim().to_string() });
        }
        Ok(set)
    }

    pub fn directive(&self, name: &str) -> &str {
        self.directives.get(name).map(String::as_str).unwrap_or("")
    }

    /// First template of `kind` whose conditions all hold.
    pub fn select(&self, kind: &str, facts: &BTreeMap<&str, String>) -> Option<&Template> {
        self.templates
            .iter()
            .find(|t| t.kind == kind && t.conditions.iter().all(|c| c.holds(facts)))
    }

    pub fn kinds(&self) -> impl Iterator<Item = &str> {
        self.templates.iter().map(|t| t.kind.as_str())
    }
}

/// Replaces `{name}` placeholders; unknown names are left as they are.
pub fn fill(body: &str, values: &BTreeMap<&str, String>) -> String {
    let mut out = String::with_capacity(body.len());
    let mut rest = body;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        match rest[open..].find('}') {
            Some(close) => {
                let name = &rest[open + 1..open + close];
                match values.get(name) {
                    Some(v) => out.push_str(v),
                    None => out.push_str(&rest[open..=open + close]),
                }
                rest = &rest[open + close + 1..];
            }
            None => {
                out.push_str(&rest[open..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_applicable_wins() {
        let set = TemplateSet::parse("@x \" a \"\nk n=1 : one\nk n!=1 : other\nk : fallback\n").unwrap();
        assert_eq!(set.directive("x"), " a ");
        let mut facts = BTreeMap::new();
        facts.insert("n", "1".to_string());
        assert_eq!(set.select("k", &facts).unwrap().body, "one");
        facts.insert("n", "2".to_string());
        assert_eq!(set.select("k", &facts).unwrap().body, "other");
        assert!(set.select("z", &facts).is_none());
    }

    #[test]
    fn fill_placeholders() {
        let mut v = BTreeMap::new();
        v.insert("date", "5. 11. 1996".to_string());
        assert_eq!(fill("am {date} {x}", &v), "am 5. 11. 1996 {x}");
        assert_eq!(fill("open {", &v), "open {");
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(TemplateSet::parse("# c\nbroken line").unwrap_err().line, 2);
        assert_eq!(TemplateSet::parse("k bad : body").unwrap_err().line, 1);
    }
}
