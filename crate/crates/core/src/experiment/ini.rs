use std::fmt;

/// A configuration error, positioned at a 1-based line and column when it
/// can be attributed to a place in the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub col: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn at(line: usize, col: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            col: Some(col),
            message: message.into(),
        }
    }

    pub fn general(message: impl Into<String>) -> Self {
        Self {
            line: None,
            col: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.col) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
    pub value_col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

/// Parsed `[section]` / `key = value` document. `#` starts a comment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ini {
    pub sections: Vec<Section>,
}

impl Ini {
    pub fn parse(text: &str, allowed_sections: &[&str]) -> Result<Self, ConfigError> {
        let mut sections: Vec<Section> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            let indent = content.len() - content.trim_start().len();
            let col = raw[..indent].chars().count() + 1;
            if let Some(rest) = trimmed.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| {
                    ConfigError::at(line_no, col, "section header is missing its closing ']'")
                })?;
                let name = name.trim();
                if !allowed_sections.contains(&name) {
                    return Err(ConfigError::at(
                        line_no,
                        col + 1,
                        format!(
                            "unknown section [{name}] (expected one of: {})",
                            allowed_sections.join(", ")
                        ),
                    ));
                }
                if sections.iter().any(|s| s.name == name) {
                    return Err(ConfigError::at(
                        line_no,
                        col,
                        format!("duplicate section [{name}]"),
                    ));
                }
                sections.push(Section {
                    name: name.to_string(),
                    line: line_no,
                    entries: Vec::new(),
                });
                continue;
            }
            let eq = content
                .find('=')
                .ok_or_else(|| ConfigError::at(line_no, col, "expected 'key = value'"))?;
            let key = content[..eq].trim();
            if key.is_empty() {
                return Err(ConfigError::at(line_no, col, "empty key"));
            }
            let after = &content[eq + 1..];
            let value = after.trim();
            let value_offset = eq + 1 + (after.len() - after.trim_start().len());
            let value_col = raw[..value_offset].chars().count() + 1;
            let section = sections.last_mut().ok_or_else(|| {
                ConfigError::at(
                    line_no,
                    col,
                    format!("key '{key}' appears before any [section]"),
                )
            })?;
            if section.entries.iter().any(|e| e.key == key) {
                return Err(ConfigError::at(
                    line_no,
                    col,
                    format!("duplicate key '{key}' in [{}]", section.name),
                ));
            }
            section.entries.push(Entry {
                key: key.to_string(),
                value: value.to_string(),
                line: line_no,
                value_col,
            });
        }
        Ok(Self { sections })
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        for e in &self.entries {
            if !allowed.contains(&e.key.as_str()) {
                return Err(ConfigError::at(
                    e.line,
                    1,
                    format!("unknown key '{}' in [{}]", e.key, self.name),
                ));
            }
        }
        Ok(())
    }
}

impl Entry {
    pub fn error(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::at(self.line, self.value_col, message)
    }

    pub fn parse<T: std::str::FromStr>(&self, what: &str) -> Result<T, ConfigError> {
        self.value.parse().map_err(|_| {
            self.error(format!(
                "'{}' is not a valid {what} for '{}'",
                self.value, self.key
            ))
        })
    }

    /// Comma- or whitespace-separated list.
    pub fn parse_list<T: std::str::FromStr>(&self, what: &str) -> Result<Vec<T>, ConfigError> {
        let items: Vec<&str> = self
            .value
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if items.is_empty() {
            return Err(self.error(format!("'{}' must not be empty", self.key)));
        }
        items
            .iter()
            .map(|s| {
                s.parse().map_err(|_| {
                    self.error(format!("'{s}' is not a valid {what} in '{}'", self.key))
                })
            })
            .collect()
    }
}
