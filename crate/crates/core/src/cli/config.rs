//! The `quickcheck.json` configuration file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde_json::Value as Json;

use super::CliError;
use crate::engine::DEFAULT_TIMEOUT;
use crate::strategies::{StrategyConfig, StrategySet};

/// Settings read from a configuration file, or the defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct ToolConfig {
    pub timeout: Duration,
    pub strategies: Vec<StrategyConfig>,
    /// The file the settings came from.
    pub source: Option<PathBuf>,
    pub warnings: Vec<String>,
}

impl Default for ToolConfig {
    fn default() -> Self {
        ToolConfig {
            timeout: DEFAULT_TIMEOUT,
            strategies: Vec::new(),
            source: None,
            warnings: Vec::new(),
        }
    }
}

impl ToolConfig {
    /// The built-in strategies with this configuration applied. Entries
    /// the strategies reject become warnings.
    pub fn strategy_set(&self) -> (StrategySet, Vec<String>) {
        let mut set = StrategySet::builtin();
        let mut warnings = Vec::new();
        for c in &self.strategies {
            if let Err(e) = set.apply(c) {
                warnings.push(format!("Warning: {e}"));
            }
        }
        (set, warnings)
    }
}

/// Reads `<root>/.vscode/quickcheck.json`, else `<root>/quickcheck.json`,
/// else returns the defaults.
pub fn load_config(root: &Path) -> Result<ToolConfig, CliError> {
    for candidate in [root.join(".vscode").join("quickcheck.json"), root.join("quickcheck.json")] {
        if candidate.is_file() {
            return load_config_file(&candidate);
        }
    }
    Ok(ToolConfig::default())
}

pub fn load_config_file(path: &Path) -> Result<ToolConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text, path)
}

/// Parses configuration text; `path` is used in messages.
pub fn parse_config(text: &str, path: &Path) -> Result<ToolConfig, CliError> {
    let err = |message: String| CliError::Config {
        path: path.display().to_string(),
        message,
    };
    let json: Json = serde_json::from_str(text)
        .map_err(|e| err(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let mut out = ToolConfig {
        source: Some(path.to_path_buf()),
        ..ToolConfig::default()
    };
    let Json::Object(top) = json else {
        return Err(err("expected a JSON object".into()));
    };
    if let Some(config) = top.get("config") {
        let Json::Object(config) = config else {
            return Err(err("\"config\" must be an object".into()));
        };
        if let Some(t) = config.get("timeout") {
            match t.as_f64() {
                Some(secs) if secs > 0.0 && secs.is_finite() => out.timeout = Duration::from_secs_f64(secs),
                _ => return Err(err(format!("\"timeout\" must be a positive number, got {t}"))),
            }
        }
    }
    if let Some(list) = top.get("strategies") {
        let Json::Array(list) = list else {
            return Err(err("\"strategies\" must be an array".into()));
        };
        let known = StrategySet::builtin().names();
        for entry in list {
            let Json::Object(fields) = entry else {
                return Err(err("each strategy entry must be an object".into()));
            };
            let Some(name) = fields.get("name").and_then(Json::as_str) else {
                return Err(err("a strategy entry has no \"name\"".into()));
            };
            if !known.contains(&name) {
                out.warnings
                    .push(format!("Warning: {}: unknown strategy {name} ignored", path.display()));
                continue;
            }
            let mut c = StrategyConfig {
                name: name.to_string(),
                enabled: None,
                options: BTreeMap::new(),
            };
            for (k, v) in fields {
                match (k.as_str(), v) {
                    ("name", _) => {}
                    ("enabled", Json::Bool(b)) => c.enabled = Some(*b),
                    ("enabled", other) => return Err(err(format!("\"enabled\" must be true or false, got {other}"))),
                    (_, Json::String(s)) => {
                        c.options.insert(k.clone(), s.clone());
                    }
                    (_, other) => {
                        c.options.insert(k.clone(), other.to_string());
                    }
                }
            }
            out.strategies.push(c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
    "config": {
        "timeout": 10
    },
    "strategies": [
        { "name": "fixed", "enabled": true, "size": 1000 },
        { "name": "direct", "enabled": false },
        { "name": "trivial", "enabled": true },
        { "name": "search", "enabled": false }
    ]
}"#;

    #[test]
    fn example_file() {
        let c = parse_config(EXAMPLE, Path::new("quickcheck.json")).unwrap();
        assert_eq!(c.timeout, Duration::from_secs(10));
        let (set, warnings) = c.strategy_set();
        assert!(warnings.is_empty());
        assert!(set.is_enabled("fixed") && set.is_enabled("trivial"));
        assert!(!set.is_enabled("direct") && !set.is_enabled("search"));
        assert_eq!(set.get("fixed").unwrap().describe(), "fixed (size 1000)");
    }

    #[test]
    fn partial_files_keep_defaults() {
        let c = parse_config(r#"{"config": {"timeout": 3}}"#, Path::new("q.json")).unwrap();
        assert_eq!(c.timeout, Duration::from_secs(3));
        let (set, _) = c.strategy_set();
        assert_eq!(set.enabled().count(), 5);
        assert_eq!(parse_config("{}", Path::new("q.json")).unwrap().timeout, DEFAULT_TIMEOUT);
    }

    #[test]
    fn unknown_strategies_warn() {
        let c = parse_config(r#"{"strategies": [{"name": "magic"}]}"#, Path::new("q.json")).unwrap();
        assert!(c.strategies.is_empty());
        assert_eq!(c.warnings.len(), 1);
    }

    #[test]
    fn syntax_errors_name_the_position() {
        let e = parse_config("{\n  \"config\": {,\n}", Path::new("bad.json")).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("bad.json") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn lookup_order() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(load_config(dir.path()).unwrap(), ToolConfig::default());
        std::fs::write(dir.path().join("quickcheck.json"), r#"{"config":{"timeout":2}}"#).unwrap();
        assert_eq!(load_config(dir.path()).unwrap().timeout, Duration::from_secs(2));
        std::fs::create_dir(dir.path().join(".vscode")).unwrap();
        std::fs::write(dir.path().join(".vscode/quickcheck.json"), r#"{"config":{"timeout":5}}"#).unwrap();
        assert_eq!(load_config(dir.path()).unwrap().timeout, Duration::from_secs(5));
    }
}
