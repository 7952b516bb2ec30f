//! `key = value` parameter files. Keys are the long flag names of the
//! subcommand; the file's settings are spliced into the argument list ahead
//! of the real flags so that anything given on the command line wins.

use std::ffi::OsString;

use crate::CliError;

/// Parses the file text into (key, value) pairs, rejecting keys that are not
/// flags of the subcommand.
pub fn parse(text: &str, allowed: &[String]) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::Lib(minsurf::Error::Input { line: k + 1, msg });
        let Some((key, value)) = line.split_once('=') else {
            return Err(bad(format!("expected `key = value`, found '{line}'")));
        };
        let (key, value) = (key.trim(), value.trim());
        if key == "params" {
            return Err(bad("parameter files cannot include other files".into()));
        }
        if !allowed.iter().any(|a| a == key) {
            return Err(bad(format!("unknown key '{key}' (allowed: {})", allowed.join(", "))));
        }
        if value.is_empty() {
            return Err(bad(format!("key '{key}' has no value")));
        }
        out.push((key.to_string(), value.to_string()));
    }
    Ok(out)
}

/// Inserts `--key value` pairs right after the subcommand name.
pub fn splice(args: &[OsString], subcommand: &str, pairs: &[(String, String)]) -> Vec<OsString> {
    let at = args
        .iter()
        .position(|a| a == subcommand)
        .map_or(args.len(), |p| p + 1);
    let mut out = args[..at].to_vec();
    for (k, v) in pairs {
        out.push(format!("--{k}").into());
        out.push(v.into());
    }
    out.extend_from_slice(&args[at..]);
    out
}
