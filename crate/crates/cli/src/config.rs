// SPDX-License-Identifier: Apache-2.0

//! Optional JSON config files. Keys mirror the long flag names of the
//! subcommand (`"group-size": 64`); a flag given on the command line wins
//! over the same key in the file.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Overlays every flag present in `cli` onto the object in `path`.
pub fn merge<T: Serialize + DeserializeOwned>(cli: T, path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(cli);
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut file: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let Value::Object(ref mut merged) = file else {
        return Err(CliError::Usage(format!("{}: expected a JSON object", path.display())));
    };
    let Value::Object(flags) = serde_json::to_value(&cli).expect("flags serialize") else {
        unreachable!("flag structs serialize to objects");
    };
    for (k, v) in flags {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(file).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
