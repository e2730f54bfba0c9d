//! JSON dump/load for instances and configs.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::Result;

pub fn save_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{gen_spiked_wigner, SpikedInstance};

    #[test]
    fn spiked_instance_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        let inst = gen_spiked_wigner(6, 2.0, 0.2, 1).unwrap();
        save_json(&inst, &path).unwrap();
        let back: SpikedInstance = load_json(&path).unwrap();
        assert_eq!(back.v, inst.v);
        assert_eq!(back.m.to_dense(), inst.m.to_dense());
    }
}
