//! TOML readers and writers for networks, scenario trees and plans.
//!
//! The on-disk formats mirror the in-memory types field for field; see
//! `docs/formats.md` for the documented schemas. Loading always validates.

use std::path::Path;

use crate::error::CoreError;
use crate::network::Network;
use crate::plan::InvestmentPlan;
use crate::tree::ScenarioTree;

fn read(path: &Path) -> Result<String, CoreError> {
    std::fs::read_to_string(path).map_err(|source| CoreError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CoreError> {
    std::fs::write(path, contents).map_err(|source| CoreError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_err(path: &Path, err: toml::de::Error) -> CoreError {
    CoreError::Parse {
        path: path.to_path_buf(),
        message: err.message().to_string(),
    }
}

pub fn load_network(path: impl AsRef<Path>) -> Result<Network, CoreError> {
    let path = path.as_ref();
    let network: Network = toml::from_str(&read(path)?).map_err(|e| parse_err(path, e))?;
    network.validate()?;
    Ok(network)
}

pub fn save_network(network: &Network, path: impl AsRef<Path>) -> Result<(), CoreError> {
    write(path.as_ref(), &toml::to_string_pretty(network).expect("network serializes"))
}

pub fn load_tree(path: impl AsRef<Path>) -> Result<ScenarioTree, CoreError> {
    let path = path.as_ref();
    let tree: ScenarioTree = toml::from_str(&read(path)?).map_err(|e| parse_err(path, e))?;
    tree.validate()?;
    Ok(tree)
}

pub fn save_tree(tree: &ScenarioTree, path: impl AsRef<Path>) -> Result<(), CoreError> {
    write(path.as_ref(), &toml::to_string_pretty(tree).expect("tree serializes"))
}

pub fn load_plan(path: impl AsRef<Path>) -> Result<InvestmentPlan, CoreError> {
    let path = path.as_ref();
    toml::from_str(&read(path)?).map_err(|e| parse_err(path, e))
}

pub fn save_plan(plan: &InvestmentPlan, path: impl AsRef<Path>) -> Result<(), CoreError> {
    write(path.as_ref(), &toml::to_string_pretty(plan).expect("plan serializes"))
}
