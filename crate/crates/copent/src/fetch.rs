//! Download of the files listed in a manifest.
//!
//! A manifest is a text file with one URL per line; blank lines and lines
//! starting with `#` are ignored. Each file is saved under the destination
//! directory by the last segment of its URL path. A file already present with
//! the size the server reports is skipped. Downloads go to a temporary name
//! and are renamed into place when complete, so an interrupted run never
//! leaves a partial file under the final name. Failures are collected per
//! file; one bad URL does not stop the others.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;
use std::time::Duration;

use crate::error::{Error, Result};

pub const DEFAULT_PARALLELISM: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FetchStatus {
    Downloaded,
    Skipped,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchOutcome {
    pub url: String,
    pub path: PathBuf,
    pub status: FetchStatus,
}

#[derive(Debug, Clone, Default)]
pub struct FetchReport {
    /// In manifest order.
    pub outcomes: Vec<FetchOutcome>,
}

impl FetchReport {
    /// Local paths of every file now present, in manifest order.
    pub fn paths(&self) -> Vec<PathBuf> {
        self.outcomes
            .iter()
            .filter(|o| !matches!(o.status, FetchStatus::Failed(_)))
            .map(|o| o.path.clone())
            .collect()
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &str)> {
        self.outcomes.iter().filter_map(|o| match &o.status {
            FetchStatus::Failed(msg) => Some((o.url.as_str(), msg.as_str())),
            _ => None,
        })
    }
}

pub fn parse_manifest(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

pub fn file_name_for(url: &str) -> Option<String> {
    let path = url.split(['?', '#']).next()?;
    let after_scheme = path.split_once("://").map_or(path, |(_, rest)| rest);
    let (_, tail) = after_scheme.split_once('/')?;
    let name = tail.rsplit('/').next()?;
    (!name.is_empty() && name != "." && name != "..").then(|| name.to_string())
}

fn agent() -> ureq::Agent {
    ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(600)))
        .build()
        .into()
}

fn remote_size(agent: &ureq::Agent, url: &str) -> Option<u64> {
    let resp = agent.head(url).call().ok()?;
    resp.headers().get("content-length")?.to_str().ok()?.parse().ok()
}

fn fetch_one(agent: &ureq::Agent, url: &str, dest: &Path) -> (PathBuf, FetchStatus) {
    let Some(name) = file_name_for(url) else {
        return (dest.to_path_buf(), FetchStatus::Failed("URL has no file name".into()));
    };
    let path = dest.join(&name);
    if let Ok(meta) = fs::metadata(&path) {
        if remote_size(agent, url) == Some(meta.len()) {
            return (path, FetchStatus::Skipped);
        }
    }
    let tmp = dest.join(format!(".{name}.part"));
    let result = (|| -> std::result::Result<(), String> {
        let mut resp = agent.get(url).call().map_err(|e| e.to_string())?;
        let mut file = fs::File::create(&tmp).map_err(|e| e.to_string())?;
        io::copy(&mut resp.body_mut().as_reader(), &mut file).map_err(|e| e.to_string())?;
        file.sync_all().map_err(|e| e.to_string())?;
        fs::rename(&tmp, &path).map_err(|e| e.to_string())
    })();
    match result {
        Ok(()) => (path, FetchStatus::Downloaded),
        Err(msg) => {
            let _ = fs::remove_file(&tmp);
            (path, FetchStatus::Failed(msg))
        }
    }
}

/// Downloads every URL into `dest` with at most `parallelism` concurrent
/// transfers. Only a missing or uncreatable destination is a hard error.
pub fn fetch_all(urls: &[String], dest: impl AsRef<Path>, parallelism: usize) -> Result<FetchReport> {
    let dest = dest.as_ref();
    fs::create_dir_all(dest).map_err(|e| Error::io(dest, e))?;
    let agent = agent();
    let slots: Vec<OnceLock<FetchOutcome>> = urls.iter().map(|_| OnceLock::new()).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..parallelism.clamp(1, urls.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(url) = urls.get(i) else { break };
                let (path, status) = fetch_one(&agent, url, dest);
                let _ = slots[i].set(FetchOutcome {
                    url: url.clone(),
                    path,
                    status,
                });
            });
        }
    });
    Ok(FetchReport {
        outcomes: slots.into_iter().filter_map(OnceLock::into_inner).collect(),
    })
}
