//! The page-driver contract and a deterministic scripted-DOM simulator.
//!
//! A driver owns one rendered page session: it loads URLs, clicks elements
//! by positional xpath, and exposes the current page source after dynamic
//! updates settle. The simulator realizes the contract as a state machine
//! over fixture files, which makes interaction behaviour fully testable
//! without a browser.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dom::{parse_html_with_url, Document};
use crate::error::{Error, Result};

pub trait PageDriver {
    fn load(&mut self, url: &str) -> Result<()>;

    /// Click the element at a positional xpath. Clicking an element that
    /// does not exist in the current DOM is an error; clicking an inert
    /// element is not (the DOM simply does not change).
    fn click(&mut self, xpath: &str) -> Result<()>;

    /// Optional capability: choose an option value inside a select box.
    fn select(&mut self, _xpath: &str, _value: &str) -> Result<()> {
        Err(Error::Unsupported("select".into()))
    }

    /// Wait until dynamic updates quiesce.
    fn settle(&mut self) -> Result<()>;

    fn current_url(&self) -> &str;

    fn current_html(&self) -> &str;

    fn current_dom(&self) -> Result<Document> {
        parse_html_with_url(self.current_html(), Some(self.current_url().to_string()))
    }
}

/// One scripted transition: clicking `click` while in `state` moves the
/// session to `next_state`, whose markup lives in `html`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Transition {
    pub state: String,
    pub click: String,
    pub next_state: String,
    pub html: String,
}

/// Deterministic driver over a fixture directory holding `initial.html`
/// and `transitions.json`.
pub struct SimulatorDriver {
    states: HashMap<String, String>,
    transitions: Vec<Transition>,
    current: String,
    /// Clicks performed, for assertions and budget accounting.
    pub clicks: usize,
}

pub const INITIAL_STATE: &str = "initial";

impl SimulatorDriver {
    /// Load a fixture directory. The initial state comes from
    /// `initial.html` (or `page.html`); every other `.html` file becomes a
    /// loadable state named by its file stem, so redirect targets resolve.
    pub fn from_fixture(dir: &Path) -> Result<SimulatorDriver> {
        let initial_file = ["initial.html", "page.html"]
            .iter()
            .map(|f| dir.join(f))
            .find(|p| p.exists())
            .ok_or_else(|| {
                Error::Fixture(format!("{}: no initial.html or page.html", dir.display()))
            })?;
        let initial = std::fs::read_to_string(&initial_file)?;
        let mut states = HashMap::new();
        states.insert(INITIAL_STATE.to_string(), initial);
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "html") && path != initial_file {
                let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
                states.insert(stem, std::fs::read_to_string(&path)?);
            }
        }

        let transitions_path = dir.join("transitions.json");
        let transitions: Vec<Transition> = if transitions_path.exists() {
            let raw = std::fs::read_to_string(&transitions_path)?;
            serde_json::from_str(&raw)
                .map_err(|e| Error::Fixture(format!("transitions.json: {e}")))?
        } else {
            Vec::new()
        };
        for t in &transitions {
            if !states.contains_key(&t.next_state) {
                let html = std::fs::read_to_string(dir.join(&t.html))
                    .map_err(|e| Error::Fixture(format!("{}: {e}", t.html)))?;
                states.insert(t.next_state.clone(), html);
            }
        }
        Ok(SimulatorDriver {
            states,
            transitions,
            current: INITIAL_STATE.to_string(),
            clicks: 0,
        })
    }

    /// Build a simulator directly from in-memory state markup.
    pub fn from_states(
        states: HashMap<String, String>,
        transitions: Vec<Transition>,
    ) -> Result<SimulatorDriver> {
        if !states.contains_key(INITIAL_STATE) {
            return Err(Error::Fixture("missing initial state".into()));
        }
        Ok(SimulatorDriver {
            states,
            transitions,
            current: INITIAL_STATE.to_string(),
            clicks: 0,
        })
    }
}

impl PageDriver for SimulatorDriver {
    fn load(&mut self, url: &str) -> Result<()> {
        if self.states.contains_key(url) {
            self.current = url.to_string();
            Ok(())
        } else {
            Err(Error::Driver(format!("unknown state {url:?}")))
        }
    }

    fn click(&mut self, xpath: &str) -> Result<()> {
        let dom = self.current_dom()?;
        if dom.resolve_positional_xpath(xpath).is_none() {
            return Err(Error::Driver(format!(
                "no element at {xpath} in state {:?}",
                self.current
            )));
        }
        self.clicks += 1;
        let hit = self
            .transitions
            .iter()
            .find(|t| t.state == self.current && t.click == xpath);
        if let Some(t) = hit {
            self.current = t.next_state.clone();
        }
        // No matching transition: an inert control; the DOM stays put.
        Ok(())
    }

    fn settle(&mut self) -> Result<()> {
        Ok(())
    }

    fn current_url(&self) -> &str {
        &self.current
    }

    fn current_html(&self) -> &str {
        &self.states[&self.current]
    }
}
