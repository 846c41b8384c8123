//! Plan execution against a page driver, with snapshot caching.
//!
//! Every loop is bounded: expansion re-scans stop at the configured depth,
//! next-clicks stop at their repeat budget or at the first click that
//! leaves the DOM unchanged (a fixed point, which looping pagers hit
//! immediately), and a global action budget caps everything else.

use std::collections::HashSet;

use super::driver::PageDriver;
use super::pagination::{locate_control, NEXT_LABELS};
use super::{find_expansion_links, plan_interactions, Action, ActionKind, InteractionPlan, LinkKind, Limits, LinkLexicon};
use crate::error::Result;
use crate::snapshot::{content_digest, SnapshotStore};

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    /// Snapshots cached by this run, initial state first.
    pub snapshot_ids: Vec<String>,
    /// Per-action failures; the run continues past them.
    pub errors: Vec<String>,
}

pub fn run_plan(
    driver: &mut dyn PageDriver,
    plan: &InteractionPlan,
    store: &mut SnapshotStore,
    lex: &LinkLexicon,
    limits: &Limits,
) -> Result<RunReport> {
    let mut session = Session {
        driver,
        store,
        lex,
        limits,
        actions_used: 0,
        last_snapshot: None,
        report: RunReport::default(),
    };
    session.snapshot("initial")?;
    session.execute(plan, 0)?;
    Ok(session.report)
}

struct Session<'a> {
    driver: &'a mut dyn PageDriver,
    store: &'a mut SnapshotStore,
    lex: &'a LinkLexicon,
    limits: &'a Limits,
    actions_used: usize,
    last_snapshot: Option<String>,
    report: RunReport,
}

impl<'a> Session<'a> {
    fn budget_left(&self) -> bool {
        self.actions_used < self.limits.max_actions
    }

    fn snapshot(&mut self, action: &str) -> Result<()> {
        let html = self.driver.current_html().to_string();
        let url = self.driver.current_url().to_string();
        let (id, new) = self
            .store
            .write(&html, Some(url), self.last_snapshot.clone(), Some(action.to_string()))?;
        if new {
            self.report.snapshot_ids.push(id.clone());
        }
        self.last_snapshot = Some(id);
        Ok(())
    }

    /// Click an element, settle, and snapshot when the DOM changed.
    /// Returns whether the DOM changed; failures are recorded, not fatal.
    fn click_and_snapshot(&mut self, xpath: &str, label: &str) -> Result<bool> {
        self.actions_used += 1;
        let before = content_digest(self.driver.current_html());
        if let Err(e) = self.driver.click(xpath) {
            self.report.errors.push(format!("{label} {xpath}: {e}"));
            return Ok(false);
        }
        if let Err(e) = self.driver.settle() {
            self.report.errors.push(format!("settle after {label}: {e}"));
            return Ok(false);
        }
        let after = content_digest(self.driver.current_html());
        if after == before {
            return Ok(false);
        }
        self.snapshot(label)?;
        Ok(true)
    }

    fn execute(&mut self, plan: &InteractionPlan, redirect_depth: usize) -> Result<()> {
        let of_kind = |kind: ActionKind| -> Vec<Action> {
            plan.actions.iter().filter(|a| a.kind == kind).cloned().collect()
        };

        if redirect_depth == 0 {
            for action in of_kind(ActionKind::FollowRedirect) {
                if !self.budget_left() {
                    return Ok(());
                }
                self.follow_redirect(&action.target)?;
            }
        }

        self.run_expansions(of_kind(ActionKind::Expand))?;

        for action in &plan.actions {
            if !self.budget_left() {
                return Ok(());
            }
            match action.kind {
                ActionKind::All => {
                    self.click_and_snapshot(&action.target, "all")?;
                }
                ActionKind::GotoPage => {
                    self.click_and_snapshot(&action.target, "goto_page")?;
                }
                ActionKind::Next => {
                    self.next_loop(&action.target, action.max_repeats)?;
                }
                ActionKind::Expand | ActionKind::FollowRedirect => {}
            }
        }
        Ok(())
    }

    /// Load a redirect target, collect it as its own sub-plan (redirects
    /// inside the sub-page are not followed further), then come back.
    fn follow_redirect(&mut self, url: &str) -> Result<()> {
        let origin = self.driver.current_url().to_string();
        self.actions_used += 1;
        if let Err(e) = self.driver.load(url) {
            self.report.errors.push(format!("redirect {url}: {e}"));
            return Ok(());
        }
        if let Err(e) = self.driver.settle() {
            self.report.errors.push(format!("settle after redirect {url}: {e}"));
        }
        self.snapshot(&format!("redirect {url}"))?;
        match self.driver.current_dom() {
            Ok(dom) => {
                let sub = plan_interactions(&dom, self.lex, self.limits);
                self.execute(&sub, 1)?;
            }
            Err(e) => self.report.errors.push(format!("parse after redirect {url}: {e}")),
        }
        if let Err(e) = self.driver.load(&origin) {
            self.report.errors.push(format!("return to {origin}: {e}"));
        }
        Ok(())
    }

    /// Click the known expansion targets, then re-scan the grown DOM for
    /// controls the clicks injected, up to the expansion depth limit.
    fn run_expansions(&mut self, initial: Vec<Action>) -> Result<()> {
        let mut pending: Vec<String> = initial.into_iter().map(|a| a.target).collect();
        let mut clicked: HashSet<String> = HashSet::new();
        let mut round = 0;
        while !pending.is_empty() && round < self.limits.max_expand_depth {
            for xpath in std::mem::take(&mut pending) {
                if !self.budget_left() {
                    return Ok(());
                }
                clicked.insert(xpath.clone());
                self.click_and_snapshot(&xpath, "expand")?;
            }
            round += 1;
            if round >= self.limits.max_expand_depth {
                break;
            }
            match self.driver.current_dom() {
                Ok(dom) => {
                    pending = find_expansion_links(&dom, self.lex)
                        .into_iter()
                        .filter(|l| l.kind == LinkKind::Expand && !clicked.contains(&l.xpath))
                        .map(|l| l.xpath)
                        .collect();
                }
                Err(e) => {
                    self.report.errors.push(format!("parse during expansion: {e}"));
                    break;
                }
            }
        }
        Ok(())
    }

    /// Repeatedly click "next", re-locating it inside the stored container
    /// xpath on every new page state. Stops on the repeat budget, a missing
    /// control, a click failure, or a DOM fixed point.
    fn next_loop(&mut self, container_xpath: &str, max_repeats: usize) -> Result<()> {
        for _ in 0..max_repeats.min(self.limits.max_pages) {
            if !self.budget_left() {
                return Ok(());
            }
            let dom = match self.driver.current_dom() {
                Ok(d) => d,
                Err(e) => {
                    self.report.errors.push(format!("parse during pagination: {e}"));
                    return Ok(());
                }
            };
            let Some(next_xpath) = locate_control(&dom, container_xpath, NEXT_LABELS) else {
                return Ok(());
            };
            if !self.click_and_snapshot(&next_xpath, "next")? {
                return Ok(());
            }
        }
        Ok(())
    }
}
