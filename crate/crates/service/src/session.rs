//! One uploaded dataset with its layout, embedding and accepted rules.

use serde::{Deserialize, Serialize};

use epc_core::data::{Dataset, LabelColumn, LoadOptions, PaddingPolicy};
use epc_core::geometry::{EllipseSpec, LayoutConfig, LayoutFingerprint, LayoutMode};
use epc_core::pipeline::{layout_config, prepare, project, PrepareOptions, Projection};
use epc_core::rules::{
    accept_rule, classify, evaluate_rect, mine_from, rebase, DominanceRule, Evaluation, MatchMode, MiningParams, Rect,
    RuleSetReport, Target,
};
use epc_core::scene::{build_scene, Scene, SceneOptions};

use crate::error::ApiError;

pub const SNAPSHOT_VERSION: u32 = 1;

/// How an upload is read and prepared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DatasetOptions {
    pub label_column: Option<String>,
    pub header: bool,
    pub padding: PaddingPolicy,
    pub normalize: bool,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        DatasetOptions { label_column: None, header: true, padding: PaddingPolicy::DuplicateLast, normalize: true }
    }
}

impl DatasetOptions {
    pub fn prepare(&self) -> PrepareOptions {
        PrepareOptions {
            load: LoadOptions {
                label: self.label_column.as_deref().map(LabelColumn::parse).unwrap_or_default(),
                header: self.header,
                skip_incomplete: false,
            },
            padding: self.padding,
            normalize: self.normalize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub id: u64,
    pub n: usize,
    pub classes: Vec<String>,
    pub case_count: usize,
}

/// Everything needed to rebuild a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Snapshot {
    pub version: u32,
    pub options: DatasetOptions,
    pub raw: Dataset,
    pub layout: LayoutConfig,
    pub ellipse: EllipseSpec,
    pub fingerprint: LayoutFingerprint,
    pub target: Target,
    pub rules: Vec<DominanceRule>,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub options: DatasetOptions,
    pub raw: Dataset,
    pub proj: Projection,
    pub target: Target,
    pub rules: Vec<DominanceRule>,
    /// Cases no accepted rule has claimed, in rule order.
    pub active: Vec<bool>,
}

impl Session {
    pub fn new(
        raw: Dataset,
        options: DatasetOptions,
        mode: LayoutMode,
        weights: Option<Vec<f64>>,
        ellipse: EllipseSpec,
    ) -> Result<Self, ApiError> {
        let data = prepare(&raw, &options.prepare())?;
        let config = layout_config(mode, data.n(), weights);
        let proj = project(data, config, ellipse)?;
        let active = vec![true; proj.embedded.graphs.len()];
        Ok(Session { options, raw, proj, target: Target::Multiclass, rules: vec![], active })
    }

    pub fn summary(&self, id: u64) -> Summary {
        Summary {
            id,
            n: self.proj.data.n(),
            classes: self.proj.embedded.classes.clone(),
            case_count: self.proj.embedded.graphs.len(),
        }
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }

    pub fn scene(&self, opts: &SceneOptions) -> Result<Scene, ApiError> {
        let opts = SceneOptions { labels: self.proj.data.columns.clone(), ..opts.clone() };
        let e = &self.proj.embedded;
        Ok(build_scene(&self.proj.layout, &e.graphs, &e.classes, &self.rules, &opts)?)
    }

    /// Dry run of `accept`.
    pub fn evaluate(&self, rect: &Rect, mode: MatchMode) -> Result<Evaluation, ApiError> {
        rect.validate().map_err(|e| ApiError::bad_request(e.to_string()))?;
        let cases = self.proj.cases(&self.target)?;
        Ok(evaluate_rect(rect, mode, &cases, &self.active))
    }

    pub fn accept(&mut self, rect: Rect, mode: MatchMode) -> Result<DominanceRule, ApiError> {
        rect.validate().map_err(|e| ApiError::bad_request(e.to_string()))?;
        let id = self.next_rule_id();
        let cases = self.proj.cases(&self.target)?;
        let rule = accept_rule(&cases, &mut self.active, rect, mode, id)?;
        self.rules.push(rule.clone());
        Ok(rule)
    }

    /// Removes a rule and replays the rest on the enlarged active set.
    pub fn delete(&mut self, rule_id: usize) -> Result<(), ApiError> {
        let k = self
            .rules
            .iter()
            .position(|r| r.id == rule_id)
            .ok_or_else(|| ApiError::not_found(format!("no rule {rule_id}")))?;
        self.rules.remove(k);
        self.rebase()
    }

    pub fn mine(&mut self, params: &MiningParams) -> Result<Vec<DominanceRule>, ApiError> {
        if params.target != self.target {
            if !self.rules.is_empty() {
                return Err(ApiError::conflict(
                    "accepted rules were built for another target; delete them before mining with a new one",
                ));
            }
            self.target = params.target.clone();
        }
        let cases = self.proj.cases(&self.target)?;
        let first = self.next_rule_id();
        let found = mine_from(&cases, &mut self.active, params, first)?;
        self.rules.extend(found.iter().cloned());
        Ok(found)
    }

    pub fn report(&self) -> Result<RuleSetReport, ApiError> {
        let cases = self.proj.cases(&self.target)?;
        Ok(classify(&cases, &self.rules).report)
    }

    /// Re-embeds under new weights. Rules no longer apply and are dropped;
    /// returns how many were.
    pub fn set_weights(&mut self, weights: Vec<f64>) -> Result<usize, ApiError> {
        let config = LayoutConfig { weights: Some(weights), ..self.proj.layout.config().clone() };
        let proj = project(self.proj.data.clone(), config, *self.proj.layout.ellipse())?;
        let dropped = self.rules.len();
        self.active = vec![true; proj.embedded.graphs.len()];
        self.proj = proj;
        self.rules.clear();
        Ok(dropped)
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            version: SNAPSHOT_VERSION,
            options: self.options.clone(),
            raw: self.raw.clone(),
            layout: self.proj.layout.config().clone(),
            ellipse: *self.proj.layout.ellipse(),
            fingerprint: self.proj.layout.fingerprint(),
            target: self.target.clone(),
            rules: self.rules.clone(),
        }
    }

    pub fn restore(snap: Snapshot) -> Result<Self, ApiError> {
        if snap.version != SNAPSHOT_VERSION {
            return Err(ApiError::bad_request(format!("unsupported snapshot version {}", snap.version)));
        }
        let data = prepare(&snap.raw, &snap.options.prepare())?;
        let proj = project(data, snap.layout, snap.ellipse)?;
        if proj.layout.fingerprint() != snap.fingerprint {
            return Err(ApiError::conflict("snapshot layout fingerprint does not match the rebuilt layout"));
        }
        let active = vec![true; proj.embedded.graphs.len()];
        let mut s = Session { options: snap.options, raw: snap.raw, proj, target: snap.target, rules: snap.rules, active };
        s.rebase()?;
        Ok(s)
    }

    fn rebase(&mut self) -> Result<(), ApiError> {
        let cases = self.proj.cases(&self.target)?;
        let (rules, active) = rebase(&cases, &self.rules);
        self.rules = rules;
        self.active = active;
        Ok(())
    }

    fn next_rule_id(&self) -> usize {
        self.rules.iter().map(|r| r.id).max().map_or(1, |m| m + 1)
    }
}
