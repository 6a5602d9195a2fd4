//! Dominance rectangles: evaluation, automatic mining by sequential
//! covering, classification, metrics and weight search.

mod classify;
mod eval;
mod mine;
mod optimize;
mod rect;
mod split;

pub use classify::{
    classify, weighted_precision, Classification, ReportRow, ReportTotals, RuleSetReport, RulesDocument, REPORT_VERSION,
    RULES_VERSION, UNCOVERED,
};
pub use eval::{evaluate_rect, rest_label, Cases, Evaluation, Target};
pub use mine::{accept_rule, mine, mine_from, rebase, DominanceRule, MiningParams, ScanGrid};
pub use optimize::{optimize_weights, Objective, OptimizeOptions, OptimizeResult, TraceStep};
pub use rect::{graph_matches, MatchMode, Rect};
pub use split::{evaluate_split, Split, SplitReport};
