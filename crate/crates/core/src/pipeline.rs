//! Shared steps behind the command line and the HTTP service: load,
//! normalize, pad, project, mine, classify.

use rayon::prelude::*;
use serde::Serialize;

use crate::data::{load_csv, normalize, pad, Dataset, LoadOptions, PaddingPolicy};
use crate::error::{DataError, Error, GeometryError};
use crate::geometry::{EllipseSpec, EpcGraph, Layout, LayoutConfig, LayoutMode};
use crate::rules::{classify, mine, Cases, Classification, DominanceRule, MiningParams, RulesDocument, Target, RULES_VERSION};

/// Graphs of a dataset with the sorted class names their `class` indexes.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedded {
    pub graphs: Vec<EpcGraph>,
    pub classes: Vec<String>,
}

pub fn embed_dataset(ds: &Dataset, layout: &Layout) -> Result<Embedded, GeometryError> {
    let classes = ds.classes();
    let graphs = ds
        .rows
        .par_iter()
        .zip(ds.labels.par_iter())
        .enumerate()
        .map(|(i, (row, label))| {
            let mut g = layout.embed(row).map_err(|e| e.at_row(i + 1))?;
            g.row = i;
            g.class = classes.binary_search(label).expect("label listed");
            Ok(g)
        })
        .collect::<Result<Vec<_>, GeometryError>>()?;
    Ok(Embedded { graphs, classes })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrepareOptions {
    pub load: LoadOptions,
    pub padding: PaddingPolicy,
    /// Off for data already on [0, 1], such as the synthetic sets.
    pub normalize: bool,
}

impl Default for PrepareOptions {
    fn default() -> Self {
        PrepareOptions { load: LoadOptions::default(), padding: PaddingPolicy::DuplicateLast, normalize: true }
    }
}

/// Normalizes (if asked) and pads.
pub fn prepare(raw: &Dataset, opts: &PrepareOptions) -> Result<Dataset, Error> {
    let ds = if opts.normalize {
        normalize(raw)
    } else {
        if let Some((r, c)) = raw
            .rows
            .iter()
            .enumerate()
            .find_map(|(r, row)| row.iter().position(|v| !(0.0..=1.0).contains(v)).map(|c| (r, c)))
        {
            return Err(GeometryError::Domain { coordinate: c + 1, value: raw.rows[r][c] }.at_row(r + 1).into());
        }
        raw.clone()
    };
    Ok(pad(&ds, opts.padding)?)
}

pub fn load_and_prepare(bytes: &[u8], opts: &PrepareOptions) -> Result<(Dataset, Dataset), Error> {
    let raw = load_csv(bytes, &opts.load)?;
    let ds = prepare(&raw, opts)?;
    Ok((raw, ds))
}

/// A prepared dataset with its layout and embedding.
#[derive(Debug, Clone)]
pub struct Projection {
    pub data: Dataset,
    pub layout: Layout,
    pub embedded: Embedded,
}

impl Projection {
    pub fn cases(&self, target: &Target) -> Result<Cases<'_>, Error> {
        Ok(Cases::with_target(&self.embedded.graphs, &self.embedded.classes, target)?)
    }
}

pub fn layout_config(mode: LayoutMode, n: usize, weights: Option<Vec<f64>>) -> LayoutConfig {
    LayoutConfig { weights, ..LayoutConfig::new(mode, n) }
}

pub fn project(data: Dataset, config: LayoutConfig, ellipse: EllipseSpec) -> Result<Projection, Error> {
    if data.n() % 2 == 1 {
        return Err(GeometryError::Layout(format!(
            "{} columns is odd; pad with dup or const:<v>",
            data.n()
        ))
        .into());
    }
    let layout = Layout::new(LayoutConfig { n: data.n(), ..config }, ellipse)?;
    let embedded = embed_dataset(&data, &layout)?;
    Ok(Projection { data, layout, embedded })
}

/// Packs rules with everything needed to apply them to fresh data.
pub fn rules_document(
    proj: &Projection,
    rules: Vec<DominanceRule>,
    params: Option<MiningParams>,
    padding: PaddingPolicy,
    label_column: Option<String>,
) -> RulesDocument {
    RulesDocument {
        version: RULES_VERSION,
        fingerprint: proj.layout.fingerprint(),
        layout: proj.layout.config().clone(),
        ellipse: *proj.layout.ellipse(),
        padding,
        scaling: proj.data.scaling.clone(),
        label_column,
        params,
        rules,
    }
}

pub fn mine_document(
    proj: &Projection,
    params: &MiningParams,
    padding: PaddingPolicy,
    label_column: Option<String>,
) -> Result<RulesDocument, Error> {
    let cases = proj.cases(&params.target)?;
    let rules = mine(&cases, params)?;
    Ok(rules_document(proj, rules, Some(params.clone()), padding, label_column))
}

/// Applies a rules document to raw (unnormalized) data, reusing the stored
/// scaling, padding and layout.
pub fn classify_raw(raw: &Dataset, doc: &RulesDocument) -> Result<Classification, Error> {
    let scaled = match &doc.scaling {
        Some(norm) => {
            let (d, clamped) = norm.apply(raw)?;
            if clamped > 0 {
                log::warn!("{clamped} values fell outside the training range and were clamped");
            }
            d
        }
        None => raw.clone(),
    };
    let data = pad(&scaled, doc.padding)?;
    let layout = Layout::new(doc.layout.clone(), doc.ellipse)?;
    doc.check_fingerprint(&layout.fingerprint())?;
    if data.n() != layout.n() {
        return Err(DataError::Config(format!("rules expect {} columns after padding, data has {}", layout.n(), data.n())).into());
    }
    let emb = embed_dataset(&data, &layout)?;
    let target = doc.params.as_ref().map(|p| p.target.clone()).unwrap_or_default();
    let cases = Cases::with_target(&emb.graphs, &emb.classes, &target)?;
    Ok(classify(&cases, &doc.rules))
}

/// Pretty JSON with a trailing newline; the form every document is written in.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents serialize");
    s.push('\n');
    s
}

pub fn parse_weights(s: &str) -> Result<Vec<f64>, DataError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|w| w.is_finite() && *w > 0.0)
                .ok_or_else(|| DataError::Config(format!("bad weight '{t}'")))
        })
        .collect()
}

/// `cx,cy,W,H`.
pub fn parse_ellipse(s: &str) -> Result<EllipseSpec, Error> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| DataError::Config(format!("bad ellipse value '{t}'"))))
        .collect::<Result<_, _>>()?;
    if v.len() != 4 {
        return Err(DataError::Config("ellipse needs cx,cy,W,H".into()).into());
    }
    Ok(EllipseSpec::new(v[0], v[1], v[2], v[3])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::MatchMode;

    const CSV: &str = "a,b,c,class\n1,2,3,x\n2,4,1,y\n3,6,2,x\n4,1,5,y\n5,3,4,x\n";

    #[test]
    fn prepare_pads_odd_data() {
        let (raw, ds) = load_and_prepare(CSV.as_bytes(), &PrepareOptions::default()).unwrap();
        assert_eq!(raw.n(), 3);
        assert_eq!(ds.n(), 4);
        assert!(ds.rows.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn unpadded_odd_data_is_rejected() {
        let opts = PrepareOptions { padding: PaddingPolicy::None, ..Default::default() };
        let (_, ds) = load_and_prepare(CSV.as_bytes(), &opts).unwrap();
        let err = project(ds, LayoutConfig::new(LayoutMode::Sequential, 0), EllipseSpec::unit()).unwrap_err();
        assert!(matches!(err, Error::Geometry(GeometryError::Layout(_))));
    }

    #[test]
    fn raw_values_outside_unit_need_normalizing() {
        let opts = PrepareOptions { normalize: false, ..Default::default() };
        assert!(load_and_prepare(CSV.as_bytes(), &opts).is_err());
    }

    #[test]
    fn classify_reproduces_mining_stats() {
        let (raw, ds) = load_and_prepare(CSV.as_bytes(), &PrepareOptions::default()).unwrap();
        let proj = project(ds, LayoutConfig::new(LayoutMode::Sequential, 0), EllipseSpec::unit()).unwrap();
        let mut p = MiningParams::new(MatchMode::Point, 0.3, 0.3, 0.05);
        p.min_precision = 1.0;
        let doc = mine_document(&proj, &p, PaddingPolicy::DuplicateLast, None).unwrap();
        let rep = classify_raw(&raw, &doc).unwrap().report;
        for (r, row) in doc.rules.iter().zip(&rep.rows) {
            assert_eq!(r.stats.total_hits, row.covered);
        }
        let text = to_json(&doc);
        let back: RulesDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn changed_layout_is_refused() {
        let (raw, ds) = load_and_prepare(CSV.as_bytes(), &PrepareOptions::default()).unwrap();
        let proj = project(ds, LayoutConfig::new(LayoutMode::Sequential, 0), EllipseSpec::unit()).unwrap();
        let mut doc = mine_document(&proj, &MiningParams::new(MatchMode::Point, 0.3, 0.3, 0.05), PaddingPolicy::DuplicateLast, None).unwrap();
        doc.fingerprint.fractions[0] += 0.01;
        assert!(matches!(classify_raw(&raw, &doc), Err(Error::Rules(crate::RulesError::FingerprintMismatch))));
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_weights("4, 2,6,5").unwrap(), vec![4.0, 2.0, 6.0, 5.0]);
        assert!(parse_weights("1,0").is_err());
        assert_eq!(parse_ellipse("0,0,4,2").unwrap(), EllipseSpec::new(0.0, 0.0, 4.0, 2.0).unwrap());
        assert!(parse_ellipse("0,0,4").is_err());
        assert!(parse_ellipse("0,0,-4,2").is_err());
    }
}
