//! The service and the command line must produce the same report bytes.

use std::path::Path;
use std::process::Command;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

async fn call(app: &axum::Router, method: Method, uri: &str, body: impl Into<Body>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri).body(body.into()).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

#[tokio::test]
async fn http_report_matches_cli_report() {
    let iris = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/iris.csv");
    let csv = std::fs::read(&iris).unwrap();
    for (mode, w, h, layout) in [("intersect", "0.2", "0.2", "seq"), ("point", "0.15", "0.1", "mirror")] {
        let app = epc_service::router(epc_service::AppState::default(), None);
        let (s, b) = call(&app, Method::POST, &format!("/api/datasets?layout={layout}"), csv.clone()).await;
        assert_eq!(s, StatusCode::CREATED);
        let id = serde_json::from_slice::<Value>(&b).unwrap()["id"].as_u64().unwrap();
        let params = serde_json::json!({
            "mode": mode, "rectW": w.parse::<f64>().unwrap(), "rectH": h.parse::<f64>().unwrap(), "stride": 0.05
        });
        let (s, _) = call(&app, Method::POST, &format!("/api/datasets/{id}/mine"), params.to_string()).await;
        assert_eq!(s, StatusCode::OK);
        let (_, http_report) = call(&app, Method::GET, &format!("/api/datasets/{id}/report"), Body::empty()).await;

        let d = tempfile::tempdir().unwrap();
        let epc = |args: &[&str]| {
            let o = Command::new(env!("CARGO_BIN_EXE_epc")).args(args).current_dir(d.path()).output().unwrap();
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        };
        let path = iris.to_str().unwrap();
        epc(&["mine", path, "--layout", layout, "--mode", mode, "--rect-w", w, "--rect-h", h, "--stride", "0.05", "--out", "r.json"]);
        epc(&["classify", path, "--rules", "r.json", "--out", "report.json"]);
        let cli_report = std::fs::read(d.path().join("report.json")).unwrap();
        assert_eq!(String::from_utf8(http_report).unwrap(), String::from_utf8(cli_report).unwrap(), "{mode} {layout}");
    }
}
