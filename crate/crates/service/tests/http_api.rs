use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use nfdb_core::{ingest_str, Store, SEED};
use nfdb_service::http::router;
use serde_json::Value;
use tower::ServiceExt;

fn app() -> axum::Router {
    let mut store = Store::new();
    ingest_str(&mut store, SEED);
    router(Arc::new(store))
}

async fn get(app: &axum::Router, uri: &str) -> (StatusCode, String) {
    let resp = app
        .clone()
        .oneshot(Request::builder().uri(uri).body(Body::empty()).unwrap())
        .await
        .unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn get_json(app: &axum::Router, uri: &str) -> (StatusCode, Value) {
    let (s, body) = get(app, uri).await;
    (s, serde_json::from_str(&body).unwrap())
}

#[tokio::test]
async fn smallest_quartics_search() {
    let app = app();
    let (status, v) = get_json(&app, "/api/fields?degree=4&absdisc_max=250&sort=rd").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["complete"], true);
    assert_eq!(v["count"], 6);
    assert_eq!(v["banner"], "Results below are proven complete");
    let rows = v["rows"].as_array().unwrap();
    let rd: Vec<&str> = rows.iter().map(|r| r["rd"].as_str().unwrap()).collect();
    assert_eq!(rd, ["3.29", "3.34", "3.46", "3.71", "3.87", "3.89"]);
    assert_eq!(rows[0]["grd_exact"], "3^{1/2} 13^{1/2}");
    assert_eq!(rows[5]["rd_exact"], "229^{1/4}");
    assert_eq!(rows[5]["ramified_primes"], serde_json::json!([229]));
    assert!(v["trace"].as_array().unwrap().len() > 1);
}

#[tokio::test]
async fn filters_and_errors() {
    let app = app();
    let (_, v) = get_json(&app, "/api/fields?degree=4&group=4T5&absdisc_max=250").await;
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    let (_, v) = get_json(&app, "/api/fields?degree=4&ram=3:2-2&ram=13:0-0&sort=grd").await;
    let grd: Vec<&str> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["grd"].as_str().unwrap())
        .collect();
    assert_eq!(grd, ["3.46", "3.87"]);
    let (_, v) = get_json(&app, "/api/fields?degree=4&display=narrow").await;
    assert_eq!(v["rows"][0]["h"], "1");
    for bad in [
        "/api/fields?degree=4&absdisc_max=abc",
        "/api/fields?ram=3-5:2-1",
        "/api/fields?bogus=1",
        "/api/summary?family=2",
        "/api/mass?n=8&p=2",
        "/api/grd?content=2:[3,2]",
    ] {
        let (status, v) = get_json(&app, bad).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{bad}");
        assert!(v["error"].as_str().is_some());
    }
    let (status, v) = get_json(&app, "/api/fields?degree=7").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["count"], 0);
}

#[tokio::test]
async fn polynomial_download() {
    let app = app();
    let (status, body) = get(&app, "/api/fields.txt?degree=4&absdisc_max=250&sort=rd").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body.lines().count(), 6);
    assert_eq!(body.lines().last(), Some("x^4 - x + 1"));
}

#[tokio::test]
async fn other_endpoints() {
    let app = app();
    let (_, v) = get_json(&app, "/api/summary?group=S4&family=229&grd_cut=16").await;
    assert_eq!(v["min_rd"]["decimal"], "3.89");
    assert_eq!(v["min_rd"]["exact"], "229^{1/4}");
    assert_eq!(v["families"][0]["count"], 1);
    let (_, v) = get_json(&app, "/api/mass?n=5&p=7").await;
    assert_eq!(
        v["local"]["masses"],
        serde_json::json!(["1", "1", "2", "2", "1"])
    );
    assert_eq!(v["local"]["total"]["exact"], "7");
    let (_, v) = get_json(
        &app,
        "/api/grd?content=2:[2,2,3,7/2,7/2,15/4]&content=5:[]_7",
    )
    .await;
    assert_eq!(v["exact"], "2^{111/32} 5^{6/7}");
    assert_eq!(v["decimal"], "43.99");
    let (status, v) = get_json(&app, "/api/health").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["records"], 6);
}

#[tokio::test]
async fn responses_are_repeatable() {
    let app = app();
    let uri = "/api/fields?degree_min=1&sort=grd&ram=2-13:1-9:z";
    let (_, a) = get(&app, uri).await;
    let (_, b) = get(&app, uri).await;
    assert_eq!(a, b);
}
