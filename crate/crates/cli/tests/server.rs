use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, String) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or_else(Body::empty, |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn json_call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (s, text) = call(app, method, uri, body).await;
    (s, serde_json::from_str(&text).unwrap())
}

fn chain3() -> Value {
    json!({"modes":["1","2","3"],"edges":[{"u":"1","v":"2","w":"1"},{"u":"2","v":"3","w":"1"}]})
}

#[tokio::test]
async fn session_round_trip() {
    let app = cvgraph_cli::server::router(None);
    let (s, created) = json_call(&app, "POST", "/api/session", Some(json!({ "graph": chain3() }))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(created["id"], "1");
    assert_eq!(created["history"], json!([]));

    let (s, after) =
        json_call(&app, "POST", "/api/session/1/measure", Some(json!({"vertex":"2","basis":"x"}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(after["graph"], json!({"modes":["1","3"],"edges":[]}));
    assert_eq!(after["history"][0]["action"], "2:x@m1");
    assert_eq!(after["byproducts"].as_array().unwrap().len(), 2);

    let (_, shown) = json_call(&app, "GET", "/api/session/1", None).await;
    assert_eq!(shown, after);

    let (s, dot) = call(&app, "GET", "/api/session/1/dot", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(dot, "graph G {\n  \"1\";\n  \"3\";\n}\n");

    let (s, back) = json_call(&app, "POST", "/api/session/1/undo", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(back, created);
    let (s, _) = json_call(&app, "POST", "/api/session/1/undo", None).await;
    assert_eq!(s, StatusCode::CONFLICT);
}

#[tokio::test]
async fn session_matches_cli_apply() {
    let app = cvgraph_cli::server::router(None);
    json_call(&app, "POST", "/api/session", Some(json!({ "graph": chain3() }))).await;
    let (_, state) = json_call(
        &app,
        "POST",
        "/api/session/1/measure",
        Some(json!({"vertex":"2","basis":"theta:1","outcome":"m"})),
    )
    .await;

    let dir = tempfile::TempDir::new().unwrap();
    let g = dir.path().join("g.json");
    std::fs::write(&g, chain3().to_string()).unwrap();
    let mut out = Vec::new();
    let code = cvgraph_cli::run(
        ["cvgraph", "apply", "--graph", g.to_str().unwrap(), "--measure", "2:theta:1@m"],
        &mut out,
        &mut Vec::new(),
    );
    assert_eq!(code, 0);
    let cli: Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(state["graph"], cli["graph"]);
    assert_eq!(state["byproducts"], cli["byproducts"]);
}

#[tokio::test]
async fn lc_and_errors() {
    let app = cvgraph_cli::server::router(None);
    json_call(&app, "POST", "/api/session", Some(json!({ "graph": chain3() }))).await;
    let (s, st) = json_call(&app, "POST", "/api/session/1/lc", Some(json!({"vertex":"2","delta":"1/2"}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(st["graph"]["edges"].as_array().unwrap().len(), 3);
    assert_eq!(st["history"][0], json!({"op":"lc","vertex":"2","delta":"1/2"}));

    let (s, e) = json_call(&app, "POST", "/api/session/1/measure", Some(json!({"vertex":"9","basis":"x"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(e["error"], "unknown vertex 9");
    let (s, _) = json_call(&app, "GET", "/api/session/42", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) =
        json_call(&app, "POST", "/api/session", Some(json!({"graph":{"modes":["1","1"],"edges":[]}}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (_, second) = json_call(&app, "POST", "/api/session", Some(json!({ "graph": chain3() }))).await;
    assert_eq!(second["id"], "2");
}

#[tokio::test]
async fn static_files_are_served() {
    let dir = tempfile::TempDir::new().unwrap();
    std::fs::write(dir.path().join("index.html"), "<p>hi</p>").unwrap();
    let app = cvgraph_cli::server::router(Some(dir.path().to_path_buf()));
    let (s, body) = call(&app, "GET", "/index.html", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(body, "<p>hi</p>");
}
