//! Starts the prediction service on a free local port, then talks to it over
//! plain HTTP: the model catalog, a feature manifest and two predictions.

use std::io::{Read, Write};
use std::net::TcpStream;
use std::sync::Arc;

use mvdd_risk::mvdd::demo_diagram;
use mvdd_risk::service::{router, ServiceState};

fn request(port: u16, method: &str, path: &str, body: &str) -> String {
    let mut stream = TcpStream::connect(("127.0.0.1", port)).unwrap();
    write!(
        stream,
        "{method} {path} HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    let (head, body) = response.split_once("\r\n\r\n").unwrap_or((&response, ""));
    format!("{}\n{body}", head.lines().next().unwrap_or_default())
}

#[tokio::main]
async fn main() {
    let mut state = ServiceState::new();
    state.add_model(demo_diagram(), "demo").unwrap();
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let port = listener.local_addr().unwrap().port();
    tokio::spawn(async move { axum::serve(listener, router(Arc::new(state))).await });

    let calls = [
        ("GET", "/models", String::new()),
        ("GET", "/features/invasive-hemodynamics", String::new()),
        (
            "POST",
            "/predict",
            r#"{"feature_set":"invasive-hemodynamics","outcome":"DeLvTx","values":{"Sex":"Male","BPSYS":110,"CPI":0.7,"PCWP":30}}"#.to_string(),
        ),
        (
            "POST",
            "/predict",
            r#"{"feature_set":"invasive-hemodynamics","outcome":"DeLvTx","values":{"BPSYS":110}}"#.to_string(),
        ),
    ];
    for (method, path, body) in calls {
        let reply = tokio::task::spawn_blocking(move || request(port, method, path, &body)).await.unwrap();
        let shown: String = reply.chars().take(400).collect();
        println!("{method} {path}\n{shown}\n");
    }
}
