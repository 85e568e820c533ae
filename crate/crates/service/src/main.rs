use std::net::IpAddr;

use clap::Parser;

use oncodp_service::{router, ServiceConfig};

#[derive(Parser, Debug)]
#[command(name = "oncodp-serve", version, about = "HTTP API for the oncodp solver")]
struct Args {
    #[arg(long, default_value = "127.0.0.1")]
    bind: IpAddr,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Origin allowed to call the API from a browser ("*" for any).
    #[arg(long)]
    cors_origin: Option<String>,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let args = Args::parse();
    let app = router(&ServiceConfig {
        cors_origin: args.cors_origin,
    });
    let listener = tokio::net::TcpListener::bind((args.bind, args.port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app).await
}
