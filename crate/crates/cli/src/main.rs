use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use meltmap_cli::cli::{self, Cli, CliError, Command, ServeArgs, EXIT_RUNTIME};
use meltmap_cli::server::{self, ServerConfig};

fn main() -> ExitCode {
    let args = Cli::parse();
    let result = match args.command {
        Command::Serve(a) => serve(a),
        command => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            cli::run(command, &mut out).and_then(|()| out.flush().map_err(CliError::from))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.exit_code as u8)
        }
    }
}

fn serve(a: ServeArgs) -> Result<(), CliError> {
    let config = ServerConfig { max_body_bytes: a.max_body_bytes, ui_dir: a.ui };
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((a.host.as_str(), a.port)).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        server::serve(listener, config).await
    })
    .map_err(|e| CliError { exit_code: EXIT_RUNTIME, message: e.to_string() })
}
