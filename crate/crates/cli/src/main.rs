use tracing_subscriber::EnvFilter;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let verbosity = args.iter().filter(|a| a.as_str() == "-v" || a.as_str() == "--verbose").count()
        + args.iter().filter(|a| a.as_str() == "-vv").count() * 2;
    let default = match verbosity {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(default)))
        .with_writer(std::io::stderr)
        .init();
    std::process::exit(gridiv_cli::main_with_args(args));
}
