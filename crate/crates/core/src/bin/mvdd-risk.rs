fn main() {
    tracing_subscriber::fmt().with_writer(std::io::stderr).with_target(false).init();
    std::process::exit(mvdd_risk::cli::main_with_args(std::env::args_os()));
}
