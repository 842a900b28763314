fn main() {
    std::process::exit(lambda_fcs_cli::run(std::env::args_os()));
}
