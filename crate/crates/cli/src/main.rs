fn main() {
    std::process::exit(drfeas_cli::cli_main(std::env::args_os()));
}
