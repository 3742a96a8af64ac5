fn main() {
    std::process::exit(nsp_core::cli::cli_main(std::env::args_os()));
}
