fn main() {
    std::process::exit(tanfam::cli::cli_main(std::env::args_os()));
}
