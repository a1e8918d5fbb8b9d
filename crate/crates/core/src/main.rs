fn main() {
    std::process::exit(spheretrace::cli::cli_main(std::env::args_os()));
}
