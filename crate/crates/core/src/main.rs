fn main() {
    std::process::exit(ssgnav::cli::dispatch(std::env::args_os()));
}
