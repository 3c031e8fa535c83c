fn main() {
    std::process::exit(rfe::cli::dispatch(std::env::args_os()));
}
