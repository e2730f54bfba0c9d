fn main() {
    std::process::exit(locstat::cli::dispatch(std::env::args_os()));
}
