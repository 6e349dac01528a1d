fn main() {
    std::process::exit(multimargin::cli::parse_and_dispatch(std::env::args_os()));
}
