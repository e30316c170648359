fn main() {
    std::process::exit(rkl::cli::dispatch(std::env::args_os()));
}
