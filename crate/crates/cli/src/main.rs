fn main() {
    std::process::exit(grdpg_cli::run(std::env::args_os()));
}
