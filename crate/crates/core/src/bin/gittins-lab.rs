fn main() {
    let status = gittins_lab::cli::main_with_args(std::env::args_os());
    std::process::exit(status as i32);
}
