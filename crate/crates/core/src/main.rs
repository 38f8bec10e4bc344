fn main() -> std::process::ExitCode {
    stlrob::cli::main()
}
