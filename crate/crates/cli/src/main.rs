fn main() -> std::process::ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    rydberg_switch_cli::main_with(std::env::args_os())
}
