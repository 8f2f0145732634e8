use std::process;

fn main() {
    // Die quietly when output is piped into a closed reader (e.g. `| head`)
    // instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    process::exit(seclat_cli::run(std::env::args_os()).code());
}
