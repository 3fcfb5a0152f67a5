//! Drive the command-line front end in-process with a definition file.

use extham::cli;

fn main() {
    let def = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/ttw.def");
    let out = std::env::temp_dir().join("extham-example");
    let out = out.to_string_lossy();
    let args = ["extham", "extend", "--def", def, "--m", "3", "--n", "2", "--out", &out];
    let code = cli::run(args, &mut std::io::stdout(), &mut std::io::stderr());
    println!("exit code {code}; H.txt, K.txt and meta.json in {out}");
}
