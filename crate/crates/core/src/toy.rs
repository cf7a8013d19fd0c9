//! The toy family `P_n`: `n` roles `in(c_i, x_i). if x_i = ok then out(c_i, n_i)`.

use crate::frame::Frame;
use crate::process::{ExtendedProcess, Proc, SimpleProcess};
use crate::term::Term;

pub fn role(i: usize) -> Proc {
    let c = format!("c{i}");
    let x = format!("x{i}");
    Proc::input(
        &c,
        &x,
        Proc::cond(
            Term::var(&x),
            Term::constant("ok"),
            Proc::output(&c, Term::name(&format!("n{i}")), Proc::Null),
            Proc::Null,
        ),
    )
}

/// `P_n` over an empty frame.
pub fn toy_process(n: usize) -> ExtendedProcess {
    let procs = SimpleProcess::new((1..=n).map(role).collect()).expect("distinct channels");
    ExtendedProcess::new(procs, Frame::new())
}

/// Protocol-file text declaring `P_n` and the query `P_n ~ P_n`.
pub fn toy_source(n: usize, mode: &str) -> String {
    let mut s = String::from("consts ok.\n");
    let names: Vec<String> = (1..=n).map(|i| format!("n{i}")).collect();
    s.push_str(&format!("names {}.\n", names.join(", ")));
    s.push_str("frame F = [].\n");
    for i in 1..=n {
        s.push_str(&format!("let R{i} = in(c{i}, x{i}); if x{i} = ok then out(c{i}, n{i}); 0.\n"));
    }
    let roles: Vec<String> = (1..=n).map(|i| format!("R{i}")).collect();
    let body = roles.join(" | ");
    s.push_str(&format!("query equiv {mode} {{ {body} }} F ~ {{ {body} }} F.\n"));
    s
}

/// Number of interleavings of `n` input/output pairs: `(2n)! / 2^n`.
pub fn reference_count(n: usize) -> u64 {
    let f: u64 = (1..=2 * n as u64).product();
    f >> n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!((1..=4).map(reference_count).collect::<Vec<_>>(), vec![1, 6, 90, 2520]);
    }

    #[test]
    fn source_parses_to_the_same_process() {
        let f = crate::parser::parse(&toy_source(3, "reduced")).unwrap();
        let (a, b) = f.resolve(&f.queries[0]).unwrap();
        assert_eq!(a, toy_process(3));
        assert_eq!(b, toy_process(3));
    }
}
