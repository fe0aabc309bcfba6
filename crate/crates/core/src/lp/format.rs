use alloc::string::String;
use core::fmt::Write;

use super::{LinearProgram, Sense};

/// Renders the program in the CPLEX LP text format.
///
/// Variable and row names are sanitised to the format's character set. The
/// objective offset is emitted as a constant term.
pub fn write_lp(lp: &LinearProgram) -> String {
    let names: alloc::vec::Vec<String> = lp
        .vars
        .iter()
        .enumerate()
        .map(|(j, v)| sanitize(&v.name, 'x', j))
        .collect();
    let mut out = String::new();
    out.push_str("Maximize\n obj:");
    let mut any = false;
    for &(j, c) in &lp.objective {
        if c != 0.0 {
            push_term(&mut out, c, &names[j]);
            any = true;
        }
    }
    if lp.offset != 0.0 || !any {
        let _ = write!(out, " {} {}", sign(lp.offset), fmt_num(lp.offset.abs()));
    }
    out.push_str("\nSubject To\n");
    for (i, r) in lp.rows.iter().enumerate() {
        let _ = write!(out, " {}:", sanitize(&r.name, 'r', i));
        if r.coeffs.is_empty() {
            out.push_str(" 0");
        }
        for &(j, a) in &r.coeffs {
            push_term(&mut out, a, &names[j]);
        }
        let op = match r.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", fmt_num(r.rhs));
    }
    out.push_str("Bounds\n");
    for (v, name) in lp.vars.iter().zip(&names) {
        if v.upper.is_infinite() {
            let _ = writeln!(out, " {name} >= {}", fmt_num(v.lower));
        } else if v.lower == v.upper {
            let _ = writeln!(out, " {name} = {}", fmt_num(v.lower));
        } else {
            let _ = writeln!(out, " {} <= {name} <= {}", fmt_num(v.lower), fmt_num(v.upper));
        }
    }
    let ints: alloc::vec::Vec<&String> = lp
        .vars
        .iter()
        .zip(&names)
        .filter(|(v, _)| v.integer)
        .map(|(_, n)| n)
        .collect();
    if !ints.is_empty() {
        out.push_str("General\n");
        for n in ints {
            let _ = writeln!(out, " {n}");
        }
    }
    out.push_str("End\n");
    out
}

fn push_term(out: &mut String, c: f64, name: &str) {
    let _ = write!(out, " {} {} {name}", sign(c), fmt_num(c.abs()));
}

fn sign(c: f64) -> char {
    if c < 0.0 {
        '-'
    } else {
        '+'
    }
}

fn fmt_num(x: f64) -> String {
    let mut s = String::new();
    let _ = write!(s, "{x:?}");
    s
}

fn sanitize(name: &str, prefix: char, idx: usize) -> String {
    let mut s: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "_.()[]{}!\"#$%&;?@'`|~".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        s.insert(0, prefix);
        if name.is_empty() {
            let _ = write!(s, "{idx}");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn renders_sections() {
        let mut lp = LinearProgram::default();
        let a = lp.add_binary("a[0]");
        let x = lp.add_var("q 1", 0.0, 1.0);
        let u = lp.add_var("u", -3.0, f64::INFINITY);
        lp.add_row("c1", vec![(a, 1.0), (x, -2.5)], Sense::Ge, -1.0);
        lp.objective = vec![(u, 1.0), (x, -0.2)];
        lp.offset = 0.5;
        let s = write_lp(&lp);
        assert!(s.starts_with("Maximize\n obj: + 1.0 u - 0.2 q_1 + 0.5\n"));
        assert!(s.contains(" c1: + 1.0 a[0] - 2.5 q_1 >= -1.0\n"));
        assert!(s.contains(" u >= -3.0\n"));
        assert!(s.contains(" 0.0 <= a[0] <= 1.0\n"));
        assert!(s.contains("General\n a[0]\n"));
        assert!(s.ends_with("End\n"));
    }
}
