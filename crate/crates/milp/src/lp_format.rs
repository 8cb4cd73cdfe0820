//! Export to the CPLEX LP text format, for debugging a model in an external
//! solver.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::{ConstraintSense, MilpProblem, VarId};

/// Replaces characters the LP format does not accept in identifiers.
fn lp_name(raw: &str, fallback: &str) -> String {
    let mut out: String = raw
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "_.()".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        out.insert_str(0, fallback);
    }
    out
}

fn write_terms<W: Write>(
    w: &mut W,
    names: &[String],
    terms: impl Iterator<Item = (VarId, f64)>,
) -> io::Result<bool> {
    let mut any = false;
    for (i, (var, coef)) in terms.enumerate() {
        if i > 0 && i % 8 == 0 {
            write!(w, "\n   ")?;
        }
        let sign = if coef < 0.0 { '-' } else { '+' };
        write!(w, " {} {:e} {}", sign, coef.abs(), names[var.index()])?;
        any = true;
    }
    Ok(any)
}

/// Writes `problem` in LP format. Variable and row names are sanitised and
/// suffixed with their index so they stay unique.
pub fn write_lp<W: Write>(problem: &MilpProblem, mut w: W) -> io::Result<()> {
    let names: Vec<String> = problem
        .variables()
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{}_{i}", lp_name(&v.name, "x")))
        .collect();

    writeln!(w, "\\ generated by dbio-milp")?;
    writeln!(w, "Minimize")?;
    write!(w, " obj:")?;
    let obj = problem.objective();
    let nonzero = obj
        .coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| (VarId(i), *c));
    let any = write_terms(&mut w, &names, nonzero)?;
    if obj.constant != 0.0 || !any {
        let sign = if obj.constant < 0.0 { '-' } else { '+' };
        write!(w, " {} {:e}", sign, obj.constant.abs())?;
    }
    writeln!(w)?;

    writeln!(w, "Subject To")?;
    for (i, row) in problem.constraints().iter().enumerate() {
        write!(w, " {}_{i}:", lp_name(&row.name, "c"))?;
        if !write_terms(&mut w, &names, row.terms.iter().copied())? {
            write!(w, " 0 {}", names.first().map(String::as_str).unwrap_or("x"))?;
        }
        let sense = match row.sense {
            ConstraintSense::Le => "<=",
            ConstraintSense::Eq => "=",
            ConstraintSense::Ge => ">=",
        };
        writeln!(w, " {sense} {:e}", row.rhs)?;
    }

    writeln!(w, "Bounds")?;
    for (v, name) in problem.variables().iter().zip(&names) {
        if v.is_binary() {
            continue;
        }
        match (v.lower.is_finite(), v.upper.is_finite()) {
            (true, true) if v.lower == v.upper => writeln!(w, " {name} = {:e}", v.lower)?,
            (true, true) => writeln!(w, " {:e} <= {name} <= {:e}", v.lower, v.upper)?,
            (true, false) => writeln!(w, " {name} >= {:e}", v.lower)?,
            (false, true) => writeln!(w, " -inf <= {name} <= {:e}", v.upper)?,
            (false, false) => writeln!(w, " {name} free")?,
        }
    }

    let binaries: Vec<&String> = problem
        .variables()
        .iter()
        .zip(&names)
        .filter(|(v, _)| v.is_binary())
        .map(|(_, n)| n)
        .collect();
    if !binaries.is_empty() {
        writeln!(w, "Binaries")?;
        for chunk in binaries.chunks(8) {
            let line: Vec<&str> = chunk.iter().map(|s| s.as_str()).collect();
            writeln!(w, " {}", line.join(" "))?;
        }
    }
    writeln!(w, "End")
}

pub fn write_lp_file(problem: &MilpProblem, path: &Path) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    write_lp(problem, &mut w)?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_problem_layout() {
        let mut p = MilpProblem::new();
        let x = p.add_continuous("p[1,2]", 0.0, f64::INFINITY).unwrap();
        let u = p.add_binary("u").unwrap();
        p.add_constraint("cap", &[(x, 1.0), (u, -4.0)], ConstraintSense::Le, 0.0)
            .unwrap();
        p.add_objective_term(x, 2.5).unwrap();
        p.add_objective_constant(10.0);

        let mut buf = Vec::new();
        write_lp(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("Minimize\n obj: + 2.5e0 p_1_2__0 + 1e1\n"));
        assert!(text.contains(" cap_0: + 1e0 p_1_2__0 - 4e0 u_1 <= 0e0\n"));
        assert!(text.contains("Bounds\n p_1_2__0 >= 0e0\n"));
        assert!(text.contains("Binaries\n u_1\nEnd"));
    }

    #[test]
    fn names_never_start_with_digit() {
        assert_eq!(lp_name("3x", "x"), "x3x");
        assert_eq!(lp_name("", "c"), "c");
        assert_eq!(lp_name("e_bess(y1)", "x"), "e_bess(y1)");
    }
}
