use std::fmt;

use super::state::Control;

/// One recorded gate application.
#[derive(Debug, Clone, PartialEq)]
pub struct GateRecord {
    pub name: &'static str,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
    pub angle: Option<f64>,
}

impl fmt::Display for GateRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        write!(f, " t=")?;
        for (i, t) in self.targets.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        if !self.controls.is_empty() {
            write!(f, " c=")?;
            for (i, c) in self.controls.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}{}", if c.value { '+' } else { '-' }, c.bit)?;
            }
        }
        if let Some(a) = self.angle {
            write!(f, " angle={a:.12}")?;
        }
        Ok(())
    }
}

/// Optional per-gate log; one line per record when displayed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GateTrace {
    pub records: Vec<GateRecord>,
}

impl fmt::Display for GateTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_render_one_line_each() {
        let trace = GateTrace {
            records: vec![
                GateRecord { name: "h", targets: vec![3], controls: vec![], angle: None },
                GateRecord {
                    name: "ry",
                    targets: vec![0],
                    controls: vec![Control::positive(2), Control::negative(5)],
                    angle: Some(0.5),
                },
            ],
        };
        let text = trace.to_string();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "h t=3");
        assert_eq!(lines[1], "ry t=0 c=+2,-5 angle=0.500000000000");
    }
}
