/// Successive rates `log(e_i / e_{i+1}) / log(h_i / h_{i+1})`. Entry `i` is
/// the rate between levels `i` and `i + 1`; `None` where `h` does not
/// strictly decrease or an error is not positive.
pub fn eoc(h: &[f64], e: &[f64]) -> Vec<Option<f64>> {
    assert_eq!(h.len(), e.len(), "h and error sequences differ in length");
    h.windows(2)
        .zip(e.windows(2))
        .map(|(hw, ew)| {
            if hw[1] < hw[0] && ew[0] > 0.0 && ew[1] > 0.0 {
                Some((ew[0] / ew[1]).ln() / (hw[0] / hw[1]).ln())
            } else {
                None
            }
        })
        .collect()
}

/// Error sequences over refinement levels.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EocTable {
    pub h: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl EocTable {
    pub fn new(h: Vec<f64>) -> Self {
        Self { h, columns: Vec::new() }
    }

    pub fn push_column(&mut self, name: &str, values: Vec<f64>) {
        assert_eq!(values.len(), self.h.len(), "column {name} has the wrong length");
        self.columns.push((name.to_string(), values));
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn rates(&self, name: &str) -> Option<Vec<Option<f64>>> {
        self.column(name).map(|e| eoc(&self.h, e))
    }

    /// Plain-text table with a rate column after each error column.
    pub fn to_text(&self) -> String {
        let mut s = format!("{:>10}", "h");
        for (n, _) in &self.columns {
            s += &format!(" {n:>13} {:>6}", "rate");
        }
        s.push('\n');
        for i in 0..self.h.len() {
            s += &format!("{:>10.4e}", self.h[i]);
            for (_, v) in &self.columns {
                let r = if i == 0 { None } else { eoc(&self.h[i - 1..=i], &v[i - 1..=i])[0] };
                match r {
                    Some(r) => s += &format!(" {:>13.6e} {r:>6.2}", v[i]),
                    None => s += &format!(" {:>13.6e} {:>6}", v[i], "-"),
                }
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_rate() {
        let r = eoc(&[0.1, 0.05], &[1e-2, 2.5e-3]);
        assert!((r[0].unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn undefined_rates() {
        assert_eq!(eoc(&[0.1, 0.1], &[1.0, 0.5]), vec![None]);
        assert_eq!(eoc(&[0.1, 0.05], &[0.0, 0.5]), vec![None]);
    }

    #[test]
    fn table_text_has_rates() {
        let mut t = EocTable::new(vec![0.5, 0.25, 0.125]);
        t.push_column("err", vec![1.0, 0.25, 0.0625]);
        let txt = t.to_text();
        assert_eq!(txt.lines().count(), 4);
        assert!(txt.lines().nth(2).unwrap().contains("2.00"));
        assert_eq!(t.rates("err").unwrap().len(), 2);
    }
}
