//! CSV output: comma-separated, '.' decimal, scientific notation with 17
//! significant digits so doubles round-trip losslessly.

use std::io::Write;

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvWriter<W: Write> {
    out: W,
    columns: usize,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W, header: &[&str]) -> std::io::Result<Self> {
        writeln!(out, "{}", header.join(","))?;
        Ok(CsvWriter {
            out,
            columns: header.len(),
        })
    }

    pub fn row(&mut self, values: &[f64]) -> std::io::Result<()> {
        assert_eq!(values.len(), self.columns, "row width mismatch");
        let mut line = String::with_capacity(self.columns * 24);
        for (k, v) in values.iter().enumerate() {
            if k > 0 {
                line.push(',');
            }
            line.push_str(&format_float(*v));
        }
        writeln!(self.out, "{line}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_the_format() {
        for x in [
            0.0,
            1.0 / 3.0,
            -2.718281828459045e-12,
            6.02214076e23,
            f64::MIN_POSITIVE,
        ] {
            let s = format_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s} -> {back}");
        }
    }

    #[test]
    fn writer_emits_header_and_rows() {
        let mut buf = Vec::new();
        {
            let mut w = CsvWriter::new(&mut buf, &["t", "x"]).unwrap();
            w.row(&[0.5, 1.25]).unwrap();
        }
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,x"));
        assert_eq!(
            lines.next(),
            Some("5.0000000000000000e-1,1.2500000000000000e0")
        );
    }
}
