//! Tabular output. Floats are written in shortest round-trip form.

use std::io::Write;

use crate::nash::BrdTrace;
use crate::sim::SimTrace;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(&'static str),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => (*s).to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let i = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[i].clone()).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.header.len());
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn brd_table(trace: &BrdTrace) -> Table {
    let mut t = Table::new(vec!["iteration", "x", "y"]);
    for (i, s) in trace.iterates.iter().enumerate() {
        t.rows
            .push(vec![Cell::Int(i as u64), s.x.into(), s.y.into()]);
    }
    t
}

pub fn history_table(trace: &SimTrace) -> Table {
    let mut t = Table::new(vec![
        "update_index",
        "x",
        "y",
        "x_estimated_by_jammer",
        "y_estimated_by_target",
    ]);
    for h in &trace.strategy_history {
        t.rows.push(vec![
            Cell::Int(h.update_index as u64),
            h.x.into(),
            h.y.into(),
            h.x_estimated_by_jammer.into(),
            h.y_estimated_by_target.into(),
        ]);
    }
    t
}

pub fn events_table(trace: &SimTrace) -> Table {
    let mut t = Table::new(vec![
        "index",
        "silence_drawn",
        "jam_drawn",
        "bits_conveyed",
        "jam_energy",
    ]);
    for e in &trace.events {
        t.rows.push(vec![
            Cell::Int(e.index as u64),
            e.silence_drawn.into(),
            e.jam_drawn.into(),
            e.bits_conveyed.into(),
            e.jam_energy.into(),
        ]);
    }
    t
}
