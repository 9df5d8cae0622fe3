use super::SvmDataset;
use crate::error::{Error, Result};

/// Comma-separated text split into string cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<String>>,
}

/// Reads comma-separated records. The first record is taken as a header
/// when its first cell does not parse as a number. Blank lines are skipped.
pub fn parse_csv_rows(text: &str) -> Result<CsvTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut table = CsvTable::default();
    for record in reader.records() {
        let record = record?;
        let cells: Vec<String> = record.iter().map(str::to_owned).collect();
        if cells.iter().all(String::is_empty) {
            continue;
        }
        let first_record = table.header.is_none() && table.rows.is_empty();
        if first_record && cells[0].parse::<f64>().is_err() {
            table.header = Some(cells);
        } else {
            table.rows.push(cells);
        }
    }
    Ok(table)
}

fn numeric(cells: &[String], row: usize) -> Result<Vec<f64>> {
    cells
        .iter()
        .enumerate()
        .map(|(c, s)| {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line: row + 1,
                msg: format!("column {c}: `{s}` is not a number"),
            })
        })
        .collect()
}

/// Keeps the versicolor (+1) and virginica (−1) rows of the iris table.
/// Features stay in centimetres.
pub fn prepare_iris(raw: &CsvTable) -> Result<SvmDataset> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, cells) in raw.rows.iter().enumerate() {
        if cells.len() != 5 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected 4 features and a class, got {} cells", cells.len()),
            });
        }
        let class = cells[4].trim_start_matches("Iris-");
        let label = match class {
            "versicolor" => 1,
            "virginica" => -1,
            "setosa" => continue,
            other => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("unknown iris class `{other}`"),
                })
            }
        };
        rows.push(numeric(&cells[..4], i)?);
        labels.push(label);
    }
    SvmDataset::new(
        "iris",
        rows,
        labels,
        "iris: setosa removed; versicolor=+1, virginica=-1; raw features",
    )
}

/// Sonar returns: 60 band energies, `M` (mine) = +1, `R` (rock) = −1.
pub fn load_sonar(raw: &CsvTable) -> Result<SvmDataset> {
    let mut rows = Vec::with_capacity(raw.rows.len());
    let mut labels = Vec::with_capacity(raw.rows.len());
    for (i, cells) in raw.rows.iter().enumerate() {
        if cells.len() != 61 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected 61 columns, got {}", cells.len()),
            });
        }
        labels.push(match cells[60].as_str() {
            "M" => 1,
            "R" => -1,
            other => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("unknown sonar label `{other}`"),
                })
            }
        });
        rows.push(numeric(&cells[..60], i)?);
    }
    SvmDataset::new("sonar", rows, labels, "sonar: M=+1, R=-1; raw features")
}
