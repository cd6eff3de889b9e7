//! Square symmetric matrices labelled by asset, with CSV/JSON export.

use crate::panel::{asset_ids, AssetId};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Labeled {
    pub assets: Vec<AssetId>,
    pub data: Vec<f64>,
}

impl Labeled {
    pub fn from_fn(assets: Vec<AssetId>, f: impl Fn(usize, usize) -> f64) -> Self {
        let n = assets.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = f(i, j);
            }
        }
        Labeled { assets, data }
    }

    pub fn n(&self) -> usize {
        self.assets.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n() + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n().max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.assets.iter().position(|a| a.as_str() == name)
    }

    /// First asymmetric cell, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != self.get(j, i))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let mut header = vec![String::new()];
        header.extend(self.assets.iter().map(ToString::to_string));
        w.write_record(&header).expect("in-memory write");
        for (i, a) in self.assets.iter().enumerate() {
            let mut record = vec![a.to_string()];
            record.extend((0..self.n()).map(|j| self.get(i, j).to_string()));
            w.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }

    pub fn to_json(&self, key: &str) -> String {
        let mut doc = serde_json::Map::new();
        doc.insert(
            "assets".into(),
            serde_json::to_value(&self.assets).expect("serializable"),
        );
        doc.insert(key.into(), serde_json::to_value(self.rows()).expect("finite values"));
        serde_json::Value::Object(doc).to_string()
    }

    /// Reads the layout written by [`Labeled::to_csv`]: a header of asset
    /// names after one leading cell, then one named row per asset.
    pub fn parse_csv(text: &str) -> Result<Self, String> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| e.to_string())?.clone();
        let assets = asset_ids(header.iter().skip(1).map(str::to_string)).map_err(|e| e.to_string())?;
        let n = assets.len();
        if n == 0 {
            return Err("matrix has no assets".into());
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| e.to_string())?;
            if i >= n {
                return Err(format!("more than {n} matrix rows"));
            }
            if &record[0] != assets[i].as_str() {
                return Err(format!(
                    "row {} is labelled `{}`, expected `{}`",
                    i + 1,
                    &record[0],
                    assets[i]
                ));
            }
            if record.len() != n + 1 {
                return Err(format!(
                    "row `{}` has {} values, expected {n}",
                    assets[i],
                    record.len() - 1
                ));
            }
            for cell in record.iter().skip(1) {
                let v: f64 = cell
                    .parse()
                    .map_err(|_| format!("row `{}`: non-numeric value `{cell}`", assets[i]))?;
                data.push(v);
            }
        }
        if data.len() != n * n {
            return Err(format!("expected {n} matrix rows, found {}", data.len() / n));
        }
        Ok(Labeled { assets, data })
    }
}
