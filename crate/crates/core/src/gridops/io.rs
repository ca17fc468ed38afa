use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::gridops::grid::{BlockGridFunction, FieldLayout};
use crate::scalar::Real;

/// Writes one CSV row per value: `block,n,index,value` with `index` row-major.
pub fn write_csv<T: Real, W: Write>(x: &BlockGridFunction<T>, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["block", "n", "index", "value"])?;
    for (b, info) in x.layout().blocks().iter().enumerate() {
        for (k, v) in x.block(b).iter().enumerate() {
            wr.write_record([info.name.to_string(), x.n().to_string(), k.to_string(), format!("{:e}", v.to_f64_lossy())])?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// Reads the format produced by [`write_csv`].
pub fn read_csv<T: Real, R: Read>(layout: FieldLayout, r: R) -> Result<BlockGridFunction<T>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut n = None;
    let mut data: Vec<Vec<T>> = vec![Vec::new(); layout.len()];
    for rec in rd.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::Parse(format!("short record {rec:?}")));
        let b = layout.block_index(field(0)?).ok_or_else(|| Error::Parse(format!("unknown block {}", &rec[0])))?;
        let rn: usize = field(1)?.parse().map_err(|_| Error::Parse(format!("bad n {}", &rec[1])))?;
        if *n.get_or_insert(rn) != rn {
            return Err(Error::SizeMismatch { expected: n.unwrap_or(0), got: rn });
        }
        let v: f64 = field(3)?.parse().map_err(|_| Error::Parse(format!("bad value {}", &rec[3])))?;
        data[b].push(T::lit(v));
    }
    BlockGridFunction::from_blocks(layout, n.ok_or(Error::EmptyGrid)?, data)
}
