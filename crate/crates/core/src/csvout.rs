//! Small helpers shared by the CSV exporters.

/// Flushes an in-memory writer and returns its UTF-8 text.
pub fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, csv::Error> {
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
