use pyo3::prelude::*;

#[pymodule]
fn hierarchia_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
