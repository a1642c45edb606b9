use crate::CliError;

/// Parses `a..b` (inclusive), `a,b,c` or a single value.
pub fn parse(flag: &str, text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Invalid(format!("--{flag}: cannot parse {text:?}, expected a..b, a,b,c or a"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((lo, hi)) = text.split_once("..") {
        let (lo, hi) = (num(lo)?, num(hi)?);
        return Ok((lo..=hi).collect());
    }
    let mut values = text.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
    values.sort_unstable();
    values.dedup();
    Ok(values)
}
