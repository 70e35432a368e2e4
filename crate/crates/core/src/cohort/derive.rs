use super::PatientRecord;

/// Adds pulse pressure, mean arterial pressure, cardiac power index and
/// pulmonary artery pulsatility index where all inputs are present.
///
/// * `PP = BPSYS - BPDIAS`
/// * `MAP = (BPSYS + 2 * BPDIAS) / 3`
/// * `CPI = MAP * CO / BSA / 451` (W/m²)
/// * `PAPI = (PAS - PAD) / RAP`, only for `RAP > 0`
///
/// Values already present on the record are never overwritten. A provided MAP
/// is used for CPI in preference to the derived one.
pub fn derive_noninvasive_hemodynamics(record: &PatientRecord) -> PatientRecord {
    let mut out = record.clone();
    let get = |r: &PatientRecord, name: &str| r.value(name);

    if let (Some(sbp), Some(dbp)) = (get(record, "BPSYS"), get(record, "BPDIAS")) {
        out.values.entry("PP".into()).or_insert(sbp - dbp);
        out.values.entry("MAP".into()).or_insert((sbp + 2.0 * dbp) / 3.0);
    }
    if let (Some(map), Some(co), Some(bsa)) = (get(&out, "MAP"), get(record, "CO"), get(record, "BSA")) {
        if bsa > 0.0 {
            out.values.entry("CPI".into()).or_insert(map * co / bsa / 451.0);
        }
    }
    if let (Some(pas), Some(pad), Some(rap)) = (get(record, "PAS"), get(record, "PAD"), get(record, "RAP")) {
        if rap > 0.0 {
            out.values.entry("PAPI".into()).or_insert((pas - pad) / rap);
        }
    }
    out
}
