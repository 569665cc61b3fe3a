"""Device calibration rows of the hardware runs (T1, T2 in microseconds, Tr in ns).

``p_ad`` and ``p_d`` are the values as reported alongside the timings; the
readout confusion probabilities were measured separately.
"""
from .collision import NoiseParams

DEVICE_CALIBRATIONS = [
    dict(backend="ibm_kyoto", t1_us=342.13, t2_us=326.55, tr_ns=1440, p_ad=0.0042, p_d=0.0044, p01=0.0061, p10=0.0070),
    dict(backend="ibm_kyoto", t1_us=334.16, t2_us=202.09, tr_ns=1440, p_ad=0.0043, p_d=0.0071, p01=0.0062, p10=0.0066),
    dict(backend="ibm_brisbane", t1_us=303.33, t2_us=182.54, tr_ns=1300, p_ad=0.0042, p_d=0.0070, p01=0.0606, p10=0.0120),
    dict(backend="ibm_brisbane", t1_us=303.33, t2_us=182.54, tr_ns=1300, p_ad=0.0042, p_d=0.0070, p01=0.0616, p10=0.0132),
    dict(backend="ibm_brisbane", t1_us=303.33, t2_us=182.54, tr_ns=1300, p_ad=0.0042, p_d=0.0070, p01=0.0272, p10=0.0108),
    dict(backend="ibm_brisbane", t1_us=295.36, t2_us=164.04, tr_ns=1300, p_ad=0.0043, p_d=0.0078, p01=0.0256, p10=0.0100),
    dict(backend="ibm_brisbane", t1_us=303.33, t2_us=182.54, tr_ns=1300, p_ad=0.0042, p_d=0.0070, p01=0.0204, p10=0.0102),
    dict(backend="ibm_brisbane", t1_us=295.36, t2_us=164.04, tr_ns=1300, p_ad=0.0043, p_d=0.0078, p01=0.0210, p10=0.0118),
]


def table_noise(row: int) -> NoiseParams:
    """Noise model of a calibration row (0-based) using the reported probabilities."""
    r = DEVICE_CALIBRATIONS[row]
    return NoiseParams(r["p_ad"], r["p_d"], r["p01"], r["p10"])


def timing_noise(row: int) -> NoiseParams:
    """Noise model of a calibration row with damping/dephasing recomputed from the timings."""
    r = DEVICE_CALIBRATIONS[row]
    return NoiseParams.from_times(r["t1_us"], r["t2_us"], r["tr_ns"], r["p01"], r["p10"])

# calibration rows belonging to each (alpha, kappa) setting
RUNS_BY_COUPLING = {
    (1.0, 1.0): [0, 2, 3, 4],
    (1.0, 2.0): [1, 5, 6, 7],
}
