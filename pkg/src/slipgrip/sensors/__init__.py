from .calibration import (
    IDENTITY,
    AxisCalibrationRegressor,
    OpticalAxisCalibration,
    apply_calibration,
    fit_axis_calibration,
    identity_calibration,
    inverse_distortion,
    write_calibration_report,
)
from .ft import FTReading, finger_to_middle, middle_to_finger, simulate_ft_reading
from .optical import (
    DEFAULT_CPI,
    RESIDUAL_REGULARIZER,
    RESIDUAL_THRESHOLD,
    FusionResult,
    RawOpticalReading,
    SensorLayout,
    VelocityFusion,
    build_A,
    calibrate_reading,
    fuse,
    quantum,
    simulate_optical_reading,
)
