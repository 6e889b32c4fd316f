"""Circuit models, synthesis and fitting for DSR-based differential bandpass filters."""
from .dsrcell import (BandstopCellParams, CmCellParams, DsrCellParams, cm_bandpass_cell,
                      cm_bandstop_cell, cm_params_from_dm, dm_bandpass_cell, dm_bandstop_cell)
from .elements import INF_Z, branch_impedance, dsr_shunt_impedance, element_impedance
from .errors import (ConfigError, DomainError, DsrError, MetricsError, NonInvertibleError,
                     ParseError, SingularConversionError, UsageError)
from .filterlab import build_filter, cm_rejection_scaling, metrics, sweep
from .mixedmode import MixedModeS, SParams4, from_half_circuits, mixed_to_std4, std4_to_mixed
from .netcore import (FrequencyGrid, SParams2, abcd_series, abcd_shunt, abcd_to_s, cascade,
                      s_to_abcd)
from .synth import FilterSpec, SynthReport, synthesize

__version__ = "0.1.0"
