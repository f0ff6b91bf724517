from .ephemeris import (ConsistencyError, Ephemeris, FieldRangeError,
                        decode_ephemeris)
from .frame import LnavDecoder, find_frame
from .parity import check_parity
from .pvt import (GeometryError, InsufficientSatellitesError, PvtDivergedError,
                  PvtAverager, PvtSolution, form_pseudoranges, solve_pvt)
from .orbit import sat_position

__all__ = [
    "Ephemeris", "decode_ephemeris", "ConsistencyError", "FieldRangeError",
    "find_frame", "LnavDecoder", "check_parity", "sat_position",
    "PvtSolution", "solve_pvt", "form_pseudoranges", "PvtAverager",
    "InsufficientSatellitesError", "GeometryError", "PvtDivergedError",
]
