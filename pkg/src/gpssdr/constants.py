"""GPS L1 C/A signal constants shared by every stage of the receiver."""

from dataclasses import dataclass

L1_CARRIER_HZ = 1575.42e6
CHIP_RATE_HZ = 1.023e6
CODE_LENGTH_CHIPS = 1023
CODE_PERIOD_S = 1e-3
NAV_BIT_RATE_HZ = 50
EPOCHS_PER_BIT = 20
SPEED_OF_LIGHT = 299792458.0

# Code doppler per Hz of carrier doppler (coherent dynamics).
CODE_CARRIER_RATIO = CHIP_RATE_HZ / L1_CARRIER_HZ

# WGS-84 / IS-GPS-200 orbital constants.
EARTH_GM = 3.986005e14            # m^3/s^2
EARTH_ROTATION_RATE = 7.2921151467e-5  # rad/s
RELATIVISTIC_F = -4.442807633e-10      # s/sqrt(m)
WGS84_A = 6378137.0
WGS84_F = 1.0 / 298.257223563
GPS_WEEK_SECONDS = 604800.0


@dataclass(frozen=True)
class GpsConstants:
    """Immutable bundle of the L1 C/A signal plan."""

    l1_carrier_hz: float = L1_CARRIER_HZ
    chip_rate_hz: float = CHIP_RATE_HZ
    code_length_chips: int = CODE_LENGTH_CHIPS
    code_period_s: float = CODE_PERIOD_S
    nav_bit_rate_hz: float = NAV_BIT_RATE_HZ
    speed_of_light: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if abs(self.code_period_s * self.chip_rate_hz - self.code_length_chips) > 1e-9:
            raise ValueError("code period x chip rate must equal code length")


GPS_L1 = GpsConstants()
