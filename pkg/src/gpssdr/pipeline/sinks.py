"""CSV log writers and KML accumulation for session outputs."""

import math
import os

from ..nav.geodesy import ecef_to_geodetic
from ..nav.kml import write_kml
from ..trk import kernels as K


class CsvWriter:
    HEADER = ""

    def __init__(self, path):
        self.path = path
        self._f = open(path, "w", buffering=1 << 20)
        self._f.write(self.HEADER + "\n")

    def write_line(self, line):
        self._f.write(line + "\n")

    def close(self):
        if self._f is not None:
            self._f.close()
            self._f = None


class TrackingLog(CsvWriter):
    HEADER = "time,prn,doppler_hz,code_phase_chips,ip,qp,cn0_dbhz,lock_ratio,state"

    def __init__(self, path, every: int = 1, fs: float = 5e6):
        super().__init__(path)
        self.every = max(1, every)
        self.fs = fs

    def write_rows(self, prn, state_name, recs):
        fs = self.fs
        for row in recs:
            epoch = int(row[K.R_EPOCH])
            if epoch % self.every != 0:
                continue
            self.write_line(
                f"{row[K.R_END] / fs:.6f},{prn},{row[K.R_DOPPLER]:.4f},"
                f"{row[K.R_CODE_PHASE]:.6f},{row[K.R_IP]:.1f},{row[K.R_QP]:.1f},"
                f"{row[K.R_CN0]:.2f},{row[K.R_LOCK]:.4f},{state_name}")


class NavigationLog(CsvWriter):
    HEADER = ("time,lat_deg,lon_deg,alt_m,ecef_x,ecef_y,ecef_z,"
              "clock_bias_s,gdop,nsats,rms_m")

    def write_solution(self, sol):
        lat, lon, alt = ecef_to_geodetic(sol.x, sol.y, sol.z)
        self.write_line(
            f"{sol.timestamp:.6f},{math.degrees(lat):.9f},{math.degrees(lon):.9f},"
            f"{alt:.3f},{sol.x:.3f},{sol.y:.3f},{sol.z:.3f},"
            f"{sol.clock_bias:.9e},{sol.gdop:.3f},{sol.n_sats_used},"
            f"{sol.rms_error:.3f}")
        return lat, lon, alt


class AcquisitionLog(CsvWriter):
    HEADER = "block_index,prn,doppler_hz,code_phase_samples,detection_ratio,detected"

    def write_results(self, block_index, results):
        for r in results:
            ratio = min(r.detection_ratio, 1e12)
            self.write_line(f"{block_index},{r.prn},{r.doppler_hz:.1f},"
                            f"{r.code_phase_samples},{ratio:.3f},"
                            f"{int(r.detected)}")


class SessionSinks:
    """Bundle of file outputs for one receiver session."""

    def __init__(self, output_dir, fs, track_log_every=1):
        os.makedirs(output_dir, exist_ok=True)
        self.output_dir = output_dir
        self.tracking = TrackingLog(os.path.join(output_dir, "tracking.log"),
                                    every=track_log_every, fs=fs)
        self.navigation = NavigationLog(os.path.join(output_dir, "navigation.log"))
        self.acquisition = AcquisitionLog(os.path.join(output_dir, "acquisition.log"))
        self.kml_path = os.path.join(output_dir, "track.kml")
        self.metrics_path = os.path.join(output_dir, "metrics.txt")
        self._lla_points = []

    def add_solution(self, sol):
        lat, lon, alt = self.navigation.write_solution(sol)
        self._lla_points.append((lat, lon, alt))

    def finalize(self, metrics):
        if self._lla_points:
            write_kml(self.kml_path, self._lla_points)
        with open(self.metrics_path, "w") as f:
            f.write(metrics.to_text())
        self.tracking.close()
        self.navigation.close()
        self.acquisition.close()
