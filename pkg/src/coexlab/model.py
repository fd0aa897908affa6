"""Domain types shared by the analytic and simulation engines, and the
duration calculus that turns protocol parameters into MAC-event durations.

All times are in microseconds, all rates in bits per microsecond (which is
numerically the same as Mbit/s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from coexlab.errors import InvalidParameter


def _require(cond: bool, field: str, msg: str) -> None:
    if not cond:
        raise InvalidParameter(f"{field}: {msg}", field=field)


@dataclass(frozen=True)
class EdcaClass:
    """Contention parameters of one access category.

    ``cw_min`` and ``cw_max`` are window *sizes*: at stage ``j`` the backoff
    counter is drawn uniformly from ``[0, W_j - 1]`` with
    ``W_j = min(2**j * cw_min, cw_max)``. ``aifs`` is the AIFSN in slots and
    ``retry_limit`` is the largest backoff stage index.
    """

    cw_min: int
    cw_max: int
    aifs: int
    retry_limit: int = 6

    def __post_init__(self) -> None:
        _require(isinstance(self.cw_min, int) and self.cw_min >= 1, "cw_min", "must be an integer >= 1")
        _require(isinstance(self.cw_max, int) and self.cw_max >= self.cw_min, "cw_max", "must be an integer >= cw_min")
        ratio = self.cw_max // self.cw_min
        _require(
            self.cw_max % self.cw_min == 0 and ratio & (ratio - 1) == 0,
            "cw_max",
            "must equal cw_min * 2**k",
        )
        _require(isinstance(self.aifs, int) and self.aifs >= 0, "aifs", "must be an integer >= 0")
        _require(isinstance(self.retry_limit, int) and self.retry_limit >= 0, "retry_limit", "must be an integer >= 0")

    def window(self, stage: int) -> int:
        return min(self.cw_min << stage, self.cw_max)

    def windows(self) -> list[int]:
        return [self.window(j) for j in range(self.retry_limit + 1)]


# Access categories. Window sizes are the tabulated CW values plus one
# (CW = 15 means counters 0..15, i.e. a 16-slot window).
EDCA_CLASSES: dict[str, EdcaClass] = {
    "BK": EdcaClass(cw_min=16, cw_max=1024, aifs=7),
    "BE": EdcaClass(cw_min=16, cw_max=1024, aifs=3),
    "VI": EdcaClass(cw_min=8, cw_max=16, aifs=2),
    "VO": EdcaClass(cw_min=4, cw_max=8, aifs=2),
    # Legacy DCF: BE windows with a DIFS-length deferral.
    "DCF": EdcaClass(cw_min=16, cw_max=1024, aifs=2),
}


@dataclass(frozen=True)
class MacTiming:
    sigma: float = 9.0
    sifs: float = 16.0
    difs: float = 34.0
    phy_header: float = 20.0
    ack_bits: int = 112
    rate_R: float = 58.8
    rate_Rmin: float = 6.0
    txop_limit: float = 5484.0

    def __post_init__(self) -> None:
        for name in ("sigma", "sifs", "difs", "phy_header", "ack_bits", "rate_R", "rate_Rmin", "txop_limit"):
            _require(getattr(self, name) > 0, name, "must be > 0")

    @property
    def difs_slots(self) -> int:
        """Idle slots contained in DIFS beyond SIFS (2 for the default timing)."""
        return max(int(round((self.difs - self.sifs) / self.sigma)), 0)


@dataclass(frozen=True)
class SensingProfile:
    n_tx: int = 1
    n_rx: int = 1
    n_sc: int = 242
    n_b: int = 8
    n_sta_participants_N: int = 2
    t_polling: float = 100.0
    t_cts: float = 100.0
    t_ndpa: float = 100.0
    t_ndp: float = 100.0
    report_phy_header: bool = True
    # Optional uplink (trigger-frame) sounding, absent from the CFP formula.
    uplink_sounding: bool = False
    t_tf: float = 100.0

    def __post_init__(self) -> None:
        for name in ("n_tx", "n_rx", "n_sc", "n_b", "n_sta_participants_N"):
            v = getattr(self, name)
            _require(isinstance(v, int) and v >= 1, name, "must be an integer >= 1")
        for name in ("t_polling", "t_cts", "t_ndpa", "t_ndp", "t_tf"):
            _require(getattr(self, name) > 0, name, "must be > 0")


@dataclass(frozen=True)
class PopulationMix:
    n_bf_aps: int = 1
    n_ax_aps: int = 1
    stas_per_bf: int = 2
    stas_per_ax: int = 2
    edca_bf: EdcaClass = EDCA_CLASSES["BE"]
    edca_ax: EdcaClass = EDCA_CLASSES["BE"]

    def __post_init__(self) -> None:
        _require(isinstance(self.n_bf_aps, int) and self.n_bf_aps >= 0, "n_bf_aps", "must be an integer >= 0")
        _require(isinstance(self.n_ax_aps, int) and self.n_ax_aps >= 0, "n_ax_aps", "must be an integer >= 0")
        _require(self.n_bf_aps + self.n_ax_aps >= 1, "n_bf_aps", "at least one AP is required")
        _require(self.stas_per_bf >= 1, "stas_per_bf", "must be >= 1")
        _require(self.stas_per_ax >= 1, "stas_per_ax", "must be >= 1")


@dataclass(frozen=True)
class AxTrafficProfile:
    msdu_bits: int = 1474 * 8
    mac_header_bits: int = 36 * 8
    ampdu_count: int = 64

    def __post_init__(self) -> None:
        for name in ("msdu_bits", "mac_header_bits", "ampdu_count"):
            v = getattr(self, name)
            _require(isinstance(v, int) and v >= 1, name, "must be an integer >= 1")


@dataclass(frozen=True)
class AxFrame:
    duration: float
    mpdu_count: int


@dataclass(frozen=True)
class DurationTable:
    t_f_ax: float
    t_f_bf: float
    t_s_ax: float
    t_s_bf: float
    t_c_ax: float
    t_c_bf: float
    t_c_cross: float
    sigma: float
    ax_mpdus: int = 0

    @property
    def t_cfp(self) -> float:
        return self.t_f_bf


def csi_report_size(n_tx: int, n_rx: int, n_b: int, n_sc: int) -> int:
    """CSI feedback size in octets; the quantised-matrix term rounds up."""
    for name, v in (("n_tx", n_tx), ("n_rx", n_rx), ("n_b", n_b), ("n_sc", n_sc)):
        _require(isinstance(v, int) and v >= 1, name, "must be an integer >= 1")
    antennas = n_tx * n_rx
    # ceil(1.5 * a) == (3a + 1) // 2 in integers
    return (3 * antennas + 1) // 2 + -(-(antennas * n_b * n_sc) // 4) + 2 * n_tx


def reporting_duration(csi_octets: int, rate_R: float, phy_header: float = 20.0, with_header: bool = True) -> float:
    _require(csi_octets >= 0, "csi_octets", "must be >= 0")
    _require(rate_R > 0, "rate_R", "must be > 0")
    return 8 * csi_octets / rate_R + (phy_header if with_header else 0.0)


def cfp_duration(profile: SensingProfile, timing: MacTiming, rate_R: float | None = None) -> float:
    rate = timing.rate_R if rate_R is None else rate_R
    octets = csi_report_size(profile.n_tx, profile.n_rx, profile.n_b, profile.n_sc)
    t_rep = reporting_duration(octets, rate, timing.phy_header, profile.report_phy_header)
    n = profile.n_sta_participants_N
    sifs = timing.sifs
    total = (
        profile.t_polling + sifs + profile.t_cts + sifs
        + n * (profile.t_ndpa + sifs + profile.t_ndp) + sifs
        + n * t_rep
    )
    if profile.uplink_sounding:
        total += n * (profile.t_tf + sifs + profile.t_ndp)
    return total


def ax_frame_duration(traffic: AxTrafficProfile, timing: MacTiming) -> AxFrame:
    """A-MPDU airtime, shrinking the aggregate until it fits the TXOP limit."""
    mpdu_time = (traffic.mac_header_bits + traffic.msdu_bits) / timing.rate_R
    if timing.phy_header + mpdu_time > timing.txop_limit:
        raise InvalidParameter("a single MPDU exceeds txop_limit", field="txop_limit")
    fit = int(math.floor((timing.txop_limit - timing.phy_header) / mpdu_time + 1e-9))
    count = min(traffic.ampdu_count, fit)
    return AxFrame(duration=timing.phy_header + count * mpdu_time, mpdu_count=count)


def event_durations(config) -> DurationTable:
    """Success/collision spans for both technologies from a ScenarioConfig."""
    timing: MacTiming = config.timing
    frame = ax_frame_duration(config.traffic, timing)
    t_cfp = cfp_duration(config.sensing, timing)
    t_s_ax = frame.duration + timing.difs + timing.sifs + timing.phy_header + timing.ack_bits / timing.rate_Rmin
    t_s_bf = t_cfp + timing.difs
    t_c_ax = frame.duration + timing.difs
    t_c_bf = t_cfp + timing.difs
    return DurationTable(
        t_f_ax=frame.duration,
        t_f_bf=t_cfp,
        t_s_ax=t_s_ax,
        t_s_bf=t_s_bf,
        t_c_ax=t_c_ax,
        t_c_bf=t_c_bf,
        t_c_cross=max(t_c_ax, t_c_bf),
        sigma=timing.sigma,
        ax_mpdus=frame.mpdu_count,
    )
