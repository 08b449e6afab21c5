"""NR FR2 frame model and common-signalling schedules for a beam-hopping sweep.

Slots are 14 OFDM symbols by 132 PRBs. SSB bursts follow the 120 kHz pattern
(two SSB per slot pair half, none in every fifth slot pair). Each hop gets a
symbol window inside its slot; fixed resources (SS1, SSB, CORESET0) are laid
down first and the PDSCH messages are packed greedily in a fixed order using
only the (PRB x symbol) shapes of the catalog.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InvalidSpec, SchemeInfeasible

QPSK_BITS = 2
CODE_RATE = 449 / 1024
DMRS_RE_PER_PRB = 3
SUPER_PERIOD_MS = 160.0
SCHEMES = ("HalfSlot", "FullSlot", "ExtraSweep", "ExtraSweep160")

# required SNR (dB) at 1% BLER
REQUIRED_SNR_DB = {
    "SSB": -6.3,
    "PDCCH": -6.0,
    "MSG2": -10.9,
    "MSG4": -5.2,
    "SIB1": -5.8,
    "SIB19": -6.9,
    "DATA_1MBPS": -4.1,
}

# first SSB symbol for SSB index mod 4
SSB_START = (4, 8, 2, 6)
# slot pairs without SSB inside a 40-slot half frame
_EMPTY_PAIRS = (4, 9, 14, 19)


@dataclass(frozen=True)
class FrameConfig:
    subcarrier_spacing_khz: float = 120.0
    symbols_per_slot: int = 14
    slot_duration_ms: float = 0.125
    slots_per_half_frame: int = 40
    total_prbs: int = 132
    ssb_period_ms: float = 20.0
    max_ssb_per_half_frame: int = 64
    ssb_prb_start: int = 48

    def __post_init__(self):
        if not math.isclose(self.slot_duration_ms, 15.0 / self.subcarrier_spacing_khz):
            raise InvalidSpec("slot duration does not match the subcarrier spacing")
        if self.ssb_period_ms not in (20.0, 160.0):
            raise InvalidSpec(f"SSB period must be 20 or 160 ms, got {self.ssb_period_ms}")
        if self.ssb_prb_start < 48 or self.ssb_prb_start + 20 > self.total_prbs:
            raise InvalidSpec("SSB and CORESET0 must fit inside the carrier")

    @property
    def half_frame_ms(self) -> float:
        return self.slots_per_half_frame * self.slot_duration_ms

    @property
    def slots_per_period(self) -> int:
        return int(round(self.ssb_period_ms / self.slot_duration_ms))

    @property
    def half_frames_per_period(self) -> int:
        return int(round(self.ssb_period_ms / self.half_frame_ms))

    @property
    def periods_per_super_period(self) -> int:
        return int(round(SUPER_PERIOD_MS / self.ssb_period_ms))


@dataclass(frozen=True)
class SignalResource:
    signal: str
    payload_bits: int
    prbs: int
    symbols: int
    ue: int = 0
    periodicity_ms: float | None = None

    @property
    def res(self) -> int:
        return self.prbs * self.symbols * 12


def default_catalog() -> tuple[SignalResource, ...]:
    """Resource shapes per signal; several shapes per signal are alternatives."""
    r = SignalResource
    return (
        r("SSB", 0, 20, 4),
        r("CORESET0", 0, 48, 2),
        r("CORESET1", 0, 132, 1),
        r("SIB1", 1280, 70, 2, periodicity_ms=160.0),
        r("SIB19", 616, 33, 4, periodicity_ms=160.0),
        r("PAGING", 1280, 70, 2, ue=32),
        r("PAGING", 1280, 33, 4, ue=32),
        r("PAGING", 1280, 22, 6, ue=32),
        r("PAGING", 600, 34, 2, ue=15),
        r("PAGING", 600, 16, 4, ue=15),
        r("MSG2", 630, 11, 6, ue=9),
        r("MSG2", 560, 15, 4, ue=8),
        r("MSG2", 490, 27, 2, ue=7),
        r("MSG4", 1040, 57, 2, ue=1),
        r("MSG4", 1040, 27, 4, ue=1),
        r("MSG4", 1040, 18, 6, ue=1),
        r("MSG4", 1040, 8, 13, ue=1),
    )


def required_res(payload_bits: int, bits_per_re: float = QPSK_BITS * CODE_RATE) -> int:
    """Resource elements needed to carry ``payload_bits`` at the given spectral efficiency."""
    if payload_bits < 0:
        raise ValueError("payload must be non-negative")
    return math.ceil(payload_bits / bits_per_re)


def usable_res(prbs: int, symbols: int, overhead: int = DMRS_RE_PER_PRB) -> int:
    """REs left for data in a PDSCH block after ``overhead`` REs per PRB and symbol group."""
    return prbs * (12 * symbols - overhead)


def ssb_burst_layout(fc: FrameConfig, ssb_per_slot: int = 2) -> list[tuple[int, int, int]]:
    """(ssb_index, slot, start_symbol) for one half frame.

    With one SSB per slot only the first SSB position of each SSB-bearing
    slot is used, so 32 of the 64 positions are active.
    """
    if ssb_per_slot not in (1, 2):
        raise ValueError("ssb_per_slot must be 1 or 2")
    pairs = [n for n in range(fc.slots_per_half_frame // 2) if n not in _EMPTY_PAIRS]
    out = []
    for k, n in enumerate(pairs):
        for half in range(2):
            slot = 2 * n + half
            if ssb_per_slot == 2:
                for j in range(2):
                    idx = 4 * k + 2 * half + j
                    out.append((idx, slot, SSB_START[idx % 4]))
            else:
                idx = 2 * k + half
                out.append((idx, slot, SSB_START[(2 * idx) % 4]))
    return out


def ssb_slots(fc: FrameConfig) -> list[int]:
    """Slots of a half frame that carry SSB."""
    return sorted({slot for _, slot, _ in ssb_burst_layout(fc, 1)})


# ---------------------------------------------------------------- packing


@dataclass(frozen=True)
class Allocation:
    slot: int
    start_symbol: int
    n_symbols: int
    start_prb: int
    n_prbs: int
    signal: str
    ih: int = -1
    ssbi: int = -1
    ue: int = 0


class SlotGrid:
    """Occupancy of one slot's (symbol, PRB) grid, restricted to a symbol window."""

    def __init__(self, n_symbols: int, n_prbs: int, window: tuple[int, int]):
        self.busy = np.ones((n_symbols, n_prbs), dtype=bool)
        self.busy[window[0] : window[1] + 1] = False

    def occupy(self, s: int, h: int, p: int, w: int):
        if self.busy[s : s + h, p : p + w].any():
            raise ValueError("allocation overlaps an occupied region")
        self.busy[s : s + h, p : p + w] = True

    def best_position(self, h: int, w: int):
        """Free (symbol, prb) maximising the contact ratio with occupied cells and borders.

        Ties go to the lowest symbol, then the lowest PRB.
        """
        n_s, n_p = self.busy.shape
        if h > n_s or w > n_p:
            return None
        pad = np.ones((n_s + 2, n_p + 2), dtype=np.int64)
        pad[1:-1, 1:-1] = self.busy
        ii = np.zeros((n_s + 3, n_p + 3), dtype=np.int64)
        ii[1:, 1:] = pad.cumsum(0).cumsum(1)

        def box(r0, c0, hh, ww):
            # sum of pad[r0:r0+hh, c0:c0+ww] for arrays of corners
            return ii[r0 + hh, c0 + ww] - ii[r0, c0 + ww] - ii[r0 + hh, c0] + ii[r0, c0]

        s = np.arange(n_s - h + 1)[:, None]
        p = np.arange(n_p - w + 1)[None, :]
        inner = box(s + 1, p + 1, h, w)
        free = inner == 0
        if not free.any():
            return None
        touch = box(s, p + 1, 1, w) + box(s + h + 1, p + 1, 1, w) + box(s + 1, p, h, 1) + box(s + 1, p + w + 1, h, 1)
        score = np.where(free, touch, -1)
        best = score.max()
        cand = np.argwhere(score == best)
        # argwhere is row-major, so the first hit has the lowest symbol then PRB
        r, c = cand[0]
        return int(r), int(c), best / (2 * (w + h))


def _place_class(grid: SlotGrid, shapes):
    """Place the best-contact shape among ``shapes`` [(prbs, symbols, payload)]."""
    best = None
    for prbs, syms, extra in shapes:
        pos = grid.best_position(syms, prbs)
        if pos is None:
            continue
        key = (pos[2], -pos[0], -pos[1])
        if best is None or key > best[0]:
            best = (key, pos[0], pos[1], prbs, syms, extra)
    if best is None:
        return None
    _, s, p, prbs, syms, extra = best
    grid.occupy(s, syms, p, prbs)
    return s, syms, p, prbs, extra


@dataclass(frozen=True)
class HopTemplate:
    """What one hop's resources look like inside its slot (slot-relative)."""

    blocks: tuple[Allocation, ...]

    def count(self, signal: str) -> int:
        return sum(1 for b in self.blocks if b.signal == signal)

    def ue(self, signal: str) -> int:
        return sum(b.ue for b in self.blocks if b.signal == signal)


def _shapes(catalog, signal):
    rows = [c for c in catalog if c.signal == signal]
    by_ue: dict[int, list] = {}
    for c in rows:
        by_ue.setdefault(c.ue, []).append((c.prbs, c.symbols, c.ue))
    # higher-capacity classes first
    return [by_ue[k] for k in sorted(by_ue, reverse=True)]


@lru_cache(maxsize=None)
def hop_template(
    window: tuple[int, int],
    ssb_start: int | None,
    ss1: bool,
    contents: tuple[str, ...],
    fc: FrameConfig = FrameConfig(),
    catalog: tuple[SignalResource, ...] | None = None,
) -> HopTemplate:
    """Pack one hop: fixed resources, then ``contents`` in order.

    ``contents`` names signals to place once each, in order; ``"MSG4*"``
    fills the remaining space with as many MSG4 as fit.
    """
    catalog = catalog or default_catalog()
    grid = SlotGrid(fc.symbols_per_slot, fc.total_prbs, window)
    blocks = []
    if ss1:
        grid.occupy(0, 1, 0, fc.total_prbs)
        blocks.append(Allocation(0, 0, 1, 0, fc.total_prbs, "CORESET1"))
    if ssb_start is not None:
        p = fc.ssb_prb_start
        grid.occupy(ssb_start, 4, p, 20)
        blocks.append(Allocation(0, ssb_start, 4, p, 20, "SSB"))
        grid.occupy(ssb_start, 2, p - 48, 48)
        blocks.append(Allocation(0, ssb_start, 2, p - 48, 48, "CORESET0"))
    for item in contents:
        signal = item.rstrip("*")
        classes = _shapes(catalog, signal)
        repeat = item.endswith("*")
        while True:
            placed = None
            for cls in classes:
                placed = _place_class(grid, cls)
                if placed:
                    break
            if placed is None:
                break
            s, h, p, w, ue = placed
            blocks.append(Allocation(0, s, h, p, w, signal, ue=ue))
            if not repeat:
                break
    return HopTemplate(tuple(blocks))


# ---------------------------------------------------------------- schedules


@dataclass(frozen=True)
class HopSlot:
    """Where and how one hop of one sweep is transmitted within the period."""

    ih: int
    slot: int
    ssbi: int
    template: HopTemplate
    sweep: str


@dataclass
class ScheduleResult:
    scheme: str
    n_hops: int
    fc: FrameConfig
    hops: list[HopSlot]
    cs_slots: int
    total_slots: int
    coverage_ratio: float
    period_index: int = 0
    msg4_coscheduled: bool = True
    meta: dict = field(default_factory=dict)

    @property
    def cs_efficiency(self) -> float:
        """Fraction of slots in the SSB period left free of common signalling."""
        return 1.0 - self.cs_slots / self.total_slots

    @property
    def cs_efficiency_pct(self) -> float:
        """CS efficiency in percent to one decimal, rounded half up on the exact slot ratio."""
        frac = 1 - Fraction(self.cs_slots, self.total_slots)
        return math.floor(frac * 1000 + Fraction(1, 2)) / 10

    @property
    def cs_ratio(self) -> float:
        """Fraction of slots carrying common signalling."""
        return self.cs_slots / self.total_slots

    @property
    def allocations(self) -> list[Allocation]:
        out = []
        for hs in self.hops:
            for b in hs.template.blocks:
                out.append(
                    Allocation(hs.slot, b.start_symbol, b.n_symbols, b.start_prb, b.n_prbs, b.signal, hs.ih, hs.ssbi, b.ue)
                )
        return out


def _sib_for_period(period_index: int, fc: FrameConfig) -> str | None:
    """SIB carried in the given SSB period of the 160 ms super-period."""
    if fc.periods_per_super_period == 1:
        return "BOTH"
    k = period_index % fc.periods_per_super_period
    return {0: "SIB1", 1: "SIB19"}.get(k)


def _sib_items(sib: str | None) -> tuple[str, ...]:
    if sib == "BOTH":
        return ("SIB1", "SIB19")
    return (sib,) if sib else ()


def _half_slot_window(ssbi: int) -> tuple[tuple[int, int], int, bool]:
    start = SSB_START[ssbi % 4]
    window = {0: (0, 7), 1: (8, 13), 2: (0, 5), 3: (6, 13)}[ssbi % 4]
    # only type-A cells (SSB index mod 4 in {0, 2}) carry SS1 at symbol 0
    return window, start, ssbi % 4 in (0, 2)


def _co_scheduled(window, start, ss1, sib, with_ra=True, with_msg4=True, fc=FrameConfig()):
    items = _sib_items(sib)
    if with_msg4:
        # one MSG4 is reserved first so every beam keeps a contention-resolution slot
        items += ("MSG4",)
    items += ("PAGING",)
    if with_ra:
        items += ("MSG2",)
    if with_msg4:
        items += ("MSG4*",)
    return hop_template(window, start, ss1, items, fc)


def build_schedule(
    scheme: str,
    n_hops: int,
    fc: FrameConfig | None = None,
    period_index: int = 0,
    msg4_coscheduled: bool = False,
    strict: bool = False,
    msg4_shift_half_frames: int | None = None,
    ra: "RaTiming | None" = None,
) -> ScheduleResult:
    """Lay out one SSB period of the common-signalling sweep.

    Hops that do not fit in the period are dropped and lower the coverage
    ratio; with ``strict`` they raise :class:`SchemeInfeasible` instead.
    ``msg4_coscheduled`` applies to ``ExtraSweep160`` only and keeps MSG4 in
    the first sweep (no separate MSG4 sweep).
    """
    if scheme not in SCHEMES:
        raise InvalidSpec(f"unknown scheme {scheme!r}")
    if n_hops < 1:
        raise InvalidSpec("n_hops must be >= 1")
    fc = fc or FrameConfig(ssb_period_ms=160.0 if scheme == "ExtraSweep160" else 20.0)
    if scheme == "ExtraSweep160" and fc.ssb_period_ms != 160.0:
        raise InvalidSpec("ExtraSweep160 needs a 160 ms SSB period")
    ra = ra or RaTiming()
    sib = _sib_for_period(period_index, fc)
    hf_slots = fc.slots_per_half_frame
    n_hf = fc.half_frames_per_period
    hops: list[HopSlot] = []
    layout2 = ssb_burst_layout(fc, 2)
    layout1 = ssb_burst_layout(fc, 1)
    meta: dict = {}

    def half_slot_sweep(with_ra, with_msg4, first_hf=0):
        per = len(layout2)
        need = math.ceil(n_hops / per)
        done = 0
        for ih in range(n_hops):
            hf = first_hf + ih // per
            if hf >= n_hf:
                break
            ssbi, slot, start = layout2[ih % per]
            window, start, ss1 = _half_slot_window(ssbi)
            tpl = _co_scheduled(window, start, ss1, sib, with_ra, with_msg4, fc)
            hops.append(HopSlot(ih, hf * hf_slots + slot, ssbi, tpl, "ssb"))
            done += 1
        return done, need

    def full_slot_sweep(items_fn, first_hf=0, sweep="ssb", with_ssb=True):
        if with_ssb:
            per = len(layout1)
        else:
            per = hf_slots
        need = math.ceil(n_hops / per)
        done = 0
        for ih in range(n_hops):
            hf = first_hf + ih // per
            if hf >= n_hf:
                break
            if with_ssb:
                ssbi, slot, start = layout1[ih % per]
            else:
                ssbi, slot, start = -1, ih % per, None
            tpl = hop_template((0, fc.symbols_per_slot - 1), start, True, items_fn(), fc)
            hops.append(HopSlot(ih, hf * hf_slots + slot, ssbi, tpl, sweep))
            done += 1
        return done, need

    if scheme == "HalfSlot":
        done, need = half_slot_sweep(True, True)
        covered = done
    elif scheme == "FullSlot":
        done, need = full_slot_sweep(lambda: _sib_items(sib) + ("PAGING", "MSG2", "MSG4*"))
        covered = done
    elif scheme == "ExtraSweep":
        done1, need1 = half_slot_sweep(False, False)
        first = min(need1, n_hf)
        done2, need2 = full_slot_sweep(lambda: ("MSG2", "MSG4*"), first_hf=first, sweep="extra", with_ssb=False)
        covered = min(done1, done2)
        need = need1 + need2
    else:
        if msg4_coscheduled:
            done, need = full_slot_sweep(lambda: _sib_items(sib) + ("PAGING", "MSG2", "MSG4*"))
            covered = done
        else:
            done1, need1 = full_slot_sweep(lambda: _sib_items(sib) + ("PAGING", "MSG2"))
            shift = msg4_shift_half_frames
            if shift is None:
                shift = max(need1, math.ceil(ra.min_turnaround_ms / fc.half_frame_ms))
            meta["msg4_shift_half_frames"] = shift
            done2, need2 = full_slot_sweep(lambda: ("MSG4*",), first_hf=shift, sweep="msg4")
            covered = min(done1, done2)
            need = need1 + need2
    coverage = min(covered / n_hops, 1.0)
    meta["half_frames_needed"] = need
    if strict and coverage < 1.0:
        raise SchemeInfeasible(f"{scheme} covers only {covered} of {n_hops} hops in one SSB period")
    cs_slots = len({h.slot for h in hops})
    return ScheduleResult(
        scheme=scheme,
        n_hops=n_hops,
        fc=fc,
        hops=hops,
        cs_slots=cs_slots,
        total_slots=fc.slots_per_period,
        coverage_ratio=coverage,
        period_index=period_index,
        msg4_coscheduled=msg4_coscheduled,
        meta=meta,
    )


def check_overlaps(result: ScheduleResult) -> list[tuple[Allocation, Allocation]]:
    """Pairs of allocations sharing a (slot, symbol, PRB) cell."""
    clashes = []
    by_slot: dict[int, list[Allocation]] = {}
    for a in result.allocations:
        by_slot.setdefault(a.slot, []).append(a)
    for allocs in by_slot.values():
        grid = np.full((result.fc.symbols_per_slot, result.fc.total_prbs), -1)
        for k, a in enumerate(allocs):
            cell = grid[a.start_symbol : a.start_symbol + a.n_symbols, a.start_prb : a.start_prb + a.n_prbs]
            hit = np.unique(cell[cell >= 0])
            clashes.extend((allocs[j], a) for j in hit)
            cell[...] = k
    return clashes


# ---------------------------------------------------------------- KPIs


@dataclass(frozen=True)
class Kpis:
    coverage_ratio: float
    cs_efficiency: float
    cs_slots: int
    total_slots: int
    msg4_per_s: float
    paging_ue_per_s: float
    worst_ssbi: int


def kpis(result: ScheduleResult) -> Kpis:
    """Coverage, CS efficiency and worst-beam MSG4/paging capacity.

    Capacities count what each hop carries over every SSB period of the
    160 ms super-period (SIB1 and SIB19 rotate through it) and report the
    worst hop.
    """
    fc = result.fc
    n_periods = fc.periods_per_super_period
    msg4 = {}
    paging = {}
    for k in range(n_periods):
        res = build_schedule(result.scheme, result.n_hops, fc, k, result.msg4_coscheduled)
        for hs in res.hops:
            msg4[hs.ih] = msg4.get(hs.ih, 0) + hs.template.count("MSG4")
            if hs.template.count("PAGING"):
                paging[hs.ih] = min(paging.get(hs.ih, 10**9), hs.template.ue("PAGING"))
    worst = min(msg4, key=lambda ih: (msg4[ih], ih)) if msg4 else -1
    span_s = SUPER_PERIOD_MS / 1000.0
    per_period_s = fc.ssb_period_ms / 1000.0
    ssbi = {h.ih: h.ssbi for h in result.hops}
    return Kpis(
        coverage_ratio=result.coverage_ratio,
        cs_efficiency=result.cs_efficiency,
        cs_slots=result.cs_slots,
        total_slots=result.total_slots,
        msg4_per_s=(msg4[worst] / span_s) if msg4 else 0.0,
        paging_ue_per_s=(min(paging.values()) / per_period_s) if paging else 0.0,
        worst_ssbi=ssbi.get(worst, -1),
    )


def worst_half_slot(fc: FrameConfig | None = None, period_index: int = 0) -> dict:
    """Content of the poorest half-slot hop (fewest MSG4, then smallest paging)."""
    fc = fc or FrameConfig()
    rows = []
    for r in range(4):
        window, start, ss1 = _half_slot_window(r)
        tpl = _co_scheduled(window, start, ss1, _sib_for_period(period_index, fc), fc=fc)
        rows.append((tpl.count("MSG4"), tpl.ue("PAGING"), r, tpl))
    m4, pg, r, tpl = min(rows, key=lambda t: (t[0], t[1], t[2]))
    return {"ssbi_mod4": r, "msg4": m4, "paging_ue": pg, "msg2_ue": tpl.ue("MSG2")}


# ---------------------------------------------------------------- RA timing


@dataclass(frozen=True)
class RaTiming:
    """Random-access timing limits.

    ``round_trip_ms`` defaults to the service-link round trip at a 30 deg
    elevation from 1300 km.
    """

    grant_delay_slots: int = 32
    max_grant_delay_slots: int = 32
    contention_timer_ms: float = 64.0
    round_trip_ms: float = 14.3
    slot_ms: float = 0.125

    @property
    def min_turnaround_ms(self) -> float:
        return self.grant_delay_slots * self.slot_ms + self.round_trip_ms


@dataclass(frozen=True)
class RaViolation:
    ih: int
    kind: str
    value_ms: float


def validate_ra_timing(result: ScheduleResult, ra: RaTiming | None = None) -> list[RaViolation]:
    """MSG2 to MSG4 latency and grant delay checks for every hop.

    All SSB periods of the 160 ms super-period are laid out back to back
    (the super-period then repeats). A MSG2 is answered by the first MSG4 of
    the same hop sent at least ``min_turnaround_ms`` later.
    """
    ra = ra or RaTiming()
    out: list[RaViolation] = []
    if ra.grant_delay_slots > ra.max_grant_delay_slots:
        out.append(RaViolation(-1, "grant_delay", ra.grant_delay_slots * ra.slot_ms))
    fc = result.fc
    slot_ms = fc.slot_duration_ms
    msg2: dict[int, list[float]] = {}
    msg4: dict[int, list[float]] = {}
    for k in range(fc.periods_per_super_period):
        res = build_schedule(
            result.scheme,
            result.n_hops,
            fc,
            k,
            result.msg4_coscheduled,
            msg4_shift_half_frames=result.meta.get("msg4_shift_half_frames"),
            ra=ra,
        )
        for hs in res.hops:
            t = k * fc.ssb_period_ms + hs.slot * slot_ms
            if hs.template.count("MSG2"):
                msg2.setdefault(hs.ih, []).append(t)
            if hs.template.count("MSG4"):
                msg4.setdefault(hs.ih, []).append(t)
    span = SUPER_PERIOD_MS
    for ih in sorted(msg2):
        if ih not in msg4:
            out.append(RaViolation(ih, "no_msg4", math.inf))
            continue
        for t2 in msg2[ih]:
            earliest = t2 + ra.min_turnaround_ms
            lat = min(t4 + span * math.ceil((earliest - t4) / span - 1e-12) for t4 in msg4[ih]) - t2
            if lat > ra.contention_timer_ms + 1e-9:
                out.append(RaViolation(ih, "msg4_latency", lat))
    return out


# ---------------------------------------------------------------- cells and timeline


@dataclass(frozen=True)
class Cell:
    cell_id: int
    beam_ids: tuple[int, ...]
    cell_type: str


@dataclass(frozen=True)
class CellMap:
    cells: tuple[Cell, ...]
    max_beams_per_cell: int

    def cell_of(self) -> dict[int, int]:
        return {b: c.cell_id for c in self.cells for b in c.beam_ids}


def beam_to_cell(plan, max_beams_per_cell: int = 32) -> CellMap:
    """Group beams of consecutive hop indexes into cells.

    Beams share a cell when they sit in the same super-block tile, in the
    same pass of the hop cycle inside it, and in the same run of
    ``max_beams_per_cell`` consecutive hop indexes.
    """
    if max_beams_per_cell < 1:
        raise ValueError("max_beams_per_cell must be >= 1")
    period_rows = plan.blocks_per_super_block * plan.n_rows
    tile_r = np.floor_divide(plan.row, period_rows)
    tile_c = np.floor_divide(plan.col, plan.n_cols)
    pos = np.mod(plan.row, period_rows) * plan.n_cols + np.mod(plan.col, plan.n_cols)
    cycle = pos // plan.n_hops
    group = plan.index // max_beams_per_cell
    keys = np.column_stack([tile_r, tile_c, cycle, group])
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    cells = []
    for cid in range(len(uniq)):
        beams = tuple(int(b) for b in np.flatnonzero(inverse == cid))
        g = int(uniq[cid, 3])
        if max_beams_per_cell == 1:
            kind = "single"
        else:
            kind = "A" if g % 2 == 0 else "B"
        cells.append(Cell(cid, beams, kind))
    return CellMap(tuple(cells), max_beams_per_cell)


def timeline(result: ScheduleResult) -> list[dict]:
    """Per half frame: number of CS slots and a data / shared / cs label."""
    fc = result.fc
    per_hf = np.zeros(fc.half_frames_per_period, dtype=int)
    for s in {h.slot for h in result.hops}:
        per_hf[s // fc.slots_per_half_frame] += 1
    out = []
    for k, n in enumerate(per_hf):
        label = "data" if n == 0 else ("cs" if n == fc.slots_per_half_frame else "shared")
        out.append({"half_frame": k, "start_ms": k * fc.half_frame_ms, "cs_slots": int(n), "kind": label})
    return out
