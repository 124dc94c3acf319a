"""TASEP with a second-class particle, driven by the clocks of the LPP weights.

Only the particles 0..m and holes 0..n of the window are tracked, on a
compressed lattice: particle i >= 1 starts at -i, hole 0 at 0, particle 0
at 1 and hole j >= 1 at j + 1.  Particle i and hole j swap once particle
i - 1 has passed hole j and particle i has passed hole j - 1, after a
waiting time equal to the weight at (i, j).  The second-class particle is
the tagged adjacent pair (hole J, particle I).
"""

import heapq
import json
from dataclasses import dataclass, field

import numpy as np

from . import lpp
from .bulk import stationary_cif_walk
from .errors import InvariantError, ParameterError
from .geometry import Rect
from .noise import AUX, MAIN, generate_noise, uniforms
from .report import McReport, fmt
from .weights import TwoParam, build_weights

EMPTY, FIRST, SECOND = 0, 1, 2


def _rates(w, z):
    if not (0 < w <= 1 and 0 <= z < 1):
        raise ParameterError(f"TASEP coupling needs w in (0, 1] and z in [0, 1), got {(w, z)}")


def _window(m, n):
    if m < 1 or n < 1:
        raise ParameterError(f"window needs m, n >= 1, got {(m, n)}")


def coupled_weights(w, z, m, n, seed, replica=0):
    _rates(w, z)
    noise = generate_noise(seed, replica, Rect(0, 0, m, n), MAIN)
    return build_weights(noise, TwoParam(w, z))


def swap_times_from_lpp(w, z, m, n, seed, replica=0):
    """Boundary-model last-passage table on [0, m] x [0, n]; entry (i, j) is the
    swap time of particle i and hole j."""
    _window(m, n)
    return lpp.last_passage_table(coupled_weights(w, z, m, n, seed, replica))


def initial_configuration(w, z, m, n, seed, replica=0):
    """Two-sided Bernoulli occupations on -m..n around the second-class
    particle at 0 (w to the left, z to the right), from the auxiliary stream.
    Exported with the trace; the window dynamics do not read it."""
    _rates(w, z)
    u = uniforms(seed, replica, AUX, 0, np.arange(m + n + 1))
    occ = {}
    for k, x in enumerate(range(-m, n + 1)):
        if x == 0:
            occ[x] = SECOND
        else:
            occ[x] = FIRST if u[k] < (w if x < 0 else z) else EMPTY
    return occ


@dataclass
class TasepState:
    """Positions on the compressed lattice at clock t."""
    t: float
    particles: np.ndarray
    holes: np.ndarray
    I: int = 0
    J: int = 0

    @property
    def X(self):
        return self.J - self.I

    def occupation(self):
        """Sites with the tagged pair merged into the second-class particle:
        site -> EMPTY / FIRST / SECOND."""
        occ = {int(p): FIRST for p in self.particles}
        occ.update({int(h): EMPTY for h in self.holes})
        x = int(self.holes[self.J])
        out = {}
        for s, v in occ.items():
            if s < x:
                out[s] = v
            elif s > x + 1:
                out[s - 1] = v
        out[x] = SECOND
        return dict(sorted(out.items()))

    def check(self):
        sites = np.concatenate([self.particles, self.holes])
        if np.unique(sites).size != sites.size:
            raise InvariantError("two occupants on one site")
        if (np.diff(self.particles) >= 0).any():
            raise InvariantError("first-class particles changed order")
        if (np.diff(self.holes) <= 0).any():
            raise InvariantError("holes changed order")
        if self.particles[self.I] != self.holes[self.J] + 1:
            raise InvariantError("tagged hole and particle are not adjacent")
        if self.holes[self.J] != self.X:
            raise InvariantError("second-class site differs from J - I")


@dataclass
class TasepRun:
    w: float
    z: float
    m: int
    n: int
    swap_times: np.ndarray
    events: list = field(default_factory=list)
    second_class: list = field(default_factory=list)
    initial: dict = field(default_factory=dict)
    final: TasepState = None

    def trace_json(self):
        """Event list: {t, site, kind} with kind jump / second-left / second-right."""
        ev = [{"t": fmt(t), "site": s, "kind": k} for t, s, k, *_ in self.events]
        return json.dumps({"w": self.w, "z": self.z, "m": self.m, "n": self.n,
                           "initial": {str(k): v for k, v in self.initial.items()},
                           "events": ev}, indent=1)


def simulate_tasep(w, z, m, n, seed, replica=0, horizon=None, check=True):
    """Event-driven window dynamics; returns a TasepRun.

    ``horizon`` caps the clock; the window must complete before it."""
    _window(m, n)
    wf = coupled_weights(w, z, m, n, seed, replica)
    clock = np.asarray(wf.values)
    T = np.full((m + 1, n + 1), np.nan)
    T[0, 0] = 0.0
    st = TasepState(0.0, -np.arange(m + 1, dtype=np.int64), np.arange(n + 1, dtype=np.int64) + 1)
    st.particles[0], st.holes[0] = 1, 0
    if check:
        st.check()
    run = TasepRun(w, z, m, n, T, initial=initial_configuration(w, z, m, n, seed, replica))
    run.second_class.append((0.0, 0, 0))
    heap = [(clock[1, 0], 1, 0), (clock[0, 1], 0, 1)]
    heapq.heapify(heap)
    left = (m + 1) * (n + 1) - 1
    while heap:
        t, i, j = heapq.heappop(heap)
        if horizon is not None and t > horizon:
            raise InvariantError(f"horizon {horizon} exhausted with {left} swaps pending")
        p, h = st.particles[i], st.holes[j]
        if p + 1 != h:
            raise InvariantError(f"particle {i} at {p} is not next to hole {j} at {h}")
        st.particles[i], st.holes[j] = h, p
        st.t = t
        T[i, j] = t
        left -= 1
        run.events.append((t, int(h), "jump", i, j))
        if (i, j) == (st.I + 1, st.J):
            st.I += 1
            run.events.append((t, st.X, "second-left", i, j))
            run.second_class.append((t, st.I, st.J))
        elif (i, j) == (st.I, st.J + 1):
            st.J += 1
            run.events.append((t, st.X, "second-right", i, j))
            run.second_class.append((t, st.I, st.J))
        if check:
            st.check()
        if i + 1 <= m and (j == 0 or not np.isnan(T[i + 1, j - 1])):
            heapq.heappush(heap, (clock[i + 1, j] + max(t, T[i + 1, j - 1] if j else t), i + 1, j))
        if j + 1 <= n and (i == 0 or not np.isnan(T[i - 1, j + 1])):
            heapq.heappush(heap, (clock[i, j + 1] + max(t, T[i - 1, j + 1] if i else t), i, j + 1))
    if left:
        raise InvariantError(f"event queue ran dry with {left} swaps pending")
    run.final = st
    return run


def pair_at(times, I, J, t):
    """(I, J) in force at clock t from a (time, I, J) jump list."""
    k = int(np.searchsorted(times, t, side="right")) - 1
    return int(I[k]), int(J[k])


def second_class_vs_cif(w, z, n, seed, replica=0, m=None):
    """(I_t, J_t) of the simulation against the running maxima of the
    boundary-model interface coordinates below level t, at every event time
    up to the last interface point inside the window."""
    m = n if m is None else m
    run = simulate_tasep(w, z, m, n, seed, replica)
    table = swap_times_from_lpp(w, z, m, n, seed, replica)
    P = stationary_cif_walk(table).points
    G = np.array([table(tuple(p)) for p in P])
    tmax = G[-1]
    st = np.array([e[0] for e in run.second_class])
    sI = np.array([e[1] for e in run.second_class])
    sJ = np.array([e[2] for e in run.second_class])
    rep = McReport("tasep", 1, metadata={"seed": int(seed), "w": w, "z": z, "m": m, "n": n})
    mismatch = None
    checked = 0
    lastI = lastJ = 0
    monotone = True
    for ev in run.events:
        t = ev[0]
        if t > tmax:
            break
        k = int(np.searchsorted(G, t, side="right"))
        fI, fJ = int(P[:k, 0].max()), int(P[:k, 1].max())
        si, sj = pair_at(st, sI, sJ, t)
        checked += 1
        monotone &= fI >= lastI and fJ >= lastJ
        lastI, lastJ = fI, fJ
        if (si, sj) != (fI, fJ) and mismatch is None:
            mismatch = {"t": fmt(t), "site": ev[1], "kind": ev[2], "simulated": [si, sj],
                        "interface": [fI, fJ]}
    swap_err = float(np.nanmax(np.abs(run.swap_times - table.G)))
    rep.estimates.update(swap_max_abs_err=swap_err, events_checked=checked)
    rep.checks["swap_times"] = swap_err <= 1e-9
    rep.checks["second_class"] = mismatch is None
    rep.checks["monotone"] = bool(monotone)
    if mismatch is not None:
        rep.metadata["first_mismatch"] = mismatch
    rep.run = run
    return rep
