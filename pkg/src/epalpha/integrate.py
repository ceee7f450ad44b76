"""RK4 advancement with CFL step control, diagnostics, blow-up detection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import EPState, energy_kinetic, energy_l2, rhs_ep0, rhs_ep_alpha
from .grid import VelocityField
from .spectral import dealias_field, jacobian, linf_norm, linf_norm_array, sobolev_norm

ALPHA_MAX = 1.0


@dataclass(frozen=True)
class SimParams:
    """Integration parameters; `validate` enforces the standing assumptions."""

    alpha: float
    s: float
    t_end: float
    cfl: float = 0.3
    dt_max: float = 1e-2
    blowup_factor: float = 10.0
    sample_every: int = 1

    def validate(self, d: int):
        if not 0.0 <= self.alpha <= ALPHA_MAX:
            raise ValueError(f"alpha must lie in [0, {ALPHA_MAX}]")
        if not self.s > 1.0 + d / 2.0:
            raise ValueError(f"Sobolev index s={self.s} must exceed 1 + d/2 = {1 + d / 2}")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if not self.dt_max > 0:
            raise ValueError("dt_max must be positive")
        if not self.blowup_factor > 1:
            raise ValueError("blowup_factor must exceed 1")
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")

    def replace(self, **kw) -> "SimParams":
        from dataclasses import replace

        return replace(self, **kw)


@dataclass(frozen=True)
class DiagnosticsRow:
    t: float
    hs_norm: float
    l2_energy: float
    kinetic_energy_alpha: float
    linf_grad: float
    dt_used: float


DIAGNOSTICS_SCHEMA = ("t", "hs_norm", "l2_energy", "kinetic_energy_alpha", "linf_grad", "dt_used")


class BlowUpError(RuntimeError):
    """Raised when a stage goes non-finite; carries the last valid state."""

    def __init__(self, time: float, state: EPState):
        super().__init__(f"solution blew up at t={time:.6g}")
        self.time = time
        self.state = state


def make_rhs(selector):
    """Resolve 'ep_alpha' / 'ep0' / callable into an EPState -> VelocityField map."""
    if callable(selector):
        return selector
    if selector == "ep_alpha":
        return rhs_ep_alpha
    if selector == "ep0":
        return lambda state: rhs_ep0(state.u)
    raise ValueError(f"unknown right-hand side selector {selector!r}")


def step_rk4(state: EPState, dt: float, rhs) -> EPState:
    """One classical fourth-order Runge-Kutta step."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    rhs = make_rhs(rhs)
    u, t, a = state.u, state.t, state.alpha
    k1 = rhs(state)
    k2 = rhs(EPState(u + (0.5 * dt) * k1, t + 0.5 * dt, a))
    k3 = rhs(EPState(u + (0.5 * dt) * k2, t + 0.5 * dt, a))
    k4 = rhs(EPState(u + dt * k3, t + dt, a))
    u_new = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not u_new.is_finite():
        raise BlowUpError(t, state)
    return EPState(u_new, t + dt, a)


@dataclass
class IntegrationResult:
    rows: list
    final: EPState
    blown_up: bool = False
    blowup_time: float | None = None
    snapshots: list = field(default_factory=list)


def _sample(state: EPState, s: float, dt_used: float) -> DiagnosticsRow:
    grad = jacobian(state.u).reshape((-1,) + state.u.grid.shape)
    return DiagnosticsRow(
        t=state.t,
        hs_norm=sobolev_norm(state.u, s),
        l2_energy=energy_l2(state.u),
        kinetic_energy_alpha=energy_kinetic(state.u, state.alpha),
        linf_grad=linf_norm_array(state.u.grid, grad),
        dt_used=dt_used,
    )


def integrate(u0: VelocityField, params: SimParams, rhs="ep_alpha", snapshot_times=None) -> IntegrationResult:
    """Advance u0 to t_end, or stop early on blow-up.

    dt per step is min(dt_max, cfl * dx / max ||u||_inf); steps are
    shortened to land exactly on t_end and on every requested snapshot
    time, so trajectories launched with a shared snapshot list are
    sampled at identical times.  Initial data is projected onto the
    dealiased band, which the dynamics then preserve.
    """
    params.validate(u0.grid.d)
    rhs = make_rhs(rhs)
    u0 = dealias_field(u0)
    state = EPState(u0, 0.0, params.alpha)
    hs0 = sobolev_norm(u0, params.s)

    stops = sorted({float(t) for t in (snapshot_times or ()) if 0.0 < t <= params.t_end})
    want_snap = set(stops)
    snaps = [(0.0, state.u)] if snapshot_times and 0.0 in {float(t) for t in snapshot_times} else []

    rows = [_sample(state, params.s, 0.0)]
    result = IntegrationResult(rows=rows, final=state, snapshots=snaps)
    steps = 0
    stop_iter = iter(stops + [params.t_end])
    next_stop = next(stop_iter)
    eps = 1e-300
    while state.t < params.t_end:
        speed = max(linf_norm(state.u), eps)
        dt = min(params.dt_max, params.cfl * u0.grid.dx / speed)
        while next_stop <= state.t:
            next_stop = next(stop_iter)
        landing = dt >= next_stop - state.t
        if landing:
            dt = next_stop - state.t
        try:
            state = step_rk4(state, dt, rhs)
        except BlowUpError as err:
            result.blown_up = True
            result.blowup_time = err.time
            result.final = err.state
            return result
        if landing:
            state = EPState(state.u, next_stop, state.alpha)
            if next_stop in want_snap:
                snaps.append((next_stop, state.u))
        steps += 1
        hs = sobolev_norm(state.u, params.s)
        blown = not np.isfinite(hs) or (hs0 > 0 and hs > params.blowup_factor * hs0)
        if blown or steps % params.sample_every == 0 or state.t == params.t_end:
            if rows[-1].t != state.t:
                rows.append(_sample(state, params.s, dt))
        if blown:
            result.blown_up = True
            result.blowup_time = state.t
            result.final = state
            return result
        result.final = state
    return result


def doubling_time(rows) -> float | None:
    """First time the H^s norm reaches twice its initial value.

    Linear interpolation between the samples bracketing the crossing;
    None if the trajectory never crosses.
    """
    if not rows:
        raise ValueError("trajectory is empty")
    hs0 = rows[0].hs_norm
    if hs0 <= 0:
        return None
    target = 2.0 * hs0
    prev = rows[0]
    for row in rows[1:]:
        if row.hs_norm >= target:
            if row.hs_norm == prev.hs_norm:
                return row.t
            frac = (target - prev.hs_norm) / (row.hs_norm - prev.hs_norm)
            return prev.t + frac * (row.t - prev.t)
        prev = row
    return None
