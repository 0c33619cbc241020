"""Synchronous Warning Propagation on a graph from a partial ±1 initialization.

Messages live on directed edges and take values in {-1, 0, +1}.  One round
replaces every message v->w by the clamp of the sum of messages incoming to v
from neighbors other than w.  The sweep is fully synchronous: reads come from
the round-t buffer, writes go to a fresh round-(t+1) buffer, so the result is
independent of update order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import FrozenAssignment, Graph

__all__ = [
    "psi",
    "psi_tilde",
    "MessageState",
    "init_messages",
    "wp_step",
    "wp_run",
    "vertex_field",
    "vertex_fields",
    "bisection_estimate",
    "cut_width",
]


def psi(x):
    """Clamp to [-1, 1]; odd, and the identity on {-1, 0, 1}."""
    if np.isscalar(x):
        return -1 if x < -1 else (1 if x > 1 else int(x))
    return np.clip(x, -1, 1)


def psi_tilde(x):
    """Sign threshold: -1 for x <= -1, +1 otherwise (ties go to +1)."""
    if np.isscalar(x):
        return -1 if x <= -1 else 1
    return np.where(np.asarray(x) <= -1, -1, 1).astype(np.int8)


@dataclass
class MessageState:
    """Message value per directed edge (indexed like Graph CSR) at round t."""

    t: int
    msg: np.ndarray  # int8, length 2m, values in {-1,0,+1}

    def copy(self) -> "MessageState":
        return MessageState(self.t, self.msg.copy())


def init_messages(g: Graph, f: FrozenAssignment) -> MessageState:
    """Round-0 state: edge v->w carries f(v) when v is in the support, else 0."""
    if f.n != g.n:
        raise ValueError("frozen assignment size does not match graph")
    return MessageState(0, f.values[g.tails].astype(np.int8))


def wp_step(g: Graph, state: MessageState) -> MessageState:
    """One synchronous round; the input state is left unmodified."""
    if state.msg.size != g.num_directed:
        raise ValueError("message array size does not match graph")
    incoming = np.bincount(g.heads, weights=state.msg, minlength=g.n).astype(np.int64)
    total = incoming[g.tails] - state.msg[g.rev]
    new = np.clip(total, -1, 1).astype(np.int8)
    return MessageState(state.t + 1, new)


def wp_run(g: Graph, f: FrozenAssignment, t: int) -> MessageState:
    """t rounds from init_messages(g, f)."""
    if t < 0:
        raise ValueError("round count must be nonnegative")
    state = init_messages(g, f)
    for _ in range(t):
        state = wp_step(g, state)
    return state


def vertex_fields(g: Graph, state: MessageState) -> np.ndarray:
    """Sum of incoming messages for every vertex."""
    return np.bincount(g.heads, weights=state.msg, minlength=g.n).astype(np.int64)


def vertex_field(g: Graph, state: MessageState, v: int) -> int:
    if not 0 <= v < g.n:
        raise ValueError(f"unknown vertex {v}")
    lo, hi = g.indptr[v], g.indptr[v + 1]
    return int(state.msg[g.rev[lo:hi]].sum())


def bisection_estimate(g: Graph, state: MessageState) -> float:
    """Half the number of incoming messages that contradict their vertex field.

    Counts directed edges w->v whose message equals -psi_tilde(sum of messages
    into v); the half-sum estimates the minimum cut separating the frozen
    classes once the messages have stabilized.
    """
    if g.num_directed == 0:
        return 0.0
    fields = vertex_fields(g, state)
    anti = -psi_tilde(fields)
    return float(np.sum(state.msg == anti[g.heads])) / 2.0


def cut_width(g: Graph, tau: np.ndarray) -> int:
    """Number of bichromatic edges under the total assignment tau."""
    tau = np.asarray(tau)
    if tau.shape != (g.n,):
        raise ValueError("assignment must be total")
    if not np.all(np.abs(tau) == 1):
        raise ValueError("assignment values must be -1 or +1")
    if g.num_edges == 0:
        return 0
    return int(np.sum(tau[g.edge_u] != tau[g.edge_v]))
