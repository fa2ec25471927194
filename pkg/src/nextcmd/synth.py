"""Seeded Markov-chain event corpora with known cleansing artifacts.

A :class:`MarkovSpec` describes a first- or second-order chain over rendered
token bases.  :func:`generate` samples sessions from it, then injects the
three kinds of noise the cleansing stage removes (excluded-type events,
same-millisecond duplicates, and millisecond-spaced repeat runs) while
recording exactly how many of each were injected.

:func:`bayes_optimal_accuracy` gives the best expected accuracy any
classifier can reach on command rows drawn from the chain.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from importlib import resources
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ConfigError
from .events import COMMAND_EVENT, EXCLUDED, EventCategory, RawEvent, Session, classify_event_type, parse_token

EPOCH = datetime(2017, 3, 1, tzinfo=timezone.utc)
DAY_MS = 86_400_000
EXCLUDED_TYPES = tuple(sorted(EXCLUDED))

COMMANDS = ("Copy", "Paste", "Save", "Build", "Refresh", "Undo", "Find", "Rename")
GENERIC_TOKENS = (
    "EditEvent",
    "NavigationEvent-Click",
    "NavigationEvent-CtrlClick",
    "WindowEvent-Move",
    "WindowEvent-Open",
    "WindowEvent-Close",
    "DocumentEvent-Opened",
    "DocumentEvent-Saved",
    "BuildEvent",
    "TestRunEvent",
    "DebuggerEvent-Break",
    "CompletionEvent-Applied",
)
DEFAULT_TOKENS = GENERIC_TOKENS + tuple(f"{COMMAND_EVENT}-{c}" for c in COMMANDS)


@dataclass
class MarkovSpec:
    """A token chain plus corpus-shape and noise parameters.

    ``transitions`` has shape ``(S, S)`` for ``order=1``.  For ``order=2`` it
    has shape ``(S + 1, S, S)``: entry ``[a, b, c]`` is P(c | a, b), and
    ``a = S`` stands for "no token before b" (the second token of a session).
    """

    tokens: tuple
    transitions: np.ndarray
    initial: np.ndarray
    order: int = 1
    session_count: int = 5000
    session_length: tuple = (20, 60)
    duplicate_rate: float = 0.0
    repeat_rate: float = 0.0
    excluded_rate: float = 0.0
    max_repeat: int = 3
    seed: int = 0

    def __post_init__(self):
        self.tokens = tuple(self.tokens)
        self.transitions = np.asarray(self.transitions, dtype=np.float64)
        self.initial = np.asarray(self.initial, dtype=np.float64)
        self.session_length = tuple(int(v) for v in self.session_length)
        self.validate()

    @property
    def n_states(self):
        return len(self.tokens)

    def validate(self):
        S = self.n_states
        if S < 1 or len(set(self.tokens)) != S:
            raise ConfigError("tokens must be a non-empty list of distinct strings")
        for t in self.tokens:
            if classify_event_type(parse_token(t).event_type) is not EventCategory.DEVELOPER_INDUCED:
                raise ConfigError(f"token {t!r} is not a developer-induced event type")
            if parse_token(t).repeated:
                raise ConfigError(f"token {t!r} must not end in '+'")
        if self.order not in (1, 2):
            raise ConfigError("order must be 1 or 2")
        shape = (S, S) if self.order == 1 else (S + 1, S, S)
        if self.transitions.shape != shape:
            raise ConfigError(f"transitions must have shape {shape}, got {self.transitions.shape}")
        if self.initial.shape != (S,):
            raise ConfigError(f"initial must have shape ({S},)")
        for name, arr in (("transitions", self.transitions), ("initial", self.initial)):
            if np.any(arr < 0) or not np.all(np.isfinite(arr)):
                raise ConfigError(f"{name} must be finite and non-negative")
            if np.any(np.abs(arr.sum(axis=-1) - 1.0) > 1e-9):
                raise ConfigError(f"{name} rows must sum to 1 within 1e-9")
        for name in ("duplicate_rate", "repeat_rate", "excluded_rate"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ConfigError(f"{name} must lie in [0, 1)")
        lo, hi = self.session_length
        if not 1 <= lo <= hi:
            raise ConfigError("session_length must satisfy 1 <= min <= max")
        if self.session_count < 0 or self.max_repeat < 1:
            raise ConfigError("session_count must be >= 0 and max_repeat >= 1")

    def command_index(self):
        """Token index for each command descriptor in the alphabet."""
        out = {}
        for i, t in enumerate(self.tokens):
            tok = parse_token(t)
            if tok.is_command and tok.descriptor is not None:
                out[tok.descriptor] = i
        return out

    def to_dict(self):
        return {
            "tokens": list(self.tokens),
            "transitions": self.transitions.tolist(),
            "initial": self.initial.tolist(),
            "order": self.order,
            "session_count": self.session_count,
            "session_length": list(self.session_length),
            "duplicate_rate": self.duplicate_rate,
            "repeat_rate": self.repeat_rate,
            "excluded_rate": self.excluded_rate,
            "max_repeat": self.max_repeat,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj):
        obj = dict(obj)
        preset = obj.pop("preset", None)
        if preset is not None:
            base = load_preset(preset).to_dict()
            base.update(obj)
            obj = base
        known = set(cls.__dataclass_fields__)
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown synth config key(s): {sorted(unknown)}")
        return cls(**obj)


# -- sampling --------------------------------------------------------------

class _Sampler:
    def __init__(self, spec: MarkovSpec):
        self.spec = spec
        self.init_cdf = np.cumsum(spec.initial).tolist()
        flat = spec.transitions.reshape(-1, spec.n_states)
        self.cdfs = [row.tolist() for row in np.cumsum(flat, axis=1)]

    @staticmethod
    def _draw(cdf, u):
        # clamp guards against the last cumulative entry rounding below 1
        return min(bisect.bisect_right(cdf, u), len(cdf) - 1)

    def sample(self, length, rng):
        spec = self.spec
        S = spec.n_states
        us = rng.random(length).tolist()
        if length == 0:
            return []
        seq = [self._draw(self.init_cdf, us[0])]
        for t in range(1, length):
            if spec.order == 1:
                row = seq[-1]
            else:
                prev2 = seq[-2] if t >= 2 else S
                row = prev2 * S + seq[-1]
            seq.append(self._draw(self.cdfs[row], us[t]))
        return seq


def sample_chain(spec: MarkovSpec, length: int, seed: int = 0) -> list:
    """One uninterrupted token-index sequence of the given length."""
    return _Sampler(spec).sample(length, np.random.default_rng(seed))


@dataclass
class GroundTruth:
    total_events: int = 0
    chain_events: int = 0
    injected_duplicates: int = 0
    injected_repeats: int = 0
    natural_repeats: int = 0
    excluded_events: int = 0

    @property
    def expected_removed_by_compression(self):
        return self.injected_repeats + self.natural_repeats

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class GeneratedCorpus:
    sessions: list
    chains: list                # token-index sequence per session, pre-noise
    truth: GroundTruth
    spec: Optional[MarkovSpec] = None

    @property
    def events(self):
        return [e for s in self.sessions for e in s.events]


def _event(session_id, ms, token, event_type=None):
    ts = EPOCH + timedelta(milliseconds=int(ms))
    if event_type is not None:
        return RawEvent(session_id, ts, event_type, None)
    tok = parse_token(token)
    return RawEvent(session_id, ts, tok.event_type, tok.descriptor)


def _emit(spec, chains, copies, dups, noise, rng):
    """Turn chains plus injection plans into timestamped sessions.

    ``copies[s][i]`` extra repeats follow token i; ``dups[s]`` is a set of
    indices into the session's developer events (chain tokens and their
    copies, in emission order) that get a same-millisecond twin;
    ``noise[s][i]`` excluded events follow token i's run.
    """
    sessions = []
    truth = GroundTruth()
    for s, chain in enumerate(chains):
        sid = f"s{s:05d}"
        events = []
        t = s * DAY_MS + int(rng.integers(0, 3_600_000))
        dev = 0
        for i, tok_idx in enumerate(chain):
            token = spec.tokens[tok_idx]
            for rep in range(1 + copies[s][i]):
                t += int(rng.integers(1, 20)) if rep else int(rng.integers(200, 30_000))
                events.append(_event(sid, t, token))
                if dev in dups[s]:
                    events.append(_event(sid, t, token))
                    truth.injected_duplicates += 1
                dev += 1
            truth.injected_repeats += copies[s][i]
            for _ in range(noise[s][i]):
                t += int(rng.integers(1, 2_000))
                etype = EXCLUDED_TYPES[int(rng.integers(len(EXCLUDED_TYPES)))]
                events.append(_event(sid, t, None, event_type=etype))
                truth.excluded_events += 1
            if i and chain[i - 1] == tok_idx:
                truth.natural_repeats += 1
        truth.chain_events += len(chain)
        truth.total_events += len(events)
        sessions.append(Session(sid, tuple(events)))
    return sessions, truth


def _sample_chains(spec, rng):
    sampler = _Sampler(spec)
    lo, hi = spec.session_length
    lengths = rng.integers(lo, hi + 1, size=spec.session_count)
    return [sampler.sample(int(L), rng) for L in lengths]


def generate(spec: MarkovSpec) -> GeneratedCorpus:
    """Sample ``spec.session_count`` sessions with rate-driven noise injection."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    chains = _sample_chains(spec, rng)
    copies, dups, noise = [], [], []
    for chain in chains:
        n = len(chain)
        rep = (rng.random(n) < spec.repeat_rate) * rng.integers(1, spec.max_repeat + 1, size=n)
        copies.append(rep.tolist())
        n_dev = n + int(rep.sum())
        dups.append(set(np.flatnonzero(rng.random(n_dev) < spec.duplicate_rate).tolist()))
        noise.append((rng.random(n) < spec.excluded_rate).astype(int).tolist())
    sessions, truth = _emit(spec, chains, copies, dups, noise, rng)
    return GeneratedCorpus(sessions, chains, truth, spec)


def generate_exact(spec: MarkovSpec, n_duplicates: int, n_repeats: int, n_excluded: int,
                   total_events: int) -> GeneratedCorpus:
    """Corpus with exactly the requested injection counts and total event count.

    Chains are sampled session by session (lengths from ``spec``) and the last
    one is trimmed so the raw event total comes out exact.  The rate fields of
    ``spec`` are ignored.
    """
    n_chain = total_events - n_duplicates - n_repeats - n_excluded
    if n_chain < 1:
        raise ValueError("total_events too small for the requested injections")
    rng = np.random.default_rng(spec.seed)
    sampler = _Sampler(spec)
    lo, hi = spec.session_length
    chains, have = [], 0
    while have < n_chain:
        L = min(int(rng.integers(lo, hi + 1)), n_chain - have)
        chains.append(sampler.sample(L, rng))
        have += L

    positions = [(s, i) for s, c in enumerate(chains) for i in range(len(c))]
    copies = [[0] * len(c) for c in chains]
    noise = [[0] * len(c) for c in chains]
    for p in rng.choice(len(positions), size=n_repeats, replace=True):
        s, i = positions[p]
        copies[s][i] += 1
    for p in rng.choice(len(positions), size=n_excluded, replace=True):
        s, i = positions[p]
        noise[s][i] += 1
    dev_slots = [(s, j) for s, c in enumerate(chains) for j in range(len(c) + sum(copies[s]))]
    dups = [set() for _ in chains]
    for p in rng.choice(len(dev_slots), size=n_duplicates, replace=False):
        s, j = dev_slots[p]
        dups[s].add(j)
    sessions, truth = _emit(spec, chains, copies, dups, noise, rng)
    return GeneratedCorpus(sessions, chains, truth, spec)


# -- bundled chains --------------------------------------------------------

def _no_self(row, i):
    row = row.copy()
    if i is not None:
        row[i] = 0.0
    return row / row.sum()


def build_order1_spec(seed=2017, **overrides) -> MarkovSpec:
    """20-token first-order chain: each state favors one command strongly.

    From every state the next token is a command with probability 0.45; that
    command mass puts 0.7 on one state-specific command.  Self-transitions are
    zero so cleansing never merges chain tokens.
    """
    rng = np.random.default_rng(seed)
    S, G = len(DEFAULT_TOKENS), len(GENERIC_TOKENS)
    n_cmd = S - G
    T = np.zeros((S, S))
    for i in range(S):
        generic = rng.dirichlet(np.ones(G))
        cmd = 0.3 * rng.dirichlet(np.ones(n_cmd))
        cmd[int(rng.integers(n_cmd))] += 0.7
        T[i, :G] = 0.55 * generic
        T[i, G:] = 0.45 * cmd
        T[i] = _no_self(T[i], i)
    initial = np.full(S, 1.0 / S)
    params = dict(tokens=DEFAULT_TOKENS, transitions=T, initial=initial, order=1,
                  duplicate_rate=0.01, repeat_rate=0.01, excluded_rate=0.05, seed=seed)
    params.update(overrides)
    return MarkovSpec(**params)


def build_order2_spec(seed=2018, **overrides) -> MarkovSpec:
    """20-token second-order chain where the ordered pair picks the command.

    For every context (a, b) the next token is a command with probability
    0.5, and 0.85 of that mass goes to a command drawn at random per ordered
    pair, so (a, b) and (b, a) usually favor different commands.
    """
    rng = np.random.default_rng(seed)
    S, G = len(DEFAULT_TOKENS), len(GENERIC_TOKENS)
    n_cmd = S - G
    T = np.zeros((S + 1, S, S))
    for a in range(S + 1):
        for b in range(S):
            choices = [c for c in range(n_cmd) if G + c != b]
            fav = choices[int(rng.integers(len(choices)))]
            cmd = np.full(n_cmd, 0.15 / (n_cmd - 1))
            cmd[fav] = 0.85
            row = np.zeros(S)
            row[:G] = 0.5 / G
            row[G:] = 0.5 * cmd
            T[a, b] = _no_self(row, b)
    initial = np.full(S, 1.0 / S)
    params = dict(tokens=DEFAULT_TOKENS, transitions=T, initial=initial, order=2,
                  duplicate_rate=0.01, repeat_rate=0.01, excluded_rate=0.05, seed=seed)
    params.update(overrides)
    return MarkovSpec(**params)


PRESETS = {"order1": "order1.json", "order2": "order2.json"}


def load_preset(name) -> MarkovSpec:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    text = resources.files("nextcmd.data").joinpath(PRESETS[name]).read_text()
    return MarkovSpec.from_dict(json.loads(text)["spec"])


def load_fixture(name) -> dict:
    """The bundled fixture file: ``{"spec": ..., "oracle": ...}``."""
    return json.loads(resources.files("nextcmd.data").joinpath(PRESETS[name]).read_text())


# -- Bayes-optimal accuracy ------------------------------------------------

def _length_survival(spec):
    """P(L > t) for t = 0 .. max_len - 1."""
    lo, hi = spec.session_length
    t = np.arange(hi)
    return np.where(t < lo, 1.0, (hi - t) / (hi - lo + 1))


def _check_ergodic(spec):
    S = spec.n_states
    if spec.order == 1:
        adj = spec.transitions > 0
        start = spec.initial > 0
        n = S
    else:
        # pair states (a, b) -> (b, c); pairs with a real first token only
        n = S * S
        rows, cols = [], []
        nz = np.argwhere(spec.transitions[:S] > 0)
        for a, b, c in nz:
            rows.append(a * S + b)
            cols.append(b * S + c)
        adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).toarray() > 0
        start = np.zeros(n, dtype=bool)
        first = np.argwhere(spec.transitions[S] > 0)
        for b, c in first:
            if spec.initial[b] > 0:
                start[b * S + c] = True
    reach = start.copy()
    frontier = start.copy()
    while frontier.any():
        nxt = adj[frontier].any(axis=0) & ~reach
        reach |= nxt
        frontier = nxt
    idx = np.flatnonzero(reach)
    sub = csr_matrix(adj[np.ix_(idx, idx)].astype(float))
    n_comp = connected_components(sub, directed=True, connection="strong")[0]
    if n_comp != 1:
        raise ValueError("chain is not ergodic: reachable states split into "
                         f"{n_comp} strongly connected components")


def context_joint(spec: MarkovSpec) -> tuple:
    """Expected counts of (context, next token) over a session.

    Returns ``(contexts, J)`` where ``J[i, c]`` is the expected number of
    positions per session whose context is ``contexts[i]`` and whose token is
    ``c``.  Contexts are tuples of the preceding ``order`` token indices,
    with -1 meaning "none" (session start).
    """
    S = spec.n_states
    surv = _length_survival(spec)
    T = spec.transitions
    if spec.order == 1:
        contexts = [(-1,)] + [(s,) for s in range(S)]
        J = np.zeros((S + 1, S))
        J[0] = surv[0] * spec.initial
        d = spec.initial.copy()          # distribution of token t-1
        weight = np.zeros(S)
        for t in range(1, len(surv)):
            weight += surv[t] * d
            d = d @ T
        J[1:] = weight[:, None] * T
        return contexts, J

    # order 2: contexts (a, b) with a in [0, S] (S = none), plus the empty start
    contexts = [(-1, -1)] + [(a if a < S else -1, b) for a in range(S + 1) for b in range(S)]
    J = np.zeros((1 + (S + 1) * S, S))
    J[0] = surv[0] * spec.initial
    e = np.zeros((S + 1, S))             # distribution of (x_{t-2}, x_{t-1})
    e[S] = spec.initial
    weight = np.zeros((S + 1, S))
    for t in range(1, len(surv)):
        weight += surv[t] * e
        nxt = np.einsum("ab,abc->bc", e, T)
        e = np.zeros((S + 1, S))
        e[:S] = nxt
    J[1:] = (weight[:, :, None] * T).reshape(-1, S)
    return contexts, J


def _target_indices(spec, targets):
    cmd = spec.command_index()
    names = getattr(targets, "classes", targets)
    if names is None:
        return sorted(cmd.values())
    missing = [n for n in names if n not in cmd]
    if missing:
        raise ValueError(f"target commands not in the alphabet: {missing}")
    return [cmd[n] for n in names]


def bayes_optimal_accuracy(spec: MarkovSpec, targets=None, view="full") -> float:
    """Best achievable expected accuracy on in-target command rows.

    ``targets`` is a :class:`~nextcmd.extract.TargetClassSet`, a list of
    command descriptors, or ``None`` for every command in the alphabet.
    ``view`` restricts what the predictor knows about the context:
    ``"full"`` (the chain's own context), ``"last"`` (only the previous
    token) or, for order 2, ``"unordered"`` (the previous two tokens as a set).
    """
    _check_ergodic(spec)
    cols = _target_indices(spec, targets)
    contexts, J = context_joint(spec)
    J = J[:, cols]
    total = J.sum()
    if total <= 0:
        raise ValueError("target commands never occur under this chain")

    if view == "full":
        keys = contexts
    elif view == "last":
        keys = [c[-1:] for c in contexts]
    elif view == "unordered":
        if spec.order != 2:
            raise ValueError("the unordered view needs an order-2 chain")
        keys = [tuple(sorted(c)) for c in contexts]
    else:
        raise ValueError(f"unknown view {view!r}")

    pooled = {}
    for key, row in zip(keys, J):
        pooled[key] = pooled.get(key, 0.0) + row
    return float(sum(r.max() for r in pooled.values()) / total)


# -- cleansing fixture -----------------------------------------------------

CLEANSING_FIXTURE = dict(total_events=1000, n_duplicates=50, n_repeats=200, n_excluded=100)


def cleansing_fixture(seed=7) -> GeneratedCorpus:
    """1,000 raw events with exactly 50 duplicates and 200 repeat copies."""
    spec = build_order1_spec(session_count=0, session_length=(20, 60), seed=seed)
    return generate_exact(spec, **CLEANSING_FIXTURE)
