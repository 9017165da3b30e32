"""Stationary-point database: deduplicated minima and transition states.

Duplicate minima are detected by the canonical assignment key alone: at a
fixed point the assignment determines the centres exactly, and the key is
invariant under cluster relabelling. Candidates with empty clusters are
rejected outright. All writes go through one store instance at a time;
concurrent explorers must funnel results through a single merge point.

The database round-trips through a versioned JSON file; float values are
written with full shortest-repr precision so replay is byte-identical.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import canonical_key, canonicalize, cost
from .errors import DatabaseError

SCHEMA_VERSION = 1
TOL_SEAM = 1e-3


@dataclass
class MinimumRecord:
    id: int
    centres: np.ndarray
    labels: np.ndarray  # canonical form
    cost: float
    attempts: int = 1


@dataclass
class TransitionStateRecord:
    id: int
    centres: np.ndarray
    cost: float
    labels: np.ndarray  # first assignment of the bracketing pair
    point_index_changed: int
    label_after: int  # label of that point in the second assignment
    connected: tuple
    seam_gap: float
    attempts: int = 1

    @property
    def labels_pair(self):
        other = self.labels.copy()
        other[self.point_index_changed] = self.label_after
        return self.labels, other


class MinimaStore:
    def __init__(self):
        self.records: list[MinimumRecord] = []
        self._by_key: dict[tuple, int] = {}

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def get(self, min_id) -> MinimumRecord:
        return self.records[min_id]

    def dedup_insert(self, candidate):
        """Insert a minimisation result; returns (status, id).

        status is one of "inserted", "duplicate", "rejected". Rejected
        candidates (empty cluster or unconverged) get id None.
        """
        if not candidate.valid:
            return "rejected", None
        key = canonical_key(candidate.labels)
        existing = self._by_key.get(key)
        if existing is not None:
            self.records[existing].attempts += 1
            return "duplicate", existing
        centres, labels = canonicalize(candidate.centres, candidate.labels)
        rec = MinimumRecord(
            id=len(self.records),
            centres=centres,
            labels=labels,
            cost=float(candidate.cost),
            attempts=1,
        )
        self.records.append(rec)
        self._by_key[key] = rec.id
        return "inserted", rec.id

    def global_minimum(self) -> MinimumRecord:
        if not self.records:
            raise DatabaseError("no minima stored")
        return min(self.records, key=lambda r: (r.cost, r.id))


def _ts_pair_key(labels_a, labels_b):
    # order-insensitive, relabel-insensitive identity of an assignment pair
    k1 = canonical_key(np.concatenate([labels_a, labels_b]))
    k2 = canonical_key(np.concatenate([labels_b, labels_a]))
    return min(k1, k2)


class TransitionStateStore:
    def __init__(self):
        self.records: list[TransitionStateRecord] = []
        self._by_key: dict[tuple, list[int]] = {}

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def get(self, ts_id) -> TransitionStateRecord:
        return self.records[ts_id]

    def insert(self, centres, cost_value, labels_a, labels_b, connected, seam_gap):
        """Store a transition state; re-finding the same seam minimum only
        bumps its attempt count. Distinct minima of the same seam (same
        assignment pair, different cost) are kept as parallel records.

        The bracketing assignments must differ in one data location; a
        group of duplicate rows changing together is recorded through its
        first index.
        """
        labels_a = np.asarray(labels_a)
        labels_b = np.asarray(labels_b)
        diff = np.flatnonzero(labels_a != labels_b)
        if len(diff) < 1:
            raise ValueError("bracketing assignments are identical")
        if len(set(labels_a[diff].tolist())) != 1 or len(set(labels_b[diff].tolist())) != 1:
            raise ValueError("bracketing assignments must make a single label change")
        # identity key uses the representative single-index pair so that it
        # survives a save/load round trip
        rep_b = labels_a.copy()
        rep_b[diff[0]] = labels_b[diff[0]]
        key = _ts_pair_key(labels_a, rep_b)
        for ts_id in self._by_key.get(key, ()):
            rec = self.records[ts_id]
            if abs(rec.cost - cost_value) <= 1e-6 * (1.0 + abs(rec.cost)):
                rec.attempts += 1
                return "duplicate", ts_id
        idx = int(diff[0])
        rec = TransitionStateRecord(
            id=len(self.records),
            centres=np.array(centres, dtype=np.float64),
            cost=float(cost_value),
            labels=np.array(labels_a, dtype=np.int64),
            point_index_changed=idx,
            label_after=int(np.asarray(labels_b)[idx]),
            connected=(int(connected[0]), int(connected[1])),
            seam_gap=float(seam_gap),
        )
        self.records.append(rec)
        self._by_key.setdefault(key, []).append(rec.id)
        return "inserted", rec.id


@dataclass
class LandscapeDB:
    dataset_hash: str
    k: int
    seed: int | None = None
    config_hash: str | None = None
    kernel_backend: str = kernels.BACKEND
    minima: MinimaStore = field(default_factory=MinimaStore)
    transition_states: TransitionStateStore = field(default_factory=TransitionStateStore)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "dataset_hash": self.dataset_hash,
            "k": self.k,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "kernel_backend": self.kernel_backend,
            "minima": [
                {
                    "id": r.id,
                    "cost": r.cost,
                    "centres": r.centres.tolist(),
                    "canonical_labels": r.labels.tolist(),
                    "attempts": r.attempts,
                }
                for r in self.minima
            ],
            "transition_states": [
                {
                    "id": r.id,
                    "cost": r.cost,
                    "centres": r.centres.tolist(),
                    "point_index_changed": r.point_index_changed,
                    "label_after": r.label_after,
                    "labels": r.labels.tolist(),
                    "connected": list(r.connected),
                    "seam_gap": r.seam_gap,
                    "attempts": r.attempts,
                }
                for r in self.transition_states
            ],
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise DatabaseError(f"database not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise DatabaseError(f"corrupt database {path}: {exc}") from None
        if raw.get("schema_version") != SCHEMA_VERSION:
            raise DatabaseError(f"unsupported schema version {raw.get('schema_version')!r}")
        db = cls(
            dataset_hash=raw["dataset_hash"],
            k=int(raw["k"]),
            seed=raw.get("seed"),
            config_hash=raw.get("config_hash"),
            kernel_backend=raw.get("kernel_backend", "unknown"),
        )
        for m in raw["minima"]:
            labels = np.array(m["canonical_labels"], dtype=np.int64)
            rec = MinimumRecord(
                id=int(m["id"]),
                centres=np.array(m["centres"], dtype=np.float64),
                labels=labels,
                cost=float(m["cost"]),
                attempts=int(m["attempts"]),
            )
            if rec.id != len(db.minima.records):
                raise DatabaseError("minima ids are not dense and ordered")
            db.minima.records.append(rec)
            db.minima._by_key[canonical_key(labels)] = rec.id
        for t in raw["transition_states"]:
            rec = TransitionStateRecord(
                id=int(t["id"]),
                centres=np.array(t["centres"], dtype=np.float64),
                cost=float(t["cost"]),
                labels=np.array(t["labels"], dtype=np.int64),
                point_index_changed=int(t["point_index_changed"]),
                label_after=int(t["label_after"]),
                connected=tuple(t["connected"]),
                seam_gap=float(t["seam_gap"]),
                attempts=int(t["attempts"]),
            )
            if rec.id != len(db.transition_states.records):
                raise DatabaseError("transition state ids are not dense and ordered")
            db.transition_states.records.append(rec)
            key = _ts_pair_key(*rec.labels_pair)
            db.transition_states._by_key.setdefault(key, []).append(rec.id)
        return db


def validate_db(db, dataset, tol_fp=1e-8, tol_seam=TOL_SEAM):
    """Re-check every stored record's invariants; returns a violation list.

    Each violation is (kind, record_id, message). An empty list means the
    database is internally consistent with the dataset.
    """
    violations = []
    points = dataset.points
    scale = 1.0 + float(np.abs(points).max())

    if db.dataset_hash != dataset.hash():
        violations.append(("dataset", None, "dataset hash mismatch"))

    for rec in db.minima:
        k = rec.centres.shape[0]
        if k != db.k:
            violations.append(("minimum", rec.id, "wrong number of centres"))
            continue
        counts = np.bincount(rec.labels, minlength=k)
        if (counts == 0).any():
            violations.append(("minimum", rec.id, "empty cluster"))
            continue
        sums = np.zeros_like(rec.centres)
        np.add.at(sums, rec.labels, points)
        means = sums / counts[:, None]
        if np.abs(rec.centres - means).max() > tol_fp * scale:
            violations.append(("minimum", rec.id, "centroid condition violated"))
        # nearest-centre rule, tie-tolerant: the assigned centre must attain
        # the minimal distance (exact ties may resolve either way)
        diff = points[:, None, :] - rec.centres[None, :, :]
        d2 = np.einsum("nkf,nkf->nk", diff, diff)
        assigned = d2[np.arange(len(points)), rec.labels]
        if np.any(assigned > d2.min(axis=1) + tol_fp * scale * scale):
            violations.append(("minimum", rec.id, "assignment is not nearest-centre"))
        j = cost(points, rec.centres, rec.labels)
        if abs(j - rec.cost) > tol_fp * (1.0 + j):
            violations.append(("minimum", rec.id, "stored cost does not match"))

    n_minima = len(db.minima)
    for rec in db.transition_states:
        a, b = rec.connected
        if a == b:
            violations.append(("transition_state", rec.id, "self-connection"))
            continue
        if not (0 <= a < n_minima and 0 <= b < n_minima):
            violations.append(("transition_state", rec.id, "connected minimum missing"))
            continue
        labels_a, labels_b = rec.labels_pair
        j1 = cost(points, rec.centres, labels_a)
        j2 = cost(points, rec.centres, labels_b)
        gap = abs(j1 - j2)
        if gap > tol_seam:
            violations.append(("transition_state", rec.id, f"seam gap {gap:.2e} above tolerance"))
        if abs(0.5 * (j1 + j2) - rec.cost) > tol_seam:
            violations.append(("transition_state", rec.id, "stored cost does not match"))
        top = max(db.minima.get(a).cost, db.minima.get(b).cost)
        if rec.cost < top - tol_seam:
            violations.append(("transition_state", rec.id, "below a connected minimum"))
    return violations
