"""Command-line pipeline: explore, connect, rates, path, dgraph,
frustration, compare, validate.

Every artifact embeds the config hash and seed. Exit codes: 0 ok,
2 config error, 3 missing input, 4 budget exhausted / partial network.
"""

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from . import kernels
from .analysis import (
    accuracy,
    adjusted_rand_index,
    frustration_profile,
    partition_signature,
    rand_index,
    structure_type,
)
from .config import ConfigError, resolve_config
from .dataset import append_outliers, load_csv, load_outlier_csv
from .disconnectivity import build_disconnectivity, emit_disconnectivity
from .errors import DatabaseError
from .explore import explore
from .network import Network, RateParams, fastest_path, grow_connected, overall_rate
from .store import LandscapeDB, validate_db
from .transition import SurrogateParams, aligned_distance

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISSING = 3
EXIT_PARTIAL = 4


def _add_common(p):
    p.add_argument("--config", help="key = value config file; flags override")
    p.add_argument("--data", help="dataset CSV with header row")
    p.add_argument("--labels", help="name of the ground-truth label column")
    p.add_argument("--outliers", help="headerless CSV of outlier rows to append")
    p.add_argument("--k", type=int)
    p.add_argument("--starts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--temp", type=float)
    p.add_argument("--budget", type=int)
    p.add_argument("--out")
    p.add_argument("--threads", type=int)
    p.add_argument("--db", help="landscape database path (default <out>/landscape.json)")


def build_parser():
    parser = argparse.ArgumentParser(prog="kmeanscape", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in [
        ("explore", "sample starts, minimise and store deduplicated minima"),
        ("connect", "grow transition-state connections until one component remains"),
        ("rates", "set-to-set and kinetic-trap escape rates"),
        ("path", "fastest path profile between two minima"),
        ("dgraph", "disconnectivity graph SVG"),
        ("frustration", "Shannon-entropy profile over a temperature grid"),
        ("compare", "index/rate comparison between two minima"),
        ("validate", "re-check every stored record against the dataset"),
    ]:
        p = sub.add_parser(name, help=text)
        _add_common(p)
        if name == "rates":
            p.add_argument("--trap-ids", help="comma-separated minima ids of trap bottoms")
        if name == "path":
            p.add_argument("--source", type=int, required=True)
            p.add_argument("--sink", type=int, help="default: global minimum")
        if name == "dgraph":
            p.add_argument(
                "--color-by",
                default="none",
                help="none | cost | ari | structure-type | partition:<class>",
            )
            p.add_argument("--levels", type=int, default=100)
        if name == "frustration":
            p.add_argument("--tmin", type=float, default=0.01)
            p.add_argument("--tmax", type=float, default=100.0)
            p.add_argument("--tn", type=int, default=100)
        if name == "compare":
            p.add_argument("--min-a", type=int, required=True)
            p.add_argument("--min-b", type=int, required=True)
    return parser


def _config_from_args(args):
    overrides = {
        key: getattr(args, key)
        for key in (
            "data", "labels", "outliers", "k", "starts", "seed",
            "sigma", "alpha", "temp", "budget", "out", "threads",
        )
    }
    return resolve_config(args.config, overrides)


def _load_dataset(cfg):
    if not cfg.data:
        raise ConfigError("--data is required")
    ds = load_csv(cfg.data, label_column=cfg.labels)
    if cfg.outliers:
        ds = append_outliers(ds, load_outlier_csv(cfg.outliers, ds.n_features))
    return ds


def _db_path(cfg, args):
    return Path(args.db) if args.db else Path(cfg.out) / "landscape.json"


def _open_db(cfg, args, dataset):
    db = LandscapeDB.load(_db_path(cfg, args))
    if db.dataset_hash != dataset.hash():
        raise DatabaseError("database does not belong to this dataset/outlier combination")
    return db


def _connected_network(db):
    net = Network.from_db(db)
    if len(net.components()) != 1:
        return None
    return net


def _write_csv(path, header, rows, cfg, extra=""):
    with open(path, "w", newline="") as fh:
        fh.write(f"# config_hash={cfg.hash()} seed={cfg.seed}{extra}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _minima_properties(db, dataset):
    st = {m.id: structure_type(m, dataset).canonical_id for m in db.minima}
    parts = None
    if dataset.ground_truth is not None and dataset.label_names:
        parts = {
            m.id: tuple(
                partition_signature(m, dataset, cls) for cls in dataset.label_names
            )
            for m in db.minima
        }
    return st, parts


def cmd_explore(cfg, args):
    t0 = time.perf_counter()
    dataset = _load_dataset(cfg)
    db, stats = explore(dataset, cfg.k, cfg.starts, cfg.seed, threads=cfg.threads)
    db.config_hash = cfg.hash()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    db.save(_db_path(cfg, args))
    print(
        f"explore: seed={cfg.seed} starts={stats.n_starts} minima={stats.inserted} "
        f"duplicates={stats.duplicates} rejected={stats.rejected} "
        f"backend={kernels.BACKEND} wall={time.perf_counter() - t0:.2f}s"
    )
    return EXIT_OK


def cmd_connect(cfg, args):
    t0 = time.perf_counter()
    dataset = _load_dataset(cfg)
    db = _open_db(cfg, args, dataset)
    params = SurrogateParams(sigma=cfg.sigma, alpha=cfg.alpha)
    report = grow_connected(dataset.points, db, cfg.budget, params)
    db.save(_db_path(cfg, args))
    print(
        f"connect: seed={cfg.seed} components={report.components} "
        f"attempted={report.attempted} succeeded={report.succeeded} "
        f"new_ts={report.new_transition_states} new_minima={report.new_minima} "
        f"wall={time.perf_counter() - t0:.2f}s"
    )
    if not report.connected:
        print("connect: network is PARTIAL (budget exhausted or searches stalled)")
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_rates(cfg, args):
    dataset = _load_dataset(cfg)
    db = _open_db(cfg, args, dataset)
    net = _connected_network(db)
    if net is None:
        print("rates: network is not fully connected; run connect first")
        return EXIT_PARTIAL
    p = RateParams(cfg.temp)
    gm = net.global_minimum()
    st, _ = _minima_properties(db, dataset)
    gm_type = st[gm.id]

    rows = []
    for type_id in sorted(set(st.values())):
        sources = {m for m, t in st.items() if t == type_id} - {gm.id}
        if not sources:
            continue
        rate = overall_rate(net, sources, {gm.id}, p)
        rows.append(("structure_type", type_id, len(sources), int(type_id == gm_type), rate))
    trap_ids = getattr(args, "trap_ids", None)
    if trap_ids:
        for trap in (int(t) for t in trap_ids.split(",")):
            rate = overall_rate(net, {trap}, {gm.id}, p)
            rows.append(("trap", trap, 1, 0, rate))

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "rates.csv",
        ["kind", "label", "n_sources", "is_gm_type", "rate"],
        rows,
        cfg,
        extra=f" temperature={cfg.temp}",
    )
    print(f"rates: temperature={cfg.temp} rows={len(rows)} -> {out / 'rates.csv'}")
    return EXIT_OK


def cmd_path(cfg, args):
    dataset = _load_dataset(cfg)
    db = _open_db(cfg, args, dataset)
    net = _connected_network(db)
    if net is None:
        print("path: network is not fully connected; run connect first")
        return EXIT_PARTIAL
    sink = args.sink if args.sink is not None else net.global_minimum().id
    result = fastest_path(net, args.source, sink, RateParams(cfg.temp))
    st, parts = _minima_properties(db, dataset)

    rows = []
    for i, step in enumerate(result.steps):
        st_change = part_change = ""
        if step.kind == "ts":
            prev_min = result.steps[i - 1].id
            next_min = result.steps[i + 1].id
            st_change = int(st[prev_min] != st[next_min])
            if parts is not None:
                part_change = int(parts[prev_min] != parts[next_min])
        rows.append((i, step.kind, step.id, step.cost, st_change, part_change))

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "path.csv",
        ["step", "stationary_point_kind", "id", "J", "structure_type_change", "partition_change"],
        rows,
        cfg,
        extra=f" temperature={cfg.temp} source={args.source} sink={sink}",
    )
    print(
        f"path: {args.source} -> {sink} steps={len(result.steps)} "
        f"weight={result.total_weight:.6g} -> {out / 'path.csv'}"
    )
    return EXIT_OK


def cmd_dgraph(cfg, args):
    dataset = _load_dataset(cfg)
    db = _open_db(cfg, args, dataset)
    net = Network.from_db(db)
    tree = build_disconnectivity(net, n_levels=args.levels)

    mode = args.color_by
    coloring = None
    categorical = False
    if mode == "cost":
        coloring = {m.id: m.cost for m in db.minima}
    elif mode == "ari":
        coloring = {m.id: accuracy(m, dataset) for m in db.minima}
    elif mode == "structure-type":
        coloring = {m.id: structure_type(m, dataset).canonical_id for m in db.minima}
        categorical = True
    elif mode.startswith("partition:"):
        cls = mode.split(":", 1)[1]
        coloring = {m.id: partition_signature(m, dataset, cls) for m in db.minima}
        categorical = True
    elif mode != "none":
        raise ConfigError(f"unknown coloring {mode!r}")

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    target = out / "disconnectivity.svg"
    emit_disconnectivity(tree, target, coloring=coloring, categorical=categorical)
    print(f"dgraph: minima={tree.n_minima} levels={args.levels} -> {target}")
    return EXIT_OK


def cmd_frustration(cfg, args):
    dataset = _load_dataset(cfg)
    db = _open_db(cfg, args, dataset)
    net = Network.from_db(db)
    grid = np.geomspace(args.tmin, args.tmax, args.tn)
    profile = frustration_profile(net, grid)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "frustration.csv",
        ["temperature", "entropy"],
        list(zip(profile.temperatures, profile.entropy)),
        cfg,
        extra=" occupations=minima-boltzmann density_of_states=unit",
    )
    print(f"frustration: minima={len(db.minima)} points={args.tn} -> {out / 'frustration.csv'}")
    return EXIT_OK


def cmd_compare(cfg, args):
    dataset = _load_dataset(cfg)
    db = _open_db(cfg, args, dataset)
    a = db.minima.get(args.min_a)
    b = db.minima.get(args.min_b)
    ri = rand_index(a.labels, b.labels)
    ari = adjusted_rand_index(a.labels, b.labels)
    dist = aligned_distance(a.centres, b.centres)
    net = Network.from_db(db)
    p = RateParams(cfg.temp)
    try:
        rate_ab = overall_rate(net, {a.id}, {b.id}, p)
        rate_ba = overall_rate(net, {b.id}, {a.id}, p)
    except ValueError:
        print("compare: minima are not connected; run connect first")
        return EXIT_PARTIAL

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "compare.csv",
        ["min_a", "min_b", "rand_index", "ari", "centre_distance", "rate_ab", "rate_ba"],
        [(a.id, b.id, ri, ari, dist, rate_ab, rate_ba)],
        cfg,
        extra=f" temperature={cfg.temp}",
    )
    print(
        f"compare: {a.id} vs {b.id} RI={ri:.4f} ARI={ari:.4f} "
        f"distance={dist:.4g} rate_ab={rate_ab:.4g} rate_ba={rate_ba:.4g}"
    )
    return EXIT_OK


def cmd_validate(cfg, args):
    dataset = _load_dataset(cfg)
    db = LandscapeDB.load(_db_path(cfg, args))
    violations = validate_db(db, dataset)
    for kind, rec_id, message in violations:
        print(f"validate: {kind} {rec_id}: {message}")
    print(
        f"validate: minima={len(db.minima)} transition_states={len(db.transition_states)} "
        f"violations={len(violations)}"
    )
    return EXIT_OK if not violations else 1


_COMMANDS = {
    "explore": cmd_explore,
    "connect": cmd_connect,
    "rates": cmd_rates,
    "path": cmd_path,
    "dgraph": cmd_dgraph,
    "frustration": cmd_frustration,
    "compare": cmd_compare,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except DatabaseError as exc:
        print(f"database error: {exc}", file=sys.stderr)
        return EXIT_MISSING


if __name__ == "__main__":
    sys.exit(main())
