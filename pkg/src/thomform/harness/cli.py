"""Command line: ``thomform run ...``."""

from __future__ import annotations

import argparse
import configparser
import itertools
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .report import dump_reports
from .scenarios import SCENARIOS, ScenarioSpec, run_scenario

log = logging.getLogger("thomform")

# flag name -> (ScenarioSpec field or None, type)
OPTIONS = {
    "scenario": str, "all": bool, "n": int, "m": int, "base_dim": int, "order": int, "seed": int,
    "seeds": int, "max_rank": int, "s": int, "variant": str, "compare_order": int, "report": str,
    "workers": int, "oracle": bool, "timing": bool,
}
DEFAULTS = {
    "all": False, "n": 2, "m": 1, "base_dim": 1, "order": 3, "seed": None, "seeds": None, "max_rank": 4,
    "s": 2, "variant": "random", "compare_order": None, "report": None, "workers": 1, "oracle": True,
    "timing": True, "scenario": None,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thomform", description="Verify Mathai-Quillen identities in exact arithmetic.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run verification scenarios")
    which = run.add_mutually_exclusive_group()
    which.add_argument("--scenario", choices=sorted(SCENARIOS), default=argparse.SUPPRESS)
    which.add_argument("--all", action="store_true", default=argparse.SUPPRESS, help="run the full suite")
    for name in ("n", "m", "seed", "seeds", "s", "workers"):
        run.add_argument(f"--{name}", type=int, default=argparse.SUPPRESS)
    run.add_argument("--base-dim", dest="base_dim", type=int, default=argparse.SUPPRESS)
    run.add_argument("--order", type=int, default=argparse.SUPPRESS, help="jet truncation order K")
    run.add_argument("--compare-order", dest="compare_order", type=int, default=argparse.SUPPRESS)
    run.add_argument("--max-rank", dest="max_rank", type=int, default=argparse.SUPPRESS)
    run.add_argument("--variant", default=argparse.SUPPRESS)
    run.add_argument("--report", default=argparse.SUPPRESS, help="write JSON reports here")
    run.add_argument("--oracle", dest="oracle", action="store_true", default=argparse.SUPPRESS)
    run.add_argument("--no-oracle", dest="oracle", action="store_false", default=argparse.SUPPRESS)
    run.add_argument("--no-timing", dest="timing", action="store_false", default=argparse.SUPPRESS,
                     help="write elapsed_ms as 0 so reports are byte-for-byte reproducible")
    run.add_argument("--config", default=None, help="key = value file under a [run] section; flags override it")
    run.add_argument("-v", "--verbose", action="store_true")
    return parser


def read_config(path: str) -> dict:
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise FileNotFoundError(path)
    section = cp["run"] if cp.has_section("run") else cp[cp.default_section]
    out = {}
    for key, raw in section.items():
        key = key.replace("-", "_")
        kind = OPTIONS.get(key)
        if kind is None:
            raise ValueError(f"unknown config key {key!r}")
        out[key] = section.getboolean(key) if kind is bool else kind(raw)
    return out


def suite(max_rank: int, seeds: int, oracle: bool = True) -> list[ScenarioSpec]:
    """Desk-scale grid over every scenario; seed 0 is the flat instance."""
    seed_list = [0] + list(range(1, seeds + 1))
    specs: list[ScenarioSpec] = []

    def add(name, seeds_=seed_list, **kw):
        specs.extend(ScenarioSpec(name, seed=s, oracle=oracle, **kw) for s in seeds_)

    for n, m, d, K in itertools.product((1, 2, 3), (1, 2), (1, 2), (2, 3)):
        if n + m <= max_rank:
            add("theorem-nat", n=n, m=m, d=d, K=K)
    for n, m, d in itertools.product((1, 2, 3), (1, 2), (1, 2)):
        if n + m <= max_rank:
            add("theorem-res", n=n, m=m, d=d, K=3)
    for n, d in itertools.product((1, 2, 3), (1, 2)):
        if n <= max_rank:
            add("closedness", n=n, d=d, K=3)
            add("closedness", n=n, d=d, K=3, variant="cayley")
    for n in range(1, min(4, max_rank) + 1):
        add("normalization", n=n, d=2, K=3)
    for n, m in itertools.product((1, 2), (1, 2)):
        if n + m <= max_rank:
            add("lemma-nat", n=n, m=m, d=1, K=2)
            add("lemma-part", n=n, m=m, d=1, K=2)
    for n in (1, 2):
        if 2 * n <= max_rank:
            add("theorem-patch", seed_list[1:6], n=n, d=1, K=2)
            add("theorem-patch", [1], n=n, d=1, K=2, variant="constant-xi")
            add("theorem-patch", [1], n=n, d=1, K=2, variant="equal-thetas")
    for l, s in itertools.product(range(1, min(4, max_rank) + 1), range(1, 5)):
        for variant in ("scalar", "one-form"):
            add("wick-crosscheck", seed_list[1:], n=l, m=s, d=2, K=2, variant=variant)
    return specs


def specs_from_options(opts: dict) -> list[ScenarioSpec]:
    if opts["all"]:
        return suite(opts["max_rank"], opts["seeds"] or 10, opts["oracle"])
    if opts["seed"] is not None:
        seeds = [opts["seed"]]
    elif opts["seeds"]:
        seeds = list(range(1, opts["seeds"] + 1))
    else:
        seeds = [1]
    return [ScenarioSpec(opts["scenario"], n=opts["n"], m=opts["m"], d=opts["base_dim"], K=opts["order"],
                         s=opts["s"], seed=seed, compare_order=opts["compare_order"], variant=opts["variant"],
                         oracle=opts["oracle"]) for seed in seeds]


def run_specs(specs: list[ScenarioSpec], workers: int = 1) -> list:
    if workers > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_scenario, specs, chunksize=4))
    return [run_scenario(s) for s in specs]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    opts = dict(DEFAULTS)
    if args.config:
        try:
            opts.update(read_config(args.config))
        except (OSError, ValueError) as exc:
            parser.error(f"config: {exc}")
    opts.update({k: v for k, v in vars(args).items() if k in OPTIONS})
    if not opts["all"] and not opts["scenario"]:
        parser.error("one of --scenario or --all is required")
    try:
        specs = specs_from_options(opts)
    except ValueError as exc:
        parser.error(str(exc))
    log.info("running %d scenario instances", len(specs))
    reports = run_specs(specs, opts["workers"])
    for r in reports:
        print(r.summary())
    failed = [r for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} passed")
    if opts["report"]:
        Path(opts["report"]).write_text(dump_reports(reports, timing=opts["timing"]), encoding="utf-8")
    return 0 if not failed else 1


if __name__ == "__main__":
    sys.exit(main())
