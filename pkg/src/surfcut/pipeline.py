"""End-to-end runs: baseline, mortar, spanner, contraction, dynamic program, lift."""

from __future__ import annotations

import hashlib
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction

from .cutgraph import (baseline_cut_graph, exact_cut_graph, is_cut_graph, prune_to_single_face,
                       reduce)
from .dp_solver import solve
from .errors import NotACutGraph, SurfcutError, WidthCapExceeded
from .mortar_brick import build_mortar, derive_params, extract_bricks, select_portals
from .scdecomp import build_scd
from .spanner import build_spanner, contract_lightest, contraction_partition
from .surface_map import EdgeSubset, EmbeddedGraph, as_fraction

MODES = ("exact", "approx", "spanner-only")


@dataclass
class Caps:
    theta_cap: int = 12
    width_cap: int = 8
    state_cap: int = 200_000
    oracle_budget: int = 16
    k: int | None = None
    threads: int = 1


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, Fraction):
        return "%d/%d" % (v.numerator, v.denominator)
    if v is None:
        return "na"
    return str(v)


@dataclass
class PipelineReport:
    values: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)   # in-memory stage outputs, not serialized

    def __getitem__(self, key):
        return self.values[key]

    def body(self) -> str:
        return "".join("%s %s\n" % (k, _fmt(v)) for k, v in self.values.items())

    def format(self) -> str:
        out = self.body() + "[timing]\n"
        out += "".join("%s %.6f\n" % (k, v) for k, v in self.timing.items())
        return out

    def golden_hash(self) -> str:
        return hashlib.sha256(self.body().encode()).hexdigest()


def report_hash(text: str) -> str:
    """Hash of a serialized report with its timing section removed."""
    return hashlib.sha256(text.split("[timing]\n", 1)[0].encode()).hexdigest()


class _Stages:
    def __init__(self, report: PipelineReport):
        self.report = report

    @contextmanager
    def __call__(self, name: str):
        t = time.perf_counter()
        try:
            yield
        except SurfcutError as exc:
            if not getattr(exc, "stage", None):
                exc.stage = name
            raise
        finally:
            self.report.timing[name] = time.perf_counter() - t


def _finish(g: EmbeddedGraph, h: EdgeSubset, report: PipelineReport) -> EdgeSubset:
    cert = is_cut_graph(g, h)
    if not cert.valid and h.edges:
        h = prune_to_single_face(g, h)
        cert = is_cut_graph(g, h)
    if not cert.valid:
        err = NotACutGraph("final subgraph is not a cut graph: %s" % (cert,))
        err.stage = "certify"
        raise err
    report.values["final_length"] = h.length
    report.values["final_edges"] = len(h.edges)
    report.values["certificate_valid"] = True
    report.values["certificate_faces"] = cert.face_count
    report.values["certificate_euler"] = "%d=%d" % (cert.euler_lhs, cert.euler_rhs)
    return h


def run_pipeline(g: EmbeddedGraph, epsilon=1, mode: str = "approx", caps: Caps | None = None,
                 seed: int | None = None) -> tuple[PipelineReport, EdgeSubset]:
    """Run one mode on ``g``; the returned solution is certified on ``g``."""
    if mode not in MODES:
        raise ValueError("mode must be one of %s" % (MODES,))
    caps = caps or Caps()
    eps = as_fraction(epsilon)
    report = PipelineReport()
    v = report.values
    stage = _Stages(report)
    v.update(mode=mode, seed=seed, n=g.n, m=g.m, g=g.genus, epsilon=eps)

    with stage("baseline"):
        base = baseline_cut_graph(g)
    v["baseline_length"] = base.length

    if mode == "exact":
        with stage("oracle"):
            h = exact_cut_graph(g, edge_budget=caps.oracle_budget)
        v["oracle_length"] = h.length
        with stage("certify"):
            h = _finish(g, h, report)
        return report, h

    if g.genus == 0:
        # the sphere needs no cut; every later stage is trivial
        h = EdgeSubset.of(g, (), (0,))
        v["dp_length"] = Fraction(0)
        with stage("certify"):
            h = _finish(g, h, report)
        return report, h

    with stage("mortar"):
        p0 = derive_params(g.genus, eps, 1, theta_cap=4096)
        mg = build_mortar(g, p0, base)
        alpha = mg.length / base.length if base.length else Fraction(1)
        bricks = extract_bricks(mg)
    v.update(alpha=alpha, kappa=p0.kappa, mortar_length=mg.length,
             supercolumn_length=mg.supercolumn_length, supercolumns=len(mg.supercolumns),
             bricks=len(bricks), fallback_bricks=mg.stats.get("fallback", 0))

    with stage("portals"):
        params = derive_params(g.genus, eps, alpha)
        portals = [select_portals(br, params.theta) for br in bricks]
    v.update(gamma=params.gamma, theta=params.theta,
             portals_max=max((len(set(p.vertices)) for p in portals), default=0))

    with stage("spanner"):
        sp = build_spanner(g, mg, bricks, portals, theta_cap=caps.theta_cap,
                           spanner_factor=params.spanner_factor, threads=caps.threads)
    v.update(spanner_length=sp.length, f=sp.factor_witness, spanner_heuristic=sp.heuristic,
             steiner_subsets=sp.subsets, spanner_n=sp.graph.n, spanner_m=sp.graph.m)
    report.artifacts.update(mortar=mg, bricks=bricks, portals=portals, spanner=sp)

    if mode == "spanner-only":
        work, lift, chosen_w = sp.graph, None, Fraction(0)
        v.update(k=None, chosen_weight=chosen_w, pigeonhole_bound=None)
    else:
        with stage("contract"):
            k = caps.k if caps.k is not None else derive_params(
                g.genus, eps, alpha, measured_f=sp.factor_witness).k_contraction
            part = contraction_partition(sp.graph, k)
            chosen_w = part.chosen_weight
            if chosen_w * k > sp.length:
                raise AssertionError("pigeonhole bound violated")
            work, lift = contract_lightest(sp.graph, part)
        v.update(k=k, chosen_weight=chosen_w, pigeonhole_bound=sp.length / k)
        report.artifacts["partition"] = part
    v.update(tw_n=work.n, tw_m=work.m)

    with stage("decompose"):
        bundle = build_scd(work, "b")
        width = bundle.scd.branch.width
        if width > caps.width_cap:
            raise WidthCapExceeded("branch width %d exceeds cap %d" % (width, caps.width_cap))
    v["width"] = width

    with stage("dp"):
        h_tw, dp = solve(work, bundle, state_cap=caps.state_cap, return_dp=True)
    v["dp_length"] = h_tw.length
    v["dp_peak_entries"] = dp.stats.peak_entries if dp is not None else 0
    report.artifacts.update(scd=bundle, dp=dp)

    with stage("lift"):
        if lift is not None:
            lifted = lift(h_tw.edges, h_tw.vertices)
            if lifted.length > h_tw.length + chosen_w:
                raise AssertionError("lift added more than the contracted weight")
        else:
            lifted = h_tw
        if lifted.edges:
            h = EdgeSubset.of(g, {sp.to_source[e] for e in lifted.edges})
        else:
            h = EdgeSubset.of(g, (), (0,))
    v["lifted_length"] = h.length

    with stage("certify"):
        h = _finish(g, h, report)
    v["final_ge_dp"] = h.length >= v["dp_length"]
    if h.edges:
        red = reduce(g, h).map
        v.update(reduced_vertices=red.n, reduced_edges=red.m)
    return report, h


def with_ratio(report: PipelineReport, opt: Fraction) -> None:
    """Record OPT, the ratio and the empirical constant c in (1 + c eps)."""
    v = report.values
    v["opt"] = opt
    final = v["final_length"]
    if opt:
        ratio = final / opt
        v["ratio"] = ratio
        v["c"] = (ratio - 1) / v["epsilon"]
    else:
        v["ratio"] = Fraction(1) if final == 0 else None
        v["c"] = Fraction(0) if final == 0 else None
