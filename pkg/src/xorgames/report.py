"""Full analysis pipeline and its JSON report."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from . import __version__
from .certificate import (
    AGREEMENT_TOL,
    RHO_TOL,
    AdvantageCertificate,
    cor1_check,
    no_advantage,
    symmetric_reduction_check,
)
from .game import CLASSICAL_CAP, GameError, XorGame, classical_value, fraction_str, game_to_dict
from .graph import ALPHA_CAP, SPECTRUM_TOL, build_graph_operator, build_graph_rules, spectrum_formula, structural_checks
from .quantum import SolverError, norm_bound_check, quantum_value
from .sdp import DEFAULT_TOL
from .theta import CLASS1_TOL, class1_certify

CHAIN_TOL = 1e-5
THETA_CAP = 256
GRAPH_CAP = 512


@dataclass
class AnalysisOptions:
    tol: float = DEFAULT_TOL
    cert_tol: float = RHO_TOL
    alpha_cap: int = ALPHA_CAP
    classical_cap: int = CLASSICAL_CAP
    graph: bool = True
    digits: int = 9
    timings: bool = False


@dataclass
class AnalysisReport:
    data: dict
    inconsistent: bool = False
    notes: list[str] = field(default_factory=list)


def _round(x: float, digits: int) -> float:
    if x == 0 or not math.isfinite(x):
        return x
    return float(f"{x:.{digits}g}")


def _cert_dict(c: AdvantageCertificate) -> dict:
    return {
        "strategy": {"alice": list(c.strategy[0]), "bob": list(c.strategy[1])},
        "sigma": [fraction_str(v) for v in c.sigma_diag],
        "lambda": [fraction_str(v) for v in c.lambda_diag],
        "definiteness": c.definiteness,
        "rho": c.rho if math.isfinite(c.rho) else None,
        "rho_abs_error": c.rho_error if math.isfinite(c.rho) else None,
        "rho_rel_error": c.rho_rel_error if math.isfinite(c.rho) else None,
        "passes": c.passes,
        "tolerance": c.tolerance_used,
    }


def analyze(game: XorGame, opts: AnalysisOptions | None = None) -> AnalysisReport:
    """Run every analysis stage on one game.

    Stages that would exceed a size cap are skipped with a reason in
    ``skipped``; a certificate/SDP disagreement sets ``inconsistent``.
    """
    opts = opts or AnalysisOptions()
    timings: dict[str, float] = {}
    skipped: dict[str, str] = {}
    notes = list(game.notes)
    inconsistent = False
    out: dict = {
        "game": {**game_to_dict(game), "uniform": game.uniform},
        "tolerances": {
            "sdp": opts.tol,
            "certificate_rho": opts.cert_tol,
            "agreement": AGREEMENT_TOL,
            "spectrum": SPECTRUM_TOL,
            "class1": CLASS1_TOL,
            "chain": CHAIN_TOL,
        },
    }

    t0 = time.perf_counter()
    classical = None
    try:
        classical = classical_value(game, cap=opts.classical_cap)
    except GameError as exc:
        skipped["classical"] = str(exc)
    timings["classical"] = time.perf_counter() - t0
    if classical is not None:
        out["classical"] = {
            "bias": fraction_str(classical.bias),
            "value": fraction_str(classical.value),
            "bias_float": classical.bias_float,
            "value_float": classical.value_float,
            "strategies": [{"alice": list(a), "bob": list(b)} for a, b in classical.optimal_pairs],
            "exact": True,
        }

    t0 = time.perf_counter()
    quantum = None
    if 2 * game.m > 256:
        skipped["quantum"] = f"SDP dimension {2 * game.m} exceeds 256"
    else:
        try:
            quantum = quantum_value(game, tol=opts.tol, strict=False)
        except (SolverError, ValueError) as exc:
            skipped["quantum"] = str(exc)
    timings["quantum"] = time.perf_counter() - t0
    if quantum is not None:
        d = opts.digits
        q = {
            "bias": _round(quantum.bias, d),
            "value": _round(quantum.value, d),
            "dual_value": _round(quantum.dual_value, d),
            "gap": quantum.gap,
            "status": quantum.sdp.status,
            "iterations": quantum.sdp.iterations,
            "primal_residual": quantum.sdp.primal_residual,
            "vector_dimension": int(quantum.vectors.shape[1]),
            "tolerance": opts.tol,
        }
        if not quantum.sdp.optimal:
            notes.append(f"quantum SDP did not converge (status {quantum.sdp.status})")
        if game.uniform:
            nb = norm_bound_check(game, quantum)
            q["norm_bound"] = {
                "operator_norm_over_m": nb.norm_bound,
                "saturated": nb.saturated,
                "tolerance": 1e-6,
            }
        out["quantum"] = q
        if classical is not None:
            out["advantage"] = {
                "omega_gap": quantum.value - classical.value_float,
                "quantum_advantage": quantum.value - classical.value_float > AGREEMENT_TOL,
                "tolerance": AGREEMENT_TOL,
            }

    t0 = time.perf_counter()
    certs: dict = {}
    if classical is not None:
        if game.has_zero_line:
            skipped["thm1"] = "game matrix has an all-zero row or column"
        else:
            verdict = no_advantage(
                game,
                tol=opts.cert_tol,
                classical=classical,
                quantum=quantum,
                cross_check=quantum is not None,
            )
            certs["thm1"] = {
                "no_advantage": verdict.no_advantage,
                "consistent_with_sdp": verdict.consistent,
                "best": _cert_dict(verdict.best),
                "num_strategies": len(verdict.certificates),
                "num_passing": sum(c.passes for c in verdict.certificates),
            }
            if verdict.consistent is False:
                inconsistent = True
                notes.extend(verdict.notes)
            if game.is_symmetric():
                for cert in verdict.certificates:
                    a, b = cert.strategy
                    if a == b or a == tuple(-v for v in b):
                        sym = symmetric_reduction_check(game, (a, b), tol=opts.cert_tol)
                        certs["symmetric_reduction"] = {
                            "strategy": {"alice": list(a), "bob": list(b)},
                            "passes": sym.passes,
                            "rho": sym.rho if math.isfinite(sym.rho) else None,
                            "sigma_definite": sym.sigma_definite,
                            "agrees_with_thm1": sym.passes == cert.passes,
                            "tolerance": opts.cert_tol,
                        }
                        break
    c1 = cor1_check(game)
    certs["cor1"] = {
        "is_pm_one": c1.is_pm_one,
        "max_singular_value": c1.max_singular_value,
        "degeneracy": c1.degeneracy,
        "matched_strategy": (
            {"alice": list(c1.matched_strategy[0]), "bob": list(c1.matched_strategy[1])}
            if c1.matched_strategy
            else None
        ),
        "explanation": c1.explanation,
    }
    out["certificates"] = certs
    timings["certificates"] = time.perf_counter() - t0

    if not opts.graph:
        skipped["graph"] = "disabled by --no-graph"
    elif 2 * game.m**2 > GRAPH_CAP:
        skipped["graph"] = f"game graph would have {2 * game.m**2} vertices > {GRAPH_CAP}"
    else:
        t0 = time.perf_counter()
        if not game.uniform:
            notes.append("game graph built from the sign pattern only (non-uniform distribution)")
        g = build_graph_rules(game.signs)
        g_op = build_graph_operator(game.signs)
        spec = spectrum_formula(game.signs, g)
        st = structural_checks(g)
        gr = {
            "vertices": g.n,
            "edges": len(g.edges()),
            "constructions_agree": bool((g.adjacency == g_op.adjacency).all()),
            "spectrum_match": spec.matches,
            "spectrum_max_deviation": spec.max_deviation,
            "spectrum_tolerance": spec.tolerance,
            "regular_degree": st.degree if st.regular else None,
            "triangle_free": st.triangle_free,
            "perfect_matching": st.matching_valid,
            "sign_pattern_only": not game.uniform,
        }
        out["graph"] = gr
        timings["graph"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        if not game.uniform:
            skipped["capacity"] = "class-1 certification needs a uniform game"
        elif g.n > THETA_CAP:
            skipped["capacity"] = f"theta SDP dimension {g.n} exceeds {THETA_CAP}"
        else:
            try:
                cap = class1_certify(game, tol=opts.tol, alpha_cap=opts.alpha_cap, graph=g)
            except GameError as exc:
                skipped["capacity"] = str(exc)
            else:
                gr["alpha"] = cap.alpha
                gr["alpha_source"] = cap.alpha_source
                gr["alpha_witness"] = list(cap.alpha_witness)
                w = cap.theta_witness
                out["capacity"] = {
                    "alpha": cap.alpha,
                    "theta": cap.theta,
                    "class1": cap.class1,
                    "gap": cap.gap,
                    "tolerance": cap.tolerance,
                    "witness": (
                        {"a": w.a, "b": w.b, "lambda_max": w.lambda_max, "valid": w.valid}
                        if w is not None
                        else None
                    ),
                    "solver": {
                        "gap": cap.theta_result.sdp.gap,
                        "iterations": cap.theta_result.sdp.iterations,
                        "status": cap.theta_result.sdp.status,
                    },
                    "notes": list(cap.notes),
                }
                if classical is not None and cap.alpha_source == "branch_and_bound":
                    m2wc = classical.value * game.m**2
                    gr["alpha_equals_m2_omega_c"] = m2wc == cap.alpha
                if quantum is not None:
                    m2wq = game.m**2 * quantum.value
                    out["chain"] = {
                        "alpha": cap.alpha,
                        "m2_omega_q": m2wq,
                        "theta": cap.theta,
                        "holds": cap.alpha <= m2wq + CHAIN_TOL and m2wq <= cap.theta + CHAIN_TOL,
                        "tolerance": CHAIN_TOL,
                    }
        timings["capacity"] = time.perf_counter() - t0

    out["skipped"] = skipped
    out["notes"] = notes
    out["consistency"] = {"ok": not inconsistent}
    prov = {"tool": "xorgames", "version": __version__}
    if opts.timings:
        prov["timings_s"] = timings
    out["provenance"] = prov
    return AnalysisReport(out, inconsistent, notes)
