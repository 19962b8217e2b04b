"""Run orchestration for the four commands.

Each command computes its results (independent channels in a thread
pool), then writes its data files in one go and reports whether every
check passed.

"""
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import lowdim
from .clifford import (
    BETA,
    SIGMA,
    alpha_identity_sweep,
    basis_gram_matrix,
    build_gamma_basis,
    check_weak_conditions,
    dot_alpha,
    implication_scan,
    max_abs,
    sigma_from_alpha,
)
from .color_printer import color_printer
from .exc import SolverError
from .radial import (
    match_doublets,
    partner_kappa,
    schrodinger_oracle,
    solve_bound_states,
    splitting_scan,
)
from .reports import (
    SCAN_COLUMNS,
    SPECTRUM_COLUMNS,
    make_document,
    output_paths,
    write_csv,
    write_json,
)
from .symmetry import verify_sweep


__all__ = ["CommandResult", "run"]


log = logging.getLogger(__name__)

EXPECTED_CANDIDATES = ["gamma0", "i*gamma0*gamma5"]


class CommandResult:
    def __init__(self, command, passed, rows=(), results=None, files=()):
        self.command = command
        self.passed = passed
        self.rows = list(rows)
        self.results = results
        self.files = list(files)

    def __repr__(self):
        status = "pass" if self.passed else "FAIL"
        return f"<CommandResult {self.command} {status} ({len(self.rows)} rows)>"


def in_channel(label, function, *args, **kwargs):
    """Call ``function``; re-raise solver errors naming the channel."""
    try:
        return function(*args, **kwargs)
    except SolverError as exc:
        error = type(exc)(f"{label}: {exc}")
        if hasattr(exc, "radii"):
            error.radii = exc.radii
        raise error from exc


def map_channels(config, function, channels):
    with ThreadPoolExecutor(max_workers=config.threads) as executor:
        return list(executor.map(function, channels))


def relative_error(energy, reference):
    return abs(energy - reference) / max(abs(reference), 1.0)


# verify-algebra


def weak_condition_reports(config):
    """Weak-condition reports for both forms at seeded unit vectors."""
    rng = np.random.default_rng(config.seed)
    tolerance = config.tolerances["exact"]
    scale = float(np.linalg.norm(config.algebra.epsilon))
    reports = []
    for _ in range(3):
        lam = rng.normal(size=3)
        lam /= np.linalg.norm(lam)
        q = rng.uniform(-config.algebra.span, config.algebra.span, size=3)
        in_plane = q - np.dot(q, lam) * lam
        along = np.dot(q, lam) * lam
        for O, p in ((dot_alpha(lam), in_plane), (1j * BETA @ dot_alpha(lam), along)):
            # Only rotations about lambda are symmetries.
            report = check_weak_conditions(O, lam, scale * lam, p, tolerance=tolerance)
            general = check_weak_conditions(
                O, lam, config.algebra.epsilon, p, tolerance=tolerance
            )
            entry = report.to_dict()
            entry["lambda"] = lam.tolist()
            entry["epsilon_identity"] = general.residuals["epsilon_identity"]
            entry["pass"] = report.passed and general.residuals["epsilon_identity"] <= tolerance
            reports.append(entry)
    return reports


def verify_algebra(config):
    tolerances = config.tolerances
    algebra = config.algebra
    basis = build_gamma_basis()
    sweep = verify_sweep(
        config.seed,
        algebra.samples,
        algebra.span,
        algebra.epsilon,
        tolerances,
        config.threads,
    )
    identity = alpha_identity_sweep(config.seed, algebra.samples, algebra.identity_span)
    sigma = max(max_abs(a - b) for a, b in zip(sigma_from_alpha(), SIGMA))
    gram = max_abs(basis_gram_matrix(basis) - np.eye(len(basis)))
    counterexamples = implication_scan(basis)
    weak = weak_condition_reports(config)
    checks = {
        "candidates": sweep.candidates == EXPECTED_CANDIDATES,
        "implication": not counterexamples,
        "alpha_identity": identity <= tolerances["identity"],
        "sigma_from_alpha": sigma <= tolerances["exact"],
        "basis_orthonormal": gram <= tolerances["exact"],
        "sweep": sweep.passed,
        "weak": all(entry["pass"] for entry in weak),
    }
    results = {
        "candidates": sweep.candidates,
        "implication_counterexamples": counterexamples,
        "alpha_identity_residual": identity,
        "sigma_from_alpha_residual": sigma,
        "basis_gram_residual": gram,
        "weak_conditions": weak,
        "sweep": {
            "contexts": len(sweep.reports),
            "control_residual": sweep.control,
            "max_residuals": sweep.max_residuals(),
            "failures": [r.to_dict() for r in sweep.reports if not r.passed],
        },
        "checks": checks,
    }
    for name, passed in checks.items():
        log.debug("verify-algebra %s: %s", name, "pass" if passed else "fail")
    return CommandResult("verify-algebra", all(checks.values()), results=results)


# spectrum


def radial_spectrum(config):
    radial = config.radial
    tolerances = config.tolerances
    scenario = config.scenario()
    grid = config.radial_grid()

    def solve(kappa):
        label = f"kappa={kappa}"
        states = in_channel(
            label,
            solve_bound_states,
            scenario,
            kappa,
            radial.window,
            grid,
            radial.scan_points,
            tolerances["bisection"],
            radial.grid.match,
        )
        oracle = {}
        if scenario.exact:
            levels = in_channel(
                label,
                schrodinger_oracle,
                scenario,
                kappa,
                radial.window,
                grid,
                radial.scan_points,
                tolerances["fixed_point"],
            )
            oracle = {level.nodes: level.energy for level in levels}
        return kappa, states, oracle

    rows = []
    passed = True
    for kappa, states, oracle in map_channels(config, solve, radial.kappas):
        for state in states:
            reference = oracle.get(state.schrodinger_nodes)
            if scenario.exact:
                agree = reference is not None and (
                    relative_error(state.energy, reference) <= tolerances["oracle"]
                )
                passed = passed and agree
            rows.append(
                {
                    "dimension": "3d",
                    "branch": scenario.branch,
                    "kappa": kappa,
                    "nodes": state.schrodinger_nodes,
                    "energy": state.energy,
                    "partner_kappa": partner_kappa(kappa, scenario.symmetry),
                    "oracle_energy": reference,
                }
            )
    return rows, passed, {"scenario": scenario.to_dict(), "grid": grid.to_dict()}


def planar_spectrum(config):
    planar = config.planar
    tolerances = config.tolerances

    def solve(m_j):
        problem = config.planar_problem(m_j)
        label = f"m_j={m_j:+g}"
        states = in_channel(
            label,
            lowdim.solve_2d_radial,
            problem,
            planar.window,
            planar.scan_points,
            tolerances["bisection"],
        )
        oracle = {}
        if problem.exact:
            levels = in_channel(
                label,
                lowdim.planar_oracle,
                problem,
                planar.window,
                planar.scan_points,
                tolerances["fixed_point"],
            )
            oracle = {level.nodes: level.energy for level in levels}
        report = lowdim.check_weak_symmetry_residuals(
            problem,
            planar.window,
            states,
            generator_tolerance=tolerances["generator"],
        )
        return problem, states, oracle, report

    rows = []
    reports = []
    passed = True
    for problem, states, oracle, report in map_channels(config, solve, planar.m_j):
        reports.append({"m_j": problem.m_j, **report.to_dict()})
        passed = passed and report.passed
        for state in states:
            reference = oracle.get(state.nodes)
            if problem.exact:
                passed = passed and reference is not None and (
                    relative_error(state.energy, reference) <= tolerances["oracle"]
                )
            rows.append(
                {
                    "dimension": "2d",
                    "branch": problem.relation,
                    "m_j": problem.m_j,
                    "nodes": state.nodes,
                    "energy": state.energy,
                    "partner_m_j": lowdim.partner_m_j(problem.m_j, problem.symmetry),
                    "oracle_energy": reference,
                }
            )
    return rows, passed, {"symmetry_reports": reports}


def axial_spectrum(config):
    axial = config.axial
    tolerances = config.tolerances
    problem = config.axial_problem()
    states = lowdim.solve_1d(problem, axial.window, axial.stencil)
    oracle = {}
    if problem.exact:
        oracle = {
            level.nodes: level.energy
            for level in lowdim.axial_oracle(
                problem, axial.window, tolerance=tolerances["fixed_point"]
            )
        }
    report = lowdim.check_weak_symmetry_residuals(
        problem,
        axial.window,
        states,
        tolerance=tolerances["weak"],
        hermiticity_tolerance=tolerances["hermiticity"],
    )
    passed = report.passed
    rows = []
    for state in states:
        reference = oracle.get(state.nodes)
        if problem.exact:
            # Both spectra come from the same staggered operator.
            passed = passed and reference is not None and (
                abs(state.energy - reference) <= tolerances["weak"]
            )
        rows.append(
            {
                "dimension": "1d",
                "branch": problem.relation,
                "channel": state.channel,
                "nodes": state.nodes,
                "energy": state.energy,
                "oracle_energy": reference,
            }
        )
    return rows, passed, {"symmetry_report": report.to_dict()}


def spectrum(config):
    solver = {"3d": radial_spectrum, "2d": planar_spectrum, "1d": axial_spectrum}
    rows, passed, results = solver[config.dimension](config)
    results["levels"] = len(rows)
    return CommandResult("spectrum", passed, rows, results)


# doublets


def kappa_pairs(kappas, symmetry):
    """Unique ``(kappa, partner)`` pairs in the order the kappas are listed."""
    pairs = []
    seen = set()
    for kappa in kappas:
        partner = partner_kappa(kappa, symmetry)
        key = frozenset((kappa, partner))
        if partner is not None and key not in seen:
            seen.add(key)
            pairs.append((kappa, partner))
    return pairs


def m_j_pairs(m_j_values, symmetry):
    pairs = []
    seen = set()
    for m_j in m_j_values:
        partner = lowdim.partner_m_j(m_j, symmetry)
        key = frozenset((m_j, partner))
        if partner is not None and key not in seen:
            seen.add(key)
            pairs.append((m_j, partner))
    return pairs


def radial_doublets(config, scenario=None):
    radial = config.radial
    tolerances = config.tolerances
    scenario = scenario or config.scenario()
    grid = config.radial_grid()
    pairs = kappa_pairs(radial.kappas, scenario.symmetry)
    channels = sorted({k for pair in pairs for k in pair})

    def solve(kappa):
        return in_channel(
            f"kappa={kappa}",
            solve_bound_states,
            scenario,
            kappa,
            radial.window,
            grid,
            radial.scan_points,
            tolerances["bisection"],
            radial.grid.match,
        )

    states = dict(zip(channels, map_channels(config, solve, channels)))
    rows = []
    doublets = []
    for kappa, partner in pairs:
        for doublet in match_doublets(states[kappa], states[partner]):
            doublets.append(doublet)
            rows.append(
                {
                    "dimension": "3d",
                    "branch": scenario.branch,
                    "kappa": kappa,
                    "nodes": doublet.nodes,
                    "energy": doublet.state.energy,
                    "partner_kappa": partner,
                    "splitting": doublet.splitting,
                }
            )
    return rows, doublets, scenario.exact


def planar_doublets(config, amplitude=None):
    planar = config.planar
    tolerances = config.tolerances
    first = config.planar_problem(planar.m_j[0], amplitude)
    symmetry = first.symmetry
    pairs = m_j_pairs(planar.m_j, symmetry)
    channels = sorted({m for pair in pairs for m in pair})

    def solve(m_j):
        problem = config.planar_problem(m_j, amplitude)
        states = in_channel(
            f"m_j={m_j:+g}",
            lowdim.solve_2d_radial,
            problem,
            planar.window,
            planar.scan_points,
            tolerances["bisection"],
        )
        return problem, states

    solved = dict(zip(channels, map_channels(config, solve, channels)))
    rows = []
    doublets = []
    for m_j, partner in pairs:
        problem, states = solved[m_j]
        partners = {s.nodes: s for s in solved[partner][1]}
        for state in states:
            other = partners.get(state.nodes)
            if other is None:
                continue
            splitting = abs(state.energy - other.energy)
            doublets.append((m_j, partner, state, other, splitting))
            rows.append(
                {
                    "dimension": "2d",
                    "branch": problem.relation,
                    "m_j": m_j,
                    "nodes": state.nodes,
                    "energy": state.energy,
                    "partner_m_j": partner,
                    "splitting": splitting,
                }
            )
    return rows, doublets, first.exact


def doublets(config):
    tolerances = config.tolerances
    if config.dimension == "3d":
        rows, _, exact = radial_doublets(config)
    else:
        rows, _, exact = planar_doublets(config)
    if not rows:
        passed = False
    elif exact:
        passed = all(row["splitting"] <= tolerances["degeneracy"] for row in rows)
    else:
        passed = all(row["splitting"] > tolerances["splitting"] for row in rows)
    results = {
        "doublets": len(rows),
        "max_splitting": max((row["splitting"] for row in rows), default=None),
    }
    return CommandResult("doublets", passed, rows, results)


# scan-breaking


def radial_scan(config):
    radial = config.radial
    tolerances = config.tolerances
    exact = config.exact_scenario()
    grid = config.radial_grid()
    rows = []
    series = []
    for kappa, partner in kappa_pairs(radial.kappas, exact.symmetry):
        scan = in_channel(
            f"kappa={kappa}/{partner}",
            splitting_scan,
            exact,
            radial.breaking.shape,
            radial.breaking.amplitudes,
            kappa,
            radial.window,
            grid,
            threads=config.threads,
            scan_points=radial.scan_points,
            tolerance=tolerances["bisection"],
            match_fraction=radial.grid.match,
        )
        series.append([doublet.splitting for _, doublet in scan])
        for amplitude, doublet in scan:
            rows.append(
                {
                    "dimension": "3d",
                    "branch": "broken",
                    "amplitude": amplitude,
                    "kappa": kappa,
                    "nodes": doublet.nodes,
                    "energy": doublet.state.energy,
                    "partner_energy": doublet.partner.energy,
                    "splitting": doublet.splitting,
                }
            )
    return rows, series


def planar_scan(config):
    planar = config.planar
    rows = []
    series = {}
    for amplitude in planar.breaking.amplitudes:
        _, found, _ = planar_doublets(config, amplitude)
        # Follow the lowest doublet of each pair.
        lowest = {}
        for m_j, partner, state, other, splitting in found:
            key = (m_j, partner)
            if key not in lowest or state.nodes < lowest[key][0].nodes:
                lowest[key] = (state, other, splitting)
        for (m_j, partner), (state, other, splitting) in sorted(lowest.items()):
            series.setdefault((m_j, partner), []).append(splitting)
            rows.append(
                {
                    "dimension": "2d",
                    "branch": "broken",
                    "amplitude": amplitude,
                    "m_j": m_j,
                    "nodes": state.nodes,
                    "energy": state.energy,
                    "partner_energy": other.energy,
                    "splitting": splitting,
                }
            )
    return rows, list(series.values())


def axial_scan(config):
    """Mismatch of the lowest level against the exact-relation oracle."""
    axial = config.axial
    exact = config.axial_problem(amplitude=None)
    if not exact.exact:
        exact = exact.exact_counterpart()
    oracle = {level.nodes: level.energy for level in lowdim.axial_oracle(exact, axial.window)}
    rows = []
    splittings = []
    for amplitude in axial.breaking.amplitudes:
        problem = config.axial_problem(amplitude)
        states = [
            s for s in lowdim.solve_1d(problem, axial.window, axial.stencil) if s.channel == 1
        ]
        common = [s for s in states if s.nodes in oracle]
        if not common:
            raise SolverError(f"amplitude={amplitude}: no level shared with the exact oracle")
        state = min(common, key=lambda s: s.nodes)
        splitting = abs(state.energy - oracle[state.nodes])
        splittings.append(splitting)
        rows.append(
            {
                "dimension": "1d",
                "branch": "broken",
                "amplitude": amplitude,
                "nodes": state.nodes,
                "energy": state.energy,
                "partner_energy": oracle[state.nodes],
                "splitting": splitting,
            }
        )
    return rows, [splittings]


def scan_breaking(config):
    scanner = {"3d": radial_scan, "2d": planar_scan, "1d": axial_scan}
    rows, series = scanner[config.dimension](config)
    increasing = [bool(np.all(np.diff(values) > 0)) for values in series]
    passed = bool(series) and all(increasing) and all(len(v) > 1 for v in series)
    results = {"series": series, "increasing": increasing}
    return CommandResult("scan-breaking", passed, rows, results)


COMMAND_FUNCTIONS = {
    "verify-algebra": verify_algebra,
    "spectrum": spectrum,
    "doublets": doublets,
    "scan-breaking": scan_breaking,
}


def run(config, out=None, printer=color_printer):
    """Run ``config.command`` and write its data files to ``out``.

    Raises:
        SolverError: Propagated from the solvers with the failing channel

    """
    command = config.command
    directory = out or config.output.directory
    printer.print_header(f"spin-symmetry {command} ({config.location})")
    result = COMMAND_FUNCTIONS[command](config)

    csv_path, json_path = output_paths(directory, command)
    document = make_document(command, config, result.results, result.passed)
    if command != "verify-algebra":
        columns = SCAN_COLUMNS if command == "scan-breaking" else SPECTRUM_COLUMNS
        result.files.append(write_csv(csv_path, command, result.rows, columns))
        document["rows"] = result.rows
    result.files.append(write_json(json_path, document))

    for path in result.files:
        printer.print_info(f"Wrote {path}")
    if result.passed:
        printer.print_result(True, f"{command}: pass")
    else:
        printer.print_result(False, f"{command}: FAIL")
    return result
