"""Reproducible experiment runner behind the command-line interface.

Parses flat key=value config files merged with command-line overrides,
validates them against per-command schemas (unknown keys are rejected),
executes the command bodies, and emits deterministic CSV/JSON data plus a
JSON manifest for every run.
"""

from __future__ import annotations

import hashlib
import json
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, analysis, gof, models, opuc, sampling
from .errors import ParameterError

TWO_PI = 2.0 * np.pi

# ---------------------------------------------------------------------------
# configuration

_COMMON = {"seed": int, "stream": int, "out": str, "format": str}

SCHEMAS: dict[str, dict[str, type]] = {
    "sample": {
        "n": int, "beta": float, "delta_re": float, "delta_im": float,
        "samples": int, "workers": int, **_COMMON,
    },
    "dump-matrix": {
        "n": int, "beta": float, "delta_re": float, "delta_im": float, **_COMMON,
    },
    "verify": {"seed": int, "scale": float, "inject_bug": bool, "out": str},
    "esd-convergence": {
        "d_re": float, "d_im": float, "beta": float, "ladder": str, "reps": int,
        **_COMMON,
    },
    "plot-data": {
        "d_re": float, "d_im": float, "grid": int, "mft_n": int, "mft_beta": float,
        **_COMMON,
    },
}

DEFAULTS: dict[str, dict] = {
    "sample": {
        "n": 4, "beta": 2.0, "delta_re": 0.0, "delta_im": 0.0, "samples": 10,
        "workers": 1, "seed": 1234, "stream": 0, "out": "samples.csv",
        "format": "csv",
    },
    "dump-matrix": {
        "n": 4, "beta": 2.0, "delta_re": 0.0, "delta_im": 0.0, "seed": 1234,
        "stream": 0, "out": "matrix.json", "format": "json",
    },
    "verify": {"seed": 1234, "scale": 1.0, "inject_bug": False, "out": "verify.manifest.json"},
    "esd-convergence": {
        "d_re": 1.0, "d_im": 0.0, "beta": 2.0, "ladder": "25,50,100,200",
        "reps": 50, "seed": 1234, "stream": 0, "out": "esd.csv", "format": "csv",
    },
    "plot-data": {
        "d_re": 1.0, "d_im": 0.0, "grid": 2048, "mft_n": 0, "mft_beta": 2.0,
        "seed": 1234, "stream": 0, "out": "density.csv", "format": "csv",
    },
}


def parse_config_file(path: str) -> dict[str, str]:
    """Flat key=value lines; '#' starts a comment."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _coerce(command: str, key: str, value):
    schema = SCHEMAS[command]
    if key not in schema:
        raise ParameterError(f"unknown config key {key!r} for command {command!r}")
    target = schema[key]
    if isinstance(value, target):
        return value
    try:
        if target is bool:
            if isinstance(value, str):
                lowered = value.lower()
                if lowered in ("1", "true", "yes", "on"):
                    return True
                if lowered in ("0", "false", "no", "off"):
                    return False
                raise ValueError(value)
            return bool(value)
        return target(value)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"config key {key!r}: cannot parse {value!r} as {target.__name__}") from exc


def build_config(command: str, file_values: dict | None = None, overrides: dict | None = None) -> dict:
    """Defaults <- config file <- explicit overrides, all schema-validated."""
    if command not in SCHEMAS:
        raise ParameterError(f"unknown command {command!r}")
    config = dict(DEFAULTS[command])
    for source in (file_values or {}), (overrides or {}):
        for key, value in source.items():
            config[key] = _coerce(command, key, value)
    if "format" in config and config["format"] not in ("csv", "json"):
        raise ParameterError(f"format must be csv or json, got {config['format']!r}")
    return config


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# manifests and data files


@dataclass
class CheckResult:
    check_id: str
    kind: str  # deterministic | statistical
    passed: bool
    stat: float | None = None
    detail: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)
        if self.stat is not None:
            self.stat = float(self.stat)


@dataclass
class RunManifest:
    command: str
    config: dict
    version: str = __version__
    wall_clock_s: float = 0.0
    outputs: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    manifest_path: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "version": self.version,
            "config": self.config,
            "config_hash": config_hash(self.config),
            "wall_clock_s": self.wall_clock_s,
            "outputs": list(self.outputs),
            "checks": [asdict(c) for c in self.checks],
            "summary": self.summary,
            "passed": self.passed,
        }
        return out

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        self.manifest_path = path


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_rows(path: str, header: list[str], rows: list[tuple], cfg_hash: str, fmt: str) -> None:
    if fmt == "json":
        payload = {
            "config_hash": cfg_hash,
            "columns": header,
            "rows": [[r if not isinstance(r, float) else float(_fmt(r)) for r in row] for row in rows],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
        return
    lines = [f"# config_hash={cfg_hash}", ",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _delta(config) -> complex:
    return complex(config["delta_re"], config["delta_im"])


def _d_value(config) -> complex:
    return complex(config["d_re"], config["d_im"])


# ---------------------------------------------------------------------------
# command bodies


def cmd_sample(config: dict) -> RunManifest:
    t0 = time.perf_counter()
    params = opuc.EnsembleParams(config["n"], config["beta"], _delta(config))
    if params.delta.real < 0:
        raise ParameterError("sampling requires Re(delta) >= 0")
    total = config["samples"]
    if total < 1:
        raise ParameterError("samples must be >= 1")
    workers = max(1, config["workers"])
    base, rem = divmod(total, workers)
    blocks = [(w, base + (1 if w < rem else 0)) for w in range(workers)]

    def run_block(block):
        widx, count = block
        rng = sampling.SeededRng(config["seed"], config["stream"] + widx)
        return [models.sample_cj_spectrum(rng, params) for _ in range(count)]

    if workers == 1:
        results = [run_block(blocks[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_block, blocks))  # ordered reduce by stream

    rows = []
    worst_sum = 0.0
    sample_id = 0
    for chunk in results:
        for measure in chunk:
            worst_sum = max(worst_sum, abs(measure.weights.sum() - 1.0))
            for j in range(params.n):
                rows.append((sample_id, j, float(measure.thetas[j]), float(measure.weights[j])))
            sample_id += 1

    manifest = RunManifest("sample", config)
    cfg_hash = config_hash(config)
    write_rows(config["out"], ["sample_id", "j", "theta", "weight"], rows, cfg_hash, config["format"])
    manifest.outputs.append(config["out"])
    manifest.checks.append(
        CheckResult("sample-weight-normalization", "deterministic",
                    worst_sum <= 1e-10, worst_sum, "max |sum(weights) - 1| per sample")
    )
    manifest.summary = {"samples": total, "rows": len(rows)}
    # how many eigenangles land outside the large-n support window for the
    # matched scaling parameter d = delta / (beta' n)
    d_equiv = params.delta / (params.beta_half * params.n)
    if d_equiv.real >= 0 and d_equiv != 0:
        lp = analysis.limit_params(d_equiv)
        lo, hi = lp.support
        thetas = np.array([row[2] for row in rows])
        outside = float(np.mean((thetas <= lo) | (thetas >= hi)))
        manifest.summary["fraction_outside_support"] = outside
    manifest.wall_clock_s = time.perf_counter() - t0
    manifest.write(config["out"] + ".manifest.json")
    return manifest


def cmd_dump_matrix(config: dict) -> RunManifest:
    t0 = time.perf_counter()
    params = opuc.EnsembleParams(config["n"], config["beta"], _delta(config))
    if params.delta.real < 0:
        raise ParameterError("sampling requires Re(delta) >= 0")
    rng = sampling.SeededRng(config["seed"], config["stream"])
    gammas = sampling.sample_eta(rng, params)
    u = models.reflection_product(gammas)
    payload = models.matrix_to_json_dict(
        u,
        beta=params.beta,
        delta=[params.delta.real, params.delta.imag],
        seed=config["seed"],
        stream=config["stream"],
        version=__version__,
        gammas=opuc.coeffs_to_pairs(gammas.gammas),
    )
    with open(config["out"], "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    manifest = RunManifest("dump-matrix", config)
    manifest.outputs.append(config["out"])
    manifest.checks.append(
        CheckResult("matrix-unitarity", "deterministic",
                    u.unitarity_residual <= 1e-10, u.unitarity_residual)
    )
    manifest.wall_clock_s = time.perf_counter() - t0
    manifest.write(config["out"] + ".manifest.json")
    return manifest


def cmd_esd_convergence(config: dict) -> RunManifest:
    t0 = time.perf_counter()
    d = _d_value(config)
    if d.real < 0:
        raise ParameterError("requires Re(d) >= 0")
    beta = config["beta"]
    try:
        ladder = [int(x) for x in config["ladder"].split(",") if x.strip()]
    except ValueError as exc:
        raise ParameterError(f"cannot parse ladder {config['ladder']!r}") from exc
    if not ladder or any(n < 2 for n in ladder):
        raise ParameterError("ladder must list dimensions >= 2")
    reps = config["reps"]
    lp = analysis.limit_params(d)
    cdf = lambda t: analysis.mu_d_cdf(lp, t)  # noqa: E731

    rows = []
    medians = {}
    rng = sampling.SeededRng(config["seed"], config["stream"])
    for n in ladder:
        params = opuc.EnsembleParams(n, beta, 0.5 * beta * n * d)
        ks_esd_vals, ks_sp_vals, gap_vals = [], [], []
        for rep in range(reps):
            measure = models.sample_cj_spectrum(rng, params)
            esd = analysis.EmpiricalMeasure.esd(measure.thetas)
            spectral = analysis.EmpiricalMeasure.from_spectral(measure)
            ks_esd = analysis.ks_distance(esd, cdf)
            ks_sp = analysis.ks_distance(spectral, cdf)
            gap = analysis.weight_gap_stat(measure)
            rows.append((n, rep, ks_esd, ks_sp, gap))
            ks_esd_vals.append(ks_esd)
            ks_sp_vals.append(ks_sp)
            gap_vals.append(gap)
        medians[n] = {
            "ks_esd": statistics.median(ks_esd_vals),
            "ks_sp": statistics.median(ks_sp_vals),
            "weight_gap": statistics.median(gap_vals),
        }

    manifest = RunManifest("esd-convergence", config)
    cfg_hash = config_hash(config)
    write_rows(config["out"], ["n", "rep", "ks_esd", "ks_sp", "weight_gap"],
               rows, cfg_hash, config["format"])
    manifest.outputs.append(config["out"])
    ks_series = [medians[n]["ks_esd"] for n in ladder]
    gap_series = [medians[n]["weight_gap"] for n in ladder]
    manifest.summary = {
        "medians": {str(n): medians[n] for n in ladder},
        "ks_esd_monotone_decreasing": all(b < a for a, b in zip(ks_series, ks_series[1:])),
        "weight_gap_monotone_decreasing": all(b < a for a, b in zip(gap_series, gap_series[1:])),
    }
    manifest.wall_clock_s = time.perf_counter() - t0
    manifest.write(config["out"] + ".manifest.json")
    return manifest


def cmd_plot_data(config: dict) -> RunManifest:
    t0 = time.perf_counter()
    d = _d_value(config)
    lp = analysis.limit_params(d)
    grid = config["grid"]
    if grid < 8:
        raise ParameterError("grid must be >= 8")
    thetas = (np.arange(grid) + 0.5) * TWO_PI / grid
    dens = analysis.w_d(lp, thetas)
    pot = analysis.potential_q(d, thetas)
    cdf = analysis.mu_d_cdf(lp, thetas)
    rows = [
        (float(t), float(wv), float(qv), float(fv))
        for t, wv, qv, fv in zip(thetas, dens, pot, cdf)
    ]
    manifest = RunManifest("plot-data", config)
    cfg_hash = config_hash(config)
    write_rows(config["out"], ["theta", "w_d", "q_d", "cdf"], rows, cfg_hash, config["format"])
    manifest.outputs.append(config["out"])
    trapz = float(np.sum(dens) * (TWO_PI / grid) / TWO_PI)
    manifest.summary = {"density_integral": trapz}
    # square-root kinks at the support endpoints make the midpoint rule
    # O(h^{3/2}), so the bound follows the grid; 1e-4 at the default grid
    norm_tol = max(1e-4, 8.0 * (TWO_PI / grid) ** 1.5)
    manifest.checks.append(
        CheckResult("density-normalization", "deterministic",
                    abs(trapz - 1.0) <= norm_tol, abs(trapz - 1.0),
                    "midpoint integral of emitted density column")
    )
    if config["mft_n"] > 0:
        n, beta = config["mft_n"], config["mft_beta"]
        params = opuc.EnsembleParams(n, beta, 0.5 * beta * n * d)
        ts = np.linspace(0.0, 3.0, 25)
        mft_rows = []
        for t in ts:
            val = analysis.mellin_fourier(params, 0.0, t)
            mft_rows.append((float(t), float(val.real), float(val.imag)))
        mft_path = config["out"] + ".mft.csv"
        write_rows(mft_path, ["t", "mft_re", "mft_im"], mft_rows, cfg_hash, config["format"])
        manifest.outputs.append(mft_path)
    manifest.wall_clock_s = time.perf_counter() - t0
    manifest.write(config["out"] + ".manifest.json")
    return manifest


# ---------------------------------------------------------------------------
# verification suite


def _random_alphas(gen: np.random.Generator, n: int) -> opuc.VerblunskyCoeffs:
    radii = np.sqrt(gen.uniform(0.0, 0.95, n))
    phases = gen.uniform(0.0, TWO_PI, n)
    alphas = radii * np.exp(1j * phases)
    alphas[-1] = np.exp(1j * phases[-1])
    return opuc.VerblunskyCoeffs(alphas)


def _check_factorization(gen, *, inject_bug: bool = False) -> CheckResult:
    worst = 0.0
    for n in (2, 4, 8, 16, 32):
        for _ in range(8):
            coeffs = _random_alphas(gen, n)
            ggt = models.ggt_from_alpha(coeffs, _alpha_init=1.0 if inject_bug else -1.0)
            agr = models.agr_product(coeffs)
            refl = models.reflection_product(opuc.gamma_from_alpha(coeffs))
            worst = max(
                worst,
                float(np.max(np.abs(ggt.entries - agr.entries))),
                float(np.max(np.abs(ggt.entries - refl.entries))),
            )
    return CheckResult("factorization-three-models", "deterministic",
                       worst <= 1e-10, worst, "max entrywise spread across constructions")


def _check_char_poly(gen) -> CheckResult:
    worst = 0.0
    for n in (2, 4, 8, 16, 32):
        for _ in range(4):
            coeffs = _random_alphas(gen, n)
            gammas = opuc.gamma_from_alpha(coeffs)
            dec = models.eigen_unitary(models.ggt_from_alpha(coeffs))
            lhs = complex(np.prod(1.0 - dec.eigenvalues))
            rhs = opuc.char_poly_at_one(gammas)
            worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-30))
    return CheckResult("char-poly-product", "deterministic", worst <= 1e-8, worst)


def _check_cmv(gen) -> CheckResult:
    coeffs = _random_alphas(gen, 16)
    cmv = models.cmv_from_alpha(coeffs)
    band = np.abs(cmv.entries)
    mask = np.abs(np.subtract.outer(np.arange(16), np.arange(16))) > 2
    off_band = float(band[mask].max())
    lam_c = models.eigen_unitary(cmv).eigenvalues
    lam_h = models.eigen_unitary(models.ggt_from_alpha(coeffs)).eigenvalues
    spec_diff = float(np.max(np.min(np.abs(lam_c[:, None] - lam_h[None, :]), axis=1)))
    ok = off_band <= 1e-14 and spec_diff <= 1e-9
    return CheckResult("cmv-bandwidth-and-spectrum", "deterministic", ok,
                       max(off_band, spec_diff))


def _check_roundtrips(gen) -> CheckResult:
    worst = 0.0
    for n in (2, 5, 16, 64):
        for _ in range(10):
            coeffs = _random_alphas(gen, n)
            back = opuc.alpha_from_gamma(opuc.gamma_from_alpha(coeffs))
            worst = max(worst, float(np.max(np.abs(back.alphas - coeffs.alphas))))
    return CheckResult("coefficient-roundtrip", "deterministic", worst <= 1e-12, worst)


def _check_measure_roundtrip(gen) -> CheckResult:
    worst = 0.0
    for n in (2, 8, 16):
        coeffs = _random_alphas(gen, n)
        measure = models.spectral_measure(models.ggt_from_alpha(coeffs))
        back = opuc.verblunsky_from_measure(measure)
        worst = max(worst, float(np.max(np.abs(back.alphas - coeffs.alphas))))
    return CheckResult("measure-roundtrip", "deterministic", worst <= 1e-8, worst)


def _check_szego_pointwise(gen) -> CheckResult:
    coeffs = _random_alphas(gen, 12)
    chain = opuc.szego_polynomials(coeffs)
    zs = np.exp(1j * gen.uniform(0.0, TWO_PI, 50))
    worst = 0.0
    for j, a in enumerate(coeffs.alphas):
        lhs = chain[j + 1].eval_phi(zs)
        rhs = zs * chain[j].eval_phi(zs) - np.conj(a) * chain[j].eval_phi_star(zs)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return CheckResult("szego-pointwise", "deterministic", worst <= 1e-11, worst)


def _check_poly_factorization(gen) -> CheckResult:
    coeffs = _random_alphas(gen, 10)
    chain = opuc.szego_polynomials(coeffs)
    worst = 0.0
    for _ in range(50):
        z = gen.uniform(0, 0.9) * np.exp(1j * gen.uniform(0, TWO_PI))
        gvals = opuc.gamma_functions_at(coeffs, z)
        for k in range(1, coeffs.n + 1):
            lhs = complex(np.prod(z - gvals[:k]))
            rhs = complex(chain[k].eval_phi(z))
            worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-30))
    return CheckResult("coefficient-function-factorization", "deterministic",
                       worst <= 1e-10, worst)


def _check_disk_integral() -> CheckResult:
    worst = 0.0
    for ell, s, t in ((1.0, 1.0, 1.0), (2.5, 1 + 1j, 1 - 1j), (0.5, 0.5, 0.5)):
        quad = gof.disk_integral_quad(ell, s, t)
        closed = gof.disk_integral_closed(ell, s, t)
        worst = max(worst, abs(quad - closed) / abs(closed))
    return CheckResult("disk-integral-identity", "deterministic", worst <= 1e-6, worst)


def _check_partition_quadrature() -> CheckResult:
    worst = 0.0
    for n, beta, s, t in ((1, 2.0, 1.0, 1.0), (2, 2.0, 1.0, 1.0)):
        quad = gof.partition_quad(n, beta, s, t)
        closed = analysis.partition_zst(n, beta, s, t)
        worst = max(worst, abs(quad - closed) / abs(closed))
    return CheckResult("partition-quadrature", "deterministic", worst <= 1e-5, worst)


def _check_mft_factorization() -> CheckResult:
    params = opuc.EnsembleParams(6, 3.0, 0.7 + 0.4j)
    worst = 0.0
    for s, t in ((0.0, 1.0), (1.0, 2.0), (-0.5, 1.5)):
        whole = analysis.mellin_fourier(params, s, t)
        parts = 1.0 + 0.0j
        u, v = 0.5 * (t + s), 0.5 * (t - s)
        for k in range(params.n):
            parts *= gof.tilted_disk_power_moment(
                params.beta_half * (params.n - k - 1), params.delta, u, v
            )
        worst = max(worst, abs(whole - parts) / abs(whole))
    return CheckResult("mft-factorization", "deterministic", worst <= 1e-10, worst)


def _check_b_const() -> CheckResult:
    diff = abs(analysis.b_const(1.0) - analysis.b_const_finite_n(1.0, 400))
    return CheckResult("b-const-two-route", "deterministic", diff <= 0.02, diff)


def _check_rate_minimizer() -> CheckResult:
    lp = analysis.limit_params(1.0)
    rate = analysis.rate_function(1.0, analysis.mu_d_grid(lp)).rate
    return CheckResult("rate-at-minimizer", "deterministic", abs(rate) <= 1e-3, rate)


def _check_limit_params() -> CheckResult:
    lp = analysis.limit_params(1.0)
    ok = (
        abs(lp.alpha_d + 0.5) <= 1e-12
        and abs(lp.theta_d - np.pi / 3.0) <= 1e-12
        and abs(lp.xi_d) <= 1e-12
    )
    return CheckResult("limit-params-example", "deterministic", ok)


def _stat_checks(seed: int, scale: float) -> list[CheckResult]:
    out = []
    size = lambda base: max(int(base * scale), 2000)  # noqa: E731
    alpha_level = 1e-3

    rng = sampling.SeededRng(seed, 101)
    draws = sampling.sample_nu_s(rng, 3.0, size=size(20000))
    _, p = gof.ks_pvalue(np.abs(draws) ** 2, lambda x: np.clip(x, 0, 1))
    out.append(CheckResult("nu-s-radial-uniformity", "statistical", p >= alpha_level, p))

    rng = sampling.SeededRng(seed, 102)
    spec = sampling.DiskDensitySpec(1.5, 1.0 + 0.5j)
    z = sampling.sample_gamma_k(rng, spec, size=size(30000))
    _, p, _ = gof.disk_coefficient_chi2(z, spec)
    out.append(CheckResult("disk-coefficient-chi2", "statistical", p >= alpha_level, p))

    rng = sampling.SeededRng(seed, 103)
    zz = sampling.sample_lambda_delta(rng, 1.0 + 1.0j, size=size(30000))
    _, p, _ = gof.circle_angle_chi2(np.angle(zz), 1.0 + 1.0j)
    out.append(CheckResult("circle-tilt-chi2", "statistical", p >= alpha_level, p))

    rng = sampling.SeededRng(seed, 104)
    nsamp = size(50000)
    z = sampling.sample_gamma_k(rng, sampling.DiskDensitySpec(1.0, 1.0), size=nsamp)
    se = np.std(z.real) / np.sqrt(nsamp)
    dev = abs(z.real.mean() + 1.0 / 3.0)
    out.append(CheckResult("coefficient-mean-closed-form", "statistical",
                           dev <= 3 * se, dev / se, "|mean - (-1/3)| in standard errors"))

    rng = sampling.SeededRng(seed, 105)
    params = opuc.EnsembleParams(4, 2.0, 1.0)
    reps = size(20000)
    weights = np.empty((reps, 4))
    cos_sum = np.empty(reps)
    for i in range(reps):
        m = models.sample_cj_spectrum(rng, params)
        weights[i] = m.weights
        cos_sum[i] = np.cos(m.thetas).sum()
    mean_dev = abs(weights.mean() - 0.25) / (weights.mean(axis=1).std() / np.sqrt(reps) + 1e-300)
    bh = params.beta_half
    second_exact = (bh + 1.0) / (4.0 * (4.0 * bh + 1.0))
    second = weights[:, 0] ** 2
    dev2 = abs(second.mean() - second_exact) / (second.std() / np.sqrt(reps))
    corr = np.corrcoef(weights[:, 0], cos_sum)[0, 1]
    corr_dev = abs(corr) * np.sqrt(reps)
    ok = mean_dev <= 3 and dev2 <= 3 and corr_dev <= 3
    out.append(CheckResult("weights-dirichlet-and-independence", "statistical", ok,
                           float(max(mean_dev, dev2, corr_dev)),
                           "worst deviation in standard errors"))

    rng = sampling.SeededRng(seed, 106)
    lp = analysis.limit_params(1.0)
    cdf = lambda t: analysis.mu_d_cdf(lp, t)  # noqa: E731
    ks_vals = []
    for _ in range(8):
        params = opuc.EnsembleParams(50, 2.0, 50.0)
        m = models.sample_cj_spectrum(rng, params)
        ks_vals.append(analysis.ks_distance(analysis.EmpiricalMeasure.esd(m.thetas), cdf))
    med = statistics.median(ks_vals)
    out.append(CheckResult("esd-ks-smoke", "statistical", med <= 0.25, med,
                           "median KS to the limit at n=50"))
    return out


def run_verify_checks(seed: int, scale: float = 1.0, inject_bug: bool = False) -> list[CheckResult]:
    gen = np.random.default_rng(seed)
    checks = [
        _check_factorization(gen, inject_bug=inject_bug),
        _check_char_poly(gen),
        _check_cmv(gen),
        _check_roundtrips(gen),
        _check_measure_roundtrip(gen),
        _check_szego_pointwise(gen),
        _check_poly_factorization(gen),
        _check_disk_integral(),
        _check_partition_quadrature(),
        _check_mft_factorization(),
        _check_b_const(),
        _check_rate_minimizer(),
        _check_limit_params(),
    ]
    checks.extend(_stat_checks(seed, scale))
    return checks


def cmd_verify(config: dict) -> RunManifest:
    t0 = time.perf_counter()
    checks = run_verify_checks(config["seed"], config["scale"], config["inject_bug"])
    manifest = RunManifest("verify", config)
    manifest.checks = checks
    manifest.summary = {
        "total": len(checks),
        "failed": [c.check_id for c in checks if not c.passed],
    }
    manifest.wall_clock_s = time.perf_counter() - t0
    manifest.write(config["out"])
    return manifest


COMMANDS = {
    "sample": cmd_sample,
    "dump-matrix": cmd_dump_matrix,
    "verify": cmd_verify,
    "esd-convergence": cmd_esd_convergence,
    "plot-data": cmd_plot_data,
}
