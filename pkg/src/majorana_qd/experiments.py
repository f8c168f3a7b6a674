"""Initial-state presets, figure presets, INI configs and CSV scenario runs."""

from __future__ import annotations

import configparser
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .bath import BathParams
from .fock import DIM, ModelParams, Species, build_hamiltonian, diagonalize, ket
from .propagator import BREACH_TOL, POSITIVITY_ABORT, DensityMatrix, InvariantBreach, evolve
from .resources import occupations, pair_resources

PRESETS = ("one", "plus", "w", "phi", "vacuum")
FIGURES = tuple(f"fig{i}" for i in range(3, 15))
OUTPUT_GROUPS = ("occupations", "concurrence", "l1", "diagnostics")

COLUMNS = (
    "t",
    "n1",
    "n2",
    "nd",
    "conc_12",
    "conc_1d",
    "conc_2d",
    "l1_12",
    "l1_1d",
    "l1_2d",
    "trace_err",
    "herm_err",
    "min_eig",
)
_GROUP_COLUMNS = {
    "occupations": COLUMNS[1:4],
    "concurrence": COLUMNS[4:7],
    "l1": COLUMNS[7:10],
    "diagnostics": COLUMNS[10:13],
}
NUMBER_FORMAT = "%.12g"

# caption parameters shared by every figure
FIGURE_GAMMA = 0.05
FIGURE_S = 1.0
FIGURE_EPS_D = 0.5
FIGURE_EPS = 0.5
FIGURE_EPS_NONLOCAL = 0.0005
FIGURE_LAMBDA = (0.1, 0.2)
FIGURE_HORIZON = 60.0


def preset_initial_state(name: str) -> DensityMatrix:
    """Pure-state projector for one of the named initial states."""
    if name == "one":
        psi = ket(0, 0, 1)
    elif name == "plus":
        psi = (ket(1, 0, 0) + ket(0, 1, 0)) / math.sqrt(2)
    elif name == "w":
        psi = (ket(0, 0, 1) + ket(1, 0, 0) + ket(0, 1, 0)) / math.sqrt(3)
    elif name == "phi":
        # f1^dag f2^dag |0> is the canonical ket |1,1,0>
        psi = (ket(0, 0, 0) + ket(1, 1, 0)) / math.sqrt(2)
    elif name == "vacuum":
        psi = ket(0, 0, 0)
    else:
        raise ValueError(f"unknown initial state {name!r}; valid presets: {', '.join(PRESETS)}")
    return DensityMatrix.pure(psi)


def default_step(omega_c: float) -> float:
    return min(0.01, 0.25 / omega_c)


def default_sample_every(step: float) -> int:
    return max(1, int(round(0.05 / step)))


@dataclass(frozen=True)
class RunSpec:
    """One (species, temperature, cutoff) member of a scenario."""

    tag: str
    model: ModelParams
    bath: BathParams
    step: float
    sample_every: int


def run_tag(species: Species, beta: float, omega_c: float) -> str:
    temp = "T0" if math.isinf(beta) else f"beta{beta:g}"
    return f"{Species(species).value}_{temp}_wc{omega_c:g}"


@dataclass(frozen=True)
class ScenarioConfig:
    """A batch of runs sharing one model template and one initial state.

    ``species``, ``betas`` and ``omega_cs`` sweep the corresponding fields of
    ``model`` and ``bath``; an empty tuple means the template value alone,
    and the templates are normalised to the first member of each sweep.
    ``initial_state`` is a preset name or an explicit 8x8 matrix stored as a
    tuple of tuples.  ``step``/``sample_every`` of ``None`` pick defaults per
    cutoff.
    """

    model: ModelParams
    bath: BathParams
    initial_state: str | tuple = "one"
    horizon: float = FIGURE_HORIZON
    step: float | None = None
    sample_every: int | None = None
    outputs: tuple = OUTPUT_GROUPS
    species: tuple = ()
    betas: tuple = ()
    omega_cs: tuple = ()
    memory_panels: int = 1
    name: str = "scenario"

    def __post_init__(self):
        if isinstance(self.initial_state, np.ndarray):
            object.__setattr__(self, "initial_state", _freeze(self.initial_state))
        species = tuple(Species(s) for s in self.species) or (self.model.species,)
        betas = tuple(float(b) for b in self.betas) or (self.bath.beta,)
        omega_cs = tuple(float(w) for w in self.omega_cs) or (self.bath.omega_c,)
        object.__setattr__(self, "species", species)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "omega_cs", omega_cs)
        # the templates always describe the first member of each sweep
        if self.model.species is not species[0]:
            object.__setattr__(self, "model", self.model.with_species(species[0]))
        object.__setattr__(self, "bath", replace(self.bath, omega_c=omega_cs[0], beta=betas[0]))
        unknown = set(self.outputs) - set(OUTPUT_GROUPS)
        if unknown:
            raise ValueError(f"unknown output groups {sorted(unknown)}; valid: {', '.join(OUTPUT_GROUPS)}")
        object.__setattr__(self, "outputs", tuple(g for g in OUTPUT_GROUPS if g in set(self.outputs)))
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if self.step is not None and not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if self.sample_every is not None and self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")
        # resolves presets and validates explicit matrices
        self.initial_density()
        for w in omega_cs:
            replace(self.bath, omega_c=w)
        for beta in betas:
            replace(self.bath, beta=beta)

    def initial_density(self) -> DensityMatrix:
        if isinstance(self.initial_state, str):
            return preset_initial_state(self.initial_state)
        rho = DensityMatrix(np.array(self.initial_state, dtype=complex))
        rho.validate()
        return rho

    def columns(self) -> tuple:
        cols = ["t"]
        for group in self.outputs:
            cols.extend(_GROUP_COLUMNS[group])
        return tuple(c for c in COLUMNS if c in cols)

    def runs(self) -> list:
        out = []
        for sp in self.species:
            model = self.model if sp == self.model.species else self.model.with_species(sp)
            for w in self.omega_cs:
                for beta in self.betas:
                    bath = replace(self.bath, omega_c=w, beta=beta)
                    step = self.step if self.step is not None else default_step(w)
                    every = self.sample_every if self.sample_every is not None else default_sample_every(step)
                    out.append(RunSpec(run_tag(sp, beta, w), model, bath, step, every))
        return out


def _freeze(a) -> tuple:
    a = np.asarray(a, dtype=complex)
    if a.shape != (DIM, DIM):
        raise ValueError(f"explicit initial state must be {DIM}x{DIM}, got {a.shape}")
    return tuple(tuple(complex(x) for x in row) for row in a)


def figure_preset(fig: str) -> ScenarioConfig:
    """All caption variants of one figure as a single scenario."""
    if fig not in FIGURES:
        raise ValueError(f"unknown figure {fig!r}; valid figures: {', '.join(FIGURES)}")
    n = int(fig[3:])
    both_species = (Species.MAJORANA, Species.REGULAR)
    resources = ("concurrence", "l1", "diagnostics")
    occ = ("occupations", "diagnostics")
    if n in (3, 4):
        kw = dict(
            initial_state="one",
            outputs=occ,
            species=both_species,
            betas=(math.inf,) if n == 3 else (1.0,),
            omega_cs=(10.0, 50.0),
        )
        eps = FIGURE_EPS
    elif n <= 12:
        state = {5: "one", 7: "plus", 9: "w", 11: "phi"}[n - (n + 1) % 2]
        kw = dict(
            initial_state=state,
            outputs=resources,
            species=both_species,
            betas=(math.inf, 1.0),
            omega_cs=(10.0,) if n % 2 else (50.0,),
        )
        eps = FIGURE_EPS
    else:
        kw = dict(
            initial_state="one",
            outputs=occ if n == 13 else resources,
            species=(Species.MAJORANA,),
            betas=(math.inf, 1.0),
            omega_cs=(10.0, 50.0),
        )
        eps = FIGURE_EPS_NONLOCAL
    model = ModelParams.majorana(FIGURE_EPS_D, eps, *FIGURE_LAMBDA)
    bath = BathParams(FIGURE_GAMMA, FIGURE_S, kw["omega_cs"][0], kw["betas"][0])
    return ScenarioConfig(model=model, bath=bath, horizon=FIGURE_HORIZON, name=fig, **kw)


# -- INI round trip -----------------------------------------------------------


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else repr(float(x))


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.replace("\n", " ").split(",") if v.strip())


def config_to_ini(cfg: ScenarioConfig) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    m, b = cfg.model, cfg.bath
    cp["model"] = {
        "species": ", ".join(s.value for s in cfg.species),
        "eps_d": _fmt(m.eps_d),
        "eps1": _fmt(m.eps1),
        "eps2": _fmt(m.eps2),
        "lambda1": _fmt(m.lambda1),
        "lambda2": _fmt(m.lambda2),
    }
    if m.species is Species.CUSTOM:
        cp["model"]["lambda_t1"] = _fmt(m.lambda_t1)
        cp["model"]["lambda_t2"] = _fmt(m.lambda_t2)
    cp["bath"] = {
        "gamma": _fmt(b.gamma),
        "s": _fmt(b.s),
        "omega_c": ", ".join(_fmt(w) for w in cfg.omega_cs),
        "beta": ", ".join(_fmt(x) for x in cfg.betas),
    }
    run = {
        "name": cfg.name,
        "horizon": _fmt(cfg.horizon),
        "step": "auto" if cfg.step is None else _fmt(cfg.step),
        "sample_every": "auto" if cfg.sample_every is None else str(cfg.sample_every),
        "memory_panels": str(cfg.memory_panels),
        "outputs": ", ".join(cfg.outputs),
    }
    if isinstance(cfg.initial_state, str):
        run["initial_state"] = cfg.initial_state
    else:
        a = np.array(cfg.initial_state, dtype=complex)
        run["initial_state"] = "explicit"
        run["rho_real"] = ", ".join(_fmt(x) for x in a.real.ravel())
        run["rho_imag"] = ", ".join(_fmt(x) for x in a.imag.ravel())
    cp["run"] = run
    return cp


def config_to_text(cfg: ScenarioConfig) -> str:
    buf = io.StringIO()
    config_to_ini(cfg).write(buf)
    return buf.getvalue()


def parse_config(text: str) -> ScenarioConfig:
    """Parse the INI form (sections ``[model]``, ``[bath]``, ``[run]``)."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.read_string(text)
    for section in ("model", "bath", "run"):
        if not cp.has_section(section):
            raise ValueError(f"config is missing section [{section}]")
    ms, bs, rs = cp["model"], cp["bath"], cp["run"]

    def need(section, key):
        if key not in section:
            raise ValueError(f"config is missing key {key!r} in [{section.name}]")
        return float(section[key])

    try:
        species = tuple(Species(s.strip().lower()) for s in ms.get("species", "custom").split(","))
        lt = {}
        for key in ("lambda_t1", "lambda_t2"):
            if key in ms:
                lt[key] = ms.getfloat(key)
        model = ModelParams(
            need(ms, "eps_d"),
            need(ms, "eps1"),
            need(ms, "eps2"),
            need(ms, "lambda1"),
            need(ms, "lambda2"),
            species=species[0],
            **lt,
        )
        omega_cs = _floats(bs["omega_c"])
        betas = _floats(bs.get("beta", "inf"))
        bath = BathParams(need(bs, "gamma"), bs.getfloat("s", 1.0), omega_cs[0], betas[0])
        state = rs.get("initial_state", "one").strip()
        if state == "explicit":
            re = np.array(_floats(rs["rho_real"]))
            im = np.array(_floats(rs.get("rho_imag", "0")))
            if im.size == 1:
                im = np.full(DIM * DIM, im[0])
            if re.size != DIM * DIM or im.size != DIM * DIM:
                raise ValueError(f"explicit state needs {DIM * DIM} entries in rho_real/rho_imag")
            state = _freeze((re + 1j * im).reshape(DIM, DIM))
        step = rs.get("step", "auto").strip()
        every = rs.get("sample_every", "auto").strip()
        outputs = tuple(g.strip() for g in rs.get("outputs", ", ".join(OUTPUT_GROUPS)).split(","))
        return ScenarioConfig(
            model=model,
            bath=bath,
            initial_state=state,
            horizon=rs.getfloat("horizon", FIGURE_HORIZON),
            step=None if step == "auto" else float(step),
            sample_every=None if every == "auto" else int(every),
            outputs=outputs,
            species=species,
            betas=betas,
            omega_cs=omega_cs,
            memory_panels=rs.getint("memory_panels", 1),
            name=rs.get("name", "scenario"),
        )
    except KeyError as exc:
        raise ValueError(f"config is missing key {exc.args[0]!r}") from None


def load_config(path) -> ScenarioConfig:
    return parse_config(Path(path).read_text())


# -- execution ----------------------------------------------------------------


@dataclass
class RunResult:
    tag: str
    path: Path
    rows: int
    aborted: str | None = None


@dataclass
class ScenarioResult:
    runs: list = field(default_factory=list)
    manifest: Path | None = None

    @property
    def files(self) -> list:
        return [r.path for r in self.runs]

    @property
    def aborted(self) -> list:
        return [r for r in self.runs if r.aborted]

    @property
    def status(self) -> int:
        return 2 if self.aborted else 0


def trajectory_rows(traj, columns=COLUMNS):
    """One tuple per sample in ``columns`` order."""
    need_res = any(c.startswith(("conc", "l1")) for c in columns)
    for i, t in enumerate(traj.times):
        rho = traj.states[i]
        values = {"t": t}
        values.update(zip(("n1", "n2", "nd"), occupations(rho)))
        if need_res:
            for pair, (c, l1) in pair_resources(rho).items():
                values[f"conc_{pair}"] = c
                values[f"l1_{pair}"] = l1
        values["trace_err"] = traj.trace_error[i]
        values["herm_err"] = traj.hermiticity_error[i]
        values["min_eig"] = traj.min_eigenvalue[i]
        yield tuple(float(values[c]) for c in columns)


def _write_csv(path: Path, columns, rows) -> int:
    n = 0
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(NUMBER_FORMAT % v for v in row) + "\n")
            n += 1
    return n


def _execute(args) -> RunResult:
    spec, rho0, spectrum, cfg, out_dir = args
    path = Path(out_dir) / f"{spec.tag}.csv"
    columns = cfg.columns()
    aborted = None
    try:
        traj = evolve(
            rho0,
            spec.model,
            spec.bath,
            cfg.horizon,
            spec.step,
            sample_every=spec.sample_every,
            spectrum=spectrum,
            memory_panels=cfg.memory_panels,
        )
    except InvariantBreach as exc:
        traj, aborted = exc.trajectory, str(exc)
    rows = []
    try:
        for row in trajectory_rows(traj, columns):
            rows.append(row)
    except (ValueError, ArithmeticError) as exc:
        # keep the rows computed so far; the breach reason takes precedence
        aborted = aborted or f"resource evaluation failed: {exc}"
    return RunResult(spec.tag, path, _write_csv(path, columns, rows), aborted)


def run_scenario(cfg: ScenarioConfig, out_dir, workers: int = 1) -> ScenarioResult:
    """Evolve every run of ``cfg`` and write ``<tag>.csv`` files plus ``manifest.ini``.

    ``workers > 1`` runs members in separate processes; outputs are
    identical to the serial path.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rho0 = cfg.initial_density()
    spectra = {}
    jobs = []
    for spec in cfg.runs():
        key = spec.model
        if key not in spectra:
            spectra[key] = diagonalize(build_hamiltonian(spec.model))
        jobs.append((spec, rho0, spectra[key], cfg, out))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            results = list(pool.map(_execute, jobs))
    else:
        results = [_execute(j) for j in jobs]
    result = ScenarioResult(results)
    result.manifest = _write_manifest(out, cfg, result)
    return result


def _write_manifest(out: Path, cfg: ScenarioConfig, result: ScenarioResult) -> Path:
    cp = config_to_ini(cfg)
    cp["tolerances"] = {
        "breach_tol": _fmt(BREACH_TOL),
        "positivity_abort": _fmt(POSITIVITY_ABORT),
        "number_format": NUMBER_FORMAT,
    }
    for spec, res in zip(cfg.runs(), result.runs):
        cp[f"output {res.tag}"] = {
            "file": res.path.name,
            "rows": str(res.rows),
            "step": _fmt(spec.step),
            "sample_every": str(spec.sample_every),
            "status": "aborted" if res.aborted else "ok",
            **({"reason": res.aborted} if res.aborted else {}),
        }
    path = out / "manifest.ini"
    with open(path, "w") as fh:
        cp.write(fh)
    return path
