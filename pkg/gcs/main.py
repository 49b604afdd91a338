"""
命令行入口：gcs <command> [--config FILE] [覆盖参数...]

每个子命令把 RunConfig 分派到 physics 层，结果写为 CSV（17 位有效数字）或 JSON。
退出码：0 成功，1 配置/参数/物理构造错误，2 检查失败，3 导出/IO 错误。
"""

from __future__ import annotations

import argparse
import cmath
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from gcs.config import RunConfig, RunConfigPatch, get_settings
from gcs.exceptions import (
    AppError,
    CheckFailedError,
    ConfigError,
    ConfigValidationError,
    DegenerateEtaError,
    ExportError,
    PhysicsError,
)
from gcs.models.schemas import FidelityDocument, GridDocument
from gcs.physics import coherent, dynamics, fields, observables, spinors
from gcs.physics.types import CoherentSeries, MagneticProfile, UnitSystem
from gcs.services.checks import CheckContext, raise_on_failure, run_checks
from gcs.services.config_service import build_ladder, run_config_service
from gcs.utils.file_utils import resolve_output_path, write_csv, write_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CHECK = 2
EXIT_IO = 3

# 命令行参数名 → RunConfigPatch 字段
_OVERRIDES: tuple[tuple[str, type, str], ...] = (
    ("--omega", float, "ω（自然单位）"),
    ("--k", float, "波数 k"),
    ("--r", float, "|α|"),
    ("--theta", float, "arg α"),
    ("--r-max", float, "r 扫描上限"),
    ("--r-points", int, "r 扫描点数"),
    ("--theta-max", float, "θ 扫描上限"),
    ("--theta-points", int, "θ 扫描点数"),
    ("--f-table", str, "两列 f(n) 表文件"),
    ("--extremal", int, "GP 极值态指标"),
    ("--tol", float, "截断容差"),
    ("--x-min", float, "网格左端"),
    ("--x-max", float, "网格右端"),
    ("--points", int, "网格点数"),
    ("--t-max", float, "保真度采样上限"),
    ("--samples", int, "保真度采样点数"),
    ("--threshold", float, "准周期阈值"),
    ("--linear-n", int, "线性化截断 N"),
    ("--n-max", int, "能谱最高能级"),
    ("--eps1", float, "双层分解能 ε₁"),
    ("--eps2", float, "双层分解能 ε₂（缺省 ω）"),
    ("--output", str, "输出文件"),
)


class _Parser(argparse.ArgumentParser):
    """参数错误以退出码 1 结束。"""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON 运行配置")
    common.add_argument("--kind", choices=["monolayer", "bilayer"])
    common.add_argument("--branch", type=int, choices=[1, -1])
    common.add_argument("--definition", choices=["BG", "GP", "MU"])
    common.add_argument("--format", choices=["csv", "json"])
    # 子命令后也可给全局开关；SUPPRESS 保证不覆盖子命令前给出的值
    common.add_argument("--log-level", default=argparse.SUPPRESS, help="覆盖 LOG_LEVEL")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="覆盖 GCS_THREADS")
    for flag, kind, text in _OVERRIDES:
        common.add_argument(flag, type=kind, help=text)

    parser = _Parser(prog="gcs", description="单层/双层石墨烯广义相干态的数值计算")
    parser.add_argument("--log-level", default=None, help="覆盖 LOG_LEVEL")
    parser.add_argument("--threads", type=int, default=None, help="覆盖 GCS_THREADS")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (
        ("spectrum", "能级 E_n"),
        ("density", "概率密度 ρ(x)"),
        ("current", "电流密度 Jx, Jy"),
        ("energy", "平均能量"),
        ("uncertainty", "ΔzΔp_z"),
        ("fidelity", "保真度轨迹与准周期"),
        ("potentials", "SUSY 场量与伙伴势"),
        ("coefficients", "相干态系数"),
        ("check", "不变量检查套件"),
    ):
        commands.add_parser(name, parents=[common], help=text)
    return parser


def _patch_from(args: argparse.Namespace) -> RunConfigPatch:
    names = ["kind", "branch", "definition", "format"] + [flag[2:].replace("-", "_") for flag, _, _ in _OVERRIDES]
    values = {name: getattr(args, name) for name in names if getattr(args, name) is not None}
    try:
        return RunConfigPatch(**values)
    except ValidationError as e:
        first = e.errors()[0]
        dotted = ".".join(str(part) for part in first["loc"])
        raise ConfigValidationError(
            message=f"命令行参数 {dotted} 校验失败: {first['msg']}",
            field=dotted,
            reason=first["msg"],
        ) from e


def _units(config: RunConfig) -> UnitSystem:
    return UnitSystem(omega=config.omega, k=config.k, branch=config.branch)


def _alpha_grid(config: RunConfig) -> list[tuple[float, float]]:
    """(r, θ) 扫描网格，r 外层。"""
    spec = config.alpha
    r_max = spec.r if spec.r_max is None else spec.r_max
    theta_max = spec.theta if spec.theta_max is None else spec.theta_max
    radii = np.linspace(spec.r, r_max, spec.r_points) if spec.r_points > 1 else [spec.r]
    phases = np.linspace(spec.theta, theta_max, spec.theta_points) if spec.theta_points > 1 else [spec.theta]
    return [(float(r), float(theta)) for r in radii for theta in phases]


def _is_sweep(config: RunConfig) -> bool:
    return config.alpha.r_points > 1 or config.alpha.theta_points > 1


def _series(config: RunConfig, r: float, theta: float) -> CoherentSeries:
    spec = build_ladder(config.f_spec)
    return coherent.build_series(
        config.definition,
        spec,
        config.kind,
        cmath.rect(r, theta),
        config.tol,
        extremal=config.f_spec.extremal,
        radius=r,
    )


def _grid(config: RunConfig, units: UnitSystem, r: float) -> np.ndarray:
    if config.grid.x_min is not None and config.grid.x_max is not None:
        return np.linspace(config.grid.x_min, config.grid.x_max, config.grid.points)
    window = observables.default_grid(units, r)
    return np.linspace(window[0], window[-1], config.grid.points)


def _write_table(config: RunConfig, header: list[str], rows: np.ndarray, quantity: str) -> Path:
    """csv 直接写表；json 时最后一列为 values、倒数第二列为 xs。"""
    path = resolve_output_path(config.output)
    if config.format == "json":
        document = GridDocument(
            quantity=quantity,
            xs=[float(v) for v in rows[:, -2]],
            values=[float(v) for v in rows[:, -1]],
            meta={"kind": config.kind, "columns": ",".join(header)},
        )
        return write_json(path, document)
    return write_csv(path, header, rows)


def _profile_frames(
    config: RunConfig,
    evaluate: Callable[[CoherentSeries, np.ndarray, UnitSystem], list[np.ndarray]],
) -> tuple[list[str], np.ndarray]:
    """对每个 (r, θ[, t]) 帧求 x 网格上的若干列，拼成长表。"""
    units = _units(config)
    keys: list[str] = []
    if _is_sweep(config):
        keys += ["r", "theta"]
    if config.time.times:
        keys.append("t")
    blocks = []
    for r, theta in _alpha_grid(config):
        series = _series(config, r, theta)
        xs = _grid(config, units, r)
        for t in config.time.times or [None]:
            state = dynamics.evolve(series, t) if t is not None else series
            columns = evaluate(state, xs, units)
            prefix = []
            if _is_sweep(config):
                prefix += [np.full_like(xs, r), np.full_like(xs, theta)]
            if t is not None:
                prefix.append(np.full_like(xs, t))
            blocks.append(np.column_stack([*prefix, xs, *columns]))
    return keys, np.vstack(blocks)


def cmd_spectrum(config: RunConfig, threads: int) -> Path:
    units = _units(config)
    n = np.arange(config.n_max + 1)
    energies = spinors.energy_levels(config.kind, config.n_max, units)
    return _write_table(config, ["n", "energy"], np.column_stack([n, energies]), "energy")


def cmd_density(config: RunConfig, threads: int) -> Path:
    def evaluate(series: CoherentSeries, xs: np.ndarray, units: UnitSystem) -> list[np.ndarray]:
        return [observables.probability_density(series, xs, units, threads).values]

    keys, rows = _profile_frames(config, evaluate)
    return _write_table(config, [*keys, "x", "value"], rows, "rho")


def cmd_current(config: RunConfig, threads: int) -> Path:
    def evaluate(series: CoherentSeries, xs: np.ndarray, units: UnitSystem) -> list[np.ndarray]:
        jx, jy = observables.current_density(series, xs, units, threads)
        return [jx.values, jy.values]

    keys, rows = _profile_frames(config, evaluate)
    if config.format == "json":
        # GridDocument 只承载一列数值：JSON 输出 Jx，Jy 另存 *_jy.json
        path = resolve_output_path(config.output)
        jy_config = config.model_copy(update={"output": str(path.with_name(path.stem + "_jy" + path.suffix))})
        _write_table(jy_config, [*keys, "x", "jy"], np.delete(rows, -2, axis=1), "jy")
        return _write_table(config, [*keys, "x", "jx"], rows[:, :-1], "jx")
    return _write_table(config, [*keys, "x", "jx", "jy"], rows, "current")


def cmd_energy(config: RunConfig, threads: int) -> Path:
    units = _units(config)
    rows = [(r, theta, observables.mean_energy(_series(config, r, theta), units)) for r, theta in _alpha_grid(config)]
    return _write_table(config, ["r", "theta", "mean_energy"], np.array(rows), "mean_energy")


def cmd_uncertainty(config: RunConfig, threads: int) -> Path:
    rows = []
    for r, theta in _alpha_grid(config):
        moments = observables.zp_moments(_series(config, r, theta))
        rows.append((r, theta, moments.delta_z, moments.delta_p, moments.delta_z * moments.delta_p))
    header = ["r", "theta", "delta_z", "delta_p", "product"]
    return _write_table(config, header, np.array(rows), "uncertainty")


def cmd_fidelity(config: RunConfig, threads: int) -> Path:
    """F(t) 轨迹；csv 时准周期另存为 *.quasiperiods.json，双层附带线性化分解表。"""
    path = resolve_output_path(config.output)
    sweep = config.alpha.r_points > 1
    radii = sorted({r for r, _ in _alpha_grid(config)})
    blocks = []
    quasiperiods: list[float] = []
    linear_rows = []
    for r in radii:
        series = _series(config, r, config.alpha.theta)
        trace = dynamics.quasiperiod_scan(
            series, config.time.t_max, config.time.samples, config.time.threshold, threads
        )
        quasiperiods += trace.quasiperiods
        prefix = [np.full_like(trace.ts, r)] if sweep else []
        blocks.append(np.column_stack([*prefix, trace.ts, trace.values]))
        if config.kind == "bilayer":
            for t in trace.ts:
                report = dynamics.linearization_report(series, float(t), config.time.linear_n)
                linear_rows.append(
                    (r, t, report.envelope, report.residual_norm, report.residual_fidelity, report.cross_term)
                )

    rows = np.vstack(blocks)
    if config.format == "json":
        document = FidelityDocument(
            ts=[float(t) for t in rows[:, -2]],
            values=[float(v) for v in rows[:, -1]],
            quasiperiods=quasiperiods,
        )
        return write_json(path, document)

    header = (["r"] if sweep else []) + ["t", "fidelity"]
    write_csv(path, header, rows)
    write_json(
        path.with_name(path.stem + ".quasiperiods.json"),
        FidelityDocument(ts=[], values=[], quasiperiods=quasiperiods),
    )
    if linear_rows:
        write_csv(
            path.with_name(path.stem + ".linearization.csv"),
            ["r", "t", "envelope", "residual_norm", "residual_fidelity", "cross_term"],
            np.array(linear_rows),
        )
    return path


def cmd_potentials(config: RunConfig, threads: int) -> Path:
    """W、V±（单层）或 η、β、γ、V±（双层）；η≈0 的格点写 nan。"""
    units = _units(config)
    profile = fields.constant_profile(config.omega)
    xs = _grid(config, units, config.alpha.r)
    if config.kind == "monolayer":
        mono = fields.monolayer_fields(profile, xs, config.k)
        rows = np.column_stack([xs, mono.w, mono.v_minus, mono.v_plus])
        return _write_table(config, ["x", "w", "v_minus", "v_plus"], rows, "potentials")

    eps2 = config.omega if config.eps2 is None else config.eps2
    columns = np.full((len(xs), 5), np.nan)
    try:
        columns[:] = _bilayer_columns(profile, xs, config, eps2)
    except DegenerateEtaError as e:
        logger.warning("degenerate eta on grid: x=%.17g; masking singular points", e.x)
        for i, x in enumerate(xs):
            try:
                columns[i] = _bilayer_columns(profile, np.array([x]), config, eps2)[0]
            except DegenerateEtaError:
                continue
    rows = np.column_stack([xs, columns])
    return _write_table(config, ["x", "eta", "beta", "gamma", "v_minus", "v_plus"], rows, "potentials")


def _bilayer_columns(profile: MagneticProfile, xs: np.ndarray, config: RunConfig, eps2: float) -> np.ndarray:
    bi = fields.bilayer_fields(profile, xs, config.k, config.eps1, eps2)
    return np.column_stack([bi.eta, bi.beta, bi.gamma, bi.v_minus, bi.v_plus])


def cmd_coefficients(config: RunConfig, threads: int) -> Path:
    r, theta = config.alpha.r, config.alpha.theta
    series = _series(config, r, theta)
    path = resolve_output_path(config.output)
    if config.format == "json":
        return write_json(path, coherent.series_to_document(series))
    dense = series.dense()
    rows = np.column_stack([np.arange(len(dense)), dense.real, dense.imag, series.probabilities()])
    return write_csv(path, ["n", "re", "im", "abs2"], rows)


def cmd_check(config: RunConfig, threads: int) -> Path | None:
    results = run_checks(CheckContext(tol=config.tol, units=_units(config)))
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status:4s}  {result.name:26s}  {result.detail}")
    raise_on_failure(results)
    return None


COMMANDS: dict[str, Callable[[RunConfig, int], Path | None]] = {
    "spectrum": cmd_spectrum,
    "density": cmd_density,
    "current": cmd_current,
    "energy": cmd_energy,
    "uncertainty": cmd_uncertainty,
    "fidelity": cmd_fidelity,
    "potentials": cmd_potentials,
    "coefficients": cmd_coefficients,
    "check": cmd_check,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    threads = args.threads or settings.gcs_threads

    try:
        config = run_config_service.load(args.config, _patch_from(args))
        written = COMMANDS[args.command](config, threads)
    except (ConfigError, PhysicsError) as e:
        logger.error("invalid run: command=%s error=%s", args.command, e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except CheckFailedError as e:
        logger.error("checks failed: failed=%s", ",".join(e.failed))
        return EXIT_CHECK
    except (ExportError, OSError) as e:
        logger.error("export failed: command=%s error=%s", args.command, e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except AppError as e:
        logger.error("run failed: command=%s error=%s", args.command, e)
        return EXIT_CONFIG

    if written is not None:
        logger.info("output written: command=%s path=%s", args.command, written)
    return EXIT_OK


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
