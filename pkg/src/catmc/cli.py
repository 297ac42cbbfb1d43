"""Command-line frontend.

Subcommands: ``generate``, ``fit``, ``solve``, ``eval``, ``bounds``,
``sweep``.  Every run writes its outputs plus a ``manifest.json`` holding
the command, seed, resolved configuration, and input/output paths, so a
manifest fully determines a reproduction (byte-identical outputs except
the recorded duration).

Exit status: 0 on success (possibly with warnings recorded in the
manifest), 1 on runtime or numeric failure, 2 on usage or validation
errors.
"""

from __future__ import annotations

import csv
import functools
import json
import os
import sys
import warnings

import click
import numpy as np

from . import __version__, io
from .constraints import ConstraintSpec
from .errors import CatmcError, InvalidInputError
from .evaluation import bound_report, predict_categories, rating_report, round_to_labels
from .fitting import TrainingPairs, fit_logit, loglik_of_fit
from .links import default_logit_family, smoothness_constants
from .manifest import manifest_writer
from .sampling import sample_mask, sample_observations, synth_low_rank
from .solver import SolverConfig, solve
from .sweep import run_sweep


def _cli_guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except InvalidInputError as exc:
            raise click.UsageError(str(exc)) from exc
        except CatmcError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except Exception as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _load_family(path_or_default: str, K: int | None):
    if path_or_default == "default":
        if K is None:
            raise InvalidInputError("--K is required with the default family")
        return default_logit_family(K)
    return io.read_family(path_or_default)


def _load_config(path: str | None) -> SolverConfig:
    if path is None:
        return SolverConfig()
    with open(path) as fh:
        return SolverConfig.from_json(json.load(fh))


def _parse_labels(text: str | None):
    if text is None:
        return None
    return np.asarray([float(tok) for tok in text.split(",")], dtype=np.float64)


@click.group()
@click.version_option(__version__)
def main():
    """Categorical matrix completion toolkit."""


@main.command()
@click.option("--d1", type=int, required=True)
@click.option("--d2", type=int, required=True)
@click.option("--rank", type=int, required=True)
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--m", type=float, required=True, help="Expected number of observed cells.")
@click.option("--K", "K", type=int, default=5, show_default=True)
@click.option("--family", "family_src", default="default", show_default=True,
              help="Path to a family JSON, or 'default'.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@_cli_guard
def generate(d1, d2, rank, alpha, m, K, family_src, seed, out):
    """Write a synthetic ground truth, observations, and the family used."""
    family = _load_family(family_src, K)
    io.ensure_dir(out)
    paths = {
        "truth": os.path.join(out, "truth.txt"),
        "observations": os.path.join(out, "obs.tsv"),
        "family": os.path.join(out, "family.json"),
    }
    cfg = {
        "d1": d1, "d2": d2, "rank": rank, "alpha": alpha, "m": m,
        "K": family.K, "labels": list(range(1, family.K + 1)),
        "family": family_src,
    }
    with manifest_writer(
        os.path.join(out, "manifest.json"), "generate", seed, cfg,
        inputs={}, outputs=paths,
    ) as doc:
        with warnings.catch_warnings(record=True) as wlist:
            warnings.simplefilter("always")
            truth_seed, mask_seed, draw_seed = (
                int(s) for s in np.random.SeedSequence(seed).generate_state(3, np.uint64)
            )
            truth = synth_low_rank(d1, d2, rank, alpha, seed=truth_seed)
            mask = sample_mask(d1, d2, m, seed=mask_seed)
            obs = sample_observations(
                family, truth, mask, labels=cfg["labels"], seed=draw_seed
            )
        doc["warnings"] = sorted({str(w.message) for w in wlist})
        io.write_matrix(paths["truth"], truth.M)
        io.write_observations(paths["observations"], obs)
        io.write_family(paths["family"], family)
    click.echo(f"wrote {obs.n_obs} observations to {paths['observations']}")


@main.command()
@click.option("--pairs", type=click.Path(exists=True), required=True,
              help="Tab-separated 'x<TAB>k' training pairs (1-based k).")
@click.option("--K", "K", type=int, required=True)
@click.option("--reg", type=float, default=1e-6, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@_cli_guard
def fit(pairs, K, reg, out):
    """Fit a logit link family from training pairs."""
    data = io.read_training_pairs(pairs, K)
    io.ensure_dir(out)
    family_path = os.path.join(out, "family.json")
    diag_path = os.path.join(out, "diagnostics.json")
    with manifest_writer(
        os.path.join(out, "manifest.json"), "fit", None,
        {"K": K, "reg": reg}, inputs={"pairs": pairs},
        outputs={"family": family_path, "diagnostics": diag_path},
    ) as doc:
        with warnings.catch_warnings(record=True) as wlist:
            warnings.simplefilter("always")
            family = fit_logit(data, reg=reg)
        doc["warnings"] = sorted({str(w.message) for w in wlist})
        io.write_family(family_path, family)
        with open(diag_path, "w") as fh:
            json.dump(
                {
                    "n_pairs": data.n,
                    "mean_loglik": loglik_of_fit(family, data),
                    "warnings": doc["warnings"],
                },
                fh, indent=2, sort_keys=True,
            )
            fh.write("\n")
    for w in doc["warnings"]:
        click.echo(f"warning: {w}", err=True)
    click.echo(f"wrote {family_path}")


@main.command(name="solve")
@click.option("--obs", type=click.Path(exists=True), required=True)
@click.option("--family", "family_path", type=click.Path(exists=True), required=True)
@click.option("--alpha", type=float, required=True)
@click.option("--rank", type=int, required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--labels", "labels_text", default=None,
              help="Comma-separated category labels; inferred from the file if omitted.")
@click.option("--d1", type=int, default=None, help="Override inferred row count.")
@click.option("--d2", type=int, default=None, help="Override inferred column count.")
@click.option("--out", type=click.Path(), required=True)
@_cli_guard
def solve_cmd(obs, family_path, alpha, rank, config_path, labels_text, d1, d2, out):
    """Recover a matrix from categorical observations."""
    family = io.read_family(family_path)
    config = _load_config(config_path)
    data = io.read_observations(obs, labels=_parse_labels(labels_text), d1=d1, d2=d2)
    spec = ConstraintSpec(alpha=alpha, rank=rank, d1=data.d1, d2=data.d2)
    io.ensure_dir(out)
    paths = {
        "estimate": os.path.join(out, "estimate.txt"),
        "diagnostics": os.path.join(out, "diagnostics.json"),
        "trace": os.path.join(out, "trace.csv"),
    }
    with manifest_writer(
        os.path.join(out, "manifest.json"), "solve", None,
        {
            "alpha": alpha, "rank": rank, "d1": data.d1, "d2": data.d2,
            "labels": data.labels.tolist(), "solver": config.to_json(),
        },
        inputs={"observations": obs, "family": family_path},
        outputs=paths,
    ) as doc:
        with warnings.catch_warnings(record=True) as wlist:
            warnings.simplefilter("always")
            est = solve(family, data, spec, config)
        doc["warnings"] = sorted({str(w.message) for w in wlist})
        io.write_matrix(paths["estimate"], est.X)
        with open(paths["trace"], "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "log_likelihood"])
            for i, v in enumerate(est.ll_trace):
                writer.writerow([i, f"{v:.17g}"])
        with open(paths["diagnostics"], "w") as fh:
            json.dump(
                {
                    "iters": est.iters,
                    "final_ll": est.final_ll,
                    "nuclear_residual": est.nuclear_residual,
                    "box_residual": est.box_residual,
                    "converged": est.converged,
                    "warnings": doc["warnings"],
                },
                fh, indent=2, sort_keys=True,
            )
            fh.write("\n")
    for w in doc["warnings"]:
        click.echo(f"warning: {w}", err=True)
    click.echo(
        f"solved in {est.iters} iterations, final log-likelihood {est.final_ll:.6g}"
    )


@main.command(name="eval")
@click.option("--test", "test_path", type=click.Path(exists=True), required=True)
@click.option("--estimate", "estimate_path", type=click.Path(exists=True), required=True)
@click.option("--family", "family_path", type=click.Path(exists=True), default=None,
              help="Required for --mode categorical.")
@click.option("--mode", type=click.Choice(["categorical", "rounding"]),
              default="categorical", show_default=True)
@click.option("--labels", "labels_text", default=None)
@click.option("--out", type=click.Path(), required=True)
@_cli_guard
def eval_cmd(test_path, estimate_path, family_path, mode, labels_text, out):
    """Score predictions from a recovered matrix on held-out ratings."""
    X = io.read_matrix(estimate_path)
    test = io.read_observations(
        test_path, labels=_parse_labels(labels_text),
        d1=X.shape[0], d2=X.shape[1],
    )
    if mode == "categorical":
        if family_path is None:
            raise InvalidInputError("--family is required for categorical mode")
        family = io.read_family(family_path)
        prediction = predict_categories(family, X, test.labels)
        predicted, ties = prediction.labels, prediction.tie_count
    else:
        predicted, ties = round_to_labels(X, test.labels), 0
    report = rating_report(test, predicted)
    io.ensure_dir(out)
    paths = {
        "report_json": os.path.join(out, "report.json"),
        "report_text": os.path.join(out, "report.txt"),
    }
    with manifest_writer(
        os.path.join(out, "manifest.json"), "eval", None,
        {"mode": mode, "labels": test.labels.tolist()},
        inputs={"test": test_path, "estimate": estimate_path, "family": family_path},
        outputs=paths,
    ):
        doc = report.to_json()
        doc["tie_count"] = ties
        with open(paths["report_json"], "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        with open(paths["report_text"], "w") as fh:
            fh.write(report.to_text() + "\n")
    click.echo(report.to_text())


@main.command()
@click.option("--family", "family_src", default="default", show_default=True)
@click.option("--K", "K", type=int, default=5, show_default=True)
@click.option("--alpha", type=float, required=True)
@click.option("--rank", type=int, required=True)
@click.option("--d1", type=int, required=True)
@click.option("--d2", type=int, required=True)
@click.option("--m", type=float, required=True)
@click.option("--grid-size", type=int, default=4096, show_default=True)
@click.option("--c-prime", type=float, default=1.0, show_default=True)
@click.option("--c1", type=float, default=1.0, show_default=True)
@click.option("--c2", type=float, default=1.0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@_cli_guard
def bounds(family_src, K, alpha, rank, d1, d2, m, grid_size, c_prime, c1, c2, out):
    """Evaluate the closed-form recovery-error bounds."""
    family = _load_family(family_src, K)
    smooth = smoothness_constants(family, alpha, grid_size)
    spec = ConstraintSpec(alpha=alpha, rank=rank, d1=d1, d2=d2)
    report = bound_report(
        smooth, spec, m, family.K,
        constants={"C_prime": c_prime, "C1": c1, "C2": c2},
    )
    io.ensure_dir(out)
    paths = {
        "bounds_json": os.path.join(out, "bounds.json"),
        "bounds_text": os.path.join(out, "bounds.txt"),
    }
    with manifest_writer(
        os.path.join(out, "manifest.json"), "bounds", None,
        {
            "K": family.K, "alpha": alpha, "rank": rank, "d1": d1, "d2": d2,
            "m": m, "grid_size": grid_size,
            "C_prime": c_prime, "C1": c1, "C2": c2, "family": family_src,
        },
        inputs={}, outputs=paths,
    ):
        with open(paths["bounds_json"], "w") as fh:
            json.dump(report.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        lines = [
            f"{'upper_simple':>20}  {report.upper_simple:.6g}",
            f"{'upper_full':>20}  {report.upper_full:.6g}",
            f"{'lower':>20}  {report.lower:.6g}",
            f"{'ratio_upper_lower':>20}  {report.ratio_upper_lower:.6g}",
            f"{'category_gap_factor':>20}  {report.category_gap_factor:.6g}",
        ]
        with open(paths["bounds_text"], "w") as fh:
            fh.write("\n".join(lines) + "\n")
    click.echo("\n".join(lines))


@main.command()
@click.option("--d1", type=int, required=True)
@click.option("--d2", type=int, required=True)
@click.option("--rank", type=int, required=True)
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--K", "K", type=int, default=5, show_default=True)
@click.option("--m", "m_grid", type=float, multiple=True, required=True,
              help="Repeat for each observation budget in the grid.")
@click.option("--replicates", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), required=True)
@_cli_guard
def sweep(d1, d2, rank, alpha, K, m_grid, replicates, seed, config_path, out):
    """Recovery-error scaling experiment over observation budgets."""
    if replicates < 3:
        raise InvalidInputError("need at least 3 replicates")
    config = _load_config(config_path)
    io.ensure_dir(out)
    paths = {
        "csv": os.path.join(out, "sweep.csv"),
        "summary": os.path.join(out, "summary.json"),
    }
    with manifest_writer(
        os.path.join(out, "manifest.json"), "sweep", seed,
        {
            "d1": d1, "d2": d2, "rank": rank, "alpha": alpha, "K": K,
            "m_grid": sorted(m_grid), "replicates": replicates,
            "solver": config.to_json(),
        },
        inputs={}, outputs=paths,
    ) as doc:
        with warnings.catch_warnings(record=True) as wlist:
            warnings.simplefilter("always")
            result = run_sweep(
                d1=d1, d2=d2, rank=rank, alpha=alpha, K=K,
                m_grid=sorted(m_grid), replicates=replicates, seed=seed,
                config=config,
            )
        doc["warnings"] = sorted({str(w.message) for w in wlist})
        with open(paths["csv"], "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["m", "replicate", "mse", "bound_upper", "bound_lower"])
            for row in result.rows:
                writer.writerow([
                    f"{row['m']:.17g}", row["replicate"], f"{row['mse']:.17g}",
                    f"{row['bound_upper']:.17g}", f"{row['bound_lower']:.17g}",
                ])
        with open(paths["summary"], "w") as fh:
            json.dump(
                {
                    "slope_loglog_median_mse_vs_m": result.slope,
                    "median_mse": {f"{m:.17g}": v for m, v in result.median_mse.items()},
                },
                fh, indent=2, sort_keys=True,
            )
            fh.write("\n")
    click.echo(f"fitted log-log slope: {result.slope:.4f}")


if __name__ == "__main__":
    main()
