"""Command implementations behind ``python -m swishnet``.

Each ``cmd_*`` takes the parsed argparse namespace and returns the process
exit status. Library errors are translated to exit codes in ``run_command``.
"""
import argparse
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Callable

from pydantic import ValidationError as PydanticValidationError

from .activations import ActivationKind, activation_curves
from .bench import bench_compare
from .core.exceptions import (
    EXIT_CHECK_FAILED,
    EXIT_DIVERGED,
    EXIT_OK,
    EXIT_USAGE,
    DivergenceError,
    SwishNetError,
    ValidationError,
    invalid_parameter,
)
from .core.settings import settings
from .data import LabeledDataset, load_split, make_synthetic
from .logger import logger
from .nn import grad_check
from .output import (
    RunDirectory,
    Series,
    TemplateRenderer,
    default_run_dir,
    load_model,
    read_metrics_csv,
    save_model,
    write_feature_maps,
    write_matrix_csv,
    write_metrics_csv,
)
from .rng import derive_seed
from .tensor import Precision
from .train import (
    TABLE_PRESETS,
    ArchName,
    ArchSpec,
    DatasetName,
    OptimizerConfig,
    OptimizerKind,
    RunConfig,
    TrainConfig,
    TrainResult,
    build_model,
    dead_unit_fraction,
    extract_feature_maps,
    init_parameters,
    parse_rows,
    run_experiment_matrix,
    train_model,
)

DATASET_SHAPES: dict[DatasetName, tuple[int, int, int]] = {
    DatasetName.MNIST: (1, 28, 28),
    DatasetName.CIFAR10: (3, 32, 32),
    DatasetName.CIFAR100: (3, 32, 32),
}
DATASET_CLASSES = {DatasetName.MNIST: 10, DatasetName.CIFAR10: 10, DatasetName.CIFAR100: 100, DatasetName.SYNTHETIC: 2}
METRIC_NAMES = ("train_acc", "train_loss", "test_acc", "test_loss")


def _sample_shape(dataset: DatasetName, arch: ArchName) -> tuple[int, int, int]:
    if dataset is DatasetName.SYNTHETIC:
        return (1, 28, 28) if arch is ArchName.FCNN else (3, 32, 32)
    return DATASET_SHAPES[dataset]


def _activations(args: argparse.Namespace) -> tuple[ActivationKind, ActivationKind]:
    both = getattr(args, "act", None)
    conv = args.act_conv or both or ActivationKind.SWISHRELU.value
    dense = args.act_dense or both or ActivationKind.SWISHRELU.value
    return ActivationKind.parse(conv), ActivationKind.parse(dense)


def _dataset_name(args: argparse.Namespace) -> DatasetName:
    if args.synthetic:
        return DatasetName.SYNTHETIC
    return DatasetName(args.dataset)


def build_run_config(args: argparse.Namespace, command: str) -> RunConfig:
    """Resolve flags (or a replayed config.json) into a full RunConfig."""
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise invalid_parameter("config", f"{path} does not exist")
        run = RunConfig.model_validate_json(path.read_text(encoding="utf-8"))
        if run.command != command:
            raise invalid_parameter("config", f"{path} was written by '{run.command}', not '{command}'")
        out_dir = Path(args.out_dir) if args.out_dir else default_run_dir(run.train.seed)
        return run.model_copy(update={"out_dir": out_dir})

    preset = TABLE_PRESETS.get(args.table) if getattr(args, "table", None) else None
    if getattr(args, "table", None) and preset is None:
        raise invalid_parameter("table", f"choose one of {sorted(TABLE_PRESETS)}")
    arch = ArchName(args.arch) if args.arch else (preset.arch if preset else ArchName.FCNN)
    if args.synthetic or args.dataset:
        dataset = _dataset_name(args)
    else:
        dataset = preset.dataset if preset else DatasetName.SYNTHETIC
    default_dirs = {DatasetName.MNIST: settings.mnist_dir, DatasetName.CIFAR10: settings.cifar10_dir}
    data_dir = args.data_dir or default_dirs.get(dataset)
    conv, dense = _activations(args)
    seed = settings.default_seed if args.seed is None else args.seed

    if args.early_stop_patience is None:
        patience = arch.default_patience
    else:
        patience = args.early_stop_patience or None
    optimizer = OptimizerConfig(
        kind=OptimizerKind(args.optimizer),
        learning_rate=args.lr,
        **({"momentum": args.momentum} if args.momentum is not None else {}),
    )
    train = TrainConfig(
        optimizer=optimizer,
        epochs=args.epochs if args.epochs is not None else arch.default_epochs,
        batch_size=args.batch_size or settings.default_batch_size,
        seed=seed,
        early_stopping_patience=patience,
        precision=Precision(args.precision),
    )
    rows = []
    if command == "matrix":
        if args.rows:
            rows = parse_rows(args.rows)
        elif preset is not None:
            rows = list(preset.rows)
        else:
            rows = [(conv, dense)]
    return RunConfig(
        command=command,
        arch=ArchSpec(
            name=arch,
            conv_activation=conv,
            dense_activation=dense,
            class_count=DATASET_CLASSES[dataset],
            input_shape=_sample_shape(dataset, arch),
        ),
        dataset=dataset,
        data_dir=data_dir,
        train_subset=args.train_subset,
        test_subset=args.test_subset,
        synthetic_samples=args.synthetic_samples,
        train=train,
        rows=rows,
        out_dir=Path(args.out_dir) if args.out_dir else default_run_dir(seed),
    )


def load_datasets(run: RunConfig) -> tuple[LabeledDataset, LabeledDataset]:
    precision = run.train.precision
    if run.dataset is DatasetName.SYNTHETIC:
        shape, seed = run.arch.input_shape, run.train.seed
        n = run.synthetic_samples
        train = make_synthetic(n, shape, 2, derive_seed(seed, 0xDA7A), separable=True, precision=precision)
        test = make_synthetic(max(1, n // 2), shape, 2, derive_seed(seed, 0x7E57), separable=True, precision=precision)
        return train, test
    train = load_split(run.dataset.value, run.data_dir, "train", precision=precision).head(run.train_subset)
    test = load_split(run.dataset.value, run.data_dir, "test", precision=precision).head(run.test_subset)
    logger.info(f"{run.dataset.value}: {len(train)} train / {len(test)} test samples")
    return train, test


def _summary(run: RunConfig, result=None, error: DivergenceError | None = None, **extra) -> dict:
    metrics = error.partial_metrics if error else result.metrics
    return {
        "arch": run.arch.name.value,
        "conv_activation": run.arch.conv_activation.value,
        "dense_activation": run.arch.dense_activation.value,
        "dataset": run.dataset.value,
        "seed": run.train.seed,
        "epochs_run": len(metrics),
        "stopped_early_at": result.stopped_early_at if result else None,
        "best_epoch": result.best_epoch if result else None,
        "diverged": error is not None,
        "final": metrics[-1].model_dump() if metrics else None,
        **extra,
    }


def _command_config(out: RunDirectory, args: argparse.Namespace, /, *, beside: str | None = None, **resolved) -> Path:
    """Record the flags of a command that has no RunConfig, with defaults filled in by ``resolved``.

    Commands that write into an existing run directory pass ``beside`` so the
    run's own config.json stays untouched; theirs goes to ``<beside>.config.json``.
    """
    name = "config.json"
    if beside and out.path(name).exists():
        name = f"{beside}.config.json"
    values = {key: str(value) if isinstance(value, Path) else value for key, value in vars(args).items()}
    return out.write_json_file(name, values | resolved)


def write_train_outputs(
    out: RunDirectory,
    run: RunConfig,
    test_set: LabeledDataset,
    result: TrainResult | None = None,
    error: DivergenceError | None = None,
) -> None:
    """metrics.csv and summary.json always; model.swnn and dead_units.json only for a finished run."""
    if error is not None:
        write_metrics_csv(out.path("metrics.csv"), error.partial_metrics)
        out.write_json_file("summary.json", _summary(run, error=error))
        return
    model = result.model
    write_metrics_csv(out.path("metrics.csv"), result.metrics)
    save_model(out.path("model.swnn"), model)
    dead = dead_unit_fraction(model, test_set, run.train.eval_batch_size)
    out.write_json_file("dead_units.json", {"layers": [d.model_dump() for d in dead]})
    out.write_json_file(
        "summary.json", _summary(run, result, parameter_count=model.parameter_count(), steps=result.steps)
    )


def cmd_train(args: argparse.Namespace) -> int:
    run = build_run_config(args, "train")
    out = RunDirectory(run.out_dir)
    out.write_json_file("config.json", run)
    logger.info(f"train: seed {run.train.seed}, output {out.output_dir}")

    train_set, test_set = load_datasets(run)
    model = init_parameters(build_model(run.arch, run.train.precision), run.train.seed)
    logger.debug("\n" + model.summary())
    try:
        result = train_model(model, train_set, test_set, run.train)
    except DivergenceError as e:
        write_train_outputs(out, run, test_set, error=e)
        logger.error(f"{e.message}; partial metrics in {out.path('metrics.csv')}")
        return EXIT_DIVERGED

    write_train_outputs(out, run, test_set, result)
    final = result.final
    print(
        f"{run.arch.name.value} {run.arch.conv_activation.display_name}/{run.arch.dense_activation.display_name}: "
        f"train acc {final.train_accuracy:.4f} loss {final.train_loss:.4f}, "
        f"test acc {final.test_accuracy:.4f} loss {final.test_loss:.4f} after {len(result.metrics)} epochs"
    )
    return EXIT_OK


def cmd_matrix(args: argparse.Namespace) -> int:
    run = build_run_config(args, "matrix")
    if run.arch.name not in (ArchName.FCNN, ArchName.CNN5, ArchName.CNN5_SMALL):
        raise invalid_parameter("arch", "the experiment matrix covers fcnn and cnn5")
    out = RunDirectory(run.out_dir)
    out.write_json_file("config.json", run)
    logger.info(f"matrix: seed {run.train.seed}, {len(run.rows)} rows, output {out.output_dir}")
    train_set, test_set = load_datasets(run)

    def write_row(index: int, spec: ArchSpec, result: TrainResult | None, error: DivergenceError | None) -> None:
        name = f"row{index}_{spec.conv_activation.value}_{spec.dense_activation.value}"
        row_dir = RunDirectory(out.create_dir(name))
        # Each row replays as a single `train --config`
        row_run = run.model_copy(update={"command": "train", "arch": spec, "rows": [], "out_dir": row_dir.output_dir})
        row_dir.write_json_file("config.json", row_run)
        write_train_outputs(row_dir, row_run, test_set, result, error)

    rows = run_experiment_matrix(run.arch.name, train_set, test_set, run.rows, run.train, on_row=write_row)
    write_matrix_csv(out.path("matrix.csv"), rows)
    for row in rows:
        final = row.final
        status = "diverged" if row.diverged else "ok"
        scores = "-"
        if final:
            scores = (
                f"train {final.train_accuracy:.4f}/{final.train_loss:.4f} "
                f"test {final.test_accuracy:.4f}/{final.test_loss:.4f}"
            )
        print(f"{row.conv_activation.display_name:>10} | {row.dense_activation.display_name:<10} {scores} [{status}]")
    return EXIT_DIVERGED if any(row.diverged for row in rows) else EXIT_OK


def cmd_gradcheck(args: argparse.Namespace) -> int:
    arch = ArchName(args.arch)
    conv, dense = _activations(args)
    shape = (1, 28, 28) if arch is ArchName.FCNN else (3, 32, 32)
    spec = ArchSpec(name=arch, conv_activation=conv, dense_activation=dense, class_count=10, input_shape=shape)
    seed = settings.default_seed if args.seed is None else args.seed
    model = init_parameters(build_model(spec, Precision.DOUBLE), seed)
    batch = args.batch or (4 if arch is ArchName.FCNN else 2)
    data = make_synthetic(batch, shape, 10, seed, precision=Precision.DOUBLE)
    logger.info(f"gradcheck: {arch.value} {conv.value}/{dense.value}, batch {batch}, seed {seed}")
    report = grad_check(
        model,
        data.images,
        data.labels,
        h=args.h,
        tol=args.tol,
        max_entries=args.max_entries,
        seed=seed,
        kink_guard=args.kink_guard,
    )
    print(report.render())
    out = RunDirectory(args.out_dir or default_run_dir(seed))
    _command_config(out, args, seed=seed, batch=batch, out_dir=str(out.output_dir))
    out.write_json_file("gradcheck.json", report)
    if report.passed:
        return EXIT_OK
    worst = max(report.failing(), key=lambda e: e.max_rel_error)
    logger.error(
        f"gradient check failed: worst layer {worst.layer_index} {worst.layer}.{worst.parameter} "
        f"rel err {worst.max_rel_error:.3e} > tol {args.tol:g}"
    )
    return EXIT_CHECK_FAILED


def cmd_bench(args: argparse.Namespace) -> int:
    kinds = [ActivationKind.parse(k) for k in args.kinds.split(",") if k.strip()]
    report = bench_compare(kinds, elements=args.elements, sign_mix=args.sign_mix, reps=args.reps, seed=args.seed)
    frame = report.to_frame()
    seed = settings.default_seed if args.seed is None else args.seed
    out = RunDirectory(args.out_dir or default_run_dir(seed))
    _command_config(out, args, seed=seed, out_dir=str(out.output_dir))
    report.write_csv(out.path("bench.csv"))
    out.write_file("machine.txt", report.machine + "\n")
    print(report.machine)
    print(frame[["kind", "ns_per_element", "throughput_gelem_s", "ratio_to_relu"]].to_string(index=False))
    return EXIT_OK


def cmd_featmaps(args: argparse.Namespace) -> int:
    model_path = Path(args.model)
    config_path = Path(args.config) if args.config else model_path.with_name("config.json")
    if not model_path.is_file():
        raise invalid_parameter("model", f"{model_path} does not exist; train a model first")
    if not config_path.is_file():
        raise invalid_parameter("config", f"{config_path} does not exist")
    run = RunConfig.model_validate_json(config_path.read_text(encoding="utf-8"))
    model = load_model(model_path, build_model(run.arch, run.train.precision))
    _, test_set = load_datasets(run.model_copy(update={"test_subset": None}))
    if not 0 <= args.image_index < len(test_set):
        raise invalid_parameter("image-index", f"must lie in [0, {len(test_set)})")
    image = test_set.images[args.image_index : args.image_index + 1]
    maps = extract_feature_maps(model, image)
    out_dir = Path(args.out_dir) if args.out_dir else model_path.parent / "featmaps"
    written = write_feature_maps(out_dir, maps)
    _command_config(RunDirectory(out_dir), args, beside="featmaps", config=str(config_path), out_dir=str(out_dir))
    logger.info(f"featmaps: {len(written)} PGM files from {len(maps)} conv layers in {out_dir}")
    print(f"{len(written)} feature maps written to {out_dir}")
    return EXIT_OK


def _check_svg(svg: str) -> None:
    try:
        ET.fromstring(svg.encode("utf-8"))
    except ET.ParseError as e:
        raise ValidationError(f"rendered chart is not well-formed XML: {e}") from None


def cmd_plot(args: argparse.Namespace) -> int:
    metrics = [m.strip() for m in args.metric.split(",") if m.strip()]
    if not metrics:
        raise invalid_parameter("metric", f"select at least one of {', '.join(METRIC_NAMES)}")
    unknown = [m for m in metrics if m not in METRIC_NAMES]
    if unknown:
        raise invalid_parameter("metric", f"unknown {unknown}; choose from {', '.join(METRIC_NAMES)}")
    series = []
    for path in args.files:
        frame = read_metrics_csv(path)
        for metric in metrics:
            label = Path(path).parent.name + "/" + Path(path).stem if len(args.files) > 1 else Path(path).stem
            series.append(Series(f"{label} {metric}", frame["epoch"].tolist(), frame[metric].tolist()))
    svg = TemplateRenderer().render_line_chart(
        args.title or ", ".join(metrics), series, x_label="epoch", y_label=", ".join(metrics)
    )
    _check_svg(svg)
    out_path = Path(args.out) if args.out else default_run_dir(settings.default_seed) / "metrics.svg"
    out = RunDirectory(out_path.parent)
    out.write_file(out_path.name, svg)
    _command_config(out, args, beside=out_path.stem, out=str(out_path))
    print(f"chart written to {out_path}")
    return EXIT_OK


def cmd_curves(args: argparse.Namespace) -> int:
    kinds = [ActivationKind.parse(k) for k in args.kinds.split(",") if k.strip()]
    if args.points < 2 or args.x_max <= args.x_min:
        raise invalid_parameter("points, x-min, x-max", "need at least two points on a non-empty interval")
    table = activation_curves(kinds, x_min=args.x_min, x_max=args.x_max, points=args.points)
    out = RunDirectory(args.out_dir or default_run_dir(settings.default_seed))
    _command_config(out, args, out_dir=str(out.output_dir))
    table.to_csv(out.path("activation_curves.csv"), index=False, float_format="%.9f", lineterminator="\n")
    renderer = TemplateRenderer()
    x = table["x"].tolist()
    for prefix, title in (("", "Activation functions"), ("d_", "Derivatives")):
        series = [Series(k.display_name, x, table[f"{prefix}{k.value}"].tolist()) for k in kinds]
        svg = renderer.render_line_chart(title, series, x_label="x", y_label="f'(x)" if prefix else "f(x)")
        _check_svg(svg)
        out.write_file(f"activation_{'derivatives' if prefix else 'curves'}.svg", svg)
    print(f"activation curves written to {out.output_dir}")
    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "train": cmd_train,
    "matrix": cmd_matrix,
    "gradcheck": cmd_gradcheck,
    "bench": cmd_bench,
    "featmaps": cmd_featmaps,
    "plot": cmd_plot,
    "curves": cmd_curves,
}


def run_command(args: argparse.Namespace) -> int:
    try:
        status = COMMANDS[args.command](args)
    except SwishNetError as e:
        logger.error(f"{args.command}: {e.message}")
        status = e.exit_code
    except PydanticValidationError as e:
        logger.error(f"{args.command}: invalid configuration\n{e}")
        status = EXIT_USAGE
    logger.info(f"{args.command} finished with exit status {status}")
    return status
