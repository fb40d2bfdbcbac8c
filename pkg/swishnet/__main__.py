import argparse
import sys

from .activations import ActivationKind
from .commands import COMMANDS, run_command
from .core.settings import settings
from .train import TABLE_PRESETS, ArchName, DatasetName, OptimizerKind
from .tensor import Precision

KIND_NAMES = ", ".join(k.value for k in ActivationKind)


def _add_activation_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--act", help=f"activation for both layer groups ({KIND_NAMES})")
    parser.add_argument("--act-conv", dest="act_conv", help="activation after every conv layer")
    parser.add_argument("--act-dense", dest="act_dense", help="activation after every hidden dense layer")


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help=f"run seed (default {settings.default_seed})")
    parser.add_argument("--out-dir", dest="out_dir", help="output directory (default ./runs/<timestamp>-<seed>)")


def _training_parent() -> argparse.ArgumentParser:
    """Flags shared by ``train`` and ``matrix``."""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--arch", choices=[a.value for a in ArchName])
    parent.add_argument("--dataset", choices=[d.value for d in DatasetName])
    parent.add_argument("--synthetic", action="store_true", help="train on generated separable data")
    parent.add_argument("--data-dir", dest="data_dir", help="directory holding the dataset files")
    _add_activation_flags(parent)
    parent.add_argument("--optimizer", choices=[o.value for o in OptimizerKind], default=OptimizerKind.ADAM.value)
    parent.add_argument("--lr", type=float, default=None, help="learning rate (optimizer default when omitted)")
    parent.add_argument("--momentum", type=float, default=None)
    parent.add_argument("--epochs", type=int, default=None, help="epoch count (architecture default when omitted)")
    parent.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    parent.add_argument(
        "--early-stop-patience",
        dest="early_stop_patience",
        type=int,
        default=None,
        help="stop after this many non-improving epochs; 0 disables",
    )
    parent.add_argument("--precision", choices=[p.value for p in Precision], default=Precision.SINGLE.value)
    parent.add_argument("--train-subset", dest="train_subset", type=int, default=None)
    parent.add_argument("--test-subset", dest="test_subset", type=int, default=None)
    parent.add_argument("--synthetic-samples", dest="synthetic_samples", type=int, default=200)
    parent.add_argument("--config", help="replay a resolved config.json from an earlier run")
    _add_output_flags(parent)
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swishnet", description="SwishReLU activation experiments")
    commands = parser.add_subparsers(dest="command", required=True)
    training = _training_parent()

    commands.add_parser("train", parents=[training], help="train one model and write metrics, config and weights")

    matrix = commands.add_parser("matrix", parents=[training], help="train one model per activation row")
    matrix.add_argument(
        "--table", type=int, choices=sorted(TABLE_PRESETS), help="use the rows of a comparison-table preset"
    )
    matrix.add_argument("--rows", help="comma separated conv:dense pairs, e.g. relu:swishrelu,elu:elu")

    gradcheck = commands.add_parser("gradcheck", help="compare backprop against central differences")
    gradcheck.add_argument("--arch", choices=[a.value for a in ArchName], default=ArchName.FCNN.value)
    _add_activation_flags(gradcheck)
    gradcheck.add_argument("--batch", type=int, default=None)
    gradcheck.add_argument("--h", type=float, default=1e-5, help="finite-difference step")
    gradcheck.add_argument("--tol", type=float, default=1e-4, help="relative error tolerance")
    gradcheck.add_argument("--max-entries", dest="max_entries", type=int, default=200)
    gradcheck.add_argument(
        "--no-kink-guard",
        dest="kink_guard",
        action="store_false",
        help="also compare positions whose finite difference crosses an activation kink",
    )
    _add_output_flags(gradcheck)

    bench = commands.add_parser("bench", help="time the activation kernels")
    bench.add_argument("--kinds", default="relu,swish,swishrelu")
    bench.add_argument("--elements", type=int, default=settings.bench_elements)
    bench.add_argument("--reps", type=int, default=settings.bench_reps)
    bench.add_argument("--sign-mix", dest="sign_mix", type=float, default=settings.bench_sign_mix)
    _add_output_flags(bench)

    featmaps = commands.add_parser("featmaps", help="export conv feature maps of one test image as PGM")
    featmaps.add_argument("--model", required=True, help="model.swnn written by train")
    featmaps.add_argument("--config", help="config.json of that run (default: next to the model)")
    featmaps.add_argument("--image-index", dest="image_index", type=int, default=0)
    featmaps.add_argument("--out-dir", dest="out_dir")

    plot = commands.add_parser("plot", help="draw metrics files as an SVG line chart")
    plot.add_argument("files", nargs="+", help="metrics.csv files")
    plot.add_argument("--metric", default="test_acc", help="comma separated metric columns")
    plot.add_argument("--title")
    plot.add_argument("--out", help="SVG path (default ./runs/<timestamp>-<seed>/metrics.svg)")

    curves = commands.add_parser("curves", help="tabulate and draw f(x) and f'(x) for each activation")
    curves.add_argument("--kinds", default=",".join(k.value for k in ActivationKind))
    curves.add_argument("--x-min", dest="x_min", type=float, default=-6.0)
    curves.add_argument("--x-max", dest="x_max", type=float, default=6.0)
    curves.add_argument("--points", type=int, default=1201)
    curves.add_argument("--out-dir", dest="out_dir")

    assert set(commands.choices) == set(COMMANDS), "every sub-command needs an implementation"
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run_command(args)


if __name__ == "__main__":
    sys.exit(main())
