import argparse
import math
import sys
from dataclasses import dataclass

from enhancement.denoise_funcs import AUTO, Bm3dParams
from enhancement.mapping_funcs import EnhanceParams
from enhancement.pipeline import PipelineParams
from enhancement.retinex_funcs import DecompParams


def print_progress_bar(current: int, total: int, bar_length: int = 40) -> None:
    """
    Displays a progress bar on stderr to indicate the current progress of a process.
    Args:
        current (int): Current progress (e.g., number of images processed).
        total (int): Total number of items to process.
        bar_length (int, optional): Length of the progress bar. Default is 40.
    """
    percent = float(current) / total
    arrow = '-' * max(0, int(round(percent * bar_length) - 1)) + '>'
    spaces = ' ' * (bar_length - len(arrow))
    sys.stderr.write(f'\rProgress: [{arrow}{spaces}] {current}/{total}')
    sys.stderr.flush()


def print_comparison_results(name: str, reports: dict, metrics: list[str]) -> None:
    """
    Prints the metric table of the enhancement variants of one image on stderr.
    Args:
        name (str): Name of the evaluated image.
        reports (dict): Mapping of variant name to MetricReport.
        metrics (list[str]): Report fields to show, one row each.
    """
    out = sys.stderr
    print(f"\n\nNoise Amplification Comparison: {name}", file=out)
    print("=" * 30, file=out)
    headers = ["Metric"] + list(reports)
    print(" | ".join([f"{h:<20}" for h in headers]), file=out)
    print("-" * (23 * len(headers)), file=out)
    for metric in metrics:
        row = [metric]
        for report in reports.values():
            val = getattr(report, metric)
            if val is None:
                row.append("N/A")
            elif math.isinf(val):
                row.append("inf")
            else:
                row.append(f"{val:.4f}")
        print(" | ".join([f"{c:<20}" for c in row]), file=out)
    print("-" * (23 * len(headers)), file=out)


@dataclass(frozen=True)
class CliConfig:
    inputs: list[str]
    output_dir: str = "output"
    percentile: float = 75.0
    alpha: float = 0.5
    lam: float = 0.15
    sigma: float | str = AUTO
    no_denoise: bool = False
    keep_intermediates: bool = False
    compare_mode: bool = False
    reference: str | None = None
    seed: int = 0
    workers: int = 1
    exposure: float = 1.0
    noise_sigma: float = 0.0

    def __post_init__(self) -> None:
        if not self.inputs:
            raise ValueError("At least one input is required.")
        if self.compare_mode and not self.reference:
            raise ValueError("Compare mode requires a reference image.")
        if self.workers < 1:
            raise ValueError("workers must be at least 1.")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}.")

    def to_pipeline_params(self) -> PipelineParams:
        """Builds the pipeline parameters; --no-denoise takes precedence over an explicit sigma."""
        return PipelineParams(
            decomp=DecompParams(lam=self.lam),
            enhance=EnhanceParams(percentile=self.percentile, alpha=self.alpha),
            bm3d=Bm3dParams(sigma=self.sigma),
            denoise_enabled=not self.no_denoise,
            keep_intermediates=self.keep_intermediates,
        )


def _bounded_float(low: float, high: float, low_open: bool = True, high_open: bool = True):
    def parse(text: str) -> float:
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid number: {text!r}")
        too_low = value <= low if low_open else value < low
        too_high = value >= high if high_open else value > high
        if too_low or too_high or not math.isfinite(value):
            lo, hi = "(" if low_open else "[", ")" if high_open else "]"
            raise argparse.ArgumentTypeError(f"must be in {lo}{low}, {high}{hi}, got {text}")
        return value
    return parse


def _sigma(text: str) -> float | str:
    if text == AUTO:
        return AUTO
    return _bounded_float(0.0, 1.0, low_open=False, high_open=False)(text)


def _int_at_least(low: int):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid integer: {text!r}")
        if value < low:
            raise argparse.ArgumentTypeError(f"must be at least {low}, got {text}")
        return value
    return parse


def parse_args(argv: list[str] | None = None) -> CliConfig:
    """
    Parses command line arguments for enhancing underexposed images.
    Args:
        argv (list[str], optional): Arguments without the program name; sys.argv[1:] when omitted.
    Returns:
        CliConfig: The validated configuration.
    Raises:
        SystemExit: With exit code 2 and a message naming the offending flag on invalid usage.
    """
    parser = argparse.ArgumentParser(description="Noise-aware contrast enhancement of underexposed images.")

    parser.add_argument("inputs", type=str, nargs="+",
                        help="Input PNG or PPM files, or directories containing them.")

    parser.add_argument("--out", type=str, default="output", dest="output_dir",
                        help="Output directory (default: 'output')")

    parser.add_argument("--percentile", type=_bounded_float(0.0, 100.0), default=75.0,
                        help="Percentile bounding the bright set of the threshold, in (0, 100) (default: 75)")

    parser.add_argument("--alpha", type=_bounded_float(0.0, 1.0, low_open=False, high_open=False), default=0.5,
                        help="AGCWD weighting exponent in [0, 1] (default: 0.5)")

    parser.add_argument("--lambda", type=_bounded_float(0.0, math.inf), default=0.15, dest="lam",
                        help="Smoothness weight of the illumination estimate (default: 0.15)")

    parser.add_argument("--sigma", type=_sigma, default=AUTO,
                        help="Noise standard deviation in [0, 1] for BM3D, or 'auto' to estimate it (default: 'auto')")

    parser.add_argument("--no-denoise", action="store_true",
                        help="Skip luma denoising; takes precedence over --sigma")

    parser.add_argument("--keep-intermediates", action="store_true",
                        help="Also write illumination, reflectance, enhanced illumination and the curve")

    parser.add_argument("--compare", action="store_true", dest="compare_mode",
                        help="Compare the pipeline with the AGCWD-only baseline against --reference")

    parser.add_argument("--reference", type=str, default=None,
                        help="Clean ground truth used by --compare")

    parser.add_argument("--exposure", type=_bounded_float(0.0, 1.0, high_open=False), default=1.0,
                        help="Compare mode: exposure factor applied to each input before enhancement (default: 1.0)")

    parser.add_argument("--noise-sigma", type=_bounded_float(0.0, 1.0, low_open=False, high_open=False),
                        default=0.0,
                        help="Compare mode: Gaussian noise added to each input before enhancement (default: 0.0)")

    parser.add_argument("--seed", type=_int_at_least(0), default=0,
                        help="Seed of the noise injected in compare mode (default: 0)")

    parser.add_argument("--workers", type=_int_at_least(1), default=1,
                        help="Number of images processed in parallel (default: 1)")

    args = parser.parse_args(argv)
    if args.compare_mode and args.reference is None:
        parser.error("argument --compare: requires --reference PATH")
    return CliConfig(**vars(args))


def get_cl_args_preproc(argv: list[str] | None = None) -> argparse.Namespace:
    """
    Parses command line arguments for building synthetic corpora.
    Returns:
        argparse.Namespace: Parsed command line arguments.
    """
    parser = argparse.ArgumentParser(description="Create and inspect synthetic underexposed image corpora.")

    parser.add_argument("function", type=str, help="Function to execute.",
                        choices=["create_sample", "sample_stats"])

    parser.add_argument("--count", type=_int_at_least(1), help="The number of image pairs to create.", default=12)

    parser.add_argument("--input_path", type=str, help="Directory of images to inspect.", default=None)

    parser.add_argument("--output_path", type=str, help="Directory to write the sample to.", default=None)

    parser.add_argument("--size", type=int, help="Width and height of the scenes (default: 64).", default=64)

    parser.add_argument("--exposure", type=float, help="Exposure factor of the observations (default: 0.25).",
                        default=0.25)

    parser.add_argument("--noise_sigma", type=float, default=15.0 / 255.0,
                        help="Noise standard deviation of the observations (default: 15/255).")

    parser.add_argument("--seed", type=_int_at_least(0), help="Base seed (default: 0).", default=0)

    return parser.parse_args(argv)
