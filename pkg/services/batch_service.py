import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from enhancement.pipeline import EnhanceResult, Pipeline, write_intermediates
from evaluation.evaluation import ComparisonReport, Evaluation
from evaluation.metrics import REPORT_METRICS, metric_report
from imagecore.image_io import load_image, save_image
from imagecore.image_types import RgbImage
from preprocessing.degradation_funcs import add_gaussian_noise, underexpose
from services.command_line_service import CliConfig, print_comparison_results, print_progress_bar

IMAGE_SUFFIXES = (".png", ".ppm")


@dataclass(frozen=True)
class FileOutcome:
    path: str
    line: str | None = None
    comparison: ComparisonReport | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def collect_inputs(inputs: list[str]) -> list[str]:
    """
    Expands directories into their PNG and PPM files in name order; other paths are kept as given.
    Args:
        inputs (list[str]): Files or directories.
    Returns:
        list[str]: The files to process.
    """
    files = []
    for path in inputs:
        if os.path.isdir(path):
            names = sorted(n for n in os.listdir(path) if n.lower().endswith(IMAGE_SUFFIXES))
            if not names:
                logging.warning(f"BatchService: Directory {path} contains no images.")
            files.extend(os.path.join(path, n) for n in names)
        else:
            files.append(path)
    return files


def output_stem(path: str) -> str:
    """'dir/photo.dark.png' -> 'photo.dark'"""
    return os.path.splitext(os.path.basename(path))[0]


def find_stem_clashes(files: list[str]) -> dict[int, str]:
    """
    Finds inputs that would write the same output file as an earlier input.
    Args:
        files (list[str]): The files to process, in batch order.
    Returns:
        dict[int, str]: Index of every later input mapped to the earlier input it clashes with.
    """
    first: dict[str, str] = {}
    clashes = {}
    for index, path in enumerate(files):
        stem = output_stem(path)
        if stem in first:
            clashes[index] = first[stem]
        else:
            first[stem] = path
    return clashes


class BatchService:
    """
    Enhances a batch of images independently. A failing file is reported and skipped; the remaining
    files are still processed. Metric lines go to stdout in input order.
    """

    def __init__(self, config: CliConfig) -> None:
        self.config = config
        self.params = config.to_pipeline_params()
        self.reference: RgbImage | None = None
        self.clashes: dict[int, str] = {}

    def _degrade(self, img: RgbImage, index: int) -> RgbImage:
        # noise depends on (seed, index) only, never on the worker count
        rng = np.random.default_rng([self.config.seed, index])
        img = underexpose(img, self.config.exposure)
        return add_gaussian_noise(img, self.config.noise_sigma, rng)

    def process_file(self, index: int, path: str) -> FileOutcome:
        """
        Enhances one file and writes <stem>.enhanced.png (and the intermediates if requested).
        Args:
            index (int): Position of the file in the batch; seeds its noise in compare mode.
            path (str): The input file.
        Returns:
            FileOutcome: The metrics line, or the error that stopped this file.
        """
        if index in self.clashes:
            return FileOutcome(path=path, error=f"Output name {output_stem(path)}.enhanced.png is already taken by "
                                                f"{self.clashes[index]}.")
        try:
            img = load_image(path)
            stem = output_stem(path)
            comparison = None
            if self.config.compare_mode:
                img = self._degrade(img, index)
                comparison = Evaluation(self.params, self.reference).run(img)
                result: EnhanceResult = comparison.result
            else:
                result = Pipeline(self.params).enhance_image(img)

            out_path = os.path.join(self.config.output_dir, f"{stem}.enhanced.png")
            save_image(result.output, out_path)
            if self.params.keep_intermediates:
                write_intermediates(result, self.config.output_dir, stem)

            extra = {
                "file": path,
                "output": out_path,
                "sigma_used": result.sigma_used,
                "threshold": result.threshold_used,
                "curve_fallback": result.curve_fallback,
            }
            if comparison is not None:
                extra.update(comparison.to_dict())
            line = metric_report(result.output, self.reference).to_line(**extra)
            return FileOutcome(path=path, line=line, comparison=comparison)
        except Exception as e:
            return FileOutcome(path=path, error=f"{type(e).__name__}: {e}")

    def run(self) -> int:
        """
        Processes every input.
        Returns:
            int: 0 if every input produced an output file, 1 otherwise.
        """
        files = collect_inputs(self.config.inputs)
        if not files:
            logging.error("BatchService: No input images found.")
            return 1
        os.makedirs(self.config.output_dir, exist_ok=True)
        self.clashes = find_stem_clashes(files)

        if self.config.compare_mode:
            try:
                self.reference = load_image(self.config.reference)
            except Exception as e:
                logging.error(f"BatchService: Error reading reference {self.config.reference}: {e}")
                return 1

        failures = 0
        total = len(files)
        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            # map yields in submission order whatever the completion order
            outcomes = pool.map(self.process_file, range(total), files)
            for idx, outcome in enumerate(outcomes, 1):
                print_progress_bar(idx, total)
                if not outcome.ok:
                    failures += 1
                    print(file=sys.stderr)
                    logging.error(f"BatchService: Error with {outcome.path}: {outcome.error}")
                    continue
                print(outcome.line, flush=True)
                if outcome.comparison is not None:
                    print_comparison_results(outcome.path, outcome.comparison.reports, REPORT_METRICS)
        print(file=sys.stderr)

        logging.info(f"BatchService: {total - failures}/{total} images enhanced.")
        return 0 if failures == 0 else 1


def run(config: CliConfig) -> int:
    """Runs the batch described by the configuration and returns the process exit code."""
    return BatchService(config).run()
