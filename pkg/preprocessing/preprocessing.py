import logging
import os

import pandas as pd

from evaluation.metrics import luma_stats
from imagecore.image_io import load_image, save_image
from preprocessing.degradation_funcs import degrade
from preprocessing.scene_funcs import SCENE_KINDS, make_scene
from services.command_line_service import print_progress_bar

IMAGE_SUFFIXES = (".png", ".ppm")


class Preprocessing:
    """
    Builds synthetic experiment corpora: clean ground truths and their underexposed, noisy observations.
    """

    @staticmethod
    def create_sample(count: int, output_path: str, size: int, exposure: float, noise_sigma: float,
                      seed: int) -> None:
        """
        Writes count pairs <name>.gt.png / <name>.dark.png into the output directory, cycling over all scene kinds.
        Args:
            count (int): Number of image pairs to create.
            output_path (str): Output directory, created if missing.
            size (int): Width and height of the scenes.
            exposure (float): Exposure factor of the observations.
            noise_sigma (float): Noise standard deviation of the observations.
            seed (int): Base seed; pair k uses seed + k.
        Raises:
            ValueError: If count is smaller than 1.
        """
        if count < 1:
            raise ValueError("Number of images must be at least 1.")
        os.makedirs(output_path, exist_ok=True)

        print(f"Creating {count} synthetic pairs in {output_path}")
        for k in range(count):
            print_progress_bar(k, count)
            kind = SCENE_KINDS[k % len(SCENE_KINDS)]
            name = f"{kind}_{k:04d}"
            clean = make_scene(kind, size=size, seed=seed + k)
            dark = degrade(clean, exposure=exposure, noise_sigma=noise_sigma, seed=seed + k)
            save_image(clean, os.path.join(output_path, f"{name}.gt.png"))
            save_image(dark, os.path.join(output_path, f"{name}.dark.png"))
        print_progress_bar(count, count)
        print("\nSample creation finished. Output saved to:", output_path)

    @staticmethod
    def sample_stats(input_path: str) -> pd.DataFrame:
        """
        Prints luma statistics (mean, standard deviation, estimated noise) of every image in a directory.
        Args:
            input_path (str): Directory with PNG or PPM images.
        Returns:
            pd.DataFrame: One row per readable image.
        Raises:
            FileNotFoundError: If the directory does not exist.
        """
        if not os.path.isdir(input_path):
            raise FileNotFoundError(f"Directory not found: {input_path}")
        rows = []
        for filename in sorted(os.listdir(input_path)):
            if not filename.lower().endswith(IMAGE_SUFFIXES):
                continue
            try:
                mean_luma, std_luma, sigma = luma_stats(load_image(os.path.join(input_path, filename)))
            except Exception as e:
                logging.error(f"Preprocessing: Error while reading {filename}: {e}")
                continue
            rows.append({"file": filename, "mean_luma": mean_luma, "std_luma": std_luma, "sigma_estimate": sigma})
        df = pd.DataFrame(rows, columns=["file", "mean_luma", "std_luma", "sigma_estimate"])
        if df.empty:
            print("The directory contains no images.")
            return df
        print(f"Statistics of images in '{input_path}':")
        print(df.to_string(index=False, float_format=lambda v: f"{v:.4f}"))
        return df
