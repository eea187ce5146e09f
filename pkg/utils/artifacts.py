import hashlib
import json
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from config import APP_CONFIG

FLOAT_FORMAT = "%.17g"


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


class ArtifactWriter:
    """Writes CSV/SVG artifacts of one run and its manifest"""

    def __init__(self, out_dir, subcommand, config, seed, workers):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.subcommand = subcommand
        self.config = config
        self.seed = seed
        self.workers = workers
        self.artifacts = {}
        self.processing_log = []

    def write_csv(self, name, frame: pd.DataFrame):
        path = self.out_dir / name
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        self._register(name, path)
        self.log_operation(f"Wrote {name}: {len(frame)} rows")
        return path

    def write_svg(self, name, polylines, box, stroke_for=None, width=600, height=480):
        """Polylines in the z-plane; x maps Re z, y points up (Im z increases upwards)"""
        path = self.out_dir / name
        path.write_text(polylines_to_svg(polylines, box, stroke_for, width, height), encoding="utf-8")
        self._register(name, path)
        self.log_operation(f"Wrote {name}: {sum(len(v) for v in polylines.values())} polylines")
        return path

    def write_json(self, name, payload):
        path = self.out_dir / name
        path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n",
                        encoding="utf-8")
        self._register(name, path)
        return path

    def _register(self, name, path):
        self.artifacts[name] = sha256_file(path)

    def write_manifest(self, extra=None):
        """manifest.json: resolved config, seed, workers and artifact checksums.

        Only reproducible fields go in, so re-running from it gives identical files.
        """
        manifest = {
            "app": APP_CONFIG["name"],
            "version": APP_CONFIG["version"],
            "subcommand": self.subcommand,
            "seed": self.seed,
            "config": self.config,
            "artifacts": dict(sorted(self.artifacts.items())),
        }
        if extra:
            manifest["results"] = extra
        path = self.out_dir / "manifest.json"
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n",
                        encoding="utf-8")
        logger.info(f"manifest written to {path}")
        return path

    def log_operation(self, operation):
        timestamp = datetime.now().strftime("%H:%M:%S")
        self.processing_log.append(f"[{timestamp}] {operation}")
        logger.debug(operation)

    def get_processing_log(self):
        return self.processing_log


def _json_default(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(np.real(value)), float(np.imag(value))]
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


STROKES = ["#2E86AB", "#A23B72", "#F18F01", "#3B1F2B", "#44AF69", "#C73E1D"]


def polylines_to_svg(polylines, box, stroke_for=None, width=600, height=480):
    """polylines: {key: [complex arrays]}; box = (re_min, re_max, im_min, im_max)"""
    re0, re1, im0, im1 = box
    sx = width / (re1 - re0)
    sy = height / (im1 - im0)
    keys = list(polylines)
    stroke_for = stroke_for or {k: STROKES[i % len(STROKES)] for i, k in enumerate(keys)}
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">']
    for key in keys:
        for line in polylines[key]:
            pts = " ".join(f"{(z.real - re0) * sx:.4f},{(im1 - z.imag) * sy:.4f}" for z in line)
            parts.append(f'<polyline data-level="{key}" fill="none" stroke="{stroke_for[key]}" '
                         f'stroke-width="1" points="{pts}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
