#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

"""
Serialization of measures and comparisons.

Densities go to CSV with the columns ``edge,x,density`` at 17 significant
digits, so that reading a file back gives the same doubles. Everything
else (atoms, currents, residuals, normalization) goes to JSON.
"""

import json
import pathlib
import typing as t
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .solver import ResidualReport
from .treemeasure import Measure


FLOAT_FORMAT = "%.17g"
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class MeasureReport:
    """A measure together with its residuals, ready to be written"""

    measure: Measure
    residuals: ResidualReport

    def table(self) -> pd.DataFrame:
        frames = [
            pd.DataFrame({"edge": edge_id, "x": self.measure.grids[edge_id],
                          "density": self.measure.densities[edge_id]})
            for edge_id in sorted(self.measure.grids)
        ]
        return pd.concat(frames, ignore_index=True)

    def summary(self) -> t.Dict[str, t.Any]:
        return {
            "method": self.measure.method,
            "normalization": float(self.measure.normalization),
            "atoms": {v: float(a) for v, a in sorted(self.measure.atoms.items())},
            "currents": {e: float(j) for e, j in sorted(self.measure.currents.items())},
            "residuals": self.residuals.as_dict(),
        }

    def to_json(self) -> str:
        document = self.summary()
        document["densities"] = {
            edge_id: {
                "x": self.measure.grids[edge_id].tolist(),
                "density": np.asarray(self.measure.densities[edge_id]).tolist(),
            }
            for edge_id in sorted(self.measure.grids)
        }
        return json.dumps(document, indent=2)

    def to_csv(self) -> str:
        return self.table().to_csv(index=False, float_format=FLOAT_FORMAT)

    def write(self, path: t.Union[str, pathlib.Path], fmt: str = "csv"):
        """Write the report; CSV output also gets a ``.summary.json`` companion"""
        path = pathlib.Path(path)
        if fmt == "json":
            path.write_text(self.to_json() + "\n", encoding="utf-8")
            return
        path.write_text(self.to_csv(), encoding="utf-8")
        companion = path.with_suffix(".summary.json")
        companion.write_text(json.dumps(self.summary(), indent=2) + "\n", encoding="utf-8")


def read_table(path: t.Union[str, pathlib.Path]) -> pd.DataFrame:
    """Read a density CSV back without losing precision"""
    return pd.read_csv(path, float_precision="round_trip", dtype={"edge": str})


def relative_difference(first: Measure, second: Measure) -> float:
    """Sup-norm distance between two measures on their common grid.

    Densities and atoms are compared together, relative to the largest
    density or atom of ``second``.
    """
    scale = max(
        max(float(np.max(np.abs(d))) for d in second.densities.values()),
        max((abs(a) for a in second.atoms.values()), default=0.0),
        1e-300,
    )
    gap = max(
        float(np.max(np.abs(np.asarray(first.densities[e]) - np.asarray(second.densities[e]))))
        for e in second.densities
    )
    gap = max([gap] + [abs(first.atoms[v] - second.atoms[v]) for v in second.atoms])
    return gap / scale
