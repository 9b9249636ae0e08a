#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

"""
Model configuration files.

A model is one JSON document with the sections ``graph``, ``coefficients``,
``vertices``, ``numerics`` and, optionally, ``scaling``. Importable
functions include:

* parse_config
* load_config
* load_example
* diagnose
* parse_chain
* load_chain

Problems are reported as ``ConfigError`` with a dotted location such as
``coefficients.e1.sigma``.
"""

import importlib.resources
import json
import logging
import pathlib
import typing as t
from dataclasses import dataclass, fields

from .coeffs import Diffusion, EdgeProfile, Numerics, VertexParams, parse
from .discrete import FiniteChain
from .errors import ArboristError, CoefficientError, ConfigError, ExpressionError, GraphError
from .graph import Germ, MetricGraph, Side, build_graph


logger = logging.getLogger(__name__)

SECTIONS = ("graph", "coefficients", "vertices", "numerics", "scaling")
EXAMPLES = ("ring", "interval", "theta", "theta_reversible", "chain")


@dataclass(frozen=True)
class ScalingConfig:
    """Settings of a ring scaling study"""

    fields: t.Tuple[str, ...] = ("s", "mean")
    c: float = 1.0
    sizes: t.Tuple[int, ...] = (100, 200, 400, 800)


@dataclass(frozen=True)
class ModelConfig:
    """A validated model.

    Attributes:
        diffusion: graph, coefficients, vertex parameters and numerics
        scaling: ring scaling settings
        source: where the document came from
    """

    diffusion: Diffusion
    scaling: ScalingConfig
    source: str = "<config>"

    @property
    def graph(self) -> MetricGraph:
        return self.diffusion.graph

    @property
    def numerics(self) -> Numerics:
        return self.diffusion.numerics


class _Builder:
    """Builds a ModelConfig section by section, collecting every problem"""

    def __init__(self, document: t.Any):
        self.document = document
        self.errors: t.List[ConfigError] = []

    def fail(self, message: str, location: str):
        self.errors.append(ConfigError(message, location))

    def section(self, name: str, required: bool = False) -> t.Mapping[str, t.Any]:
        value = self.document.get(name, None)
        if value is None:
            if required:
                self.fail("missing section", name)
            return {}
        if not isinstance(value, dict):
            self.fail(f"expected an object, got {type(value).__name__}", name)
            return {}
        return value

    def numerics(self) -> Numerics:
        raw = self.section("numerics")
        known = {f.name for f in fields(Numerics)}
        for key in sorted(set(raw) - known):
            self.fail("unknown setting", f"numerics.{key}")
        try:
            return Numerics(**{k: v for k, v in raw.items() if k in known})
        except ConfigError as err:
            self.errors.append(err)
        except TypeError as err:
            self.fail(str(err), "numerics")
        return Numerics()

    def graph(self) -> t.Optional[MetricGraph]:
        raw = self.section("graph", required=True)
        if not isinstance(self.document.get("graph"), dict):
            return None
        before = len(self.errors)
        for key in ("vertices", "edges"):
            if not isinstance(raw.get(key, []), list):
                self.fail(f"expected a list, got {type(raw[key]).__name__}", f"graph.{key}")
        if len(self.errors) > before:
            return None
        for i, edge in enumerate(raw.get("edges", [])):
            if not isinstance(edge, dict):
                self.fail("expected an object", f"graph.edges[{i}]")
                return None
            for key in ("id", "length", "tail", "head"):
                if key not in edge:
                    self.fail("missing field", f"graph.edges[{i}].{key}")
            if "length" in edge and not isinstance(edge["length"], (int, float)):
                self.fail(f"length must be a number, got {edge['length']!r}",
                          f"graph.edges[{i}].length")
        if len(self.errors) > before:
            return None
        try:
            return build_graph(raw)
        except GraphError as err:
            self.fail(str(err), "graph")
        return None

    def profiles(self, graph: MetricGraph, numerics: Numerics) -> t.Dict[str, EdgeProfile]:
        raw = self.section("coefficients")
        for edge_id in sorted(set(raw) - set(graph.edge_ids)):
            self.fail("no such edge", f"coefficients.{edge_id}")
        profiles = {}
        for edge in graph.edges:
            entry = raw.get(edge.id, {})
            if not isinstance(entry, dict):
                self.fail("expected an object with 'b' and 'sigma'", f"coefficients.{edge.id}")
                continue
            for key in sorted(set(entry) - {"b", "sigma"}):
                self.fail("unknown coefficient", f"coefficients.{edge.id}.{key}")
            parsed = {}
            for key, default in (("b", "0"), ("sigma", "1")):
                text = entry.get(key, default)
                try:
                    parsed[key] = parse(str(text))
                except ExpressionError as err:
                    self.fail(str(err), f"coefficients.{edge.id}.{key}")
            if len(parsed) < 2:
                continue
            try:
                profiles[edge.id] = EdgeProfile(edge, parsed["b"], parsed["sigma"], numerics)
            except CoefficientError as err:
                location = "sigma" if "sigma" in str(err) else "b"
                self.fail(str(err), f"coefficients.{edge.id}.{location}")
        return profiles

    def _germs(self, graph: MetricGraph, vertex: str, key: str, location: str) -> t.List[Germ]:
        edge_id, _, side = key.partition(".")
        incident = [g for g in graph.germs(vertex) if g.edge == edge_id]
        if not incident:
            self.fail(f"edge '{edge_id}' is not incident to vertex '{vertex}'", location)
            return []
        if not side:
            return incident
        if side not in (Side.TAIL.value, Side.HEAD.value):
            self.fail(f"germ side must be 'tail' or 'head', got '{side}'", location)
            return []
        chosen = [g for g in incident if g.side.value == side]
        if not chosen:
            self.fail(f"vertex '{vertex}' is not the {side} of edge '{edge_id}'", location)
        return chosen

    def params(self, graph: MetricGraph) -> t.Optional[VertexParams]:
        raw = self.section("vertices")
        before = len(self.errors)
        alpha, germ_alpha, K = {}, {}, {}
        for vertex, entry in sorted(raw.items()):
            location = f"vertices.{vertex}"
            if vertex not in graph.vertices:
                self.fail("no such vertex", location)
                continue
            if not isinstance(entry, dict):
                self.fail("expected an object", location)
                continue
            for key in sorted(set(entry) - {"alpha", "alpha_edges", "K"}):
                self.fail("unknown setting", f"{location}.{key}")
            if "alpha" in entry:
                alpha[vertex] = entry["alpha"]
                if not (isinstance(entry["alpha"], (int, float)) and entry["alpha"] >= 0):
                    self.fail(f"alpha must be a nonnegative number, got {entry['alpha']!r}",
                              f"{location}.alpha")
            if "K" in entry:
                K[vertex] = entry["K"]
                if not (isinstance(entry["K"], (int, float)) and entry["K"] > 0):
                    self.fail(f"K must be a positive number, got {entry['K']!r}", f"{location}.K")
            weights = entry.get("alpha_edges", {})
            if not isinstance(weights, dict):
                self.fail("expected an object", f"{location}.alpha_edges")
                weights = {}
            for key, weight in sorted(weights.items()):
                where = f"{location}.alpha_edges.{key}"
                for germ in self._germs(graph, vertex, key, where):
                    germ_alpha[germ] = weight
                if not (isinstance(weight, (int, float)) and weight > 0):
                    self.fail(f"germ weight must be a positive number, got {weight!r}", where)

        def numeric(value: t.Any) -> float:
            return float(value) if isinstance(value, (int, float)) else 1.0

        total = {
            v: numeric(alpha.get(v, 0.0)) + sum(numeric(germ_alpha.get(g, 1.0)) for g in graph.germs(v))
            for v in graph.vertices
        }
        for vertex, value in total.items():
            if not value > 0:
                self.fail("alpha and the germ weights must not all vanish", f"vertices.{vertex}")
        if len(self.errors) > before:
            return None
        try:
            return VertexParams.build(graph, alpha, germ_alpha, K)
        except CoefficientError as err:
            self.fail(str(err), "vertices")
        return None

    def scaling(self) -> ScalingConfig:
        raw = self.section("scaling")
        default = ScalingConfig()
        try:
            sizes = tuple(int(n) for n in raw.get("N", default.sizes))
            c = float(raw.get("c", default.c))
        except (TypeError, ValueError) as err:
            self.fail(str(err), "scaling")
            return default
        if any(n < 3 for n in sizes):
            self.fail(f"lattice sizes must be at least 3, got {list(sizes)}", "scaling.N")
        if not c > 0:
            self.fail(f"c must be positive, got {c}", "scaling.c")
        fields_ = raw.get("fields", default.fields)
        if not isinstance(fields_, (list, tuple)):
            self.fail(f"expected a list, got {type(fields_).__name__}", "scaling.fields")
            fields_ = default.fields
        fields_ = tuple(str(f) for f in fields_)
        for i, field_ in enumerate(fields_):
            if field_ not in ("s", "mean"):
                try:
                    parse(field_)
                except ExpressionError as err:
                    self.fail(str(err), f"scaling.fields[{i}]")
        return ScalingConfig(fields_, c, sizes)

    def build(self, source: str) -> t.Optional[ModelConfig]:
        if not isinstance(self.document, dict):
            self.fail("a model configuration must be a JSON object", "")
            return None
        for name in sorted(set(self.document) - set(SECTIONS)):
            self.fail("unknown section", name)
        numerics = self.numerics()
        scaling = self.scaling()
        graph = self.graph()
        if graph is None:
            return None
        profiles = self.profiles(graph, numerics)
        params = self.params(graph)
        if self.errors or params is None:
            return None
        return ModelConfig(Diffusion(graph, profiles, params, numerics), scaling, source)


def diagnose(document: t.Any) -> t.List[ConfigError]:
    """Every problem found in a model document, in section order"""
    builder = _Builder(document)
    builder.build("<config>")
    return builder.errors


def parse_config(document: t.Any, source: str = "<config>") -> ModelConfig:
    """Validate a parsed JSON document and build the model.

    Raises:
        ConfigError: the first problem found; all of them are logged at
            debug level
    """
    builder = _Builder(document)
    config = builder.build(source)
    if builder.errors:
        for err in builder.errors:
            logger.debug("%s: %s", source, err)
        raise builder.errors[0]
    return config


def read_json(path: t.Union[str, pathlib.Path]) -> t.Any:
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path} is not valid JSON: {err.msg} (line {err.lineno})") from None


def load_config(path: t.Union[str, pathlib.Path]) -> ModelConfig:
    """Read and validate a model configuration file"""
    return parse_config(read_json(path), source=str(path))


def example_text(name: str) -> str:
    """Source of a bundled example configuration"""
    if name not in EXAMPLES:
        raise ConfigError(f"no example named '{name}'; choose from {list(EXAMPLES)}")
    resource = importlib.resources.files("arborist") / "data" / f"{name}.json"
    return resource.read_text(encoding="utf-8")


def load_example(name: str) -> ModelConfig:
    """Load one of the bundled example models (``ring``, ``interval``, ``theta``,
    ``theta_reversible``)"""
    return parse_config(json.loads(example_text(name)), source=f"example:{name}")


def parse_chain(document: t.Any) -> FiniteChain:
    """Build a finite chain from ``{"states": [...], "rates": [{"from", "to", "rate"}]}``

    Raises:
        ConfigError: malformed document or an invalid chain
    """
    if not isinstance(document, dict) or "rates" not in document:
        raise ConfigError("a chain needs a 'rates' list", "rates")
    rates = {}
    for i, entry in enumerate(document["rates"]):
        try:
            rates[entry["from"], entry["to"]] = float(entry["rate"])
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError(f"expected from/to/rate, got {entry!r} ({err})", f"rates[{i}]")
    try:
        return FiniteChain.build(rates, states=document.get("states"))
    except ArboristError as err:
        raise ConfigError(str(err), "rates") from None


def load_chain(path: t.Union[str, pathlib.Path]) -> FiniteChain:
    return parse_chain(read_json(path))
