"""JSON documents for filtered complexes, bicomplexes, their maps and windows.

Every document is checked against the schema of its kind in schemas/ before
it is decoded. Output is canonical: sorted keys, rationals as "a/b" strings
and Fp scalars as ints.
"""
import json
import os

import jsonschema
import singer
from singer import utils

from spectral_models import bicomplex, filtered
from spectral_models.bicomplex import BiMap, Bicomplex
from spectral_models.filtered import ChainMap, FilteredComplex
from spectral_models.linalg import QQ, DimensionMismatch, Field, FieldMismatch, Matrix
from spectral_models.tot import Window


class InputError(Exception):
    """An input document could not be read or does not fit its grammar."""

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = "{}: {}".format(location, message)
        super().__init__(message)


SCHEMAS = {}


def load_schema(name):
    if name not in SCHEMAS:
        root = os.path.dirname(os.path.realpath(__file__))
        path = os.path.join(root, 'schemas/{}.json'.format(name))
        SCHEMAS[name] = utils.load_json(path)
    return SCHEMAS[name]


def fixture_path(name):
    """Path of a shipped example document."""
    root = os.path.dirname(os.path.realpath(__file__))
    return os.path.join(root, 'fixtures/{}.json'.format(name))


def _pointer(path):
    return "/" + "/".join(str(x) for x in path)


def check_schema(document, name, where="<input>"):
    validator = jsonschema.Draft4Validator(load_schema(name))
    errors = sorted(validator.iter_errors(document), key=lambda e: [str(x) for x in e.path])
    if errors:
        error = errors[0]
        raise InputError(error.message, "{}#{}".format(where, _pointer(error.path)))


def read_json(path):
    try:
        return utils.load_json(path)
    except ValueError as e:
        raise InputError("malformed JSON: {}".format(getattr(e, "msg", e)),
                         "{} at byte {}".format(path, getattr(e, "pos", "?")))
    except OSError as e:
        raise InputError(e.strerror or str(e), path)


def parse_json(text, where="<string>"):
    try:
        return json.loads(text)
    except ValueError as e:
        raise InputError("malformed JSON: {}".format(getattr(e, "msg", e)),
                         "{} at byte {}".format(where, getattr(e, "pos", "?")))


def dumps(value):
    return json.dumps(value, sort_keys=True, indent=2)


def _field(document, field, where):
    if "field" not in document:
        return field or QQ
    declared = decode_field(document["field"], "{}#/field".format(where))
    if field is not None and declared != field:
        raise FieldMismatch("document is over {}, session over {}".format(declared.name, field.name))
    return declared


def decode_field(value, where="<input>"):
    """"Q" or {"Fp": N}; the flag spelling "Fp:N" is read as well."""
    try:
        if isinstance(value, dict):
            return Field(value["Fp"])
        return Field.parse(value)
    except ValueError as e:
        raise InputError(str(e), where)


def encode_field(field):
    if field.characteristic == 0:
        return "Q"
    return {"Fp": field.characteristic}


def _matrix(field, rows, nrows, ncols, where):
    try:
        return Matrix(field, nrows, ncols, rows)
    except DimensionMismatch:
        raise InputError("expected a {}x{} matrix".format(nrows, ncols), where)
    except (ValueError, ZeroDivisionError) as e:
        raise InputError("bad scalar: {}".format(e), where)


def _nonzero(matrices):
    return {key: m.to_lists() for key, m in matrices if not m.is_zero()}


# Filtered complexes and chain maps

def decode_filtered(document, field=None, where="<input>"):
    check_schema(document, "filtered_complex", where)
    field = _field(document, field, where)
    weights = {}
    for index, entry in enumerate(document["degrees"]):
        n = entry["n"]
        if n in weights:
            raise InputError("degree {} listed twice".format(n), "{}#/degrees/{}".format(where, index))
        if entry["dim"] != len(entry["weights"]):
            raise InputError("dim {} but {} weights".format(entry["dim"], len(entry["weights"])),
                             "{}#/degrees/{}/weights".format(where, index))
        weights[n] = entry["weights"]
    dims = {n: len(ws) for n, ws in weights.items()}
    differentials = {}
    for key, rows in document.get("differentials", {}).items():
        n = int(key)
        differentials[n] = _matrix(field, rows, dims.get(n + 1, 0), dims.get(n, 0),
                                   "{}#/differentials/{}".format(where, key))
    return filtered.checked(FilteredComplex(field, weights, differentials))


def encode_filtered(A):
    return {"field": encode_field(A.field),
            "degrees": [{"n": n, "dim": A.dim(n), "weights": list(A.weights(n))} for n in A.degrees],
            "differentials": _nonzero((str(n), A.differential(n)) for n in A.degrees)}


def decode_chain_map(document, field=None, where="<input>"):
    check_schema(document, "chain_map", where)
    field = _field(document, field, where)
    source = decode_filtered(document["source"], field, "{}#/source".format(where))
    target = decode_filtered(document["target"], field, "{}#/target".format(where))
    maps = {}
    for key, rows in document.get("maps", {}).items():
        n = int(key)
        maps[n] = _matrix(field, rows, target.dim(n), source.dim(n), "{}#/maps/{}".format(where, key))
    return filtered.checked_map(ChainMap(source, target, maps))


def encode_chain_map(f):
    return {"field": encode_field(f.field),
            "source": encode_filtered(f.source), "target": encode_filtered(f.target),
            "maps": _nonzero((str(n), f.map(n)) for n in f.degrees)}


# Bicomplexes and their maps

def _bidegree(key):
    i, j = key.split(",")
    return int(i), int(j)


def _cell_key(cell):
    return "{},{}".format(*cell)


def _arrows(field, document, name, dims, step, where):
    arrows = {}
    for key, rows in document.get(name, {}).items():
        i, j = _bidegree(key)
        arrows[(i, j)] = _matrix(field, rows, dims.get(step(i, j), 0), dims.get((i, j), 0),
                                 "{}#/{}/{}".format(where, name, key))
    return arrows


def decode_bicomplex(document, field=None, where="<input>"):
    check_schema(document, "bicomplex", where)
    field = _field(document, field, where)
    dims = {}
    for index, entry in enumerate(document["cells"]):
        cell = (entry["i"], entry["j"])
        if cell in dims:
            raise InputError("cell {} listed twice".format(_cell_key(cell)), "{}#/cells/{}".format(where, index))
        dims[cell] = entry["dim"]
    d0 = _arrows(field, document, "d0", dims, lambda i, j: (i, j + 1), where)
    d1 = _arrows(field, document, "d1", dims, lambda i, j: (i - 1, j), where)
    return bicomplex.checked(Bicomplex(field, dims, d0, d1))


def encode_bicomplex(A):
    return {"field": encode_field(A.field),
            "cells": [{"i": i, "j": j, "dim": A.dim(i, j)} for i, j in A.cells],
            "d0": _nonzero((_cell_key(c), A.vertical(*c)) for c in A.cells),
            "d1": _nonzero((_cell_key(c), A.horizontal(*c)) for c in A.cells)}


def decode_bimap(document, field=None, where="<input>"):
    check_schema(document, "bimap", where)
    field = _field(document, field, where)
    source = decode_bicomplex(document["source"], field, "{}#/source".format(where))
    target = decode_bicomplex(document["target"], field, "{}#/target".format(where))
    maps = {}
    for key, rows in document.get("maps", {}).items():
        cell = _bidegree(key)
        maps[cell] = _matrix(field, rows, target.dim(*cell), source.dim(*cell), "{}#/maps/{}".format(where, key))
    return bicomplex.checked_map(BiMap(source, target, maps))


def encode_bimap(f):
    return {"field": encode_field(f.field),
            "source": encode_bicomplex(f.source), "target": encode_bicomplex(f.target),
            "maps": _nonzero((_cell_key(c), f.component(*c)) for c in f.cells)}


# Windows

def decode_window(document, where="<input>"):
    if isinstance(document, str):
        try:
            return Window.parse(document)
        except ValueError as e:
            raise InputError(str(e), where)
    check_schema(document, "window", where)
    return Window(document["col_lo"], document["col_hi"], document.get("margin", 2))


# Dispatch

FLAVOR_FILTERED = "filtered"
FLAVOR_BICOMPLEX = "bicomplex"


def detect_flavor(document):
    """filtered or bicomplex, read from the document's shape."""
    body = document.get("source", document) if isinstance(document, dict) else None
    if not isinstance(body, dict):
        raise InputError("expected a JSON object")
    if "cells" in body:
        return FLAVOR_BICOMPLEX
    if "degrees" in body:
        return FLAVOR_FILTERED
    raise InputError("cannot tell a filtered complex from a bicomplex: neither 'degrees' nor 'cells' present")


def decode(document, field=None, flavor=None, where="<input>"):
    """A FilteredComplex, Bicomplex, ChainMap or BiMap, whichever the document holds."""
    flavor = flavor or detect_flavor(document)
    is_map = isinstance(document, dict) and "source" in document
    singer.log_debug("Decoding %s %s from %s", flavor, "map" if is_map else "object", where)
    if flavor == FLAVOR_FILTERED:
        return decode_chain_map(document, field, where) if is_map else decode_filtered(document, field, where)
    if flavor == FLAVOR_BICOMPLEX:
        return decode_bimap(document, field, where) if is_map else decode_bicomplex(document, field, where)
    raise InputError("unknown flavor {}".format(flavor), where)


def load(path, field=None, flavor=None):
    return decode(read_json(path), field, flavor, path)


def encode(value):
    if isinstance(value, FilteredComplex):
        return encode_filtered(value)
    if isinstance(value, ChainMap):
        return encode_chain_map(value)
    if isinstance(value, Bicomplex):
        return encode_bicomplex(value)
    if isinstance(value, BiMap):
        return encode_bimap(value)
    if isinstance(value, Window):
        return value.to_dict()
    raise TypeError("cannot encode {}".format(type(value).__name__))
