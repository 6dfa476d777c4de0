"""On-disk form of operator tuples and the named fixtures.

A tuple directory holds ``manifest.json`` (dim, arity, labels, norm_p and
the operator file names) plus one coordinate file per operator in the
``rows cols`` / ``i j re im`` format of :func:`pnorm.dumps_coo`.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import optuple, pnorm, qfock, steiner

MANIFEST = "manifest.json"


def write_tuple(tup: optuple.OperatorTuple, directory) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    files = []
    for i, T in enumerate(tup.ops):
        name = f"op{i}.coo"
        (d / name).write_text(pnorm.dumps_coo(T))
        files.append(name)
    manifest = {
        "dim": tup.dim,
        "arity": tup.arity,
        "labels": list(tup.labels),
        "norm_p": "inf" if tup.norm_p == math.inf else repr(float(tup.norm_p)),
        "files": files,
    }
    (d / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n")
    return d


def read_tuple(directory) -> optuple.OperatorTuple:
    d = Path(directory)
    manifest = json.loads((d / MANIFEST).read_text())
    ops = [pnorm.loads_coo((d / f).read_text()).toarray() for f in manifest["files"]]
    if len(ops) != manifest["arity"]:
        raise ValueError("manifest arity does not match operator files")
    for T in ops:
        if T.shape != (manifest["dim"], manifest["dim"]):
            raise ValueError(f"operator shape {T.shape} disagrees with dim {manifest['dim']}")
    return optuple.OperatorTuple(ops, manifest["labels"], float(manifest["norm_p"]))


# -- fixtures ----------------------------------------------------------------------


def _fano_dixon():
    return optuple.dixon_tuple(steiner.fano_plane())


def _varopoulos_a3():
    return optuple.varopoulos_tuple(optuple.planar_120())


def _fock_d3_qm1():
    F = qfock.build_fock(3, -1.0)
    ops = [F.field_operator(F.basis_vector(i)) for i in range(3)]
    return optuple.OperatorTuple(ops, ["w(e1)", "w(e2)", "w(e3)"])


def _schur_2x2():
    A = np.array([[1.0, 0.5], [0.5, 1.0]])
    M = optuple.schur_multiplier(A).superoperator()
    return optuple.OperatorTuple([M, M.copy()], ["M_A", "M_B"])


FIXTURES = {
    "fano-dixon-k3n7": (_fano_dixon, "Dixon tuple of the Fano plane, all signs +1"),
    "varopoulos-a3": (_varopoulos_a3, "Varopoulos operators of three planar unit vectors at 120 degrees"),
    "fock-d3-qm1": (_fock_d3_qm1, "field operators on the fermionic Fock space over R^3"),
    "schur-dilation-2x2": (_schur_2x2, "Schur multipliers by [[1, .5], [.5, 1]] acting on 2x2 matrices"),
}


def fixture(name: str) -> optuple.OperatorTuple:
    try:
        build, _ = FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}") from None
    return build()
