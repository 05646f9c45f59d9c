"""Binary model container for fitted pipelines.

Layout (little endian):

    magic  b"RCMT"
    u32    container version (currently 1)
    u32    section count
    then per section:
        16 bytes  ascii tag, NUL padded
        u64       payload length
        payload

Sections: ``meta`` (JSON: pipeline config and class count),
``normalization`` (npz), ``reservoir`` (npz, CSR parts), ``projection``
(npz, only when dimensionality reduction was fitted), ``readout`` (npz).
Array payloads use the uncompressed npz format, so the container stays
self-describing without pickled objects.
"""

import io
import json
import struct

import numpy as np
import scipy.sparse as sp

from .dataset import ZscoreStats
from .dimred import Projection
from .errors import ParseError
from .pipeline import FittedPipeline, PipelineConfig
from .readout import MlpConfig, MlpReadout, RidgeModel
from .reservoir import Reservoir, ReservoirConfig

MAGIC = b"RCMT"
VERSION = 1


def _npz_bytes(**arrays):
    buf = io.BytesIO()
    np.savez(buf, **arrays)
    return buf.getvalue()


def _npz_load(payload):
    return dict(np.load(io.BytesIO(payload), allow_pickle=False))


def _config_to_dict(config):
    res = config.reservoir
    meta = {
        "reservoir": {
            "units": res.units, "rho": res.rho,
            "connectivity": res.connectivity,
            "input_scaling": res.input_scaling, "noise": res.noise,
            "seed": res.seed, "bidirectional": res.bidirectional,
        },
        "dimred_enabled": config.dimred_enabled,
        "d": config.d,
        "dimred_mode": config.dimred_mode,
        "dimred_centered": config.dimred_centered,
        "representation": config.representation,
        "model_lam": config.model_lam,
        "readout": config.readout,
        "readout_lam": config.readout_lam,
        "seeds": list(config.seeds),
        "threads": config.threads,
    }
    if config.mlp is not None:
        m = config.mlp
        meta["mlp"] = {
            "hidden": list(m.hidden), "activation": m.activation,
            "maxout_k": m.maxout_k, "p_drop": m.p_drop, "l2": m.l2,
            "epochs": m.epochs, "step": m.step, "beta1": m.beta1,
            "beta2": m.beta2, "eps": m.eps, "seed": m.seed,
            "batch_size": m.batch_size,
        }
    return meta


def _config_from_dict(meta):
    mlp = None
    if "mlp" in meta:
        m = dict(meta["mlp"])
        m["hidden"] = tuple(m["hidden"])
        mlp = MlpConfig(**m)
    return PipelineConfig(
        reservoir=ReservoirConfig(**meta["reservoir"]),
        dimred_enabled=meta["dimred_enabled"], d=meta["d"],
        dimred_mode=meta["dimred_mode"],
        dimred_centered=meta["dimred_centered"],
        representation=meta["representation"], model_lam=meta["model_lam"],
        readout=meta["readout"], readout_lam=meta["readout_lam"],
        mlp=mlp, seeds=tuple(meta["seeds"]), threads=meta["threads"])


def to_bytes(fitted):
    """Serialize a FittedPipeline to the container format."""
    sections = []
    meta = {
        "config": _config_to_dict(fitted.config),
        "num_classes": fitted.num_classes,
    }
    sections.append((b"meta", json.dumps(meta, sort_keys=True).encode()))
    sections.append((b"normalization", _npz_bytes(
        mean=fitted.stats.mean, std=fitted.stats.std)))
    res = fitted.reservoir
    w_r = res.w_r.tocsr()
    sections.append((b"reservoir", _npz_bytes(
        w_in=res.w_in, data=w_r.data, indices=w_r.indices,
        indptr=w_r.indptr, shape=np.array(w_r.shape))))
    if fitted.projection is not None:
        p = fitted.projection
        sections.append((b"projection", _npz_bytes(
            matrix=p.matrix, eigenvalues=p.eigenvalues,
            mean=p.mean, mode=np.array(p.mode),
            fitted_feature_dim=np.array(p.fitted_feature_dim))))
    model = fitted.readout_model
    if isinstance(model, RidgeModel):
        sections.append((b"readout", _npz_bytes(
            kind=np.array("ridge"), weights=model.weights, bias=model.bias,
            lam=np.array(model.lam))))
    else:
        arrays = {"kind": np.array("mlp"),
                  "layers": np.array(len(model.params)),
                  "input_dim": np.array(model.input_dim)}
        for i, (w, b) in enumerate(model.params):
            arrays[f"w{i}"] = w
            arrays[f"b{i}"] = b
        sections.append((b"readout", _npz_bytes(**arrays)))

    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<II", VERSION, len(sections)))
    for tag, payload in sections:
        out.write(tag.ljust(16, b"\x00"))
        out.write(struct.pack("<Q", len(payload)))
        out.write(payload)
    return out.getvalue()


def from_bytes(blob):
    """Rebuild a FittedPipeline from container bytes."""
    if len(blob) < 12 or blob[:4] != MAGIC:
        raise ParseError("not a model container (bad magic)")
    version, count = struct.unpack("<II", blob[4:12])
    if version != VERSION:
        raise ParseError(f"unsupported container version {version}")
    pos = 12
    sections = {}
    for _ in range(count):
        if pos + 24 > len(blob):
            raise ParseError("truncated section header")
        tag = blob[pos:pos + 16].rstrip(b"\x00").decode("ascii")
        (length,) = struct.unpack("<Q", blob[pos + 16:pos + 24])
        pos += 24
        if pos + length > len(blob):
            raise ParseError(f"truncated payload for section {tag!r}")
        sections[tag] = blob[pos:pos + length]
        pos += length
    for required in ("meta", "normalization", "reservoir", "readout"):
        if required not in sections:
            raise ParseError(f"missing section {required!r}")

    meta = json.loads(sections["meta"].decode())
    config = _config_from_dict(meta["config"])

    norm = _npz_load(sections["normalization"])
    stats = ZscoreStats(mean=norm["mean"], std=norm["std"])

    rsv = _npz_load(sections["reservoir"])
    shape = tuple(int(v) for v in rsv["shape"])
    w_r = sp.csr_array((rsv["data"], rsv["indices"], rsv["indptr"]),
                       shape=shape)
    reservoir = Reservoir(w_in=rsv["w_in"], w_r=w_r,
                          config=config.reservoir,
                          input_dim=rsv["w_in"].shape[1])

    projection = None
    if "projection" in sections:
        p = _npz_load(sections["projection"])
        projection = Projection(
            matrix=p["matrix"], eigenvalues=p["eigenvalues"],
            mean=p["mean"], mode=str(p["mode"]),
            fitted_feature_dim=int(p["fitted_feature_dim"]))

    r = _npz_load(sections["readout"])
    kind = str(r["kind"])
    if kind == "ridge":
        model = RidgeModel(weights=r["weights"], bias=r["bias"],
                           lam=float(r["lam"]))
    elif kind == "mlp":
        layers = int(r["layers"])
        params = [(r[f"w{i}"], r[f"b{i}"]) for i in range(layers)]
        model = MlpReadout(params=params,
                           config=config.mlp or MlpConfig(),
                           input_dim=int(r["input_dim"]),
                           num_classes=int(meta["num_classes"]))
    else:
        raise ParseError(f"unknown readout kind {kind!r}")

    return FittedPipeline(config=config, stats=stats, reservoir=reservoir,
                          projection=projection, readout_model=model,
                          num_classes=int(meta["num_classes"]))


def save_model(fitted, path):
    """Write the container to a file."""
    with open(path, "wb") as fh:
        fh.write(to_bytes(fitted))


def load_model(path):
    """Read a container file back into a FittedPipeline."""
    with open(path, "rb") as fh:
        return from_bytes(fh.read())
