"""JSON documents for masks, frames and reports.

Complex numbers are ``[re, im]`` pairs; floats go through ``repr`` so every
value round-trips exactly and output is byte-stable.
"""
from __future__ import annotations

import json

import numpy as np

from .frame import FrameSystem, WaveletSpec, build_wavelet_masks
from .group import CharCoset, Params, coset_cells
from .mask import Classification, MaskSolution, mask_values
from .step import Spectrum


class DocumentError(ValueError):
    pass


def cpairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex)]


def from_pairs(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DocumentError("expected a list of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def dumps(doc) -> str:
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def mask_document(sol: MaskSolution, phi_hat: Spectrum) -> dict:
    P = sol.params
    return {
        "p": P.p,
        "N": P.N,
        "M": P.M,
        "zeros": sorted(sol.zeros),
        "pins": [[int(k), [v.real, v.imag]] for k, v in sorted(sol.pins.items())],
        "classification": sol.classification.value,
        "beta": cpairs(sol.beta),
        "lambda": cpairs(sol.lam),
        "phiHat": cpairs(phi_hat.values),
    }


def load_mask(doc: dict) -> tuple[MaskSolution, Spectrum]:
    try:
        P = Params(int(doc["p"]), int(doc["N"]), int(doc["M"]))
        beta = from_pairs(doc["beta"])
        lam = from_pairs(doc["lambda"])
        phi = Spectrum(P.p, P.N, P.M, from_pairs(doc["phiHat"]))
        cls = Classification(doc["classification"])
        zeros = frozenset(int(z) for z in doc["zeros"])
        pins = {int(k): complex(v[0], v[1]) for k, v in doc.get("pins", [])}
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"malformed mask document: {exc}") from exc
    if beta.size != P.n_beta or lam.size != P.n_nodes:
        raise DocumentError("beta/lambda lengths do not match (p, N, M)")
    sol = MaskSolution(P, zeros, beta, lam, cls, pins, mask_values(beta, P))
    return sol, phi


def frame_document(fs: FrameSystem, mask_doc: dict) -> dict:
    P = fs.params
    wavelets = []
    for w in fs.wavelets:
        cells = coset_cells(w.E, -P.N, P.M + 1)
        wavelets.append({
            "s": w.s,
            "t": w.t,
            "digits": list(w.E.digits),
            "maskCells": cpairs(w.mask_cells[cells]),
        })
    return {"mask": mask_doc, "q": fs.q, "l": fs.l, "wavelets": wavelets}


def load_frame(doc: dict) -> FrameSystem:
    try:
        sol, phi = load_mask(doc["mask"])
        P = sol.params
        family = [(CharCoset(-int(w["s"]), tuple(int(d) for d in w["digits"]), P.p), int(w["t"]))
                  for w in doc["wavelets"]]
        stored = [from_pairs(w["maskCells"]) for w in doc["wavelets"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"malformed frame document: {exc}") from exc
    wavelets = []
    for (E, t), cells_vals in zip(family, stored):
        try:
            cells = coset_cells(E, -P.N, P.M + 1)
        except Exception as exc:
            raise DocumentError(f"wavelet coset outside the window: {exc}") from exc
        if cells.size != cells_vals.size:
            raise DocumentError("maskCells length does not match the coset")
        m = np.zeros(P.n_nodes, dtype=complex)
        m[cells] = cells_vals
        ind = np.zeros(P.n_nodes, dtype=complex)
        ind[cells] = 1
        wavelets.append(WaveletSpec(E, t, m, Spectrum(P.p, P.N, P.M + 1, ind)))
    return FrameSystem(P, sol, phi, wavelets)


def rebuild_masks(fs: FrameSystem) -> list[WaveletSpec]:
    """Recompute the wavelet masks from the stored family (consistency aid)."""
    return build_wavelet_masks(fs.phi_hat, [(w.E, w.t) for w in fs.wavelets])
