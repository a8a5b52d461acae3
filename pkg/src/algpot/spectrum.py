"""Hessian spectra: clustering, diagonalizability, rational reconstruction.

Complex symmetric matrices need not be diagonalizable, and the admissibility
check downstream is only licensed for diagonalizable Hessians, so the verdict
here is explicit about its numeric margins: geometric multiplicities come
from singular values of H - lambda*I measured against tol*||H||, and any
singular value within a factor 10 of that threshold (or any two clusters
separated by less than 10*tol*||H||) marks the whole answer as uncertain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


def rationalize(x, tol: float = 1e-8, max_den: int = 10 ** 6):
    """Nearest fraction with a bounded denominator, or None.

    Continued-fraction reconstruction via Fraction.limit_denominator; the
    result must sit within tol of the input, and the imaginary part (if any)
    must be below tol as well.

    A plain error-below-tol check is vacuous for large denominator bounds:
    convergents of any real land within ~1/(q*max_den) of it, so pi itself
    would "reconstruct" at max_den = 10**6 and could later be mistaken for
    an exact eigenvalue.  The error budget therefore shrinks with the
    denominator of the candidate: accept only when |x - p/q| <= tol / q.
    Genuine small-denominator spectra pass with room to spare while
    high-denominator accidents are thrown out.
    """
    z = complex(x)
    if abs(z.imag) > tol:
        return None
    if not math.isfinite(z.real):
        return None
    f = Fraction(z.real).limit_denominator(max_den)
    if abs(float(f) - z.real) > tol / f.denominator:
        return None
    return f


@dataclass
class EigenCluster:
    value: complex
    multiplicity: int
    geometric_multiplicity: int
    diagonalizable: bool
    rational: Fraction | None
    gauge: str = ""  # "", "translation" or "rotation"

    @property
    def is_gauge(self) -> bool:
        return bool(self.gauge)


@dataclass
class Spectrum:
    clusters: list
    diagonalizable: bool
    uncertain: bool
    diag_margin: float  # min |log10(sigma/threshold)| over all rank decisions
    matrix_norm: float
    notes: list = field(default_factory=list)

    @property
    def eigenvalues(self):
        return [(c.value, c.multiplicity) for c in self.clusters]

    def total_multiplicity(self) -> int:
        return sum(c.multiplicity for c in self.clusters)


def _cluster(values, gap):
    """Greedy union of eigenvalues closer than gap; deterministic order."""
    order = sorted(range(len(values)), key=lambda i: (values[i].real, values[i].imag))
    groups = []
    for i in order:
        placed = False
        for g in groups:
            if any(abs(values[i] - values[j]) <= gap for j in g):
                g.append(i)
                placed = True
                break
        if not placed:
            groups.append([i])
    return groups


def eigen(H, tol: float = 1e-8, max_den: int = 10 ** 6,
          rational_tol: float | None = None) -> Spectrum:
    """Spectrum of a (generally complex symmetric) matrix with multiplicity."""
    H = np.asarray(H, dtype=complex)
    m = H.shape[0]
    if m == 0:
        return Spectrum(clusters=[], diagonalizable=True, uncertain=False,
                        diag_margin=math.inf, matrix_norm=0.0)
    norm = float(np.linalg.norm(H, 2))
    scale = max(1.0, norm)
    vals = np.linalg.eigvals(H)
    groups = _cluster(list(vals), tol * scale)

    clusters = []
    margin = math.inf
    uncertain = False
    diag_all = True
    rtol = tol if rational_tol is None else rational_tol
    for g in groups:
        rep = complex(np.mean([vals[i] for i in g]))
        mult = len(g)
        if mult == 1:
            geo = 1
            diag = True
        else:
            sing = np.linalg.svd(H - rep * np.eye(m), compute_uv=False)
            thresh = tol * scale
            geo = int(np.sum(sing <= thresh))
            for sv in sing:
                if sv <= 0:
                    continue
                r = abs(math.log10(sv / thresh))
                margin = min(margin, r)
                if r < 1.0:
                    uncertain = True
            if geo == 0:
                geo = 1
                uncertain = True
            geo = min(geo, mult)
            diag = geo == mult
        diag_all = diag_all and diag
        clusters.append(EigenCluster(
            value=rep, multiplicity=mult, geometric_multiplicity=geo,
            diagonalizable=diag, rational=rationalize(rep, rtol, max_den),
        ))

    # clusters separated by barely more than the clustering gap are suspect
    for i in range(len(clusters)):
        for j in range(i + 1, len(clusters)):
            d = abs(clusters[i].value - clusters[j].value)
            if d < 10 * tol * scale:
                uncertain = True

    clusters.sort(key=lambda c: (c.value.real, c.value.imag))
    return Spectrum(clusters=clusters, diagonalizable=diag_all,
                    uncertain=uncertain, diag_margin=margin, matrix_norm=norm)
