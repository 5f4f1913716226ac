"""forge: logarithmic Frobenius structures, quantum cohomology reconstruction,
Hodge asymptotics.

Thin convenience layer over the compiled module: every operation takes and
returns plain python objects; the JSON schemas match the CLI file formats.
"""

import json as _json

from . import _core

ForgeError = _core.ForgeError


def _dumps(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def check_fts(fts):
    return _json.loads(_core.check_fts(_dumps(fts)))


def fts_to_trtlep(fts, zbound=2):
    return _json.loads(_core.fts_to_trtlep(_dumps(fts), zbound))


def flatness(omega):
    return _json.loads(_core.flatness(_dumps(omega)))


def unfold(problem):
    return _json.loads(_core.unfold(_dumps(problem)))


def universal_unfold(fts, order=4, zbound=2):
    return _json.loads(_core.universal_unfold(_dumps(fts), order, zbound))


def qc_potential(model, gw, beta_cap, t_cap=()):
    return _json.loads(_core.qc_potential(_dumps(model), _dumps(gw), list(beta_cap), list(t_cap)))


def qc_wdvv(model, potential):
    return _json.loads(_core.qc_wdvv(_dumps(model), _dumps(potential)))


def qc_euler(model, potential):
    return _json.loads(_core.qc_euler(_dumps(model), _dumps(potential)))


def qc_reconstruct(model, seed, beta_cap, w=(), t_cap=()):
    return _json.loads(_core.qc_reconstruct(_dumps(model), _dumps(seed), list(beta_cap), list(w), list(t_cap)))


def qc_to_fts(model, potential, w=()):
    return _json.loads(_core.qc_to_fts(_dumps(model), _dumps(potential), list(w)))


def hodge_weight(pmhs):
    return _json.loads(_core.hodge_weight(_dumps(pmhs)))


def hodge_ipq(pmhs):
    return _json.loads(_core.hodge_ipq(_dumps(pmhs)))


def hodge_opposite(pmhs):
    return _json.loads(_core.hodge_opposite(_dumps(pmhs)))


def hodge_pmhs(pmhs):
    return _json.loads(_core.hodge_pmhs(_dumps(pmhs)))


def hodge_cone(pmhs, samples):
    return _core.hodge_cone(_dumps(pmhs), [list(s) for s in samples])


def hodge_to_fts(pmhs, order=4):
    return _json.loads(_core.hodge_to_fts(_dumps(pmhs), order))


def vphs_to_frobenius(pmhs, order=4):
    return _json.loads(_core.vphs_to_frobenius(_dumps(pmhs), order))
