"""Discrete-action machinery: CC-vector enumeration, candidate selection,
round-robin RB allocation and the uniform per-RB power split.

Extended CC-selection vector layout, per UE (UE-major concatenation):
    [pcc, scc_si bit 0 .. bit n_m-1, cc2, ..., cc_{M-1}]
so each UE owns M + n_m - 1 bits; bit 0 is the always-on PCC.
"""

import numpy as np

from .config import SI_SCC
from .errors import CasimError, ConstraintViolation

ENUM_GUARD_BITS = 16            # exhaustive search stays tractable below this


class CcVectorSet:
    """All binary CC-selection vectors for one gNB plus the PCC-constrained subset."""

    def __init__(self, m, k_b, n_m):
        if m < 1 or k_b < 1 or n_m < 1:
            raise CasimError("need m, k_b, n_m >= 1")
        self.m = m
        self.k_b = k_b
        self.n_m = n_m
        self.bits_per_ue = m + n_m - 1
        bits = self.bits_per_ue * k_b
        if bits > ENUM_GUARD_BITS:
            raise CasimError(
                f"CC vector space of {bits} bits exceeds the {ENUM_GUARD_BITS}-bit "
                "exhaustive-enumeration guard")
        self.num_bits = bits
        count = 1 << bits
        idx = np.arange(count, dtype=np.uint32)
        self.vectors = ((idx[:, None] >> np.arange(bits, dtype=np.uint32)) & 1).astype(np.int8)
        pcc_cols = [u * self.bits_per_ue for u in range(k_b)]
        mask = np.all(self.vectors[:, pcc_cols] == 1, axis=1)
        self.constrained_idx = np.nonzero(mask)[0]

    def constrained(self, active=None):
        """Indices of admissible vectors: PCC bit 1 for every active UE, all bits
        0 for inactive UEs. With active=None every UE counts as active."""
        if active is None:
            return self.constrained_idx
        keep = np.ones(len(self.vectors), dtype=bool)
        for u, is_active in enumerate(active):
            cols = slice(u * self.bits_per_ue, (u + 1) * self.bits_per_ue)
            if is_active:
                keep &= self.vectors[:, u * self.bits_per_ue] == 1
            else:
                keep &= np.all(self.vectors[:, cols] == 0, axis=1)
        return np.nonzero(keep)[0]

    def ue_bits(self, vec, u):
        return vec[u * self.bits_per_ue:(u + 1) * self.bits_per_ue]

    def si_scc_bits(self, vec, u):
        """The n_m resolution bits of the SI-causing SCC for UE u."""
        base = u * self.bits_per_ue
        return vec[base + 1:base + 1 + self.n_m]

    def cc_active(self, vec, u, cc):
        """CC activation alpha[u, cc] implied by the extended vector."""
        base = u * self.bits_per_ue
        if cc == 0:
            return int(vec[base])
        if cc == SI_SCC:
            return int(self.si_scc_bits(vec, u).any())
        # CCs after the SI SCC sit behind its n_m-bit block
        return int(vec[base + self.n_m + cc - 1])


def enumerate_cc_vectors(m, k_b, n_m):
    """Exhaustive, duplicate-free vector set (guarded at 16 decision bits)."""
    return CcVectorSet(m, k_b, n_m)


def rb_units_per_bit(n_max, k, n_m):
    """RBs granted per set resolution bit on the SI SCC.

    Returns ("uniform", n_a) when n_max divides evenly over k*n_m bits, else
    ("round_robin", None): the n_max RBs are then shared as evenly as possible
    among whichever bits are set, earlier bits taking the remainder.
    """
    if n_max < 1 or k < 1 or n_m < 1:
        raise CasimError("need n_max, k, n_m >= 1")
    if n_max % (k * n_m) == 0:
        return ("uniform", n_max // (k * n_m))
    return ("round_robin", None)


def _share_counts(n_rbs, n_units):
    """Split n_rbs over n_units as evenly as possible, first units get the extra."""
    base, extra = divmod(n_rbs, n_units)
    return [base + 1 if i < extra else base for i in range(n_units)]


def allocate_rbs(alpha_ext, cfg, ues=None, active=None):
    """Round-robin RB allocation for one gNB given its extended CC vector.

    PCC RBs are split equally over the gNB's active UEs; the SI SCC follows the
    resolution rule (rb_units_per_bit); any further SCCs split their RBs evenly
    over the UEs whose bit is set. Returns an RbPlan over the gNB's UEs.
    """
    vset = CcVectorSet(cfg.num_ccs, len(ues) if ues is not None else cfg.num_ues,
                       cfg.rb_resolution)
    alpha_ext = np.asarray(alpha_ext, dtype=np.int8)
    if alpha_ext.shape != (vset.num_bits,):
        raise CasimError(f"alpha vector must have {vset.num_bits} bits")
    if ues is None:
        ues = list(range(cfg.num_ues))
    if active is None:
        active = [True] * len(ues)
    n_max = cfg.rbs_per_cc
    k_act = sum(bool(a) for a in active)
    counts = np.zeros((len(ues), cfg.num_ccs), dtype=np.int32)
    chunks = [[(0, 0)] * cfg.num_ccs for _ in ues]

    def assign(cc, grants):
        # grants: list of (local ue index, rb count); consecutive from RB 0
        cursor = 0
        for u, n in grants:
            if n > 0:
                counts[u, cc] += n
                start, stop = chunks[u][cc]
                if stop > start:            # extend the UE's existing block
                    chunks[u][cc] = (start, stop + n)
                else:
                    chunks[u][cc] = (cursor, cursor + n)
            cursor += n

    active_locals = [u for u in range(len(ues)) if active[u]]
    if k_act:
        assign(0, [(u, n) for u, n in zip(active_locals, _share_counts(n_max, k_act))
                   if alpha_ext[u * vset.bits_per_ue]])
    for cc in range(1, cfg.num_ccs):
        if cc == SI_SCC and vset.n_m > 1:
            set_bits = [(u, j) for u in active_locals
                        for j in range(vset.n_m) if vset.si_scc_bits(alpha_ext, u)[j]]
            if not set_bits:
                continue
            rule, n_a = rb_units_per_bit(n_max, max(k_act, 1), vset.n_m)
            if rule == "uniform":
                per_bit = [n_a] * len(set_bits)
            else:
                per_bit = _share_counts(n_max, len(set_bits))
            assign(cc, [(u, n) for (u, _), n in zip(set_bits, per_bit)])
        else:
            setters = [u for u in active_locals if vset.cc_active(alpha_ext, u, cc)]
            if not setters:
                continue
            assign(cc, list(zip(setters, _share_counts(n_max, len(setters)))))
    return RbPlan(counts, chunks, cfg.num_ccs, n_max)


class RbPlan:
    """RB counts and contiguous index ranges per (UE, CC) for one gNB."""

    def __init__(self, counts, chunks, num_ccs, n_max):
        self.rb_counts = counts          # (ues, ccs) int
        self.chunks = chunks             # [ue][cc] -> (start, stop)
        self.num_ccs = num_ccs
        self.n_max = n_max
        per_cc = counts.sum(axis=0)
        if np.any(per_cc > n_max):
            raise ConstraintViolation(
                f"RB conservation violated: {per_cc.max()} RBs allocated on one CC "
                f"exceeds the {n_max} available")

    def ue_total(self, u):
        return int(self.rb_counts[u].sum())

    def beta(self):
        """Dense allocation bit tensor (ues, ccs, n_max)."""
        ues = self.rb_counts.shape[0]
        out = np.zeros((ues, self.num_ccs, self.n_max), dtype=np.int8)
        for u in range(ues):
            for cc in range(self.num_ccs):
                start, stop = self.chunks[u][cc]
                out[u, cc, start:stop] = 1
        return out


def per_rb_power(p_total, plan, u):
    """Uniform split of UE u's total power over all of its allocated RBs."""
    n = plan.ue_total(u)
    if n == 0:
        if p_total > 0:
            raise ConstraintViolation(
                f"power split invariant violated: {p_total} W assigned to a UE "
                "with zero allocated RBs")
        return np.zeros((plan.num_ccs, plan.n_max))
    out = np.zeros((plan.num_ccs, plan.n_max))
    share = p_total / n
    for cc in range(plan.num_ccs):
        start, stop = plan.chunks[u][cc]
        out[cc, start:stop] = share
    return out


def select_cc(evaluator, vectors, active=None):
    """Exhaustive argmax of the evaluator over the admissible vector subset.

    Ties break toward the latest-enumerated candidate (comparison is >=), so a
    constant evaluator returns the last admissible vector. The evaluator is
    called exactly once per admissible vector.
    """
    idx = vectors.constrained(active)
    if len(idx) == 0:
        raise CasimError("no admissible CC vector (constrained subset is empty)")
    best_vec = None
    best_val = -np.inf
    for i in idx:
        vec = vectors.vectors[i]
        val = evaluator(vec)
        if val >= best_val:
            best_val = val
            best_vec = vec
    return best_vec.copy(), float(best_val)
