"""Unstable Adams operations on p-local compact groups.

Pipeline: normalized section -> k_S; representative data M_{P,Q}, r_P -> k_F
and psi_zeta preserving F; lifted representatives and structure constants in
the linking system -> k_G and the functor Psi on L^bullet, extended to L.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .adams import AdamsAutomorphism, NotInGamma, Section, construct_psi_zeta, normalize_section
from .fusion import (
    FusionSystem,
    GroupHom,
    RepresentativeData,
    is_fusion_preserving,
    representative_data,
    transport_hom,
)
from .group import GroupElement, Report, Subgroup, conjugates_into, transporter
from .linking import Functor, LMor, TransporterLinking, extend_functor
from .torus import PAdicUnitApprox, p_log, valuation_gamma


class CertificateError(AssertionError):
    pass


def theta_log(sigma: Section, elems, p: int) -> tuple[int, GroupElement | None]:
    """max log_p ord theta(g) over elems, with an element attaining it."""
    best, wit = 0, None
    for g in elems:
        k = p_log(sigma.theta(g).order(), p)
        if wit is None or k > best:
            best, wit = k, g
    return best, wit


def _element_of(f: GroupHom) -> GroupElement:
    G = f.G
    if f.via is not None:
        return f.via
    if f.is_inclusion():
        return G.identity
    raise ValueError("representative is not a conjugation")


# ---------------------------------------------------------------- k_F and a_F


@dataclass
class KF:
    k_S: int
    k_F: int
    m_set: tuple[GroupElement, ...]
    witness: GroupElement | None

    def to_json(self) -> dict:
        return {
            "k_S": self.k_S,
            "k_F": self.k_F,
            "m_size": len(self.m_set),
            "witness": self.witness.to_json() if self.witness is not None else None,
        }


def compute_kF(F: FusionSystem, data: RepresentativeData | None = None, sigma: Section | None = None) -> KF:
    G = F.G
    data = data or representative_data(F)
    sigma = sigma or normalize_section(G)
    k_S = sigma.log_order()
    m = set()
    for (P, Q), fs in data.M.items():
        for f in fs:
            for r in data.r[P]:
                m.add(f.apply(r))
    m_set = tuple(sorted(m, key=GroupElement.sort_key))
    k, wit = theta_log(sigma, m_set, G.p)
    return KF(k_S, max(k_S, k), m_set, wit)


@dataclass
class AF:
    psi: AdamsAutomorphism
    kf: KF
    report: Report


def build_aF(
    F: FusionSystem,
    zeta: PAdicUnitApprox,
    data: RepresentativeData | None = None,
    sigma: Section | None = None,
    kf: KF | None = None,
) -> AF:
    """psi_zeta for zeta in Gamma_{k_F}: fixes every P in the universe and every f in M_{P,Q}."""
    G = F.G
    data = data or representative_data(F)
    sigma = sigma or normalize_section(G)
    kf = kf or compute_kF(F, data, sigma)
    if G.rank and not valuation_gamma(zeta, kf.k_F).member:
        raise NotInGamma(G.p, kf.k_F, zeta)
    psi = construct_psi_zeta(G, sigma, zeta)
    rep = Report(True)
    bad = next((P for P in data.objects if psi.image_subgroup(P) != P), None)
    rep.add("psi(P) = P on the universe", bad is None, repr(bad) if bad is not None else "")
    badf = ""
    for (P, Q), fs in data.M.items():
        for f in fs:
            if transport_hom(psi, f) != f:
                badf = f"psi o {f!r} o psi^-1 != f on {P!r} -> {Q!r}"
                break
        if badf:
            break
    rep.add("psi fixes M_{P,Q}", not badf, badf)
    fp = is_fusion_preserving(psi, F, data)
    rep.add("fusion preserving", fp.preserving, fp.witness)
    if not rep.ok:
        raise CertificateError(rep.first_failure())
    return AF(psi, kf, rep)


# ---------------------------------------------------------------- linking data


@dataclass
class LiftData:
    """Lifted representatives M~_{P,Q} (as elements) for centric P, Q, with n_P."""

    centric: tuple[Subgroup, ...]
    Mt: dict[tuple[Subgroup, Subgroup], tuple[GroupElement, ...]]
    n: dict[Subgroup, tuple[GroupElement, ...]]


def lift_data(L: TransporterLinking, data: RepresentativeData) -> LiftData:
    Mt = {}
    for P in data.centric:
        for Q in data.centric:
            Mt[(P, Q)] = tuple(_element_of(f) for f in data.M[(P, Q)])
    return LiftData(data.centric, Mt, dict(data.n))


def split_left(L: TransporterLinking, e: LMor, reps: Sequence[GroupElement]) -> tuple[GroupElement, GroupElement]:
    """(x, a) with e = x^ o a^, x in N_S(Q) and a in reps; exactly one a must work."""
    G = L.G
    P, Q = e.source, e.target
    sols = []
    for a in reps:
        x = G.mul(e.g, G.inv(a))
        if conjugates_into(G, x, Q, Q):
            sols.append((x, a))
    if len(sols) != 1:
        raise CertificateError(f"{len(sols)} representatives in M~ match {e!r}")
    x, a = sols[0]
    if L.compose(L.hat(Q, Q, x), L.hat(P, Q, a)) != e:
        raise CertificateError("factorization through M~ does not recompose")
    return x, a


def lambda_phi(L: TransporterLinking, lift: LiftData, P: Subgroup, Q: Subgroup, a: GroupElement, g: GroupElement):
    """(lambda_phi(g), phi') with phi o g^ = lambda^ o phi' for phi = a^ in M~_{P,Q}, g in N_S(P)."""
    e = L.compose(L.hat(P, Q, a), L.hat(P, P, g))
    return split_left(L, e, lift.Mt[(P, Q)])


def u_gamma_phi(L: TransporterLinking, lift: LiftData, P: Subgroup, Q: Subgroup, R: Subgroup, c: GroupElement, a: GroupElement):
    """(u, epsilon) with gamma o phi = u^ o epsilon for gamma = c^ in M~_{Q,R}, phi = a^ in M~_{P,Q}."""
    e = L.compose(L.hat(Q, R, c), L.hat(P, Q, a))
    return split_left(L, e, lift.Mt[(P, R)])


@dataclass
class KG:
    kf: KF
    k_G: int
    logs: dict[str, int]
    sets: dict[str, tuple[GroupElement, ...]]
    lam_table: list = field(default_factory=list)
    u_table: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "k_S": self.kf.k_S,
            "k_F": self.kf.k_F,
            "k_G": self.k_G,
            "log_orders": dict(self.logs),
            "set_sizes": {k: len(v) for k, v in self.sets.items()},
        }


def compute_kG(
    L: TransporterLinking,
    data: RepresentativeData,
    sigma: Section,
    kf: KF | None = None,
    lift: LiftData | None = None,
) -> KG:
    G = L.G
    kf = kf or compute_kF(L.F, data, sigma)
    lift = lift or lift_data(L, data)
    cen = lift.centric
    c_set, d_set = set(), set()
    i_set = {a for v in lift.Mt.values() for a in v}
    lam_table, u_table = [], []
    for P in cen:
        for Q in cen:
            for a in lift.Mt[(P, Q)]:
                for n in lift.n[P]:
                    lam, ap = lambda_phi(L, lift, P, Q, a, n)
                    c_set.add(lam)
                    lam_table.append((P, Q, a, n, lam, ap))
    for P in cen:
        for Q in cen:
            for R in cen:
                for a in lift.Mt[(P, Q)]:
                    for c in lift.Mt[(Q, R)]:
                        u, eps = u_gamma_phi(L, lift, P, Q, R, c, a)
                        d_set.add(u)
                        u_table.append((P, Q, R, c, a, u, eps))
    sets = {
        "c": tuple(sorted(c_set, key=GroupElement.sort_key)),
        "i": tuple(sorted(i_set, key=GroupElement.sort_key)),
        "d": tuple(sorted(d_set, key=GroupElement.sort_key)),
    }
    logs = {"m": theta_log(sigma, kf.m_set, G.p)[0]}
    for k, v in sets.items():
        logs[k] = theta_log(sigma, v, G.p)[0]
    k_G = max([kf.k_F] + [logs[k] for k in ("c", "i", "d")])
    return KG(kf, k_G, logs, sets, lam_table, u_table)


# ---------------------------------------------------------------- the functor Psi


class PsiBullet:
    """Psi on L^bullet built from the representative data (Step 2 of the construction)."""

    def __init__(self, L: TransporterLinking, psi: AdamsAutomorphism, lift: LiftData):
        self.L = L
        self.psi = psi
        self.lift = lift
        self.F = L.F
        self._loc: dict = {}
        self._obj: dict = {}

    def obj(self, P: Subgroup) -> Subgroup:
        if P not in self._obj:
            self._obj[P] = self.psi.image_subgroup(P)
        return self._obj[P]

    def locate(self, P: Subgroup) -> tuple[Subgroup, GroupElement]:
        """(P', c) with P' the representative and c P c^-1 = P' (c = 1 when P = P')."""
        if P not in self._loc:
            if P in self.lift.centric:
                self._loc[P] = (P, self.L.G.identity)
            else:
                self._loc[P] = self.F.locate(P)
        return self._loc[P]

    def mor(self, phi: LMor, g: GroupElement | None = None, h: GroupElement | None = None) -> LMor:
        """Psi(phi) = psi(h^-1)^ o psi(x)^ o phi' o psi(g^-1)^ where h^ o phi o g^ = x^ o phi'.

        g in N_S(P', P) and h in N_S(Q, Q') may be given to test independence of choices.
        """
        L, G, psi = self.L, self.L.G, self.psi
        P, Q = phi.source, phi.target
        Pp, cP = self.locate(P)
        Qp, cQ = self.locate(Q)
        g = G.inv(cP) if g is None else g
        h = cQ if h is None else h
        e = L.compose(L.hat(Q, Qp, h), L.compose(phi, L.hat(Pp, P, g)))
        x, a = split_left(L, e, self.lift.Mt[(Pp, Qp)])
        psiP, psiQ = self.obj(P), self.obj(Q)
        out = L.hat(psiP, Pp, psi.apply(G.inv(g)))
        out = L.compose(L.hat(Pp, Qp, a), out)
        out = L.compose(L.hat(Qp, Qp, psi.apply(x)), out)
        return L.compose(L.hat(Qp, psiQ, psi.apply(G.inv(h))), out)

    def functor(self) -> Functor:
        return Functor(self.obj, self.mor)


@dataclass
class AG:
    psi: AdamsAutomorphism
    kg: KG
    data: RepresentativeData
    lift: LiftData
    sigma: Section
    L: TransporterLinking
    Psi_b: PsiBullet
    Psi: Functor

    def certificate(self) -> dict:
        G = self.psi.G
        names = {P: f"P{i}" for i, P in enumerate(self.data.objects)}
        return {
            "group": G.name,
            "p": G.p,
            "rank": G.rank,
            "orders": self.kg.to_json(),
            "normalized_section": self.sigma.to_json(),
            "representatives": self.data.to_json(),
            "lifted_M": {
                f"{names[P]}->{names[Q]}": [a.to_json() for a in v]
                for (P, Q), v in sorted(self.lift.Mt.items(), key=lambda kv: (names[kv[0][0]], names[kv[0][1]]))
            },
            "lambda": [
                [names[P], names[Q], a.to_json(), n.to_json(), lam.to_json(), ap.to_json()]
                for P, Q, a, n, lam, ap in self.kg.lam_table
            ],
            "u": [
                [names[P], names[Q], names[R], c.to_json(), a.to_json(), u.to_json(), eps.to_json()]
                for P, Q, R, c, a, u, eps in self.kg.u_table
            ],
            "psi": self.psi.to_json(),
        }


def build_aG(
    F: FusionSystem,
    zeta: PAdicUnitApprox,
    L: TransporterLinking | None = None,
    data: RepresentativeData | None = None,
    sigma: Section | None = None,
    kg: KG | None = None,
) -> AG:
    """psi_zeta and Psi for zeta in Gamma_{k_G}."""
    G = F.G
    L = L or TransporterLinking(F)
    data = data or representative_data(F)
    sigma = sigma or normalize_section(G)
    lift = lift_data(L, data)
    kg = kg or compute_kG(L, data, sigma, lift=lift)
    if G.rank and not valuation_gamma(zeta, kg.k_G).member:
        raise NotInGamma(G.p, kg.k_G, zeta)
    af = build_aF(F, zeta, data, sigma, kg.kf)
    psi = af.psi
    for a in kg.sets["i"]:
        if psi.apply(a) != a:
            raise CertificateError(f"psi moves the lifted representative {a}")
    Psi_b = PsiBullet(L, psi, lift)
    Psi = extend_functor(L, Psi_b.functor(), psi, lambda f: transport_hom(psi, f))
    return AG(psi, kg, data, lift, sigma, L, Psi_b, Psi)


# ---------------------------------------------------------------- verification sweeps


def sample_morphisms(L: TransporterLinking, P: Subgroup, Q: Subgroup, level: int, k: int, rng: random.Random) -> list[LMor]:
    """All of Mor(P, Q) for finite S; otherwise k random transporter elements at the level."""
    if L.finite:
        return L.mor(P, Q)
    G = L.G
    base = transporter(G, P, Q, level).elements
    if not base:
        return []
    Q0 = Subgroup(G, Q.basis, [])
    pts = list(Q0.elements_at(level)) if Q.dim else [G.identity]
    out = {L.hat(P, Q, G.identity)} if P.is_subgroup_of(Q) else set()
    for _ in range(k):
        out.add(L.hat(P, Q, G.mul(rng.choice(pts), rng.choice(base))))
    return sorted(out, key=lambda m: m.g.sort_key())


def sweep_objects(ag: AG, level: int, extra: Sequence[Subgroup] = (), rng: random.Random | None = None, conj: int = 1) -> list[Subgroup]:
    """Centric representatives, `conj` random conjugates of each at the level, and extra objects."""
    rng = rng or random.Random(0)
    G = ag.psi.G
    objs = list(ag.lift.centric)
    from .group import conjugate_subgroup

    for P in list(objs):
        for _ in range(conj):
            g = G.element([f"{rng.randrange(G.p ** level)}/{G.p ** level}" for _ in range(G.rank)], rng.randrange(G.gamma.order)) if G.rank else rng.choice(list(G.elements_at(0)))
            Pc = conjugate_subgroup(G, g, P)
            if Pc not in objs:
                objs.append(Pc)
    for X in extra:
        if X not in objs:
            objs.append(X)
    return objs


def verify_functor(ag: AG, level: int = 8, per_set: int = 6, seed: int = 0, objects: Sequence[Subgroup] | None = None) -> Report:
    """Functor laws and covering conditions of Psi on enumerated morphisms.

    Exhaustive over Mor for finite S; otherwise per_set random morphisms per
    Hom-set between the given objects (centric representatives and conjugates).
    """
    L, psi = ag.L, ag.psi
    rng = random.Random(seed)
    objs = list(objects) if objects is not None else sweep_objects(ag, min(level, 3), rng=rng)
    mors = {(P, Q): sample_morphisms(L, P, Q, level, per_set, rng) for P in objs for Q in objs}
    memo: dict = {}

    def Psi(f):
        if f not in memo:
            memo[f] = ag.Psi.mor(f)
        return memo[f]

    rep = Report(True)
    bad = ""
    for P in objs:
        idP = L.identity(P)
        if Psi(idP) != L.identity(ag.Psi.obj(P)):
            bad = f"Psi(Id) != Id on {P!r}"
            break
    rep.add("Psi(Id_P) = Id_psi(P)", not bad, bad)
    bad_cov, bad_hat = "", ""
    for (P, Q), fs in mors.items():
        for f in fs:
            pf = Psi(f)
            if (pf.source, pf.target) != (ag.Psi.obj(P), ag.Psi.obj(Q)):
                bad_cov = f"Psi({f!r}) has the wrong endpoints"
                break
            if L.project(pf) != transport_hom(psi, L.project(f)):
                bad_cov = f"pi(Psi({f!r})) != psi_*(pi({f!r}))"
                break
            if pf != L.hat(pf.source, pf.target, psi.apply(f.g)):
                bad_hat = f"Psi({f!r}) != psi({f.g})^"
                break
        if bad_cov or bad_hat:
            break
    rep.add("pi o Psi = psi_* o pi", not bad_cov, bad_cov)
    rep.add("Psi(x^) = psi(x)^", not bad_hat, bad_hat)
    bad = ""
    n_pairs = 0
    for P in objs:
        for Q in objs:
            for R in objs:
                for a in mors[(P, Q)]:
                    for b in mors[(Q, R)]:
                        n_pairs += 1
                        if Psi(L.compose(b, a)) != L.compose(Psi(b), Psi(a)):
                            bad = f"Psi(b o a) != Psi(b) o Psi(a) for a={a!r}, b={b!r}"
                            break
                    if bad:
                        break
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    rep.add(f"Psi(b o a) = Psi(b) o Psi(a) ({n_pairs} pairs)", not bad, bad)
    return rep


def verify_choice_independence(ag: AG, level: int = 8, per_set: int = 4, seed: int = 0, objects: Sequence[Subgroup] | None = None) -> Report:
    """Psi(phi) does not depend on the conjugators g, h used in its definition."""
    L, G = ag.L, ag.psi.G
    rng = random.Random(seed)
    objs = list(objects) if objects is not None else sweep_objects(ag, min(level, 3), rng=rng)
    Pb = ag.Psi_b
    bad = ""
    for P in objs:
        for Q in objs:
            if L.F.bullet(P) != P or L.F.bullet(Q) != Q:
                continue
            Pp, cP = Pb.locate(P)
            Qp, cQ = Pb.locate(Q)
            zs = [z for z in ag.lift.n[Pp] if z != G.identity] + list(Pp.reps[1:2])
            ns = [z for z in ag.lift.n[Qp] if z != G.identity] + list(Qp.reps[1:2])
            z = zs[0] if zs else G.identity
            n = ns[0] if ns else G.identity
            u = G.mul(G.inv(cP), z)
            v = G.mul(n, cQ)
            for f in sample_morphisms(L, P, Q, level, per_set, rng):
                if Pb.mor(f) != Pb.mor(f, g=u, h=v):
                    bad = f"Psi({f!r}) depends on the choice of conjugators"
                    break
            if bad:
                break
        if bad:
            break
    rep = Report(True)
    rep.add("Psi independent of choices", not bad, bad)
    return rep


def verify_homomorphism(F: FusionSystem, z1: PAdicUnitApprox, z2: PAdicUnitApprox, level: int = 8, per_set: int = 4, seed: int = 0, **kw) -> Report:
    """(psi_z1, Psi_z1) o (psi_z2, Psi_z2) = (psi_z1z2, Psi_z1z2)."""
    a1 = build_aG(F, z1, **kw)
    kw = dict(kw, L=a1.L, data=a1.data, sigma=a1.sigma, kg=a1.kg)
    a2 = build_aG(F, z2, **kw)
    a12 = build_aG(F, z1 * z2, **kw)
    G = F.G
    rep = Report(True)
    comp = a1.psi.aut.compose(a2.psi.aut)
    same = comp.same_as(a12.psi.aut, level if G.rank else None)
    rep.add("psi_z1 o psi_z2 = psi_z1z2", same, "" if same else "maps differ")
    rng = random.Random(seed)
    objs = sweep_objects(a1, min(level, 3), rng=rng)
    bad = ""
    for P in objs:
        if a1.Psi.obj(a2.Psi.obj(P)) != a12.Psi.obj(P):
            bad = f"objects differ at {P!r}"
            break
        for Q in objs:
            for f in sample_morphisms(a1.L, P, Q, level, per_set, rng):
                if a1.Psi.mor(a2.Psi.mor(f)) != a12.Psi.mor(f):
                    bad = f"Psi_z1 Psi_z2 != Psi_z1z2 on {f!r}"
                    break
            if bad:
                break
        if bad:
            break
    rep.add("Psi_z1 o Psi_z2 = Psi_z1z2", not bad, bad)
    return rep


def ordering_check(kg: KG, m: int) -> bool:
    """k_G >= k_F >= k_S = m (a normalized section has cocycle order exactly p^m)."""
    return kg.k_G >= kg.kf.k_F >= kg.kf.k_S == m
