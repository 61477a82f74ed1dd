"""Coupling factor and mean velocity-dependent dipole force on a two-level atom.

The coupling g is the Rabi-type frequency mu.E/hbar projected on the atomic
dipole, expressed in linewidth units so the saturation parameter
p = 2|g|^2/((1/2)^2 + detuning^2) is dimensionless.  Both circular dipole
projections are supported through `sign`; only phase bookkeeping changes,
|g| and grad(g)/g are identical, so the force does not depend on it.

The force routine follows the mean-force expression with the saturation
denominator written as (1-p')/p'; the cited literature instead has the
standard form (1+p')/p'.  Both are implemented behind the `denominator`
switch (default "as_printed"); in the far-detuned regime used here
p ~ 1e-10 and the two differ by ~1e-20 relative, far below every other
error in the model, but the switch is never silently overridden.

Nodal regions are handled by a regularization threshold on |g|^2 chosen so
the zeroed-out force is below p = 1e-12 saturation: grad(g)/g diverges at
nodes while the physical force vanishes, and the product is numerically
delicate exactly where it no longer matters.
"""

import cmath
from dataclasses import dataclass

from .units import HBAR, detuning_natural, dipole_moment

P_FLOOR = 1e-12          # saturation at the node-regularization threshold
DEN_FLOOR = 1e-12        # |denominator| below this -> sentinel


@dataclass(frozen=True)
class CouplingSample:
    g: complex                 # linewidth units
    grad_g: tuple              # 3 complex, Cartesian
    alpha: tuple               # 3 real, 1/length
    beta: tuple                # 3 real, 1/length
    p: float
    d_pop: float
    p_prime: float
    gamma_prime: complex


def coupling_prefactor(spec, setup, sign="+"):
    """Complex constant multiplying W(u,v)*S(psi) in g, in linewidth units."""
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    mu = dipole_moment(setup)
    k = spec.k_natural
    kz = spec.kz_natural
    s = -1j if sign == "+" else 1j
    mode = k * (k * complex(spec.amp_te) + s * kz * complex(spec.amp_tm))
    return (mu * spec.amplitude_scale / (HBAR * setup.gamma)) * mode


def _w_and_s(d, u, v, sign):
    if sign == "+":
        w = 1.0 / complex(u, -v)
        s_val = complex(d.dpsi_dv, -d.dpsi_du)
        s_u = complex(d.d2psi_duv, -d.d2psi_duu)
        s_v = complex(d.d2psi_dvv, -d.d2psi_duv)
        dw_v = 1j * w
    else:
        w = 1.0 / complex(u, v)
        s_val = complex(d.dpsi_dv, d.dpsi_du)
        s_u = complex(d.d2psi_duv, d.d2psi_duu)
        s_v = complex(d.d2psi_dvv, d.d2psi_duv)
        dw_v = -1j * w
    return w, s_val, s_u, s_v, dw_v


def coupling_g(spec, setup, p, z=0.0, sign="+"):
    """Coupling factor at a parabolic point (linewidth units).

    Raises at the coordinate origin, where the 1/(u -+ iv) factor and the
    basis vectors are both undefined.
    """
    from .beams import scalar_psi

    if p.h2 == 0.0:
        raise ValueError("coupling factor undefined at the coordinate origin")
    d = scalar_psi(spec, p)
    w, s_val, _, _, _ = _w_and_s(d, p.u, p.v, sign)
    return coupling_prefactor(spec, setup, sign) * w * s_val * cmath.exp(1j * spec.kz_natural * z)


def coupling_sample(spec, setup, p, velocity=(0.0, 0.0, 0.0), z=0.0, sign="+"):
    """Full CouplingSample: g, log-gradient split, saturation quantities.

    The log-gradient is assembled analytically: d/du ln W = -W,
    d/dv ln W = +-iW, and the S-part from second partials of psi.  The
    z direction is exact by inspection (traveling factor e^{i kz z}):
    alpha_z = 0, beta_z = kz.
    """
    from .beams import scalar_psi

    if p.h2 == 0.0:
        raise ValueError("coupling factor undefined at the coordinate origin")
    d = scalar_psi(spec, p)
    u, v, h2 = p.u, p.v, p.h2
    w, s_val, s_u, s_v, dw_v = _w_and_s(d, u, v, sign)
    pref = coupling_prefactor(spec, setup, sign)
    g = pref * w * s_val * cmath.exp(1j * spec.kz_natural * z)

    lu = -w + s_u / s_val
    lv = dw_v + s_v / s_val
    lx = (u * lu - v * lv) / h2
    ly = (v * lu + u * lv) / h2
    kz = spec.kz_natural
    alpha = (lx.real, ly.real, 0.0)
    beta = (lx.imag, ly.imag, kz)
    grad = (complex(alpha[0], beta[0]) * g,
            complex(alpha[1], beta[1]) * g,
            complex(alpha[2], beta[2]) * g)

    delta = detuning_natural(setup)
    g2 = abs(g) ** 2
    p_sat = 2.0 * g2 / (0.25 + delta * delta)
    d_pop = 1.0 / (1.0 + p_sat)
    va = velocity[0] * alpha[0] + velocity[1] * alpha[1] + velocity[2] * alpha[2]
    vb = velocity[0] * beta[0] + velocity[1] * beta[1] + velocity[2] * beta[2]
    gamma_prime = complex(va * (1.0 - p_sat) / (1.0 + p_sat) + 0.5, vb - delta)
    p_prime = 2.0 * g2 / (gamma_prime.real ** 2 + gamma_prime.imag ** 2)
    return CouplingSample(g=g, grad_g=grad, alpha=alpha, beta=beta,
                          p=p_sat, d_pop=d_pop, p_prime=p_prime,
                          gamma_prime=gamma_prime)


def node_threshold_g2(setup):
    """|g|^2 below which the force is zeroed (the p = 1e-12 contour)."""
    delta = detuning_natural(setup)
    return 0.5 * P_FLOOR * (0.25 + delta * delta)


@dataclass(frozen=True)
class ForceResult:
    force: tuple          # 3 real, units of (atom mass) * lambda * gamma^2
    sentinel: str = ""    # "", "node", or "denominator"


def mean_force(spec, setup, p, velocity=(0.0, 0.0, 0.0), z=0.0, sign="+",
               denominator="as_printed"):
    """Mean velocity-dependent optical force at a point, natural units.

    Returned numbers are numerically equal to the acceleration in
    lambda*gamma^2 (force in units of atom_mass*lambda*gamma^2); gravity is
    NOT included here.  Sentinels: below the node threshold, or when the
    saturation denominator loses all magnitude, the optical force is zeroed
    and the reason reported.
    """
    if denominator not in ("as_printed", "standard"):
        raise ValueError("denominator must be 'as_printed' or 'standard'")
    sample = coupling_sample(spec, setup, p, velocity=velocity, z=z, sign=sign)
    g2 = abs(sample.g) ** 2
    if g2 < node_threshold_g2(setup):
        return ForceResult((0.0, 0.0, 0.0), "node")
    delta = detuning_natural(setup)
    ps, pp, d_pop = sample.p, sample.p_prime, sample.d_pop
    va = (velocity[0] * sample.alpha[0] + velocity[1] * sample.alpha[1]
          + velocity[2] * sample.alpha[2])
    vb = (velocity[0] * sample.beta[0] + velocity[1] * sample.beta[1]
          + velocity[2] * sample.beta[2])
    lead = 1.0 - pp if denominator == "as_printed" else 1.0 + pp
    den = lead / pp + 2.0 * d_pop * va * (1.0 - ps / pp - ps)
    if abs(den) < DEN_FLOOR:
        return ForceResult((0.0, 0.0, 0.0), "denominator")
    eps = setup.recoil_parameter
    cb = d_pop * (1.0 - ps) * va + 0.5
    ca = vb - delta
    force = tuple((eps * (cb * sample.beta[j] + ca * sample.alpha[j]) / den)
                  for j in range(3))
    return ForceResult(force, "")


def mean_force_at_rest(spec, setup, p, z=0.0, sign="+", denominator="as_printed"):
    """Independent algebraic reduction of the force at v = 0.

    Written from scratch (not by calling mean_force with zeros) so it can
    serve as an oracle: at rest gamma' = 1/2 - i*delta, p' = p, and the
    force collapses to eps*(beta/2 - delta*alpha)*p/(1 -+ p).
    """
    sample = coupling_sample(spec, setup, p, z=z, sign=sign)
    g2 = abs(sample.g) ** 2
    if g2 < node_threshold_g2(setup):
        return ForceResult((0.0, 0.0, 0.0), "node")
    delta = detuning_natural(setup)
    ps = sample.p
    eps = setup.recoil_parameter
    scale = ps / (1.0 - ps) if denominator == "as_printed" else ps / (1.0 + ps)
    force = tuple(eps * (0.5 * sample.beta[j] - delta * sample.alpha[j]) * scale
                  for j in range(3))
    return ForceResult(force, "")
