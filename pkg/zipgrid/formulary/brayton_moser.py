"""
Brayton-Moser (BM) descriptions of a DC network.

The network dynamics can be written in the gradient form

.. math::

    Q \\dot{x} = ∇_x 𝒫(x) + \\tilde{B} u

with ``Q = diag{−L_s, −L_t, C_s}``, ``B̃ = [−I; 0; 0]`` and the mixed
potential

.. math::

    𝒫 = I^T Γ V + F(I) − 𝒢(V), \\qquad Γ = [I_n \\; ℬ]^T .

From any such description a whole family of equivalent descriptions
``Q_A ẋ = ∇𝒫_A + B_A D⁻¹(u − Q₀ẋ)`` can be generated by choosing a scalar
``λ``, a symmetric matrix ``M``, a state-dependent matrix ``Q₀`` and a
full-rank ``D``.  Members whose symmetric part of ``Q_A`` is negative
semidefinite and whose ``𝒫_A`` is non-negative provide passivity
certificates.
"""
__all__ = ['MixedPotential', 'BmPair', 'GeneralizedPair', 'BmStabilityResult',
           'PassivityCertificate',
           'mixed_potential_value', 'mixed_potential_gradient', 'mixed_potential_hessian',
           'identity_pair', 'passivating_pair', 'generalized_pair',
           'generalized_potential', 'passivating_storage', 'passivity_certificate',
           'solution_equivalence_check', 'open_loop_dissipation', 'bm_stability_condition']

import numpy as np
import scipy.linalg

from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

from zipgrid.classes import Network, NetworkState
from zipgrid.formulary.loads import check_voltage
from zipgrid.utils.exceptions import RankDeficientTransform

#: Smallest singular value accepted for ``λI + ∇²𝒫·M``.
MIN_SINGULAR_VALUE = 1e-9

_VARIANTS = ('full', 'reduced')


@dataclass(frozen=True)
class MixedPotential:
    """
    The mixed potential of a network.

    Parameters
    ----------
    network : `~zipgrid.classes.Network`

    variant : {'full', 'reduced'}
        The ``'full'`` potential has resistive content
        ``F = ½‖I_t‖²_{R_t} + ½‖I_s‖²_{R_s}`` and is driven by ``u``.  The
        ``'reduced'`` potential drops the ``R_s`` term, which moves the
        filter resistance into the input: it is driven by ``u − R_sI_s``.
    """
    network: Network
    variant: str = 'full'

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValueError(f"variant must be one of {_VARIANTS}, got {self.variant!r}.")

    @property
    def gamma(self) -> np.ndarray:
        """Coupling matrix ``Γ = [I_n ℬ]ᵀ`` of shape ``(n+m)×n``."""
        net = self.network
        return np.vstack((np.eye(net.n), net.incidence.T))

    @property
    def Q(self) -> np.ndarray:
        """Diagonal of ``Q = diag{−L_s, −L_t, C_s}``."""
        net = self.network
        return np.concatenate((-net.L_s, -net.L_t, net.C_s))

    @property
    def B_tilde(self) -> np.ndarray:
        """Input matrix ``B̃ = [−I; 0; 0]`` of shape ``(2n+m)×n``."""
        net = self.network
        return np.vstack((-np.eye(net.n), np.zeros((net.m + net.n, net.n))))

    def resistive_content(self, I_s, I_t) -> float:
        """Resistive content ``F(I)`` (W)."""
        net = self.network
        content = 0.5 * np.sum(net.R_t * np.asarray(I_t) ** 2)
        if self.variant == 'full':
            content += 0.5 * np.sum(net.R_s * np.asarray(I_s) ** 2)
        return float(content)

    def resistive_cocontent(self, V) -> float:
        """
        Load co-content ``𝒢(V) = ½‖V‖²_{Z⁻¹} + P*ᵀ ln V + I*ᵀV`` (W).
        """
        net = self.network
        V = np.asarray(V, dtype=float)
        check_voltage(V)
        return float(0.5 * np.sum(net.Z_inv * V ** 2) + np.sum(net.P_const * np.log(V))
                     + np.sum(net.I_const * V))

    def effective_input(self, state: NetworkState, u) -> np.ndarray:
        """The input ``u`` seen by this potential."""
        u = np.broadcast_to(np.asarray(u, dtype=float), (self.network.n,))
        if self.variant == 'reduced':
            return u - self.network.R_s * state.I_s
        return u


class BmPair(NamedTuple):
    """
    The design parameters of a generalized BM description.

    Attributes
    ----------
    lambda_ : float
        Scalar weight of the original potential.

    M : `~numpy.ndarray`
        Symmetric ``(2n+m)×(2n+m)`` matrix.

    Q0 : callable
        Maps a `~zipgrid.classes.NetworkState` to an ``n×(2n+m)`` matrix.

    D : `~numpy.ndarray`
        Full-rank ``n×n`` matrix.
    """
    lambda_: float
    M: np.ndarray
    Q0: Callable[[NetworkState], np.ndarray]
    D: np.ndarray


class GeneralizedPair(NamedTuple):
    """Output of `generalized_pair`."""
    Q_A: np.ndarray
    grad_P_A: np.ndarray
    B_A: np.ndarray
    P_A: float


class BmStabilityResult(NamedTuple):
    """Output of `bm_stability_condition`."""
    norm: float
    satisfied: bool
    delta_margin: float


class PassivityCertificate(NamedTuple):
    """Output of `passivity_certificate`."""
    max_eig_sym_Q_A: float
    min_P_A: float
    n_samples: int
    holds: bool


def _check_state(mp: MixedPotential, state: NetworkState):
    state.check_shape(mp.network)
    check_voltage(state.V)


def mixed_potential_value(mp: MixedPotential, state: NetworkState) -> float:
    """
    Value of the mixed potential ``𝒫 = IᵀΓV + F(I) − 𝒢(V)`` (W).

    Raises
    ------
    ~zipgrid.utils.exceptions.NonPositiveVoltage
        If a node voltage is not positive.

    Examples
    --------
    >>> from zipgrid.classes import DguParams, ZipLoad, build_network
    >>> net = build_network([DguParams(0.01, 1e-3, 1e-3)], [], [ZipLoad(0.5, 2, 0)])
    >>> mixed_potential_value(MixedPotential(net), NetworkState([0.0], [], [4.0]))
    -12.0
    """
    _check_state(mp, state)
    net = mp.network
    coupling = state.I_s @ state.V + state.I_t @ (net.incidence.T @ state.V)
    return float(coupling + mp.resistive_content(state.I_s, state.I_t)
                 - mp.resistive_cocontent(state.V))


def mixed_potential_gradient(mp: MixedPotential, state: NetworkState) -> np.ndarray:
    """
    Analytic gradient ``∇ₓ𝒫``.

    Returns
    -------
    `~numpy.ndarray`
        ``[V + R_sI_s; R_tI_t + ℬᵀV; I_s + ℬI_t − I_l(V)]`` for the full
        potential; the reduced potential omits the ``R_sI_s`` term.
    """
    _check_state(mp, state)
    net = mp.network
    I_s, I_t, V = state.I_s, state.I_t, state.V
    g_s = V + net.R_s * I_s if mp.variant == 'full' else V.copy()
    g_t = net.R_t * I_t + net.incidence.T @ V
    g_v = I_s + net.incidence @ I_t - (net.Z_inv * V + net.I_const + net.P_const / V)
    return np.concatenate((g_s, g_t, g_v))


def mixed_potential_hessian(mp: MixedPotential, state: NetworkState) -> np.ndarray:
    """
    Analytic Hessian ``∇²ₓ𝒫``.

    Only the lower-right block depends on the state, through the
    incremental load conductance ``Z⁻¹ − P*/V²``.
    """
    _check_state(mp, state)
    net = mp.network
    n, m = net.n, net.m
    i_s, i_t, v = slice(0, n), slice(n, n + m), slice(n + m, 2 * n + m)

    H = np.zeros((2 * n + m, 2 * n + m))
    if mp.variant == 'full':
        H[i_s, i_s] = np.diag(net.R_s)
    H[i_s, v] = np.eye(n)
    H[v, i_s] = np.eye(n)
    H[i_t, i_t] = np.diag(net.R_t)
    H[i_t, v] = net.incidence.T
    H[v, i_t] = net.incidence
    H[v, v] = -np.diag(net.Z_inv - net.P_const / state.V ** 2)
    return H


def identity_pair(net: Network) -> BmPair:
    """
    The trivial member ``λ = 1, M = 0, Q₀ = 0, D = I``, which reproduces
    the original description.
    """
    size = net.state_size
    zeros = np.zeros((net.n, size))
    return BmPair(1.0, np.zeros((size, size)), lambda state: zeros, np.eye(net.n))


def passivating_pair(net: Network, Pi) -> BmPair:
    """
    The member that certifies passivity of the reduced potential with
    respect to the input ``u − u_PBC``.

    Uses ``λ = 0``, ``M = diag{L_s⁻¹, L_t⁻¹, C_s⁻¹}``,
    ``Q₀(x) = [0 0 −L_sΠ[V]⁻²]`` and ``D = L_s``.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`

    Pi : array_like
        Per-node power bounds ``Π`` (W).
    """
    n, m = net.n, net.m
    Pi = np.broadcast_to(np.asarray(Pi, dtype=float), (n,))
    M = np.diag(np.concatenate((1.0 / net.L_s, 1.0 / net.L_t, 1.0 / net.C_s)))
    L_s = net.L_s

    def Q0(state: NetworkState) -> np.ndarray:
        block = np.zeros((n, 2 * n + m))
        block[:, n + m:] = np.diag(-L_s * Pi / state.V ** 2)
        return block

    return BmPair(0.0, M, Q0, np.diag(L_s))


def _transform(mp: MixedPotential, pair: BmPair, state: NetworkState):
    H = mixed_potential_hessian(mp, state)
    T = pair.lambda_ * np.eye(H.shape[0]) + H @ pair.M
    smallest = scipy.linalg.svdvals(T).min()
    if not smallest > MIN_SINGULAR_VALUE:
        raise RankDeficientTransform(
            f"λI + ∇²𝒫·M is singular at this state (smallest singular value "
            f"{smallest:.3e}).", min_singular_value=smallest)
    return T


def generalized_potential(mp: MixedPotential, pair: BmPair, state: NetworkState) -> float:
    """Value of ``𝒫_A = λ𝒫 + ½∇𝒫ᵀM∇𝒫``."""
    g = mixed_potential_gradient(mp, state)
    value = 0.5 * g @ pair.M @ g
    if pair.lambda_ != 0:
        value += pair.lambda_ * mixed_potential_value(mp, state)
    return float(value)


def generalized_pair(mp: MixedPotential, pair: BmPair, state: NetworkState) -> GeneralizedPair:
    """
    Generate the BM description selected by ``pair``.

    Parameters
    ----------
    mp : MixedPotential
        The original potential.

    pair : BmPair
        The design parameters.

    state : `~zipgrid.classes.NetworkState`
        Point of evaluation.

    Returns
    -------
    GeneralizedPair
        ``Q_A = (λI + ∇²𝒫M)(Q − B̃Q₀)``, ``∇𝒫_A = (λI + ∇²𝒫M)∇𝒫``,
        ``B_A = (λI + ∇²𝒫M)B̃D`` and the value of ``𝒫_A``.

    Raises
    ------
    ~zipgrid.utils.exceptions.RankDeficientTransform
        If ``λI + ∇²𝒫M`` is numerically singular.
    """
    T = _transform(mp, pair, state)
    g = mixed_potential_gradient(mp, state)
    Q_A = T @ (np.diag(mp.Q) - mp.B_tilde @ pair.Q0(state))
    B_A = T @ mp.B_tilde @ pair.D
    return GeneralizedPair(Q_A, T @ g, B_A, generalized_potential(mp, pair, state))


def passivating_storage(net: Network, state: NetworkState) -> float:
    """
    ``𝒫_A`` of `passivating_pair` in closed form,

    .. math::

        ½‖V‖²_{L_s^{-1}} + ½‖R_tI_t + ℬ^TV‖²_{L_t^{-1}}
        + ½‖I_s + ℬI_t − I_l(V)‖²_{C_s^{-1}} .
    """
    state.check_shape(net)
    check_voltage(state.V)
    V = state.V
    line_drop = net.R_t * state.I_t + net.incidence.T @ V
    capacitor_current = (state.I_s + net.incidence @ state.I_t
                         - (net.Z_inv * V + net.I_const + net.P_const / V))
    return float(0.5 * np.sum(V ** 2 / net.L_s) + 0.5 * np.sum(line_drop ** 2 / net.L_t)
                 + 0.5 * np.sum(capacitor_current ** 2 / net.C_s))


def passivity_certificate(net: Network, Pi, states: Iterable[NetworkState],
                          tol: float = 1e-9) -> PassivityCertificate:
    """
    Check the passivity conditions of `passivating_pair` at sample states:
    ``Q_A + Q_Aᵀ ⪯ 0`` and ``𝒫_A ≥ 0``.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`

    Pi : array_like
        Per-node power bounds ``Π`` (W).

    states : Iterable[`~zipgrid.classes.NetworkState`]
        Sample states with positive voltages.

    tol : float
        Largest accepted eigenvalue of ``Q_A + Q_Aᵀ``.
    """
    mp = MixedPotential(net, 'reduced')
    pair = passivating_pair(net, Pi)
    max_eig, min_P_A, count = -np.inf, np.inf, 0
    for state in states:
        Q_A, _, _, P_A = generalized_pair(mp, pair, state)
        max_eig = max(max_eig, scipy.linalg.eigvalsh(Q_A + Q_A.T)[-1])
        min_P_A = min(min_P_A, P_A)
        count += 1
    holds = bool(count > 0 and max_eig <= tol and min_P_A >= 0)
    return PassivityCertificate(float(max_eig), float(min_P_A), count, holds)


def solution_equivalence_check(net: Network, pair: BmPair, state: NetworkState, u,
                               variant: str = 'full') -> float:
    """
    Compare the state derivative of the original and of a generated BM
    description.

    Parameters
    ----------
    net : `~zipgrid.classes.Network`

    pair : BmPair
        Member of the family to compare.

    state : `~zipgrid.classes.NetworkState`

    u : array_like
        Converter voltages (V).

    variant : {'full', 'reduced'}
        Mixed potential the member is generated from.

    Returns
    -------
    float
        ``‖Q⁻¹(∇𝒫 + B̃u) − (Q_A + B_AD⁻¹Q₀)⁻¹(∇𝒫_A + B_AD⁻¹u)‖`` over
        ``max(‖Q⁻¹(∇𝒫 + B̃u)‖, 1)``.

    Raises
    ------
    ~zipgrid.utils.exceptions.RankDeficientTransform
        If ``pair`` is singular at ``state``.
    """
    mp = MixedPotential(net, variant)
    u_eff = mp.effective_input(state, u)
    g = mixed_potential_gradient(mp, state)
    x_dot = (g + mp.B_tilde @ u_eff) / mp.Q

    Q_A, grad_P_A, B_A, _ = generalized_pair(mp, pair, state)
    B_A_D_inv = np.linalg.solve(np.asarray(pair.D, dtype=float).T, B_A.T).T
    x_dot_A = np.linalg.solve(Q_A + B_A_D_inv @ pair.Q0(state), grad_P_A + B_A_D_inv @ u_eff)
    return float(np.linalg.norm(x_dot - x_dot_A) / max(np.linalg.norm(x_dot), 1.0))


def open_loop_dissipation(mp: MixedPotential, state: NetworkState, u) -> float:
    """
    Rate of change of the mixed potential along the dynamics,
    ``d𝒫/dt = ½‖ẋ‖²_{Q+Qᵀ} − ẋᵀB̃u``.
    """
    u_eff = mp.effective_input(state, u)
    x_dot = (mixed_potential_gradient(mp, state) + mp.B_tilde @ u_eff) / mp.Q
    return float(x_dot @ (mp.Q * x_dot) - x_dot @ (mp.B_tilde @ u_eff))


def bm_stability_condition(net: Network) -> BmStabilityResult:
    """
    The classical BM stability test
    ``‖L^{1/2} diag{R_s⁻¹, R_t⁻¹} Γ C_s^{−1/2}‖₂ ≤ 1 − δ``.

    Returns
    -------
    BmStabilityResult
        The spectral norm, whether it is below one, and the margin
        ``δ = 1 − norm``.

    Notes
    -----
    The test additionally needs the load co-content to grow without bound
    along ``V``; that asymptotic property is not checked here.

    Examples
    --------
    >>> from zipgrid.classes import DguParams, ZipLoad, build_network
    >>> net = build_network([DguParams(4.0, 4e-3, 1e-3)], [], [ZipLoad()])
    >>> bm_stability_condition(net)
    BmStabilityResult(norm=0.5, satisfied=True, delta_margin=0.5)
    """
    gamma = MixedPotential(net).gamma
    L = np.concatenate((net.L_s, net.L_t))
    R = np.concatenate((net.R_s, net.R_t))
    A = (np.sqrt(L) / R)[:, np.newaxis] * gamma / np.sqrt(net.C_s)[np.newaxis, :]
    norm = float(scipy.linalg.norm(A, 2))
    return BmStabilityResult(norm, norm < 1.0, 1.0 - norm)
