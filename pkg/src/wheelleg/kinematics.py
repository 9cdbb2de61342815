"""Forward kinematics, geometric Jacobians, differential IK, rate resolution.

Uses the standard (distal) Denavit-Hartenberg convention: joint i rotates
about the z axis of frame i-1 and contributes the transform

    A_i = Rz(theta_offset_i + q_i) * Tz(d_i) * Tx(a_i) * Rx(alpha_i).

All operations are pure and reentrant; batch helpers evaluate many joint
vectors at once for the workspace sampler.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .rotations import quat_from_matrix, quat_geodesic, quat_to_matrix, rotvec_from_matrix

DEFAULT_DAMPING = 1e-3
DEFAULT_ORIENTATION_WEIGHT = 0.5


@dataclass(frozen=True)
class Pose:
    """Position (m) plus unit quaternion (w,x,y,z) in the waist frame."""

    position: np.ndarray
    quaternion: np.ndarray

    def as_matrix(self):
        T = np.eye(4)
        T[:3, :3] = quat_to_matrix(self.quaternion)
        T[:3, 3] = self.position
        return T


@dataclass(frozen=True)
class IKResult:
    q: np.ndarray
    converged: bool
    iterations: int
    position_error: float
    orientation_error: float


def _check_q(chain, q):
    q = np.asarray(q, dtype=float)
    if q.shape != (chain.joint_count,):
        raise DimensionError(
            f"chain '{chain.name}' has {chain.joint_count} joints, got q of shape {q.shape}"
        )
    if not np.all(np.isfinite(q)):
        raise DimensionError("joint vector contains non-finite values")
    return q


def dh_matrix(row, q):
    """Homogeneous transform of one DH row at joint position q."""
    ct, st = np.cos(row.theta_offset + q), np.sin(row.theta_offset + q)
    ca, sa = np.cos(row.alpha), np.sin(row.alpha)
    return np.array(
        [
            [ct, -st * ca, st * sa, row.a * ct],
            [st, ct * ca, -ct * sa, row.a * st],
            [0.0, sa, ca, row.d],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def chain_transforms(chain, q):
    """Cumulative transforms [T0, T1, ..., Tn] in the waist frame.

    T0 is the base pose (chain root); Ti includes joints 1..i; Tn is the
    end-effector transform.
    """
    q = _check_q(chain, q)
    T = chain.base_pose.as_matrix()
    out = [T]
    for joint, qi in zip(chain.joints, q):
        T = T @ dh_matrix(joint.dh, qi)
        out.append(T)
    return out


def forward_kinematics(chain, q):
    """End-effector pose for joint vector q."""
    T = chain_transforms(chain, q)[-1]
    return Pose(position=T[:3, 3].copy(), quaternion=quat_from_matrix(T[:3, :3]))


def geometric_jacobian(chain, q):
    """6 x n geometric Jacobian in the waist frame.

    Rows 0-2 map joint rates to end-effector linear velocity, rows 3-5 to
    angular velocity. Column i is (z_i x (p_ee - p_i), z_i) for the rotation
    axis z_i and origin p_i of joint i+1's parent frame.
    """
    Ts = chain_transforms(chain, q)
    p_ee = Ts[-1][:3, 3]
    J = np.zeros((6, chain.joint_count))
    for i in range(chain.joint_count):
        z = Ts[i][:3, 2]
        p = Ts[i][:3, 3]
        J[:3, i] = np.cross(z, p_ee - p)
        J[3:, i] = z
    return J


# ---------------------------------------------------------------------------
# batch evaluation (used by the workspace sampler)


def _dh_matrices_batch(row, qs):
    """(N,4,4) stack of one DH row evaluated at N joint positions."""
    th = row.theta_offset + qs
    ct, st = np.cos(th), np.sin(th)
    ca, sa = np.cos(row.alpha), np.sin(row.alpha)
    N = qs.shape[0]
    A = np.zeros((N, 4, 4))
    A[:, 0, 0] = ct
    A[:, 0, 1] = -st * ca
    A[:, 0, 2] = st * sa
    A[:, 0, 3] = row.a * ct
    A[:, 1, 0] = st
    A[:, 1, 1] = ct * ca
    A[:, 1, 2] = -ct * sa
    A[:, 1, 3] = row.a * st
    A[:, 2, 1] = sa
    A[:, 2, 2] = ca
    A[:, 2, 3] = row.d
    A[:, 3, 3] = 1.0
    return A


def batch_frames(chain, Q):
    """Joint-frame origins and z axes for a batch of joint vectors.

    Q is (N, n). Returns (origins, axes, p_ee) with origins/axes shaped
    (N, n, 3) for the parent frame of each joint, and p_ee shaped (N, 3).
    """
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[1] != chain.joint_count:
        raise DimensionError(f"expected (N, {chain.joint_count}) joint matrix")
    N, n = Q.shape
    T = np.broadcast_to(chain.base_pose.as_matrix(), (N, 4, 4)).copy()
    origins = np.empty((N, n, 3))
    axes = np.empty((N, n, 3))
    for i, joint in enumerate(chain.joints):
        origins[:, i, :] = T[:, :3, 3]
        axes[:, i, :] = T[:, :3, 2]
        T = T @ _dh_matrices_batch(joint.dh, Q[:, i])
    return origins, axes, T[:, :3, 3].copy()


def batch_positions(chain, Q):
    """End-effector positions (N, 3) for a batch of joint vectors."""
    return batch_frames(chain, Q)[2]


def batch_position_jacobians(chain, Q):
    """(N, 3, n) positional Jacobian blocks for a batch of joint vectors."""
    origins, axes, p_ee = batch_frames(chain, Q)
    lever = p_ee[:, None, :] - origins
    cols = np.cross(axes, lever)  # (N, n, 3)
    return np.swapaxes(cols, 1, 2), p_ee


# ---------------------------------------------------------------------------
# differential inverse kinematics


def _pose_error(chain, q, target):
    cur = chain_transforms(chain, q)[-1]
    e_pos = np.asarray(target.position, dtype=float) - cur[:3, 3]
    R_err = quat_to_matrix(target.quaternion) @ cur[:3, :3].T
    e_rot = rotvec_from_matrix(R_err)
    return e_pos, e_rot, cur


def _dls_step(J, err, damping):
    JJt = J @ J.T
    A = JJt + (damping**2) * np.eye(J.shape[0])
    return J.T @ np.linalg.solve(A, err)


def inverse_kinematics(
    chain,
    target,
    q0=None,
    tol=1e-6,
    max_iter=100,
    damping=DEFAULT_DAMPING,
    orientation_weight=DEFAULT_ORIENTATION_WEIGHT,
):
    """Damped-least-squares IK toward a full 6-DoF pose target.

    Converges when position error < tol (m) and orientation geodesic error
    < 10*tol (rad). Joint limits are clamped every iteration. On
    non-convergence (including unreachable targets) the best iterate is
    returned with converged=False; no exception is raised.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    lo, hi = chain.limits()
    if q0 is None:
        q0 = np.clip(np.zeros(chain.joint_count), lo, hi)
    q = np.clip(_check_q(chain, q0), lo, hi)

    best = None
    for it in range(max_iter + 1):
        e_pos, e_rot, _ = _pose_error(chain, q, target)
        pos_err = float(np.linalg.norm(e_pos))
        ori_err = float(np.linalg.norm(e_rot))
        score = pos_err + orientation_weight * ori_err
        if best is None or score < best[0]:
            best = (score, q.copy(), it, pos_err, ori_err)
        if pos_err < tol and ori_err < 10.0 * tol:
            return IKResult(q.copy(), True, it, pos_err, ori_err)
        if it == max_iter:
            break
        err = np.concatenate([e_pos, orientation_weight * e_rot])
        J = geometric_jacobian(chain, q).copy()
        J[3:, :] *= orientation_weight
        q = np.clip(q + _dls_step(J, err, damping), lo, hi)

    _, q_best, it_best, pos_err, ori_err = best
    return IKResult(q_best, False, it_best, pos_err, ori_err)


def resolve_rates(chain, q, twist, damping=DEFAULT_DAMPING):
    """Joint rates solving J qdot = twist by damped least squares.

    The damping bounds the solution norm near singular configurations;
    pass damping -> 0 to recover the exact solution at nonsingular q.
    """
    q = _check_q(chain, q)
    twist = np.asarray(twist, dtype=float)
    if twist.shape != (6,):
        raise DimensionError("twist must be a 6-vector")
    J = geometric_jacobian(chain, q)
    return _dls_step(J, twist, damping)


def orientation_distance(pose_a, pose_b):
    """Geodesic angle between the orientations of two poses."""
    return quat_geodesic(pose_a.quaternion, pose_b.quaternion)
