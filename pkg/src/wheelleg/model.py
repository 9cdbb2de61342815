"""Robot morphology definitions: types, file format, validation, builtins.

A model file is UTF-8 structured text with ``#`` comments and sections

    [model]                     name
    [actuator.<name>]           mass_g, gear_ratio, peak_torque_nm, peak_speed_rpm
    [chain.<name>]              base_position, base_quaternion, joints
    [joint.<chain>.<joint>]     kind, a, alpha, d, theta_offset, limits, actuator
    [link.<chain>.<n>]          mass, com, inertia (1-based n, one per joint)
    [posture.<chain>.<mode>]    q

Angles are radians, lengths meters, masses kilograms. The full schema is
documented in docs/model_format.md. Models are immutable after load and
safe to share across threads.
"""

import configparser
import enum
import io
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import ModelFormatError, ModelValidationError
from .serialize import fmt


class JointKind(enum.Enum):
    REVOLUTE = "revolute"
    WHEEL = "wheel"


class Topology(enum.Enum):
    X2N = "x2n"
    CONVENTIONAL = "conventional"


BUILTIN_MODEL = "x2n"
BUILTIN_CHAIN = {Topology.X2N: "x2n_leg", Topology.CONVENTIONAL: "conventional_leg"}


@dataclass(frozen=True)
class DHRow:
    """Standard Denavit-Hartenberg parameters of one joint transform.

    The joint transform is Rz(theta_offset + q) * Tz(d) * Tx(a) * Rx(alpha).
    """

    a: float
    alpha: float
    d: float
    theta_offset: float


@dataclass(frozen=True)
class JointSpec:
    name: str
    kind: JointKind
    dh: DHRow
    limit_lo: float
    limit_hi: float
    velocity_limit: float
    actuator: str


@dataclass(frozen=True)
class LinkInertial:
    """Mass properties of one link: com and inertia in the link DH frame.

    The inertia tensor is taken about the link center of mass.
    """

    mass: float
    com: np.ndarray
    inertia: np.ndarray


@dataclass(frozen=True)
class RigidTransform:
    """Rigid transform stored as quaternion (w,x,y,z) plus translation.

    The quaternion is kept verbatim as loaded so model files round-trip
    field-exact; it is normalized when converted to a matrix.
    """

    quaternion: np.ndarray
    translation: np.ndarray

    @property
    def rotation(self):
        from .rotations import quat_to_matrix

        return quat_to_matrix(self.quaternion)

    def as_matrix(self):
        T = np.eye(4)
        T[:3, :3] = self.rotation
        T[:3, 3] = self.translation
        return T

    @staticmethod
    def identity():
        return RigidTransform(np.array([1.0, 0.0, 0.0, 0.0]), np.zeros(3))


@dataclass(frozen=True)
class KinematicChain:
    """Serial chain from the floating base (waist) to an end-effector."""

    name: str
    joints: tuple
    links: tuple
    base_pose: RigidTransform

    @property
    def joint_count(self):
        return len(self.joints)

    @property
    def joint_names(self):
        return [j.name for j in self.joints]

    def limits(self):
        """(lo, hi) arrays of position limits."""
        lo = np.array([j.limit_lo for j in self.joints])
        hi = np.array([j.limit_hi for j in self.joints])
        return lo, hi

    def velocity_limits(self):
        return np.array([j.velocity_limit for j in self.joints])


@dataclass(frozen=True)
class ActuatorSpec:
    name: str
    mass_g: float
    gear_ratio: float
    peak_torque_nm: float
    peak_speed_rpm: float

    @property
    def peak_speed_rad_s(self):
        return self.peak_speed_rpm * 2.0 * math.pi / 60.0


@dataclass(frozen=True)
class RobotModel:
    """Named chains plus per-link mass properties and the actuator catalog."""

    name: str
    chains: dict
    actuators: dict
    postures: dict = field(default_factory=dict)

    def chain(self, name):
        if name not in self.chains:
            raise ModelFormatError(
                f"unknown chain '{name}' (have: {', '.join(sorted(self.chains))})"
            )
        return self.chains[name]

    def posture(self, chain_name, mode):
        key = (chain_name, mode)
        if key not in self.postures:
            raise ModelFormatError(f"no posture '{mode}' for chain '{chain_name}'")
        return self.postures[key]


# ---------------------------------------------------------------------------
# parsing


def _floats(raw, n, ctx):
    parts = raw.split()
    if len(parts) != n:
        raise ModelFormatError(f"{ctx}: expected {n} numbers, got {len(parts)}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ModelFormatError(f"{ctx}: {exc}") from None


def _get(section, key, ctx, cast=float):
    if key not in section:
        raise ModelFormatError(f"{ctx}: missing key '{key}'")
    raw = section[key]
    if cast is str:
        return raw.strip()
    try:
        return cast(raw)
    except ValueError as exc:
        raise ModelFormatError(f"{ctx}: bad value for '{key}': {exc}") from None


def _quat_matrix(q):
    from .rotations import quat_to_matrix

    return quat_to_matrix(q)


def parse_model(text, source="<string>"):
    """Parse model text into a RobotModel. Raises ModelFormatError."""
    cp = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#",), strict=True
    )
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ModelFormatError(f"{source}: {exc}") from None

    name = "unnamed"
    if cp.has_section("model"):
        name = _get(cp["model"], "name", "[model]", str)

    actuators = {}
    chains = {}
    postures = {}
    chain_sections = {}

    for section in cp.sections():
        if section == "model":
            continue
        parts = section.split(".")
        kind = parts[0]
        ctx = f"[{section}]"
        if kind == "actuator" and len(parts) == 2:
            act = ActuatorSpec(
                name=parts[1],
                mass_g=_get(cp[section], "mass_g", ctx),
                gear_ratio=_get(cp[section], "gear_ratio", ctx),
                peak_torque_nm=_get(cp[section], "peak_torque_nm", ctx),
                peak_speed_rpm=_get(cp[section], "peak_speed_rpm", ctx),
            )
            actuators[act.name] = act
        elif kind == "chain" and len(parts) == 2:
            chain_sections[parts[1]] = cp[section]
        elif kind in ("joint", "link", "posture"):
            continue  # consumed below, keyed off their chain
        else:
            raise ModelFormatError(f"{ctx}: unrecognized section")

    for chain_name, section in chain_sections.items():
        ctx = f"[chain.{chain_name}]"
        base_pos = np.array(_floats(_get(section, "base_position", ctx, str), 3, ctx))
        base_quat = np.array(_floats(_get(section, "base_quaternion", ctx, str), 4, ctx))
        joint_names = _get(section, "joints", ctx, str).split()
        if not joint_names:
            raise ModelFormatError(f"{ctx}: empty joint list")

        joints = []
        for jname in joint_names:
            jsec_name = f"joint.{chain_name}.{jname}"
            jctx = f"[{jsec_name}]"
            if not cp.has_section(jsec_name):
                raise ModelFormatError(f"{ctx}: missing section {jctx}")
            js = cp[jsec_name]
            kind_raw = _get(js, "kind", jctx, str)
            try:
                jkind = JointKind(kind_raw)
            except ValueError:
                raise ModelFormatError(f"{jctx}: unknown joint kind '{kind_raw}'") from None
            joints.append(
                JointSpec(
                    name=jname,
                    kind=jkind,
                    dh=DHRow(
                        a=_get(js, "a", jctx),
                        alpha=_get(js, "alpha", jctx),
                        d=_get(js, "d", jctx),
                        theta_offset=_get(js, "theta_offset", jctx),
                    ),
                    limit_lo=_get(js, "limit_lo", jctx),
                    limit_hi=_get(js, "limit_hi", jctx),
                    velocity_limit=_get(js, "velocity_limit", jctx),
                    actuator=_get(js, "actuator", jctx, str),
                )
            )

        links = []
        for i in range(1, len(joint_names) + 1):
            lsec_name = f"link.{chain_name}.{i}"
            lctx = f"[{lsec_name}]"
            if not cp.has_section(lsec_name):
                raise ModelFormatError(f"{ctx}: missing section {lctx}")
            ls = cp[lsec_name]
            ixx, iyy, izz, ixy, ixz, iyz = _floats(
                _get(ls, "inertia", lctx, str), 6, lctx
            )
            links.append(
                LinkInertial(
                    mass=_get(ls, "mass", lctx),
                    com=np.array(_floats(_get(ls, "com", lctx, str), 3, lctx)),
                    inertia=np.array(
                        [[ixx, ixy, ixz], [ixy, iyy, iyz], [ixz, iyz, izz]]
                    ),
                )
            )

        chains[chain_name] = KinematicChain(
            name=chain_name,
            joints=tuple(joints),
            links=tuple(links),
            base_pose=RigidTransform(base_quat, base_pos),
        )

    for section in cp.sections():
        parts = section.split(".")
        if parts[0] == "posture":
            if len(parts) != 3:
                raise ModelFormatError(f"[{section}]: expected [posture.<chain>.<mode>]")
            _, chain_name, mode = parts
            ctx = f"[{section}]"
            if chain_name not in chains:
                raise ModelFormatError(f"{ctx}: unknown chain '{chain_name}'")
            n = chains[chain_name].joint_count
            postures[(chain_name, mode)] = np.array(
                _floats(_get(cp[section], "q", ctx, str), n, ctx)
            )
        elif parts[0] == "joint" and (len(parts) != 3 or parts[1] not in chains):
            raise ModelFormatError(f"[{section}]: joint section without matching chain")
        elif parts[0] == "link" and (len(parts) != 3 or parts[1] not in chains):
            raise ModelFormatError(f"[{section}]: link section without matching chain")

    return RobotModel(name=name, chains=chains, actuators=actuators, postures=postures)


def dumps_model(model):
    """Serialize a RobotModel back to model-file text (round-trip exact)."""
    out = io.StringIO()
    w = out.write
    w("[model]\n")
    w(f"name = {model.name}\n")
    for aname in sorted(model.actuators):
        act = model.actuators[aname]
        w(f"\n[actuator.{aname}]\n")
        w(f"mass_g = {fmt(act.mass_g)}\n")
        w(f"gear_ratio = {fmt(act.gear_ratio)}\n")
        w(f"peak_torque_nm = {fmt(act.peak_torque_nm)}\n")
        w(f"peak_speed_rpm = {fmt(act.peak_speed_rpm)}\n")
    for cname in sorted(model.chains):
        chain = model.chains[cname]
        quat = chain.base_pose.quaternion
        w(f"\n[chain.{cname}]\n")
        w(f"base_position = {' '.join(fmt(v) for v in chain.base_pose.translation)}\n")
        w(f"base_quaternion = {' '.join(fmt(v) for v in quat)}\n")
        w(f"joints = {' '.join(j.name for j in chain.joints)}\n")
        for j in chain.joints:
            w(f"\n[joint.{cname}.{j.name}]\n")
            w(f"kind = {j.kind.value}\n")
            w(f"a = {fmt(j.dh.a)}\n")
            w(f"alpha = {fmt(j.dh.alpha)}\n")
            w(f"d = {fmt(j.dh.d)}\n")
            w(f"theta_offset = {fmt(j.dh.theta_offset)}\n")
            w(f"limit_lo = {fmt(j.limit_lo)}\n")
            w(f"limit_hi = {fmt(j.limit_hi)}\n")
            w(f"velocity_limit = {fmt(j.velocity_limit)}\n")
            w(f"actuator = {j.actuator}\n")
        for i, link in enumerate(chain.links, start=1):
            inr = link.inertia
            w(f"\n[link.{cname}.{i}]\n")
            w(f"mass = {fmt(link.mass)}\n")
            w(f"com = {' '.join(fmt(v) for v in link.com)}\n")
            w(
                "inertia = "
                + " ".join(
                    fmt(v)
                    for v in (
                        inr[0, 0], inr[1, 1], inr[2, 2],
                        inr[0, 1], inr[0, 2], inr[1, 2],
                    )
                )
                + "\n"
            )
    for (cname, mode) in sorted(model.postures):
        w(f"\n[posture.{cname}.{mode}]\n")
        w(f"q = {' '.join(fmt(v) for v in model.postures[(cname, mode)])}\n")
    return out.getvalue()


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_model(model))


def load_model(path):
    """Load and validate a model file. Raises ModelFormatError / ModelValidationError."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file: {exc}") from None
    model = parse_model(text, source=str(path))
    violations = validate_model(model)
    if violations:
        raise ModelValidationError(violations)
    return model


def loads_model(text, source="<string>"):
    """Parse and validate model text."""
    model = parse_model(text, source=source)
    violations = validate_model(model)
    if violations:
        raise ModelValidationError(violations)
    return model


# ---------------------------------------------------------------------------
# validation


def _finite(*values):
    return all(math.isfinite(v) for v in values)


def validate_model(model):
    """Check every structural invariant; returns a list of violation strings.

    An empty list means the model is valid. Violations are data, not
    exceptions, so callers can report all of them at once.
    """
    v = []
    for cname, chain in model.chains.items():
        where = f"chain {cname}"
        if chain.joint_count < 1:
            v.append(f"{where}: chain has no joints")
            continue
        if len(chain.links) != len(chain.joints):
            v.append(
                f"{where}: {len(chain.links)} links for {len(chain.joints)} joints"
            )
        quat = chain.base_pose.quaternion
        if not np.all(np.isfinite(quat)) or abs(np.linalg.norm(quat) - 1.0) > 1e-9:
            v.append(f"{where}: base_quaternion must be unit norm (within 1e-9)")
        for j in chain.joints:
            jwhere = f"{where}, joint {j.name}"
            if not _finite(j.dh.a, j.dh.alpha, j.dh.d, j.dh.theta_offset):
                v.append(f"{jwhere}: non-finite DH parameters")
            elif j.dh.a < 0:
                v.append(f"{jwhere}: DH 'a' must be >= 0")
            if not j.limit_lo < j.limit_hi:
                v.append(f"{jwhere}: limit_lo must be < limit_hi")
            if not j.velocity_limit > 0:
                v.append(f"{jwhere}: velocity_limit must be > 0")
            if j.kind is JointKind.WHEEL and (
                math.isfinite(j.limit_lo) or math.isfinite(j.limit_hi)
            ):
                v.append(f"{jwhere}: wheel joints are continuous (limits must be +-inf)")
            if j.kind is JointKind.REVOLUTE and not _finite(j.limit_lo, j.limit_hi):
                v.append(f"{jwhere}: revolute joints need finite limits")
            if j.actuator not in model.actuators:
                v.append(f"{jwhere}: unknown actuator '{j.actuator}'")
        for i, link in enumerate(chain.links, start=1):
            lwhere = f"{where}, link {i}"
            if not math.isfinite(link.mass) or link.mass < 0:
                v.append(f"{lwhere}: mass must be finite and >= 0")
            if not np.all(np.isfinite(link.com)):
                v.append(f"{lwhere}: non-finite com")
            if not np.all(np.isfinite(link.inertia)):
                v.append(f"{lwhere}: non-finite inertia")
            elif not np.allclose(link.inertia, link.inertia.T, atol=1e-12):
                v.append(f"{lwhere}: inertia not symmetric")
            elif np.linalg.eigvalsh(link.inertia).min() < -1e-12:
                v.append(f"{lwhere}: inertia not PSD")
    for (cname, mode), q in model.postures.items():
        where = f"posture {cname}/{mode}"
        chain = model.chains[cname]
        if q.shape != (chain.joint_count,):
            v.append(f"{where}: wrong length")
            continue
        lo, hi = chain.limits()
        if np.any(q < lo) or np.any(q > hi):
            v.append(f"{where}: posture outside joint limits")
    for aname, act in model.actuators.items():
        where = f"actuator {aname}"
        for fname in ("mass_g", "gear_ratio", "peak_torque_nm", "peak_speed_rpm"):
            val = getattr(act, fname)
            if not math.isfinite(val) or val <= 0:
                v.append(f"{where}: {fname} must be finite and > 0")
    return v


# ---------------------------------------------------------------------------
# builtins


def builtin_model_text(name=BUILTIN_MODEL):
    ref = resources.files("wheelleg").joinpath("assets", f"{name}.model")
    try:
        return ref.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ModelFormatError(f"no builtin model '{name}'") from None


def builtin_model(name=BUILTIN_MODEL):
    """The robot model shipped with the package."""
    return loads_model(builtin_model_text(name), source=f"builtin:{name}")


def builtin_leg(topology):
    """Builtin leg chain for one of the two compared topologies."""
    topology = Topology(topology)
    return builtin_model().chains[BUILTIN_CHAIN[topology]]
