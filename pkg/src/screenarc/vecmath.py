"""Small 3-vector / quaternion toolkit over plain tuples.

Conventions: right-handed world frame with +x forward, +y left, +z up.
Quaternions are (w, x, y, z) and must be unit length.  Everything here is
pure and allocation-light; no numpy so that results are bit-reproducible
across platforms.
"""

from __future__ import annotations

import math

Vec3 = tuple[float, float, float]
Quat = tuple[float, float, float, float]

X_AXIS: Vec3 = (1.0, 0.0, 0.0)
Y_AXIS: Vec3 = (0.0, 1.0, 0.0)
Z_AXIS: Vec3 = (0.0, 0.0, 1.0)
IDENTITY_QUAT: Quat = (1.0, 0.0, 0.0, 0.0)


def vadd(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vsub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vscale(a: Vec3, s: float) -> Vec3:
    return (a[0] * s, a[1] * s, a[2] * s)


def vdot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def vcross(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def vnorm(a: Vec3) -> float:
    return math.sqrt(vdot(a, a))


def vnormalize(a: Vec3) -> Vec3:
    n = vnorm(a)
    if n == 0.0:
        raise ValueError("cannot normalize zero vector")
    return (a[0] / n, a[1] / n, a[2] / n)


def vdist(a: Vec3, b: Vec3) -> float:
    return vnorm(vsub(a, b))


def qnorm(q: Quat) -> float:
    return math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])


def qnormalize(q: Quat) -> Quat:
    n = qnorm(q)
    if n == 0.0:
        raise ValueError("cannot normalize zero quaternion")
    return (q[0] / n, q[1] / n, q[2] / n, q[3] / n)


def qmul(a: Quat, b: Quat) -> Quat:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def qrotate(q: Quat, v: Vec3) -> Vec3:
    """Rotate vector v by unit quaternion q."""
    w, x, y, z = q
    # v' = v + 2*r x (r x v + w*v),  r = (x, y, z)
    rx, ry, rz = x, y, z
    cx = ry * v[2] - rz * v[1] + w * v[0]
    cy = rz * v[0] - rx * v[2] + w * v[1]
    cz = rx * v[1] - ry * v[0] + w * v[2]
    return (
        v[0] + 2.0 * (ry * cz - rz * cy),
        v[1] + 2.0 * (rz * cx - rx * cz),
        v[2] + 2.0 * (rx * cy - ry * cx),
    )


def quat_from_yaw(yaw_rad: float) -> Quat:
    """Rotation about the vertical (+z) axis; yaw 0 faces +x."""
    h = 0.5 * yaw_rad
    return (math.cos(h), 0.0, 0.0, math.sin(h))


def quat_from_axis_angle(axis: Vec3, angle_rad: float) -> Quat:
    ax = vnormalize(axis)
    h = 0.5 * angle_rad
    s = math.sin(h)
    return (math.cos(h), ax[0] * s, ax[1] * s, ax[2] * s)
