//! Exact geometric predicates on homogeneous rational points.
//!
//! A point is stored as an integer triple `(x, y, w)` with `w > 0` meaning
//! `(x/w, y/w)`. Predicates evaluate integer determinants: they run in
//! checked `i128` first and fall back to `BigInt` on overflow, so every
//! answer is exact regardless of coordinate size.

use crate::rational::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Homogeneous point with positive weight.
#[derive(Clone, Debug)]
pub enum HPt {
    Small([i128; 3]),
    Big(Box<[BigInt; 3]>),
}

/// Homogeneous direction (a nonzero 2-vector up to positive scaling).
#[derive(Clone, Debug)]
pub enum HVec {
    Small([i128; 2]),
    Big(Box<[BigInt; 2]>),
}

fn big3(p: &HPt) -> [BigInt; 3] {
    match p {
        HPt::Small([x, y, w]) => [BigInt::from(*x), BigInt::from(*y), BigInt::from(*w)],
        HPt::Big(b) => (**b).clone(),
    }
}

fn big2(v: &HVec) -> [BigInt; 2] {
    match v {
        HVec::Small([x, y]) => [BigInt::from(*x), BigInt::from(*y)],
        HVec::Big(b) => (**b).clone(),
    }
}

impl HPt {
    /// Builds from exact rational coordinates, reducing to a canonical triple.
    pub fn from_rationals(x: &Rational, y: &Rational) -> HPt {
        let (xn, xd) = (x.numer(), x.denom());
        let (yn, yd) = (y.numer(), y.denom());
        debug_assert!(xd.is_positive() && yd.is_positive());
        let g = xd.gcd(yd);
        let w: BigInt = xd / &g * yd;
        let xs = xn * (&w / xd);
        let ys = yn * (&w / yd);
        HPt::from_big(xs, ys, w)
    }

    /// Builds from an integer triple, normalizing sign and common factors.
    pub fn from_big(x: BigInt, y: BigInt, w: BigInt) -> HPt {
        assert!(!w.is_zero(), "homogeneous point at infinity");
        let (mut x, mut y, mut w) = (x, y, w);
        if w.is_negative() {
            x = -x;
            y = -y;
            w = -w;
        }
        let g = x.gcd(&y).gcd(&w);
        if !g.is_zero() && g != BigInt::from(1) {
            x /= &g;
            y /= &g;
            w /= &g;
        }
        match (x.to_i128(), y.to_i128(), w.to_i128()) {
            (Some(xs), Some(ys), Some(ws)) => HPt::Small([xs, ys, ws]),
            _ => HPt::Big(Box::new([x, y, w])),
        }
    }

    pub fn x(&self) -> Rational {
        let [x, _, w] = big3(self);
        Rational::new(x, w)
    }

    pub fn y(&self) -> Rational {
        let [_, y, w] = big3(self);
        Rational::new(y, w)
    }
}

fn sign_i128(v: i128) -> i8 {
    match v.cmp(&0) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

fn sign_big(v: &BigInt) -> i8 {
    match v.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

/// 3x3 determinant sign in checked i128; None on overflow.
fn det3_small(a: &[i128; 3], b: &[i128; 3], c: &[i128; 3]) -> Option<i8> {
    let m = |p: i128, q: i128| p.checked_mul(q);
    let s = |p: i128, q: i128| p.checked_sub(q);
    let minor1 = s(m(b[1], c[2])?, m(b[2], c[1])?)?;
    let minor2 = s(m(b[0], c[2])?, m(b[2], c[0])?)?;
    let minor3 = s(m(b[0], c[1])?, m(b[1], c[0])?)?;
    let t1 = m(a[0], minor1)?;
    let t2 = m(a[1], minor2)?;
    let t3 = m(a[2], minor3)?;
    Some(sign_i128(t1.checked_sub(t2)?.checked_add(t3)?))
}

fn det3_big(a: &[BigInt; 3], b: &[BigInt; 3], c: &[BigInt; 3]) -> i8 {
    let minor1 = &b[1] * &c[2] - &b[2] * &c[1];
    let minor2 = &b[0] * &c[2] - &b[2] * &c[0];
    let minor3 = &b[0] * &c[1] - &b[1] * &c[0];
    sign_big(&(&a[0] * minor1 - &a[1] * minor2 + &a[2] * minor3))
}

/// Orientation of the triple `(a, b, c)`: `1` counterclockwise, `-1`
/// clockwise, `0` collinear.
pub fn orient(a: &HPt, b: &HPt, c: &HPt) -> i8 {
    if let (HPt::Small(a), HPt::Small(b), HPt::Small(c)) = (a, b, c) {
        if let Some(s) = det3_small(a, b, c) {
            return s;
        }
    }
    det3_big(&big3(a), &big3(b), &big3(c))
}

/// Compares one coordinate of two points (`axis` 0 = x, 1 = y).
pub fn cmp_coord(a: &HPt, b: &HPt, axis: usize) -> Ordering {
    if let (HPt::Small(a), HPt::Small(b)) = (a, b) {
        if let (Some(l), Some(r)) = (a[axis].checked_mul(b[2]), b[axis].checked_mul(a[2])) {
            return l.cmp(&r);
        }
    }
    let (a, b) = (big3(a), big3(b));
    (&a[axis] * &b[2]).cmp(&(&b[axis] * &a[2]))
}

/// Lexicographic (x, then y) comparison.
pub fn cmp_lex(a: &HPt, b: &HPt) -> Ordering {
    cmp_coord(a, b, 0).then_with(|| cmp_coord(a, b, 1))
}

pub fn points_equal(a: &HPt, b: &HPt) -> bool {
    cmp_lex(a, b) == Ordering::Equal
}

/// True if `p` lies on the closed segment `ab`.
pub fn on_segment(p: &HPt, a: &HPt, b: &HPt) -> bool {
    if orient(a, b, p) != 0 {
        return false;
    }
    for axis in 0..2 {
        let pa = cmp_coord(p, a, axis);
        let pb = cmp_coord(p, b, axis);
        // p must not be strictly outside [min, max] on either axis
        if pa == pb && pa != Ordering::Equal {
            return false;
        }
    }
    true
}

/// Closed segment intersection test (shared points and overlap count).
pub fn segments_intersect(p1: &HPt, p2: &HPt, q1: &HPt, q2: &HPt) -> bool {
    let o1 = orient(p1, p2, q1);
    let o2 = orient(p1, p2, q2);
    let o3 = orient(q1, q2, p1);
    let o4 = orient(q1, q2, p2);
    if o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 {
        return true;
    }
    (o1 == 0 && on_segment(q1, p1, p2))
        || (o2 == 0 && on_segment(q2, p1, p2))
        || (o3 == 0 && on_segment(p1, q1, q2))
        || (o4 == 0 && on_segment(p2, q1, q2))
}

/// True iff open segment interiors cross in a single transversal point.
pub fn segments_cross_properly(p1: &HPt, p2: &HPt, q1: &HPt, q2: &HPt) -> bool {
    let o1 = orient(p1, p2, q1) as i32;
    let o2 = orient(p1, p2, q2) as i32;
    let o3 = orient(q1, q2, p1) as i32;
    let o4 = orient(q1, q2, p2) as i32;
    o1 * o2 < 0 && o3 * o4 < 0
}

/// True iff `p` lies in the closed triangle `abc` (any orientation).
pub fn in_closed_triangle(p: &HPt, a: &HPt, b: &HPt, c: &HPt) -> bool {
    let o1 = orient(a, b, p);
    let o2 = orient(b, c, p);
    let o3 = orient(c, a, p);
    (o1 >= 0 && o2 >= 0 && o3 >= 0) || (o1 <= 0 && o2 <= 0 && o3 <= 0)
}

/// True iff `p` lies strictly inside the triangle `abc`.
pub fn strictly_in_triangle(p: &HPt, a: &HPt, b: &HPt, c: &HPt) -> bool {
    let o1 = orient(a, b, p);
    let o2 = orient(b, c, p);
    let o3 = orient(c, a, p);
    (o1 > 0 && o2 > 0 && o3 > 0) || (o1 < 0 && o2 < 0 && o3 < 0)
}

/// Intersection point of the lines `ab` and `cd`; `None` when parallel.
pub fn line_intersection(a: &HPt, b: &HPt, c: &HPt, d: &HPt) -> Option<HPt> {
    let a = big3(a);
    let b = big3(b);
    let c = big3(c);
    let d = big3(d);
    let cross = |p: &[BigInt; 3], q: &[BigInt; 3]| -> [BigInt; 3] {
        [
            &p[1] * &q[2] - &p[2] * &q[1],
            &p[2] * &q[0] - &p[0] * &q[2],
            &p[0] * &q[1] - &p[1] * &q[0],
        ]
    };
    let l1 = cross(&a, &b);
    let l2 = cross(&c, &d);
    let [x, y, w] = cross(&l1, &l2);
    if w.is_zero() {
        return None;
    }
    Some(HPt::from_big(x, y, w))
}

/// Direction from `from` toward `to`, reduced to a primitive vector.
pub fn direction(from: &HPt, to: &HPt) -> HVec {
    let reduce_big = |x: BigInt, y: BigInt| -> HVec {
        let g = x.gcd(&y);
        let (x, y) = if g.is_zero() || g == BigInt::from(1) {
            (x, y)
        } else {
            (x / &g, y / &g)
        };
        match (x.to_i128(), y.to_i128()) {
            (Some(xs), Some(ys)) => HVec::Small([xs, ys]),
            _ => HVec::Big(Box::new([x, y])),
        }
    };
    if let (HPt::Small([fx, fy, fw]), HPt::Small([tx, ty, tw])) = (from, to) {
        let x = tx.checked_mul(*fw).and_then(|l| fx.checked_mul(*tw).and_then(|r| l.checked_sub(r)));
        let y = ty.checked_mul(*fw).and_then(|l| fy.checked_mul(*tw).and_then(|r| l.checked_sub(r)));
        if let (Some(x), Some(y)) = (x, y) {
            let g = x.gcd(&y);
            let (x, y) = if g == 0 || g == 1 { (x, y) } else { (x / g, y / g) };
            return HVec::Small([x, y]);
        }
    }
    let f = big3(from);
    let t = big3(to);
    reduce_big(&t[0] * &f[2] - &f[0] * &t[2], &t[1] * &f[2] - &f[1] * &t[2])
}

impl HVec {
    pub fn is_zero(&self) -> bool {
        match self {
            HVec::Small([x, y]) => *x == 0 && *y == 0,
            HVec::Big(b) => b[0].is_zero() && b[1].is_zero(),
        }
    }

    /// 0 for directions in the half-open upper half `[0, π)` measured from
    /// the positive x-axis, 1 for `[π, 2π)`.
    pub fn half(&self) -> u8 {
        let (sx, sy) = match self {
            HVec::Small([x, y]) => (sign_i128(*x), sign_i128(*y)),
            HVec::Big(b) => (sign_big(&b[0]), sign_big(&b[1])),
        };
        if sy > 0 || (sy == 0 && sx > 0) {
            0
        } else {
            1
        }
    }
}

/// Sign of the cross product `u × v`.
pub fn cross_sign(u: &HVec, v: &HVec) -> i8 {
    if let (HVec::Small(u), HVec::Small(v)) = (u, v) {
        if let (Some(a), Some(b)) = (u[0].checked_mul(v[1]), u[1].checked_mul(v[0])) {
            if let Some(d) = a.checked_sub(b) {
                return sign_i128(d);
            }
        }
    }
    let (u, v) = (big2(u), big2(v));
    sign_big(&(&u[0] * &v[1] - &u[1] * &v[0]))
}

/// Sign of the dot product `u · v`.
pub fn dot_sign(u: &HVec, v: &HVec) -> i8 {
    if let (HVec::Small(u), HVec::Small(v)) = (u, v) {
        if let (Some(a), Some(b)) = (u[0].checked_mul(v[0]), u[1].checked_mul(v[1])) {
            if let Some(d) = a.checked_add(b) {
                return sign_i128(d);
            }
        }
    }
    let (u, v) = (big2(u), big2(v));
    sign_big(&(&u[0] * &v[0] + &u[1] * &v[1]))
}

/// Counterclockwise angular order starting at the positive x-axis.
/// Directions must be nonzero; equal directions compare equal.
pub fn cmp_angle(u: &HVec, v: &HVec) -> Ordering {
    u.half().cmp(&v.half()).then_with(|| match cross_sign(u, v) {
        1 => Ordering::Less,
        -1 => Ordering::Greater,
        _ => {
            debug_assert!(dot_sign(u, v) > 0, "antipodal directions in one half");
            Ordering::Equal
        }
    })
}

/// Squared distance from the origin to `p`, exactly.
pub fn dist2_origin(p: &HPt) -> Rational {
    let [x, y, w] = big3(p);
    Rational::new(&x * &x + &y * &y, &w * &w)
}

/// Squared Euclidean distance between two points, exactly.
pub fn dist2(p: &HPt, q: &HPt) -> Rational {
    let dx = p.x() - q.x();
    let dy = p.y() - q.y();
    &dx * &dx + &dy * &dy
}

/// Squared distance from point `p` to the closed segment `ab`, exactly.
pub fn dist2_point_segment(p: &HPt, a: &HPt, b: &HPt) -> Rational {
    let (px, py) = (p.x(), p.y());
    let (ax, ay) = (a.x(), a.y());
    let (bx, by) = (b.x(), b.y());
    let dx = &bx - &ax;
    let dy = &by - &ay;
    let len2 = &dx * &dx + &dy * &dy;
    if len2.is_zero() {
        let ex = &px - &ax;
        let ey = &py - &ay;
        return &ex * &ex + &ey * &ey;
    }
    let t_num = (&px - &ax) * &dx + (&py - &ay) * &dy;
    let t = if t_num.is_negative() {
        Rational::zero()
    } else if t_num > len2 {
        Rational::from_integer(1.into())
    } else {
        t_num / &len2
    };
    let cx = &ax + &dx * &t;
    let cy = &ay + &dy * &t;
    let ex = &px - cx;
    let ey = &py - cy;
    &ex * &ex + &ey * &ey
}

/// Squared distance between two closed segments, exactly.
pub fn dist2_segments(a1: &HPt, a2: &HPt, b1: &HPt, b2: &HPt) -> Rational {
    if segments_intersect(a1, a2, b1, b2) {
        return Rational::zero();
    }
    let candidates = [
        dist2_point_segment(a1, b1, b2),
        dist2_point_segment(a2, b1, b2),
        dist2_point_segment(b1, a1, a2),
        dist2_point_segment(b2, a1, a2),
    ];
    candidates.into_iter().min().expect("four candidates")
}

/// True iff the segment `ab` intersects the closed triangle region `t1 t2 t3`.
pub fn segment_meets_triangle(a: &HPt, b: &HPt, t1: &HPt, t2: &HPt, t3: &HPt) -> bool {
    in_closed_triangle(a, t1, t2, t3)
        || in_closed_triangle(b, t1, t2, t3)
        || segments_intersect(a, b, t1, t2)
        || segments_intersect(a, b, t2, t3)
        || segments_intersect(a, b, t3, t1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn pt(x: i128, y: i128) -> HPt {
        HPt::Small([x, y, 1])
    }

    fn rpt(xn: i64, xd: i64, yn: i64, yd: i64) -> HPt {
        HPt::from_rationals(&ratio(xn, xd), &ratio(yn, yd))
    }

    #[test]
    fn orientation_basics() {
        assert_eq!(orient(&pt(0, 0), &pt(1, 0), &pt(0, 1)), 1);
        assert_eq!(orient(&pt(0, 0), &pt(0, 1), &pt(1, 0)), -1);
        assert_eq!(orient(&pt(0, 0), &pt(1, 1), &pt(2, 2)), 0);
    }

    #[test]
    fn orientation_overflow_falls_back() {
        let huge = HPt::Small([i128::MAX / 2, i128::MAX / 3, 1]);
        let a = pt(0, 0);
        let b = pt(1, 0);
        // must not panic, and the sign is that of the y coordinate
        assert_eq!(orient(&a, &b, &huge), 1);
    }

    #[test]
    fn closed_triangle_membership() {
        let (a, b, c) = (pt(0, 0), pt(4, 0), pt(0, 4));
        assert!(in_closed_triangle(&rpt(1, 4, 1, 4), &a, &b, &c));
        assert!(in_closed_triangle(&pt(2, 2), &a, &b, &c), "hypotenuse is closed");
        assert!(!in_closed_triangle(&pt(3, 3), &a, &b, &c));
        assert!(strictly_in_triangle(&pt(1, 1), &a, &b, &c));
        assert!(!strictly_in_triangle(&pt(2, 2), &a, &b, &c));
    }

    #[test]
    fn segment_tests() {
        assert!(on_segment(&pt(1, 1), &pt(0, 0), &pt(2, 2)));
        assert!(!on_segment(&pt(3, 3), &pt(0, 0), &pt(2, 2)));
        assert!(segments_intersect(&pt(0, 0), &pt(2, 2), &pt(0, 2), &pt(2, 0)));
        assert!(segments_cross_properly(&pt(0, 0), &pt(2, 2), &pt(0, 2), &pt(2, 0)));
        // touching at an endpoint intersects but is not a proper crossing
        assert!(segments_intersect(&pt(0, 0), &pt(2, 2), &pt(2, 2), &pt(3, 0)));
        assert!(!segments_cross_properly(&pt(0, 0), &pt(2, 2), &pt(2, 2), &pt(3, 0)));
        assert!(!segments_intersect(&pt(0, 0), &pt(1, 0), &pt(0, 1), &pt(1, 1)));
    }

    #[test]
    fn line_intersection_diagonals() {
        let q = line_intersection(&pt(0, 0), &pt(1, 1), &pt(0, 1), &pt(1, 0)).unwrap();
        assert_eq!(q.x(), ratio(1, 2));
        assert_eq!(q.y(), ratio(1, 2));
        assert!(line_intersection(&pt(0, 0), &pt(1, 0), &pt(0, 1), &pt(1, 1)).is_none());
    }

    #[test]
    fn angular_order() {
        let dirs = [
            HVec::Small([1, 0]),
            HVec::Small([1, 1]),
            HVec::Small([0, 1]),
            HVec::Small([-1, 1]),
            HVec::Small([-1, 0]),
            HVec::Small([-1, -1]),
            HVec::Small([0, -1]),
            HVec::Small([1, -1]),
        ];
        for w in dirs.windows(2) {
            assert_eq!(cmp_angle(&w[0], &w[1]), Ordering::Less);
        }
        assert_eq!(
            cmp_angle(&HVec::Small([2, 2]), &HVec::Small([5, 5])),
            Ordering::Equal
        );
    }

    #[test]
    fn distances() {
        assert_eq!(dist2_origin(&rpt(1, 2, 0, 1)), ratio(1, 4));
        assert_eq!(dist2_point_segment(&pt(0, 0), &pt(1, -1), &pt(1, 1)), ratio(1, 1));
        assert_eq!(dist2_point_segment(&pt(0, 0), &pt(1, 2), &pt(1, 5)), ratio(5, 1));
        assert_eq!(
            dist2_segments(&pt(0, 0), &pt(1, 0), &pt(0, 2), &pt(1, 2)),
            ratio(4, 1)
        );
    }
}
