#pragma once

#include <cmath>

namespace optbal {

/// First-order dual number over an arbitrary scalar S.
///
/// Nesting Dual<Dual<...>> propagates one extra derivative direction per
/// level, which is how the slow-manifold recursion obtains its
/// Jacobian-vector products and time derivatives without ever forming a
/// Jacobian.
template <class S>
struct Dual {
  S val{};  // primal value
  S der{};  // derivative along the seeded direction

  Dual() = default;
  Dual(S v, S d) : val(std::move(v)), der(std::move(d)) {}
};

template <class S>
struct dual_depth {
  static constexpr int value = 0;
};
template <class S>
struct dual_depth<Dual<S>> {
  static constexpr int value = dual_depth<S>::value + 1;
};
template <class S>
inline constexpr int dual_depth_v = dual_depth<S>::value;

/// Builds the S representation of a plain real constant (zero derivatives).
template <class S>
inline S scalar_const(double x) {
  if constexpr (dual_depth_v<S> == 0) {
    return x;
  } else {
    return S{scalar_const<decltype(S{}.val)>(x), scalar_const<decltype(S{}.val)>(0.0)};
  }
}

inline double real_part(double x) { return x; }
template <class S>
inline double real_part(const Dual<S>& x) {
  return real_part(x.val);
}

template <class S>
inline Dual<S> operator+(const Dual<S>& a, const Dual<S>& b) {
  return {a.val + b.val, a.der + b.der};
}
template <class S>
inline Dual<S> operator-(const Dual<S>& a, const Dual<S>& b) {
  return {a.val - b.val, a.der - b.der};
}
template <class S>
inline Dual<S> operator-(const Dual<S>& a) {
  return {-a.val, -a.der};
}
template <class S>
inline Dual<S> operator*(const Dual<S>& a, const Dual<S>& b) {
  return {a.val * b.val, a.val * b.der + a.der * b.val};
}
template <class S>
inline Dual<S> operator/(const Dual<S>& a, const Dual<S>& b) {
  return {a.val / b.val, (a.der * b.val - a.val * b.der) / (b.val * b.val)};
}

template <class S>
inline Dual<S> operator+(const Dual<S>& a, double b) {
  return {a.val + scalar_const<S>(b), a.der};
}
template <class S>
inline Dual<S> operator+(double a, const Dual<S>& b) {
  return b + a;
}
template <class S>
inline Dual<S> operator-(const Dual<S>& a, double b) {
  return {a.val - scalar_const<S>(b), a.der};
}
template <class S>
inline Dual<S> operator-(double a, const Dual<S>& b) {
  return {scalar_const<S>(a) - b.val, -b.der};
}
template <class S>
inline Dual<S> operator*(const Dual<S>& a, double b) {
  const S bs = scalar_const<S>(b);
  return {a.val * bs, a.der * bs};
}
template <class S>
inline Dual<S> operator*(double a, const Dual<S>& b) {
  return b * a;
}
template <class S>
inline Dual<S> operator/(const Dual<S>& a, double b) {
  const S bs = scalar_const<S>(b);
  return {a.val / bs, a.der / bs};
}
template <class S>
inline Dual<S> operator/(double a, const Dual<S>& b) {
  return Dual<S>{scalar_const<S>(a), scalar_const<S>(0.0)} / b;
}

using std::exp;
template <class S>
inline Dual<S> exp(const Dual<S>& x) {
  const S e = exp(x.val);
  return {e, e * x.der};
}

}  // namespace optbal
