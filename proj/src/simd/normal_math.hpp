#pragma once

// Box-Muller transform written once against a small backend interface so the
// scalar and vector builds run the same IEEE operation sequence. Only +, -, *,
// /, sqrt, floor and bit manipulation are used; no libm calls and no FMA.
//
// Backend requirements (B::V is the lane type, B::M a lane mask):
//   set1, add, sub, mul, div, sqrt, floor, gt, eq, select(mask, a, b),
//   split_exponent(x, &mantissa) -> unbiased exponent as V (mantissa in [1, 2)).

namespace sigmalab::simd::math {

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kHalfPi = 1.57079632679489661923;

/// Natural log for x in (0, 1]. Relative error ~1e-16.
template <class B>
typename B::V log_unit(typename B::V x) {
  using V = typename B::V;
  V mant;
  V expo = B::split_exponent(x, mant);
  const auto big = B::gt(mant, B::set1(kSqrt2));
  mant = B::select(big, B::mul(mant, B::set1(0.5)), mant);
  expo = B::select(big, B::add(expo, B::set1(1.0)), expo);

  // log(m) = 2 atanh(f), f = (m-1)/(m+1), |f| <= 0.1716
  const V f = B::div(B::sub(mant, B::set1(1.0)), B::add(mant, B::set1(1.0)));
  const V s = B::mul(f, f);
  V p = B::set1(1.0 / 23.0);
  p = B::add(B::mul(p, s), B::set1(1.0 / 21.0));
  p = B::add(B::mul(p, s), B::set1(1.0 / 19.0));
  p = B::add(B::mul(p, s), B::set1(1.0 / 17.0));
  p = B::add(B::mul(p, s), B::set1(1.0 / 15.0));
  p = B::add(B::mul(p, s), B::set1(1.0 / 13.0));
  p = B::add(B::mul(p, s), B::set1(1.0 / 11.0));
  p = B::add(B::mul(p, s), B::set1(1.0 / 9.0));
  p = B::add(B::mul(p, s), B::set1(1.0 / 7.0));
  p = B::add(B::mul(p, s), B::set1(1.0 / 5.0));
  p = B::add(B::mul(p, s), B::set1(1.0 / 3.0));
  // 2f + 2f*s*p keeps the leading term exact
  const V two_f = B::add(f, f);
  const V log_m = B::add(two_f, B::mul(two_f, B::mul(s, p)));
  return B::add(B::mul(expo, B::set1(kLn2Hi)), B::add(B::mul(expo, B::set1(kLn2Lo)), log_m));
}

template <class B>
void sincos_poly(typename B::V x, typename B::V& s, typename B::V& c) {
  using V = typename B::V;
  const V x2 = B::mul(x, x);
  // sin: x * (1 - x^2/3! + ... - x^16/17!)
  V ps = B::set1(1.0 / 355687428096000.0);
  ps = B::sub(B::mul(ps, x2), B::set1(1.0 / 1307674368000.0));
  ps = B::add(B::mul(ps, x2), B::set1(1.0 / 6227020800.0));
  ps = B::sub(B::mul(ps, x2), B::set1(1.0 / 39916800.0));
  ps = B::add(B::mul(ps, x2), B::set1(1.0 / 362880.0));
  ps = B::sub(B::mul(ps, x2), B::set1(1.0 / 5040.0));
  ps = B::add(B::mul(ps, x2), B::set1(1.0 / 120.0));
  ps = B::sub(B::mul(ps, x2), B::set1(1.0 / 6.0));
  s = B::add(x, B::mul(B::mul(x, x2), ps));
  // cos: 1 - x^2/2! + ... + x^16/16!
  V pc = B::set1(1.0 / 20922789888000.0);
  pc = B::sub(B::mul(pc, x2), B::set1(1.0 / 87178291200.0));
  pc = B::add(B::mul(pc, x2), B::set1(1.0 / 479001600.0));
  pc = B::sub(B::mul(pc, x2), B::set1(1.0 / 3628800.0));
  pc = B::add(B::mul(pc, x2), B::set1(1.0 / 40320.0));
  pc = B::sub(B::mul(pc, x2), B::set1(1.0 / 720.0));
  pc = B::add(B::mul(pc, x2), B::set1(1.0 / 24.0));
  pc = B::sub(B::mul(pc, x2), B::set1(0.5));
  c = B::add(B::set1(1.0), B::mul(x2, pc));
}

/// sin and cos of 2*pi*turns for turns in [0, 1).
template <class B>
void sincos_turns(typename B::V turns, typename B::V& s, typename B::V& c) {
  using V = typename B::V;
  const V four_t = B::mul(turns, B::set1(4.0));   // exact
  const V quadrant = B::floor(four_t);
  const V r = B::sub(four_t, quadrant);           // exact, in [0, 1)
  const auto flip = B::gt(r, B::set1(0.5));
  const V r_red = B::select(flip, B::sub(B::set1(1.0), r), r);  // exact
  V sx, cx;
  sincos_poly<B>(B::mul(r_red, B::set1(kHalfPi)), sx, cx);
  const V base_s = B::select(flip, cx, sx);
  const V base_c = B::select(flip, sx, cx);

  const auto q1 = B::eq(quadrant, B::set1(1.0));
  const auto q2 = B::eq(quadrant, B::set1(2.0));
  const auto q3 = B::eq(quadrant, B::set1(3.0));
  const auto swap = B::mask_or(q1, q3);
  const V s1 = B::select(swap, base_c, base_s);
  const V c1 = B::select(swap, base_s, base_c);
  const V zero = B::set1(0.0);
  s = B::select(B::mask_or(q2, q3), B::sub(zero, s1), s1);
  c = B::select(B::mask_or(q1, q2), B::sub(zero, c1), c1);
}

/// Box-Muller on one Philox block's worth of bits, pre-split into the 27- and
/// 26-bit halves of two 53-bit uniforms. u1 lies in (0, 1], u2 in [0, 1).
template <class B>
void box_muller(typename B::V a1, typename B::V b1, typename B::V a2, typename B::V b2,
                typename B::V& n0, typename B::V& n1) {
  using V = typename B::V;
  const V scale = B::set1(0x1.0p-53);
  const V two26 = B::set1(0x1.0p26);
  const V u1 = B::mul(B::add(B::add(B::mul(a1, two26), b1), B::set1(1.0)), scale);
  const V u2 = B::mul(B::add(B::mul(a2, two26), b2), scale);
  const V radius = B::sqrt(B::mul(B::set1(-2.0), log_unit<B>(u1)));
  V s, c;
  sincos_turns<B>(u2, s, c);
  n0 = B::mul(radius, c);
  n1 = B::mul(radius, s);
}

} // namespace sigmalab::simd::math
