#pragma once

#include "sqlift/sqlift.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <initializer_list>

namespace th {

using namespace sqlift;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = r ? static_cast<Index>(rows.begin()->size()) : 0;
  Matrix m(r, c);
  Index i = 0;
  for (const auto &row : rows) {
    Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

/// f = ½x², g = ι of R₊; the lift is ½y⁴.
inline QuadraticProblem quartic() {
  return {SmoothQuadratic(mat({{1}}), vec({0}), 0.0), PolyhedralFunction::nonnegative_indicator(1)};
}
/// f = ½(x−1)², g = ι of R₊; the lift is ½(y²−1)².
inline QuadraticProblem nnls1() {
  return {SmoothQuadratic::distance_to(vec({1})), PolyhedralFunction::nonnegative_indicator(1)};
}
/// f = ½‖x − (1,−1)‖², g = ι of R²₊.
inline QuadraticProblem orthant2() {
  return {SmoothQuadratic::distance_to(vec({1, -1})), PolyhedralFunction::nonnegative_indicator(2)};
}
/// f = ⟨(1,2), x⟩ on the unit simplex of R².
inline QuadraticProblem simplex_linear() {
  return {SmoothQuadratic::linear(vec({1, 2})), PolyhedralFunction::simplex_indicator(2)};
}
/// ι of the single point {0} in R¹.
inline PolyhedralFunction origin_indicator() {
  Polyhedron p(1);
  p.add_equality(vec({1}), 0.0);
  return PolyhedralFunction::indicator(p);
}

inline ErrorKind kind_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an exception";
  return ErrorKind::IOError;
}

} // namespace th

#define EXPECT_ERROR_KIND(stmt, k) EXPECT_EQ(th::kind_of([&] { (void)(stmt); }), (k))
