#pragma once

#include <initializer_list>

#include "onebit/sensing.hpp"

namespace testutil {

inline onebit::Vector vec(std::initializer_list<double> xs) {
  onebit::Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

template <typename A, typename B>
bool exact_eq(const A& a, const B& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (int j = 0; j < a.cols(); ++j)
    for (int i = 0; i < a.rows(); ++i)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

inline onebit::SensingMatrix literal_matrix(
    std::initializer_list<std::initializer_list<double>> rows) {
  onebit::SensingMatrix A;
  A.n = static_cast<int>(rows.size());
  A.d = static_cast<int>(rows.begin()->size());
  A.rows.resize(A.n, A.d);
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double x : r) A.rows(i, j++) = x;
    ++i;
  }
  return A;
}

}  // namespace testutil
