#pragma once

#include <gtest/gtest.h>

#include <initializer_list>
#include <memory>

#include "cleb/cleb.hpp"
#include "property_checks.hpp"

namespace cleb::testing {

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline BinaryVector bits(std::initializer_list<int> xs) {
  BinaryVector b;
  for (int x : xs) b.push_back(static_cast<std::uint8_t>(x));
  return b;
}

inline std::shared_ptr<const ActionSet> share(ActionSet S) { return std::make_shared<const ActionSet>(std::move(S)); }

inline void expect_near(const Vector& a, const Vector& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "coordinate " << i;
}

using properties::random_hull_point;

}  // namespace cleb::testing
