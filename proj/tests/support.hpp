#pragma once

// Shared fixtures for the solver tests.

#include "dlm/bench/manufactured.hpp"
#include "dlm/dlm.hpp"
#include "dlm/newton.hpp"

#include <random>
#include <vector>

namespace testing_support {

using namespace dlm;

template <int Dim>
CollocationSet<Dim> points_for(const Domain<Dim>& d, const BoundaryPartition& part, int N, double s = 0.5) {
  const auto [ni, nb] = split_center_count<Dim>(N);
  return generate_collocation(d, part, ni, nb, PointStrategy::Equispaced, s);
}

template <typename T, int Dim>
CollocationSet<Dim> points_for(const bench::ManufacturedCase<T, Dim>& mc, int N, double s = 0.5) {
  return points_for(mc.problem.domain, mc.problem.partition, N, s);
}

inline std::vector<Point<1>> line_grid(int n, double a = 0.0, double b = 1.0) {
  std::vector<Point<1>> g;
  for (int i = 0; i < n; ++i) g.push_back(Point<1>(a + (b - a) * i / (n - 1)));
  return g;
}

inline std::vector<Point<2>> square_grid(int n) {
  std::vector<Point<2>> g;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g.push_back(Point<2>(double(i) / (n - 1), double(j) / (n - 1)));
  }
  return g;
}

template <typename T, int Dim>
double max_diff(const Expansion<T, Dim>& a, const Expansion<T, Dim>& b, const std::vector<Point<Dim>>& grid) {
  using std::abs;
  double m = 0;
  for (const auto& x : grid) m = std::max(m, to_double(T(abs(a.value(x) - b.value(x)))));
  return m;
}

template <typename T, int Dim, typename F>
double max_error(const Expansion<T, Dim>& u, const F& exact, const std::vector<Point<Dim>>& grid) {
  using std::abs;
  double m = 0;
  for (const auto& x : grid) m = std::max(m, to_double(T(abs(u.value(x) - exact(x)))));
  return m;
}

/// Exact v boundary data and a consistency grid for a manufactured case.
template <typename T, int Dim>
DlmOptions<T, Dim> exact_v_options(const bench::ManufacturedCase<T, Dim>& mc, std::vector<Point<Dim>> grid) {
  DlmOptions<T, Dim> o;
  o.v_source = VBoundarySource::ExactField;
  o.v_exact = mc.v_exact;
  o.consistency_points = std::move(grid);
  return o;
}

}  // namespace testing_support
