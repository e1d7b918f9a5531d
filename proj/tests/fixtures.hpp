#pragma once

// Small hand-built datasets shared by the tests.

#include <Eigen/Dense>
#include <vector>

#include "doi/core.hpp"
#include "doi/network.hpp"

namespace fixtures {

inline doi::Network path_graph(std::size_t n) {
  std::vector<doi::Network::Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1.0});
  return doi::Network(n, e);
}

inline doi::Network ring_graph(std::size_t n) {
  std::vector<doi::Network::Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.push_back({i, (i + 1) % n, 1.0});
  return doi::Network(n, e);
}

/// Intercept plus one covariate column 0.1 * i - 0.2.
inline Eigen::MatrixXd intercept_x(std::size_t n) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    x(static_cast<Eigen::Index>(i), 0) = 1.0;
    x(static_cast<Eigen::Index>(i), 1) = 0.1 * static_cast<double>(i) - 0.2;
  }
  return x;
}

inline doi::Dataset dataset(doi::Network net, std::vector<double> z, std::vector<double> y) {
  doi::Dataset d;
  const std::size_t n = net.size();
  d.x = intercept_x(n);
  d.z = doi::Treatment::binary(std::move(z));
  d.y = std::move(y);
  d.net = std::move(net);
  return d;
}

}  // namespace fixtures
