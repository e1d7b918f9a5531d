#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace doi {

/// Raised for structurally invalid networks and generator parameters.
class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symmetric, nonnegative, zero-diagonal weight matrix over `n` units, stored
/// as sorted per-row adjacency lists. Immutable once built.
class Network {
 public:
  struct Edge {
    std::size_t i;
    std::size_t j;
    double w;
  };

  Network() = default;
  /// Builds from undirected edges. Each (i, j, w) is mirrored; duplicates of the
  /// same unordered pair must agree on the weight. Zero-weight edges are dropped.
  Network(std::size_t n, std::span<const Edge> edges);

  std::size_t size() const { return neighbors_.size(); }
  std::span<const std::size_t> neighbors(std::size_t i) const { return neighbors_[i]; }
  std::span<const double> weights(std::size_t i) const { return weights_[i]; }
  std::size_t degree(std::size_t i) const { return neighbors_[i].size(); }
  double weighted_degree(std::size_t i) const;
  /// A_ij; zero when j is not a neighbour of i.
  double weight(std::size_t i, std::size_t j) const;
  std::size_t edge_count() const;
  /// Upper-triangle edge list, ordered by (i, j).
  std::vector<Edge> edges() const;
  bool connected() const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::vector<std::vector<std::size_t>> neighbors_;
  std::vector<std::vector<double>> weights_;
};

Network gen_erdos_renyi(std::size_t n, double p, std::uint64_t seed);

/// Preferential attachment grown from a ring on the first `n0` nodes
/// (a single edge when n0 == 2, no edges when n0 == 1).
Network gen_barabasi_albert(std::size_t n, std::size_t n0, std::size_t k, std::uint64_t seed);

/// Edge count of the ring seed graph used by gen_barabasi_albert.
std::size_t ring_edge_count(std::size_t n0);

/// A_ij = 1/|psi_i - psi_j| when the angular distance is within `cutoff`
/// (inclusive), 0 otherwise. With `wrap_around` the distance is taken on the
/// circle, min(d, 2*pi - d).
Network inverse_distance_network(std::span<const double> angles, double cutoff, bool wrap_around = false);

/// Complete graph inside each group of units sharing a label.
Network group_network(std::span<const std::int64_t> groups);

struct PageRankOptions {
  double damping = 0.85;
  double tol = 1e-10;
  std::size_t max_iter = 10000;
};

struct PageRankScores {
  std::vector<double> scores;
  double damping = 0.85;
  double tol = 1e-10;
  std::size_t iterations = 0;
  double residual = 0.0;
};

class PageRankNotConverged : public std::runtime_error {
 public:
  PageRankNotConverged(std::size_t iterations, double residual);
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Power iteration on the weighted-degree-normalised transition operator with
/// uniform teleportation; isolated nodes spread their mass uniformly.
PageRankScores pagerank(const Network& net, const PageRankOptions& opts = {});

/// One application of the damped operator used by pagerank().
std::vector<double> pagerank_operator(const Network& net, std::span<const double> x, double damping);

struct EdgeRecord {
  std::int64_t src;
  std::int64_t dst;
  double w;
};

/// Raw rows of an edge list CSV with header `src,dst,w`.
std::vector<EdgeRecord> parse_edge_records(std::istream& in);

/// Builds a network from edge rows whose endpoints are 0-based unit indices.
/// A pair listed in one direction only is mirrored and counted in `mirrored`;
/// a pair listed in both directions with different weights is rejected.
Network network_from_records(std::size_t n, std::span<const EdgeRecord> records, std::size_t* mirrored = nullptr);

Network read_edge_list(const std::filesystem::path& path, std::size_t n, std::size_t* mirrored = nullptr);
void write_edge_list(const Network& net, std::ostream& out);

}  // namespace doi
