#include "doi/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <queue>
#include <sstream>

#include "csv.hpp"
#include "doi/rng.hpp"

namespace doi {

Network::Network(std::size_t n, std::span<const Edge> edges) : neighbors_(n), weights_(n) {
  std::map<std::pair<std::size_t, std::size_t>, double> pairs;
  for (const auto& e : edges) {
    if (e.i >= n || e.j >= n) throw NetworkError("edge endpoint out of range");
    if (e.i == e.j) throw NetworkError("self-loop at unit " + std::to_string(e.i));
    if (!std::isfinite(e.w) || e.w < 0.0) throw NetworkError("edge weights must be finite and nonnegative");
    const auto key = std::minmax(e.i, e.j);
    auto [it, inserted] = pairs.emplace(key, e.w);
    if (!inserted && it->second != e.w)
      throw NetworkError("conflicting weights for pair (" + std::to_string(key.first) + "," +
                         std::to_string(key.second) + ")");
  }
  for (const auto& [key, w] : pairs) {
    if (w == 0.0) continue;
    neighbors_[key.first].push_back(key.second);
    weights_[key.first].push_back(w);
    neighbors_[key.second].push_back(key.first);
    weights_[key.second].push_back(w);
  }
  // Map iteration already yields sorted rows for the first endpoint; the mirrored
  // side needs a sort.
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> order(neighbors_[i].size());
    for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return neighbors_[i][a] < neighbors_[i][b]; });
    std::vector<std::size_t> nb(order.size());
    std::vector<double> wt(order.size());
    for (std::size_t t = 0; t < order.size(); ++t) {
      nb[t] = neighbors_[i][order[t]];
      wt[t] = weights_[i][order[t]];
    }
    neighbors_[i] = std::move(nb);
    weights_[i] = std::move(wt);
  }
}

double Network::weighted_degree(std::size_t i) const {
  double s = 0.0;
  for (double w : weights_[i]) s += w;
  return s;
}

double Network::weight(std::size_t i, std::size_t j) const {
  const auto& nb = neighbors_[i];
  const auto it = std::lower_bound(nb.begin(), nb.end(), j);
  if (it == nb.end() || *it != j) return 0.0;
  return weights_[i][static_cast<std::size_t>(it - nb.begin())];
}

std::size_t Network::edge_count() const {
  std::size_t twice = 0;
  for (const auto& nb : neighbors_) twice += nb.size();
  return twice / 2;
}

std::vector<Network::Edge> Network::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t t = 0; t < neighbors_[i].size(); ++t)
      if (neighbors_[i][t] > i) out.push_back({i, neighbors_[i][t], weights_[i][t]});
  return out;
}

bool Network::connected() const {
  if (size() <= 1) return true;
  std::vector<char> seen(size(), 0);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (auto v : neighbors_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
    }
  }
  return count == size();
}

Network gen_erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (n < 1) throw NetworkError("erdos-renyi: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw NetworkError("erdos-renyi: p must lie in [0, 1]");
  Rng rng(seed);
  std::vector<Network::Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform() < p) edges.push_back({i, j, 1.0});
  return Network(n, edges);
}

std::size_t ring_edge_count(std::size_t n0) {
  if (n0 <= 1) return 0;
  if (n0 == 2) return 1;
  return n0;
}

Network gen_barabasi_albert(std::size_t n, std::size_t n0, std::size_t k, std::uint64_t seed) {
  if (k < 1 || n0 < k || n < n0)
    throw NetworkError("barabasi-albert: requires 1 <= k <= n0 <= n");
  Rng rng(seed);
  std::vector<Network::Edge> edges;
  // Each endpoint appears once per incident edge, so a uniform pick is
  // degree-proportional.
  std::vector<std::size_t> pool;
  auto add = [&](std::size_t a, std::size_t b) {
    edges.push_back({a, b, 1.0});
    pool.push_back(a);
    pool.push_back(b);
  };
  if (n0 == 2) {
    add(0, 1);
  } else if (n0 >= 3) {
    for (std::size_t i = 0; i < n0; ++i) add(i, (i + 1) % n0);
  }
  std::vector<std::size_t> chosen;
  for (std::size_t v = n0; v < n; ++v) {
    chosen.clear();
    while (chosen.size() < k) {
      const std::size_t t = pool.empty() ? rng.uniform_index(v) : pool[rng.uniform_index(pool.size())];
      if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) chosen.push_back(t);
    }
    for (auto t : chosen) add(t, v);
  }
  return Network(n, edges);
}

Network inverse_distance_network(std::span<const double> angles, double cutoff, bool wrap_around) {
  if (!(cutoff > 0.0)) throw NetworkError("inverse-distance: cutoff must be > 0");
  const std::size_t n = angles.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(angles[i])) throw NetworkError("inverse-distance: angles must be finite");
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return angles[a] < angles[b]; });
  for (std::size_t t = 1; t < n; ++t)
    if (angles[order[t]] == angles[order[t - 1]])
      throw NetworkError("inverse-distance: duplicate angle at units " + std::to_string(order[t - 1]) + " and " +
                         std::to_string(order[t]));
  std::vector<Network::Edge> edges;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = std::abs(angles[i] - angles[j]);
      if (wrap_around) d = std::min(d, kTwoPi - d);
      if (d <= cutoff) edges.push_back({i, j, 1.0 / d});
    }
  }
  return Network(n, edges);
}

Network group_network(std::span<const std::int64_t> groups) {
  std::map<std::int64_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < groups.size(); ++i) members[groups[i]].push_back(i);
  std::vector<Network::Edge> edges;
  for (const auto& [g, units] : members)
    for (std::size_t a = 0; a < units.size(); ++a)
      for (std::size_t b = a + 1; b < units.size(); ++b) edges.push_back({units[a], units[b], 1.0});
  return Network(groups.size(), edges);
}

PageRankNotConverged::PageRankNotConverged(std::size_t iterations, double residual)
    : std::runtime_error("pagerank did not converge after " + std::to_string(iterations) +
                         " iterations (L1 residual " + std::to_string(residual) + ")"),
      residual_(residual) {}

std::vector<double> pagerank_operator(const Network& net, std::span<const double> x, double damping) {
  const std::size_t n = net.size();
  std::vector<double> out(n, 0.0);
  double dangling = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    const double deg = net.weighted_degree(u);
    if (deg <= 0.0) {
      dangling += x[u];
      continue;
    }
    const auto nb = net.neighbors(u);
    const auto wt = net.weights(u);
    for (std::size_t t = 0; t < nb.size(); ++t) out[nb[t]] += damping * x[u] * wt[t] / deg;
  }
  const double spread = (damping * dangling + (1.0 - damping)) / static_cast<double>(n);
  for (auto& v : out) v += spread;
  return out;
}

PageRankScores pagerank(const Network& net, const PageRankOptions& opts) {
  if (!(opts.damping > 0.0 && opts.damping < 1.0)) throw std::invalid_argument("pagerank: damping must lie in (0, 1)");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("pagerank: tol must be > 0");
  const std::size_t n = net.size();
  PageRankScores res;
  res.damping = opts.damping;
  res.tol = opts.tol;
  if (n == 0) return res;
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  double residual = 0.0;
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    auto next = pagerank_operator(net, x, opts.damping);
    double total = 0.0;
    for (double v : next) total += v;
    for (auto& v : next) v /= total;
    residual = 0.0;
    for (std::size_t u = 0; u < n; ++u) residual += std::abs(next[u] - x[u]);
    x = std::move(next);
    if (residual < opts.tol) {
      res.scores = std::move(x);
      res.iterations = it;
      res.residual = residual;
      return res;
    }
  }
  throw PageRankNotConverged(opts.max_iter, residual);
}

std::vector<EdgeRecord> parse_edge_records(std::istream& in) {
  std::vector<std::string> row;
  std::size_t line_no = 0;
  if (!csv::next_row(in, row, line_no)) throw NetworkError("edge list is empty (missing header)");
  if (row != std::vector<std::string>{"src", "dst", "w"})
    throw NetworkError("edge list header must be 'src,dst,w'");
  std::vector<EdgeRecord> out;
  while (csv::next_row(in, row, line_no)) {
    if (row.size() != 3) throw NetworkError("line " + std::to_string(line_no) + ": expected 3 fields");
    out.push_back({csv::to_int(row[0], line_no), csv::to_int(row[1], line_no), csv::to_double(row[2], line_no)});
  }
  return out;
}

Network network_from_records(std::size_t n, std::span<const EdgeRecord> records, std::size_t* mirrored) {
  std::map<std::pair<std::int64_t, std::int64_t>, double> directed;
  for (const auto& r : records) {
    if (r.src < 0 || r.dst < 0 || static_cast<std::size_t>(r.src) >= n || static_cast<std::size_t>(r.dst) >= n)
      throw NetworkError("edge endpoint out of range: " + std::to_string(r.src) + "," + std::to_string(r.dst));
    auto [it, inserted] = directed.emplace(std::make_pair(r.src, r.dst), r.w);
    if (!inserted && it->second != r.w)
      throw NetworkError("duplicate edge with different weights: " + std::to_string(r.src) + "," +
                         std::to_string(r.dst));
  }
  std::size_t one_way = 0;
  std::vector<Network::Edge> edges;
  for (const auto& [key, w] : directed) {
    const auto rev = directed.find({key.second, key.first});
    if (rev == directed.end()) {
      ++one_way;
    } else if (rev->second != w) {
      throw NetworkError("asymmetric edge list: A(" + std::to_string(key.first) + "," + std::to_string(key.second) +
                         ") != A(" + std::to_string(key.second) + "," + std::to_string(key.first) + ")");
    }
    edges.push_back({static_cast<std::size_t>(key.first), static_cast<std::size_t>(key.second), w});
  }
  if (mirrored) *mirrored = one_way;
  return Network(n, edges);
}

Network read_edge_list(const std::filesystem::path& path, std::size_t n, std::size_t* mirrored) {
  std::ifstream in(path);
  if (!in) throw NetworkError("cannot open edge list " + path.string());
  const auto records = parse_edge_records(in);
  return network_from_records(n, records, mirrored);
}

void write_edge_list(const Network& net, std::ostream& out) {
  out << "src,dst,w\n";
  std::ostringstream num;
  num.precision(17);
  for (const auto& e : net.edges()) {
    num.str({});
    num << e.w;
    out << e.i << ',' << e.j << ',' << num.str() << '\n';
  }
}

}  // namespace doi
