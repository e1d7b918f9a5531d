#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "doi/config.hpp"
#include "doi/estimands.hpp"
#include "doi/network.hpp"
#include "doi/report.hpp"
#include "doi/simbench.hpp"

namespace py = pybind11;
using namespace doi;

namespace {

py::dict summary_dict(const SummaryRow& s) {
  py::dict d;
  d["mean"] = s.mean;
  d["sd"] = s.sd;
  d["q2.5"] = s.q025;
  d["median"] = s.median;
  d["q97.5"] = s.q975;
  d["length"] = s.length;
  return d;
}

std::vector<std::tuple<std::size_t, std::size_t, double>> edge_tuples(const Network& net) {
  std::vector<std::tuple<std::size_t, std::size_t, double>> out;
  for (const auto& e : net.edges()) out.emplace_back(e.i, e.j, e.w);
  return out;
}

Network make_network(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
  std::vector<Network::Edge> e;
  for (const auto& [i, j, w] : edges) e.push_back({i, j, w});
  return Network(n, e);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Degree-of-interference causal inference on networks";
  m.attr("__version__") = kVersion;

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NetworkError>(m, "NetworkError", PyExc_ValueError);
  py::register_exception<EstimandError>(m, "EstimandError", PyExc_ValueError);
  py::register_exception<ChainError>(m, "ChainError", PyExc_RuntimeError);

  py::class_<Network>(m, "Network")
      .def(py::init(&make_network), py::arg("n"), py::arg("edges"))
      .def_property_readonly("size", &Network::size)
      .def("__len__", &Network::size)
      .def("degree", &Network::degree)
      .def("weight", &Network::weight)
      .def("neighbors", [](const Network& g, std::size_t i) {
        const auto nb = g.neighbors(i);
        return std::vector<std::size_t>(nb.begin(), nb.end());
      })
      .def("edges", &edge_tuples, "Undirected edges as (i, j, w) with i < j.");

  m.def("erdos_renyi", &gen_erdos_renyi, py::arg("n"), py::arg("p"), py::arg("seed"));
  m.def("barabasi_albert", &gen_barabasi_albert, py::arg("n"), py::arg("n0"), py::arg("k"), py::arg("seed"));
  m.def(
      "inverse_distance_network",
      [](const std::vector<double>& angles, double cutoff, bool wrap) {
        return inverse_distance_network(angles, cutoff, wrap);
      },
      py::arg("angles"), py::arg("cutoff"), py::arg("wrap_around") = false);
  m.def(
      "group_network", [](const std::vector<std::int64_t>& groups) { return group_network(groups); },
      py::arg("groups"));
  m.def(
      "pagerank",
      [](const Network& g, double damping, double tol, std::size_t max_iter) {
        return pagerank(g, {damping, tol, max_iter}).scores;
      },
      py::arg("network"), py::arg("damping") = 0.85, py::arg("tol") = 1e-10, py::arg("max_iter") = 10000);

  m.def(
      "ht_e_ate",
      [](const std::vector<double>& y, const std::vector<double>& z, double p) {
        const auto r = ht_e_ate(y, z, p);
        py::dict d;
        d["estimate"] = r.estimate;
        d["variance"] = r.variance;
        d["lower"] = r.lower;
        d["upper"] = r.upper;
        return d;
      },
      py::arg("y"), py::arg("z"), py::arg("p"));

  m.def(
      "summarize", [](const std::vector<double>& draws) { return summary_dict(summarize(draws)); }, py::arg("draws"));

  m.def(
      "simulate",
      [](int scenario, const Network& net, std::uint64_t seed, double tau, double psi1, double psi2, double treat_prob,
         double noise_sd) {
        DgpConfig cfg;
        cfg.scenario = scenario;
        cfg.tau = tau;
        cfg.psi1 = psi1;
        cfg.psi2 = psi2;
        cfg.treat_prob = treat_prob;
        cfg.noise_sd = noise_sd;
        std::optional<PageRankScores> scores;
        if (scenario >= 2) scores = pagerank(net);
        const auto sim = dgp_generate(cfg, net, scores, derive_seed(seed, Stream::kDataset));
        py::dict d;
        d["x"] = sim.data.x;
        d["z"] = sim.data.z.values;
        d["y"] = sim.data.y;
        if (sim.data.scores) d["scores"] = *sim.data.scores;
        const auto mech = AssignmentMechanism::bernoulli(treat_prob);
        d["e_ate"] = true_estimand_mc(sim, TrueEstimand::kEAte, mech, 1000, derive_seed(seed, Stream::kTruth, 0)).value;
        d["e_ase"] = true_estimand_mc(sim, TrueEstimand::kEAse, mech, 1000, derive_seed(seed, Stream::kTruth, 1)).value;
        return d;
      },
      py::arg("scenario"), py::arg("network"), py::arg("seed"), py::arg("tau") = 5.0, py::arg("psi1") = 2.0,
      py::arg("psi2") = 0.2, py::arg("treat_prob") = 0.5, py::arg("noise_sd") = 1.0,
      "Generate a dataset from one of the five simulation scenarios with its expected effects.");

  m.def(
      "fit",
      [](const std::string& config_json, const std::string& base_dir) {
        const auto cfg = parse_config_text(config_json, base_dir);
        if (cfg.command != RunConfig::Command::kFit) throw ConfigError("command: fit() needs a fit config");
        FitOutcome fit;
        {
          py::gil_scoped_release release;
          fit = run_fit(cfg);
        }
        py::dict out;
        for (std::size_t q = 0; q < fit.names.size(); ++q) {
          auto s = summary_dict(fit.rows[q]);
          s["draws"] = fit.draws.draws[q];
          out[py::str(fit.names[q])] = s;
        }
        return out;
      },
      py::arg("config_json"), py::arg("base_dir") = "",
      "Fit the model described by a fit config (JSON text); returns per-query summaries and draws.");

  m.def(
      "run",
      [](const std::string& config_json, const std::string& base_dir) {
        const auto cfg = parse_config_text(config_json, base_dir);
        std::ostringstream log;
        {
          py::gil_scoped_release release;
          execute(cfg, log);
        }
        return log.str();
      },
      py::arg("config_json"), py::arg("base_dir") = "",
      "Run any command config and write its report files; returns the progress log.");
}
