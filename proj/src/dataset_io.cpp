#include "doi/dataset_io.hpp"

#include <fstream>
#include <unordered_map>

#include "csv.hpp"
#include "format.hpp"

namespace doi {

namespace {

constexpr const char* kRequired[] = {"unit_id", "stratum", "treatment", "outcome"};

Treatment make_treatment(const TreatmentSpec& t, std::vector<double> v) {
  switch (t.kind) {
    case Treatment::Kind::kBinary:
      return Treatment::binary(std::move(v));
    case Treatment::Kind::kCategorical:
      return Treatment::categorical(t.levels, std::move(v));
    case Treatment::Kind::kContinuous:
      return Treatment::continuous(std::move(v));
  }
  throw DataError("unknown treatment kind");
}

}  // namespace

IngestResult ingest_dataset(std::istream& data_csv, std::istream* edges_csv, OutcomeFamily family,
                            const TreatmentSpec& treatment) {
  IngestResult res;
  std::vector<std::string> row;
  std::size_t line = 0;
  if (!csv::next_row(data_csv, row, line)) throw DataError("data file is empty");
  const std::vector<std::string> header = row;
  for (std::size_t c = 0; c < 4; ++c)
    if (header.size() <= c || header[c] != kRequired[c])
      throw DataError(std::string("data header must start with unit_id,stratum,treatment,outcome; column ") +
                      std::to_string(c + 1) + " should be '" + kRequired[c] + "'");
  std::optional<std::size_t> score_col;
  std::optional<std::size_t> household_col;
  std::vector<std::size_t> x_cols;
  for (std::size_t c = 4; c < header.size(); ++c) {
    if (header[c] == "score") {
      score_col = c;
    } else if (header[c] == "household") {
      household_col = c;
    } else if (header[c] == "x" + std::to_string(x_cols.size() + 1)) {
      x_cols.push_back(c);
    } else {
      throw DataError("unexpected data column '" + header[c] + "' (covariates must be named x1, x2, ... in order)");
    }
  }

  std::vector<std::int64_t> strata;
  std::vector<double> z;
  std::vector<double> y;
  std::vector<double> scores;
  std::vector<std::int64_t> households;
  std::vector<std::vector<double>> xs;
  std::unordered_map<std::int64_t, std::size_t> index;
  try {
    while (csv::next_row(data_csv, row, line)) {
      if (row.size() != header.size())
        throw DataError("line " + std::to_string(line) + ": expected " + std::to_string(header.size()) +
                        " fields, found " + std::to_string(row.size()));
      const auto id = csv::to_int(row[0], line);
      if (!index.emplace(id, res.unit_ids.size()).second)
        throw DataError("line " + std::to_string(line) + ": duplicate unit_id " + std::to_string(id));
      res.unit_ids.push_back(id);
      strata.push_back(csv::to_int(row[1], line));
      z.push_back(csv::to_double(row[2], line));
      y.push_back(csv::to_double(row[3], line));
      if (score_col) scores.push_back(csv::to_double(row[*score_col], line));
      if (household_col) households.push_back(csv::to_int(row[*household_col], line));
      std::vector<double> xr;
      for (auto c : x_cols) xr.push_back(csv::to_double(row[c], line));
      xs.push_back(std::move(xr));
    }
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("data file: ") + e.what());
  }
  const std::size_t n = res.unit_ids.size();
  if (n == 0) throw DataError("data file has no rows");

  Dataset& d = res.data;
  d.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(x_cols.size()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < x_cols.size(); ++c)
      d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = xs[i][c];
  d.z = make_treatment(treatment, std::move(z));
  d.y = std::move(y);
  d.strata = std::move(strata);
  if (score_col) d.scores = std::move(scores);
  if (household_col) res.household = households;

  if (edges_csv) {
    std::vector<EdgeRecord> recs;
    try {
      recs = parse_edge_records(*edges_csv);
    } catch (const NetworkError& e) {
      throw DataError(std::string("edge file: ") + e.what());
    }
    for (auto& r : recs) {
      for (auto* end : {&r.src, &r.dst}) {
        const auto it = index.find(*end);
        if (it == index.end()) throw DataError("edge file references unknown unit_id " + std::to_string(*end));
        *end = static_cast<std::int64_t>(it->second);
      }
    }
    try {
      d.net = network_from_records(n, recs, &res.mirrored_edges);
    } catch (const NetworkError& e) {
      throw DataError(std::string("edge file: ") + e.what());
    }
    if (res.mirrored_edges > 0)
      res.log.push_back("mirrored " + std::to_string(res.mirrored_edges) + " edges listed in one direction only");
  } else if (res.household) {
    d.net = group_network(*res.household);
    res.log.push_back("network built from household column: " + std::to_string(d.net.edge_count()) + " edges");
  } else {
    d.net = Network(n, {});
    res.log.push_back("no edge file and no household column: units are isolated");
  }
  d.validate(family);
  return res;
}

IngestResult ingest_dataset(const std::filesystem::path& data_csv, const std::optional<std::filesystem::path>& edges_csv,
                            OutcomeFamily family, const TreatmentSpec& treatment) {
  std::ifstream din(data_csv);
  if (!din) throw DataError("cannot open data file " + data_csv.string());
  std::ifstream ein;
  if (edges_csv) {
    ein.open(*edges_csv);
    if (!ein) throw DataError("cannot open edge file " + edges_csv->string());
  }
  return ingest_dataset(din, edges_csv ? &ein : nullptr, family, treatment);
}

void write_dataset(const Dataset& data, std::ostream& out, const std::optional<std::vector<std::int64_t>>& household) {
  const std::size_t n = data.size();
  out << "unit_id,stratum,treatment,outcome";
  for (Eigen::Index c = 0; c < data.x.cols(); ++c) out << ",x" << c + 1;
  if (data.scores) out << ",score";
  if (household) out << ",household";
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out << i << ',' << (data.strata ? (*data.strata)[i] : 0) << ',' << fmt_num(data.z.values[i], 17) << ','
        << fmt_num(data.y[i], 17);
    for (Eigen::Index c = 0; c < data.x.cols(); ++c) out << ',' << fmt_num(data.x(r, c), 17);
    if (data.scores) out << ',' << fmt_num((*data.scores)[i], 17);
    if (household) out << ',' << (*household)[i];
    out << '\n';
  }
}

}  // namespace doi
