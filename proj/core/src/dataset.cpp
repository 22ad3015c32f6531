#include "frk/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace frk {

Location::Location(std::initializer_list<double> c) : coords(static_cast<long>(c.size())) {
  int i = 0;
  for (double v : c) coords[i++] = v;
}

bool Location::operator==(const Location& other) const {
  if (coords.size() != other.coords.size()) return false;
  for (int i = 0; i < coords.size(); ++i) {
    if (coords[i] != other.coords[i]) return false;
  }
  return true;
}

double distance(const Location& a, const Location& b) {
  if (a.dim() != b.dim()) {
    throw ConfigError("distance: dimension mismatch (" + std::to_string(a.dim()) +
                      " vs " + std::to_string(b.dim()) + ")");
  }
  return (a.coords - b.coords).norm();
}

void SpatialDataset::validate() const {
  if (locations.empty()) throw ConfigError("dataset: no rows");
  const int d = locations.front().dim();
  if (d < 1) throw ConfigError("dataset: locations must have dimension >= 1");
  for (const auto& s : locations) {
    if (s.dim() != d) throw ConfigError("dataset: inconsistent location dimensions");
    if (!s.coords.allFinite()) throw ConfigError("dataset: non-finite coordinate");
  }
  if (z.size() != n()) throw ConfigError("dataset: z length does not match locations");
  if (!z.allFinite()) throw ConfigError("dataset: non-finite observation");
  if (covariates.size() > 0) {
    if (covariates.rows() != n()) throw ConfigError("dataset: covariate rows do not match locations");
    if (!covariates.allFinite()) throw ConfigError("dataset: non-finite covariate");
  }
}

void StDataset::validate() const {
  if (slices.empty()) throw ConfigError("st dataset: T must be >= 1");
  for (const auto& s : slices) {
    if (s.n() > 0) s.validate();
  }
  if (times.size() != slices.size()) throw ConfigError("st dataset: times/slices length mismatch");
  for (size_t t = 1; t < times.size(); ++t) {
    if (!(times[t] > times[t - 1])) throw ConfigError("st dataset: times must be strictly increasing");
  }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim spaces and a trailing CR
    size_t b = cell.find_first_not_of(" \t\r");
    size_t e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

int find_col(const std::vector<std::string>& header, const std::string& name,
             const std::filesystem::path& path) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw ConfigError("csv: column '" + name + "' not found in " + path.string());
  }
  return static_cast<int>(it - header.begin());
}

bool parse_cell(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  char* end = nullptr;
  out = std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size();
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct RawRows {
  std::vector<std::vector<double>> coords;
  std::vector<double> z;
  std::vector<std::vector<double>> covs;
  std::vector<double> time;
};

RawRows read_rows(const std::filesystem::path& path, const CsvSchema& schema, bool with_time) {
  std::ifstream in(path);
  if (!in) throw ConfigError("csv: cannot open " + path.string());
  if (schema.coord_cols.empty()) throw ConfigError("csv: schema names no coordinate columns");
  if (schema.z_col.empty()) throw ConfigError("csv: schema names no observation column");

  std::string line;
  if (!std::getline(in, line)) throw ConfigError("csv: missing header row in " + path.string());
  const auto header = split_line(line);

  std::vector<int> coord_idx;
  for (const auto& c : schema.coord_cols) coord_idx.push_back(find_col(header, c, path));
  const int z_idx = find_col(header, schema.z_col, path);
  std::vector<int> cov_idx;
  for (const auto& c : schema.covariate_cols) cov_idx.push_back(find_col(header, c, path));
  const int time_idx = with_time ? find_col(header, schema.time_col, path) : -1;

  std::vector<int> mapped = coord_idx;
  mapped.push_back(z_idx);
  mapped.insert(mapped.end(), cov_idx.begin(), cov_idx.end());
  if (with_time) mapped.push_back(time_idx);

  RawRows rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_line(line);

    // A row missing any mapped field is rejected rather than masked.
    bool missing = false;
    for (int idx : mapped) {
      if (idx >= static_cast<int>(cells.size()) || cells[idx].empty()) {
        missing = true;
        break;
      }
    }
    if (missing) continue;

    auto value_at = [&](int idx) {
      double v;
      if (!parse_cell(cells[idx], v)) {
        throw ConfigError("csv: non-numeric value '" + cells[idx] + "' in column '" +
                          header[idx] + "' at line " + std::to_string(lineno) + " of " +
                          path.string());
      }
      return v;
    };

    std::vector<double> c(coord_idx.size());
    for (size_t k = 0; k < coord_idx.size(); ++k) c[k] = value_at(coord_idx[k]);
    rows.coords.push_back(std::move(c));
    rows.z.push_back(value_at(z_idx));
    if (!cov_idx.empty()) {
      std::vector<double> x(cov_idx.size());
      for (size_t k = 0; k < cov_idx.size(); ++k) x[k] = value_at(cov_idx[k]);
      rows.covs.push_back(std::move(x));
    }
    if (with_time) rows.time.push_back(value_at(time_idx));
  }
  return rows;
}

SpatialDataset from_raw(const RawRows& rows, const std::vector<int>& idx) {
  SpatialDataset ds;
  const int d = static_cast<int>(rows.coords.empty() ? 0 : rows.coords.front().size());
  const int p = static_cast<int>(rows.covs.empty() ? 0 : rows.covs.front().size());
  ds.locations.reserve(idx.size());
  ds.z.resize(static_cast<long>(idx.size()));
  if (p > 0) ds.covariates.resize(static_cast<long>(idx.size()), p);
  long out = 0;
  for (int i : idx) {
    Eigen::VectorXd c(d);
    for (int k = 0; k < d; ++k) c[k] = rows.coords[i][k];
    ds.locations.emplace_back(std::move(c));
    ds.z[out] = rows.z[i];
    for (int k = 0; k < p; ++k) ds.covariates(out, k) = rows.covs[i][k];
    ++out;
  }
  return ds;
}

}  // namespace

SpatialDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  const auto rows = read_rows(path, schema, /*with_time=*/false);
  std::vector<int> all(rows.z.size());
  std::iota(all.begin(), all.end(), 0);
  SpatialDataset ds = from_raw(rows, all);
  ds.validate();
  return ds;
}

void save_csv(const std::filesystem::path& path, const SpatialDataset& ds, const CsvSchema& schema) {
  if (static_cast<int>(schema.coord_cols.size()) != ds.dim()) {
    throw ConfigError("csv: schema coordinate columns do not match dataset dimension");
  }
  if (static_cast<int>(schema.covariate_cols.size()) != ds.p()) {
    throw ConfigError("csv: schema covariate columns do not match dataset");
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("csv: cannot write " + path.string());
  for (const auto& c : schema.coord_cols) out << c << ',';
  out << schema.z_col;
  for (const auto& c : schema.covariate_cols) out << ',' << c;
  out << '\n';
  for (int i = 0; i < ds.n(); ++i) {
    for (int k = 0; k < ds.dim(); ++k) out << fmt_full(ds.locations[i].coords[k]) << ',';
    out << fmt_full(ds.z[i]);
    for (int k = 0; k < ds.p(); ++k) out << ',' << fmt_full(ds.covariates(i, k));
    out << '\n';
  }
}

StDataset load_csv_st(const std::filesystem::path& path, const CsvSchema& schema) {
  if (schema.time_col.empty()) throw ConfigError("csv: st schema names no time column");
  const auto rows = read_rows(path, schema, /*with_time=*/true);

  std::map<double, std::vector<int>> by_time;
  for (size_t i = 0; i < rows.time.size(); ++i) {
    by_time[rows.time[i]].push_back(static_cast<int>(i));
  }
  if (by_time.empty()) throw ConfigError("csv: no usable rows in " + path.string());

  StDataset st;
  for (const auto& [t, idx] : by_time) {
    st.times.push_back(t);
    st.slices.push_back(from_raw(rows, idx));
  }
  st.validate();
  return st;
}

void save_csv_st(const std::filesystem::path& path, const StDataset& ds, const CsvSchema& schema) {
  if (schema.time_col.empty()) throw ConfigError("csv: st schema names no time column");
  ds.validate();
  std::ofstream out(path);
  if (!out) throw ConfigError("csv: cannot write " + path.string());
  for (const auto& c : schema.coord_cols) out << c << ',';
  out << schema.z_col << ',' << schema.time_col;
  for (const auto& c : schema.covariate_cols) out << ',' << c;
  out << '\n';
  for (int t = 0; t < ds.T(); ++t) {
    const auto& sl = ds.slices[t];
    for (int i = 0; i < sl.n(); ++i) {
      for (int k = 0; k < sl.dim(); ++k) out << fmt_full(sl.locations[i].coords[k]) << ',';
      out << fmt_full(sl.z[i]) << ',' << fmt_full(ds.times[t]);
      for (int k = 0; k < sl.p(); ++k) out << ',' << fmt_full(sl.covariates(i, k));
      out << '\n';
    }
  }
}

SpatialDataset take_rows(const SpatialDataset& ds, const std::vector<int>& rows) {
  SpatialDataset out;
  out.locations.reserve(rows.size());
  out.z.resize(static_cast<long>(rows.size()));
  if (ds.p() > 0) out.covariates.resize(static_cast<long>(rows.size()), ds.p());
  long k = 0;
  for (int i : rows) {
    out.locations.push_back(ds.locations[i]);
    out.z[k] = ds.z[i];
    if (ds.p() > 0) out.covariates.row(k) = ds.covariates.row(i);
    ++k;
  }
  return out;
}

std::pair<SpatialDataset, SpatialDataset> split(const SpatialDataset& ds, const SplitSpec& spec) {
  if (!(spec.fraction > 0.0 && spec.fraction < 1.0)) {
    throw ConfigError("split: fraction must be in (0,1)");
  }
  if (ds.n() < 2) throw ConfigError("split: need at least 2 rows");

  std::vector<int> idx(ds.n());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(spec.seed);
  std::shuffle(idx.begin(), idx.end(), rng);

  const auto n_test = static_cast<size_t>(std::llround(spec.fraction * ds.n()));
  std::vector<int> test_idx(idx.begin(), idx.begin() + n_test);
  std::vector<int> train_idx(idx.begin() + n_test, idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  return {take_rows(ds, train_idx), take_rows(ds, test_idx)};
}

}  // namespace frk
