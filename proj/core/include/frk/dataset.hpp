#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "frk/errors.hpp"

namespace frk {

// A point s in D, a subset of R^d. Coordinates are raw Euclidean values;
// there is no great-circle geometry, so lon/lat inputs are treated planar.
struct Location {
  Eigen::VectorXd coords;

  Location() = default;
  explicit Location(Eigen::VectorXd c) : coords(std::move(c)) {}
  Location(std::initializer_list<double> c);

  int dim() const { return static_cast<int>(coords.size()); }

  // Exact coordinate equality; this is also the identity used when deciding
  // whether two points share the fine-scale term.
  bool operator==(const Location& other) const;
};

// Euclidean distance ||a - b||. Throws on dimension mismatch.
double distance(const Location& a, const Location& b);

// Point-referenced observations z at n locations, with an optional n x p
// covariate matrix (first column conventionally an all-ones intercept).
// Rows stay in ingestion order and every matrix built downstream is indexed
// by that order. Treat as immutable once constructed.
struct SpatialDataset {
  std::vector<Location> locations;
  Eigen::VectorXd z;
  Eigen::MatrixXd covariates;  // n x p; p == 0 when absent

  int n() const { return static_cast<int>(locations.size()); }
  int p() const { return static_cast<int>(covariates.cols()); }
  int dim() const { return locations.empty() ? 0 : locations.front().dim(); }

  // Throws ConfigError if the invariants fail: n >= 1, matching row counts,
  // consistent dimensions, finite values everywhere.
  void validate() const;
};

// One spatial slice per time point t = 1..T; slice sizes may differ.
// `times` holds the time coordinate of each slice (used when flattening to
// a product-domain dataset); defaults to 1..T.
struct StDataset {
  std::vector<SpatialDataset> slices;
  std::vector<double> times;

  int T() const { return static_cast<int>(slices.size()); }
  void validate() const;
};

struct SplitSpec {
  double fraction = 0.5;    // held-out share, in (0,1)
  std::uint64_t seed = 0;
};

// Column mapping for CSV ingestion. A header row is required; values use
// '.' as the decimal separator. Fields are not quoted.
struct CsvSchema {
  std::vector<std::string> coord_cols;
  std::string z_col;
  std::vector<std::string> covariate_cols;  // optional
  std::string time_col;                     // optional; St datasets only
};

// Loads a dataset, keeping rows in file order. Rows with any missing mapped
// field are rejected (dropped); a non-numeric cell in a mapped column is an
// error that names the offending line.
SpatialDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);
void save_csv(const std::filesystem::path& path, const SpatialDataset& ds, const CsvSchema& schema);

// Space-time variants: rows are grouped into slices by the value in
// schema.time_col; slices are ordered by ascending time.
StDataset load_csv_st(const std::filesystem::path& path, const CsvSchema& schema);
void save_csv_st(const std::filesystem::path& path, const StDataset& ds, const CsvSchema& schema);

// Deterministic disjoint partition with |test| = round(fraction * n);
// row order inside each part follows the original dataset.
std::pair<SpatialDataset, SpatialDataset> split(const SpatialDataset& ds, const SplitSpec& spec);

// Row subset in the given index order.
SpatialDataset take_rows(const SpatialDataset& ds, const std::vector<int>& rows);

}  // namespace frk
