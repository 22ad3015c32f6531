#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <variant>
#include <vector>

#include "frk/dataset.hpp"

namespace frk {

// Compactly supported radial basis function
//   phi(s) = (1 - (||s - c|| / w)^2)^2   for ||s - c|| <= w,  0 otherwise,
// with center c and aperture w > 0.
struct BisquareFn {
  Location center;
  double aperture = 1.0;
};

double bisquare_eval(const BisquareFn& f, const Location& s);

// Space-time basis function: product of a spatial bisquare over the first d
// coordinates and a 1-D temporal bisquare over the last coordinate.
struct TensorStFn {
  BisquareFn spatial;
  BisquareFn temporal;
};

using BasisFn = std::variant<BisquareFn, TensorStFn>;

double basis_fn_eval(const BasisFn& f, const Location& s);
int basis_fn_dim(const BasisFn& f);
// Center in evaluation coordinates; (space, time) concatenated for tensor fns.
Location basis_fn_center(const BasisFn& f);

// Ordered collection phi_1..phi_r with a resolution label per function.
// Ordering is stable (coarse to fine, then lexicographic by grid index), so
// any K matrix indexed against it reproduces across runs.
struct BasisSet {
  std::vector<BasisFn> fns;
  std::vector<int> resolutions;

  int r() const { return static_cast<int>(fns.size()); }
  int dim() const;
  Eigen::VectorXd eval(const Location& s) const;  // phi(s), an r-vector
  void validate() const;
};

// Regular multi-resolution grid layout over a common bounding box.
// Resolutions are listed coarse to fine; counts are the per-axis numbers of
// centers, so the total is sum over resolutions of the product of counts.
//
// Per axis with m centers over [lo, hi]:
//   m == 1: single center at the midpoint, spacing hi - lo;
//   m == 2: centers at lo, hi;
//   m == 3: centers at lo, midpoint, hi;
//   m >= 4: spacing h = (hi - lo) / (m - 3), centers at lo - h + j*h, which
//           places one center exactly one spacing beyond each side of the
//           box so that var(Y) does not fall off near the boundary.
// The aperture of every function in a resolution is aperture_ratio times
// the largest axis spacing of that resolution.
struct MultiResSpec {
  struct Resolution {
    std::vector<int> counts;
  };
  std::vector<Resolution> resolutions;
  double aperture_ratio = 1.5;
  Eigen::VectorXd lo, hi;
};

BasisSet build_multires(const MultiResSpec& spec);

// Phi with Phi(i, j) = phi_j(s_i).
Eigen::MatrixXd design_matrix(const BasisSet& basis, const std::vector<Location>& pts);
Eigen::MatrixXd design_matrix(const BasisSet& basis, const SpatialDataset& ds);

// Tensor product of k spatial and l temporal functions, ordered with the
// spatial index slow: a1*b1, .., a1*bl, a2*b1, .., ak*bl. Resolution labels
// are inherited from the spatial factor.
BasisSet tensor_st_basis(const BasisSet& spatial, const BasisSet& temporal);

// One record per function in a structured text file, for reuse between fit
// and predict runs.
void save_basis(const std::filesystem::path& path, const BasisSet& basis);
BasisSet load_basis(const std::filesystem::path& path);

}  // namespace frk
