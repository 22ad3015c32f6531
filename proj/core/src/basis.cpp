#include "frk/basis.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace frk {

double bisquare_eval(const BisquareFn& f, const Location& s) {
  const double d = distance(f.center, s);
  if (d > f.aperture) return 0.0;
  const double u = d / f.aperture;
  const double t = 1.0 - u * u;
  return t * t;
}

double tensor_st_eval(const TensorStFn& f, const Location& st) {
  const int d = f.spatial.center.dim();
  if (st.dim() != d + 1) {
    throw ConfigError("tensor basis: expected " + std::to_string(d + 1) +
                      " coordinates (space then time), got " + std::to_string(st.dim()));
  }
  Location s(Eigen::VectorXd(st.coords.head(d)));
  Location t(Eigen::VectorXd(st.coords.tail(1)));
  return bisquare_eval(f.spatial, s) * bisquare_eval(f.temporal, t);
}

double basis_fn_eval(const BasisFn& f, const Location& s) {
  if (const auto* b = std::get_if<BisquareFn>(&f)) return bisquare_eval(*b, s);
  return tensor_st_eval(std::get<TensorStFn>(f), s);
}

int basis_fn_dim(const BasisFn& f) {
  if (const auto* b = std::get_if<BisquareFn>(&f)) return b->center.dim();
  return std::get<TensorStFn>(f).spatial.center.dim() + 1;
}

Location basis_fn_center(const BasisFn& f) {
  if (const auto* b = std::get_if<BisquareFn>(&f)) return b->center;
  const auto& t = std::get<TensorStFn>(f);
  Eigen::VectorXd c(t.spatial.center.dim() + 1);
  c.head(t.spatial.center.dim()) = t.spatial.center.coords;
  c[t.spatial.center.dim()] = t.temporal.center.coords[0];
  return Location(std::move(c));
}

int BasisSet::dim() const { return fns.empty() ? 0 : basis_fn_dim(fns.front()); }

Eigen::VectorXd BasisSet::eval(const Location& s) const {
  Eigen::VectorXd phi(r());
  for (int j = 0; j < r(); ++j) phi[j] = basis_fn_eval(fns[j], s);
  return phi;
}

void BasisSet::validate() const {
  if (fns.empty()) throw ConfigError("basis: r must be >= 1");
  if (resolutions.size() != fns.size()) throw ConfigError("basis: resolution labels missing");
  const int d = basis_fn_dim(fns.front());
  for (const auto& f : fns) {
    if (basis_fn_dim(f) != d) throw ConfigError("basis: mixed function dimensions");
    const auto check = [](const BisquareFn& b) {
      if (!(b.aperture > 0.0)) throw ConfigError("basis: aperture must be positive");
      if (!b.center.coords.allFinite()) throw ConfigError("basis: non-finite center");
    };
    if (const auto* b = std::get_if<BisquareFn>(&f)) {
      check(*b);
    } else {
      const auto& t = std::get<TensorStFn>(f);
      check(t.spatial);
      check(t.temporal);
      if (t.temporal.center.dim() != 1) throw ConfigError("basis: temporal factor must be 1-D");
    }
  }
}

namespace {

// Per-axis center layout; see the MultiResSpec comment for the scheme.
void axis_grid(double lo, double hi, int m, std::vector<double>& centers, double& spacing) {
  centers.clear();
  if (m == 1) {
    centers.push_back(0.5 * (lo + hi));
    spacing = hi - lo;
  } else if (m == 2) {
    centers = {lo, hi};
    spacing = hi - lo;
  } else if (m == 3) {
    spacing = 0.5 * (hi - lo);
    centers = {lo, lo + spacing, hi};
  } else {
    spacing = (hi - lo) / (m - 3);
    for (int j = 0; j < m; ++j) centers.push_back(lo - spacing + j * spacing);
  }
}

}  // namespace

BasisSet build_multires(const MultiResSpec& spec) {
  if (spec.resolutions.empty()) throw ConfigError("multires: at least one resolution required");
  if (!(spec.aperture_ratio > 0.0)) throw ConfigError("multires: aperture ratio must be positive");
  const int d = static_cast<int>(spec.lo.size());
  if (d < 1 || spec.hi.size() != d) throw ConfigError("multires: bad bounding box");
  for (int k = 0; k < d; ++k) {
    if (!(spec.hi[k] > spec.lo[k])) throw ConfigError("multires: empty bounding box");
  }

  BasisSet basis;
  for (size_t res = 0; res < spec.resolutions.size(); ++res) {
    const auto& counts = spec.resolutions[res].counts;
    if (static_cast<int>(counts.size()) != d) {
      throw ConfigError("multires: resolution " + std::to_string(res) +
                        " has counts for " + std::to_string(counts.size()) +
                        " axes, expected " + std::to_string(d));
    }
    std::vector<std::vector<double>> axis_centers(d);
    double max_spacing = 0.0;
    for (int k = 0; k < d; ++k) {
      if (counts[k] < 1) throw ConfigError("multires: grid counts must be >= 1");
      double spacing;
      axis_grid(spec.lo[k], spec.hi[k], counts[k], axis_centers[k], spacing);
      max_spacing = std::max(max_spacing, spacing);
    }
    const double aperture = spec.aperture_ratio * max_spacing;

    // Lexicographic by grid index, last axis fastest.
    std::vector<int> idx(d, 0);
    while (true) {
      Eigen::VectorXd c(d);
      for (int k = 0; k < d; ++k) c[k] = axis_centers[k][idx[k]];
      basis.fns.push_back(BisquareFn{Location(std::move(c)), aperture});
      basis.resolutions.push_back(static_cast<int>(res));
      int k = d - 1;
      while (k >= 0 && ++idx[k] == counts[k]) idx[k--] = 0;
      if (k < 0) break;
    }
  }
  basis.validate();
  return basis;
}

Eigen::MatrixXd design_matrix(const BasisSet& basis, const std::vector<Location>& pts) {
  Eigen::MatrixXd phi(static_cast<long>(pts.size()), basis.r());
  for (size_t i = 0; i < pts.size(); ++i) {
    for (int j = 0; j < basis.r(); ++j) phi(static_cast<long>(i), j) = basis_fn_eval(basis.fns[j], pts[i]);
  }
  return phi;
}

Eigen::MatrixXd design_matrix(const BasisSet& basis, const SpatialDataset& ds) {
  return design_matrix(basis, ds.locations);
}

BasisSet tensor_st_basis(const BasisSet& spatial, const BasisSet& temporal) {
  spatial.validate();
  temporal.validate();
  BasisSet out;
  for (int i = 0; i < spatial.r(); ++i) {
    const auto* s = std::get_if<BisquareFn>(&spatial.fns[i]);
    if (!s) throw ConfigError("tensor basis: spatial factor must contain bisquares only");
    for (int j = 0; j < temporal.r(); ++j) {
      const auto* t = std::get_if<BisquareFn>(&temporal.fns[j]);
      if (!t) throw ConfigError("tensor basis: temporal factor must contain bisquares only");
      if (t->center.dim() != 1) throw ConfigError("tensor basis: temporal factor must be 1-D");
      out.fns.push_back(TensorStFn{*s, *t});
      out.resolutions.push_back(spatial.resolutions[i]);
    }
  }
  return out;
}

namespace {

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_bisquare(std::ostream& out, const BisquareFn& b) {
  out << ' ' << fmt_full(b.aperture) << ' ' << b.center.dim();
  for (int k = 0; k < b.center.dim(); ++k) out << ' ' << fmt_full(b.center.coords[k]);
}

BisquareFn read_bisquare(std::istringstream& in, const std::string& where) {
  double aperture;
  int d;
  if (!(in >> aperture >> d) || d < 1) throw ConfigError("basis file: bad record (" + where + ")");
  Eigen::VectorXd c(d);
  for (int k = 0; k < d; ++k) {
    if (!(in >> c[k])) throw ConfigError("basis file: bad record (" + where + ")");
  }
  return BisquareFn{Location(std::move(c)), aperture};
}

}  // namespace

void save_basis(const std::filesystem::path& path, const BasisSet& basis) {
  basis.validate();
  std::ofstream out(path);
  if (!out) throw ConfigError("basis file: cannot write " + path.string());
  out << "frk_basis v1 " << basis.r() << '\n';
  for (int j = 0; j < basis.r(); ++j) {
    if (const auto* b = std::get_if<BisquareFn>(&basis.fns[j])) {
      out << "bisquare " << basis.resolutions[j];
      write_bisquare(out, *b);
    } else {
      const auto& t = std::get<TensorStFn>(basis.fns[j]);
      out << "tensor " << basis.resolutions[j];
      write_bisquare(out, t.spatial);
      write_bisquare(out, t.temporal);
    }
    out << '\n';
  }
}

BasisSet load_basis(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("basis file: cannot open " + path.string());
  std::string magic, version;
  int r = 0;
  in >> magic >> version >> r;
  if (magic != "frk_basis" || version != "v1" || r < 1) {
    throw ConfigError("basis file: unrecognized header in " + path.string());
  }
  std::string line;
  std::getline(in, line);
  BasisSet basis;
  for (int j = 0; j < r; ++j) {
    if (!std::getline(in, line)) throw ConfigError("basis file: truncated at record " + std::to_string(j));
    std::istringstream ss(line);
    std::string kind;
    int res;
    if (!(ss >> kind >> res)) throw ConfigError("basis file: bad record " + std::to_string(j));
    if (kind == "bisquare") {
      basis.fns.emplace_back(read_bisquare(ss, path.string()));
    } else if (kind == "tensor") {
      TensorStFn t;
      t.spatial = read_bisquare(ss, path.string());
      t.temporal = read_bisquare(ss, path.string());
      basis.fns.emplace_back(std::move(t));
    } else {
      throw ConfigError("basis file: unknown function kind '" + kind + "'");
    }
    basis.resolutions.push_back(res);
  }
  basis.validate();
  return basis;
}

}  // namespace frk
