#include "harmavg/field.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cell_locate.hpp"

namespace harmavg {

namespace {

constexpr int kMaxSupport = 10;

struct Candidate {
  std::size_t node;
  Point pos;
  double dist2;
};

// Barycentric coordinates of p in the simplex spanned by `verts` (dim + 1
// of them). Returns false for a degenerate simplex.
bool barycentric(int dim, const std::array<const Point*, 4>& verts,
                 const Point& p, double degenerate_tol,
                 std::array<double, 4>& lambda) {
  // Solve [v1-v0 ... vn-v0] l = p - v0 by Gaussian elimination with pivoting.
  double m[3][4];
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) m[r][c] = (*verts[c + 1])[r] - (*verts[0])[r];
    m[r][dim] = p[r] - (*verts[0])[r];
  }
  double det = 1.0;
  for (int c = 0; c < dim; ++c) {
    int piv = c;
    for (int r = c + 1; r < dim; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    }
    if (piv != c) {
      for (int k = 0; k <= dim; ++k) std::swap(m[c][k], m[piv][k]);
      det = -det;
    }
    det *= m[c][c];
    if (m[c][c] == 0.0) return false;
    for (int r = c + 1; r < dim; ++r) {
      const double f = m[r][c] / m[c][c];
      for (int k = c; k <= dim; ++k) m[r][k] -= f * m[c][k];
    }
  }
  if (std::abs(det) <= degenerate_tol) return false;
  double sol[3];
  for (int r = dim - 1; r >= 0; --r) {
    double s = m[r][dim];
    for (int k = r + 1; k < dim; ++k) s -= m[r][k] * sol[k];
    sol[r] = s / m[r][r];
  }
  double sum = 0.0;
  for (int i = 0; i < dim; ++i) {
    lambda[i + 1] = sol[i];
    sum += sol[i];
  }
  lambda[0] = 1.0 - sum;
  return true;
}

InterpWeights redistribute(const Lattice& lattice,
                           const detail::CellLocation& loc) {
  const GridSpec& grid = lattice.grid();
  const int dim = grid.dim();
  InterpWeights w;
  double total = 0.0;
  for (int c = 0; c < (1 << dim); ++c) {
    const std::size_t idx = detail::corner_index(grid, loc.origin, c);
    if (lattice.mask().is_exterior(idx)) continue;
    w.node[w.count] = idx;
    w.weight[w.count] = detail::corner_weight(dim, loc.frac, c);
    total += w.weight[w.count];
    ++w.count;
  }
  if (w.count == 0) {
    throw std::logic_error("interpolation cell has only exterior corners");
  }
  if (total > 0.0) {
    for (int i = 0; i < w.count; ++i) w.weight[i] /= total;
  } else {
    for (int i = 0; i < w.count; ++i) w.weight[i] = 1.0 / w.count;
  }
  return w;
}

InterpWeights cut_cell_weights(const Lattice& lattice,
                               const detail::CellLocation& loc,
                               const Point& p) {
  const GridSpec& grid = lattice.grid();
  const NodeMask& mask = lattice.mask();
  const int dim = grid.dim();
  const auto origin = grid.multi_index(loc.origin);

  std::array<Candidate, 64> cand;
  int ncand = 0;
  const int span = dim == 1 ? 4 : dim == 2 ? 16 : 64;
  for (int s = 0; s < span; ++s) {
    int rem = s;
    std::array<int, kMaxDim> ijk = origin;
    bool in_range = true;
    bool corner = true;
    for (int a = 0; a < dim; ++a) {
      const int off = rem % 4 - 1;
      rem /= 4;
      if (off < 0 || off > 1) corner = false;
      ijk[a] += off;
      if (ijk[a] < 0 || ijk[a] >= grid.nodes(a)) in_range = false;
    }
    if (!in_range) continue;
    const std::size_t idx = grid.index(ijk);
    const NodeLabel label = mask.label(idx);
    const bool keep = corner ? label != NodeLabel::exterior
                             : label == NodeLabel::boundary;
    if (!keep) continue;
    const Point& pos = mask.position(idx);
    double d2 = 0.0;
    for (int a = 0; a < dim; ++a) d2 += (pos[a] - p[a]) * (pos[a] - p[a]);
    cand[ncand++] = {idx, pos, d2};
  }
  std::stable_sort(cand.begin(), cand.begin() + ncand,
                   [](const Candidate& a, const Candidate& b) {
                     return a.dist2 < b.dist2;
                   });
  ncand = std::min(ncand, kMaxSupport);

  const int k = dim + 1;
  if (ncand < k) return redistribute(lattice, loc);

  double vol = 1.0;
  for (int a = 0; a < dim; ++a) vol *= grid.spacing(a);
  const double degenerate_tol = 1e-10 * vol;

  bool found = false;
  double best_diam = std::numeric_limits<double>::infinity();
  std::array<int, 4> best_set{};
  std::array<double, 4> best_lambda{};
  bool have_fallback = false;
  double fallback_min = -std::numeric_limits<double>::infinity();
  std::array<int, 4> fb_set{};
  std::array<double, 4> fb_lambda{};

  std::array<int, 4> sel{};
  for (int i = 0; i < k; ++i) sel[i] = i;
  while (true) {
    std::array<const Point*, 4> verts{};
    for (int i = 0; i < k; ++i) verts[i] = &cand[sel[i]].pos;
    std::array<double, 4> lambda{};
    if (barycentric(dim, verts, p, degenerate_tol, lambda)) {
      double lmin = lambda[0];
      for (int i = 1; i < k; ++i) lmin = std::min(lmin, lambda[i]);
      if (lmin >= -1e-12) {
        double diam2 = 0.0;
        for (int i = 0; i < k; ++i) {
          for (int j = 0; j < i; ++j) {
            double d2 = 0.0;
            for (int a = 0; a < dim; ++a) {
              const double t = (*verts[i])[a] - (*verts[j])[a];
              d2 += t * t;
            }
            diam2 = std::max(diam2, d2);
          }
        }
        if (diam2 < best_diam) {
          best_diam = diam2;
          best_set = sel;
          best_lambda = lambda;
          found = true;
        }
      } else if (!found && lmin > fallback_min) {
        fallback_min = lmin;
        fb_set = sel;
        fb_lambda = lambda;
        have_fallback = true;
      }
    }
    // Next k-combination of [0, ncand) in lexicographic order.
    int i = k - 1;
    while (i >= 0 && sel[i] == ncand - k + i) --i;
    if (i < 0) break;
    ++sel[i];
    for (int j = i + 1; j < k; ++j) sel[j] = sel[j - 1] + 1;
  }

  if (!found && !have_fallback) return redistribute(lattice, loc);
  const auto& set = found ? best_set : fb_set;
  auto lambda = found ? best_lambda : fb_lambda;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    lambda[i] = std::max(lambda[i], 0.0);
    total += lambda[i];
  }
  InterpWeights w;
  for (int i = 0; i < k; ++i) {
    w.node[w.count] = cand[set[i]].node;
    w.weight[w.count] = lambda[i] / total;
    ++w.count;
  }
  return w;
}

}  // namespace

Lattice::Lattice(Domain domain, GridSpec grid)
    : domain_(std::move(domain)), grid_(std::move(grid)),
      mask_(build_mask(domain_, grid_)), cell_full_(grid_.size(), 0) {
  const int dim = grid_.dim();
  for (std::size_t idx = 0; idx < grid_.size(); ++idx) {
    const auto ijk = grid_.multi_index(idx);
    bool valid = true;
    for (int a = 0; a < dim; ++a) {
      if (ijk[a] >= grid_.nodes(a) - 1) valid = false;
    }
    if (!valid) continue;
    bool full = true;
    for (int c = 0; c < (1 << dim) && full; ++c) {
      full = mask_.is_interior(detail::corner_index(grid_, idx, c));
    }
    cell_full_[idx] = full ? 1 : 0;
  }
}

InterpWeights interpolation_weights(const Lattice& lattice, const Point& p) {
  const GridSpec& grid = lattice.grid();
  const auto loc = detail::locate(grid, p);
  if (!lattice.cell_full(loc.origin)) return cut_cell_weights(lattice, loc, p);
  InterpWeights w;
  const int dim = grid.dim();
  w.count = 1 << dim;
  for (int c = 0; c < w.count; ++c) {
    w.node[c] = detail::corner_index(grid, loc.origin, c);
    w.weight[c] = detail::corner_weight(dim, loc.frac, c);
  }
  return w;
}

double exterior_sentinel() { return std::numeric_limits<double>::quiet_NaN(); }

GridField::GridField(std::shared_ptr<const Lattice> lattice)
    : lattice_(std::move(lattice)) {
  if (!lattice_) throw std::invalid_argument("field requires a lattice");
  const NodeMask& mask = lattice_->mask();
  values_.assign(mask.size(), exterior_sentinel());
  for (std::size_t idx : mask.interior()) values_[idx] = 0.0;
  for (std::size_t idx : mask.boundary()) values_[idx] = 0.0;
}

GridField GridField::sample(std::shared_ptr<const Lattice> lattice,
                            const std::function<double(const Point&)>& fn) {
  GridField f(std::move(lattice));
  const NodeMask& mask = f.lattice().mask();
  for (std::size_t idx : mask.interior()) f.values_[idx] = fn(mask.position(idx));
  for (std::size_t idx : mask.boundary()) f.values_[idx] = fn(mask.position(idx));
  return f;
}

double eval(const GridField& field, const Point& x) {
  const Lattice& lattice = field.lattice();
  const GridSpec& grid = lattice.grid();
  const double sd = lattice.domain().signed_distance(x);
  if (!(sd >= -1e-6 * grid.min_spacing())) {
    throw std::invalid_argument("eval point lies outside the domain closure");
  }
  Point p = x;
  for (int a = 0; a < grid.dim(); ++a) {
    p[a] = std::clamp(p[a], grid.lo()[a], grid.hi()[a]);
  }
  const InterpWeights w = interpolation_weights(lattice, p);
  double v = 0.0;
  for (int i = 0; i < w.count; ++i) {
    assert(!std::isnan(field[w.node[i]]) && "read of exterior sentinel");
    v += w.weight[i] * field[w.node[i]];
  }
  return v;
}

double sup_norm(const GridField& field) {
  const NodeMask& mask = field.lattice().mask();
  double m = 0.0;
  for (std::size_t idx : mask.interior()) m = std::max(m, std::abs(field[idx]));
  for (std::size_t idx : mask.boundary()) m = std::max(m, std::abs(field[idx]));
  return m;
}

double sup_diff(const GridField& a, const GridField& b) {
  if (!a.same_layout(b)) {
    throw std::invalid_argument("sup_diff on fields with different layouts");
  }
  const NodeMask& mask = a.lattice().mask();
  double m = 0.0;
  for (std::size_t idx : mask.interior()) m = std::max(m, std::abs(a[idx] - b[idx]));
  for (std::size_t idx : mask.boundary()) m = std::max(m, std::abs(a[idx] - b[idx]));
  return m;
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return exterior_sentinel();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::runtime_error("bad CSV number: " + s);
  return v;
}

}  // namespace

void write_csv(const GridField& field, std::ostream& out) {
  const GridSpec& grid = field.lattice().grid();
  const NodeMask& mask = field.lattice().mask();
  for (int a = 0; a < grid.dim(); ++a) {
    out << "# axis" << a << ": " << format_double(grid.lo()[a]) << ' '
        << format_double(grid.hi()[a]) << ' ' << grid.nodes(a) << '\n';
  }
  const std::size_t row = static_cast<std::size_t>(grid.nodes(0));
  for (std::size_t start = 0; start < grid.size(); start += row) {
    for (std::size_t i = 0; i < row; ++i) {
      const std::size_t idx = start + i;
      if (i) out << ',';
      out << (mask.is_exterior(idx) ? std::string("nan")
                                    : format_double(field[idx]));
    }
    out << '\n';
  }
}

GridField read_csv(std::istream& in, std::shared_ptr<const Lattice> lattice) {
  GridField field(lattice);
  const GridSpec& grid = lattice->grid();
  const NodeMask& mask = lattice->mask();
  std::string line;
  for (int a = 0; a < grid.dim(); ++a) {
    if (!std::getline(in, line)) throw std::runtime_error("CSV header truncated");
    std::istringstream hs(line);
    std::string hash, tag, lo, hi;
    int n = 0;
    hs >> hash >> tag >> lo >> hi >> n;
    const std::string expect_tag = "axis" + std::to_string(a) + ":";
    if (hash != "#" || tag != expect_tag || parse_double(lo) != grid.lo()[a] ||
        parse_double(hi) != grid.hi()[a] || n != grid.nodes(a)) {
      throw std::runtime_error("CSV header does not match lattice: " + line);
    }
  }
  std::size_t idx = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = std::min(line.find(',', pos), line.size());
      if (idx >= grid.size()) throw std::runtime_error("CSV has too many values");
      const double v = parse_double(line.substr(pos, comma - pos));
      if (mask.is_exterior(idx)) {
        if (!std::isnan(v)) throw std::runtime_error("CSV exterior node not nan");
      } else {
        if (!std::isfinite(v)) throw std::runtime_error("CSV value not finite");
        field[idx] = v;
      }
      ++idx;
      pos = comma + 1;
    }
  }
  if (idx != grid.size()) throw std::runtime_error("CSV has too few values");
  return field;
}

}  // namespace harmavg
