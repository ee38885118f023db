#include "harmavg/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace harmavg {

namespace {

constexpr int kMaxRows = kMaxDim + 2;
constexpr double kCostTol = 1e-11;
constexpr double kPivotTol = 1e-12;
constexpr double kFeasibleTol = 1e-9;

using Matrix = std::array<std::array<double, kMaxRows>, kMaxRows>;
using Vector = std::array<double, kMaxRows>;

// Solves A x = b for an m x m system with partial pivoting. Returns false
// when A is numerically singular.
bool solve_dense(Matrix a, Vector b, int m, Vector& x) {
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-300) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < m; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < m; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = m - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < m; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return true;
}

// A nonzero solution of A v = 0 for an m x cols matrix with cols > m,
// from the reduced row echelon form.
std::vector<double> null_vector(std::array<std::array<double, kMaxRows + 1>, kMaxRows> a,
                                int m, int cols) {
  std::vector<int> pivot_col;
  int row = 0;
  for (int c = 0; c < cols && row < m; ++c) {
    int piv = row;
    for (int r = row + 1; r < m; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) < 1e-14) continue;
    std::swap(a[piv], a[row]);
    const double p = a[row][c];
    for (int k = 0; k < cols; ++k) a[row][k] /= p;
    for (int r = 0; r < m; ++r) {
      if (r == row) continue;
      const double f = a[r][c];
      if (f == 0.0) continue;
      for (int k = 0; k < cols; ++k) a[r][k] -= f * a[row][k];
    }
    pivot_col.push_back(c);
    ++row;
  }
  int free_col = -1;
  for (int c = 0; c < cols; ++c) {
    if (std::find(pivot_col.begin(), pivot_col.end(), c) == pivot_col.end()) {
      free_col = c;
      break;
    }
  }
  std::vector<double> v(static_cast<std::size_t>(cols), 0.0);
  v[free_col] = 1.0;
  for (std::size_t r = 0; r < pivot_col.size(); ++r) {
    v[pivot_col[r]] = -a[r][free_col];
  }
  return v;
}

// Equality-constrained phase-one problem in standard form:
//   rows r < ambient:  sum_j s_r (z_j[r] - q[r]) alpha_j = 0
//   row ambient:       sum_j alpha_j = 1
// plus one artificial per row. Columns are generated on the fly from the
// samples; the tableau keeps B^-1 A explicitly.
class PhaseOne {
 public:
  PhaseOne(std::span<const HullPoint> samples, const HullPoint& query, int ambient)
      : samples_(samples), query_(query), ambient_(ambient), m_(ambient + 1),
        n_(samples.size()) {
    for (int r = 0; r < ambient_; ++r) {
      double span = 0.0;
      for (const HullPoint& z : samples_) span = std::max(span, std::abs(z[r] - query_[r]));
      scale_[r] = span > 0.0 ? 1.0 / span : 1.0;
    }
    scale_[ambient_] = 1.0;
    const std::size_t width = n_ + static_cast<std::size_t>(m_);
    tableau_.assign(static_cast<std::size_t>(m_) * width, 0.0);
    for (int r = 0; r < m_; ++r) {
      for (std::size_t j = 0; j < n_; ++j) at(r, j) = column_entry(r, j);
      at(r, n_ + static_cast<std::size_t>(r)) = 1.0;
      rhs_[r] = r == ambient_ ? 1.0 : 0.0;
      basis_[r] = n_ + static_cast<std::size_t>(r);
    }
    cost_.assign(width, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      double s = 0.0;
      for (int r = 0; r < m_; ++r) s += at(r, j);
      cost_[j] = -s;
    }
  }

  void solve() {
    const std::size_t width = n_ + static_cast<std::size_t>(m_);
    const int limit = 50 * (m_ + 1) + static_cast<int>(std::min<std::size_t>(n_, 100000));
    int degenerate_run = 0;
    for (int iter = 0; iter < limit; ++iter) {
      const bool bland = degenerate_run > 2 * m_;
      std::size_t enter = width;
      double best = -kCostTol;
      for (std::size_t j = 0; j < width; ++j) {
        if (cost_[j] < best) {
          enter = j;
          if (bland) break;
          best = cost_[j];
        }
      }
      if (enter == width) return;
      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (a <= kPivotTol) continue;
        const double t = rhs_[r] / a;
        if (t < ratio - 1e-15 ||
            (t <= ratio + 1e-15 && leave >= 0 && basis_[r] < basis_[leave])) {
          ratio = t;
          leave = r;
        }
      }
      if (leave < 0) return;  // unbounded direction cannot occur in phase one
      degenerate_run = ratio <= 1e-15 ? degenerate_run + 1 : 0;
      pivot(leave, enter);
    }
  }

  double objective() const {
    double s = 0.0;
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] >= n_) s += rhs_[r];
    }
    return s;
  }

  int rows() const { return m_; }
  std::size_t basic(int r) const { return basis_[r]; }
  bool is_artificial(std::size_t col) const { return col >= n_; }

  // Original (scaled) constraint column.
  double column_entry(int r, std::size_t j) const {
    if (j >= n_) return r == static_cast<int>(j - n_) ? 1.0 : 0.0;
    if (r == ambient_) return 1.0;
    return scale_[r] * (samples_[j][r] - query_[r]);
  }

  double scale(int r) const { return scale_[r]; }

 private:
  double& at(int r, std::size_t j) {
    return tableau_[static_cast<std::size_t>(r) * (n_ + m_) + j];
  }
  double at(int r, std::size_t j) const {
    return tableau_[static_cast<std::size_t>(r) * (n_ + m_) + j];
  }

  void pivot(int leave, std::size_t enter) {
    const std::size_t width = n_ + static_cast<std::size_t>(m_);
    const double p = at(leave, enter);
    for (std::size_t j = 0; j < width; ++j) at(leave, j) /= p;
    rhs_[leave] /= p;
    for (int r = 0; r < m_; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) at(r, j) -= f * at(leave, j);
      rhs_[r] -= f * rhs_[leave];
      if (rhs_[r] < 0.0 && rhs_[r] > -1e-14) rhs_[r] = 0.0;
    }
    const double f = cost_[enter];
    for (std::size_t j = 0; j < width; ++j) cost_[j] -= f * at(leave, j);
    basis_[leave] = enter;
  }

  std::span<const HullPoint> samples_;
  HullPoint query_;
  int ambient_;
  int m_;
  std::size_t n_;
  Vector scale_{};
  Vector rhs_{};
  std::array<std::size_t, kMaxRows> basis_{};
  std::vector<double> tableau_;
  std::vector<double> cost_;
};

}  // namespace

std::string to_string(HullVerdict v) {
  switch (v) {
    case HullVerdict::contained: return "contained";
    case HullVerdict::refused: return "refused";
    case HullVerdict::insufficient_sampling: return "insufficient_sampling";
  }
  return "unknown";
}

double witness_residual(std::span<const HullPoint> samples,
                        const HullWitness& witness, int ambient) {
  HullPoint sum{};
  double total = 0.0;
  for (std::size_t k = 0; k < witness.support.size(); ++k) {
    const HullPoint& z = samples[witness.support[k]];
    for (int r = 0; r < ambient; ++r) sum[r] += witness.coefficients[k] * z[r];
    total += witness.coefficients[k];
  }
  double res = std::abs(total - 1.0);
  for (int r = 0; r < ambient; ++r) {
    res = std::max(res, std::abs(sum[r] - witness.query[r]));
  }
  return res;
}

HullResult hull_membership(std::span<const HullPoint> samples,
                           const HullPoint& query, int ambient,
                           bool expect_inside) {
  if (ambient < 1 || ambient > kMaxDim + 1) {
    throw std::invalid_argument("hull_membership: ambient dimension out of range");
  }
  if (samples.empty()) throw std::invalid_argument("hull_membership: no samples");

  PhaseOne lp(samples, query, ambient);
  lp.solve();
  const int m = lp.rows();

  Matrix basis_matrix{};
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) basis_matrix[r][c] = lp.column_entry(r, lp.basic(c));
  }

  HullResult out;
  if (lp.objective() <= kFeasibleTol) {
    // Recover the basic values from the original columns for accuracy.
    Vector b{};
    b[ambient] = 1.0;
    Vector x{};
    if (!solve_dense(basis_matrix, b, m, x)) {
      throw std::runtime_error("hull_membership: singular final basis");
    }
    HullWitness w;
    w.query = query;
    for (int c = 0; c < m; ++c) {
      const std::size_t col = lp.basic(c);
      if (lp.is_artificial(col)) continue;
      const double a = std::max(0.0, x[c]);
      if (a == 0.0) continue;
      w.support.push_back(col);
      w.coefficients.push_back(a);
    }
    w.residual = witness_residual(samples, w, ambient);
    out.verdict = HullVerdict::contained;
    out.witness = std::move(w);
    return out;
  }

  // Duals of the phase-one optimum: B^T pi = c_B.
  Matrix bt{};
  Vector cb{};
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) bt[r][c] = basis_matrix[c][r];
    cb[r] = lp.is_artificial(lp.basic(r)) ? 1.0 : 0.0;
  }
  Vector pi{};
  if (!solve_dense(bt, cb, m, pi)) {
    throw std::runtime_error("hull_membership: singular final basis");
  }
  // pi_r s_r (z - q)_r + pi_amb <= 0 for samples; undo the scaling.
  double offset = pi[ambient];
  for (int r = 0; r < ambient; ++r) {
    out.normal[r] = pi[r] * lp.scale(r);
    offset -= out.normal[r] * query[r];
  }
  out.offset = offset;
  out.separation = pi[ambient];
  double worst = -std::numeric_limits<double>::infinity();
  for (const HullPoint& z : samples) {
    double v = offset;
    for (int r = 0; r < ambient; ++r) v += out.normal[r] * z[r];
    worst = std::max(worst, v);
  }
  out.worst_sample_value = worst;
  out.verdict = expect_inside ? HullVerdict::insufficient_sampling : HullVerdict::refused;
  return out;
}

HullWitness caratheodory_reduce(std::span<const HullPoint> samples,
                                HullWitness w, int ambient) {
  const int m = ambient + 1;
  while (static_cast<int>(w.support.size()) > m) {
    // Affine dependency among the first m + 1 support points.
    std::array<std::array<double, kMaxRows + 1>, kMaxRows> a{};
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c <= m; ++c) {
        a[r][c] = r == ambient ? 1.0 : samples[w.support[c]][r];
      }
    }
    const std::vector<double> dep = null_vector(a, m, m + 1);
    // Move alpha - t dep until the first coefficient with dep > 0 hits 0.
    double t = std::numeric_limits<double>::infinity();
    int hit = -1;
    for (int k = 0; k <= m; ++k) {
      if (dep[k] > 1e-15) {
        const double s = w.coefficients[k] / dep[k];
        if (s < t) {
          t = s;
          hit = k;
        }
      }
    }
    if (hit < 0) break;
    for (int k = 0; k <= m; ++k) w.coefficients[k] -= t * dep[k];
    w.coefficients[hit] = 0.0;
    std::vector<std::size_t> support;
    std::vector<double> coeff;
    for (std::size_t k = 0; k < w.support.size(); ++k) {
      if (w.coefficients[k] > 0.0) {
        support.push_back(w.support[k]);
        coeff.push_back(w.coefficients[k]);
      }
    }
    w.support = std::move(support);
    w.coefficients = std::move(coeff);
  }
  w.residual = witness_residual(samples, w, ambient);
  return w;
}

std::vector<HullPoint> graph_samples(const GridField& f) {
  const Lattice& lat = f.lattice();
  const NodeMask& mask = lat.mask();
  const int n = lat.grid().dim();
  std::vector<HullPoint> out;
  auto push = [&](std::size_t idx) {
    HullPoint p{};
    const Point x = mask.position(idx);
    for (int a = 0; a < n; ++a) p[a] = x[a];
    p[n] = f[idx];
    out.push_back(p);
  };
  for (std::size_t idx : mask.boundary()) push(idx);
  for (std::size_t idx : mask.interior()) push(idx);
  return out;
}

}  // namespace harmavg
