#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cell_walk.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "word.hpp"

namespace pcf {

/// A function in H_m, stored by its values on V_m.
class PiecewiseHarmonic {
public:
  PiecewiseHarmonic(ModelPtr model, int level, Eigen::VectorXd values)
      : model_(std::move(model)), level_(level), values_(std::move(values)) {
    if (level_ < 0) throw std::invalid_argument("level must be nonnegative");
    table_ = model_->vertices(level_);
    if (values_.size() != table_->vertex_count)
      throw ValidationError("dimension", "expected " + std::to_string(table_->vertex_count) + " values on V_" +
                                             std::to_string(level_) + ", got " + std::to_string(values_.size()));
  }

  const ModelPtr& model() const noexcept { return model_; }
  int level() const noexcept { return level_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  const VertexTable& table() const noexcept { return *table_; }

  /// Boundary values of the pullback to the level-m cell with the given index.
  Eigen::VectorXd cell_values(std::size_t cell) const {
    const int d = table_->boundary_size;
    Eigen::VectorXd out(d);
    for (int p = 0; p < d; ++p) out(p) = values_(table_->vertex(cell, p));
    return out;
  }

  bool is_constant(double tol = 0.0) const {
    return values_.size() == 0 || (values_.array() - values_(0)).abs().maxCoeff() <= tol;
  }

private:
  ModelPtr model_;
  int level_;
  Eigen::VectorXd values_;
  std::shared_ptr<const VertexTable> table_;
};

inline PiecewiseHarmonic interpolate(const ModelPtr& model, int level, const Eigen::VectorXd& values) {
  return PiecewiseHarmonic(model, level, values);
}

/// The harmonic function iota(u).
inline PiecewiseHarmonic harmonic_function(const ModelPtr& model, const Eigen::VectorXd& u) {
  return PiecewiseHarmonic(model, 0, u);
}

/// Boundary coefficients of every level-`depth` cell (depth >= f.level()), row-major by cell.
inline std::vector<Eigen::VectorXd> cell_coefficients(const PiecewiseHarmonic& f, int depth) {
  if (depth < f.level()) throw std::invalid_argument("depth below function level");
  std::vector<Eigen::VectorXd> cells;
  const std::size_t count = f.table().cell_count();
  cells.reserve(count);
  for (std::size_t c = 0; c < count; ++c) cells.push_back(f.cell_values(c));
  const auto& h = f.model()->harmonic();
  for (int m = f.level(); m < depth; ++m) {
    std::vector<Eigen::VectorXd> next;
    next.reserve(cells.size() * static_cast<std::size_t>(h.alphabet_size()));
    for (const auto& x : cells)
      for (int l = 1; l <= h.alphabet_size(); ++l) next.push_back(h.A(l) * x);
    cells = std::move(next);
  }
  return cells;
}

/// The same function represented on V_depth.
inline PiecewiseHarmonic prolong(const PiecewiseHarmonic& f, int depth) {
  if (depth == f.level()) return f;
  const auto table = f.model()->vertices(depth);
  const auto cells = cell_coefficients(f, depth);
  Eigen::VectorXd values(table->vertex_count);
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (int p = 0; p < table->boundary_size; ++p) values(table->vertex(c, p)) = cells[c](p);
  return PiecewiseHarmonic(f.model(), depth, std::move(values));
}

inline void require_same_model(const PiecewiseHarmonic& f, const PiecewiseHarmonic& g) {
  if (f.model() != g.model()) throw ValidationError("structure mismatch", "functions live on different models");
}

inline PiecewiseHarmonic operator+(const PiecewiseHarmonic& f, const PiecewiseHarmonic& g) {
  require_same_model(f, g);
  const int m = std::max(f.level(), g.level());
  return PiecewiseHarmonic(f.model(), m, prolong(f, m).values() + prolong(g, m).values());
}

inline PiecewiseHarmonic operator*(double a, const PiecewiseHarmonic& f) {
  return PiecewiseHarmonic(f.model(), f.level(), a * f.values());
}

inline PiecewiseHarmonic operator-(const PiecewiseHarmonic& f, const PiecewiseHarmonic& g) { return f + (-1.0) * g; }

inline PiecewiseHarmonic add_constant(const PiecewiseHarmonic& f, double c) {
  return PiecewiseHarmonic(f.model(), f.level(), f.values().array() + c);
}

/// psi_w^* f, at level max(0, m - |w|).
inline PiecewiseHarmonic pullback(const PiecewiseHarmonic& f, const Word& w) {
  const Model& model = *f.model();
  const int n = model.alphabet_size();
  w.check(n);
  const int len = static_cast<int>(w.size());
  const int m = f.level();
  if (len >= m) {
    Eigen::VectorXd x = f.cell_values(word_index(prefix(w, static_cast<std::size_t>(m)), n));
    for (int k = m; k < len; ++k) x = model.harmonic().A(w[static_cast<std::size_t>(k)]) * x;
    return PiecewiseHarmonic(f.model(), 0, std::move(x));
  }
  const int level = m - len;
  const auto table = model.vertices(level);
  const std::size_t offset = word_index(w, n) * table->cell_count();
  Eigen::VectorXd values(table->vertex_count);
  for (std::size_t c = 0; c < table->cell_count(); ++c)
    for (int p = 0; p < table->boundary_size; ++p) values(table->vertex(c, p)) = f.values()(f.table().vertex(offset + c, p));
  return PiecewiseHarmonic(f.model(), level, std::move(values));
}

/// E(f, g); exact at the larger of the two levels by the fixed-point property.
inline double energy(const PiecewiseHarmonic& f, const PiecewiseHarmonic& g) {
  require_same_model(f, g);
  const int m = std::max(f.level(), g.level());
  const auto fm = prolong(f, m);
  const auto gm = prolong(g, m);
  const Model& model = *f.model();
  return graph_energy(fm.table(), model.laplacian(), model.weights(), fm.values(), gm.values());
}

inline double energy(const PiecewiseHarmonic& f) { return energy(f, f); }

/// lambda<f,g>(Sigma_w) = 2 r_w^{-1} E(psi_w^* f, psi_w^* g).
inline double cell_mass(const PiecewiseHarmonic& f, const PiecewiseHarmonic& g, const Word& w) {
  require_same_model(f, g);
  if (f.is_constant() || g.is_constant()) return 0.0;
  const Model& model = *f.model();
  const int n = model.alphabet_size();
  w.check(n);
  const auto len = w.size();
  if (len < static_cast<std::size_t>(std::max(f.level(), g.level())))
    return 2.0 / model.scaling(w) * energy(pullback(f, w), pullback(g, w));
  // Below both levels: boundary values only, re-centred after every letter.
  const auto walk = [&](const PiecewiseHarmonic& h) {
    const auto m = static_cast<std::size_t>(h.level());
    Eigen::VectorXd x = h.cell_values(word_index(prefix(w, m), n));
    x.array() -= x(0);
    for (std::size_t k = m; k < len; ++k) {
      x = model.harmonic().A(w[k]) * x;
      x.array() -= x(0);
    }
    return x;
  };
  return 2.0 / model.scaling(w) * model.laplacian().energy(walk(f), walk(g));
}

/// Word-indexed masses of lambda<f,g> at one depth, in lexicographic order.
struct CellMeasureTable {
  int depth = 0;
  int alphabet_size = 0;
  std::vector<double> masses;
  double total = 0.0;

  double mass(const Word& w) const { return masses.at(word_index(w, alphabet_size)); }
};

namespace detail {

/// Level-L boundary blocks (d x k) for a list of functions, L = max level.
inline std::vector<Eigen::MatrixXd> base_blocks(const std::vector<const PiecewiseHarmonic*>& fs, int level) {
  const auto d = fs.front()->model()->boundary_size();
  const auto k = static_cast<Eigen::Index>(fs.size());
  std::vector<std::vector<Eigen::VectorXd>> per_fn;
  for (const auto* f : fs) per_fn.push_back(cell_coefficients(*f, level));
  std::vector<Eigen::MatrixXd> blocks(per_fn.front().size(), Eigen::MatrixXd(d, k));
  for (std::size_t c = 0; c < blocks.size(); ++c)
    for (Eigen::Index j = 0; j < k; ++j) blocks[c].col(j) = per_fn[static_cast<std::size_t>(j)][c];
  return blocks;
}

/// Sums consecutive groups of N entries `levels` times.
inline std::vector<double> aggregate_up(std::vector<double> v, int alphabet_size, int levels) {
  for (int k = 0; k < levels; ++k) {
    std::vector<double> up(v.size() / static_cast<std::size_t>(alphabet_size), 0.0);
    for (std::size_t c = 0; c < up.size(); ++c) {
      double s = 0.0;
      for (int l = 0; l < alphabet_size; ++l) s += v[c * static_cast<std::size_t>(alphabet_size) + static_cast<std::size_t>(l)];
      up[c] = s;
    }
    v = std::move(up);
  }
  return v;
}

}  // namespace detail

inline CellMeasureTable measure_table(const PiecewiseHarmonic& f, const PiecewiseHarmonic& g, int depth,
                                      int workers = 1) {
  require_same_model(f, g);
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  const ModelPtr& model = f.model();
  const int n = model->alphabet_size();
  const int base = std::max(f.level(), g.level());
  const int sweep_depth = std::max(depth, base);
  const CellSweep sweep = make_sweep(model, base, detail::base_blocks({&f, &g}, base), sweep_depth);
  const Eigen::MatrixXd& d = model->laplacian().matrix();

  std::vector<double> masses(cell_count(n, static_cast<std::size_t>(sweep_depth)));
  parallel_chunks(sweep.chunk_count(), workers, [&](std::size_t chunk) {
    sweep_chunk(sweep, chunk, [&](std::size_t cell, const Eigen::MatrixXd& x, double inv) {
      masses[cell] = -2.0 * inv * (d * x.col(0)).dot(x.col(1));
    });
  });

  CellMeasureTable out;
  out.depth = depth;
  out.alphabet_size = n;
  out.masses = detail::aggregate_up(std::move(masses), n, sweep_depth - depth);
  double total = 0.0;
  for (double m : out.masses) total += m;
  out.total = total;
  return out;
}

/// The linear functional u -> integral of iota(u) against the self-similar measure mu.
struct MeanFunctional {
  Eigen::VectorXd coefficients;
  std::vector<double> measure_weights;

  double operator()(const Eigen::VectorXd& u) const { return coefficients.dot(u); }
};

inline std::vector<double> uniform_weights(int count) {
  return std::vector<double>(static_cast<std::size_t>(count), 1.0 / count);
}

inline MeanFunctional mean_functional(const Model& model, const std::vector<double>& mu) {
  const int n = model.alphabet_size();
  if (mu.size() != static_cast<std::size_t>(n)) throw ValidationError("mu", "need one weight per letter");
  double sum = 0.0;
  for (double x : mu) {
    if (!(x > 0)) throw ValidationError("mu", "weights must be positive");
    sum += x;
  }
  if (std::abs(sum - 1.0) > model.tolerances().weight_sum) throw ValidationError("mu", "weights must sum to 1");

  const Eigen::Index d = model.boundary_size();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
  for (int l = 1; l <= n; ++l) b += mu[static_cast<std::size_t>(l - 1)] * model.harmonic().A(l).transpose();
  Eigen::MatrixXd system(d + 1, d);
  system.topRows(d) = Eigen::MatrixXd::Identity(d, d) - b;
  system.row(d).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d + 1);
  rhs(d) = 1.0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(system);
  if (qr.rank() < d) throw NumericalError("mean functional: singular fixed-point system");
  Eigen::VectorXd m = qr.solve(rhs);
  // One refinement step tightens the residual of the overdetermined solve.
  m += qr.solve(rhs - system * m);
  return MeanFunctional{std::move(m), mu};
}

/// Integral of f against mu.
inline double integral(const PiecewiseHarmonic& f, const MeanFunctional& mean) {
  const auto& mu = mean.measure_weights;
  const std::size_t cells = f.table().cell_count();
  double total = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    double mu_w = 1.0;
    std::size_t idx = c;
    for (int k = 0; k < f.level(); ++k) {
      mu_w *= mu[idx % mu.size()];
      idx /= mu.size();
    }
    total += mu_w * mean(f.cell_values(c));
  }
  return total;
}

/// (f - mean) / sqrt(2E(f)), or the zero function when f is constant.
inline PiecewiseHarmonic normalize_xi(const PiecewiseHarmonic& f, const MeanFunctional& mean) {
  const double e = energy(f);
  const double scale = std::max(1.0, f.values().cwiseAbs().maxCoeff());
  if (f.is_constant(1e-14 * scale) || !(e > 0)) return 0.0 * f;
  const double mean_value = integral(f, mean);
  return (1.0 / std::sqrt(2.0 * e)) * add_constant(f, -mean_value);
}

}  // namespace pcf
