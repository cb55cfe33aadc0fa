#pragma once

#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cell_walk.hpp"
#include "energy.hpp"
#include "errors.hpp"
#include "model.hpp"

namespace pcf {

namespace detail {

/// k*k cross-mass matrices [lambda<f_i,f_j>(Sigma_w)] for every word of the given depth.
inline std::vector<double> cell_grams(const std::vector<PiecewiseHarmonic>& fs, int depth, int workers) {
  if (fs.empty()) throw std::invalid_argument("need at least one function");
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  const ModelPtr& model = fs.front().model();
  const int n = model->alphabet_size();
  int level = 0;
  std::vector<const PiecewiseHarmonic*> ptrs;
  for (const auto& f : fs) {
    require_same_model(fs.front(), f);
    level = std::max(level, f.level());
    ptrs.push_back(&f);
  }
  const int sweep_depth = std::max(depth, level);
  const CellSweep sweep = make_sweep(model, level, base_blocks(ptrs, level), sweep_depth);
  const Eigen::MatrixXd& d = model->laplacian().matrix();
  const auto k = static_cast<std::size_t>(fs.size());
  std::vector<double> grams(cell_count(n, static_cast<std::size_t>(sweep_depth)) * k * k);
  parallel_chunks(sweep.chunk_count(), workers, [&](std::size_t chunk) {
    Eigen::MatrixXd g;
    sweep_chunk(sweep, chunk, [&](std::size_t cell, const Eigen::MatrixXd& x, double inv) {
      g.noalias() = x.transpose() * d * x;
      g = (-inv * (g + g.transpose())).eval();
      std::copy(g.data(), g.data() + g.size(), grams.begin() + static_cast<std::ptrdiff_t>(cell * k * k));
    });
  });
  for (int m = sweep_depth; m > depth; --m) {
    std::vector<double> up(grams.size() / static_cast<std::size_t>(n), 0.0);
    const std::size_t block = k * k;
    for (std::size_t c = 0; c < up.size() / block; ++c)
      for (int l = 0; l < n; ++l)
        for (std::size_t e = 0; e < block; ++e)
          up[c * block + e] += grams[(c * static_cast<std::size_t>(n) + static_cast<std::size_t>(l)) * block + e];
    grams = std::move(up);
  }
  return grams;
}

}  // namespace detail

/// Boundary points of the realization: the fixed point of the map fixing each vertex.
inline std::vector<Eigen::VectorXd> realization_boundary(const StructureSpec& spec) {
  std::vector<Eigen::VectorXd> out;
  for (int p = 0; p < spec.boundary_size(); ++p) {
    const auto& map = spec.realization.at(static_cast<std::size_t>(spec.fixing_letter[static_cast<std::size_t>(p)] - 1));
    const auto e = map.offset.size();
    out.push_back((Eigen::MatrixXd::Identity(e, e) - map.matrix).fullPivLu().solve(map.offset));
  }
  return out;
}

/// Geometric positions of V_m (one row per vertex id), when the structure carries a realization.
inline Eigen::MatrixXd realization_vertices(const Model& model, int depth) {
  const auto& spec = model.spec();
  if (spec.realization.empty()) throw ValidationError("realization", "structure has no realization");
  const auto points = realization_boundary(spec);
  const auto table = model.vertices(depth);
  const auto e = points.front().size();
  Eigen::MatrixXd out(table->vertex_count, e);
  for (std::size_t c = 0; c < table->cell_count(); ++c) {
    const Word w = word_from_index(c, static_cast<std::size_t>(depth), model.alphabet_size());
    for (int p = 0; p < table->boundary_size; ++p) {
      Eigen::VectorXd x = points[static_cast<std::size_t>(p)];
      for (std::size_t k = w.size(); k-- > 0;) {
        const auto& map = spec.realization[static_cast<std::size_t>(w[k] - 1)];
        x = map.matrix * x + map.offset;
      }
      out.row(table->vertex(c, p)) = x.transpose();
    }
  }
  return out;
}

/// Phi on V_m together with the per-cell metric z(w) and the normalized Kusuoka mass nu.
struct EmbeddingTable {
  int depth = 0;
  int alphabet_size = 0;
  Eigen::Index n = 0;
  Eigen::MatrixXd coordinates;               // vertex_count x n
  std::optional<Eigen::MatrixXd> positions;  // vertex_count x e, from the realization
  std::vector<double> nu;
  std::vector<double> z;                     // n*n per cell, column-major
  Eigen::MatrixXd direction;                 // cells x n, top eigenvector of z(w)
  std::vector<std::pair<int, int>> coincident;  // distinct vertices with equal coordinates
  std::size_t null_cells = 0;

  std::size_t cell_count() const noexcept { return nu.size(); }
  Eigen::Map<const Eigen::MatrixXd> metric(std::size_t c) const {
    return Eigen::Map<const Eigen::MatrixXd>(z.data() + c * static_cast<std::size_t>(n * n), n, n);
  }
};

/// Embedding by arbitrary coordinates f_1..f_n with nu = sum a_i lambda<f_i>, normalized to mass 1.
inline EmbeddingTable embed(const std::vector<PiecewiseHarmonic>& coords, const std::vector<double>& a, int depth,
                            int workers = 1) {
  if (coords.empty()) throw std::invalid_argument("need at least one coordinate");
  if (a.size() != coords.size()) throw ValidationError("embedding weights", "one weight per coordinate");
  const ModelPtr& model = coords.front().model();
  const Tolerances& tol = model->tolerances();
  const auto k = static_cast<Eigen::Index>(coords.size());
  const auto grams = detail::cell_grams(coords, depth, workers);
  const std::size_t cells = grams.size() / static_cast<std::size_t>(k * k);

  EmbeddingTable out;
  out.depth = depth;
  out.alphabet_size = model->alphabet_size();
  out.n = k;
  out.coordinates.resize(model->vertices(depth)->vertex_count, k);
  for (Eigen::Index j = 0; j < k; ++j) out.coordinates.col(j) = prolong(coords[static_cast<std::size_t>(j)], depth).values();
  if (!out.coordinates.allFinite()) throw NumericalError("embedding: non-finite coordinate");
  if (!model->spec().realization.empty()) out.positions = realization_vertices(*model, depth);

  std::vector<double> raw(cells, 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) s += a[static_cast<std::size_t>(i)] * grams[c * static_cast<std::size_t>(k * k) + static_cast<std::size_t>(i * k + i)];
    raw[c] = s;
    total += s;
  }
  if (!(total > 0)) throw ValidationError("degenerate embedding", "every coordinate is constant");

  out.nu.resize(cells);
  out.z.assign(grams.size(), 0.0);
  out.direction = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cells), k);
  for (std::size_t c = 0; c < cells; ++c) {
    out.nu[c] = raw[c] / total;
    if (!(raw[c] > tol.mass_floor * total)) {
      ++out.null_cells;
      continue;
    }
    Eigen::Map<Eigen::MatrixXd> zc(out.z.data() + c * static_cast<std::size_t>(k * k), k, k);
    zc = Eigen::Map<const Eigen::MatrixXd>(grams.data() + c * static_cast<std::size_t>(k * k), k, k) / out.nu[c];
    if (!zc.allFinite()) throw NumericalError("embedding: non-finite metric at cell " + std::to_string(c));
    Eigen::VectorXd top;
    if (k == 1) {
      top = Eigen::VectorXd::Ones(1);
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(zc);
      top = eig.eigenvectors().col(k - 1);
    }
    Eigen::Index at = 0;
    top.cwiseAbs().maxCoeff(&at);
    if (top(at) < 0) top = -top;
    out.direction.row(static_cast<Eigen::Index>(c)) = top.transpose();
  }

  // Injectivity on V_m: equal coordinate rows for different ids.
  std::map<std::vector<double>, int> seen;
  for (Eigen::Index v = 0; v < out.coordinates.rows(); ++v) {
    std::vector<double> key;
    for (Eigen::Index j = 0; j < k; ++j) key.push_back(out.coordinates(v, j) + 0.0);
    auto [it, fresh] = seen.emplace(std::move(key), static_cast<int>(v));
    if (!fresh) out.coincident.emplace_back(it->second, static_cast<int>(v));
  }
  return out;
}

/// Polynomial in variables x1..xn, kept as a sum of monomials.
class Polynomial {
public:
  struct Term {
    double coefficient = 0.0;
    std::vector<int> powers;
  };

  Polynomial(int variables, std::vector<Term> terms) : variables_(variables), terms_(std::move(terms)) {
    for (const auto& t : terms_)
      if (t.powers.size() != static_cast<std::size_t>(variables_)) throw std::invalid_argument("power vector size");
  }

  int variables() const noexcept { return variables_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  double operator()(const Eigen::VectorXd& x) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.coefficient * monomial(t.powers, x, -1);
    return s;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(variables_);
    for (const auto& t : terms_)
      for (int j = 0; j < variables_; ++j)
        if (t.powers[static_cast<std::size_t>(j)] > 0)
          g(j) += t.coefficient * t.powers[static_cast<std::size_t>(j)] * monomial(t.powers, x, j);
    return g;
  }

  int degree() const {
    int d = 0;
    for (const auto& t : terms_) {
      int s = 0;
      for (int p : t.powers) s += p;
      if (t.coefficient != 0.0) d = std::max(d, s);
    }
    return d;
  }

private:
  // Product of x_j^{p_j}, with the exponent of `lowered` reduced by one.
  static double monomial(const std::vector<int>& powers, const Eigen::VectorXd& x, int lowered) {
    double v = 1.0;
    for (std::size_t j = 0; j < powers.size(); ++j) {
      const int p = powers[j] - (static_cast<int>(j) == lowered ? 1 : 0);
      for (int e = 0; e < p; ++e) v *= x(static_cast<Eigen::Index>(j));
    }
    return v;
  }

  int variables_;
  std::vector<Term> terms_;
};

/// Parses sums of products such as "x1^2 - 0.5*x1*x2 + 3".
inline Polynomial parse_polynomial(const std::string& text, int variables) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError("polynomial '" + text + "' at column " + std::to_string(pos + 1) + ": " + what);
  };
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto integer = [&]() {
    const std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) throw fail("expected an integer");
    return std::stoi(text.substr(start, pos - start));
  };

  std::vector<Polynomial::Term> terms;
  skip();
  if (pos == text.size()) throw fail("empty expression");
  bool first = true;
  while (true) {
    skip();
    if (pos == text.size()) break;
    double sign = 1.0;
    if (text[pos] == '+' || text[pos] == '-') {
      sign = text[pos] == '-' ? -1.0 : 1.0;
      ++pos;
      skip();
    } else if (!first) {
      throw fail("expected '+' or '-'");
    }
    first = false;
    Polynomial::Term term{sign, std::vector<int>(static_cast<std::size_t>(variables), 0)};
    while (true) {
      skip();
      if (pos < text.size() && text[pos] == 'x') {
        ++pos;
        const int j = integer();
        if (j < 1 || j > variables) throw fail("variable x" + std::to_string(j) + " out of range");
        int power = 1;
        skip();
        if (pos < text.size() && text[pos] == '^') {
          ++pos;
          skip();
          power = integer();
        }
        term.powers[static_cast<std::size_t>(j - 1)] += power;
      } else {
        const char* begin = text.c_str() + pos;
        char* end = nullptr;
        const double c = std::strtod(begin, &end);
        if (end == begin) throw fail("expected a number or a variable");
        pos += static_cast<std::size_t>(end - begin);
        term.coefficient *= c;
      }
      skip();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        continue;
      }
      break;
    }
    terms.push_back(std::move(term));
  }
  return Polynomial(variables, std::move(terms));
}

/// One row of the chain-rule check at depth m.
struct ChainRuleRow {
  int depth = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_gap = 0.0;
};

/// LHS = E(I_m g) for g = G(f_1..f_n) sampled on V_m; RHS = (1/2) sum_w grad G(Phi(x_w))^t z(w) grad G(Phi(x_w)) nu(w),
/// with x_w the boundary vertex of w with the smallest id.
inline ChainRuleRow chain_rule(const std::vector<PiecewiseHarmonic>& coords, const Polynomial& g, int depth,
                               int workers = 1) {
  if (coords.empty()) throw std::invalid_argument("need at least one coordinate");
  if (g.variables() != static_cast<int>(coords.size()))
    throw ValidationError("polynomial", "variable count differs from the coordinate count");
  bool degenerate = true;
  for (const auto& f : coords) degenerate = degenerate && f.is_constant();
  if (degenerate) throw ValidationError("degenerate chain rule", "every coordinate is constant");

  const ModelPtr& model = coords.front().model();
  const auto table = model->vertices(depth);
  const auto k = static_cast<Eigen::Index>(coords.size());
  Eigen::MatrixXd phi(table->vertex_count, k);
  for (Eigen::Index j = 0; j < k; ++j) phi.col(j) = prolong(coords[static_cast<std::size_t>(j)], depth).values();

  Eigen::VectorXd samples(table->vertex_count);
  for (Eigen::Index v = 0; v < phi.rows(); ++v) samples(v) = g(phi.row(v).transpose());
  const double lhs = energy(interpolate(model, depth, samples));

  const auto grams = detail::cell_grams(coords, depth, workers);
  double rhs = 0.0;
  for (std::size_t c = 0; c < table->cell_count(); ++c) {
    int rep = table->vertex(c, 0);
    for (int p = 1; p < table->boundary_size; ++p) rep = std::min(rep, table->vertex(c, p));
    const Eigen::VectorXd grad = g.gradient(phi.row(rep).transpose());
    const Eigen::Map<const Eigen::MatrixXd> lam(grams.data() + c * static_cast<std::size_t>(k * k), k, k);
    rhs += grad.dot(lam * grad);
  }
  rhs *= 0.5;

  ChainRuleRow row{depth, lhs, rhs, 0.0};
  if (rhs != 0.0) row.relative_gap = std::abs(lhs - rhs) / std::abs(rhs);
  else row.relative_gap = lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return row;
}

}  // namespace pcf
