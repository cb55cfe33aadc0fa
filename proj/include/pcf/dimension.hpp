#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cell_walk.hpp"
#include "energy.hpp"
#include "errors.hpp"
#include "model.hpp"

namespace pcf {

/// Finite family {e_i} with 2E(e_i) = 1 and weights a_i > 0 summing to 1.
struct FunctionFamily {
  std::vector<PiecewiseHarmonic> members;
  std::vector<double> weights;
  std::vector<std::string> labels;

  std::size_t size() const noexcept { return members.size(); }
  const ModelPtr& model() const { return members.front().model(); }
  int level() const {
    int m = 0;
    for (const auto& f : members) m = std::max(m, f.level());
    return m;
  }
};

inline FunctionFamily make_family(std::vector<PiecewiseHarmonic> members, std::vector<double> weights,
                                  std::vector<std::string> labels = {}) {
  if (members.empty()) throw ValidationError("family", "needs at least one member");
  if (weights.size() != members.size()) throw ValidationError("family", "one weight per member");
  const Tolerances& tol = members.front().model()->tolerances();
  double sum = 0.0;
  for (double a : weights) {
    if (!(a > 0)) throw ValidationError("family weights", "a_i must be positive");
    sum += a;
  }
  if (std::abs(sum - 1.0) > tol.weight_sum) throw ValidationError("family weights", "a_i must sum to 1");
  for (std::size_t i = 0; i < members.size(); ++i) {
    require_same_model(members.front(), members[i]);
    const double e2 = 2.0 * energy(members[i]);
    if (std::abs(e2 - 1.0) > tol.normalization)
      throw ValidationError("unnormalized family", "member " + std::to_string(i + 1) + " has 2E = " + std::to_string(e2));
  }
  if (labels.size() != members.size()) {
    labels.clear();
    for (std::size_t i = 0; i < members.size(); ++i) labels.push_back("e" + std::to_string(i + 1));
  }
  return FunctionFamily{std::move(members), std::move(weights), std::move(labels)};
}

/// Mean-zero harmonic basis of dimension d-1, orthonormalized in the energy.
inline FunctionFamily harmonic_family(const ModelPtr& model, const MeanFunctional& mean) {
  const int d = model->boundary_size();
  std::vector<PiecewiseHarmonic> members;
  std::vector<std::string> labels;
  for (int p = 0; p + 1 < d; ++p) {
    PiecewiseHarmonic f = normalize_xi(harmonic_function(model, Eigen::VectorXd::Unit(d, p)), mean);
    for (const auto& g : members) f = f - (2.0 * energy(f, g)) * g;
    members.push_back(normalize_xi(f, mean));
    labels.push_back("h" + std::to_string(p + 1));
  }
  return make_family(std::move(members), uniform_weights(d - 1), std::move(labels));
}

/// Harmonic basis plus the normalized level-1 hat function of every vertex in V_1 \ V_0.
inline FunctionFamily level1_family(const ModelPtr& model, const MeanFunctional& mean) {
  FunctionFamily base = harmonic_family(model, mean);
  auto members = base.members;
  auto labels = base.labels;
  const auto table = model->vertices(1);
  for (int v : table->interior_ids()) {
    members.push_back(normalize_xi(interpolate(model, 1, Eigen::VectorXd::Unit(table->vertex_count, v)), mean));
    labels.push_back("hat" + std::to_string(v));
  }
  const int k = static_cast<int>(members.size());
  return make_family(std::move(members), uniform_weights(k), std::move(labels));
}

/// Per-cell density matrices Z(w) = [lambda<e_i,e_j>(w) / lambda(w)] at one depth.
///
/// Cells whose lambda mass falls under the floor are skipped and counted.
/// `chunk_offsets[c]` is the first retained cell of sweep chunk c.
struct DensityMatrixField {
  int depth = 0;
  int alphabet_size = 0;
  Eigen::Index k = 0;
  std::vector<double> a;
  std::vector<std::size_t> cells;
  std::vector<double> weight;
  std::vector<double> z;            // k*k per retained cell, column-major
  std::vector<double> eigenvalues;  // k per retained cell, eigenvalues of M(w), descending
  std::vector<std::size_t> chunk_offsets;
  std::size_t skipped = 0;
  double total_weight = 0.0;

  std::size_t size() const noexcept { return cells.size(); }
  Eigen::Map<const Eigen::MatrixXd> Z(std::size_t c) const {
    return Eigen::Map<const Eigen::MatrixXd>(z.data() + c * static_cast<std::size_t>(k * k), k, k);
  }
  Eigen::Map<const Eigen::VectorXd> eigen(std::size_t c) const {
    return Eigen::Map<const Eigen::VectorXd>(eigenvalues.data() + c * static_cast<std::size_t>(k), k);
  }
  /// Trace-one form M(w) = [sqrt(a_i a_j) Z^ij(w)].
  Eigen::MatrixXd M(std::size_t c) const {
    Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(a.data(), k).cwiseSqrt();
    return s.asDiagonal() * Z(c) * s.asDiagonal();
  }
  Word word(std::size_t c) const { return word_from_index(cells[c], static_cast<std::size_t>(depth), alphabet_size); }
};

namespace detail {

struct DensityPlan {
  const FunctionFamily* family = nullptr;
  int depth = 0;
  Eigen::VectorXd a;
  double floor = 0.0;
  bool aggregated = false;       // depth below the family level: one chunk, masses summed up
  std::optional<CellSweep> sweep;
  std::vector<Eigen::MatrixXd> coarse_gram;  // only when aggregated
};

inline DensityPlan make_density_plan(const FunctionFamily& family, int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  DensityPlan plan;
  plan.family = &family;
  plan.depth = depth;
  plan.a = Eigen::Map<const Eigen::VectorXd>(family.weights.data(), static_cast<Eigen::Index>(family.size()));
  const ModelPtr& model = family.model();
  const int level = family.level();
  std::vector<const PiecewiseHarmonic*> ptrs;
  for (const auto& f : family.members) ptrs.push_back(&f);
  double total = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) total += family.weights[i] * 2.0 * energy(family.members[i]);
  plan.floor = model->tolerances().mass_floor * total;
  plan.sweep = make_sweep(model, level, base_blocks(ptrs, level), std::max(depth, level));
  if (depth < level) {
    plan.aggregated = true;
    const int n = model->alphabet_size();
    const Eigen::MatrixXd& d = model->laplacian().matrix();
    std::vector<Eigen::MatrixXd> fine(plan.sweep->base.size());
    for (std::size_t c = 0; c < plan.sweep->chunk_count(); ++c)
      sweep_chunk(*plan.sweep, c, [&](std::size_t cell, const Eigen::MatrixXd& x, double inv) {
        fine[cell] = -2.0 * inv * x.transpose() * d * x;
      });
    for (int m = level; m > depth; --m) {
      std::vector<Eigen::MatrixXd> up(fine.size() / static_cast<std::size_t>(n));
      for (std::size_t c = 0; c < up.size(); ++c) {
        up[c] = fine[c * static_cast<std::size_t>(n)];
        for (int l = 1; l < n; ++l) up[c] += fine[c * static_cast<std::size_t>(n) + static_cast<std::size_t>(l)];
      }
      fine = std::move(up);
    }
    plan.coarse_gram = std::move(fine);
  }
  return plan;
}

inline std::size_t density_chunk_count(const DensityPlan& plan) {
  return plan.aggregated ? 1 : plan.sweep->chunk_count();
}

inline void push_cell(DensityMatrixField& out, const DensityPlan& plan, std::size_t cell, const Eigen::MatrixXd& gram) {
  const double w = plan.a.dot(gram.diagonal());
  out.total_weight += w;
  if (!(w >= plan.floor) || !(w > 0)) {
    ++out.skipped;
    return;
  }
  const Eigen::MatrixXd zc = 0.5 * (gram + gram.transpose()) / w;
  const Eigen::VectorXd s = plan.a.cwiseSqrt();
  const Eigen::MatrixXd m = s.asDiagonal() * zc * s.asDiagonal();
  Eigen::VectorXd ev;
  if (m.rows() == 1) {
    ev = m.diagonal();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    ev = eig.eigenvalues().reverse();
  }
  out.cells.push_back(cell);
  out.weight.push_back(w);
  out.z.insert(out.z.end(), zc.data(), zc.data() + zc.size());
  out.eigenvalues.insert(out.eigenvalues.end(), ev.data(), ev.data() + ev.size());
}

inline DensityMatrixField empty_field(const DensityPlan& plan) {
  DensityMatrixField f;
  f.depth = plan.depth;
  f.alphabet_size = plan.family->model()->alphabet_size();
  f.k = static_cast<Eigen::Index>(plan.family->size());
  f.a = plan.family->weights;
  return f;
}

/// Density field restricted to one sweep chunk (aggregated up to `depth` when needed).
inline DensityMatrixField density_chunk(const DensityPlan& plan, std::size_t chunk) {
  DensityMatrixField out = empty_field(plan);
  out.chunk_offsets.push_back(0);
  if (plan.aggregated) {
    for (std::size_t c = 0; c < plan.coarse_gram.size(); ++c) push_cell(out, plan, c, plan.coarse_gram[c]);
    return out;
  }
  const Eigen::MatrixXd& d = plan.family->model()->laplacian().matrix();
  Eigen::MatrixXd gram;
  sweep_chunk(*plan.sweep, chunk, [&](std::size_t cell, const Eigen::MatrixXd& x, double inv) {
    gram.noalias() = x.transpose() * d * x;
    gram *= -2.0 * inv;
    push_cell(out, plan, cell, gram);
  });
  return out;
}

inline void append_field(DensityMatrixField& into, const DensityMatrixField& part) {
  into.chunk_offsets.push_back(into.cells.size());
  into.cells.insert(into.cells.end(), part.cells.begin(), part.cells.end());
  into.weight.insert(into.weight.end(), part.weight.begin(), part.weight.end());
  into.z.insert(into.z.end(), part.z.begin(), part.z.end());
  into.eigenvalues.insert(into.eigenvalues.end(), part.eigenvalues.begin(), part.eigenvalues.end());
  into.skipped += part.skipped;
  into.total_weight += part.total_weight;
}

}  // namespace detail

/// Calls fn(chunk_field) once per sweep chunk, in chunk order, computing up to
/// a fixed batch of chunks concurrently. Memory stays bounded by the batch.
inline void for_each_density_chunk(const FunctionFamily& family, int depth, int workers,
                                   const std::function<void(const DensityMatrixField&)>& fn) {
  const detail::DensityPlan plan = detail::make_density_plan(family, depth);
  const std::size_t chunks = detail::density_chunk_count(plan);
  const std::size_t batch = 64;
  std::vector<DensityMatrixField> parts;
  for (std::size_t start = 0; start < chunks; start += batch) {
    const std::size_t count = std::min(batch, chunks - start);
    parts.assign(count, DensityMatrixField{});
    parallel_chunks(count, workers, [&](std::size_t j) { parts[j] = detail::density_chunk(plan, start + j); });
    for (const auto& part : parts) fn(part);
  }
}

inline DensityMatrixField density_matrices(const FunctionFamily& family, int depth, int workers = 1) {
  DensityMatrixField out;
  bool first = true;
  for_each_density_chunk(family, depth, workers, [&](const DensityMatrixField& part) {
    if (first) {
      out = part;
      out.cells.clear();
      out.weight.clear();
      out.z.clear();
      out.eigenvalues.clear();
      out.chunk_offsets.clear();
      out.skipped = 0;
      out.total_weight = 0.0;
      first = false;
    }
    detail::append_field(out, part);
  });
  return out;
}

/// Rank-one factor Z ~ zeta zeta^t with zeta_i = Z^{i,alpha} / sqrt(Z^{alpha,alpha}).
struct ZetaCell {
  Eigen::Index alpha = 0;  // 0-based; smallest index maximizing a_i Z^ii
  Eigen::VectorXd zeta;
  double residual = 0.0;  // |Z - zeta zeta^t|_F / |Z|_F
};

template <class Matrix>
ZetaCell zeta_factor(const Matrix& z, const std::vector<double>& a) {
  ZetaCell out;
  double best = -1.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double v = a[static_cast<std::size_t>(i)] * z(i, i);
    if (v > best) {
      best = v;
      out.alpha = i;
    }
  }
  const double pivot = z(out.alpha, out.alpha);
  out.zeta = z.col(out.alpha) / std::sqrt(pivot);
  const double norm = z.norm();
  out.residual = norm > 0 ? (z - out.zeta * out.zeta.transpose()).norm() / norm : 0.0;
  return out;
}

struct RankProfile {
  int depth = 0;
  double weighted_mean_lambda2 = 0.0;
  double weighted_mean_residual = 0.0;
  double dimension_estimate = 0.0;
  std::size_t retained_cells = 0;
  std::size_t skipped_cells = 0;
  double retained_weight = 0.0;
};

namespace detail {

struct ProfileSums {
  double weight = 0.0;
  double lambda2 = 0.0;
  double residual = 0.0;
  double count = 0.0;
  std::size_t retained = 0;
  std::size_t skipped = 0;

  void merge(const ProfileSums& o) {
    weight += o.weight;
    lambda2 += o.lambda2;
    residual += o.residual;
    count += o.count;
    retained += o.retained;
    skipped += o.skipped;
  }
};

/// Sums over retained cells [begin, end) in order.
inline ProfileSums profile_sums(const DensityMatrixField& f, std::size_t begin, std::size_t end, double tau) {
  ProfileSums s;
  for (std::size_t c = begin; c < end; ++c) {
    const double w = f.weight[c];
    const auto ev = f.eigen(c);
    const double l2 = ev.size() > 1 ? std::max(ev(1), 0.0) : 0.0;
    const double res = zeta_factor(f.Z(c), f.a).residual;
    s.weight += w;
    s.lambda2 += w * l2;
    s.residual += w * res;
    s.count += w * static_cast<double>((ev.array() > tau).count());
    ++s.retained;
  }
  return s;
}

inline RankProfile finish_profile(int depth, const ProfileSums& s) {
  if (s.retained == 0) throw NumericalError("rank statistics: every cell fell below the mass floor");
  RankProfile p;
  p.depth = depth;
  p.weighted_mean_lambda2 = s.lambda2 / s.weight;
  p.weighted_mean_residual = s.residual / s.weight;
  p.dimension_estimate = s.count / s.weight;
  p.retained_cells = s.retained;
  p.skipped_cells = s.skipped;
  p.retained_weight = s.weight;
  return p;
}

}  // namespace detail

/// lambda-weighted statistics, summed chunk by chunk in lexicographic order.
inline RankProfile rank_statistics(const DensityMatrixField& field, double tau_rank) {
  detail::ProfileSums total;
  for (std::size_t c = 0; c < field.chunk_offsets.size(); ++c) {
    const std::size_t end = c + 1 < field.chunk_offsets.size() ? field.chunk_offsets[c + 1] : field.size();
    total.merge(detail::profile_sums(field, field.chunk_offsets[c], end, tau_rank));
  }
  total.skipped = field.skipped;
  return detail::finish_profile(field.depth, total);
}

/// Asserts PSD and the a-weighted trace identity on every retained cell.
inline void check_density_invariants(const DensityMatrixField& field, const Tolerances& tol) {
  for (std::size_t c = 0; c < field.size(); ++c) {
    const auto z = field.Z(c);
    double trace = 0.0;
    for (Eigen::Index i = 0; i < field.k; ++i) trace += field.a[static_cast<std::size_t>(i)] * z(i, i);
    if (std::abs(trace - 1.0) > tol.trace_identity)
      throw NumericalError("trace identity fails at cell " + to_string(field.word(c)) + ": " + std::to_string(trace));
    const auto ev = field.eigen(c);
    if (ev(ev.size() - 1) < -tol.psd * trace)
      throw NumericalError("density matrix not PSD at cell " + to_string(field.word(c)));
  }
}

/// Same result as rank_statistics(density_matrices(...)) without holding the whole field.
/// `on_chunk`, when set, sees every chunk in lexicographic order.
inline RankProfile scan_profile(const FunctionFamily& family, int depth, double tau_rank, int workers = 1,
                                const std::function<void(const DensityMatrixField&)>& on_chunk = {}) {
  detail::ProfileSums total;
  for_each_density_chunk(family, depth, workers, [&](const DensityMatrixField& part) {
    if (on_chunk) on_chunk(part);
    auto s = detail::profile_sums(part, 0, part.size(), tau_rank);
    s.skipped = part.skipped;
    total.merge(s);
  });
  return detail::finish_profile(depth, total);
}

struct ZetaField {
  std::vector<Eigen::Index> alpha;
  std::vector<Eigen::VectorXd> zeta;
  std::vector<double> residual;
};

inline ZetaField zeta_factors(const DensityMatrixField& field) {
  ZetaField out;
  for (std::size_t c = 0; c < field.size(); ++c) {
    ZetaCell z = zeta_factor(field.Z(c), field.a);
    out.alpha.push_back(z.alpha);
    out.zeta.push_back(std::move(z.zeta));
    out.residual.push_back(z.residual);
  }
  return out;
}

/// Per-cell s(w) = sum_j a_j zeta_j^2 and h_i(w) = a_i zeta_i / s(w).
struct RepresentingField {
  std::vector<double> s;
  std::vector<Eigen::VectorXd> h;
  double max_identity_error = 0.0;  // max |sum_i h_i zeta_i - 1|
  double max_s = 0.0;
  std::size_t violations = 0;       // cells breaking either bound
};

inline RepresentingField representing_field(const DensityMatrixField& field, const ZetaField& zeta) {
  if (zeta.zeta.size() != field.size()) throw std::invalid_argument("zeta field does not match density field");
  const double tol = 1e-10;
  const Eigen::Map<const Eigen::VectorXd> a(field.a.data(), field.k);
  RepresentingField out;
  for (std::size_t c = 0; c < field.size(); ++c) {
    const Eigen::VectorXd& z = zeta.zeta[c];
    const double s = a.dot(z.cwiseProduct(z));
    if (!(s > 0)) throw NumericalError("representing field: s(w) <= 0 at cell " + to_string(field.word(c)));
    Eigen::VectorXd h = a.cwiseProduct(z) / s;
    const double err = std::abs(h.dot(z) - 1.0);
    out.max_identity_error = std::max(out.max_identity_error, err);
    out.max_s = std::max(out.max_s, s);
    if (err > tol || s > 1.0 + tol) ++out.violations;
    out.s.push_back(s);
    out.h.push_back(std::move(h));
  }
  return out;
}

/// gamma(f) = max_i |(u_i, f|V_0)| and eta(f), the smallest maximizing slot (0-based).
struct GammaEta {
  double gamma = 0.0;
  int eta = 0;
};

inline GammaEta gamma_eta(const HarmonicStructure& h, const Eigen::VectorXd& u) {
  const Eigen::VectorXd du = h.laplacian.matrix() * u;
  GammaEta out;
  out.gamma = -1.0;
  for (Eigen::Index i = 0; i < du.size(); ++i)
    if (std::abs(du(i)) > out.gamma) {
      out.gamma = std::abs(du(i));
      out.eta = static_cast<int>(i);
    }
  return out;
}

inline GammaEta gamma_eta(const PiecewiseHarmonic& f) {
  if (f.level() != 0) throw ValidationError("gamma", "defined for harmonic (level-0) functions");
  return gamma_eta(f.model()->harmonic(), f.values());
}

/// r^{-n} P A^n u, with P the projection onto mean-zero vectors.
inline Eigen::VectorXd projected_power_limit(const Model& model, const Eigen::VectorXd& u, int boundary, int n) {
  const int letter = model.spec().fixing_letter.at(static_cast<std::size_t>(boundary));
  const double r = model.weights()[static_cast<std::size_t>(letter - 1)];
  const Eigen::MatrixXd& a = model.harmonic().A(letter);
  Eigen::VectorXd y = u.array() - u.mean();
  for (int k = 0; k < n; ++k) {
    y = a * y / r;
    y.array() -= y.mean();
  }
  return y;
}

/// r_i^{-n} lambda<iota(u)>(Sigma_{i...i}) with n repeated letters fixing boundary vertex i.
inline double cell_run_mass(const Model& model, const Eigen::VectorXd& u, int boundary, int n) {
  const Eigen::VectorXd y = projected_power_limit(model, u, boundary, n);
  return 2.0 * model.laplacian().energy(y, y);
}

/// The limit -2 (u_i, u)^2 v_i^t D v_i of cell_run_mass.
inline double cell_run_mass_limit(const EigenData& e, const Eigen::VectorXd& u) {
  const double c = e.u.dot(u);
  return 2.0 * c * c * e.quadratic;
}

/// Uniform samples of {harmonic f : integral f = 0, 2E(f) = 1} with a counter-based stream.
class KSetSampler {
public:
  KSetSampler(const Model& model, const MeanFunctional& mean) : d_(model.laplacian().matrix()), mean_(mean) {
    const Eigen::Index n = d_.rows();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(mean.coefficients);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    basis_ = q.rightCols(n - 1);
    const Eigen::MatrixXd gram = -2.0 * basis_.transpose() * d_ * basis_;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) throw NumericalError("energy is not positive on mean-zero harmonics");
    // u = B L^{-t} g has 2E(u) = |g|^2.
    map_ = basis_ * llt.matrixU().solve(Eigen::MatrixXd::Identity(n - 1, n - 1));
  }

  Eigen::Index dimension() const { return map_.cols(); }

  Eigen::VectorXd from_coordinates(const Eigen::VectorXd& g) const { return map_ * (g / g.norm()); }

  Eigen::VectorXd coordinates(std::uint64_t seed, std::uint64_t index) const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    Eigen::VectorXd g(map_.cols());
    do {
      for (Eigen::Index k = 0; k < g.size(); ++k) g(k) = normal(rng);
    } while (g.norm() == 0.0);
    return g / g.norm();
  }

  Eigen::VectorXd sample(std::uint64_t seed, std::uint64_t index) const {
    return from_coordinates(coordinates(seed, index));
  }

private:
  Eigen::MatrixXd d_;
  MeanFunctional mean_;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd map_;
};

inline std::vector<Eigen::VectorXd> sample_k_set(const Model& model, const MeanFunctional& mean, std::size_t count,
                                                 std::uint64_t seed) {
  KSetSampler sampler(model, mean);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) out.push_back(sampler.sample(seed, s));
  return out;
}

/// Sampling estimate of delta = min gamma over the normalized harmonic sphere.
/// An upper bound only; not certified.
struct DeltaEstimate {
  double value = 0.0;
  Eigen::VectorXd minimizer;
  bool certified = false;
};

inline DeltaEstimate estimate_delta(const Model& model, const MeanFunctional& mean, std::size_t samples,
                                    int refine_steps, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("need at least one sample");
  KSetSampler sampler(model, mean);
  const auto& h = model.harmonic();
  DeltaEstimate best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    Eigen::VectorXd g = sampler.coordinates(seed, s);
    double value = gamma_eta(h, sampler.from_coordinates(g)).gamma;
    double step = 0.25;
    for (int it = 0; it < refine_steps; ++it) {
      bool improved = false;
      for (Eigen::Index k = 0; k < g.size() && !improved; ++k)
        for (double sign : {1.0, -1.0}) {
          Eigen::VectorXd trial = g;
          trial(k) += sign * step;
          trial.normalize();
          const double v = gamma_eta(h, sampler.from_coordinates(trial)).gamma;
          if (v < value) {
            value = v;
            g = trial;
            improved = true;
            break;
          }
        }
      if (!improved) step *= 0.5;
    }
    if (value < best.value) {
      best.value = value;
      best.minimizer = sampler.from_coordinates(g);
    }
  }
  return best;
}

/// Sampling estimate of c_k: min over samples of lambda<f>(Sigma_{eta...eta}) / 2E(f), k letters.
inline double estimate_ck(const Model& model, const std::vector<Eigen::VectorXd>& samples, int k) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (samples.empty()) throw std::invalid_argument("need at least one sample");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& u : samples) {
    const int i = gamma_eta(model.harmonic(), u).eta;
    const int letter = model.spec().fixing_letter[static_cast<std::size_t>(i)];
    const double r = model.weights()[static_cast<std::size_t>(letter - 1)];
    const double mass = std::pow(r, k) * cell_run_mass(model, u, i, k);
    best = std::min(best, mass / (2.0 * model.laplacian().energy(u, u)));
  }
  return best;
}

}  // namespace pcf
