#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "structure.hpp"
#include "tolerances.hpp"

namespace pcf {

/// Symmetric d x d matrix satisfying (D1)-(D3). Only `validate_laplacian` builds one.
class LaplacianMatrix {
public:
  const Eigen::MatrixXd& matrix() const noexcept { return d_; }
  Eigen::Index size() const noexcept { return d_.rows(); }
  double operator()(Eigen::Index p, Eigen::Index q) const { return d_(p, q); }

  /// E^(0)(u, v) = (-Du, v).
  double energy(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const { return -(d_ * u).dot(v); }

private:
  explicit LaplacianMatrix(Eigen::MatrixXd d) : d_(std::move(d)) {}
  friend LaplacianMatrix validate_laplacian(const Eigen::MatrixXd&, const Tolerances&);
  Eigen::MatrixXd d_;
};

inline LaplacianMatrix validate_laplacian(const Eigen::MatrixXd& d,
                                          const Tolerances& tol = default_tolerances()) {
  if (d.rows() != d.cols() || d.rows() < 2) throw ValidationError("laplacian", "must be square, size >= 2");
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  if ((d - d.transpose()).cwiseAbs().maxCoeff() > tol.symmetry * scale)
    throw ValidationError("asymmetry", "laplacian is not symmetric");
  for (Eigen::Index p = 0; p < d.rows(); ++p)
    for (Eigen::Index q = 0; q < d.cols(); ++q)
      if (p != q && d(p, q) < -tol.laplacian * scale)
        throw ValidationError("D3", "off-diagonal entry (" + std::to_string(p + 1) + "," + std::to_string(q + 1) +
                                        ") is negative");
  const Eigen::MatrixXd sym = 0.5 * (d + d.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  if (ev.maxCoeff() > tol.laplacian * scale)
    throw ValidationError("D1", "laplacian is not nonpositive definite (max eigenvalue " +
                                    std::to_string(ev.maxCoeff()) + ")");
  const auto zeros = (ev.array().abs() <= tol.laplacian * scale).count();
  const double const_residual = (sym * Eigen::VectorXd::Ones(d.rows())).cwiseAbs().maxCoeff();
  if (zeros != 1 || const_residual > tol.laplacian * scale)
    throw ValidationError("D2", "kernel of the laplacian is not exactly the constants");
  return LaplacianMatrix(sym);
}

inline std::vector<double> validate_weights(const std::vector<double>& r, int alphabet_size) {
  if (r.size() != static_cast<std::size_t>(alphabet_size))
    throw ValidationError("weights", "need one weight per letter");
  for (double x : r)
    if (!(x > 0.0 && x < 1.0)) throw ValidationError("regularity", "weights must satisfy 0 < r_i < 1");
  return r;
}

/// Resistance scalings r_w for every word of length m, in lexicographic order.
inline std::vector<double> word_scalings(const std::vector<double>& r, int depth) {
  std::vector<double> out{1.0};
  for (int m = 0; m < depth; ++m) {
    std::vector<double> next;
    next.reserve(out.size() * r.size());
    for (double parent : out)
      for (double ri : r) next.push_back(parent * ri);
    out = std::move(next);
  }
  return out;
}

/// E^(m)(u, v) = sum_w r_w^{-1} E^(0)(u o psi_w, v o psi_w) over the cells of `table`.
inline double graph_energy(const VertexTable& table, const LaplacianMatrix& d, const std::vector<double>& r,
                           const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != table.vertex_count || v.size() != table.vertex_count)
    throw ValidationError("dimension", "values must cover every vertex of V_" + std::to_string(table.depth));
  if (d.size() != table.boundary_size) throw ValidationError("dimension", "laplacian size differs from #V_0");
  const auto scalings = word_scalings(r, table.depth);
  const int b = table.boundary_size;
  Eigen::VectorXd uc(b), vc(b);
  double total = 0.0;
  for (std::size_t w = 0; w < scalings.size(); ++w) {
    for (int p = 0; p < b; ++p) {
      uc(p) = u(table.vertex(w, p));
      vc(p) = v(table.vertex(w, p));
    }
    total += d.energy(uc, vc) / scalings[w];
  }
  return total;
}

/// Assembled level-m Laplacian H with E^(m)(u, v) = -(Hu, v).
inline Eigen::MatrixXd level_laplacian(const VertexTable& table, const LaplacianMatrix& d,
                                       const std::vector<double>& r) {
  const auto scalings = word_scalings(r, table.depth);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(table.vertex_count, table.vertex_count);
  const int b = table.boundary_size;
  for (std::size_t w = 0; w < scalings.size(); ++w)
    for (int p = 0; p < b; ++p)
      for (int q = 0; q < b; ++q) h(table.vertex(w, p), table.vertex(w, q)) += d(p, q) / scalings[w];
  return h;
}

/// Minimizer of E^(m) over functions on V_m with the given values on V_0.
inline Eigen::VectorXd harmonic_extension(const VertexTable& table, const LaplacianMatrix& d,
                                          const std::vector<double>& r, const Eigen::VectorXd& u) {
  if (u.size() != table.boundary_size) throw ValidationError("dimension", "boundary data must have #V_0 entries");
  const Eigen::MatrixXd h = level_laplacian(table, d, r);
  const auto inner = table.interior_ids();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(table.vertex_count);
  for (int p = 0; p < table.boundary_size; ++p) out(table.boundary_ids[static_cast<std::size_t>(p)]) = u(p);
  if (inner.empty()) return out;

  const auto ni = static_cast<Eigen::Index>(inner.size());
  Eigen::MatrixXd hii(ni, ni);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
  for (Eigen::Index a = 0; a < ni; ++a) {
    for (Eigen::Index c = 0; c < ni; ++c) hii(a, c) = h(inner[static_cast<std::size_t>(a)], inner[static_cast<std::size_t>(c)]);
    for (int p = 0; p < table.boundary_size; ++p)
      rhs(a) -= h(inner[static_cast<std::size_t>(a)], table.boundary_ids[static_cast<std::size_t>(p)]) * u(p);
  }
  // -H_II is symmetric positive definite when the cell graph is connected.
  Eigen::LLT<Eigen::MatrixXd> llt(-hii);
  if (llt.info() != Eigen::Success) throw NumericalError("harmonic extension: singular interior block");
  const Eigen::VectorXd x = llt.solve(-rhs);
  for (Eigen::Index a = 0; a < ni; ++a) out(inner[static_cast<std::size_t>(a)]) = x(a);
  return out;
}

inline Eigen::VectorXd harmonic_extension(const StructureSpec& spec, const LaplacianMatrix& d,
                                          const std::vector<double>& r, const Eigen::VectorXd& u) {
  return harmonic_extension(build_vertices(spec, 1), d, r, u);
}

/// Raised when (D, r) fails the renormalization fixed-point test.
class FixedPointError : public ValidationError {
public:
  explicit FixedPointError(double residual)
      : ValidationError("fixed point", "not a harmonic structure (fixed point residual " +
                                           std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// A validated harmonic structure together with its extension matrices.
///
/// `extension[i-1]` maps boundary values u of a harmonic function to the
/// boundary values of its pullback to cell i, so psi_w^* acts on boundary
/// data as A_{w_m} ... A_{w_1}.
struct HarmonicStructure {
  LaplacianMatrix laplacian;
  std::vector<double> weights;
  std::vector<Eigen::MatrixXd> extension;
  double fixed_point_residual = 0.0;

  int alphabet_size() const noexcept { return static_cast<int>(weights.size()); }
  Eigen::Index boundary_size() const noexcept { return laplacian.size(); }
  const Eigen::MatrixXd& A(int letter) const { return extension.at(static_cast<std::size_t>(letter - 1)); }
};

inline HarmonicStructure extension_matrices(const StructureSpec& spec, const LaplacianMatrix& d,
                                            const std::vector<double>& r,
                                            const Tolerances& tol = default_tolerances()) {
  validate_weights(r, spec.alphabet_size);
  const int b = spec.boundary_size();
  if (d.size() != b) throw ValidationError("dimension", "laplacian size differs from #V_0");
  const VertexTable level1 = build_vertices(spec, 1);

  std::vector<Eigen::MatrixXd> a(static_cast<std::size_t>(spec.alphabet_size), Eigen::MatrixXd(b, b));
  double residual = 0.0;
  for (int j = 0; j < b; ++j) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(b, j);
    const Eigen::VectorXd ext = harmonic_extension(level1, d, r, e);
    for (int letter = 1; letter <= spec.alphabet_size; ++letter)
      for (int p = 0; p < b; ++p)
        a[static_cast<std::size_t>(letter - 1)](p, j) = ext(level1.vertex(static_cast<std::size_t>(letter - 1), p));
    const double e0 = d.energy(e, e);
    const double e1 = graph_energy(level1, d, r, ext, ext);
    residual = std::max(residual, std::abs(e1 - e0) / std::max(1.0, e0));
  }
  if (!(residual <= tol.fixed_point)) throw FixedPointError(residual);
  return HarmonicStructure{d, r, std::move(a), residual};
}

inline HarmonicStructure make_harmonic(const StructureSpec& spec, const Tolerances& tol = default_tolerances()) {
  if (!spec.laplacian || !spec.weights)
    throw ValidationError("harmonic structure", "structure file has no laplacian/weights");
  return extension_matrices(spec, validate_laplacian(*spec.laplacian, tol), *spec.weights, tol);
}

/// Eigen-data attached to a boundary vertex p and the letter fixing it.
struct EigenData {
  int boundary = 0;  // 0-based slot p
  int letter = 0;    // letter whose contraction fixes p
  double rate = 0.0;  // r_letter
  Eigen::VectorXd u;  // column of D at p; left eigenvector of A for r
  Eigen::VectorXd v;  // right eigenvector, nonnegative, (u, v) = 1
  double quadratic = 0.0;  // -v^t D v
  std::vector<std::complex<double>> spectrum;  // eigenvalues of A, by modulus, descending
  double transpose_residual = 0.0;  // |A^t u - r u|
};

inline EigenData eigen_data(const HarmonicStructure& h, const StructureSpec& spec, int boundary,
                            const Tolerances& tol = default_tolerances()) {
  if (boundary < 0 || boundary >= spec.boundary_size()) throw std::out_of_range("boundary slot");
  EigenData out;
  out.boundary = boundary;
  out.letter = spec.fixing_letter[static_cast<std::size_t>(boundary)];
  out.rate = h.weights[static_cast<std::size_t>(out.letter - 1)];
  const Eigen::MatrixXd& a = h.A(out.letter);
  const Eigen::MatrixXd& d = h.laplacian.matrix();
  const double r = out.rate;
  const std::string tag = "eigen-data p" + std::to_string(boundary + 1);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  for (Eigen::Index k = 0; k < a.rows(); ++k) out.spectrum.push_back(solver.eigenvalues()(k));
  std::stable_sort(out.spectrum.begin(), out.spectrum.end(), [](auto x, auto y) {
    return std::abs(x) > std::abs(y);
  });

  auto count_near = [&](double target) {
    return std::count_if(out.spectrum.begin(), out.spectrum.end(),
                         [&](auto z) { return std::abs(z - target) <= tol.eigen_gap; });
  };
  if (count_near(1.0) != 1) throw NumericalError(tag + ": eigenvalue 1 is not simple");
  if (count_near(r) != 1) throw NumericalError(tag + ": eigenvalue r_i is not simple");
  for (auto z : out.spectrum)
    if (std::abs(z - 1.0) > tol.eigen_gap && std::abs(z - r) > tol.eigen_gap && std::abs(z) >= r - tol.eigen_gap)
      throw NumericalError(tag + ": an eigenvalue other than 1 and r_i has modulus >= r_i");

  out.u = d.col(boundary);
  out.transpose_residual = (a.transpose() * out.u - r * out.u).norm();

  const Eigen::Index n = a.rows();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a - r * Eigen::MatrixXd::Identity(n, n), Eigen::ComputeFullV);
  Eigen::VectorXd v = svd.matrixV().col(n - 1);
  Eigen::Index big = 0;
  v.cwiseAbs().maxCoeff(&big);
  if (v(big) < 0) v = -v;
  const double floor = tol.eigen_sign * v.norm();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (v(k) < -floor) throw NumericalError(tag + ": eigenvector for r_i has mixed signs");
    v(k) = std::max(v(k), 0.0);
  }
  const double pairing = out.u.dot(v);
  if (!(pairing > floor)) throw NumericalError(tag + ": (u_i, v_i) vanishes, cannot normalize");
  out.v = v / pairing;
  out.quadratic = -out.v.dot(d * out.v);
  if (!(out.quadratic > 0)) throw NumericalError(tag + ": -v^t D v is not positive");
  return out;
}

}  // namespace pcf
