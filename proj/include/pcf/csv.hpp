#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "dimension.hpp"
#include "embedding.hpp"
#include "energy.hpp"

namespace pcf::csv {

/// Round-trip formatting, 17 significant digits.
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_measure(std::ostream& os, const CellMeasureTable& t) {
  os << "word,mass\n";
  for (std::size_t c = 0; c < t.masses.size(); ++c)
    os << to_string(word_from_index(c, static_cast<std::size_t>(t.depth), t.alphabet_size)) << ',' << num(t.masses[c])
       << '\n';
}

inline void write_cells_header(std::ostream& os, Eigen::Index k) {
  os << "word,weight";
  for (Eigen::Index i = 1; i <= k; ++i) os << ",lambda" << i;
  os << ",residual,alpha\n";
}

/// Rows for the retained cells of one field (or one chunk of it). alpha is 1-based.
inline void write_cells(std::ostream& os, const DensityMatrixField& f) {
  for (std::size_t c = 0; c < f.size(); ++c) {
    const auto ev = f.eigen(c);
    const ZetaCell z = zeta_factor(f.Z(c), f.a);
    os << to_string(f.word(c)) << ',' << num(f.weight[c]);
    for (Eigen::Index i = 0; i < ev.size(); ++i) os << ',' << num(ev(i));
    os << ',' << num(z.residual) << ',' << z.alpha + 1 << '\n';
  }
}

inline void write_profile_header(std::ostream& os) {
  os << "depth,mean_lambda2,mean_residual,dim_estimate,skipped_cells\n";
}

inline void write_profile_row(std::ostream& os, const RankProfile& p) {
  os << p.depth << ',' << num(p.weighted_mean_lambda2) << ',' << num(p.weighted_mean_residual) << ','
     << num(p.dimension_estimate) << ',' << p.skipped_cells << '\n';
}

/// Vertex table: id, Phi coordinates, then realization positions when present.
inline void write_embedding_vertices(std::ostream& os, const EmbeddingTable& t) {
  os << "vertex";
  for (Eigen::Index j = 1; j <= t.n; ++j) os << ",phi" << j;
  const Eigen::Index e = t.positions ? t.positions->cols() : 0;
  for (Eigen::Index j = 1; j <= e; ++j) os << ",x" << j;
  os << '\n';
  for (Eigen::Index v = 0; v < t.coordinates.rows(); ++v) {
    os << v;
    for (Eigen::Index j = 0; j < t.n; ++j) os << ',' << num(t.coordinates(v, j));
    for (Eigen::Index j = 0; j < e; ++j) os << ',' << num((*t.positions)(v, j));
    os << '\n';
  }
}

/// Cell table: word, nu, z entries row by row (upper triangle), top direction.
inline void write_embedding_cells(std::ostream& os, const EmbeddingTable& t) {
  os << "word,nu";
  for (Eigen::Index i = 1; i <= t.n; ++i)
    for (Eigen::Index j = i; j <= t.n; ++j) os << ",z" << i << '_' << j;
  for (Eigen::Index i = 1; i <= t.n; ++i) os << ",dir" << i;
  os << '\n';
  for (std::size_t c = 0; c < t.cell_count(); ++c) {
    os << to_string(word_from_index(c, static_cast<std::size_t>(t.depth), t.alphabet_size)) << ',' << num(t.nu[c]);
    const auto z = t.metric(c);
    for (Eigen::Index i = 0; i < t.n; ++i)
      for (Eigen::Index j = i; j < t.n; ++j) os << ',' << num(z(i, j));
    for (Eigen::Index i = 0; i < t.n; ++i) os << ',' << num(t.direction(static_cast<Eigen::Index>(c), i));
    os << '\n';
  }
}

inline void write_chain_rule(std::ostream& os, const std::vector<ChainRuleRow>& rows) {
  os << "depth,lhs,rhs,relative_gap\n";
  for (const auto& r : rows) os << r.depth << ',' << num(r.lhs) << ',' << num(r.rhs) << ',' << num(r.relative_gap) << '\n';
}

}  // namespace pcf::csv
