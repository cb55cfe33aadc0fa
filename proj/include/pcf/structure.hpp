#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "word.hpp"

namespace pcf {

/// psi_i(p) ~ psi_j(q). Letters are 1-based, boundary slots 0-based.
struct Gluing {
  int i = 0;
  int p = 0;
  int j = 0;
  int q = 0;
};

/// x -> matrix * x + offset, used only for plotting coordinates.
struct AffineMap {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd offset;
};

/// Combinatorial description of a p.c.f. self-similar structure.
///
/// The level-1 identification relation is the input; deeper identifications
/// are derived from it by `build_vertices`. Construct with `make_structure`,
/// which validates everything and fills the level-1 class tables.
struct StructureSpec {
  std::string name;
  int alphabet_size = 0;
  std::vector<std::string> boundary;
  /// fixing_letter[p] is the letter whose contraction fixes boundary vertex p.
  std::vector<int> fixing_letter;
  std::vector<Gluing> gluing;
  std::vector<AffineMap> realization;
  std::optional<Eigen::MatrixXd> laplacian;
  std::optional<std::vector<double>> weights;

  // Filled by validation.
  std::vector<int> level1_class;     // (i-1)*d + p -> class id
  std::vector<int> class_boundary;   // class id -> boundary slot, or -1
  int level1_class_count = 0;
  std::vector<std::string> unchecked_assumptions;

  int boundary_size() const noexcept { return static_cast<int>(boundary.size()); }

  /// Boundary slot fixed by `letter`, or -1.
  int fixed_boundary_of(int letter) const {
    for (std::size_t p = 0; p < fixing_letter.size(); ++p)
      if (fixing_letter[p] == letter) return static_cast<int>(p);
    return -1;
  }

  int boundary_index(const std::string& label) const {
    auto it = std::find(boundary.begin(), boundary.end(), label);
    return it == boundary.end() ? -1 : static_cast<int>(it - boundary.begin());
  }
};

namespace detail {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(std::size_t n) : parent(n) {
    for (std::size_t k = 0; k < n; ++k) parent[k] = static_cast<int>(k);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      auto& px = parent[static_cast<std::size_t>(x)];
      px = parent[static_cast<std::size_t>(px)];
      x = px;
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

}  // namespace detail

/// Checks every structural invariant and fills the level-1 tables.
inline StructureSpec make_structure(StructureSpec spec) {
  const int n = spec.alphabet_size;
  const int d = spec.boundary_size();
  if (n < 2) throw ValidationError("alphabet", "alphabet_size must be at least 2");
  if (d < 2) throw ValidationError("boundary", "boundary needs at least 2 vertices");
  for (int p = 0; p < d; ++p)
    for (int q = p + 1; q < d; ++q)
      if (spec.boundary[static_cast<std::size_t>(p)] == spec.boundary[static_cast<std::size_t>(q)])
        throw ValidationError("boundary", "duplicate label '" + spec.boundary[static_cast<std::size_t>(p)] + "'");

  if (spec.fixing_letter.size() != static_cast<std::size_t>(d))
    throw ValidationError("fixed_points", "every boundary vertex needs a fixing letter");
  for (int p = 0; p < d; ++p) {
    const int letter = spec.fixing_letter[static_cast<std::size_t>(p)];
    if (letter < 1 || letter > n)
      throw ValidationError("fixed_points", "boundary vertex '" + spec.boundary[static_cast<std::size_t>(p)] +
                                                "' is not the fixed point of any letter");
    for (int q = 0; q < p; ++q)
      if (spec.fixing_letter[static_cast<std::size_t>(q)] == letter)
        throw ValidationError("fixed_points", "letter " + std::to_string(letter) +
                                                  " declared to fix two boundary vertices");
  }

  for (const auto& g : spec.gluing) {
    if (g.i < 1 || g.i > n || g.j < 1 || g.j > n)
      throw ValidationError("gluing", "letter outside alphabet");
    if (g.p < 0 || g.p >= d || g.q < 0 || g.q >= d)
      throw ValidationError("gluing", "unknown boundary label");
    if (g.i == g.j) throw ValidationError("gluing", "a pair must glue two distinct cells");
  }

  auto slot = [d](int letter, int p) { return (letter - 1) * d + p; };
  detail::DisjointSets sets(static_cast<std::size_t>(n * d));
  for (const auto& g : spec.gluing) sets.unite(slot(g.i, g.p), slot(g.j, g.q));

  // Conflict: two slots of one cell in the same class.
  for (int letter = 1; letter <= n; ++letter)
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q)
        if (sets.find(slot(letter, p)) == sets.find(slot(letter, q)))
          throw ValidationError("gluing conflict",
                                "slots " + spec.boundary[static_cast<std::size_t>(p)] + " and " +
                                    spec.boundary[static_cast<std::size_t>(q)] + " of cell " +
                                    std::to_string(letter) + " are identified");

  // Fixed-point consistency: psi_i(p_i) = p_i must not coincide with another boundary vertex.
  std::vector<int> root_boundary(static_cast<std::size_t>(n * d), -1);
  for (int p = 0; p < d; ++p) {
    const int r = sets.find(slot(spec.fixing_letter[static_cast<std::size_t>(p)], p));
    auto& owner = root_boundary[static_cast<std::size_t>(r)];
    if (owner >= 0)
      throw ValidationError("fixed-point mismatch",
                            "boundary vertices '" + spec.boundary[static_cast<std::size_t>(owner)] + "' and '" +
                                spec.boundary[static_cast<std::size_t>(p)] + "' are glued together");
    owner = p;
  }

  // Level-1 cell graph connectivity.
  std::vector<std::vector<int>> adjacent(static_cast<std::size_t>(n));
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) {
      bool touch = false;
      for (int p = 0; p < d && !touch; ++p)
        for (int q = 0; q < d && !touch; ++q)
          touch = sets.find(slot(a, p)) == sets.find(slot(b, q));
      if (touch) {
        adjacent[static_cast<std::size_t>(a - 1)].push_back(b - 1);
        adjacent[static_cast<std::size_t>(b - 1)].push_back(a - 1);
      }
    }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<int> todo;
  todo.push(0);
  seen[0] = 1;
  while (!todo.empty()) {
    const int c = todo.front();
    todo.pop();
    for (int nb : adjacent[static_cast<std::size_t>(c)])
      if (!seen[static_cast<std::size_t>(nb)]) {
        seen[static_cast<std::size_t>(nb)] = 1;
        todo.push(nb);
      }
  }
  for (int c = 0; c < n; ++c)
    if (!seen[static_cast<std::size_t>(c)])
      throw ValidationError("connectivity",
                            "level-1 cell graph is disconnected (cell " + std::to_string(c + 1) +
                                " unreachable from cell 1)");

  if (!spec.realization.empty()) {
    if (spec.realization.size() != static_cast<std::size_t>(n))
      throw ValidationError("realization", "need one affine map per letter");
    const auto e = spec.realization.front().offset.size();
    for (const auto& map : spec.realization)
      if (map.offset.size() != e || map.matrix.rows() != e || map.matrix.cols() != e)
        throw ValidationError("realization", "inconsistent dimensions");
  }
  if (spec.laplacian && (spec.laplacian->rows() != d || spec.laplacian->cols() != d))
    throw ValidationError("laplacian", "must be a d x d matrix");
  if (spec.weights && spec.weights->size() != static_cast<std::size_t>(n))
    throw ValidationError("weights", "need one weight per letter");

  // Class ids in lexicographic order of first slot.
  spec.level1_class.assign(static_cast<std::size_t>(n * d), -1);
  std::vector<int> id_of_root(static_cast<std::size_t>(n * d), -1);
  spec.class_boundary.clear();
  for (int s = 0; s < n * d; ++s) {
    const int r = sets.find(s);
    auto& id = id_of_root[static_cast<std::size_t>(r)];
    if (id < 0) {
      id = static_cast<int>(spec.class_boundary.size());
      spec.class_boundary.push_back(root_boundary[static_cast<std::size_t>(r)]);
    }
    spec.level1_class[static_cast<std::size_t>(s)] = id;
  }
  spec.level1_class_count = static_cast<int>(spec.class_boundary.size());
  spec.unchecked_assumptions = {
      "K minus a boundary vertex is connected (condition (*), second half) is assumed, not checked",
      "level-1 cell-graph connectivity is used as the connectivity criterion for K"};
  return spec;
}

/// Canonical vertex ids of V_m.
///
/// `cell_boundary[word_index(w) * d + p]` is the id of psi_w(p). Ids are
/// assigned in lexicographic order of the smallest (w, p) representative.
struct VertexTable {
  int depth = 0;
  int alphabet_size = 0;
  int boundary_size = 0;
  int vertex_count = 0;
  std::vector<std::int32_t> cell_boundary;
  std::vector<int> boundary_ids;  // id of each p in V_0

  std::size_t cell_count() const {
    return cell_boundary.size() / static_cast<std::size_t>(boundary_size);
  }
  int vertex(std::size_t cell, int p) const {
    return cell_boundary[cell * static_cast<std::size_t>(boundary_size) + static_cast<std::size_t>(p)];
  }
  int vertex(const Word& w, int p) const { return vertex(word_index(w, alphabet_size), p); }

  /// Ids of V_m that are not in V_0.
  std::vector<int> interior_ids() const {
    std::vector<char> is_boundary(static_cast<std::size_t>(vertex_count), 0);
    for (int b : boundary_ids) is_boundary[static_cast<std::size_t>(b)] = 1;
    std::vector<int> out;
    for (int v = 0; v < vertex_count; ++v)
      if (!is_boundary[static_cast<std::size_t>(v)]) out.push_back(v);
    return out;
  }
};

inline VertexTable build_vertices(const StructureSpec& spec, int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  const int n = spec.alphabet_size;
  const int d = spec.boundary_size();

  VertexTable table;
  table.alphabet_size = n;
  table.boundary_size = d;
  table.depth = 0;
  table.vertex_count = d;
  table.cell_boundary.resize(static_cast<std::size_t>(d));
  for (int p = 0; p < d; ++p) table.cell_boundary[static_cast<std::size_t>(p)] = p;
  table.boundary_ids.resize(static_cast<std::size_t>(d));
  for (int p = 0; p < d; ++p) table.boundary_ids[static_cast<std::size_t>(p)] = p;

  for (int m = 1; m <= depth; ++m) {
    const std::size_t parents = table.cell_count();
    VertexTable next;
    next.depth = m;
    next.alphabet_size = n;
    next.boundary_size = d;
    next.cell_boundary.resize(parents * static_cast<std::size_t>(n * d));

    std::vector<int> from_parent(static_cast<std::size_t>(table.vertex_count), -1);
    std::vector<int> local(static_cast<std::size_t>(spec.level1_class_count), -1);
    int next_id = 0;
    std::size_t out = 0;
    for (std::size_t v = 0; v < parents; ++v) {
      std::fill(local.begin(), local.end(), -1);
      for (int letter = 1; letter <= n; ++letter)
        for (int p = 0; p < d; ++p, ++out) {
          const int c = spec.level1_class[static_cast<std::size_t>((letter - 1) * d + p)];
          const int q = spec.class_boundary[static_cast<std::size_t>(c)];
          int& id = q >= 0 ? from_parent[static_cast<std::size_t>(table.vertex(v, q))]
                           : local[static_cast<std::size_t>(c)];
          if (id < 0) id = next_id++;
          next.cell_boundary[out] = id;
        }
    }
    next.vertex_count = next_id;
    next.boundary_ids.resize(static_cast<std::size_t>(d));
    for (int p = 0; p < d; ++p)
      next.boundary_ids[static_cast<std::size_t>(p)] =
          from_parent[static_cast<std::size_t>(table.boundary_ids[static_cast<std::size_t>(p)])];
    table = std::move(next);
  }
  return table;
}

}  // namespace pcf
