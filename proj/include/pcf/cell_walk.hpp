#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "model.hpp"

namespace pcf {

/// A depth-first sweep over every cell of one depth.
///
/// Boundary coefficients (d x k, one column per function) are given for the
/// cells of `base_level` and pushed down with the extension matrices. Work is
/// split into subtrees rooted at `chunk_depth`; the split depends only on the
/// alphabet and the depths, never on the worker count.
struct CellSweep {
  ModelPtr model;
  int base_level = 0;
  int depth = 0;
  int chunk_depth = 0;
  bool project = true;
  std::vector<Eigen::MatrixXd> base;

  std::size_t chunk_count() const { return cell_count(model->alphabet_size(), static_cast<std::size_t>(chunk_depth)); }
  std::size_t cells_per_chunk() const {
    return cell_count(model->alphabet_size(), static_cast<std::size_t>(depth - chunk_depth));
  }
};

// Shift each column by its first entry; a constant column becomes exactly zero.
inline void center_columns(Eigen::MatrixXd& x) {
  const Eigen::RowVectorXd top = x.row(0);
  x.rowwise() -= top;
}

inline CellSweep make_sweep(ModelPtr model, int base_level, std::vector<Eigen::MatrixXd> base, int depth,
                            bool project = true) {
  if (depth < base_level) throw std::invalid_argument("sweep depth below base level");
  const int n = model->alphabet_size();
  const std::size_t cap = model->tolerances().max_cells;
  std::size_t cells = 0;
  try {
    cells = cell_count(n, static_cast<std::size_t>(depth), cap);
  } catch (const std::overflow_error&) {
    throw CapacityError("depth " + std::to_string(depth) + " needs more than " + std::to_string(cap) + " cells");
  }
  if (base.size() != cell_count(n, static_cast<std::size_t>(base_level)))
    throw std::invalid_argument("one coefficient block per base cell required");
  int chunk = 0;
  std::size_t size = 1;
  while (chunk < depth && size < 64) {
    size *= static_cast<std::size_t>(n);
    ++chunk;
  }
  CellSweep s;
  s.model = std::move(model);
  s.base_level = base_level;
  s.depth = depth;
  s.chunk_depth = std::max(chunk, base_level);
  s.project = project;
  s.base = std::move(base);
  if (project)
    for (auto& x : s.base) center_columns(x);
  return s;
}

/// Calls fn(cell_index, coeffs, 1 / r_w) for each cell of the chunk in lexicographic order.
template <class CellFn>
void sweep_chunk(const CellSweep& s, std::size_t chunk, CellFn&& fn) {
  const Model& model = *s.model;
  const int n = model.alphabet_size();
  const auto& r = model.weights();
  const Word root = word_from_index(chunk, static_cast<std::size_t>(s.chunk_depth), n);

  std::size_t ancestor = 0;
  for (int k = 0; k < s.base_level; ++k)
    ancestor = ancestor * static_cast<std::size_t>(n) + static_cast<std::size_t>(root[static_cast<std::size_t>(k)] - 1);

  const int levels = s.depth - s.chunk_depth;
  std::vector<Eigen::MatrixXd> x(static_cast<std::size_t>(levels) + 1);
  std::vector<double> inv(static_cast<std::size_t>(levels) + 1);
  x[0] = s.base[ancestor];
  double scale = 1.0;
  for (int k = 0; k < s.chunk_depth; ++k) {
    const int letter = root[static_cast<std::size_t>(k)];
    scale /= r[static_cast<std::size_t>(letter - 1)];
    if (k >= s.base_level) {
      Eigen::MatrixXd next = model.harmonic().A(letter) * x[0];
      if (s.project) center_columns(next);
      x[0] = std::move(next);
    }
  }
  inv[0] = scale;
  const std::size_t first = chunk * s.cells_per_chunk();

  // Iterative DFS; letter[k] is the next child to visit below level k.
  std::vector<int> letter(static_cast<std::size_t>(levels) + 1, 0);
  std::size_t local = 0;
  int level = 0;
  if (levels == 0) {
    fn(first, static_cast<const Eigen::MatrixXd&>(x[0]), inv[0]);
    return;
  }
  while (level >= 0) {
    auto& next_letter = letter[static_cast<std::size_t>(level)];
    if (next_letter == n) {
      next_letter = 0;
      --level;
      continue;
    }
    const int l = ++next_letter;
    const auto child = static_cast<std::size_t>(level) + 1;
    x[child].noalias() = model.harmonic().A(l) * x[child - 1];
    if (s.project) center_columns(x[child]);
    inv[child] = inv[child - 1] / r[static_cast<std::size_t>(l - 1)];
    if (static_cast<int>(child) == levels) {
      fn(first + local, static_cast<const Eigen::MatrixXd&>(x[child]), inv[child]);
      ++local;
    } else {
      ++level;
    }
  }
}

/// Runs fn(chunk) for every chunk on `workers` threads. Exceptions propagate.
template <class ChunkFn>
void parallel_chunks(std::size_t chunks, int workers, ChunkFn&& fn) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(chunks)));
  if (workers == 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        fn(c);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pcf
