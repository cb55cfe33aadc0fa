#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "harmonic.hpp"
#include "structure.hpp"
#include "tolerances.hpp"

namespace pcf {

/// Structure, harmonic structure and tolerances bundled for the function-level API.
///
/// Vertex tables are memoized per depth; everything else is immutable.
class Model {
public:
  static std::shared_ptr<const Model> create(StructureSpec spec, const Tolerances& tol = default_tolerances()) {
    HarmonicStructure h = make_harmonic(spec, tol);
    return std::shared_ptr<const Model>(new Model(std::move(spec), std::move(h), tol));
  }
  static std::shared_ptr<const Model> create(StructureSpec spec, HarmonicStructure h,
                                             const Tolerances& tol = default_tolerances()) {
    return std::shared_ptr<const Model>(new Model(std::move(spec), std::move(h), tol));
  }

  const StructureSpec& spec() const noexcept { return spec_; }
  const HarmonicStructure& harmonic() const noexcept { return harmonic_; }
  const Tolerances& tolerances() const noexcept { return tol_; }
  const LaplacianMatrix& laplacian() const noexcept { return harmonic_.laplacian; }
  const std::vector<double>& weights() const noexcept { return harmonic_.weights; }

  int alphabet_size() const noexcept { return spec_.alphabet_size; }
  int boundary_size() const noexcept { return spec_.boundary_size(); }

  std::shared_ptr<const VertexTable> vertices(int depth) const {
    std::lock_guard lock(mutex_);
    auto& slot = tables_[depth];
    if (!slot) slot = std::make_shared<const VertexTable>(build_vertices(spec_, depth));
    return slot;
  }

  double scaling(const Word& w) const {
    double rw = 1.0;
    for (int l : w.letters()) rw *= harmonic_.weights[static_cast<std::size_t>(l - 1)];
    return rw;
  }

private:
  Model(StructureSpec spec, HarmonicStructure h, const Tolerances& tol)
      : spec_(std::move(spec)), harmonic_(std::move(h)), tol_(tol) {}

  StructureSpec spec_;
  HarmonicStructure harmonic_;
  Tolerances tol_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::shared_ptr<const VertexTable>> tables_;
};

using ModelPtr = std::shared_ptr<const Model>;

}  // namespace pcf
