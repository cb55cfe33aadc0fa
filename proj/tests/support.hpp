#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "json.hpp"
#include "pcf.hpp"

namespace support {

inline nlohmann::json document(const std::string& name) {
  std::ifstream in(fixtures::data(name));
  return nlohmann::json::parse(in);
}

inline pcf::StructureSpec spec_from(const nlohmann::json& doc) { return pcf::parse_structure(doc.dump()); }

inline pcf::ModelPtr sg() {
  static const pcf::ModelPtr m = pcf::Model::create(pcf::load_structure(fixtures::data("sg2.json")));
  return m;
}

inline pcf::ModelPtr vicsek() {
  static const pcf::ModelPtr m = pcf::Model::create(pcf::load_structure(fixtures::data("vicsek.json")));
  return m;
}

inline pcf::MeanFunctional uniform_mean(const pcf::Model& m) {
  return pcf::mean_functional(m, pcf::uniform_weights(m.alphabet_size()));
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

/// Random f in H_level.
inline pcf::PiecewiseHarmonic random_function(const pcf::ModelPtr& model, int level, std::mt19937_64& rng) {
  return pcf::interpolate(model, level, random_vector(rng, model->vertices(level)->vertex_count));
}

inline pcf::Word random_word(std::mt19937_64& rng, int n, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> letter(1, n);
  std::vector<int> l(len(rng));
  for (auto& x : l) x = letter(rng);
  return pcf::Word(l);
}

}  // namespace support
