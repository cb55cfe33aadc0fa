#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dimension.hpp"
#include "errors.hpp"
#include "json.hpp"

namespace pcf {

/// Reads [{"level": m, "values": [...]}, ...]; each member is xi-normalized.
inline FunctionFamily parse_family(const ModelPtr& model, const MeanFunctional& mean, const std::string& text,
                                   std::vector<double> weights = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("family file: ") + e.what());
  }
  if (!doc.is_array() || doc.empty()) throw ParseError("family file: expected a non-empty array of members");
  std::vector<PiecewiseHarmonic> members;
  try {
    for (const auto& item : doc) {
      const int level = item.at("level").get<int>();
      const auto values = item.at("values").get<std::vector<double>>();
      members.push_back(normalize_xi(
          interpolate(model, level, Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()))),
          mean));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("family file: ") + e.what());
  }
  if (weights.empty()) weights = uniform_weights(static_cast<int>(members.size()));
  return make_family(std::move(members), std::move(weights));
}

inline FunctionFamily load_family(const ModelPtr& model, const MeanFunctional& mean, const std::string& path,
                                  std::vector<double> weights = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open family file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_family(model, mean, buf.str(), std::move(weights));
}

}  // namespace pcf
