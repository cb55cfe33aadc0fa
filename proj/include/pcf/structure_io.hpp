#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "structure.hpp"

namespace pcf {

namespace detail {

inline int label_index(const StructureSpec& spec, const nlohmann::json& label) {
  if (!label.is_string()) throw ParseError("boundary label must be a string");
  const int p = spec.boundary_index(label.get<std::string>());
  if (p < 0) throw ValidationError("boundary", "unknown boundary label '" + label.get<std::string>() + "'");
  return p;
}

inline Eigen::MatrixXd row_major(const nlohmann::json& values, Eigen::Index rows, Eigen::Index cols,
                                 const std::string& field) {
  if (!values.is_array() || values.size() != static_cast<std::size_t>(rows * cols))
    throw ParseError(field + ": expected " + std::to_string(rows * cols) + " numbers");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values.at(static_cast<std::size_t>(r * cols + c)).get<double>();
  return m;
}

}  // namespace detail

/// Parses and validates a structure document (JSON).
inline StructureSpec parse_structure(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("structure document: ") + e.what());
  }
  StructureSpec spec;
  try {
    spec.name = doc.value("name", std::string{});
    spec.alphabet_size = doc.at("alphabet_size").get<int>();
    spec.boundary = doc.at("boundary").get<std::vector<std::string>>();
    const int d = spec.boundary_size();

    spec.fixing_letter.assign(static_cast<std::size_t>(d), 0);
    for (const auto& [letter, label] : doc.at("fixed_points").items()) {
      const int p = detail::label_index(spec, label);
      if (spec.fixing_letter[static_cast<std::size_t>(p)] != 0)
        throw ValidationError("fixed_points", "boundary vertex '" + label.get<std::string>() +
                                                  "' fixed by two letters");
      spec.fixing_letter[static_cast<std::size_t>(p)] = std::stoi(letter);
    }

    for (const auto& g : doc.at("gluing")) {
      if (!g.is_array() || g.size() != 4) throw ParseError("gluing entries are [i, p, j, q]");
      spec.gluing.push_back(
          {g[0].get<int>(), detail::label_index(spec, g[1]), g[2].get<int>(), detail::label_index(spec, g[3])});
    }

    if (doc.contains("realization")) {
      for (const auto& map : doc.at("realization")) {
        const auto& offset = map.at("offset");
        const auto e = static_cast<Eigen::Index>(offset.size());
        AffineMap a;
        a.matrix = detail::row_major(map.at("matrix"), e, e, "realization.matrix");
        a.offset = detail::row_major(offset, e, 1, "realization.offset");
        spec.realization.push_back(std::move(a));
      }
    }
    if (doc.contains("laplacian")) spec.laplacian = detail::row_major(doc.at("laplacian"), d, d, "laplacian");
    if (doc.contains("weights")) spec.weights = doc.at("weights").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("structure document: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ParseError("structure document: fixed_points keys must be letters");
  }
  return make_structure(std::move(spec));
}

inline StructureSpec load_structure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open structure file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_structure(buffer.str());
}

}  // namespace pcf
