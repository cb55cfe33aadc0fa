#include <gtest/gtest.h>

#include <set>

#include "brute.hpp"
#include "support.hpp"

namespace {

std::string invariant_of(const nlohmann::json& doc) {
  try {
    support::spec_from(doc);
  } catch (const pcf::ValidationError& e) {
    return e.invariant();
  }
  return "";
}

}  // namespace

TEST(Structure, ShippedGasketIsValid) {
  const auto spec = pcf::load_structure(fixtures::data("sg2.json"));
  EXPECT_EQ(spec.alphabet_size, 3);
  EXPECT_EQ(spec.boundary_size(), 3);
  EXPECT_EQ(spec.level1_class_count, 6);
  EXPECT_FALSE(spec.unchecked_assumptions.empty());
}

TEST(Structure, ShippedVicsekIsValid) {
  const auto spec = pcf::load_structure(fixtures::data("vicsek.json"));
  EXPECT_EQ(spec.alphabet_size, 5);
  EXPECT_EQ(spec.level1_class_count, 16);
}

TEST(Structure, ConflictingGluingIsRejected) {
  // (1,p2) glued to (2,p1) and to (3,p1), while (3,p1) is already (1,p3): cell 1 would meet itself.
  auto doc = support::document("sg2.json");
  doc["gluing"].push_back({1, "p2", 3, "p1"});
  EXPECT_EQ(invariant_of(doc), "gluing conflict");
}

TEST(Structure, SingleLetterAlphabetIsRejected) {
  auto doc = support::document("sg2.json");
  doc["alphabet_size"] = 1;
  EXPECT_THROW(support::spec_from(doc), pcf::ValidationError);
}

TEST(Structure, DisconnectedCellGraphIsRejected) {
  auto doc = support::document("sg2.json");
  doc["gluing"] = nlohmann::json::array({{1, "p2", 2, "p1"}});
  EXPECT_EQ(invariant_of(doc), "connectivity");
}

TEST(Structure, GluingTwoFixedPointsIsAMismatch) {
  auto doc = support::document("sg2.json");
  doc["gluing"].push_back({1, "p1", 2, "p2"});
  EXPECT_EQ(invariant_of(doc), "fixed-point mismatch");
}

TEST(Structure, SelfGluingAndUnknownLabelsAreRejected) {
  auto doc = support::document("sg2.json");
  doc["gluing"].push_back({2, "p1", 2, "p3"});
  EXPECT_EQ(invariant_of(doc), "gluing");
  doc = support::document("sg2.json");
  doc["gluing"].push_back({1, "p9", 2, "p1"});
  EXPECT_THROW(support::spec_from(doc), pcf::ValidationError);
  doc = support::document("sg2.json");
  doc["gluing"].push_back({4, "p1", 2, "p1"});
  EXPECT_THROW(support::spec_from(doc), pcf::ValidationError);
}

TEST(Structure, FixedPointsMustCoverTheBoundary) {
  auto doc = support::document("sg2.json");
  doc["fixed_points"].erase("3");
  EXPECT_THROW(support::spec_from(doc), pcf::ValidationError);
}

TEST(Structure, MalformedDocumentsAreParseErrors) {
  EXPECT_THROW(pcf::parse_structure("{not json"), pcf::ParseError);
  EXPECT_THROW(pcf::parse_structure("{}"), pcf::ParseError);
  auto doc = support::document("sg2.json");
  doc["gluing"] = nlohmann::json::array({{1, "p2", 2}});
  EXPECT_THROW(support::spec_from(doc), pcf::ParseError);
  doc = support::document("sg2.json");
  doc["laplacian"] = {1, 2, 3};
  EXPECT_THROW(support::spec_from(doc), pcf::ParseError);
  EXPECT_THROW(pcf::load_structure("/nonexistent/file.json"), pcf::ParseError);
}

TEST(Vertices, DepthZeroIsTheBoundary) {
  for (const auto& model : {support::sg(), support::vicsek()}) {
    const auto t = model->vertices(0);
    EXPECT_EQ(t->vertex_count, model->boundary_size());
    for (int p = 0; p < model->boundary_size(); ++p) EXPECT_EQ(t->vertex(0, p), p);
  }
}

TEST(Vertices, CountsMatchEnumeration) {
  for (int m = 0; m < 4; ++m) {
    EXPECT_EQ(support::sg()->vertices(m)->vertex_count, fixtures::sg_vertex_counts[m]);
    EXPECT_EQ(support::vicsek()->vertices(m)->vertex_count, fixtures::vicsek_vertex_counts[m]);
  }
}

TEST(Vertices, CountRecursionHolds) {
  for (const auto& model : {support::sg(), support::vicsek()}) {
    const int n = model->alphabet_size();
    const int pairs = static_cast<int>(model->spec().gluing.size());
    for (int m = 2; m <= 5; ++m)
      EXPECT_EQ(model->vertices(m)->vertex_count, n * model->vertices(m - 1)->vertex_count - pairs);
  }
}

TEST(Vertices, IdsAgreeWithGeometricIdentification) {
  // Two slots share an id exactly when their realization images coincide.
  for (const auto& model : {support::sg(), support::vicsek()})
    for (int m = 0; m <= 4; ++m) {
      const auto table = model->vertices(m);
      const auto keys = brute::slot_keys(*model, m);
      EXPECT_EQ(table->vertex_count, brute::vertex_count(*model, m));
      std::map<std::vector<long long>, int> id_of;
      for (std::size_t s = 0; s < keys.size(); ++s) {
        const int id = table->cell_boundary[s];
        auto [it, fresh] = id_of.emplace(keys[s], id);
        EXPECT_EQ(it->second, id);
      }
      std::set<int> ids;
      for (auto& [k, id] : id_of) ids.insert(id);
      EXPECT_EQ(static_cast<int>(ids.size()), table->vertex_count);
    }
}

TEST(Vertices, IdsFollowFirstLexicographicEncounter) {
  const auto t = support::sg()->vertices(3);
  int next = 0;
  for (int id : t->cell_boundary) {
    ASSERT_LE(id, next);
    if (id == next) ++next;
  }
  EXPECT_EQ(next, t->vertex_count);
}

TEST(Vertices, BuildIsDeterministic) {
  const auto spec = pcf::load_structure(fixtures::data("vicsek.json"));
  const auto a = pcf::build_vertices(spec, 4), b = pcf::build_vertices(spec, 4);
  EXPECT_EQ(a.cell_boundary, b.cell_boundary);
  EXPECT_EQ(a.boundary_ids, b.boundary_ids);
}

TEST(Vertices, BoundaryIdsAreTheCornerImages) {
  const auto model = support::sg();
  const auto t = model->vertices(3);
  for (int p = 0; p < 3; ++p) {
    const pcf::Word corner{p + 1, p + 1, p + 1};
    EXPECT_EQ(t->boundary_ids[static_cast<std::size_t>(p)], t->vertex(corner, p));
  }
}
