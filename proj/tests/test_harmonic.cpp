#include <gtest/gtest.h>

#include "brute.hpp"
#include "support.hpp"

namespace {

std::string laplacian_failure(const Eigen::MatrixXd& d) {
  try {
    pcf::validate_laplacian(d);
  } catch (const pcf::ValidationError& e) {
    return e.invariant();
  }
  return "";
}

Eigen::MatrixXd sg_d() {
  Eigen::MatrixXd d = Eigen::MatrixXd::Ones(3, 3);
  d.diagonal().setConstant(-2.0);
  return d;
}

}  // namespace

TEST(Laplacian, GasketMatrixIsValid) {
  EXPECT_EQ(laplacian_failure(sg_d()), "");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sg_d());
  EXPECT_NEAR(eig.eigenvalues()(0), -3.0, 1e-12);
  EXPECT_NEAR(eig.eigenvalues()(1), -3.0, 1e-12);
  EXPECT_NEAR(eig.eigenvalues()(2), 0.0, 1e-12);
}

TEST(Laplacian, ConditionsAreNamed) {
  EXPECT_EQ(laplacian_failure(Eigen::MatrixXd::Identity(3, 3)), "D1");
  Eigen::MatrixXd d3 = sg_d();
  d3(0, 1) = d3(1, 0) = -1.0;
  d3(0, 0) = 0.0;
  d3(1, 1) = 0.0;
  EXPECT_EQ(laplacian_failure(d3), "D3");
  Eigen::MatrixXd two = Eigen::MatrixXd::Zero(4, 4);
  two << -1, 1, 0, 0, 1, -1, 0, 0, 0, 0, -1, 1, 0, 0, 1, -1;
  EXPECT_EQ(laplacian_failure(two), "D2");
  Eigen::MatrixXd asym = sg_d();
  asym(0, 1) = 1.5;
  EXPECT_EQ(laplacian_failure(asym), "asymmetry");
}

TEST(Weights, RegularityIsRequired) {
  EXPECT_THROW(pcf::validate_weights({0.6, 1.0, 0.6}, 3), pcf::ValidationError);
  EXPECT_THROW(pcf::validate_weights({0.6, 0.6}, 3), pcf::ValidationError);
  EXPECT_NO_THROW(pcf::validate_weights({0.6, 0.6, 0.6}, 3));
}

TEST(GraphEnergy, GasketExamples) {
  const auto model = support::sg();
  const Eigen::VectorXd u = Eigen::Vector3d(1, 0, 0);
  EXPECT_NEAR(model->laplacian().energy(u, u), 2.0, 1e-15);
  const auto t0 = model->vertices(0);
  EXPECT_NEAR(pcf::graph_energy(*t0, model->laplacian(), model->weights(), u, u), 2.0, 1e-15);
  const auto t1 = model->vertices(1);
  const Eigen::VectorXd ext = pcf::harmonic_extension(*t1, model->laplacian(), model->weights(), u);
  EXPECT_NEAR(pcf::graph_energy(*t1, model->laplacian(), model->weights(), ext, ext), 2.0, 1e-12);
  for (int m = 0; m <= 3; ++m) {
    const auto t = model->vertices(m);
    const Eigen::VectorXd c = Eigen::VectorXd::Constant(t->vertex_count, 3.7);
    EXPECT_EQ(pcf::graph_energy(*t, model->laplacian(), model->weights(), c, c), 0.0);
  }
}

TEST(GraphEnergy, DimensionMismatchThrows) {
  const auto model = support::sg();
  const auto t1 = model->vertices(1);
  const Eigen::VectorXd bad = Eigen::VectorXd::Zero(5);
  EXPECT_THROW(pcf::graph_energy(*t1, model->laplacian(), model->weights(), bad, bad), pcf::ValidationError);
}

TEST(Extension, GasketMidpoints) {
  const auto model = support::sg();
  const Eigen::VectorXd ext = pcf::harmonic_extension(model->spec(), model->laplacian(), model->weights(),
                                                      Eigen::Vector3d(1, 0, 0));
  ASSERT_EQ(ext.size(), 6);
  for (int v = 0; v < 6; ++v) EXPECT_NEAR(ext(v), fixtures::sg_ext_100[v], 1e-14);
}

TEST(Extension, ConstantsAndLinearity) {
  std::mt19937_64 rng(3);
  for (const auto& model : {support::sg(), support::vicsek()}) {
    const int d = model->boundary_size();
    const auto& spec = model->spec();
    const Eigen::VectorXd c = pcf::harmonic_extension(spec, model->laplacian(), model->weights(),
                                                      Eigen::VectorXd::Constant(d, -1.25));
    EXPECT_LT((c.array() + 1.25).abs().maxCoeff(), 1e-14);
    const Eigen::VectorXd u = support::random_vector(rng, d), v = support::random_vector(rng, d);
    const auto ext = [&](const Eigen::VectorXd& x) {
      return pcf::harmonic_extension(spec, model->laplacian(), model->weights(), x);
    };
    EXPECT_LT((ext(2.0 * u - 0.5 * v) - (2.0 * ext(u) - 0.5 * ext(v))).norm(), 1e-12);
  }
}

TEST(Extension, MatchesDenseSchurOracleAtDepth) {
  std::mt19937_64 rng(5);
  for (const auto& model : {support::sg(), support::vicsek()})
    for (int m = 1; m <= 3; ++m) {
      const Eigen::VectorXd u = support::random_vector(rng, model->boundary_size());
      const auto t = model->vertices(m);
      const Eigen::VectorXd lib = pcf::harmonic_extension(*t, model->laplacian(), model->weights(), u);
      EXPECT_LT((lib - brute::extend(*model, m, u)).cwiseAbs().maxCoeff(), 1e-12);
      // and the prolongation of iota(u) agrees as well
      EXPECT_LT((pcf::prolong(pcf::harmonic_function(model, u), m).values() - lib).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(ExtensionMatrices, GasketA1AndResidual) {
  const auto& h = support::sg()->harmonic();
  EXPECT_LE(h.fixed_point_residual, 1e-12);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(h.A(1)(i, j), fixtures::sg_A1[i][j], 1e-14);
  const Eigen::VectorXd a1u = h.A(1) * Eigen::Vector3d(1, 0, 0);
  EXPECT_NEAR(a1u(1), 0.4, 1e-14);
  EXPECT_NEAR(a1u(2), 0.4, 1e-14);
}

TEST(ExtensionMatrices, VicsekCornerMap) {
  const auto& h = support::vicsek()->harmonic();
  EXPECT_LE(h.fixed_point_residual, 1e-12);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(h.A(1)(i, j), fixtures::vicsek_A1[i][j], 1e-14);
}

TEST(ExtensionMatrices, RowSumsAreOne) {
  for (const auto& model : {support::sg(), support::vicsek()})
    for (int l = 1; l <= model->alphabet_size(); ++l)
      EXPECT_LT((model->harmonic().A(l).rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-14);
}

TEST(ExtensionMatrices, WrongWeightsAreNotAHarmonicStructure) {
  auto doc = support::document("sg2.json");
  doc["weights"] = {0.5, 0.5, 0.5};
  const auto spec = support::spec_from(doc);
  try {
    pcf::make_harmonic(spec);
    FAIL() << "expected a fixed-point failure";
  } catch (const pcf::FixedPointError& e) {
    EXPECT_GT(e.residual(), 1e-3);
    EXPECT_NE(std::string(e.what()).find("not a harmonic structure"), std::string::npos);
  }
}

TEST(ExtensionMatrices, FixedPointEnergyIdentity) {
  for (const auto& model : {support::sg(), support::vicsek()}) {
    const int d = model->boundary_size();
    const auto t1 = model->vertices(1);
    for (int p = 0; p < d; ++p) {
      const Eigen::VectorXd u = Eigen::VectorXd::Unit(d, p);
      const Eigen::VectorXd x = pcf::harmonic_extension(*t1, model->laplacian(), model->weights(), u);
      EXPECT_NEAR(pcf::graph_energy(*t1, model->laplacian(), model->weights(), x, x),
                  model->laplacian().energy(u, u), 1e-12);
    }
  }
}

TEST(EigenData, GasketFirstVertex) {
  const auto model = support::sg();
  const auto e = pcf::eigen_data(model->harmonic(), model->spec(), 0);
  EXPECT_EQ(e.letter, 1);
  EXPECT_TRUE(e.u.isApprox(Eigen::Vector3d(-2, 1, 1)));
  EXPECT_LE(e.transpose_residual, 1e-12);
  ASSERT_EQ(e.spectrum.size(), 3u);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(e.spectrum[static_cast<std::size_t>(k)].real(), fixtures::sg_A1_spectrum[k], 1e-10);
    EXPECT_NEAR(e.spectrum[static_cast<std::size_t>(k)].imag(), 0.0, 1e-12);
  }
  EXPECT_NEAR(e.u.dot(e.v), 1.0, 1e-14);
  EXPECT_TRUE(e.v.isApprox(Eigen::Vector3d(0, 0.5, 0.5), 1e-12));
  EXPECT_NEAR(e.quadratic, 0.5, 1e-12);
}

TEST(EigenData, InvariantsOnShippedStructures) {
  for (const auto& model : {support::sg(), support::vicsek()})
    for (int p = 0; p < model->boundary_size(); ++p) {
      const auto e = pcf::eigen_data(model->harmonic(), model->spec(), p);
      EXPECT_LE(e.transpose_residual, 1e-10);
      EXPECT_GT(e.quadratic, 0.0);
      EXPECT_GE(e.v.minCoeff(), 0.0);
      EXPECT_NEAR(std::abs(e.spectrum[0]), 1.0, 1e-10);
      EXPECT_NEAR(std::abs(e.spectrum[1]), e.rate, 1e-10);
      for (std::size_t k = 2; k < e.spectrum.size(); ++k) EXPECT_LT(std::abs(e.spectrum[k]), e.rate);
    }
}

TEST(Pullback, WordProductsUseReverseOrder) {
  const auto model = support::sg();
  std::mt19937_64 rng(9);
  const Eigen::VectorXd u = support::random_vector(rng, 3);
  const auto f = pcf::harmonic_function(model, u);
  for (const pcf::Word& w : {pcf::Word{1, 2}, pcf::Word{3, 1, 2}, pcf::Word{2, 2, 3}}) {
    const auto m = static_cast<int>(w.size());
    const Eigen::VectorXd direct = pcf::prolong(f, m).cell_values(pcf::word_index(w, 3));
    EXPECT_LT((brute::word_matrix(*model, w) * u - direct).norm(), 1e-13);
    EXPECT_LT((pcf::pullback(f, w).values() - direct).norm(), 1e-13);
  }
  EXPECT_LT((pcf::pullback(f, pcf::Word{1, 2}).values() - model->harmonic().A(2) * model->harmonic().A(1) * u).norm(),
            1e-14);
}

TEST(Energy, MonotoneUnderRestriction) {
  std::mt19937_64 rng(21);
  for (const auto& model : {support::sg(), support::vicsek()})
    for (int m = 0; m <= 2; ++m) {
      const auto fine = model->vertices(m + 1);
      const auto coarse = model->vertices(m);
      for (int t = 0; t < 5; ++t) {
        const Eigen::VectorXd x = support::random_vector(rng, fine->vertex_count);
        const Eigen::VectorXd y = brute::restrict_down(*model, m, x);
        EXPECT_LE(pcf::graph_energy(*coarse, model->laplacian(), model->weights(), y, y),
                  pcf::graph_energy(*fine, model->laplacian(), model->weights(), x, x) * (1 + 1e-12));
        // the minimizing extension of y attains equality
        const auto ext = pcf::prolong(pcf::interpolate(model, m, y), m + 1).values();
        const double coarse_e = pcf::graph_energy(*coarse, model->laplacian(), model->weights(), y, y);
        EXPECT_NEAR(pcf::graph_energy(*fine, model->laplacian(), model->weights(), ext, ext), coarse_e,
                    1e-12 * coarse_e);
      }
    }
}
