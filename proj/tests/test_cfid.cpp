#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "linear_gaussian.hpp"
#include "oracles.hpp"
#include "rcgan/cfid.hpp"
#include "rcgan/embedding_io.hpp"

using namespace rcgan;
using namespace fixture;

namespace {

JointGaussianStats scalar_stats(double mx, double sx, double mh, double sh) {
  JointGaussianStats J;
  J.mu_x = Eigen::VectorXd::Constant(1, mx);
  J.mu_xhat = Eigen::VectorXd::Constant(1, mh);
  J.mu_y = Eigen::VectorXd::Zero(1);
  J.S_xx = Eigen::MatrixXd::Constant(1, 1, sx * sx);
  J.S_xhatxhat = Eigen::MatrixXd::Constant(1, 1, sh * sh);
  J.S_yy = Eigen::MatrixXd::Identity(1, 1);
  J.S_xy = Eigen::MatrixXd::Zero(1, 1);
  J.S_xhaty = Eigen::MatrixXd::Zero(1, 1);
  return J;
}

}  // namespace

TEST(ComputeStats, Examples) {
  EmbeddingSet E;
  E.X = Eigen::MatrixXd::Constant(4, 2, 3.0);
  E.Y = Eigen::MatrixXd::Constant(4, 1, -1.0);
  E.Xhat = E.X;
  JointGaussianStats J = compute_stats(E);
  EXPECT_EQ(J.S_xx.norm(), 0.0);
  EXPECT_EQ(J.S_xy.norm(), 0.0);
  EXPECT_EQ(J.mu_x, Eigen::Vector2d(3, 3));
  EXPECT_EQ(J.mu_y[0], -1.0);

  std::mt19937_64 gen(5);
  E.X = gaussian_matrix(gen, 30, 3);
  E.Y = gaussian_matrix(gen, 30, 2);
  E.Xhat = E.X;
  J = compute_stats(E);
  EXPECT_EQ(J.S_xx, J.S_xhatxhat);
  EXPECT_EQ(J.S_xy, J.S_xhaty);

  E.X = Eigen::MatrixXd(Eigen::Vector2d(0, 2));
  E.Y = E.X;
  E.Xhat = E.X;
  J = compute_stats(E);
  EXPECT_DOUBLE_EQ(J.S_xx(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(J.S_yy(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(J.S_xy(0, 0), 1.0);
  EXPECT_TRUE(E.rank_warning());
}

TEST(ComputeStats, Errors) {
  EmbeddingSet E;
  E.X = Eigen::MatrixXd::Zero(4, 2);
  E.Y = Eigen::MatrixXd::Zero(3, 1);
  E.Xhat = Eigen::MatrixXd::Zero(4, 2);
  EXPECT_THROW(compute_stats(E), std::invalid_argument);
  E.Y = Eigen::MatrixXd::Zero(4, 1);
  E.Xhat = Eigen::MatrixXd::Zero(4, 3);
  EXPECT_THROW(compute_stats(E), std::invalid_argument);
  E.Xhat = Eigen::MatrixXd::Zero(4, 2);
  E.X(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(compute_stats(E), std::invalid_argument);
  E.X(1, 1) = 0.0;
  E.P = 3;
  EXPECT_THROW(compute_stats(E), std::invalid_argument);
  E.P = 2;
  EXPECT_NO_THROW(compute_stats(E));
}

TEST(ConditionalStats, Examples) {
  JointGaussianStats J = scalar_stats(0.0, 1.0, 2.0, 3.0);
  ConditionalStats C = conditional_stats(J);
  EXPECT_EQ(C.S_xx_given_y, J.S_xx);
  EXPECT_EQ(C.S_xhatxhat_given_y, J.S_xhatxhat);
  EXPECT_DOUBLE_EQ(C.mean_gap_term, 4.0);

  J.S_xx(0, 0) = 2.0;
  J.S_xy(0, 0) = 1.0;
  C = conditional_stats(J);
  EXPECT_NEAR(C.S_xx_given_y(0, 0), 1.0, 1e-15);

  std::mt19937_64 gen(8);
  EmbeddingSet E;
  E.X = gaussian_matrix(gen, 50, 3);
  E.Y = E.X;
  E.Xhat = gaussian_matrix(gen, 50, 3);
  C = conditional_stats(compute_stats(E));
  EXPECT_LE(C.S_xx_given_y.cwiseAbs().maxCoeff(), 1e-12);

  J = scalar_stats(0, 1, 0, 1);
  J.S_xx = Eigen::Matrix2d{{1.0, 0.5}, {0.4, 1.0}};
  J.mu_x = J.mu_xhat = Eigen::Vector2d::Zero();
  J.S_xhatxhat = Eigen::Matrix2d::Identity();
  J.S_xy = J.S_xhaty = Eigen::MatrixXd::Zero(2, 1);
  EXPECT_THROW(conditional_stats(J), std::invalid_argument);
}

TEST(SqrtmPsd, Examples) {
  EXPECT_EQ(sqrtm_psd(Eigen::MatrixXd::Identity(3, 3)), Eigen::MatrixXd::Identity(3, 3));
  const Eigen::MatrixXd r = sqrtm_psd(Eigen::Vector2d(4, 9).asDiagonal().toDenseMatrix());
  EXPECT_NEAR((r - Eigen::Matrix2d(Eigen::Vector2d(2, 3).asDiagonal())).norm(), 0.0, 1e-14);

  std::mt19937_64 gen(11);
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd B = gaussian_matrix(gen, 8, 8);
    const Eigen::MatrixXd M = B * B.transpose();
    const Eigen::MatrixXd R = sqrtm_psd(M);
    EXPECT_LE((R * R - M).norm(), 1e-8 * (1.0 + M.norm()));
    EXPECT_LE((R - R.transpose()).norm(), 0.0);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(R).eigenvalues().minCoeff(), -1e-12);
    EXPECT_LE((R - oracle::sqrtm(M)).norm(), 1e-8 * (1.0 + R.norm()));
  }
}

TEST(SqrtmPsd, NegativityTolerance) {
  Eigen::Matrix2d M = Eigen::Vector2d(1.0, -1e-10).asDiagonal();
  const Eigen::MatrixXd R = sqrtm_psd(M);
  EXPECT_EQ(R(1, 1), 0.0);
  M(1, 1) = -1e-6;
  EXPECT_THROW(sqrtm_psd(M), std::domain_error);
  EXPECT_THROW(sqrtm_psd(Eigen::Matrix2d{{1.0, 0.5}, {0.0, 1.0}}), std::invalid_argument);
}

TEST(PinvPsd, MatchesOracleAndCutsOff) {
  std::mt19937_64 gen(13);
  const Eigen::MatrixXd B = gaussian_matrix(gen, 5, 3);
  const Eigen::MatrixXd M = B * B.transpose();  // rank 3
  const Eigen::MatrixXd ref =
      M.completeOrthogonalDecomposition().pseudoInverse();
  EXPECT_LE((pinv_psd(M) - ref).norm(), 1e-8 * ref.norm());
  EXPECT_LE((M * pinv_psd(M) * M - M).norm(), 1e-10 * M.norm());

  const Eigen::Matrix2d tiny = Eigen::Vector2d(1.0, 1e-12).asDiagonal();
  EXPECT_EQ(pinv_psd(tiny)(1, 1), 0.0);
  EXPECT_EQ(pinv_psd(tiny)(0, 0), 1.0);
}

TEST(Cfid, IdenticalIsZero) {
  std::mt19937_64 gen(17);
  const LinearGaussianModel model = random_model(gen, 3, 2);
  EmbeddingSet E = sample_model(model, 200, 1, gen);
  E.Xhat = E.X;
  EXPECT_LE(std::abs(cfid(E)), 1e-8);
  EXPECT_GE(cfid(E), 0.0);
  EXPECT_LE(fid(E.X, E.X), 1e-8);
  EXPECT_GE(fid(E.X, E.X), 0.0);
}

TEST(Cfid, ScalarAnalyticExamples) {
  const CfidParts shift = cfid_decompose(scalar_stats(0, 1, 1, 1));
  EXPECT_NEAR(shift.mean_part, 1.0, 1e-10);
  EXPECT_NEAR(shift.cov_part, 0.0, 1e-10);
  EXPECT_NEAR(cfid(scalar_stats(0, 1, 0, 2)), 1.0, 1e-10);
  const CfidParts both = cfid_decompose(scalar_stats(0, 1, 1, 2));
  EXPECT_NEAR(both.mean_part, 1.0, 1e-10);
  EXPECT_NEAR(both.cov_part, 1.0, 1e-10);
  EXPECT_NEAR(cfid(scalar_stats(0, 1, 1, 2)), 2.0, 1e-10);
}

TEST(Fid, AnalyticExamples) {
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(1);
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  EXPECT_NEAR(fid(z, one, Eigen::VectorXd::Constant(1, 3.0), one), 9.0, 1e-12);
  EXPECT_NEAR(fid(z, one, z, 9.0 * one), 4.0, 1e-12);
  EXPECT_THROW(fid(Eigen::MatrixXd::Zero(3, 2), Eigen::MatrixXd::Zero(3, 1)),
               std::invalid_argument);
  std::mt19937_64 gen(19);
  for (int t = 0; t < 5; ++t) {
    const Eigen::VectorXd m1 = gaussian_matrix(gen, 4, 1), m2 = gaussian_matrix(gen, 4, 1);
    const Eigen::MatrixXd S1 = random_spd(gen, 4), S2 = random_spd(gen, 4);
    EXPECT_NEAR(fid(m1, S1, m2, S2), oracle::gaussian_w2_sq(m1, S1, m2, S2), 1e-9);
  }
}

TEST(Cfid, AnalyticEquivalenceWithInjectedStats) {
  std::mt19937_64 gen(23);
  for (int t = 0; t < 20; ++t) {
    const LinearGaussianModel model = random_model(gen, 1 + t % 4, 1 + t % 3);
    const double expected = model.expected_w2();
    EXPECT_NEAR(cfid(model.stats()), expected, 1e-10 * std::max(1.0, expected)) << t;
  }
}

TEST(Cfid, AdditivityAndNonnegativity) {
  std::mt19937_64 gen(29);
  for (int t = 0; t < 20; ++t) {
    const LinearGaussianModel model = random_model(gen, 2 + t % 3, 1 + t % 2);
    const EmbeddingSet E = sample_model(model, 40 + 10 * t, 1 + t % 3, gen);
    const CfidParts parts = cfid_decompose(E);
    EXPECT_GE(parts.mean_part, 0.0);
    EXPECT_GE(parts.cov_part, 0.0);
    EXPECT_NEAR(parts.total(), cfid(E), 1e-10);
    EXPECT_GE(fid(E.X, E.Xhat), 0.0);
  }
}

TEST(Cfid, DecompositionConstructions) {
  std::mt19937_64 gen(31);
  LinearGaussianModel model = random_model(gen, 2, 2);
  model.B = model.A;
  model.S2 = model.S1;
  EXPECT_NEAR(cfid_decompose(model.stats()).cov_part, 0.0, 1e-10);
  EXPECT_NEAR(cfid_decompose(model.stats()).mean_part, model.b.squaredNorm(), 1e-10);

  model.b.setZero();
  model.S2 = 4.0 * model.S1;
  const CfidParts p = cfid_decompose(model.stats());
  EXPECT_NEAR(p.mean_part, 0.0, 1e-10);
  EXPECT_NEAR(p.cov_part, model.S1.trace(), 1e-9);
}

TEST(Cfid, ShuffleInvariance) {
  std::mt19937_64 gen(37);
  const LinearGaussianModel model = random_model(gen, 3, 2);
  const EmbeddingSet E = sample_model(model, 100, 2, gen);
  std::vector<Eigen::Index> perm(E.X.rows());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  EmbeddingSet S = E;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    S.X.row(i) = E.X.row(perm[i]);
    S.Y.row(i) = E.Y.row(perm[i]);
    S.Xhat.row(i) = E.Xhat.row(perm[i]);
  }
  const CfidParts a = cfid_decompose(E), b = cfid_decompose(S);
  EXPECT_NEAR(a.mean_part, b.mean_part, 1e-12 * std::max(1.0, a.mean_part));
  EXPECT_NEAR(a.cov_part, b.cov_part, 1e-12 * std::max(1.0, a.cov_part));
  EXPECT_NEAR(fid(E.X, E.Xhat), fid(S.X, S.Xhat), 1e-12 * std::max(1.0, fid(E.X, E.Xhat)));
}

TEST(Cfid, SmallSampleBiasIsUpward) {
  std::mt19937_64 model_gen(41);
  LinearGaussianModel model = random_model(model_gen, 3, 2);
  model.B = model.A;
  model.S2 = model.S1;
  model.b.setZero();
  double small = 0.0, large = 0.0;
  for (int seed = 0; seed < 10; ++seed) {
    std::mt19937_64 gen(1000 + seed);
    small += cfid_decompose(sample_model(model, 100, 1, gen)).cov_part;
    large += cfid_decompose(sample_model(model, 100000, 1, gen)).cov_part;
  }
  EXPECT_GT(small / 10, large / 10);
}

TEST(EmbeddingIo, Emb1RoundTripAndLayout) {
  std::mt19937_64 gen(43);
  const Eigen::MatrixXd M = gaussian_matrix(gen, 5, 3);
  std::stringstream buf;
  write_emb1(buf, M);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.size(), 16u + 8u * 15u);
  EXPECT_EQ(bytes.substr(0, 4), "EMB1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 5);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3);
  EXPECT_EQ(bytes[12], 1);
  EXPECT_EQ(bytes.substr(13, 3), std::string(3, '\0'));
  double first = 0.0;
  std::memcpy(&first, bytes.data() + 16, 8);
  EXPECT_EQ(first, M(0, 0));
  double second = 0.0;
  std::memcpy(&second, bytes.data() + 24, 8);
  EXPECT_EQ(second, M(0, 1));
  EXPECT_EQ(read_emb1(buf), M);
}

TEST(EmbeddingIo, Emb1Errors) {
  const Eigen::MatrixXd M = Eigen::MatrixXd::Ones(2, 2);
  std::stringstream good;
  write_emb1(good, M);
  const std::string bytes = good.str();
  auto read = [](std::string s) {
    std::istringstream in(s);
    return read_emb1(in);
  };
  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(read(bad), std::runtime_error);
  bad = bytes;
  bad[12] = 2;
  EXPECT_THROW(read(bad), std::runtime_error);
  bad = bytes;
  bad[14] = 1;
  EXPECT_THROW(read(bad), std::runtime_error);
  EXPECT_THROW(read(bytes.substr(0, bytes.size() - 1)), std::runtime_error);
  EXPECT_THROW(read(bytes + "x"), std::runtime_error);
}

TEST(EmbeddingIo, CsvRoundTripAndFiles) {
  std::mt19937_64 gen(47);
  const Eigen::MatrixXd M = gaussian_matrix(gen, 4, 2);
  std::stringstream buf;
  write_embedding_csv(buf, M);
  EXPECT_EQ(buf.str().rfind("col0,col1\n", 0), 0u);
  EXPECT_EQ(read_embedding_csv(buf), M);

  std::istringstream bad_header("a,b\n1,2\n");
  EXPECT_THROW(read_embedding_csv(bad_header), std::runtime_error);
  std::istringstream bad_cell("col0,col1\n1,zz\n");
  EXPECT_THROW(read_embedding_csv(bad_cell), std::runtime_error);
  std::istringstream ragged("col0,col1\n1\n");
  EXPECT_THROW(read_embedding_csv(ragged), std::runtime_error);

  const auto dir = std::filesystem::temp_directory_path() / "rcgan_cfid_io";
  std::filesystem::create_directories(dir);
  const std::string bin = (dir / "m.emb").string(), csv = (dir / "m.csv").string();
  write_embedding_file(bin, M);
  {
    std::ofstream out(csv);
    write_embedding_csv(out, M);
  }
  EXPECT_EQ(read_embedding_file(bin), M);
  EXPECT_EQ(read_embedding_file(csv), M);
  EXPECT_THROW(read_embedding_file((dir / "missing.emb").string()), std::runtime_error);
  std::filesystem::remove_all(dir);
}
