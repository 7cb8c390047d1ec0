#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rcgan/autotune.hpp"

using namespace rcgan;

namespace {

const SeededStream kStream{2024, {4, 0, 0}};

ValidationSet single_point(double x) {
  ValidationSet v;
  v.items.push_back({Eigen::VectorXd::Constant(1, x), 0});
  return v;
}

}  // namespace

TEST(TargetRatio, Examples) {
  EXPECT_NEAR(target_ratio_db(8), 2.4988, 5e-5);
  EXPECT_DOUBLE_EQ(target_ratio_db(8), 10.0 * std::log10(16.0 / 9.0));
  EXPECT_EQ(target_ratio_db(1), 0.0);
  EXPECT_LT(target_ratio_db(1 << 20), 10.0 * std::log10(2.0));
  EXPECT_NEAR(target_ratio_db(1 << 20), 10.0 * std::log10(2.0), 1e-5);
  EXPECT_THROW(target_ratio_db(0), std::invalid_argument);
}

TEST(PsnrCurve, ValuesAndShape) {
  const auto curve = psnr_gain_curve(32);
  ASSERT_EQ(curve.size(), 32u);
  EXPECT_EQ(curve.front().first, 1u);
  EXPECT_EQ(curve.front().second, 0.0);
  EXPECT_NEAR(curve.back().second, 2.8767, 5e-5);
  EXPECT_DOUBLE_EQ(curve.back().second, 10.0 * std::log10(64.0 / 33.0));
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_GT(curve[i].second, curve[i - 1].second);
    EXPECT_LT(curve[i].second, 10.0 * std::log10(2.0));
  }
  EXPECT_THROW(psnr_gain_curve(0), std::invalid_argument);
}

TEST(UpdateBeta, Examples) {
  AutotuneState s = AutotuneState::initial(2, 8, 0.1);
  EXPECT_NEAR(s.beta_sd, 0.325735, 1e-6);

  const double at_target = std::pow(10.0, target_ratio_db(8) / 10.0);
  const AutotuneState same = update_beta(s, at_target, 1.0);
  EXPECT_NEAR(same.beta_sd, s.beta_sd, 1e-15);
  EXPECT_EQ(same.epoch, 1u);

  const double r35 = std::pow(10.0, 0.35);
  const AutotuneState down = update_beta(s, r35, 1.0);
  EXPECT_NEAR(down.beta_sd, 0.29312, 5e-5);
  const double expected = s.beta_sd - 0.1 * (3.5 - target_ratio_db(8)) * beta_sd_nominal(2);
  EXPECT_NEAR(down.beta_sd, expected, 1e-14);
  // Scale invariance of the ratio.
  EXPECT_NEAR(update_beta(s, 3.0 * r35, 3.0).beta_sd, down.beta_sd, 1e-14);

  EXPECT_GT(update_beta(s, 1.2, 1.0).beta_sd, s.beta_sd);

  EXPECT_THROW(update_beta(s, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(update_beta(s, 1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(AutotuneState::initial(2, 1), std::invalid_argument);
}

TEST(UpdateBeta, NoClampingBelowZero) {
  AutotuneState s = AutotuneState::initial(2, 8, 0.5);
  for (int i = 0; i < 20; ++i) s = update_beta(s, 100.0, 1.0);
  EXPECT_LT(s.beta_sd, 0.0);
}

TEST(UpdateBeta, StationaryOnlyAtTarget) {
  const AutotuneState s = AutotuneState::initial(3, 4, 0.2);
  for (double db = 0.0; db <= 3.0; db += 0.05) {
    const double r = std::pow(10.0, db / 10.0);
    const double moved = update_beta(s, r, 1.0).beta_sd - s.beta_sd;
    if (std::abs(db - target_ratio_db(4)) < 1e-12) {
      EXPECT_NEAR(moved, 0.0, 1e-15);
    } else {
      EXPECT_NE(moved, 0.0);
      EXPECT_EQ(moved > 0, db < target_ratio_db(4));
    }
  }
}

TEST(EHat, PerfectRecoveryIsZero) {
  const ConditionalGenerator gen{{GeneratorParams::scalar(1.5, 0.0)}};
  EXPECT_EQ(e_hat(gen, single_point(1.5), 4, kStream).value, 0.0);
  EXPECT_EQ(e_hat(gen, single_point(1.5), 1, kStream).std_error, 0.0);
}

TEST(EHat, TruePosteriorAtPOneIsTwiceMmse) {
  const ToyPosterior post = ToyPosterior::scalar(-2.0, 1.5);
  const ValidationSet val = ValidationSet::draw(post, 100000, kStream.with_replicate(0));
  const LossEstimate e = e_hat(ConditionalGenerator::true_posterior(post), val, 1,
                               kStream.with_replicate(1));
  EXPECT_EQ(e.n_outer, 100000u);
  EXPECT_NEAR(e.value, 2.0 * 2.25, 4.0 * e.std_error);
}

TEST(EHat, CollapsedGeneratorIsMmse) {
  const ToyPosterior post = ToyPosterior::scalar(0.5, 2.0);
  const ValidationSet val = ValidationSet::draw(post, 100000, kStream.with_replicate(0));
  const double oracle = closed_form_l2p(GeneratorParams::scalar(0.5, 0.0), post, 0, 1);
  for (std::size_t P : {1u, 7u}) {
    const LossEstimate e = e_hat(ConditionalGenerator::collapsed_at_mean(post), val, P,
                                 kStream.with_replicate(1));
    EXPECT_NEAR(e.value, oracle, 4.0 * e.std_error) << P;
  }
}

TEST(EHat, MultiContextAndErrors) {
  ToyPosterior post({PosteriorContext{Eigen::VectorXd::Constant(2, 1.0), Eigen::VectorXd::Ones(2)},
                     PosteriorContext{Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Ones(2)}});
  const ValidationSet val = ValidationSet::draw(post, 6, kStream);
  for (std::size_t v = 0; v < 6; ++v) EXPECT_EQ(val.items[v].context, v % 2);
  EXPECT_THROW(e_hat(ConditionalGenerator::true_posterior(post), ValidationSet{}, 2, kStream),
               std::invalid_argument);
  EXPECT_THROW(e_hat(ConditionalGenerator::true_posterior(post), val, 0, kStream),
               std::invalid_argument);
  const ConditionalGenerator wrong{{GeneratorParams::scalar(0, 1)}};
  EXPECT_THROW(e_hat(wrong, val, 2, kStream), std::exception);
  EXPECT_THROW(ValidationSet::draw(post, 0, kStream), std::invalid_argument);
}

TEST(EHat, ThreadInvariant) {
  const ToyPosterior post = ToyPosterior::scalar(0.0, 1.0);
  const ValidationSet val = ValidationSet::draw(post, 5000, kStream);
  const auto gen = ConditionalGenerator::true_posterior(post);
  const RatioEstimate a = e_ratio(gen, val, 4, kStream.with_replicate(9), {1});
  const RatioEstimate b = e_ratio(gen, val, 4, kStream.with_replicate(9), {4});
  EXPECT_EQ(a.e1, b.e1);
  EXPECT_EQ(a.ep, b.ep);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(RatioLaw, TruePosteriorMatchesTwoPOverPPlusOne) {
  const ToyPosterior post = ToyPosterior::scalar(3.0, 0.7);
  for (std::size_t P : {2u, 4u, 8u, 32u}) {
    const ValidationSet val = ValidationSet::draw(post, 100000, kStream.with_replicate(2 * P));
    const RatioEstimate r = e_ratio(ConditionalGenerator::true_posterior(post), val, P,
                                    kStream.with_replicate(2 * P + 1));
    const double target = 2.0 * P / (P + 1.0);
    EXPECT_LE(std::abs(r.ratio - target), 4.0 * r.std_error) << "P=" << P;
    EXPECT_GT(r.std_error, 0.0);
  }
}

TEST(ClosedFormRatio, MatchesTargetAtTruth) {
  const Eigen::VectorXd s0 = Eigen::Vector2d(1.0, 3.0);
  for (std::size_t P : {2u, 8u, 32u}) {
    EXPECT_NEAR(to_db(closed_form_ratio(s0, s0, P)), target_ratio_db(P), 1e-12);
  }
  EXPECT_EQ(closed_form_ratio(s0, Eigen::Vector2d::Zero(), 8), 1.0);
}

TEST(Simulate, LinearPlantConvergesToFixedPoint) {
  const ToyPosterior post = ToyPosterior::scalar(0.0, 2.0);
  for (double c : {1.0, 2.0, 0.9}) {
    AutotuneSettings s;
    s.mu_sd = 0.2;
    s.tolerance_db = 1e-9;
    s.epochs = 2000;
    const AutotuneResult r = simulate_autotune(linear_plant(post, 0, 2, c), post, 0, s, kStream);
    ASSERT_TRUE(r.converged) << c;
    // Closed-form ratio equals the target only at sigma = sigma0, i.e. beta = c * beta_N.
    EXPECT_NEAR(r.final_beta, c * beta_sd_nominal(2), 1e-8) << c;
  }
}

TEST(Simulate, NominalPlantConvergesImmediately) {
  const ToyPosterior post = ToyPosterior::scalar(1.0, 1.0);
  AutotuneSettings s;
  s.mu_sd = 0.2;
  const AutotuneResult r = simulate_autotune(linear_plant(post, 0, 2), post, 0, s, kStream);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.converged_epoch, 0u);
  EXPECT_NEAR(r.final_beta, beta_sd_nominal(2), 1e-15);
}

TEST(Simulate, CollapsedPlantNeverConverges) {
  const ToyPosterior post = ToyPosterior::scalar(0.0, 1.0);
  AutotuneSettings s;
  const Plant zero = [](double) { return Eigen::VectorXd::Zero(1).eval(); };
  const AutotuneResult r = simulate_autotune(zero, post, 0, s, kStream);
  EXPECT_FALSE(r.converged);
  ASSERT_EQ(r.trace.size(), 200u);
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    EXPECT_EQ(r.trace[i].ratio_db, 0.0);
    if (i > 0) EXPECT_GT(r.trace[i].beta_sd, r.trace[i - 1].beta_sd);
  }
}

TEST(Simulate, ZeroStepKeepsBeta) {
  const ToyPosterior post = ToyPosterior::scalar(0.0, 1.0);
  AutotuneSettings s;
  s.mu_sd = 0.0;
  s.epochs = 25;
  const AutotuneResult r = simulate_autotune(linear_plant(post, 0, 2, 2.0), post, 0, s, kStream);
  EXPECT_FALSE(r.converged);
  for (const auto& row : r.trace) EXPECT_EQ(row.beta_sd, beta_sd_nominal(2));
}

TEST(Simulate, NonMonotonePlantRejected) {
  const ToyPosterior post = ToyPosterior::scalar(0.0, 1.0);
  const double bn = beta_sd_nominal(2);
  const Plant bump = [bn](double b) {
    return Eigen::VectorXd::Constant(1, std::exp(-std::pow(b / bn - 1.0, 2)));
  };
  EXPECT_THROW(simulate_autotune(bump, post, 0, {}, kStream), std::invalid_argument);
}

TEST(Simulate, LinearPlantGrid) {
  // Stable region of the loop: gain c must exceed about 1.69 mu_sd.
  const ToyPosterior post = ToyPosterior::scalar(0.0, 1.0);
  for (double c : {0.9, 1.0, 1.2, 1.5, 1.8, 3.0, 5.0}) {
    for (double mu : {0.05, 0.1, 0.2, 0.35, 0.5}) {
      AutotuneSettings s;
      s.mu_sd = mu;
      const AutotuneResult r = simulate_autotune(linear_plant(post, 0, 2, c), post, 0, s, kStream);
      EXPECT_TRUE(r.converged) << "c=" << c << " mu=" << mu;
      EXPECT_LE(std::abs(r.trace.back().ratio_db - r.trace.back().target_db), 0.1);
    }
  }
}

TEST(Simulate, LowGainPlantOscillatesAtLargeStep) {
  const ToyPosterior post = ToyPosterior::scalar(0.0, 1.0);
  AutotuneSettings s;
  s.mu_sd = 0.5;
  const AutotuneResult r = simulate_autotune(linear_plant(post, 0, 2, 0.5), post, 0, s, kStream);
  EXPECT_FALSE(r.converged);
}

TEST(Simulate, MonteCarloObservation) {
  const ToyPosterior post = ToyPosterior::scalar(0.0, 1.0);
  AutotuneSettings s;
  s.mu_sd = 0.2;
  s.V = 20000;
  s.epochs = 60;
  s.observation = RatioObservation::monte_carlo;
  const AutotuneResult fresh =
      simulate_autotune(linear_plant(post, 0, 2, 1.5), post, 0, s, kStream);
  EXPECT_TRUE(fresh.converged);
  s.frozen_codes = true;
  const AutotuneResult frozen =
      simulate_autotune(linear_plant(post, 0, 2, 1.5), post, 0, s, kStream);
  EXPECT_TRUE(frozen.converged);
  EXPECT_NEAR(frozen.final_beta, 1.5 * beta_sd_nominal(2), 0.3 * beta_sd_nominal(2));
  const AutotuneResult again =
      simulate_autotune(linear_plant(post, 0, 2, 1.5), post, 0, s, kStream, {3});
  ASSERT_EQ(again.trace.size(), frozen.trace.size());
  EXPECT_EQ(again.final_beta, frozen.final_beta);
}

TEST(Simulate, CsvHeader) {
  const ToyPosterior post = ToyPosterior::scalar(0.0, 1.0);
  AutotuneSettings s;
  s.epochs = 3;
  s.mu_sd = 0.0;
  const AutotuneResult r = simulate_autotune(linear_plant(post, 0, 2, 2.0), post, 0, s, kStream);
  std::ostringstream out;
  write_autotune_csv(out, r);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("epoch,beta_sd,ratio_db,target_db\n0,", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(Apsd, Examples) {
  EXPECT_DOUBLE_EQ(apsd(Eigen::MatrixXd(Eigen::Vector2d(0.0, 2.0)), 2), 1.0);
  EXPECT_EQ(apsd(Eigen::MatrixXd::Constant(5, 3, 4.2), 5), 0.0);
  EXPECT_THROW(apsd(Eigen::MatrixXd::Zero(3, 1), 1), std::invalid_argument);
  EXPECT_THROW(apsd(Eigen::MatrixXd::Zero(3, 1), 4), std::invalid_argument);
}

TEST(Apsd, MatchesSpreadOfGenerator) {
  const std::size_t P = 64;
  double acc = 0.0;
  const int reps = 400;
  for (int r = 0; r < reps; ++r) {
    const SampleBatch b =
        sample_generator(GeneratorParams::scalar(0.0, 1.0), P, kStream.with_replicate(r));
    const double a = apsd(b, P);
    EXPECT_GE(a, 0.0);
    acc += a * a;
  }
  EXPECT_NEAR(acc / reps, (P - 1.0) / P, 0.02);
}

TEST(Apsd, PositiveUnlessRowsIdentical) {
  Eigen::MatrixXd rows = Eigen::MatrixXd::Constant(4, 3, 1.0);
  EXPECT_EQ(apsd(rows, 4), 0.0);
  rows(2, 1) += 1e-6;
  EXPECT_GT(apsd(rows, 4), 0.0);
}
