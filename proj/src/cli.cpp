#include "rcgan/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "rcgan/autotune.hpp"
#include "rcgan/cfid.hpp"
#include "rcgan/detect.hpp"
#include "rcgan/embedding_io.hpp"
#include "rcgan/format.hpp"
#include "rcgan/linops.hpp"
#include "rcgan/mask_io.hpp"
#include "rcgan/prop_lab.hpp"

namespace rcgan::cli {
namespace {

using json = nlohmann::ordered_json;

// Stream experiment ids, one per stochastic subcommand.
enum Experiment : std::uint64_t {
  kRecovery = 1,
  kCollapse = 2,
  kRatioLaw = 3,
  kAutotune = 4,
  kDetect = 5,
  kLosses = 6,
};

struct VerificationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string out;
  bool force = false;
  bool timing = false;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  bool has_seed = false;

  Exec exec() const { return {threads}; }
};

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(s.data(), last, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::string beta_check(const std::string& s) {
  if (s == "nominal" || parse_number(s)) return {};
  return "must be 'nominal' or a number";
}

double resolve_beta(const std::string& s, std::size_t P) {
  return s == "nominal" ? beta_sd_nominal(P) : *parse_number(s);
}

void add_common(CLI::App* sub, Common& c, bool stochastic) {
  sub->add_option("--out", c.out, "Output artifact path")->required();
  sub->add_flag("--force", c.force, "Overwrite an existing output file");
  sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  sub->add_flag("--timing", c.timing, "Record wall_time_ms in JSON output");
  if (stochastic) {
    sub->add_option("--seed", c.seed, "64-bit seed")->required();
  }
}

void write_artifact(const Common& c, const std::string& content) {
  namespace fs = std::filesystem;
  if (fs::exists(c.out) && !c.force) {
    throw std::runtime_error("output '" + c.out +
                             "' exists; pass --force to overwrite");
  }
  std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + c.out + "'");
  f << content;
  if (!f) throw std::runtime_error("write to '" + c.out + "' failed");
}

class Runner {
 public:
  Runner(std::vector<std::string> args, std::ostream& out)
      : args_(std::move(args)), out_(out), start_(std::chrono::steady_clock::now()) {}

  json header(const Common& c, const std::string& subcommand) const {
    json j;
    j["version"] = kVersion;
    j["argv"] = args_;
    j["seed"] = c.has_seed ? json(c.seed) : json(nullptr);
    if (c.timing) {
      const auto elapsed = std::chrono::steady_clock::now() - start_;
      j["wall_time_ms"] =
          std::chrono::duration<double, std::milli>(elapsed).count();
    } else {
      j["wall_time_ms"] = nullptr;
    }
    j["subcommand"] = subcommand;
    return j;
  }

  void emit_json(const Common& c, const json& j) const {
    write_artifact(c, j.dump(2) + "\n");
    out_ << "wrote " << c.out << '\n';
  }

  void emit_text(const Common& c, const std::string& text) const {
    write_artifact(c, text);
    out_ << "wrote " << c.out << '\n';
  }

  std::ostream& out() const { return out_; }

 private:
  std::vector<std::string> args_;
  std::ostream& out_;
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------- contours

struct ContoursArgs {
  Common common;
  std::string kind = "l1sd";
  std::size_t P = 2;
  std::string beta = "nominal";
  double mu0 = 0.0, sigma0 = 1.0;
  std::optional<double> mu_lo, mu_hi, sigma_lo, sigma_hi;
  std::size_t resolution = 201;
};

int run_contours(const ContoursArgs& a, const Runner& r) {
  RegularizerKind kind{regularizer_type_from_string(a.kind), a.P, 0.0};
  if (kind.type == RegularizerType::l1_sd) kind.beta_sd = resolve_beta(a.beta, a.P);
  const ToyPosterior post = ToyPosterior::scalar(a.mu0, a.sigma0);
  const AxisRange mu{a.mu_lo.value_or(a.mu0 - 3.0 * a.sigma0),
                     a.mu_hi.value_or(a.mu0 + 3.0 * a.sigma0)};
  const AxisRange sigma{a.sigma_lo.value_or(0.0),
                        a.sigma_hi.value_or(3.0 * a.sigma0)};
  const ContourGrid grid = contour_grid(kind, post, 0, mu, sigma, a.resolution);
  std::ostringstream csv;
  write_contour_csv(csv, grid);
  r.emit_text(a.common, csv.str());
  r.out() << "argmin mu=" << format_double(grid.argmin_mu())
          << " sigma=" << format_double(grid.argmin_sigma()) << '\n';
  return 0;
}

// ------------------------------------------------------ verify-prop1 / 2

struct RecoveryArgs {
  Common common;
  std::size_t trials = 10;
  std::size_t dim = 3;
  std::vector<std::size_t> P_list{2, 3, 8};
  double tolerance = 1e-3;
  double collapse_ratio = 1e-4;
};

int run_recovery(const RecoveryArgs& a, const Runner& r, RegularizerType type) {
  if (a.trials == 0 || a.dim == 0 || a.P_list.empty()) {
    throw std::invalid_argument("trials, dim and --p must be nonempty");
  }
  const bool collapse = type == RegularizerType::l2;
  const SeededStream base{a.common.seed, {collapse ? kCollapse : kRecovery, 0, 0}};
  json rows = json::array();
  double worst_mu = 0.0, worst_sigma = 0.0;
  bool pass = true;
  for (std::size_t t = 0; t < a.trials; ++t) {
    const PosteriorContext ctx =
        random_context(base.with_context(t), static_cast<Eigen::Index>(a.dim));
    const ToyPosterior post({ctx});
    const GeneratorParams init(Eigen::VectorXd::Zero(a.dim),
                               Eigen::VectorXd::Ones(a.dim));
    for (std::size_t P : a.P_list) {
      RegularizerKind kind{type, P, collapse ? 0.0 : beta_sd_nominal(P)};
      const OptimizationReport rep = minimize_regularizer(kind, post, 0, init);
      const RecoveryError err = recovery_error(rep.theta_star, ctx);
      const double mu_err = err.mu;
      const double sigma_metric = collapse ? err.sigma_ratio : err.sigma;
      const bool ok = rep.converged && mu_err <= a.tolerance &&
                      sigma_metric <= (collapse ? a.collapse_ratio : a.tolerance);
      pass = pass && ok;
      worst_mu = std::max(worst_mu, mu_err);
      worst_sigma = std::max(worst_sigma, sigma_metric);
      rows.push_back({{"trial", t},
                      {"P", P},
                      {"mu_rel_error", mu_err},
                      {collapse ? "sigma_over_sigma0" : "sigma_rel_error", sigma_metric},
                      {"iterations", rep.iterations},
                      {"converged", rep.converged},
                      {"pass", ok}});
    }
  }
  const std::string name = collapse ? "verify-prop2" : "verify-prop1";
  json j = r.header(a.common, name);
  j["tolerance"] = a.tolerance;
  if (collapse) j["collapse_ratio"] = a.collapse_ratio;
  j["max_mu_rel_error"] = worst_mu;
  j[collapse ? "max_sigma_over_sigma0" : "max_sigma_rel_error"] = worst_sigma;
  j["pass"] = pass;
  j["runs"] = std::move(rows);
  r.emit_json(a.common, j);
  if (!pass) throw VerificationFailed(name + ": recovery check failed");
  return 0;
}

// ------------------------------------------------------------ verify-ratio_law

struct RatioLawArgs {
  Common common;
  std::vector<std::size_t> P_list{2, 4, 8, 32};
  std::size_t V = 100000;
  double mu0 = 0.0, sigma0 = 1.0;
  std::size_t dim = 1;
  double k_sigma = 4.0;
};

int run_ratio_law(const RatioLawArgs& a, const Runner& r) {
  if (a.P_list.empty()) throw std::invalid_argument("--p must be nonempty");
  const ToyPosterior post({{Eigen::VectorXd::Constant(a.dim, a.mu0),
                            Eigen::VectorXd::Constant(a.dim, a.sigma0)}});
  const ConditionalGenerator gen = ConditionalGenerator::true_posterior(post);
  const SeededStream base{a.common.seed, {kRatioLaw, 0, 0}};
  json rows = json::array();
  bool pass = true;
  for (std::size_t i = 0; i < a.P_list.size(); ++i) {
    const std::size_t P = a.P_list[i];
    const ValidationSet val = ValidationSet::draw(post, a.V, base.with_replicate(2 * i));
    const RatioEstimate est =
        e_ratio(gen, val, P, base.with_replicate(2 * i + 1), a.common.exec());
    const double target = 2.0 * P / (P + 1.0);
    const double z = (est.ratio - target) / est.std_error;
    const bool ok = std::abs(z) <= a.k_sigma;
    pass = pass && ok;
    rows.push_back({{"P", P},
                    {"e1", est.e1},
                    {"ep", est.ep},
                    {"ratio", est.ratio},
                    {"std_error", est.std_error},
                    {"target", target},
                    {"z", z},
                    {"pass", ok}});
  }
  json j = r.header(a.common, "verify-prop3");
  j["V"] = a.V;
  j["k_sigma"] = a.k_sigma;
  j["pass"] = pass;
  j["ratios"] = std::move(rows);
  r.emit_json(a.common, j);
  if (!pass) throw VerificationFailed("verify-prop3: ratio outside the confidence band");
  return 0;
}

// ------------------------------------------------------------ autotune-sim

struct AutotuneArgs {
  Common common;
  AutotuneSettings settings;
  std::string observation = "closed-form";
  double c = 1.0;
  double mu0 = 0.0, sigma0 = 1.0;
};

int run_autotune(AutotuneArgs a, const Runner& r) {
  a.settings.observation = a.observation == "monte-carlo"
                               ? RatioObservation::monte_carlo
                               : RatioObservation::closed_form;
  if (a.settings.observation == RatioObservation::monte_carlo && !a.common.has_seed) {
    throw std::invalid_argument("--observation monte-carlo requires --seed");
  }
  const ToyPosterior post = ToyPosterior::scalar(a.mu0, a.sigma0);
  const AutotuneResult res =
      simulate_autotune(linear_plant(post, 0, a.settings.p_train, a.c), post, 0,
                        a.settings, {a.common.seed, {kAutotune, 0, 0}},
                        a.common.exec());
  std::ostringstream csv;
  write_autotune_csv(csv, res);
  r.emit_text(a.common, csv.str());
  r.out() << (res.converged ? "converged at epoch " + std::to_string(res.converged_epoch)
                            : std::string("did not converge"))
          << ", beta_sd=" << format_double(res.final_beta) << '\n';
  return 0;
}

// -------------------------------------------------------------- psnr-curve

int run_psnr_curve(const Common& c, std::size_t P_max, const Runner& r) {
  std::ostringstream csv;
  csv << "P,gain_db\n";
  for (const auto& [P, gain] : psnr_gain_curve(P_max)) {
    csv << P << ',' << format_double(gain) << '\n';
  }
  r.emit_text(c, csv.str());
  return 0;
}

// -------------------------------------------------------------- cfid / fid

int run_cfid(const Common& c, const std::string& x, const std::string& y,
             const std::string& xhat, std::size_t P, const Runner& r) {
  EmbeddingSet E{read_embedding_file(x), read_embedding_file(y),
                 read_embedding_file(xhat), P};
  const CfidParts parts = cfid_decompose(E);
  json j = r.header(c, "cfid");
  j["rows"] = E.X.rows();
  j["P"] = P;
  j["cfid"] = parts.total();
  j["mean_part"] = parts.mean_part;
  j["cov_part"] = parts.cov_part;
  j["rank_warning"] = E.rank_warning();
  r.emit_json(c, j);
  return 0;
}

int run_fid(const Common& c, const std::string& x, const std::string& xhat,
            const Runner& r) {
  const Eigen::MatrixXd X = read_embedding_file(x);
  const Eigen::MatrixXd Xhat = read_embedding_file(xhat);
  json j = r.header(c, "fid");
  j["rows_x"] = X.rows();
  j["rows_xhat"] = Xhat.rows();
  j["fid"] = fid(X, Xhat);
  r.emit_json(c, j);
  return 0;
}

// ---------------------------------------------------------------------- dc

ComplexVector read_complex_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vector file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const bool complex = line == "re,im";
  if (!complex && line != "re") {
    throw std::runtime_error(path + ": header must be 're' or 're,im'");
  }
  std::vector<std::complex<double>> values;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::string re = line.substr(0, comma);
    const std::string im = comma == std::string::npos ? "" : line.substr(comma + 1);
    const auto vr = parse_number(re);
    const auto vi = complex ? parse_number(im) : std::optional<double>(0.0);
    if (!vr || !vi || (complex == (comma == std::string::npos))) {
      throw std::runtime_error(path + ": malformed line '" + line + "'");
    }
    values.emplace_back(*vr, *vi);
  }
  return Eigen::Map<const ComplexVector>(values.data(),
                                         static_cast<Eigen::Index>(values.size()));
}

struct DcArgs {
  Common common;
  std::string mask, x_raw, y, x_true;
  std::size_t coils = 1;
};

int run_dc(const DcArgs& a, const Runner& r) {
  if (a.y.empty() == a.x_true.empty()) {
    throw std::invalid_argument("dc: pass exactly one of --y or --x-true");
  }
  std::shared_ptr<const LinearOperator> op = read_mask_file(a.mask).make_operator();
  if (a.coils > 1) op = std::make_shared<BlockDiagonal>(op, a.coils);
  const ComplexVector x_raw = read_complex_csv(a.x_raw);
  const ComplexVector y =
      a.y.empty() ? op->apply(read_complex_csv(a.x_true)) : read_complex_csv(a.y);
  const ComplexVector x = data_consistency(*op, x_raw, y);
  std::ostringstream csv;
  csv << "re,im\n";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    csv << format_double(x[i].real()) << ',' << format_double(x[i].imag()) << '\n';
  }
  r.emit_text(a.common, csv.str());
  r.out() << "residual ||A x - y||_inf = "
          << format_double((op->apply(x) - y).cwiseAbs().maxCoeff()) << '\n';
  return 0;
}

// ------------------------------------------------------------------ detect

struct DetectArgs {
  Common common;
  double mu0 = 1.0, sigma0 = 1.0;
  std::size_t samples = 1000000;
  std::string classifier = "threshold";
  double threshold = 0.0;
  double center = 0.0, scale = 1.0;
};

int run_detect(const DetectArgs& a, const Runner& r) {
  const ToyPosterior post = ToyPosterior::scalar(a.mu0, a.sigma0);
  const SampleBatch batch =
      sample_posterior(post, 0, a.samples, {a.common.seed, {kDetect, 0, 0}});
  const Classifier c = a.classifier == "logistic"
                           ? logistic_classifier(0, a.center, a.scale)
                           : threshold_classifier(0, a.threshold);
  const DetectionEstimate est = detection_estimate(c, batch.values, a.common.exec());
  json j = r.header(a.common, "detect");
  j["classifier"] = c.descriptor;
  j["samples"] = a.samples;
  j["probability"] = est.probability;
  j["std_error"] = est.std_error;
  if (a.samples >= 2) {
    const PlugInGap gap = plug_in_gap(c, batch, a.common.exec());
    j["plug_in"] = gap.c_of_avg;
    j["gap"] = gap.gap();
  }
  if (a.classifier == "threshold") {
    j["gaussian_cdf_oracle"] =
        0.5 * std::erfc(-(a.mu0 - a.threshold) / (a.sigma0 * std::sqrt(2.0)));
  }
  r.emit_json(a.common, j);
  return 0;
}

// ------------------------------------------------------------------ losses

struct LossesArgs {
  Common common;
  double mu = 0.0, sigma = 1.0, mu0 = 0.0, sigma0 = 1.0;
  std::size_t P = 2;
  std::size_t n_outer = 100000;
  std::string beta = "nominal";
};

int run_losses(const LossesArgs& a, const Runner& r) {
  const ToyPosterior post = ToyPosterior::scalar(a.mu0, a.sigma0);
  const GeneratorParams theta = GeneratorParams::scalar(a.mu, a.sigma);
  const double beta = resolve_beta(a.beta, a.P);
  const SeededStream base{a.common.seed, {kLosses, 0, 0}};
  const Exec exec = a.common.exec();

  const LossEstimate l1 = mc_l1p(theta, post, 0, a.P, a.n_outer, base.with_replicate(0), exec);
  const LossEstimate sd = mc_lsdp(theta, a.P, a.n_outer, base.with_replicate(1), exec);
  const LossEstimate l2 = mc_l2p(theta, post, 0, a.P, a.n_outer, base.with_replicate(2), exec);
  const LossEstimate var = mc_lvarp(theta, a.P, a.n_outer, base.with_replicate(3), exec);

  auto entry = [](const LossEstimate& e, double closed) {
    return json{{"mc", e.value}, {"std_error", e.std_error}, {"closed_form", closed}};
  };
  json j = r.header(a.common, "losses");
  j["P"] = a.P;
  j["n_outer"] = a.n_outer;
  j["beta_sd"] = beta;
  j["l1"] = entry(l1, closed_form_j(theta, post, 0, a.P, 0.0));
  j["sd_reward"] = entry(sd, a.sigma);
  j["l2"] = entry(l2, closed_form_l2p(theta, post, 0, a.P));
  j["variance_reward"] = entry(var, a.sigma * a.sigma);
  j["l1_sd_objective"] = {{"mc", l1.value - beta * sd.value},
                          {"closed_form", closed_form_j(theta, post, 0, a.P, beta)}};
  j["l2_var_objective"] = {{"mc", l2.value - var.value / static_cast<double>(a.P)},
                           {"closed_form", closed_form_l2varp(theta, post, 0, a.P)}};
  r.emit_json(a.common, j);
  return 0;
}

void print_error(std::ostream& err, const std::string& kind, const std::string& msg) {
  json j;
  j["error"] = kind;
  j["message"] = msg;
  j["exit_code"] = 1;
  err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical lab for posterior-sampling GAN regularizers and metrics",
               "rcgan-lab"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Runner runner(args, out);
  std::function<int()> action;

  ContoursArgs contours;
  auto* sc = app.add_subcommand("contours", "Closed-form objective over a (mu, sigma) grid");
  add_common(sc, contours.common, false);
  sc->add_option("--kind", contours.kind, "l1sd | l2 | l2var")
      ->check(CLI::IsMember({"l1sd", "l2", "l2var"}))
      ->capture_default_str();
  sc->add_option("--p", contours.P, "Number of generated samples P")->capture_default_str();
  sc->add_option("--beta", contours.beta, "SD-reward weight: nominal or a number")
      ->check(beta_check)
      ->capture_default_str();
  sc->add_option("--mu0", contours.mu0)->capture_default_str();
  sc->add_option("--sigma0", contours.sigma0)->capture_default_str();
  sc->add_option("--mu-lo", contours.mu_lo, "Default mu0 - 3 sigma0");
  sc->add_option("--mu-hi", contours.mu_hi, "Default mu0 + 3 sigma0");
  sc->add_option("--sigma-lo", contours.sigma_lo, "Default 0");
  sc->add_option("--sigma-hi", contours.sigma_hi, "Default 3 sigma0");
  sc->add_option("--resolution", contours.resolution)->capture_default_str();
  sc->callback([&] { action = [&] { return run_contours(contours, runner); }; });

  RecoveryArgs recovery;
  auto* s1 = app.add_subcommand("verify-prop1",
                                "Check that l1 + nominal SD reward recovers the posterior");
  add_common(s1, recovery.common, true);
  s1->add_option("--trials", recovery.trials)->capture_default_str();
  s1->add_option("--dim", recovery.dim)->capture_default_str();
  s1->add_option("--p", recovery.P_list, "Comma-separated P values")->delimiter(',');
  s1->add_option("--tolerance", recovery.tolerance)->capture_default_str();
  s1->callback([&] {
    action = [&] { return run_recovery(recovery, runner, RegularizerType::l1_sd); };
  });

  RecoveryArgs collapse_args;
  auto* s2 = app.add_subcommand("verify-prop2", "Check that the l2 loss collapses sigma");
  add_common(s2, collapse_args.common, true);
  s2->add_option("--trials", collapse_args.trials)->capture_default_str();
  s2->add_option("--dim", collapse_args.dim)->capture_default_str();
  s2->add_option("--p", collapse_args.P_list, "Comma-separated P values")->delimiter(',');
  s2->add_option("--tolerance", collapse_args.tolerance)->capture_default_str();
  s2->add_option("--collapse-ratio", collapse_args.collapse_ratio)->capture_default_str();
  s2->callback([&] {
    action = [&] { return run_recovery(collapse_args, runner, RegularizerType::l2); };
  });

  RatioLawArgs ratio_law;
  auto* s3 = app.add_subcommand("verify-prop3",
                                "Check E1/EP = 2P/(P+1) for true-posterior samples");
  add_common(s3, ratio_law.common, true);
  s3->add_option("--p", ratio_law.P_list, "Comma-separated P values")->delimiter(',');
  s3->add_option("--V", ratio_law.V, "Validation items")->capture_default_str();
  s3->add_option("--mu0", ratio_law.mu0)->capture_default_str();
  s3->add_option("--sigma0", ratio_law.sigma0)->capture_default_str();
  s3->add_option("--dim", ratio_law.dim)->capture_default_str();
  s3->add_option("--k-sigma", ratio_law.k_sigma, "Allowed standard errors")
      ->capture_default_str();
  s3->callback([&] { action = [&] { return run_ratio_law(ratio_law, runner); }; });

  AutotuneArgs tune;
  Common& tc = tune.common;
  auto* sa = app.add_subcommand("autotune-sim", "Closed-loop beta_SD tuning on a linear plant");
  sa->add_option("--out", tc.out)->required();
  sa->add_flag("--force", tc.force);
  sa->add_option("--threads", tc.threads)->capture_default_str();
  sa->add_flag("--timing", tc.timing);
  sa->add_option("--seed", tc.seed, "Required for monte-carlo observation");
  sa->add_option("--c", tune.c, "Plant gain: sigma reaches sigma0 at c * beta_N")
      ->capture_default_str();
  sa->add_option("--mu-sd", tune.settings.mu_sd)->capture_default_str();
  sa->add_option("--p-train", tune.settings.p_train)->capture_default_str();
  sa->add_option("--p-val", tune.settings.p_val)->capture_default_str();
  sa->add_option("--epochs", tune.settings.epochs)->capture_default_str();
  sa->add_option("--V", tune.settings.V)->capture_default_str();
  sa->add_option("--tolerance-db", tune.settings.tolerance_db)->capture_default_str();
  sa->add_option("--observation", tune.observation)
      ->check(CLI::IsMember({"closed-form", "monte-carlo"}))
      ->capture_default_str();
  sa->add_flag("--frozen-codes", tune.settings.frozen_codes,
              "Reuse the same validation items and codes every epoch");
  sa->add_option("--mu0", tune.mu0)->capture_default_str();
  sa->add_option("--sigma0", tune.sigma0)->capture_default_str();
  sa->callback([&] {
    tc.has_seed = sa->count("--seed") > 0;
    action = [&] { return run_autotune(tune, runner); };
  });

  Common psnr;
  std::size_t p_max = 32;
  auto* sp = app.add_subcommand("psnr-curve", "Theoretical P-sample gain in dB");
  add_common(sp, psnr, false);
  sp->add_option("--pmax", p_max)->capture_default_str();
  sp->callback([&] { action = [&] { return run_psnr_curve(psnr, p_max, runner); }; });

  Common cfid_common;
  std::string cx, cy, cxhat;
  std::size_t cP = 1;
  auto* scf = app.add_subcommand("cfid", "Conditional Frechet distance of embeddings");
  add_common(scf, cfid_common, false);
  scf->add_option("--x", cx, "Truth embeddings (EMB1 or CSV)")->required();
  scf->add_option("--y", cy, "Measurement embeddings")->required();
  scf->add_option("--xhat", cxhat, "Generated embeddings")->required();
  scf->add_option("--p", cP, "Generated samples per item")->capture_default_str();
  scf->callback([&] {
    action = [&] { return run_cfid(cfid_common, cx, cy, cxhat, cP, runner); };
  });

  Common fid_common;
  std::string fx, fxhat;
  auto* sf = app.add_subcommand("fid", "Unconditional Frechet distance of embeddings");
  add_common(sf, fid_common, false);
  sf->add_option("--x", fx)->required();
  sf->add_option("--xhat", fxhat)->required();
  sf->callback([&] { action = [&] { return run_fid(fid_common, fx, fxhat, runner); }; });

  DcArgs dc;
  auto* sd = app.add_subcommand("dc", "Data-consistency projection");
  add_common(sd, dc.common, false);
  sd->add_option("--mask", dc.mask, "Mask file (N= or DIMS= header)")->required();
  sd->add_option("--x-raw", dc.x_raw, "Raw generator output, CSV re[,im]")->required();
  sd->add_option("--y", dc.y, "Measurement in the operator's output space");
  sd->add_option("--x-true", dc.x_true, "Ground truth; y = A x_true");
  sd->add_option("--coils", dc.coils)->capture_default_str();
  sd->callback([&] { action = [&] { return run_dc(dc, runner); }; });

  DetectArgs det;
  auto* sdet = app.add_subcommand("detect", "Event probability from posterior samples");
  add_common(sdet, det.common, true);
  sdet->add_option("--mu0", det.mu0)->capture_default_str();
  sdet->add_option("--sigma0", det.sigma0)->capture_default_str();
  sdet->add_option("--samples", det.samples)->capture_default_str();
  sdet->add_option("--classifier", det.classifier)
      ->check(CLI::IsMember({"threshold", "logistic"}))
      ->capture_default_str();
  sdet->add_option("--threshold", det.threshold)->capture_default_str();
  sdet->add_option("--center", det.center)->capture_default_str();
  sdet->add_option("--scale", det.scale)->capture_default_str();
  sdet->callback([&] { action = [&] { return run_detect(det, runner); }; });

  LossesArgs losses;
  auto* sl = app.add_subcommand("losses", "Monte Carlo losses next to their closed forms");
  add_common(sl, losses.common, true);
  sl->add_option("--mu", losses.mu)->capture_default_str();
  sl->add_option("--sigma", losses.sigma)->capture_default_str();
  sl->add_option("--mu0", losses.mu0)->capture_default_str();
  sl->add_option("--sigma0", losses.sigma0)->capture_default_str();
  sl->add_option("--p", losses.P)->capture_default_str();
  sl->add_option("--n-outer", losses.n_outer)->capture_default_str();
  sl->add_option("--beta", losses.beta)->check(beta_check)->capture_default_str();
  sl->callback([&] { action = [&] { return run_losses(losses, runner); }; });

  for (Common* c : {&recovery.common, &collapse_args.common, &ratio_law.common, &det.common,
                    &losses.common}) {
    c->has_seed = true;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    return action();
  } catch (const VerificationFailed& e) {
    print_error(err, "verification_failed", e.what());
  } catch (const std::invalid_argument& e) {
    print_error(err, "invalid_argument", e.what());
  } catch (const std::exception& e) {
    print_error(err, "runtime_error", e.what());
  }
  return 1;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace rcgan::cli
