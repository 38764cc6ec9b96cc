#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "invsamp/bernoulli_exact.hpp"
#include "invsamp/errors.hpp"
#include "invsamp/seq_engine.hpp"
#include "invsamp/sim_harness.hpp"
#include "invsamp/thresholds.hpp"

#ifndef INVSAMP_VERSION
#define INVSAMP_VERSION "0.1.0"
#endif

namespace {

using nlohmann::ordered_json;

struct OutputOptions {
  std::string format;  // "json" or "csv"
  int precision = 6;
};

double round_sig(double value, int digits) {
  if (value == 0.0 || !std::isfinite(value)) return value;
  const int exponent = static_cast<int>(std::floor(std::log10(std::fabs(value))));
  const double scale = std::pow(10.0, digits - 1 - exponent);
  const double scaled = value * scale;
  if (!std::isfinite(scaled)) return value;
  return std::round(scaled) / scale;
}

void round_result(ordered_json& node, int digits) {
  if (node.is_number_float()) {
    node = round_sig(node.get<double>(), digits);
  } else if (node.is_object() || node.is_array()) {
    for (auto& child : node) round_result(child, digits);
  }
}

std::string csv_cell(const ordered_json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

void emit(const std::string& command, ordered_json input, ordered_json result,
          const OutputOptions& out, const std::vector<std::string>& header,
          const std::vector<std::vector<ordered_json>>& rows) {
  round_result(result, out.precision);
  if (out.format == "csv") {
    for (std::size_t i = 0; i < header.size(); ++i) {
      std::cout << (i ? "," : "") << header[i];
    }
    std::cout << '\n';
    for (const auto& row : rows) {
      std::vector<ordered_json> rounded = row;
      for (auto& cell : rounded) round_result(cell, out.precision);
      for (std::size_t i = 0; i < rounded.size(); ++i) {
        std::cout << (i ? "," : "") << csv_cell(rounded[i]);
      }
      std::cout << '\n';
    }
    return;
  }
  ordered_json envelope;
  envelope["tool"] = "invsamp";
  envelope["version"] = INVSAMP_VERSION;
  envelope["command"] = command;
  envelope["input"] = std::move(input);
  envelope["result"] = std::move(result);
  std::cout << envelope.dump(2) << '\n';
}

invsamp::Estimator to_estimator(const std::string& name) {
  return name == "mle" ? invsamp::Estimator::mle : invsamp::Estimator::mvue;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t stop = text.find(sep, start);
    parts.push_back(text.substr(start, stop - start));
    if (stop == std::string::npos) break;
    start = stop + 1;
  }
  return parts;
}

double parse_real(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::domain_error(what + " is not a number: '" + text + "'");
  }
  if (pos != text.size()) {
    throw std::domain_error(what + " is not a number: '" + text + "'");
  }
  return value;
}

std::int64_t parse_int(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  std::int64_t value = 0;
  try {
    value = std::stoll(text, &pos);
  } catch (const std::exception&) {
    throw std::domain_error(what + " is not an integer: '" + text + "'");
  }
  if (pos != text.size()) {
    throw std::domain_error(what + " is not an integer: '" + text + "'");
  }
  return value;
}

// Grammar: bernoulli:P | scaled-binomial:L:RATE | discrete:X=W[,X=W]... | beta:A:B
invsamp::BoundedDistribution parse_distribution(const std::string& spec) {
  const std::size_t head = spec.find(':');
  const std::string kind = spec.substr(0, head);
  const std::string rest = head == std::string::npos ? "" : spec.substr(head + 1);
  if (kind == "bernoulli") {
    return invsamp::Bernoulli{parse_real(rest, "bernoulli p")};
  }
  if (kind == "scaled-binomial") {
    const auto parts = split(rest, ':');
    if (parts.size() != 2) {
      throw std::domain_error("scaled-binomial expects L:rate, got '" + rest + "'");
    }
    return invsamp::ScaledBinomial{parse_int(parts[0], "scaled-binomial L"),
                                   parse_real(parts[1], "scaled-binomial rate")};
  }
  if (kind == "beta") {
    const auto parts = split(rest, ':');
    if (parts.size() != 2) {
      throw std::domain_error("beta expects alpha:beta, got '" + rest + "'");
    }
    return invsamp::BetaLike{parse_real(parts[0], "beta alpha"),
                             parse_real(parts[1], "beta beta")};
  }
  if (kind == "discrete") {
    invsamp::DiscreteOnUnit discrete;
    for (const auto& item : split(rest, ',')) {
      const std::size_t eq = item.find('=');
      if (eq == std::string::npos) {
        throw std::domain_error("discrete expects x=w[,x=w]..., got '" + rest + "'");
      }
      discrete.points.push_back(parse_real(item.substr(0, eq), "discrete point"));
      discrete.weights.push_back(parse_real(item.substr(eq + 1), "discrete weight"));
    }
    return discrete;
  }
  throw std::domain_error("unknown distribution kind: '" + kind + "'");
}

ordered_json batch_json(const invsamp::TrialBatchResult& batch) {
  ordered_json histogram = ordered_json::array();
  for (const auto& [n, count] : batch.histogram) {
    histogram.push_back(ordered_json::array({n, count}));
  }
  ordered_json out;
  out["trials"] = batch.trials;
  out["successes"] = batch.successes;
  out["coverage"] = batch.coverage;
  out["n_mean"] = batch.n_mean;
  out["n_min"] = batch.n_min;
  out["n_max"] = batch.n_max;
  out["seed"] = batch.seed;
  out["histogram"] = std::move(histogram);
  return out;
}

std::vector<ordered_json> batch_row(const invsamp::TrialBatchResult& batch) {
  return {batch.trials, batch.successes, batch.coverage, batch.n_mean,
          batch.n_min,  batch.n_max,     batch.seed};
}

const std::vector<std::string> kBatchHeader = {
    "trials", "successes", "coverage", "n_mean", "n_min", "n_max", "seed"};

struct ThresholdArgs {
  double epsilon = 0.0;
  double delta = 0.0;
  bool all = false;
  bool explicit_bound = false;
  bool tilde = false;
  bool hat = false;
  bool star = false;
  bool dagum = false;
  bool cheng = false;
};

void run_threshold(const ThresholdArgs& args, const OutputOptions& out) {
  invsamp::ThresholdSelection select{args.explicit_bound, args.tilde, args.hat,
                                     args.star, args.dagum, args.cheng};
  const bool any = args.explicit_bound || args.tilde || args.hat || args.star ||
                   args.dagum || args.cheng;
  if (args.all || !any) select = invsamp::ThresholdSelection::all();

  const invsamp::PrecisionSpec spec{args.epsilon, args.delta};
  const auto report = invsamp::compute_thresholds(spec, select);

  ordered_json quantities = ordered_json::array();
  if (select.explicit_bound) quantities.push_back("explicit");
  if (select.tilde) quantities.push_back("tilde");
  if (select.hat) quantities.push_back("hat");
  if (select.star) quantities.push_back("star");
  if (select.dagum) quantities.push_back("dagum");
  if (select.cheng) quantities.push_back("cheng");
  ordered_json input;
  input["epsilon"] = args.epsilon;
  input["delta"] = args.delta;
  input["quantities"] = std::move(quantities);

  ordered_json result;
  if (report.explicit_gamma) result["explicit_gamma"] = *report.explicit_gamma;
  if (report.gamma_tilde) result["gamma_tilde"] = *report.gamma_tilde;
  if (report.gamma_hat) result["gamma_hat"] = *report.gamma_hat;
  if (report.gamma_star) result["gamma_star"] = *report.gamma_star;
  if (report.dagum_upsilon1) result["dagum_upsilon1"] = *report.dagum_upsilon1;
  if (report.cheng_alpha) result["cheng_alpha"] = *report.cheng_alpha;
  if (report.cheng_delta_s) result["cheng_delta_s"] = *report.cheng_delta_s;
  if (report.cheng_alpha) result["cheng_note"] = invsamp::ThresholdReport::kChengNote;
  ordered_json solvers;
  const auto diag_json = [](const invsamp::SolverDiag& diag) {
    ordered_json node;
    node["residual"] = diag.residual;
    node["bracket_lo"] = diag.bracket_lo;
    node["bracket_hi"] = diag.bracket_hi;
    return node;
  };
  if (report.tilde_diag) solvers["tilde"] = diag_json(*report.tilde_diag);
  if (report.hat_diag) solvers["hat"] = diag_json(*report.hat_diag);
  if (report.star_diag) solvers["star"] = diag_json(*report.star_diag);
  if (report.cheng_residual) solvers["cheng_residual"] = *report.cheng_residual;
  if (!solvers.empty()) result["solvers"] = std::move(solvers);

  std::vector<std::vector<ordered_json>> rows;
  for (const char* key :
       {"explicit_gamma", "gamma_tilde", "gamma_hat", "gamma_star",
        "dagum_upsilon1", "cheng_alpha", "cheng_delta_s", "cheng_note"}) {
    if (result.contains(key)) rows.push_back({key, result[key]});
  }
  if (result.contains("solvers")) {
    for (const char* name : {"tilde", "hat", "star"}) {
      if (result["solvers"].contains(name)) {
        rows.push_back({std::string(name) + "_residual",
                        result["solvers"][name]["residual"]});
      }
    }
    if (result["solvers"].contains("cheng_residual")) {
      rows.push_back({"cheng_residual", result["solvers"]["cheng_residual"]});
    }
  }
  emit("threshold", std::move(input), std::move(result), out,
       {"quantity", "value"}, rows);
}

struct MinGammaArgs {
  double epsilon = 0.0;
  double delta = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::string estimator = "mvue";
  unsigned threads = 1;
};

void run_min_gamma(const MinGammaArgs& args, const OutputOptions& out) {
  const auto estimator = to_estimator(args.estimator);
  const std::int64_t gamma = invsamp::minimum_gamma(
      args.epsilon, args.delta, args.a, args.b, estimator, args.threads);
  const auto worst = invsamp::min_coverage(
      {gamma, args.epsilon, estimator, args.a, args.b}, args.threads);

  ordered_json input;
  input["epsilon"] = args.epsilon;
  input["delta"] = args.delta;
  input["a"] = args.a;
  input["b"] = args.b;
  input["estimator"] = args.estimator;

  ordered_json result;
  result["gamma"] = gamma;
  result["worst_p"] = worst.p;
  result["coverage"] = worst.coverage;

  std::vector<std::vector<ordered_json>> rows = {
      {gamma, worst.p, worst.coverage}};
  emit("min-gamma", std::move(input), std::move(result), out,
       {"gamma", "worst_p", "coverage"}, rows);
}

struct CoverageArgs {
  std::int64_t gamma = 0;
  double epsilon = 0.0;
  std::optional<double> p;
  std::optional<double> a;
  std::optional<double> b;
  std::string estimator = "mvue";
};

void run_coverage(const CoverageArgs& args, const OutputOptions& out) {
  const auto estimator = to_estimator(args.estimator);
  ordered_json input;
  input["gamma"] = args.gamma;
  input["epsilon"] = args.epsilon;

  if (args.p) {
    input["p"] = *args.p;
    input["estimator"] = args.estimator;
    const auto window =
        invsamp::coverage_window(args.gamma, args.epsilon, *args.p, estimator);
    const double cov = invsamp::coverage_probability(args.gamma, args.epsilon,
                                                     *args.p, estimator);
    ordered_json result;
    result["p"] = *args.p;
    result["coverage"] = cov;
    result["window"] = {{"g", window.g}, {"h", window.h}, {"empty", window.empty()}};
    std::vector<std::vector<ordered_json>> rows = {
        {*args.p, cov, window.g, window.h}};
    emit("coverage", std::move(input), std::move(result), out,
         {"p", "coverage", "g", "h"}, rows);
    return;
  }

  input["a"] = *args.a;
  input["b"] = *args.b;
  input["estimator"] = args.estimator;
  const invsamp::CoverageQuery query{args.gamma, args.epsilon, estimator,
                                     *args.a, *args.b};
  invsamp::validate(query);
  const auto candidates = invsamp::candidate_set(query);
  ordered_json list = ordered_json::array();
  std::vector<std::vector<ordered_json>> rows;
  double min_cov = std::numeric_limits<double>::infinity();
  double min_p = *args.a;
  for (const double p : candidates) {
    const double cov =
        invsamp::coverage_probability(args.gamma, args.epsilon, p, estimator);
    list.push_back({{"p", p}, {"coverage", cov}});
    rows.push_back({p, cov});
    if (cov < min_cov) {
      min_cov = cov;
      min_p = p;
    }
  }
  ordered_json result;
  result["candidates"] = std::move(list);
  result["min"] = {{"p", min_p}, {"coverage", min_cov}};
  emit("coverage", std::move(input), std::move(result), out, {"p", "coverage"},
       rows);
}

struct SimulateArgs {
  std::string dist;
  std::string gamma = "auto";
  double epsilon = 0.0;
  double delta = 0.0;
  std::string estimator = "mvue";
  std::uint64_t trials = 20000;
  std::uint64_t seed = 1;
  std::uint64_t cap = invsamp::StoppingState::kDefaultCap;
  unsigned threads = 1;
};

void run_simulate(const SimulateArgs& args, const OutputOptions& out) {
  const auto dist = parse_distribution(args.dist);
  invsamp::validate(dist);
  const invsamp::PrecisionSpec spec{args.epsilon, args.delta};
  invsamp::validate(spec);
  const auto estimator = to_estimator(args.estimator);

  double gamma = 0.0;
  if (args.gamma == "auto") {
    if (const auto* bernoulli = std::get_if<invsamp::Bernoulli>(&dist)) {
      gamma = static_cast<double>(invsamp::minimum_gamma(
          args.epsilon, args.delta, bernoulli->p, bernoulli->p, estimator,
          args.threads));
    } else {
      gamma = std::ceil(invsamp::solve_gamma_hat(spec));
    }
  } else {
    gamma = parse_real(args.gamma, "gamma");
  }

  const invsamp::RunOptions options{args.cap, args.threads};
  const auto batch = invsamp::run_batch(dist, gamma, spec, estimator,
                                        args.trials, args.seed, options);

  ordered_json input;
  input["dist"] = args.dist;
  input["gamma"] = args.gamma == "auto"
                       ? ordered_json("auto")
                       : ordered_json(parse_real(args.gamma, "gamma"));
  input["epsilon"] = args.epsilon;
  input["delta"] = args.delta;
  input["estimator"] = args.estimator;
  input["trials"] = args.trials;
  input["seed"] = args.seed;
  input["cap"] = args.cap;

  ordered_json result;
  result["gamma"] = gamma;
  result["estimator"] = args.estimator;
  result["mean"] = invsamp::mean_of(dist);
  result.update(batch_json(batch));

  std::vector<ordered_json> row = {gamma, invsamp::mean_of(dist)};
  const auto tail = batch_row(batch);
  row.insert(row.end(), tail.begin(), tail.end());
  std::vector<std::string> header = {"gamma", "mean"};
  header.insert(header.end(), kBatchHeader.begin(), kBatchHeader.end());
  emit("simulate", std::move(input), std::move(result), out, header, {row});
}

struct BerArgs {
  std::int64_t levels = 0;
  double rate = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t trials = 20000;
  std::uint64_t seed = 1;
  std::uint64_t cap = invsamp::StoppingState::kDefaultCap;
  unsigned threads = 1;
};

void run_ber(const BerArgs& args, const OutputOptions& out) {
  const invsamp::PrecisionSpec spec{args.epsilon, args.delta};
  const auto batch = invsamp::ber_demo(args.levels, args.rate, spec, args.trials,
                                       args.seed, {args.cap, args.threads});
  const double gamma = invsamp::explicit_gamma(spec);

  ordered_json input;
  input["L"] = args.levels;
  input["rate"] = args.rate;
  input["epsilon"] = args.epsilon;
  input["delta"] = args.delta;
  input["trials"] = args.trials;
  input["seed"] = args.seed;
  input["cap"] = args.cap;

  ordered_json result;
  result["L"] = args.levels;
  result["rate"] = args.rate;
  result["gamma"] = gamma;
  result.update(batch_json(batch));

  std::vector<ordered_json> row = {args.levels, args.rate, gamma};
  const auto tail = batch_row(batch);
  row.insert(row.end(), tail.begin(), tail.end());
  std::vector<std::string> header = {"L", "rate", "gamma"};
  header.insert(header.end(), kBatchHeader.begin(), kBatchHeader.end());
  emit("ber", std::move(input), std::move(result), out, header, {row});
}

struct CurvesArgs {
  double delta = 0.0;
  double eps_min = 0.01;
  double eps_max = 0.5;
  int steps = 50;
};

void run_curves(const CurvesArgs& args, const OutputOptions& out) {
  if (!(args.eps_min < args.eps_max)) {
    throw std::domain_error("curves requires eps-min < eps-max");
  }
  ordered_json input;
  input["delta"] = args.delta;
  input["eps_min"] = args.eps_min;
  input["eps_max"] = args.eps_max;
  input["steps"] = args.steps;

  ordered_json list = ordered_json::array();
  std::vector<std::vector<ordered_json>> rows;
  for (int i = 0; i < args.steps; ++i) {
    const double eps = args.eps_min + (args.eps_max - args.eps_min) * i /
                                          (args.steps - 1);
    const invsamp::PrecisionSpec spec{eps, args.delta};
    const double explicit_g = invsamp::explicit_gamma(spec);
    const double tilde = invsamp::solve_gamma_tilde(spec);
    const double hat = invsamp::solve_gamma_hat(spec);
    const double dagum = invsamp::dagum_upsilon1(spec);
    list.push_back({{"epsilon", eps},
                    {"explicit_gamma", explicit_g},
                    {"gamma_tilde", tilde},
                    {"gamma_hat", hat},
                    {"dagum_upsilon1", dagum}});
    rows.push_back({eps, explicit_g, tilde, hat, dagum});
  }
  ordered_json result;
  result["rows"] = std::move(list);
  emit("curves", std::move(input), std::move(result), out,
       {"epsilon", "explicit_gamma", "gamma_tilde", "gamma_hat",
        "dagum_upsilon1"},
       rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential estimation of bounded-variable means with a sum-threshold stopping rule"};
  app.require_subcommand(1);

  std::string format;
  int precision = 6;
  app.add_option("--format", format, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--precision", precision,
                 "Significant digits for reported values (default 6)")
      ->check(CLI::Range(1, 17));

  ThresholdArgs t;
  auto* threshold = app.add_subcommand(
      "threshold", "Sample-sum thresholds meeting a relative precision spec");
  threshold->fallthrough();
  threshold->add_option("-e,--epsilon", t.epsilon, "Relative error tolerance in (0,1)")
      ->required();
  threshold->add_option("-d,--delta", t.delta, "Confidence risk in (0,1)")
      ->required();
  threshold->add_flag("--all", t.all, "Every quantity (default when no flag is given)");
  threshold->add_flag("--explicit", t.explicit_bound, "Closed-form threshold");
  threshold->add_flag("--tilde", t.tilde, "Solved threshold for the ratio estimator");
  threshold->add_flag("--hat", t.hat, "Solved threshold for the adjusted estimator");
  threshold->add_flag("--star", t.star, "Solved Bernoulli threshold");
  threshold->add_flag("--dagum", t.dagum, "Comparison bound");
  threshold->add_flag("--cheng", t.cheng, "Comparison threshold (guarantee unproven)");

  MinGammaArgs m;
  auto* min_gamma = app.add_subcommand(
      "min-gamma", "Smallest integer threshold covering an interval of Bernoulli means");
  min_gamma->fallthrough();
  min_gamma->add_option("-e,--epsilon", m.epsilon, "Relative error tolerance in (0,1)")
      ->required();
  min_gamma->add_option("-d,--delta", m.delta, "Confidence risk in (0,1)")
      ->required();
  min_gamma->add_option("-a,--lower", m.a, "Interval lower endpoint in (0,1)")
      ->required();
  min_gamma->add_option("-b,--upper", m.b, "Interval upper endpoint in (0,1)")
      ->required();
  min_gamma->add_option("--estimator", m.estimator, "mle or mvue (default mvue)")
      ->check(CLI::IsMember({"mle", "mvue"}));
  min_gamma->add_option("--threads", m.threads, "Worker threads (default 1)")
      ->check(CLI::Range(1, 256));

  CoverageArgs c;
  double c_p = 0.0;
  double c_a = 0.0;
  double c_b = 0.0;
  auto* coverage = app.add_subcommand(
      "coverage", "Exact coverage probability for Bernoulli inverse sampling");
  coverage->fallthrough();
  coverage->add_option("-g,--gamma", c.gamma, "Integer sum threshold")->required();
  coverage->add_option("-e,--epsilon", c.epsilon, "Relative error tolerance in (0,1)")
      ->required();
  auto* p_opt = coverage->add_option("-p,--prob", c_p, "Single success probability");
  auto* a_opt = coverage->add_option("-a,--lower", c_a, "Interval lower endpoint");
  auto* b_opt = coverage->add_option("-b,--upper", c_b, "Interval upper endpoint");
  p_opt->excludes(a_opt)->excludes(b_opt);
  a_opt->needs(b_opt);
  b_opt->needs(a_opt);
  coverage->add_option("--estimator", c.estimator, "mle or mvue (default mvue)")
      ->check(CLI::IsMember({"mle", "mvue"}));

  SimulateArgs s;
  auto* simulate = app.add_subcommand(
      "simulate", "Monte Carlo coverage of the stopping rule on a [0,1] distribution");
  simulate->fallthrough();
  simulate->add_option("--dist", s.dist,
                       "bernoulli:P | scaled-binomial:L:RATE | discrete:X=W,... | beta:A:B")
      ->required();
  simulate->add_option("--gamma", s.gamma, "Numeric sum threshold, or 'auto'");
  simulate->add_option("-e,--epsilon", s.epsilon, "Relative error tolerance in (0,1)")
      ->required();
  simulate->add_option("-d,--delta", s.delta, "Confidence risk in (0,1)")->required();
  simulate->add_option("--estimator", s.estimator, "mle or mvue (default mvue)")
      ->check(CLI::IsMember({"mle", "mvue"}));
  simulate->add_option("--trials", s.trials, "Trial count (default 20000)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", s.seed, "Root seed (default 1)");
  simulate->add_option("--cap", s.cap, "Per-trial sample cap")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--threads", s.threads, "Worker threads (default 1)")
      ->check(CLI::Range(1, 256));

  BerArgs b;
  auto* ber = app.add_subcommand(
      "ber", "Bit-error-rate style demo on an L-level quantized source");
  ber->fallthrough();
  ber->add_option("-L,--levels", b.levels, "Quantization levels, at least 2")
      ->required();
  ber->add_option("--rate", b.rate, "Per-level error rate in [0,1]")->required();
  ber->add_option("-e,--epsilon", b.epsilon, "Relative error tolerance in (0,1)")
      ->required();
  ber->add_option("-d,--delta", b.delta, "Confidence risk in (0,1)")->required();
  ber->add_option("--trials", b.trials, "Trial count (default 20000)")
      ->check(CLI::PositiveNumber);
  ber->add_option("--seed", b.seed, "Root seed (default 1)");
  ber->add_option("--cap", b.cap, "Per-trial sample cap")->check(CLI::PositiveNumber);
  ber->add_option("--threads", b.threads, "Worker threads (default 1)")
      ->check(CLI::Range(1, 256));

  CurvesArgs cv;
  auto* curves = app.add_subcommand(
      "curves", "Threshold quantities tabulated over a range of tolerances");
  curves->fallthrough();
  curves->add_option("-d,--delta", cv.delta, "Confidence risk in (0,1)")->required();
  curves->add_option("--eps-min", cv.eps_min, "Smallest tolerance (default 0.01)");
  curves->add_option("--eps-max", cv.eps_max, "Largest tolerance (default 0.5)");
  curves->add_option("--steps", cv.steps, "Grid size (default 50)")
      ->check(CLI::Range(2, 1000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const OutputOptions out{
      format.empty() ? (curves->parsed() ? "csv" : "json") : format, precision};

  try {
    if (threshold->parsed()) {
      run_threshold(t, out);
    } else if (min_gamma->parsed()) {
      run_min_gamma(m, out);
    } else if (coverage->parsed()) {
      if (p_opt->count() > 0) {
        c.p = c_p;
      } else if (a_opt->count() > 0) {
        c.a = c_a;
        c.b = c_b;
      } else {
        throw std::domain_error("coverage needs -p or both -a and -b");
      }
      run_coverage(c, out);
    } else if (simulate->parsed()) {
      run_simulate(s, out);
    } else if (ber->parsed()) {
      run_ber(b, out);
    } else if (curves->parsed()) {
      run_curves(cv, out);
    }
    return 0;
  } catch (const invsamp::cap_exceeded_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const invsamp::convergence_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
