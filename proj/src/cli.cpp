#include "kldsel/cli.hpp"

#include "kldsel/bandwidth.hpp"
#include "kldsel/cells.hpp"
#include "kldsel/density.hpp"
#include "kldsel/divergence.hpp"
#include "kldsel/error.hpp"
#include "kldsel/hypothesis.hpp"
#include "kldsel/models.hpp"
#include "kldsel/rng.hpp"
#include "kldsel/sample.hpp"
#include "kldsel/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

namespace kldsel::cli {

using nlohmann::json;

namespace {

struct CommonOptions
{
  std::uint64_t seed = 42;
  std::string out;
  std::string format;
  bool no_timestamp = false;
};

struct Report
{
  json config = json::object();
  json results = json::object();
  /// Tabular view used for CSV output when present.
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

std::string
trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double>
parse_double(const std::string& text)
{
  std::string_view sv = text;
  if (!sv.empty() && sv.front() == '+') {
    sv.remove_prefix(1);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
  if (ec != std::errc{} || ptr != sv.data() + sv.size() || sv.empty()) {
    return std::nullopt;
  }
  return value;
}

std::string
utc_now()
{
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json
rounded(const json& j)
{
  if (j.is_number_float()) {
    const double x = j.get<double>();
    return std::isfinite(x) ? json(round_sig9(x)) : json(nullptr);
  }
  if (j.is_array()) {
    json r = json::array();
    for (const auto& e : j) {
      r.push_back(rounded(e));
    }
    return r;
  }
  if (j.is_object()) {
    json r = json::object();
    for (const auto& [k, v] : j.items()) {
      r[k] = rounded(v);
    }
    return r;
  }
  return j;
}

std::string
csv_cell(const json& j)
{
  if (j.is_string()) {
    return j.get<std::string>();
  }
  if (j.is_null()) {
    return "nan";
  }
  if (j.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", j.get<double>());
    return buf;
  }
  if (j.is_array()) {
    std::string s;
    for (const auto& e : j) {
      s += (s.empty() ? "" : ",") + csv_cell(e);
    }
    return s;
  }
  return j.dump();
}

std::string
render(const std::string& format, const json& manifest, const Report& report)
{
  json doc;
  doc["manifest"] = manifest;
  doc["config"] = rounded(report.config);
  doc["results"] = rounded(report.results);
  if (format == "json") {
    return doc.dump(2) + "\n";
  }

  std::ostringstream os;
  os << "# manifest " << json{{"manifest", doc["manifest"]}, {"config", doc["config"]}}.dump()
     << "\n";
  if (!report.columns.empty()) {
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
      os << (c ? "," : "") << report.columns[c];
    }
    os << "\n";
    for (const auto& row : report.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        os << (c ? "," : "") << csv_cell(rounded(row[c]));
      }
      os << "\n";
    }
  } else {
    os << "statistic,value\n";
    for (const auto& [k, v] : doc["results"].items()) {
      os << k << "," << csv_cell(v) << "\n";
    }
  }
  return os.str();
}

BandwidthPolicy
parse_policy(const std::string& text)
{
  if (text == "mcv") {
    return {Objective::mcv, 0.0};
  }
  if (text == "cv") {
    return {Objective::cv, 0.0};
  }
  const auto h = parse_double(text);
  if (!h || !(*h > 0.0) || !std::isfinite(*h)) {
    throw ParameterError("bandwidth must be 'mcv', 'cv' or a positive number, got '" + text + "'");
  }
  return {Objective::fixed, *h};
}

double
resolve_bandwidth(const Sample& sample, const BandwidthPolicy& policy)
{
  if (policy.objective == Objective::fixed) {
    return policy.fixed_h;
  }
  return select_bandwidth(sample, policy.objective).h_star;
}

json
policy_json(const BandwidthPolicy& policy)
{
  if (policy.objective == Objective::fixed) {
    return policy.fixed_h;
  }
  return to_string(policy.objective);
}

CellPartition
make_cells(const std::vector<double>& boundaries, double offset)
{
  return boundaries.empty() ? CellPartition::default_partition().with_offset(offset)
                            : CellPartition(boundaries, offset);
}

json
cells_json(const CellPartition& cells)
{
  return {{"boundaries", std::vector<double>(cells.boundaries().begin(), cells.boundaries().end())},
          {"offset", cells.offset()}};
}

Family
parse_family(const std::string& name)
{
  if (name == "poisson") {
    return Family::poisson;
  }
  if (name == "geometric") {
    return Family::geometric;
  }
  throw ParameterError("unknown model '" + name + "'");
}

const char*
selected_family(Decision d)
{
  switch (d) {
    case Decision::model_1:
      return "poisson";
    case Decision::model_2:
      return "geometric";
    default:
      return "none";
  }
}

Sample
load_sample(const std::string& path)
{
  return Sample(read_observations_file(path));
}

// Subcommand bodies. Each fills a report from already-parsed options.

struct DensityArgs
{
  std::string input;
  std::string bandwidth = "mcv";
  std::size_t grid = 512;
};

Report
run_density(const DensityArgs& a)
{
  if (a.grid < 2) {
    throw ParameterError("grid needs at least 2 points");
  }
  const Sample sample = load_sample(a.input);
  const BandwidthPolicy policy = parse_policy(a.bandwidth);
  const double h = resolve_bandwidth(sample, policy);
  const auto grid = default_grid(sample, h, a.grid);
  const auto classical = evaluate_on_grid(sample, h, grid, EstimatorKind::classical);
  const auto reduced = evaluate_on_grid(sample, h, grid, EstimatorKind::bias_reduced);

  Report r;
  r.config = {{"input", a.input}, {"bandwidth", policy_json(policy)}, {"grid", a.grid}};
  r.results = {{"n", sample.size()},
               {"bandwidth", h},
               {"x", grid},
               {"f_classical", classical.values},
               {"f_bias_reduced", reduced.values}};
  r.columns = {"x", "f_classical", "f_bias_reduced"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    r.rows.push_back({grid[i], classical.values[i], reduced.values[i]});
  }
  return r;
}

struct BandwidthArgs
{
  std::string input;
  std::string objective = "mcv";
  std::optional<double> lo;
  std::optional<double> hi;
};

Report
run_bandwidth(const BandwidthArgs& a)
{
  const Sample sample = load_sample(a.input);
  Objective objective;
  if (a.objective == "mcv") {
    objective = Objective::mcv;
  } else if (a.objective == "cv") {
    objective = Objective::cv;
  } else {
    throw ParameterError("objective must be 'cv' or 'mcv'");
  }
  const SearchRange range = default_search_range(sample);
  const double lo = a.lo.value_or(range.lo);
  const double hi = a.hi.value_or(range.hi);
  const BandwidthSelection sel = select_bandwidth(sample, objective, lo, hi);

  Report r;
  r.config = {{"input", a.input}, {"objective", a.objective}, {"lo", lo}, {"hi", hi}};
  r.results = {{"n", sample.size()},
               {"h_star", sel.h_star},
               {"objective", to_string(sel.objective)},
               {"objective_value", sel.objective_value},
               {"search_lo", sel.search_lo},
               {"search_hi", sel.search_hi},
               {"evaluations", sel.evaluations},
               {"reference_bandwidth", reference_bandwidth(sample)}};
  return r;
}

struct KldArgs
{
  std::string input;
  std::string model = "poisson";
  std::string bandwidth = "mcv";
  std::string estimator = "bias_reduced";
  std::vector<double> cells;
  double cell_offset = count_offset;
  bool lenient = false;
};

Report
run_kld(const KldArgs& a)
{
  const Sample sample = load_sample(a.input);
  const BandwidthPolicy policy = parse_policy(a.bandwidth);
  const double n = static_cast<double>(sample.size());
  Report r;
  r.config = {{"input", a.input}, {"model", a.model}, {"bandwidth", policy_json(policy)}};

  if (a.model == "normal") {
    const double h = resolve_bandwidth(sample, policy);
    const double mu = sample.mean();
    const double sigma = sample.sd() * std::sqrt((n - 1.0) / n);
    if (!(sigma > 0.0)) {
      throw NumericError("normal fit is degenerate: zero variance");
    }
    auto pdf = [mu, sigma](double x) {
      const double z = (x - mu) / sigma;
      return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    };
    const DivergenceEstimate d = kld_continuous(sample, h, pdf, threshold_epsilon(sample.size()));
    r.results = {{"n", sample.size()},
                 {"bandwidth", h},
                 {"mean", mu},
                 {"sd", sigma},
                 {"divergence", d.value},
                 {"n_divergence", n * d.value},
                 {"epsilon_n", d.epsilon_n},
                 {"active_mass", d.active_mass},
                 {"domain_lo", d.domain_lo},
                 {"domain_hi", d.domain_hi},
                 {"nodes", d.nodes}};
    return r;
  }

  EstimatorKind kind;
  if (a.estimator == "bias_reduced") {
    kind = EstimatorKind::bias_reduced;
  } else if (a.estimator == "classical") {
    kind = EstimatorKind::classical;
  } else {
    throw ParameterError("estimator must be 'bias_reduced' or 'classical'");
  }
  const Family family = parse_family(a.model);
  const CellPartition cells = make_cells(a.cells, a.cell_offset);
  r.config["estimator"] = a.estimator;
  r.config["cells"] = cells_json(cells);
  r.config["lenient"] = a.lenient;

  const MleFit fit = fit_mle(family, sample, {.strict_support = !a.lenient});
  const double h = resolve_bandwidth(sample, policy);
  const BinnedDistribution p = kde_cell_probs(sample, h, cells, kind);
  const BinnedDistribution q = model_cell_probs(fit.model(), cells);
  const double d = kld_discrete(p, q);
  r.results = {{"n", sample.size()},
               {"bandwidth", h},
               {"estimate", fit.estimate},
               {"support_violation", fit.support_violation},
               {"divergence", d},
               {"n_divergence", n * d},
               {"cell_masses", p.masses},
               {"model_masses", q.masses}};
  return r;
}

struct TestArgs
{
  std::string input;
  std::string model = "poisson";
  std::string bandwidth = "mcv";
  double alpha = 0.05;
  std::size_t resamples = 500;
  std::vector<double> cells;
  double cell_offset = count_offset;
};

Report
run_gof(const TestArgs& a, std::uint64_t seed)
{
  const Sample sample = load_sample(a.input);
  const BandwidthPolicy policy = parse_policy(a.bandwidth);
  const Family family = parse_family(a.model);
  const CellPartition cells = make_cells(a.cells, a.cell_offset);
  const MleFit fit = fit_mle(family, sample);
  const double h = resolve_bandwidth(sample, policy);

  const std::array families{family};
  const ScaleEstimate scale =
    bootstrap_scale(sample, h, families, cells, {.resamples = a.resamples, .seed = seed, .threads = 1});
  const ParametricModel model = fit.model();
  const TestResult t = gof_statistic(sample, h, cells, model, scale.lambda_phi_hat.at(0), a.alpha);
  const double d = kld_discrete(bkde_cell_probs(sample, h, cells), model_cell_probs(model, cells));

  Report r;
  r.config = {{"input", a.input},
              {"model", a.model},
              {"bandwidth", policy_json(policy)},
              {"alpha", a.alpha},
              {"resamples", a.resamples},
              {"cells", cells_json(cells)}};
  r.results = {{"n", sample.size()},
               {"bandwidth", h},
               {"estimate", fit.estimate},
               {"divergence", d},
               {"statistic", t.statistic},
               {"lambda_phi_hat", t.scale},
               {"p_value", t.p_value},
               {"decision", to_string(t.decision)},
               {"degenerate", t.degenerate},
               {"resamples_used", scale.resamples_used}};
  return r;
}

Report
run_select(const TestArgs& a, std::uint64_t seed)
{
  const Sample sample = load_sample(a.input);
  const BandwidthPolicy policy = parse_policy(a.bandwidth);
  const CellPartition cells = make_cells(a.cells, a.cell_offset);
  const MleFit poisson = fit_mle(Family::poisson, sample);
  const MleFit geometric = fit_mle(Family::geometric, sample, {.strict_support = false});
  const double h = resolve_bandwidth(sample, policy);
  const ParametricModel model_1 = poisson.model();
  const ParametricModel model_2 = geometric.model();

  constexpr std::array families{Family::poisson, Family::geometric};
  const ScaleEstimate scale =
    bootstrap_scale(sample, h, families, cells, {.resamples = a.resamples, .seed = seed, .threads = 1});
  const TestResult t = kl_n_test(sample, h, cells, model_1, model_2, scale.xi_hat, a.alpha);
  const BinnedDistribution f_b = bkde_cell_probs(sample, h, cells);
  const double n = static_cast<double>(sample.size());
  const double d_p = kld_discrete(f_b, model_cell_probs(model_1, cells));
  const double d_g = kld_discrete(f_b, model_cell_probs(model_2, cells));

  Report r;
  r.config = {{"input", a.input},
              {"model_1", "poisson"},
              {"model_2", "geometric"},
              {"bandwidth", policy_json(policy)},
              {"alpha", a.alpha},
              {"resamples", a.resamples},
              {"cells", cells_json(cells)}};
  r.results = {{"n", sample.size()},
               {"bandwidth", h},
               {"lambda_hat", poisson.estimate},
               {"theta_hat", geometric.estimate},
               {"support_violation", geometric.support_violation},
               {"d_poisson", d_p},
               {"d_geometric", d_g},
               {"n_d_poisson", n * d_p},
               {"n_d_geometric", n * d_g},
               {"xi_hat", scale.xi_hat},
               {"kl_n", t.statistic},
               {"p_value", t.p_value},
               {"critical_value", critical_value(a.alpha)},
               {"decision", to_string(t.decision)},
               {"selected", selected_family(t.decision)},
               {"degenerate", t.degenerate}};
  return r;
}

struct SimulateArgs
{
  double pi = 1.0;
  std::vector<std::size_t> n{250};
  std::size_t reps = 200;
  double alpha = 0.05;
  std::string bandwidth = "mcv";
  std::size_t resamples = 500;
  std::vector<double> cells;
  double cell_offset = count_offset;
  unsigned threads = 0;
  bool records = false;
};

json
moments_json(const Moments& m)
{
  return {{"mean", m.mean}, {"sd", m.sd}, {"count", m.count}};
}

Report
run_simulate(const SimulateArgs& a, std::uint64_t seed)
{
  const BandwidthPolicy policy = parse_policy(a.bandwidth);
  const CellPartition cells = make_cells(a.cells, a.cell_offset);
  if (a.n.empty()) {
    throw ParameterError("at least one sample size is required");
  }

  // Thread count is left out of the config: reports do not depend on it.
  Report r;
  r.config = {{"pi", a.pi},
              {"n", a.n},
              {"reps", a.reps},
              {"alpha", a.alpha},
              {"seed", seed},
              {"bandwidth", policy_json(policy)},
              {"resamples", a.resamples},
              {"cells", cells_json(cells)},
              {"model_1", "poisson"},
              {"model_2", "geometric"}};

  const std::vector<std::pair<std::string, Moments SelectionReport::*>> stats{
    {"lambda_hat", &SelectionReport::lambda_hat},
    {"theta_hat", &SelectionReport::theta_hat},
    {"d_poisson", &SelectionReport::d_poisson},
    {"d_geometric", &SelectionReport::d_geometric},
    {"n_d_poisson", &SelectionReport::n_d_poisson},
    {"n_d_geometric", &SelectionReport::n_d_geometric},
    {"d_classical_geometric", &SelectionReport::d_classical_geometric},
    {"d_bias_reduced_geometric", &SelectionReport::d_bias_reduced_geometric},
    {"mkld", &SelectionReport::mkld},
    {"mkld_shifted", &SelectionReport::mkld_shifted},
    {"xi_hat", &SelectionReport::xi_hat},
    {"kl_n", &SelectionReport::kl_n},
    {"h_bias_reduced", &SelectionReport::h_bias_reduced},
    {"h_classical", &SelectionReport::h_classical},
  };
  r.columns = {"n"};
  for (const auto& [name, _] : stats) {
    r.columns.push_back(name + "_mean");
    r.columns.push_back(name + "_sd");
  }
  for (const char* c : {"pct_model_1", "pct_model_2", "pct_indecisive", "degenerate",
                        "support_violations"}) {
    r.columns.emplace_back(c);
  }

  json per_n = json::array();
  for (std::size_t n : a.n) {
    ExperimentConfig config;
    config.pi = a.pi;
    config.n = n;
    config.reps = a.reps;
    config.alpha = a.alpha;
    config.seed = seed;
    config.bandwidth = policy;
    config.bootstrap = a.resamples;
    config.cells = cells;
    config.threads = a.threads;
    const SelectionReport rep = run_experiment(config);

    json entry = {{"n", n}};
    std::vector<json> row{n};
    for (const auto& [name, member] : stats) {
      entry[name] = moments_json(rep.*member);
      row.emplace_back((rep.*member).mean);
      row.emplace_back((rep.*member).sd);
    }
    entry["pct_model_1"] = rep.pct_model_1;
    entry["pct_model_2"] = rep.pct_model_2;
    entry["pct_indecisive"] = rep.pct_indecisive;
    entry["degenerate"] = rep.degenerate;
    entry["support_violations"] = rep.support_violations;
    for (const json& v : {json(rep.pct_model_1), json(rep.pct_model_2), json(rep.pct_indecisive),
                          json(rep.degenerate), json(rep.support_violations)}) {
      row.push_back(v);
    }
    if (a.records) {
      json recs = json::array();
      for (const auto& rec : rep.records) {
        recs.push_back({{"rep", rec.rep_index},
                        {"h_bias_reduced", rec.h_bias_reduced},
                        {"h_classical", rec.h_classical},
                        {"lambda_hat", rec.lambda_hat},
                        {"theta_hat", rec.theta_hat},
                        {"d_poisson", rec.d_poisson},
                        {"d_geometric", rec.d_geometric},
                        {"d_classical_geometric", rec.d_classical_geometric},
                        {"d_bias_reduced_geometric", rec.d_bias_reduced_geometric},
                        {"mkld", rec.mkld},
                        {"mkld_shifted", rec.mkld_shifted},
                        {"xi_hat", rec.xi_hat},
                        {"kl_n", rec.kl_n},
                        {"decision", to_string(rec.decision)},
                        {"degenerate", rec.degenerate},
                        {"support_violation", rec.support_violation}});
      }
      entry["records"] = std::move(recs);
    }
    per_n.push_back(std::move(entry));
    r.rows.push_back(std::move(row));
  }
  r.results = {{"experiments", std::move(per_n)}};
  return r;
}

struct RateArgs
{
  std::vector<std::size_t> n_list{200, 400, 800, 1600, 3200};
  std::size_t reps = 400;
  double x0 = 0.0;
  std::string estimator = "both";
  unsigned threads = 0;
};

Report
run_rate(const RateArgs& a, std::uint64_t seed)
{
  std::vector<EstimatorKind> kinds;
  if (a.estimator == "both" || a.estimator == "bias_reduced") {
    kinds.push_back(EstimatorKind::bias_reduced);
  }
  if (a.estimator == "both" || a.estimator == "classical") {
    kinds.push_back(EstimatorKind::classical);
  }
  if (kinds.empty()) {
    throw ParameterError("estimator must be 'both', 'bias_reduced' or 'classical'");
  }

  Report r;
  r.config = {{"n_list", a.n_list}, {"reps", a.reps}, {"x0", a.x0}, {"estimator", a.estimator}};
  r.columns = {"estimator", "n", "h", "mse"};
  json points = json::array();
  for (EstimatorKind kind : kinds) {
    const RateResult res = mse_rate_experiment(a.n_list, a.reps, a.x0, seed, kind, a.threads);
    r.results[std::string("slope_") + to_string(kind)] = res.slope;
    for (const auto& p : res.points) {
      points.push_back({{"estimator", to_string(kind)}, {"n", p.n}, {"h", p.h}, {"mse", p.mse}});
      r.rows.push_back({to_string(kind), p.n, p.h, p.mse});
    }
  }
  r.results["points"] = std::move(points);
  return r;
}

struct HistArgs
{
  std::string input;
  double pi = 1.0;
  std::size_t n = 250;
};

Report
run_hist(const HistArgs& a, std::uint64_t seed)
{
  Report r;
  std::optional<Sample> sample;
  if (!a.input.empty()) {
    sample = load_sample(a.input);
    r.config = {{"input", a.input}};
  } else {
    rng::Stream stream(seed, 0, rng::Purpose::sampling);
    sample = sample_mixture(a.pi, a.n, stream);
    r.config = {{"pi", a.pi}, {"n", a.n}, {"seed", seed}};
  }
  const auto rows = histogram_overlay(*sample);
  const MleFit poisson = fit_mle(Family::poisson, *sample);
  const MleFit geometric = fit_mle(Family::geometric, *sample, {.strict_support = false});

  json bins = json::array();
  r.columns = {"value", "count", "frequency", "poisson_pmf", "geometric_pmf"};
  for (const auto& row : rows) {
    bins.push_back({{"value", row.value},
                    {"count", row.count},
                    {"frequency", row.frequency},
                    {"poisson_pmf", row.poisson_pmf},
                    {"geometric_pmf", row.geometric_pmf}});
    r.rows.push_back({row.value, row.count, row.frequency, row.poisson_pmf, row.geometric_pmf});
  }
  r.results = {{"n", sample->size()},
               {"lambda_hat", poisson.estimate},
               {"theta_hat", geometric.estimate},
               {"bins", std::move(bins)}};
  return r;
}

void
add_common(CLI::App* sub, CommonOptions& common)
{
  sub->add_option("--seed", common.seed, "Random seed")->capture_default_str();
  sub->add_option("--out", common.out, "Output file (default: standard output)");
  sub->add_option("--format", common.format, "Report format; defaults to the --out extension, else json")
    ->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--no-timestamp", common.no_timestamp, "Omit timestamps from the manifest");
}

std::string
resolve_format(const CommonOptions& common)
{
  if (!common.format.empty()) {
    return common.format;
  }
  const auto& out = common.out;
  if (out.size() >= 4 && out.compare(out.size() - 4, 4, ".csv") == 0) {
    return "csv";
  }
  return "json";
}

} // namespace

double
round_sig9(double x)
{
  if (!std::isfinite(x) || x == 0.0) {
    return x;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

std::vector<double>
read_observations(std::istream& in, const std::string& source)
{
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
      line.erase(0, 3);
    }
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    const auto v = parse_double(text);
    if (!v) {
      if (!seen_data) {
        seen_data = true; // header
        continue;
      }
      throw DomainError(source + ":" + std::to_string(line_no) + ": not a number: '" + text + "'");
    }
    if (!std::isfinite(*v)) {
      throw DomainError(source + ":" + std::to_string(line_no) + ": non-finite value '" + text + "'");
    }
    seen_data = true;
    values.push_back(*v);
  }
  if (values.empty()) {
    throw DomainError(source + ": no observations");
  }
  return values;
}

std::vector<double>
read_observations_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DomainError("cannot open input file '" + path + "'");
  }
  return read_observations(in, path);
}

int
execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Bias-reduced kernel density estimation, divergence estimation and model selection "
               "for count data",
               "kldsel"};
  app.set_version_flag("--version", library_version);
  app.require_subcommand(1);

  CommonOptions common;
  std::function<Report()> run;

  DensityArgs density;
  auto* s_density = app.add_subcommand("density", "Classical and bias-reduced density estimates on a grid");
  s_density->add_option("--input", density.input, "Data file")->required();
  s_density->add_option("--bandwidth", density.bandwidth, "mcv, cv or a positive number")->capture_default_str();
  s_density->add_option("--grid", density.grid, "Number of grid points")->capture_default_str();
  add_common(s_density, common);
  s_density->callback([&] { run = [&] { return run_density(density); }; });

  BandwidthArgs bw;
  auto* s_bw = app.add_subcommand("bandwidth", "Cross-validation bandwidth selection");
  s_bw->add_option("--input", bw.input, "Data file")->required();
  s_bw->add_option("--objective", bw.objective, "cv or mcv")->capture_default_str();
  s_bw->add_option("--lo", bw.lo, "Lower end of the search range");
  s_bw->add_option("--hi", bw.hi, "Upper end of the search range");
  add_common(s_bw, common);
  s_bw->callback([&] { run = [&] { return run_bandwidth(bw); }; });

  KldArgs kld;
  auto* s_kld = app.add_subcommand("kld", "Divergence between the estimated density and a fitted model");
  s_kld->add_option("--input", kld.input, "Data file")->required();
  s_kld->add_option("--model", kld.model, "poisson, geometric or normal")
    ->check(CLI::IsMember({"poisson", "geometric", "normal"}))
    ->capture_default_str();
  s_kld->add_option("--bandwidth", kld.bandwidth, "mcv, cv or a positive number")->capture_default_str();
  s_kld->add_option("--estimator", kld.estimator, "bias_reduced or classical (binned models)")
    ->capture_default_str();
  s_kld->add_option("--cells", kld.cells, "Cell boundaries, comma separated")->delimiter(',');
  s_kld->add_option("--cell-offset", kld.cell_offset, "Shift of the cell limits for the estimate")
    ->capture_default_str();
  s_kld->add_flag("--lenient", kld.lenient, "Fit the geometric model even when the data contain 0");
  add_common(s_kld, common);
  s_kld->callback([&] { run = [&] { return run_kld(kld); }; });

  auto add_test_options = [](CLI::App* sub, TestArgs& t, bool with_model) {
    sub->add_option("--input", t.input, "Data file")->required();
    if (with_model) {
      sub->add_option("--model", t.model, "poisson or geometric")
        ->check(CLI::IsMember({"poisson", "geometric"}))
        ->capture_default_str();
    }
    sub->add_option("--bandwidth", t.bandwidth, "mcv, cv or a positive number")->capture_default_str();
    sub->add_option("--alpha", t.alpha, "Significance level")->capture_default_str();
    sub->add_option("--resamples", t.resamples, "Bootstrap resamples")->capture_default_str();
    sub->add_option("--cells", t.cells, "Cell boundaries, comma separated")->delimiter(',');
    sub->add_option("--cell-offset", t.cell_offset, "Shift of the cell limits for the estimate")
      ->capture_default_str();
  };

  TestArgs gof;
  auto* s_gof = app.add_subcommand("gof", "Goodness-of-fit test of one count model");
  add_test_options(s_gof, gof, true);
  add_common(s_gof, common);
  s_gof->callback([&] { run = [&] { return run_gof(gof, common.seed); }; });

  TestArgs sel;
  auto* s_sel = app.add_subcommand("select", "Poisson versus geometric model selection test");
  add_test_options(s_sel, sel, false);
  add_common(s_sel, common);
  s_sel->callback([&] { run = [&] { return run_select(sel, common.seed); }; });

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "Monte Carlo model selection experiment");
  s_sim->add_option("--pi", sim.pi, "Weight of Poisson(9) in the mixture")->capture_default_str();
  s_sim->add_option("--n", sim.n, "Sample sizes, comma separated")->delimiter(',')->capture_default_str();
  s_sim->add_option("--reps", sim.reps, "Replications per sample size")->capture_default_str();
  s_sim->add_option("--alpha", sim.alpha, "Significance level")->capture_default_str();
  s_sim->add_option("--bandwidth", sim.bandwidth, "mcv, cv or a positive number")->capture_default_str();
  s_sim->add_option("--resamples", sim.resamples, "Bootstrap resamples")->capture_default_str();
  s_sim->add_option("--cells", sim.cells, "Cell boundaries, comma separated")->delimiter(',');
  s_sim->add_option("--cell-offset", sim.cell_offset, "Shift of the cell limits for the estimate")
    ->capture_default_str();
  s_sim->add_option("--threads", sim.threads, "Worker threads (0: KLDSEL_THREADS or all cores)");
  s_sim->add_flag("--records", sim.records, "Include per-replication records");
  add_common(s_sim, common);
  s_sim->callback([&] { run = [&] { return run_simulate(sim, common.seed); }; });

  RateArgs rate;
  auto* s_rate = app.add_subcommand("rate", "Monte Carlo MSE convergence rate at a point");
  s_rate->add_option("--n-list", rate.n_list, "Sample sizes, comma separated")->delimiter(',')->capture_default_str();
  s_rate->add_option("--reps", rate.reps, "Replications per sample size")->capture_default_str();
  s_rate->add_option("--x0", rate.x0, "Evaluation point")->capture_default_str();
  s_rate->add_option("--estimator", rate.estimator, "both, bias_reduced or classical")
    ->check(CLI::IsMember({"both", "bias_reduced", "classical"}))
    ->capture_default_str();
  s_rate->add_option("--threads", rate.threads, "Worker threads (0: KLDSEL_THREADS or all cores)");
  add_common(s_rate, common);
  s_rate->callback([&] { run = [&] { return run_rate(rate, common.seed); }; });

  HistArgs hist;
  auto* s_hist = app.add_subcommand("hist", "Bin counts with fitted Poisson and geometric pmfs");
  s_hist->add_option("--input", hist.input, "Data file (default: draw from the mixture)");
  s_hist->add_option("--pi", hist.pi, "Mixture weight when drawing a sample")->capture_default_str();
  s_hist->add_option("--n", hist.n, "Sample size when drawing a sample")->capture_default_str();
  add_common(s_hist, common);
  s_hist->callback([&] { run = [&] { return run_hist(hist, common.seed); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* failed = &app;
    for (const auto* sub : app.get_subcommands()) {
      failed = sub;
    }
    err << failed->help();
    return exit_usage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const std::string started = utc_now();
    const Report report = run();
    json manifest = {{"command", command},
                     {"version", library_version},
                     {"seed", common.seed},
                     {"output", common.out.empty() ? "-" : common.out}};
    if (!common.no_timestamp) {
      manifest["started"] = started;
      manifest["finished"] = utc_now();
    }
    const std::string text = render(resolve_format(common), manifest, report);
    if (common.out.empty()) {
      out << text;
    } else {
      std::ofstream file(common.out, std::ios::binary);
      file << text;
      if (!file) {
        throw DomainError("cannot write output file '" + common.out + "'");
      }
    }
    return exit_ok;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return exit_numeric;
  } catch (const std::logic_error& e) {
    // ParameterError and DomainError.
    err << "error: " << e.what() << "\n";
    return exit_data;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_numeric;
  }
}

} // namespace kldsel::cli
