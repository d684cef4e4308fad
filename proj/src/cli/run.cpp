#include "ptl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptl/cycle_stats.hpp"
#include "ptl/errors.hpp"
#include "ptl/limit_law.hpp"
#include "ptl/moments.hpp"
#include "ptl/parallel.hpp"
#include "ptl/simulator.hpp"
#include "ptl/special_fn.hpp"

namespace ptl::cli {

using Json = nlohmann::ordered_json;

namespace {

const std::map<std::string, Command>& command_table() {
  static const std::map<std::string, Command> table{
      {"constants", Command::Constants}, {"q-table", Command::QTable},
      {"simulate", Command::Simulate},   {"moments", Command::Moments},
      {"cycles", Command::Cycles},       {"limit-cdf", Command::LimitCdf},
      {"compare", Command::Compare},     {"pair-structure", Command::PairStructure}};
  return table;
}

// Rows of one artifact. Object: a single JSON object. Array: a JSON array.
// Lines: one JSON object per line.
struct Payload {
  enum class Shape { Object, Array, Lines } shape = Shape::Array;
  std::vector<Json> rows;
};

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ";";
      if (v[i].is_array()) {
        for (std::size_t j = 0; j < v[i].size(); ++j) out += (j ? ":" : "") + csv_cell(v[i][j]);
      } else {
        out += csv_cell(v[i]);
      }
    }
    return out;
  }
  return v.dump();
}

std::string render(const Payload& payload, OutputFormat format) {
  std::ostringstream os;
  if (format == OutputFormat::Csv) {
    if (payload.rows.empty()) return "";
    bool first = true;
    for (const auto& [key, _] : payload.rows.front().items()) {
      os << (first ? "" : ",") << key;
      first = false;
    }
    os << '\n';
    for (const auto& row : payload.rows) {
      first = true;
      for (const auto& [_, value] : row.items()) {
        os << (first ? "" : ",") << csv_cell(value);
        first = false;
      }
      os << '\n';
    }
    return os.str();
  }
  switch (payload.shape) {
    case Payload::Shape::Object:
      os << payload.rows.front().dump() << '\n';
      break;
    case Payload::Shape::Array:
      os << Json(payload.rows).dump() << '\n';
      break;
    case Payload::Shape::Lines:
      for (const auto& row : payload.rows) os << row.dump() << '\n';
      break;
  }
  return os.str();
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

long default_tau_pre(const RunConfig& cfg) {
  if (cfg.m) return *cfg.m;
  return static_cast<long>(std::floor(critical_alpha(cfg.kappa) * cfg.n - cfg.eta * std::log(cfg.n)));
}

// ---------------------------------------------------------------------------

Payload cmd_constants(const RunConfig& cfg) {
  const Constants c = constants(cfg.kappa);
  Json row;
  row["kappa"] = c.kappa;
  row["p"] = c.p;
  row["alpha_c"] = number_or_null(c.alpha_c);
  row["mu2"] = c.mu2;
  row["beta"] = c.beta;
  row["zstar_mean"] = c.zstar_mean;
  row["zstar_var"] = c.zstar_var;
  return {Payload::Shape::Object, {row}};
}

Payload cmd_q_table(const RunConfig& cfg) {
  Payload out;
  for (int i = 0; i < cfg.points; ++i) {
    const double gamma = static_cast<double>(i) / (cfg.points - 1);
    Json row;
    row["gamma"] = gamma;
    row["q"] = pair_prob(gamma, cfg.kappa);
    row["rate"] = rate_function(gamma, cfg.kappa);
    out.rows.push_back(std::move(row));
  }
  return out;
}

struct SimulateResult {
  Payload records;
  std::optional<Payload> histogram;
};

SimulateResult cmd_simulate(const RunConfig& cfg) {
  const auto params = ModelParams::make(cfg.kappa, cfg.n);
  const ThresholdOptions opts{cfg.max_steps};
  const auto records = parallel_trials(cfg.trials, cfg.threads, cfg.master_seed,
                                       [&](std::size_t, std::uint64_t s) { return sample_threshold(params, s, opts); });
  SimulateResult out;
  out.records.shape = Payload::Shape::Lines;
  for (const auto& r : records) {
    Json row;
    row["seed"] = r.seed;
    row["tau"] = r.tau;
    Json trace = Json::array();
    for (const auto& [j, count] : r.survivor_trace) trace.push_back(Json::array({j, count}));
    row["trace"] = std::move(trace);
    row["censored"] = r.censored;
    out.records.rows.push_back(std::move(row));
  }
  if (cfg.histogram_m) {
    const auto hists = parallel_trials(cfg.trials, cfg.threads, cfg.master_seed, [&](std::size_t, std::uint64_t s) {
      return overlap_histogram(solution_set_at(params, *cfg.histogram_m, s)).counts;
    });
    std::map<int, std::uint64_t> total;
    for (const auto& h : hists)
      for (const auto& [overlap, count] : h) total[overlap] += count;
    Payload hist;
    for (const auto& [overlap, count] : total) {
      Json row;
      row["overlap"] = overlap;
      row["count"] = count;
      hist.rows.push_back(std::move(row));
    }
    out.histogram = std::move(hist);
  }
  return out;
}

Json moment_row(const RunConfig& cfg, long m, std::optional<int> t, const std::string& quantity, double formula,
                std::optional<Estimate> mc) {
  Json row;
  row["n"] = cfg.n;
  row["m"] = m;
  row["t"] = t ? Json(*t) : Json(nullptr);
  row["quantity"] = quantity;
  row["formula_value"] = number_or_null(formula);
  row["mc_value"] = mc ? Json(mc->value) : Json(nullptr);
  row["se"] = mc ? Json(mc->se) : Json(nullptr);
  return row;
}

Payload cmd_moments(const RunConfig& cfg) {
  const long m = default_tau_pre(cfg);
  if (m < 0) throw DomainError("row count m must be nonnegative");
  const bool mc = cfg.n <= kMaxDimension;
  Payload out;
  std::optional<SolutionMomentsMc> sol;
  std::optional<ModelParams> params;
  if (mc) {
    params = ModelParams::make(cfg.kappa, cfg.n);
    sol = mc_solution_moments(*params, m, cfg.trials, cfg.master_seed, cfg.threads);
  }
  out.rows.push_back(moment_row(cfg, m, std::nullopt, "first_moment", first_moment(cfg.n, m, cfg.kappa),
                                sol ? std::optional(sol->x) : std::nullopt));
  out.rows.push_back(moment_row(cfg, m, std::nullopt, "second_moment", second_moment(cfg.n, m, cfg.kappa).value,
                                sol ? std::optional(sol->x2) : std::nullopt));
  const std::vector<int> offsets = cfg.t.empty() ? std::vector<int>{cfg.n % 2} : cfg.t;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const int t = offsets[i];
    std::optional<Estimate> est;
    if (mc) est = mc_pair_survival(cfg.n, t, m, cfg.kappa, cfg.trials, split_seed(cfg.master_seed, 100 + i), cfg.threads);
    out.rows.push_back(moment_row(cfg, m, t, "pair_survival", pair_survival(cfg.n, t, m, cfg.kappa), est));
  }
  std::optional<Estimate> nonempty;
  if (mc) nonempty = mc_nonempty(*params, m, cfg.trials, cfg.master_seed, cfg.threads);
  out.rows.push_back(moment_row(cfg, m, std::nullopt, "tail_bound", tail_upper_bound(cfg.n, m, cfg.kappa), nonempty));
  if (cfg.weighted) {
    MomentConfig mcfg;
    mcfg.n = cfg.n;
    mcfg.kappa = cfg.kappa;
    mcfg.tau_pre = m;
    mcfg.order = kMaxCycleOrder;
    mcfg.level = cfg.eta * std::log(cfg.n);
    const auto w = weighted_moment_mc(mcfg, cfg.trials, split_seed(cfg.master_seed, 1), cfg.threads);
    out.rows.push_back(moment_row(cfg, m, std::nullopt, "weighted_ratio1", 1.0, Estimate{w.ratio1, w.se1}));
    out.rows.push_back(moment_row(cfg, m, std::nullopt, "weighted_ratio2", 1.0, Estimate{w.ratio2, w.se2}));
    out.rows.push_back(moment_row(cfg, m, std::nullopt, "weighted_ratio2_sq", 1.0, Estimate{w.ratio2_sq, w.se2_sq}));
  }
  return out;
}

Payload cmd_cycles(const RunConfig& cfg) {
  const int t = cfg.t.empty() ? 0 : cfg.t.front();
  const PlantedKind kind = PlantedKind::parse(cfg.kind, t);
  const long m = cfg.m ? *cfg.m : static_cast<long>(std::floor(critical_alpha(cfg.kappa) * cfg.n));
  const CycleExperiment exp{kind, cfg.n, m, cfg.kappa};
  exp.validate();
  const Eigen::MatrixXd samples = cycle_samples(exp, cfg.k, cfg.trials, cfg.master_seed, cfg.threads);
  const CycleMoments mom = summarize_column(samples, cfg.k);
  const CltDiagnostic clt = clt_diagnostic(samples, kind, beta(cfg.kappa));
  Json row;
  row["kind"] = kind.name();
  row["n"] = cfg.n;
  row["m"] = m;
  row["k"] = cfg.k;
  row["mean"] = mom.mean;
  row["var"] = mom.variance;
  row["se"] = mom.se_mean;
  row["ks"] = clt.ks;
  return {Payload::Shape::Object, {row}};
}

Payload cmd_limit_cdf(const RunConfig& cfg) {
  const LimitLaw law = LimitLaw::from_constants(constants(cfg.kappa));
  Payload out;
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    Json row;
    row["k"] = k;
    row["cdf"] = limit_cdf(law, k);
    out.rows.push_back(std::move(row));
  }
  return out;
}

Payload cmd_compare(const RunConfig& cfg) {
  const auto params = ModelParams::make(cfg.kappa, cfg.n);
  const LimitLaw law = LimitLaw::from_constants(constants(cfg.kappa));
  const ThresholdOptions opts{cfg.max_steps};
  const auto records = parallel_trials(cfg.trials, cfg.threads, cfg.master_seed,
                                       [&](std::size_t, std::uint64_t s) { return sample_threshold(params, s, opts); });
  const EmpiricalCdf emp = empirical_cdf(records, params);
  Json row;
  row["n"] = cfg.n;
  row["kappa"] = cfg.kappa;
  row["T"] = cfg.trials;
  row["ks"] = ks_distance(emp, law);
  row["median_emp"] = emp.median();
  row["median_law"] = static_cast<double>(lattice_quantile(law, emp.shift, 0.5)) - emp.shift;
  row["tail_slope"] = upper_tail_slope(law);
  return {Payload::Shape::Object, {row}};
}

Payload cmd_pair_structure(const RunConfig& cfg) {
  const long m = default_tau_pre(cfg);
  if (m < 0) throw DomainError("row count m must be nonnegative");
  const OverlapSum s = pair_structure_sum(cfg.n, m, cfg.kappa);
  std::optional<Estimate> est;
  if (cfg.n <= kMaxDimension)
    est = mc_forbidden_pairs(ModelParams::make(cfg.kappa, cfg.n), m, cfg.trials, cfg.master_seed, cfg.threads);
  Json row;
  row["n"] = cfg.n;
  row["m"] = m;
  row["band_lower"] = forbidden_band_lower(cfg.n);
  row["formula_value"] = s.value;
  row["reference_bound"] = pair_structure_reference(cfg.n);
  row["empty_band"] = s.empty_band;
  row["approximate"] = s.approximate;
  row["mc_value"] = est ? Json(est->value) : Json(nullptr);
  row["se"] = est ? Json(est->se) : Json(nullptr);
  return {Payload::Shape::Object, {row}};
}

void write_atomic(const std::vector<std::pair<std::string, std::string>>& files) {
  namespace fs = std::filesystem;
  std::vector<fs::path> temps;
  try {
    for (const auto& [path, text] : files) {
      fs::path tmp = path;
      tmp += ".tmp";
      temps.push_back(tmp);
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      f << text;
      f.close();
      if (!f) throw std::runtime_error("cannot write " + tmp.string());
    }
    for (std::size_t i = 0; i < files.size(); ++i) fs::rename(temps[i], files[i].first);
  } catch (...) {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
    throw;
  }
}

}  // namespace

Command parse_command(const std::string& name) {
  const auto it = command_table().find(name);
  if (it == command_table().end()) throw DomainError("unknown command '" + name + "'");
  return it->second;
}

std::string command_name(Command c) {
  for (const auto& [name, value] : command_table())
    if (value == c) return name;
  return "?";
}

void RunConfig::validate() const {
  if (trials < 1) throw DomainError("--trials must be at least 1");
  if (threads < 1) throw DomainError("--threads must be at least 1");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("--kappa must be positive and finite");
  if (n < 2) throw DomainError("--n must be at least 2");
  if (!(eta > 0.0)) throw DomainError("--eta must be positive");
  if (m && *m < 0) throw DomainError("--m must be nonnegative");
  if (k < 1 || k > kMaxCycleOrder) throw DomainError("--k must lie in [1, 3]");
  if (k_min > k_max) throw DomainError("--k-min must not exceed --k-max");
  if (points < 2) throw DomainError("--points must be at least 2");
  if (max_steps < 1) throw DomainError("--max-steps must be at least 1");
  if (histogram_m.has_value() != !histogram_path.empty())
    throw DomainError("--histogram-m and --histogram go together");
  if (command == Command::Simulate || command == Command::Compare) (void)ModelParams::make(kappa, n);
  if (command == Command::Compare && trials < kMinEmpiricalRecords)
    throw SampleSizeError("compare needs --trials >= " + std::to_string(kMinEmpiricalRecords));
}

std::string execute(const RunConfig& cfg) {
  cfg.validate();
  switch (cfg.command) {
    case Command::Constants: return render(cmd_constants(cfg), cfg.format);
    case Command::QTable: return render(cmd_q_table(cfg), cfg.format);
    case Command::Simulate: return render(cmd_simulate(cfg).records, cfg.format);
    case Command::Moments: return render(cmd_moments(cfg), cfg.format);
    case Command::Cycles: return render(cmd_cycles(cfg), cfg.format);
    case Command::LimitCdf: return render(cmd_limit_cdf(cfg), cfg.format);
    case Command::Compare: return render(cmd_compare(cfg), cfg.format);
    case Command::PairStructure: return render(cmd_pair_structure(cfg), cfg.format);
  }
  return {};
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    std::vector<std::pair<std::string, std::string>> files;
    if (cfg.command == Command::Simulate) {
      cfg.validate();
      auto result = cmd_simulate(cfg);
      files.emplace_back(cfg.output_path, render(result.records, cfg.format));
      if (result.histogram) files.emplace_back(cfg.histogram_path, render(*result.histogram, OutputFormat::Csv));
    } else {
      files.emplace_back(cfg.output_path, execute(cfg));
    }
    if (cfg.output_path.empty()) {
      out << files.front().second;
      files.erase(files.begin());
    }
    write_atomic(files);
    return 0;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalInstability& e) {
    err << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 2;
  }
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.threads = std::max(1u, std::thread::hardware_concurrency());
  std::string command;
  std::string format = "json";

  CLI::App app{"Threshold experiments for the symmetric binary perceptron"};
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  std::vector<std::string> names;
  for (const auto& [name, _] : command_table()) names.push_back(name);
  app.add_option("command", command, "constants | q-table | simulate | moments | cycles | limit-cdf | compare | pair-structure")
      ->required()
      ->check(CLI::IsMember(names));
  app.add_option("--kappa", cfg.kappa, "margin");
  app.add_option("--n", cfg.n, "dimension");
  app.add_option("--m,--tau-pre", cfg.m, "number of constraint rows");
  app.add_option("--eta", cfg.eta, "tau_pre = floor(alpha_c n - eta log n) when --m is absent");
  app.add_option("--trials", cfg.trials, "Monte Carlo trials");
  app.add_option("--seed", cfg.master_seed, "master seed");
  app.add_option("--threads", cfg.threads, "worker threads")->envname("PTL_THREADS");
  app.add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out,-o", cfg.output_path, "output file (default stdout)");
  app.add_option("--kind", cfg.kind, "cycles: null | single | pair");
  app.add_option("--t", cfg.t, "pair offsets t (comma separated)")->delimiter(',');
  app.add_option("--k", cfg.k, "cycle order");
  app.add_option("--k-min", cfg.k_min, "limit-cdf grid start");
  app.add_option("--k-max", cfg.k_max, "limit-cdf grid end");
  app.add_option("--points", cfg.points, "q-table grid size");
  app.add_option("--max-steps", cfg.max_steps, "row cap per threshold sample");
  app.add_option("--histogram-m", cfg.histogram_m, "simulate: overlap histogram of S^m");
  app.add_option("--histogram", cfg.histogram_path, "simulate: histogram CSV path");
  app.add_flag("--weighted", cfg.weighted, "moments: add weighted ratio rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  cfg.command = parse_command(command);
  cfg.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
  return run(cfg, out, err);
}

}  // namespace ptl::cli
