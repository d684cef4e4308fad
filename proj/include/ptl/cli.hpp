#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ptl::cli {

enum class Command { Constants, QTable, Simulate, Moments, Cycles, LimitCdf, Compare, PairStructure };
enum class OutputFormat { Json, Csv };

Command parse_command(const std::string& name);
std::string command_name(Command c);

struct RunConfig {
  Command command = Command::Constants;
  double kappa = 1.0;
  int n = 20;
  std::optional<long> m;        ///< rows; commands fall back to their own default
  double eta = 0.5;             ///< tau_pre = floor(alpha_c n - eta log n)
  std::size_t trials = 1000;
  std::uint64_t master_seed = 1;
  unsigned threads = 1;
  OutputFormat format = OutputFormat::Json;
  std::string output_path;      ///< empty: stdout

  // command-specific
  std::string kind = "null";    ///< cycles: null | single | pair
  std::vector<int> t;           ///< cycles: pair offset (first entry); moments: pair-survival offsets
  int k = 1;                    ///< cycles: order
  int k_min = -20;              ///< limit-cdf grid
  int k_max = 20;
  int points = 101;             ///< q-table grid size
  long max_steps = 10000;       ///< simulate / compare step cap
  std::optional<long> histogram_m;  ///< simulate: overlap histogram at S^m
  std::string histogram_path;
  bool weighted = false;        ///< moments: add weighted ratio rows

  void validate() const;
};

/// Runs the command and returns its payload text. Throws on error.
std::string execute(const RunConfig& cfg);

/// execute() plus atomic output and exit-code mapping:
/// 0 success, 1 validation or domain error, 2 numerical or other failure.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv (CLI flags > config file > PTL_THREADS > defaults) and runs.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ptl::cli
