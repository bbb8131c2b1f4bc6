#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bpperm/bethe.hpp"
#include "bpperm/matrix_io.hpp"
#include "bpperm/permanent.hpp"

namespace bpperm {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitInputError = 2,
  kExitNotConverged = 3,
};

struct RunOptions {
  SolverOptions solver;
  std::size_t exact_cap = kDefaultExactCap;
  bool with_tc = false;
  unsigned workers = 1;
};

// ---- estimate ----

struct EstimateRequest {
  std::filesystem::path matrix;
  std::optional<MatrixFormat> format;
  std::optional<double> temperature;  // overrides the file's temperature
};

// Full single-instance report. Sets `exit_code` to kExitNotConverged when
// the solver ran out of iterations.
nlohmann::json estimate_report(const WeightMatrix& w, const RunOptions& opts, int& exit_code);

int cmd_estimate(const EstimateRequest& req, const RunOptions& opts, std::ostream& out, std::ostream& err);

// ---- sweep ----

struct SweepRow {
  double temperature = 0.0;
  std::optional<double> t_ln_z_exact;
  double t_ln_z_bp = 0.0;
  std::optional<double> log_ratio_exact;
  std::optional<double> log_lb_capacity;
  std::optional<double> log_lb_beliefs;  // kept in memory, not written to CSV
  std::optional<double> log_lb_matching;
  std::optional<double> log_ub_hadamard;
  bool interior = false;  // converged to an interior fixed point
};

inline constexpr const char* kSweepHeader =
    "temperature,t_ln_z_exact,t_ln_z_bp,log_ratio_exact,log_lb_capacity,log_lb_matching,log_ub_hadamard,"
    "interior";

struct SweepRequest {
  std::string family = "homogeneous";  // or "file"
  std::size_t n = 10;
  double big_w = 2.0;
  std::filesystem::path matrix;
  double t_min = 0.32;
  double t_max = 3.0;
  std::size_t steps = 50;
  std::filesystem::path out = "sweep.csv";
  bool resume = false;
};

// Evenly spaced, both ends included.
std::vector<double> sweep_temperatures(double t_min, double t_max, std::size_t steps);

// Rows for the requested temperatures, evaluated on `opts.workers` threads
// and returned in input order.
std::vector<SweepRow> sweep_rows(const SweepRequest& req, const std::vector<double>& temperatures,
                                 const RunOptions& opts);

// One CSV line with 17 significant digits, empty fields for absent values.
std::string format_sweep_row(const SweepRow& row);

int cmd_sweep(const SweepRequest& req, const RunOptions& opts, std::ostream& err);

// ---- verify ----

struct VerifyRequest {
  std::size_t n_max = 5;
  std::uint64_t trials = 20;
  std::filesystem::path repro = "verify_failure.json";
};

int cmd_verify(const VerifyRequest& req, const RunOptions& opts, std::ostream& out, std::ostream& err);

// Random positive matrix used by verify for a given trial: order in
// [3, n_max], entries uniform in [0.1, 1], T = 1.
WeightMatrix verify_instance(std::uint64_t seed, std::uint64_t trial, std::size_t n_max);

// ---- entry point ----

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bpperm
