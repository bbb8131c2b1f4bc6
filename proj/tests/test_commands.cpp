#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bpperm/commands.hpp"
#include "bpperm/homogeneous.hpp"
#include "bpperm/matrix_io.hpp"
#include "bpperm/serialize.hpp"

namespace bpperm {
namespace {

namespace fs = std::filesystem;

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "bpperm_cmd_tests";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const auto path = temp_path(name);
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "bpperm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

TEST(Estimate, TwoByTwoOnes) {
  std::string out;
  ASSERT_EQ(run({"estimate", write_file("ones2.csv", "1,1\n1,1\n").string()}, &out), kExitOk);
  const auto j = nlohmann::json::parse(out);
  EXPECT_EQ(j.at("n"), 2);
  EXPECT_TRUE(j.at("converged").get<bool>());
  EXPECT_TRUE(j.at("interior").get<bool>());
  EXPECT_NEAR(j.at("log_z_bp").get<double>(), 0.0, 1e-14);
  EXPECT_NEAR(j.at("log_perm_bp").get<double>(), std::log(2.0), 1e-14);
  EXPECT_NEAR(j.at("log_perm_exact").get<double>(), std::log(2.0), 1e-14);
  EXPECT_TRUE(j.contains("bounds"));
  EXPECT_TRUE(j.contains("residuals"));
  EXPECT_TRUE(j.contains("iterations"));
  EXPECT_FALSE(j.contains("t_critical"));
}

TEST(Estimate, SaturatedBelowCritical) {
  const auto path = write_file("h10.csv", to_csv(homogeneous_instance(10, 2.0).raw()));
  std::string out;
  ASSERT_EQ(run({"--with-tc", "estimate", path.string(), "-T", "0.2"}, &out), kExitOk);
  const auto j = nlohmann::json::parse(out);
  EXPECT_FALSE(j.at("interior").get<bool>());
  EXPECT_TRUE(j.at("saturated").get<bool>());
  EXPECT_TRUE(j.contains("note"));
  EXPECT_NEAR(j.at("t_critical").get<double>(), std::log(2.0) / std::log(9.0), 1e-9);
  EXPECT_EQ(j.at("temperature"), 0.2);
}

TEST(Estimate, JsonInputAndCap) {
  const auto path = write_file("m.json", R"({"temperature": 2, "p": [[2,1,1],[1,2,1],[1,1,2]]})");
  std::string out;
  ASSERT_EQ(run({"--exact-cap", "2", "estimate", path.string()}, &out), kExitOk);
  const auto j = nlohmann::json::parse(out);
  EXPECT_EQ(j.at("temperature"), 2.0);
  EXPECT_FALSE(j.contains("log_perm_exact"));
  EXPECT_TRUE(j.at("log_z_ls").is_null());
}

TEST(Estimate, InputErrors) {
  std::string err;
  EXPECT_EQ(run({"estimate", write_file("bad.csv", "1,2\n3,abc\n").string()}, nullptr, &err), kExitInputError);
  EXPECT_NE(err.find("error"), std::string::npos);
  EXPECT_EQ(run({"estimate", write_file("neg.csv", "1,-3\n1,1\n").string()}), kExitInputError);
  EXPECT_EQ(run({"estimate", temp_path("missing.csv").string()}), kExitInputError);
  EXPECT_EQ(run({"estimate", write_file("ones.csv", "1,1\n1,1\n").string(), "-T", "-1"}), kExitInputError);
  EXPECT_EQ(run({"estimate", write_file("zero.csv", "1,0\n1,1\n").string()}), kExitInputError);
  EXPECT_EQ(run({"bogus"}), kExitInputError);
  EXPECT_EQ(run({}), kExitInputError);
}

TEST(Estimate, NonConvergenceExitCode) {
  const auto path = write_file("r5.csv", "0.3,0.9,0.2,0.5,0.7\n0.8,0.1,0.4,0.6,0.9\n0.5,0.5,0.9,0.2,0.3\n"
                                         "0.1,0.7,0.6,0.9,0.4\n0.6,0.3,0.2,0.4,0.8\n");
  std::string out;
  ASSERT_EQ(run({"--max-iter", "2", "estimate", path.string()}, &out), kExitNotConverged);
  const auto j = nlohmann::json::parse(out);
  EXPECT_FALSE(j.at("converged").get<bool>());
}

TEST(Estimate, ConfigFile) {
  const auto cfg = write_file("cfg.json", R"({"solver": {"max_iterations": 2}})");
  const auto path = write_file("h6.csv", to_csv(homogeneous_instance(6, 3.0).raw()));
  EXPECT_EQ(run({"--config", cfg.string(), "estimate", path.string()}), kExitNotConverged);
  EXPECT_EQ(run({"--config", write_file("bad_cfg.json", "{").string(), "estimate", path.string()}),
            kExitInputError);
  SolverOptions opts;
  apply_solver_config(nlohmann::json::parse(R"({"tolerance": 1e-8, "seed": 4, "damping": 0.25})"), opts);
  EXPECT_EQ(opts.tolerance, 1e-8);
  EXPECT_EQ(opts.seed, 4u);
  EXPECT_EQ(opts.damping, 0.25);
  EXPECT_THROW(apply_solver_config(nlohmann::json::parse(R"({"tolerance": "x"})"), opts), ParseError);
}

TEST(Sweep, Temperatures) {
  const auto ts = sweep_temperatures(0.32, 3.0, 50);
  ASSERT_EQ(ts.size(), 50u);
  EXPECT_EQ(ts.front(), 0.32);
  EXPECT_EQ(ts.back(), 3.0);
  EXPECT_TRUE(std::is_sorted(ts.begin(), ts.end()));
  EXPECT_THROW(sweep_temperatures(0.0, 1.0, 5), DomainError);
  EXPECT_THROW(sweep_temperatures(0.5, 1.0, 1), DomainError);
}

TEST(Sweep, HomogeneousCsv) {
  const auto out = temp_path("sweep.csv");
  ASSERT_EQ(run({"sweep", "--n", "10", "--w", "2", "--t-min", "0.2", "--t-max", "3", "--steps", "15", "--out",
                 out.string()}),
            kExitOk);
  const auto lines = lines_of(read_file(out));
  ASSERT_EQ(lines.size(), 16u);
  EXPECT_EQ(lines[0], kSweepHeader);
  const double tc = std::log(2.0) / std::log(9.0);
  double previous = 0.0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto cells = split(lines[k]);
    ASSERT_EQ(cells.size(), 8u) << lines[k];
    const double t = std::stod(cells[0]);
    EXPECT_GT(t, previous);
    previous = t;
    const double t_ln_z = std::stod(cells[1]);
    const double t_ln_z_bp = std::stod(cells[2]);
    EXPECT_GE(t_ln_z, t_ln_z_bp - 1e-9);
    if (t < tc) {
      EXPECT_EQ(cells[7], "false");
      EXPECT_TRUE(cells[4].empty() && cells[5].empty() && cells[6].empty());
    } else {
      EXPECT_EQ(cells[7], "true");
      const double ratio = std::stod(cells[3]);
      EXPECT_LE(std::stod(cells[4]), ratio + 1e-9);
      EXPECT_LE(std::stod(cells[5]), ratio + 1e-9);
      EXPECT_LE(ratio, std::stod(cells[6]) + 1e-9);
    }
  }
}

TEST(Sweep, ResumeKeepsPrefixAndMatchesFreshRun) {
  const auto fresh = temp_path("fresh.csv");
  const auto resumed = temp_path("resumed.csv");
  SweepRequest req;
  req.n = 6;
  req.big_w = 3.0;
  req.t_min = 0.5;
  req.t_max = 2.0;
  req.steps = 8;
  req.out = fresh;
  std::ostringstream err;
  ASSERT_EQ(cmd_sweep(req, {}, err), kExitOk);
  const auto full = read_file(fresh);
  auto lines = lines_of(full);
  // Truncated file with a sentinel in a kept row proves the rows are reused.
  std::string partial = lines[0] + "\n" + lines[1] + "\n" + lines[2] + "\n";
  std::ofstream(resumed, std::ios::binary) << partial;
  req.out = resumed;
  req.resume = true;
  ASSERT_EQ(cmd_sweep(req, {}, err), kExitOk);
  EXPECT_EQ(read_file(resumed), full);
}

TEST(Sweep, FileFamilyAndErrors) {
  const auto m = write_file("sweep_m.csv", "2,1,1\n1,3,1\n1,1,2\n");
  const auto out = temp_path("file_sweep.csv");
  ASSERT_EQ(run({"sweep", "--family", "file", "--matrix", m.string(), "--t-min", "0.5", "--t-max", "2", "--steps",
                 "4", "--out", out.string()}),
            kExitOk);
  EXPECT_EQ(lines_of(read_file(out)).size(), 5u);
  EXPECT_EQ(run({"sweep", "--out", "/nonexistent_dir/x.csv", "--steps", "2"}), kExitInputError);
  EXPECT_EQ(run({"sweep", "--family", "nope", "--out", out.string()}), kExitInputError);
  EXPECT_EQ(run({"sweep", "--steps", "1", "--out", out.string()}), kExitInputError);
}

TEST(Sweep, WorkerCountDoesNotChangeBytes) {
  SweepRequest req;
  req.steps = 12;
  req.t_min = 0.3;
  req.t_max = 2.5;
  RunOptions one, four;
  four.workers = 4;
  std::ostringstream err;
  req.out = temp_path("w1.csv");
  ASSERT_EQ(cmd_sweep(req, one, err), kExitOk);
  req.out = temp_path("w4.csv");
  ASSERT_EQ(cmd_sweep(req, four, err), kExitOk);
  EXPECT_EQ(read_file(temp_path("w1.csv")), read_file(temp_path("w4.csv")));
}

TEST(Verify, PassesOnDefaultSuite) {
  std::string out;
  EXPECT_EQ(run({"--seed", "7", "verify", "--n-max", "5", "--trials", "20", "--repro",
                 temp_path("repro_ok.json").string()},
                &out),
            kExitOk);
  EXPECT_NE(out.find("result: PASS"), std::string::npos);
  EXPECT_NE(out.find("master_identity: 20/20 passed"), std::string::npos);
}

TEST(Verify, VacuousPass) {
  std::string out;
  EXPECT_EQ(run({"verify", "--trials", "0"}, &out), kExitOk);
  EXPECT_NE(out.find("result: PASS"), std::string::npos);
}

TEST(Verify, InjectedFaultWritesReproduction) {
  const auto repro = temp_path("repro_fail.json");
  fs::remove(repro);
  std::string out;
  EXPECT_EQ(run({"--tolerance", "1e-30", "--max-iter", "50", "--seed", "7", "verify", "--n-max", "4", "--trials",
                 "3", "--repro", repro.string()},
                &out),
            kExitVerifyFailed);
  EXPECT_NE(out.find("result: FAIL"), std::string::npos);
  const auto dump = nlohmann::json::parse(read_file(repro));
  ASSERT_EQ(dump.size(), 3u);
  EXPECT_EQ(dump[0].at("seed"), 7);
  EXPECT_TRUE(dump[0].contains("p"));
  // The dumped matrix is the instance verify generated.
  const auto w = verify_instance(7, dump[0].at("trial").get<std::uint64_t>(), 4);
  EXPECT_EQ(dump[0].at("p")[0][0].get<double>(), w.raw()(0, 0));
}

TEST(Verify, InstanceShape) {
  for (std::uint64_t k = 0; k < 100; ++k) {
    const auto w = verify_instance(1, k, 7);
    EXPECT_GE(w.n(), 3u);
    EXPECT_LE(w.n(), 7u);
    for (double x : w.raw().values()) {
      EXPECT_GE(x, 0.1);
      EXPECT_LT(x, 1.0);
    }
  }
  EXPECT_EQ(run({"verify", "--n-max", "8"}), kExitInputError);
}

TEST(Verify, Deterministic) {
  VerifyRequest req;
  req.trials = 8;
  req.n_max = 6;
  RunOptions a, b;
  a.solver.seed = b.solver.seed = 11;
  b.workers = 4;
  std::ostringstream out_a, out_b, err;
  EXPECT_EQ(cmd_verify(req, a, out_a, err), kExitOk);
  EXPECT_EQ(cmd_verify(req, b, out_b, err), kExitOk);
  EXPECT_EQ(out_a.str(), out_b.str());
}

}  // namespace
}  // namespace bpperm
