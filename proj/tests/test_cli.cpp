#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dflow/cli.hpp"
#include "dflow/json_io.hpp"
#include "dflow/reference.hpp"

using namespace dflow;
using io::json;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("dflow_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string write_series(const std::string& name, const Series& f) { return write(name, io::series_to_json(f).dump()); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }
  json read(const std::string& rel) { return io::read_json_file(dir_ / rel); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(Cli, FlowOfExampleGenerator) {
  const auto in = write_series("h.json", reference::example_generator(32));
  ASSERT_EQ(run({"flow", "--input", in, "--out", (dir_ / "o").string(), "--t-end", "1", "--dt", "1e-3"}), 0) << err_.str();
  const json s = read("o/flow_summary.json");
  const cplx phi1 = io::complex_from_json(s["samples"][0]["phi_t"]);
  EXPECT_LE(std::abs(phi1 - std::log2(5.0)), reference::example_flow_tail_bound(1.0, 1.0, 32) + 1e-8);
  EXPECT_NEAR(std::abs(phi1 - reference::example_flow_prefix(1.0, 1.0, 32)), 0.0, 1e-8);
  EXPECT_EQ(s["a1_pinning_residual"].get<double>() <= 1e-12, true);
  EXPECT_GT(s["dropped_tail"].get<double>(), 0.0);
  EXPECT_EQ(s["seed"], 20240611);

  std::ifstream trace(dir_ / "o" / "flow_trace.csv");
  std::string line;
  std::getline(trace, line);
  EXPECT_EQ(line, "# seed=20240611");
  std::getline(trace, line);
  EXPECT_EQ(line, "t,n,re_a,im_a");
  std::size_t rows = 0;
  while (std::getline(trace, line)) ++rows;
  EXPECT_EQ(rows, 1001u * 32u);
}

TEST_F(Cli, FlowOfVerticalTranslation) {
  const auto in = write_series("h.json", Series::constant(4, {0.0, 1.0}));
  ASSERT_EQ(run({"flow", "--input", in, "--out", dir_.string(), "--t-end", "2", "--dt", "0.5"}), 0) << err_.str();
  const json s = read("flow_summary.json");
  const Series a = io::series_from_json(s["final_state"]);
  EXPECT_EQ(a, Series::constant(4, {0.0, 2.0}));
}

TEST_F(Cli, MalformedJsonIsAnInputError) {
  const auto in = write("bad.json", "{\n  \"truncation\": 2,\n  \"coeffs\": [[1,0] [0,0]]\n}\n");
  EXPECT_EQ(run({"flow", "--input", in, "--out", dir_.string()}), 2);
  EXPECT_NE(err_.str().find("line 3"), std::string::npos) << err_.str();

  const auto short_in = write("short.json", R"({"truncation": 3, "coeffs": [[1,0]]})");
  EXPECT_EQ(run({"koenigs", "--input", short_in, "--out", dir_.string()}), 2);
}

TEST_F(Cli, BadArguments) {
  const auto in = write_series("h.json", reference::example_generator(8));
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"nope"}), 2);
  EXPECT_EQ(run({"flow", "--input", in, "--bogus"}), 2);
  EXPECT_EQ(run({"flow", "--input", in, "--dt", "-1", "--out", dir_.string()}), 2);
  EXPECT_EQ(run({"flow", "--input", in, "--dt", "abc"}), 2);
  EXPECT_EQ(run({"flow", "--out", dir_.string()}), 2);
  EXPECT_EQ(run({"flow", "--input", (dir_ / "missing.json").string(), "--out", dir_.string()}), 2);
  EXPECT_EQ(run({"flow", "--input", in, "--out", in}), 2);
  EXPECT_EQ(run({"flow", "--input", write_series("neg.json", Series::constant(4, -1.0)), "--out", dir_.string()}), 2);
  EXPECT_EQ(run({"--help"}), 0);
}

TEST_F(Cli, ConfigFileWithOverrides) {
  const auto in = write_series("h.json", reference::example_generator(8));
  json cfg = {{"input", in}, {"out", (dir_ / "cfg").string()}, {"dt", 0.1}, {"t_end", 0.5}, {"seed", 7}};
  const auto cfg_path = write("cfg.json", cfg.dump());
  ASSERT_EQ(run({"flow", "--config", cfg_path, "--t-end", "0.3"}), 0) << err_.str();
  const json s = read("cfg/flow_summary.json");
  EXPECT_DOUBLE_EQ(s["t_end"].get<double>(), 0.3);
  EXPECT_EQ(s["seed"], 7);
  EXPECT_DOUBLE_EQ(s["dt"].get<double>(), 0.1);

  const auto bad_cfg = write("bad_cfg.json", R"({"dt": "fast"})");
  EXPECT_EQ(run({"flow", "--config", bad_cfg, "--input", in}), 2);
}

TEST_F(Cli, Reproducible) {
  const auto in = write_series("h.json", reference::example_generator(16));
  ASSERT_EQ(run({"flow", "--input", in, "--out", (dir_ / "a").string(), "--t-end", "0.5", "--dt", "0.01"}), 0);
  ASSERT_EQ(run({"flow", "--input", in, "--out", (dir_ / "b").string(), "--t-end", "0.5", "--dt", "0.01"}), 0);
  for (const char* f : {"flow_trace.csv", "flow_summary.json"}) EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f));

  ASSERT_EQ(run({"verify", "--filter", "dirichlet", "--out", (dir_ / "a").string()}), 0);
  ASSERT_EQ(run({"verify", "--filter", "dirichlet", "--out", (dir_ / "b").string()}), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "verify_report.json"), slurp(dir_ / "b" / "verify_report.json"));
}

TEST_F(Cli, KoenigsOfExampleGenerator) {
  const auto in = write_series("h.json", reference::example_generator(32));
  ASSERT_EQ(run({"koenigs", "--input", in, "--out", dir_.string()}), 0) << err_.str();
  const json r = read("koenigs.json");
  const KoenigsFunction k = io::koenigs_from_json(r["koenigs"]);
  EXPECT_EQ(k.d1, cplx(1.0));
  for (int j = 1; j <= 5; ++j) EXPECT_EQ(k.tail[(std::size_t{1} << j) - 2], cplx(j % 2 == 0 ? 1.0 : -1.0));
  EXPECT_EQ(r["classification"], "ZERO_HYPERBOLIC_STEP");
  EXPECT_LE(r["abel"]["max_algebraic_residual"].get<double>(), 1e-7);

  EXPECT_EQ(run({"koenigs", "--input", in, "--out", dir_.string(), "--tolerance", "1e-30"}), 1);
  EXPECT_FALSE(read("koenigs.json")["abel"]["passed"].get<bool>());
}

TEST_F(Cli, KoenigsClassificationAndInversionFailure) {
  const auto rot = write_series("rot.json", Series::constant(4, {0.0, 1.0}));
  ASSERT_EQ(run({"koenigs", "--input", rot, "--out", dir_.string()}), 0) << err_.str();
  EXPECT_EQ(read("koenigs.json")["classification"], "AUTOMORPHIC_GROUP");

  const auto zero = write_series("zero.json", Series(4));
  EXPECT_EQ(run({"koenigs", "--input", zero, "--out", dir_.string()}), 1);
  EXPECT_NE(err_.str().find("b_1"), std::string::npos) << err_.str();
}

TEST_F(Cli, MatrixExamples) {
  const auto id = write("id.json", io::symbol_to_json(Symbol::identity(6)).dump());
  ASSERT_EQ(run({"matrix", "--input", id, "--out", dir_.string()}), 0) << err_.str();
  std::ifstream csv(dir_ / "matrix.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "# seed=20240611");
  std::getline(csv, line);
  EXPECT_EQ(line, "row,col,re,im");
  while (std::getline(csv, line)) {
    std::size_t r, c;
    double re, im;
    ASSERT_EQ(std::sscanf(line.c_str(), "%zu,%zu,%lf,%lf", &r, &c, &re, &im), 4);
    EXPECT_EQ(re, r == c ? 1.0 : 0.0);
    EXPECT_EQ(im, 0.0);
  }
  EXPECT_EQ(read("matrix_summary.json")["dimension"], 6);

  const auto tr = write("tr.json", io::symbol_to_json(Symbol::translation(6, 1.0)).dump());
  ASSERT_EQ(run({"matrix", "--input", tr, "--out", dir_.string()}), 0);
  std::ifstream csv2(dir_ / "matrix.csv");
  std::getline(csv2, line);
  std::getline(csv2, line);
  while (std::getline(csv2, line)) {
    std::size_t r, c;
    double re, im;
    ASSERT_EQ(std::sscanf(line.c_str(), "%zu,%zu,%lf,%lf", &r, &c, &re, &im), 4);
    EXPECT_NEAR(re, r == c ? 1.0 / double(r) : 0.0, 1e-15);
  }
  EXPECT_NEAR(read("matrix_summary.json")["norm_estimate"].get<double>(), 1.0, 1e-10);

  const auto gen = write_series("h.json", reference::example_generator(32));
  ASSERT_EQ(run({"matrix", "--input", gen, "--out", dir_.string(), "--t-end", "0.5"}), 0) << err_.str();
  const json s = read("matrix_summary.json");
  EXPECT_LE(s["norm_estimate"].get<double>(), 1.0 + 1e-9);
  EXPECT_EQ(s["source"], "flow");
}

TEST_F(Cli, VerifyFilterAndTightTolerance) {
  ASSERT_EQ(run({"verify", "--filter", "koenigs", "--out", dir_.string()}), 0) << out_.str();
  const json r = read("verify_report.json");
  ASSERT_EQ(r["criteria"].size(), 2u);
  for (const auto& c : r["criteria"]) EXPECT_EQ(c["section"], "koenigs");
  EXPECT_TRUE(r["all_passed"].get<bool>());

  EXPECT_EQ(run({"verify", "--tolerance", "1e-15", "--out", dir_.string()}), 1);
  const json tight = read("verify_report.json");
  EXPECT_FALSE(tight["all_passed"].get<bool>());
  EXPECT_NE(out_.str().find("[FAIL]"), std::string::npos);
  EXPECT_NE(out_.str().find("[PASS]"), std::string::npos);

  EXPECT_EQ(run({"verify", "--filter", "no-such-section", "--out", dir_.string()}), 1);
}

TEST_F(Cli, BinaryExitCodes) {
  const std::string bin = DFLOW_CLI_PATH;
  const std::string out = " --out " + dir_.string() + " >/dev/null 2>&1";
  auto code = [](int status) { return WIFEXITED(status) ? WEXITSTATUS(status) : -1; };
  EXPECT_EQ(code(std::system((bin + " verify --filter dirichlet" + out).c_str())), 0);
  EXPECT_EQ(code(std::system((bin + " verify --filter dirichlet --tolerance 1e-30" + out).c_str())), 1);
  EXPECT_EQ(code(std::system((bin + " flow --input " + write("x.json", "{") + out).c_str())), 2);
}
