#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "app/config.hpp"
#include "app/run.hpp"

using namespace jacobi;
using namespace jacobi::app;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = JACOBI_CONFIG_DIR;

RunConfig load(const std::string& name) {
  std::ifstream f(kConfigs / name);
  std::vector<std::string> diags;
  RunConfig c = parse_config(Json::parse(f), diags);
  EXPECT_TRUE(diags.empty()) << diags.front();
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool mentions(const std::vector<std::string>& diags, const std::string& needle) {
  for (const auto& d : diags)
    if (d.find(needle) != std::string::npos) return true;
  return false;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("jacobi_cli_" + name);
  fs::remove_all(p);
  return p;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name + "_cfg");
  fs::create_directories(p);
  std::ofstream(p / "config.json") << text;
  return p / "config.json";
}

}  // namespace

TEST(Config, RoundTripsBitExactly) {
  for (const char* name : {"oscillator.json", "quartic.json", "metric.json", "custom.json",
                           "lderiv.json"}) {
    const RunConfig c = load(name);
    const std::string once = to_json(c).dump();
    std::vector<std::string> diags;
    const RunConfig back = parse_config(Json::parse(once), diags);
    EXPECT_TRUE(diags.empty());
    EXPECT_EQ(to_json(back).dump(), once) << name;
    EXPECT_EQ(config_hash(back), config_hash(c));
  }
  RunConfig c = load("quartic.json");
  c.horizon = 0.1 + 0.2;  // not representable in short decimal form
  c.initial = Vec::Constant(4, 1.0 / 3.0);
  std::vector<std::string> diags;
  const RunConfig back = parse_config(Json::parse(to_json(c).dump()), diags);
  EXPECT_EQ(back.horizon, c.horizon);
  EXPECT_EQ(*back.initial, *c.initial);
}

TEST(Config, ValidateDiagnostics) {
  RunConfig c = load("oscillator.json");
  EXPECT_TRUE(validate(c, "flow").empty());
  c.step = 0.0;
  EXPECT_TRUE(mentions(validate(c), "step must be positive"));
  c.step = -1.0;
  EXPECT_TRUE(mentions(validate(c), "step must be positive"));

  RunConfig m = load("metric.json");
  EXPECT_TRUE(validate(m, "curvature").empty());
  m.system.metric[0](0, 1) = 0.5;
  EXPECT_TRUE(mentions(validate(m), "not symmetric"));

  const RunConfig one = load("oscillator.json");
  EXPECT_TRUE(mentions(validate(one, "reduce"), "quotient"));
  EXPECT_TRUE(validate(one, "conjugate").empty());

  RunConfig t = load("oscillator.json");
  t.tolerances.rank_tol = 0;
  t.horizon = -1;
  t.initial = Vec::Zero(3);
  const auto d = validate(t, "nonsense");
  EXPECT_TRUE(mentions(d, "rank_tol must be positive"));
  EXPECT_TRUE(mentions(d, "horizon must be positive"));
  EXPECT_TRUE(mentions(d, "2n = 2 entries"));
  EXPECT_TRUE(mentions(d, "unknown command"));
  EXPECT_TRUE(mentions(validate(load("oscillator.json"), "lderiv"), "options.lderiv"));
}

TEST(Config, SchemaErrorsAreCollected) {
  std::vector<std::string> diags;
  parse_config(Json::parse(R"({"system": {"family": 3, "n": "two"}, "horizon": "x", "bogus": 1})"),
               diags);
  EXPECT_EQ(diags.size(), 4u);
  EXPECT_TRUE(mentions(diags, "system.family"));
  EXPECT_TRUE(mentions(diags, "bogus: unknown key"));
}

TEST(Config, SeedDrawsInitialPoint) {
  RunConfig c = load("quartic.json");
  c.initial.reset();
  const Vec a = initial_point(c);
  EXPECT_EQ(a, initial_point(c));
  c.seed += 1;
  EXPECT_NE(a, initial_point(c));
  EXPECT_LE(a.cwiseAbs().maxCoeff(), 0.5);
}

TEST(Run, CurvatureOfOscillatorIsOne) {
  const RunResult r = run(load("oscillator.json"), "curvature");
  EXPECT_NEAR(r.scalars["eigenvalues_at_0"][0].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(r.scalars["curve_eigenvalues_at_0"][0].get<double>(), 1.0, 1e-5);
  EXPECT_EQ(r.series.headers[0], "t");
  EXPECT_EQ(r.series.rows[0][0], 0.0);
  EXPECT_NEAR(r.series.rows[0][1], 1.0, 1e-12);
}

TEST(Run, ConjugateTimesOfOscillator) {
  const RunResult r = run(load("oscillator.json"), "conjugate");
  ASSERT_EQ(r.series.rows.size(), 3u);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(r.series.rows[k][0], (k + 1) * std::numbers::pi, 2e-3);
  EXPECT_EQ(r.scalars["total_multiplicity"].get<int>(), 3);
}

TEST(Run, MorseOfFreeParticleIsZero) {
  const RunResult r = run(load("free_particle.json"), "morse");
  EXPECT_EQ(r.scalars["index"].get<int>(), 0);
  EXPECT_TRUE(r.scalars["agree"].get<bool>());
}

TEST(Run, LDerivativeFamily) {
  const RunResult r = run(load("lderiv.json"), "lderiv");
  EXPECT_EQ(r.scalars["hessian_index"].get<int>(), 1);
  EXPECT_EQ(r.scalars["family_maslov"].get<int>(), 1);
  EXPECT_TRUE(r.scalars["family_agree"].get<bool>());
}

TEST(Run, SerialAndParallelAgree) {
  for (const char* cmd : {"compare", "curvature", "jacobi"}) {
    const RunResult a = run(load("quartic.json"), cmd, Exec::Serial);
    const RunResult b = run(load("quartic.json"), cmd, Exec::Parallel);
    EXPECT_EQ(csv_text(a.series), csv_text(b.series)) << cmd;
    EXPECT_EQ(result_json_text(a), result_json_text(b)) << cmd;
  }
}

TEST(Output, DoubleFormatting) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Cli, WritesDeterministicFiles) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  std::ostringstream err;
  ASSERT_EQ(run_cli("conjugate", kConfigs / "oscillator.json", a, std::nullopt, false, err), 0);
  ASSERT_EQ(run_cli("conjugate", kConfigs / "oscillator.json", b, std::nullopt, false, err), 0);
  EXPECT_TRUE(err.str().empty());
  for (const char* f : {"conjugate.csv", "conjugate.json"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  EXPECT_TRUE(fs::exists(a / "provenance.json"));
  for (const auto& e : fs::directory_iterator(a))
    EXPECT_EQ(e.path().extension().string().find("tmp"), std::string::npos);
  const Json prov = Json::parse(slurp(a / "provenance.json"));
  EXPECT_EQ(prov["config_hash"], Json::parse(slurp(a / "conjugate.json"))["config_hash"]);
  EXPECT_TRUE(prov.contains("wall_time_seconds"));
}

TEST(Cli, ExitCodes) {
  std::ostringstream err;
  const fs::path out = scratch("codes");
  const fs::path bad_step = write_config("bad_step", R"({
    "system": {"family": "natural", "n": 1, "builtin": "oscillator"},
    "initial": [0.1, 0.0], "horizon": 1.0, "step": 0.0})");
  EXPECT_EQ(run_cli("flow", bad_step, out, std::nullopt, false, err), kExitValidation);
  EXPECT_NE(err.str().find("step must be positive"), std::string::npos);
  const Json rec = Json::parse(err.str().substr(0, err.str().find('\n')));
  EXPECT_EQ(rec["error"], "Validation");
  EXPECT_EQ(rec["exit_code"], 2);

  err.str("");
  const fs::path not_json = write_config("not_json", "{ system: ");
  EXPECT_EQ(run_cli("flow", not_json, out, std::nullopt, false, err), kExitValidation);
  EXPECT_EQ(run_cli("flow", "/nonexistent/config.json", out, std::nullopt, false, err),
            kExitValidation);

  // H = x y has Hxx = 0: the curvature is undefined.
  err.str("");
  const fs::path singular = write_config("singular", R"({
    "system": {"family": "custom", "n": 1,
               "hamiltonian": {"terms": [{"coef": 1.0, "exponents": [1, 1]}]}},
    "initial": [0.3, 0.2], "horizon": 1.0, "step": 0.01})");
  EXPECT_EQ(run_cli("curvature", singular, out, std::nullopt, false, err), kExitNumerical);
  EXPECT_EQ(Json::parse(err.str())["error"], "NotRegular");
  // Nothing written on failure.
  EXPECT_FALSE(fs::exists(out / "curvature.csv"));
  EXPECT_FALSE(fs::exists(out / "provenance.json"));

  err.str("");
  const fs::path blowup = write_config("blowup", R"({
    "system": {"family": "custom", "n": 1,
               "hamiltonian": {"terms": [{"coef": 1.0, "exponents": [1, 2]}]}},
    "initial": [0.0, 1.0], "horizon": 2.0, "step": 0.001})");
  EXPECT_EQ(run_cli("flow", blowup, out, std::nullopt, false, err), kExitNumerical);
  EXPECT_EQ(Json::parse(err.str())["error"], "BlowUp");
}

TEST(Cli, SeedOverride) {
  const fs::path cfg = write_config("seeded", R"({
    "system": {"family": "natural", "n": 2, "builtin": "pendulum"},
    "horizon": 1.0, "step": 0.01, "seed": 1})");
  std::ostringstream err;
  const fs::path a = scratch("seed_a"), b = scratch("seed_b");
  ASSERT_EQ(run_cli("flow", cfg, a, std::nullopt, false, err), 0);
  ASSERT_EQ(run_cli("flow", cfg, b, 2, false, err), 0);
  const Json ja = Json::parse(slurp(a / "flow.json")), jb = Json::parse(slurp(b / "flow.json"));
  EXPECT_NE(ja["scalars"]["initial"], jb["scalars"]["initial"]);
  EXPECT_NE(ja["config_hash"], jb["config_hash"]);
}
