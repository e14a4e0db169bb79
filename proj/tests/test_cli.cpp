#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nlqg/cli/config.hpp"
#include "nlqg/cli/run.hpp"

using namespace nlqg;
using namespace nlqg::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nlqg_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, "cfg.ini");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

int shell(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Config, MinimalFileTakesDefaults) {
  const Config c = parse_config_text("experiment = \"evolve\"\n", "cfg.ini");
  EXPECT_EQ(c.experiment(), "evolve");
  const Config d = Config::defaults_for("evolve");
  EXPECT_EQ(c.values(), d.values());
  EXPECT_EQ(c.real("dg.hbar"), 1.0);
  EXPECT_EQ(c.real("dg.D"), 0.0);
}

TEST(Config, ExperimentDefaultsOverrideSchemaDefaults) {
  const Config c = Config::defaults_for("epr-delta1");
  EXPECT_EQ(c.integer("grid.points"), 256);
  EXPECT_EQ(c.real("grid.length"), 64.0);
}

TEST(Config, SectionsAndComments) {
  const Config c = parse_config_text(
      "# header\nexperiment = \"evolve\"\n[dg]\nD = 0.01 ; comment\nt_final = 2\n[grid]\npoints = 64\n",
      "cfg.ini");
  EXPECT_EQ(c.real("dg.D"), 0.01);
  EXPECT_EQ(c.real("dg.t_final"), 2.0);
  EXPECT_EQ(c.integer("grid.points"), 64);
}

TEST(Config, UnknownKeyNamesKeyAndLine) {
  const std::string e = error_of("experiment = \"evolve\"\n[dg]\nDd = 0.1\n");
  EXPECT_NE(e.find("cfg.ini:3"), std::string::npos) << e;
  EXPECT_NE(e.find("'dg.Dd'"), std::string::npos) << e;
}

TEST(Config, RangeErrorNamesBound) {
  const std::string e = error_of("experiment = \"evolve\"\n[grid]\npoints = 4\n");
  EXPECT_NE(e.find("cfg.ini:3"), std::string::npos) << e;
  EXPECT_NE(e.find("grid.points"), std::string::npos) << e;
  EXPECT_NE(e.find(">= 8"), std::string::npos) << e;
}

TEST(Config, TypeMismatch) {
  const std::string e = error_of("experiment = \"evolve\"\n[dg]\nD = fast\n");
  EXPECT_NE(e.find("expects real"), std::string::npos) << e;
  EXPECT_NE(error_of("experiment = \"evolve\"\n[grid]\npoints = 12.5\n").find("integer"), std::string::npos);
}

TEST(Config, DuplicateKeyIsAnError) {
  const std::string e = error_of("experiment = \"evolve\"\n[dg]\nD = 0.1\nD = 0.2\n");
  EXPECT_NE(e.find("cfg.ini:4"), std::string::npos) << e;
  EXPECT_NE(e.find("line 3"), std::string::npos) << e;
}

TEST(Config, UnknownOrMissingExperiment) {
  EXPECT_NE(error_of("experiment = \"evolv\"\n").find("unknown experiment"), std::string::npos);
  EXPECT_NE(error_of("[dg]\nD = 0.1\n").find("missing"), std::string::npos);
  EXPECT_EQ(parse_config_text("[dg]\nD = 0.1\n", "cfg.ini", "evolve").real("dg.D"), 0.1);
}

TEST(Config, Overrides) {
  Config c = Config::defaults_for("evolve");
  apply_override(c, "dg.D=0.02");
  apply_override(c, "grid.points = 32");
  EXPECT_EQ(c.real("dg.D"), 0.02);
  EXPECT_EQ(c.integer("grid.points"), 32);
  EXPECT_THROW(apply_override(c, "dg.Dd=1"), ConfigError);
  EXPECT_THROW(apply_override(c, "dg.D"), ConfigError);
  EXPECT_THROW(apply_override(c, "experiment=evolve-pair"), ConfigError);
}

TEST(Config, ListsAndBooleans) {
  const Config c = parse_config_text(
      "experiment = \"epr-delta1\"\n[epr]\ns_list = [1, 2.5, 1e3]\nparallel = false\n", "cfg.ini");
  EXPECT_EQ(c.list("epr.s_list"), (std::vector<double>{1.0, 2.5, 1000.0}));
  EXPECT_FALSE(c.boolean("epr.parallel"));
}

TEST(Config, TextRoundTrip) {
  for (const auto& e : experiments()) {
    Config c = Config::defaults_for(e.name);
    if (e.name == "evolve") apply_override(c, "dg.D=0.0125");
    const Config back = parse_config_text(c.to_text(), "printed.ini");
    EXPECT_EQ(back.values(), c.values()) << e.name;
  }
}

TEST(Run, EinsteinDeSitterWritesTrajectoryAndManifest) {
  const fs::path out = scratch_dir("eds");
  const auto r = run(Config::defaults_for("cosmo-integrate"), out);
  ASSERT_EQ(r.exit_code, exit_ok) << r.message;
  EXPECT_TRUE(fs::exists(out / "trajectory.csv"));
  const json m = read_json(out / "manifest.json");
  EXPECT_EQ(m["termination"], "t_final_reached");
  EXPECT_EQ(m["exit_code"], 0);
  EXPECT_EQ(m["experiment"], "cosmo-integrate");
  EXPECT_TRUE(m["config"].contains("cosmo.w"));
  const auto tr = read_csv(out / "trajectory.csv");
  EXPECT_NEAR(tr.back()[1], std::pow(1.5 * 10.0, 2.0 / 3.0), 1e-7);
}

TEST(Run, OversizedStepAbortsWithStepIndex) {
  const fs::path out = scratch_dir("unstable");
  Config c = Config::defaults_for("evolve");
  apply_override(c, "dg.D=0.01");
  apply_override(c, "dg.dt_scale=100");
  const auto r = run(c, out);
  EXPECT_EQ(r.exit_code, exit_numerical_instability);
  const json m = read_json(out / "manifest.json");
  EXPECT_EQ(m["status"], "numerical_instability");
  EXPECT_TRUE(m["aborting_step"].is_number_integer());
}

TEST(Run, ValidationFailureStillWritesManifest) {
  const fs::path out = scratch_dir("invalid");
  Config c = Config::defaults_for("evolve");
  apply_override(c, "dg.D=-0.1");
  const auto r = run(c, out);
  EXPECT_EQ(r.exit_code, exit_validation);
  EXPECT_EQ(read_json(out / "manifest.json")["status"], "validation_error");
}

TEST(Run, UnphysicalCosmologyExitsWithFour) {
  const fs::path out = scratch_dir("unphysical");
  Config c = Config::defaults_for("cosmo-integrate");
  for (const char* o : {"cosmo.t0=0", "cosmo.rho_m=1", "cosmo.rho_ph=0.01", "cosmo.b0=-5", "cosmo.t_final=5"})
    apply_override(c, o);
  EXPECT_EQ(run(c, out).exit_code, exit_unphysical);
  EXPECT_EQ(read_json(out / "manifest.json")["termination"], "unphysical");
}

TEST(Run, RepeatedRunsAreByteIdentical) {
  Config c = Config::defaults_for("evolve");
  apply_override(c, "dg.D=0.01");
  apply_override(c, "dg.t_final=0.5");
  const fs::path a = scratch_dir("repeat_a"), b = scratch_dir("repeat_b");
  ASSERT_EQ(run(c, a).exit_code, exit_ok);
  ASSERT_EQ(run(c, b).exit_code, exit_ok);
  for (const char* f : {"diagnostics.csv", "final_field.bin", "summary.json"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Run, OutputDirectoryResolution) {
  EXPECT_EQ(output_dir(std::string("x/y"), "evolve"), fs::path("x/y"));
  ::setenv("NLQG_OUT", "/tmp/root", 1);
  EXPECT_EQ(output_dir(std::nullopt, "evolve"), fs::path("/tmp/root/evolve"));
  ::unsetenv("NLQG_OUT");
  EXPECT_EQ(output_dir(std::nullopt, "evolve"), fs::path("nlqg-out/evolve"));
}

TEST(Binary, CosmoIntegrateSubcommand) {
  const fs::path dir = scratch_dir("binary");
  {
    std::ofstream cfg(dir / "eds.ini");
    cfg << "experiment = \"cosmo-integrate\"\n[cosmo]\nt_final = 2\n";
  }
  const std::string cmd = std::string(NLQG_TOOL_PATH) + " cosmo integrate --config " +
                          (dir / "eds.ini").string() + " --out " + (dir / "out").string() +
                          " --override cosmo.sample_interval=0.1 > /dev/null 2>&1";
  EXPECT_EQ(shell(cmd), 0);
  const json m = read_json(dir / "out" / "manifest.json");
  EXPECT_EQ(m["config"]["cosmo.sample_interval"], 0.1);
  EXPECT_EQ(m["inputs"][0]["sha256"].get<std::string>().size(), 64u);
}

TEST(Binary, ExitCodesAndListing) {
  const fs::path dir = scratch_dir("binary_codes");
  {
    std::ofstream cfg(dir / "typo.ini");
    cfg << "experiment = \"evolve\"\n[dg]\nDd = 0.1\n";
  }
  const std::string tool = NLQG_TOOL_PATH;
  EXPECT_EQ(shell(tool + " evolve --config " + (dir / "typo.ini").string() + " --out " +
                  (dir / "o").string() + " > /dev/null 2>&1"),
            2);
  EXPECT_EQ(shell(tool + " --list-experiments > " + (dir / "list.txt").string()), 0);
  const std::string listing = slurp(dir / "list.txt");
  for (const auto& e : experiments()) EXPECT_NE(listing.find(e.name), std::string::npos) << e.name;
  EXPECT_EQ(shell(tool + " --print-defaults epr-delta1 > " + (dir / "d.ini").string()), 0);
  EXPECT_EQ(parse_config(dir / "d.ini").values(), Config::defaults_for("epr-delta1").values());
}

TEST(Binary, EnvironmentOutputRoot) {
  const fs::path dir = scratch_dir("binary_env");
  {
    std::ofstream cfg(dir / "energy.ini");
    cfg << "experiment = \"energy-check\"\n";
  }
  const std::string cmd = "NLQG_OUT=" + (dir / "root").string() + " " + NLQG_TOOL_PATH +
                          " energy-check --config " + (dir / "energy.ini").string() + " > /dev/null 2>&1";
  EXPECT_EQ(shell(cmd), 0);
  EXPECT_TRUE(fs::exists(dir / "root" / "energy-check" / "energy.csv"));
}
