#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "harness.hpp"

namespace fs = std::filesystem;
namespace h = boundstate::harness;

namespace {

h::RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return h::parse_config(in, "test.cfg");
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const h::ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("boundstate_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(BOUNDSTATE_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

const char* kSmallSchrodinger =
    "mode = schrodinger\n"
    "nucleus = 1 0 0 0\n"
    "box = 16\n"
    "n = 32\n"
    "parameter0 = 0.8\n"
    "newton = true\n"
    "tol = 1e-6\n";

const char* kSmallDirac =
    "mode = dirac\n"
    "nucleus = 1 0 0 0\n"
    "box = 16\n"
    "n = 32\n"
    "max_iters = 60\n"
    "tol = 1e-6\n"
    "initial_guess = random(7)\n";

}  // namespace

TEST(Config, ParsesKeysAndDefaults) {
  const auto c = parse(
      "# hydrogen\n"
      "mode = dirac   # trailing comment\n"
      "nucleus = 1 0 0 0\n"
      "nucleus = 2 1.5 -1 0.25\n"
      "initial_guess = gaussian(1e8)\n"
      "shift_tau = auto\n");
  EXPECT_EQ(c.mode, h::Mode::Dirac);
  ASSERT_EQ(c.nuclei.size(), 2u);
  EXPECT_EQ(c.nuclei[1].Z, 2.0);
  EXPECT_EQ(c.nuclei[1].position[1], -1.0);
  EXPECT_EQ(c.guess, h::GuessKind::Gaussian);
  EXPECT_EQ(c.gaussian_exponent, 1e8);
  EXPECT_FALSE(c.shift_tau.has_value());
  EXPECT_EQ(c.box, 40.0);
  EXPECT_EQ(c.n, 160u);
  EXPECT_TRUE(c.fix_parameter);
  EXPECT_FALSE(c.newton);

  const auto r = parse("mode = dirac\nnucleus = 1 0 0 0\ninitial_guess = random(42)\n");
  EXPECT_EQ(r.guess, h::GuessKind::Random);
  EXPECT_EQ(r.seed, 42u);
  EXPECT_FALSE(parse("mode = schrodinger\nnucleus = 1 0 0 0\nnewton = true\n").fix_parameter);
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("mode = dirac\nnucleus = 1 0 0 0\nbogus = 3\n"), 3);
  EXPECT_EQ(error_line("mode = dirac\n\n# c\nbox = abc\nnucleus = 1 0 0 0\n"), 4);
  EXPECT_EQ(error_line("mode = dirac\nbox = 10\nbox = 12\n"), 3);
  EXPECT_EQ(error_line("mode = schrodinger\nnucleus = 1 0 0 0\ninitial_guess = swapped\n"), 3);
  EXPECT_EQ(error_line("mode = schrodinger\nnucleus = 1 0 0 0\n\ninitial_guess = gaussian(5)\n"), 4);
  EXPECT_EQ(error_line("mode = dirac\nnucleus = 1 0 0\n"), 2);
  EXPECT_EQ(error_line("mode = dirac\nnucleus = 1 30 0 0\n"), 2);
  EXPECT_EQ(error_line("mode = dirac\nnucleus = 1 0 0 0\ntol = -1\n"), 3);
  EXPECT_EQ(error_line("mode = quantum\n"), 1);
  EXPECT_EQ(error_line("mode = dirac\nnucleus = 1 0 0 0\nnewton = true\nfix_parameter = true\n"), 3);
  EXPECT_EQ(error_line("mode = dirac\nnucleus = 1 0 0 0\nparameter0 = 0.5\n"), 3);
  EXPECT_GT(error_line("nucleus = 1 0 0 0\n"), 0);
  try {
    parse("mode = dirac\nnucleus = 1 0 0 0\nbogus = 3\n");
  } catch (const h::ConfigError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("test.cfg:3:", 0), 0u);
  }
}

TEST(Run, SchrodingerNewtonWritesOutputs) {
  const auto dir = scratch("schrodinger");
  auto cfg = parse(kSmallSchrodinger);
  cfg.name = "h";
  const auto rep = h::run(cfg, dir);
  ASSERT_EQ(rep.exit_status, h::kConverged) << rep.message;
  EXPECT_GT(rep.newton_steps, 0);
  EXPECT_NEAR(rep.energy, -0.5, 5e-2);
  const std::string csv = slurp(dir / "h.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iter,lambda_re,lambda_im,energy_shifted,residual,projection");
  std::istringstream rows(csv);
  std::string row;
  std::getline(rows, row);
  int prev = 0;
  while (std::getline(rows, row)) {
    const int iter = std::stoi(row.substr(0, row.find(',')));
    EXPECT_EQ(iter, prev + 1);
    prev = iter;
  }
  EXPECT_EQ(prev, rep.iterations);
  EXPECT_NE(slurp(dir / "h.summary.txt").find("converged = true"), std::string::npos);
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".tmp");
}

TEST(Run, SameSeedReproducesLogBitIdentically) {
  const auto a = scratch("seed_a");
  const auto b = scratch("seed_b");
  auto cfg = parse(kSmallDirac);
  cfg.name = "r";
  cfg.dump = "r.bsfld";
  const auto ra = h::run(cfg, a);
  const auto rb = h::run(cfg, b);
  ASSERT_NE(ra.exit_status, h::kError) << ra.message;
  EXPECT_EQ(slurp(a / "r.csv"), slurp(b / "r.csv"));
  EXPECT_EQ(slurp(a / "r.bsfld"), slurp(b / "r.bsfld"));
  h::apply_overrides(cfg, {std::uint64_t{8}, false});
  const auto c = scratch("seed_c");
  h::run(cfg, c);
  EXPECT_NE(slurp(a / "r.csv"), slurp(c / "r.csv"));
}

TEST(Run, IterationLimitGivesExitTwo) {
  const auto dir = scratch("limit");
  auto cfg = parse(kSmallDirac);
  cfg.name = "limit";
  cfg.max_iters = 2;
  cfg.tol = 1e-12;
  const auto rep = h::run(cfg, dir);
  EXPECT_EQ(rep.exit_status, h::kMaxIters);
  EXPECT_TRUE(fs::exists(dir / "limit.csv"));
}

TEST(Cli, InvalidConfigExitsOneWithoutOutputs) {
  const auto dir = scratch("cli_invalid");
  write_file(dir / "bad.cfg", "mode = schrodinger\nnucleus = 1 0 0 0\ninitial_guess = swapped\n");
  const auto out = dir / "out";
  EXPECT_EQ(run_cli("--out " + out.string() + " run " + (dir / "bad.cfg").string()), 1);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, RunConvergesWithExitZero) {
  const auto dir = scratch("cli_run");
  write_file(dir / "h.cfg", kSmallSchrodinger);
  EXPECT_EQ(run_cli("--out " + dir.string() + " run " + (dir / "h.cfg").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "h.csv"));
  EXPECT_TRUE(fs::exists(dir / "h.summary.txt"));
}

TEST(Suite, EmptyDirectory) {
  const auto dir = scratch("suite_empty");
  const auto rep = h::run_suite(h::suite_configs(dir), dir, {});
  EXPECT_TRUE(rep.runs.empty());
  EXPECT_EQ(rep.exit_status, 0);
  EXPECT_EQ(run_cli("--out " + dir.string() + " suite " + dir.string()), 0);
}

TEST(Suite, OneFailingConfigLeavesOthersIntact) {
  const auto dir = scratch("suite_mixed");
  write_file(dir / "a_good.cfg", kSmallSchrodinger);
  write_file(dir / "b_bad.cfg", "mode = schrodinger\nnucleus = 1 0 0 0\nbogus = 1\n");
  const auto out = dir / "out";
  const auto rep = h::run_suite(h::suite_configs(dir), out, {});
  ASSERT_EQ(rep.runs.size(), 2u);
  EXPECT_EQ(rep.runs[0].exit_status, h::kConverged);
  EXPECT_EQ(rep.runs[1].exit_status, h::kError);
  EXPECT_NE(rep.runs[1].message.find("b_bad.cfg:3:"), std::string::npos);
  EXPECT_EQ(rep.exit_status, 2);
  EXPECT_TRUE(fs::exists(out / "a_good.csv"));
  EXPECT_FALSE(fs::exists(out / "b_bad.csv"));
  std::ostringstream table;
  h::write_suite_summary(table, rep);
  EXPECT_NE(table.str().find("a_good,schrodinger,0"), std::string::npos);
}

TEST(Suite, DiracGuessesAgree) {
  const auto dir = scratch("suite_dirac");
  const std::string base = "mode = dirac\nnucleus = 1 0 0 0\nbox = 16\nn = 32\nmax_iters = 200\ntol = 1e-9\n";
  write_file(dir / "standard.cfg", base);
  write_file(dir / "random.cfg", base + "initial_guess = random(3)\n");
  const auto rep = h::run_suite(h::suite_configs(dir), dir, {}, 2);
  ASSERT_EQ(rep.runs.size(), 2u);
  for (const auto& r : rep.runs) EXPECT_EQ(r.exit_status, h::kConverged) << r.name << " " << r.message;
  EXPECT_LE(rep.dirac_energy_spread, 1e-6);
  EXPECT_EQ(rep.exit_status, 0);
}

TEST(WriteAtomic, ReplacesContentsWithoutTemporaries) {
  const auto dir = scratch("atomic");
  h::write_atomic(dir / "sub" / "f.txt", "one");
  h::write_atomic(dir / "sub" / "f.txt", "two");
  EXPECT_EQ(slurp(dir / "sub" / "f.txt"), "two");
  EXPECT_FALSE(fs::exists(dir / "sub" / "f.txt.tmp"));
}
