// End-to-end exercises of the command-line tool: every verb, the exit-code
// contract, config resolution, and determinism of written artifacts.  Each
// case spawns the real binary.
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "cqlqg_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Runs the CLI with the given argument string (and optional environment
// prefix), capturing stdout/stderr.
CliResult run_cli(const std::string& args, const std::string& env = "") {
  const fs::path dir = work_dir();
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" +
                          std::string(CQLQG_CLI_PATH) + "' " + args + " > '" +
                          out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  CliResult res;
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  res.out = slurp(out);
  res.err = slurp(err);
  return res;
}

std::string data(const std::string& name) {
  return std::string(CQLQG_DATA_DIR) + "/" + name;
}

int count_occurrences(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++n;
  return n;
}

}  // namespace

TEST_CASE("check reports physical realizability with exit codes") {
  SUBCASE("rounded tabulated plant passes at the default tolerance") {
    const auto res = run_cli("check " + data("example8.plant"));
    CHECK(res.code == 0);
    CHECK(res.out.find("overall: PASS") != std::string::npos);
  }
  SUBCASE("exact plant passes at machine tolerance") {
    const auto res =
        run_cli("check " + data("example10.plant") + " --tol 1e-12");
    CHECK(res.code == 0);
    CHECK(res.out.find("overall: PASS") != std::string::npos);
  }
  SUBCASE("the four-mode table violates the commutation identities") {
    const auto res = run_cli("check " + data("example9.plant"));
    CHECK(res.code == 1);
    CHECK(res.out.find("overall: FAIL") != std::string::npos);
    CHECK(res.out.find("NO") != std::string::npos);
  }
  SUBCASE("unreadable input exits with the parse code") {
    const auto res = run_cli("check /nonexistent/file.plant");
    CHECK(res.code == 2);
    CHECK(res.err.find("error: parse") != std::string::npos);
  }
}

TEST_CASE("cost prints the closed-loop evaluation") {
  SUBCASE("published value of the slow-oscillator example") {
    const auto res = run_cli("cost " + data("example10.plant") + " " +
                             data("example10_opt.controller"));
    CHECK(res.code == 0);
    CHECK(res.out.find("cost: 2.04") != std::string::npos);
    CHECK(res.out.find("closed-loop eigenvalues:") != std::string::npos);
    CHECK(res.out.find("overall: PASS") != std::string::npos);
    CHECK(res.out.find("covariance min eigenvalue:") != std::string::npos);
  }
  SUBCASE("a non-stabilizing controller is reported, not an error") {
    const fs::path zero = work_dir() / "zero.controller";
    spit(zero,
         "{\"R\": [[0.0, 0.0], [0.0, 0.0]], \"b\": [[0.0, 0.0], [0.0, 0.0]],"
         " \"e\": [[0.0, 0.0], [0.0, 0.0]]}\n");
    const auto res =
        run_cli("cost " + data("example8.plant") + " " + zero.string());
    CHECK(res.code == 0);
    CHECK(res.out.find("cost: inf (not stabilizing)") != std::string::npos);
  }
  SUBCASE("mismatched dimensions exit with the dimension code") {
    const auto res = run_cli("cost " + data("example8.plant") + " " +
                             data("example9_opt.controller"));
    CHECK(res.code == 2);
    CHECK(res.err.find("error: dimension") != std::string::npos);
  }
}

TEST_CASE("synthesize descends from a given initial controller") {
  const fs::path dir = work_dir();
  const std::string outs = " --out " + (dir / "a.controller").string() +
                           " --trace " + (dir / "a.trace").string();
  const auto res = run_cli("synthesize " + data("example8.plant") +
                           " --init " + data("example8_opt.controller") + outs);
  REQUIRE(res.code == 0);
  CHECK(res.out.find("init ") != std::string::npos);
  CHECK(res.out.find("(gradient_small)") != std::string::npos);
  CHECK(res.out.find("best cost: 12.104") != std::string::npos);
  CHECK(fs::exists(dir / "a.controller"));
  CHECK(fs::exists(dir / "a.trace"));

  SUBCASE("artifacts are deterministic across reruns") {
    const std::string outs2 = " --out " + (dir / "b.controller").string() +
                              " --trace " + (dir / "b.trace").string();
    const auto res2 =
        run_cli("synthesize " + data("example8.plant") + " --init " +
                data("example8_opt.controller") + outs2);
    REQUIRE(res2.code == 0);
    CHECK(slurp(dir / "a.controller") == slurp(dir / "b.controller"));
    CHECK(slurp(dir / "a.trace") == slurp(dir / "b.trace"));
  }
  SUBCASE("iteration caps are honored and labeled") {
    const auto res3 = run_cli(
        "synthesize " + data("example8.plant") + " --init " +
        data("example8_opt.controller") + outs + " --epsilon 0 --max-iters 20");
    REQUIRE(res3.code == 0);
    CHECK(res3.out.find("after 20 iterations (max_iters)") !=
          std::string::npos);
  }
}

TEST_CASE("synthesize multi-start reproduces the published optimum") {
  const fs::path dir = work_dir();
  const auto res = run_cli(
      "synthesize " + data("example10.plant") +
      " --starts 10 --seed 7 --epsilon 1e-9 --out " +
      (dir / "ms.controller").string() + " --trace " +
      (dir / "ms.trace").string());
  REQUIRE(res.code == 0);
  CHECK(count_occurrences(res.out, "start seed ") == 10);
  // best measured cost 2.04007, within 5e-3 of the published 2.0418
  CHECK(res.out.find("best cost: 2.040") != std::string::npos);
  CHECK(fs::exists(dir / "ms.controller"));
}

TEST_CASE("solver configuration resolves env, file, then flags") {
  const fs::path dir = work_dir();
  const fs::path env_cfg = dir / "env.config";
  const fs::path file_cfg = dir / "file.config";
  spit(env_cfg, "{\"epsilon\": 0.0, \"max_iters\": 3}\n");
  spit(file_cfg, "{\"max_iters\": 4}\n");
  const std::string base = "synthesize " + data("example8.plant") +
                           " --init " + data("example8_opt.controller") +
                           " --out " + (dir / "c.controller").string() +
                           " --trace " + (dir / "c.trace").string();
  SUBCASE("environment variable supplies the defaults") {
    const auto res = run_cli(base, "CQLQG_CONFIG='" + env_cfg.string() + "'");
    REQUIRE(res.code == 0);
    CHECK(res.out.find("after 3 iterations (max_iters)") != std::string::npos);
  }
  SUBCASE("--config overrides the environment") {
    const auto res = run_cli(base + " --config " + file_cfg.string(),
                             "CQLQG_CONFIG='" + env_cfg.string() + "'");
    REQUIRE(res.code == 0);
    CHECK(res.out.find("after 4 iterations (max_iters)") != std::string::npos);
  }
  SUBCASE("explicit flags override both") {
    const auto res = run_cli(base + " --config " + file_cfg.string() +
                                 " --max-iters 5",
                             "CQLQG_CONFIG='" + env_cfg.string() + "'");
    REQUIRE(res.code == 0);
    CHECK(res.out.find("after 5 iterations (max_iters)") != std::string::npos);
  }
  SUBCASE("an invalid config file is a parse failure") {
    spit(dir / "bad.config", "{\"unknown_key\": 1}\n");
    const auto res = run_cli(base + " --config " + (dir / "bad.config").string());
    CHECK(res.code == 2);
    CHECK(res.err.find("error: parse") != std::string::npos);
  }
}

TEST_CASE("flow integrates and reports drift diagnostics") {
  const fs::path dir = work_dir();
  SUBCASE("balanced flow conserves the parameter norm to first order") {
    const auto res = run_cli(
        "flow " + data("example8.plant") + " " +
        data("example8_opt.controller") +
        " --mode balanced --dtau 1e-4 --steps 200 --out " +
        (dir / "bal.trace").string());
    REQUIRE(res.code == 0);
    // parse the reported |u| drift and demand it stays tiny
    const auto pos = res.out.find("|u| drift ");
    REQUIRE(pos != std::string::npos);
    const double drift = std::strtod(res.out.c_str() + pos + 10, nullptr);
    CHECK(drift < 1e-2);
    CHECK(fs::exists(dir / "bal.trace"));
  }
  SUBCASE("zero steps record exactly the initial state") {
    const auto res = run_cli("flow " + data("example8.plant") + " " +
                             data("example8_opt.controller") +
                             " --steps 0 --out " + (dir / "one.trace").string());
    REQUIRE(res.code == 0);
    const auto text = slurp(dir / "one.trace");
    CHECK(count_occurrences(text, "\n") == 2);  // header + single row
  }
  SUBCASE("an escaping trajectory exits 1 and keeps the partial trace") {
    const auto res = run_cli("flow " + data("example8.plant") + " " +
                             data("example8_opt.controller") +
                             " --dtau 0.05 --steps 100 --out " +
                             (dir / "esc.trace").string());
    CHECK(res.code == 1);
    CHECK(res.err.find("flow-escape") != std::string::npos);
    CHECK(count_occurrences(slurp(dir / "esc.trace"), "\n") >= 2);
  }
}

TEST_CASE("rate prints the contraction estimate with warnings") {
  const auto res = run_cli("rate " + data("example9.plant") + " " +
                           data("example9_opt.controller") + " --f 0.333");
  REQUIRE(res.code == 0);
  CHECK(res.out.find("ell = ") != std::string::npos);
  CHECK(res.out.find("L = ") != std::string::npos);
  CHECK(res.out.find("r = 1.00000060") != std::string::npos);
  CHECK(res.out.find("tangent dimension: 10") != std::string::npos);
  CHECK(res.err.find("far from stationarity") != std::string::npos);
  CHECK(res.err.find("negative curvature") != std::string::npos);
}

TEST_CASE("plot renders an SVG from a saved trace") {
  const fs::path dir = work_dir();
  const auto synth = run_cli("synthesize " + data("example8.plant") +
                             " --init " + data("example8_opt.controller") +
                             " --out " + (dir / "p.controller").string() +
                             " --trace " + (dir / "p.trace").string());
  REQUIRE(synth.code == 0);
  SUBCASE("successful render") {
    const auto res = run_cli("plot " + (dir / "p.trace").string() +
                             " --emin 12.0 --out " + (dir / "p.svg").string());
    REQUIRE(res.code == 0);
    const auto svg = slurp(dir / "p.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("polyline") != std::string::npos);
  }
  SUBCASE("invalid reference level maps to the generic failure code") {
    const auto res = run_cli("plot " + (dir / "p.trace").string() +
                             " --emin 0 --out " + (dir / "q.svg").string());
    CHECK(res.code == 1);
    CHECK(res.err.find("error:") != std::string::npos);
  }
}
