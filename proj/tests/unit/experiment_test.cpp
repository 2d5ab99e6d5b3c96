#include "spma/experiment.hpp"

#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spma/report.hpp"
#include "spma/verify.hpp"

using namespace spma;

namespace {

std::string chain_bandit_config(const std::string& extra = "") {
  return R"({
    "environment": {"name": "bandit", "num_arms": 4, "min_gap": 0.2, "seed": 3},
    "parameterization": {"kind": "tabular"},
    "methods": ["SPMA", "SPMA_bandit_gap"],
    "eta_grid": [0.5, 1.0],
    "outer_T": 30,
    "seeds": [1, 2])" +
         extra + "\n}";
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("round trip of a valid config") {
    const ExperimentConfig cfg = parse_config(chain_bandit_config());
    CHECK(cfg.environment.kind == EnvKind::bandit);
    CHECK(cfg.methods.size() == 2);
    CHECK(cfg.eta_grid == std::vector<double>{0.5, 1.0});
    CHECK(cfg.outer_iters == 30);
  }
  SUBCASE("unknown keys are rejected with a path") {
    try {
      parse_config(chain_bandit_config(R"(, "bogus_key": 1)"));
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
    }
  }
  SUBCASE("empty eta grid is rejected") {
    CHECK_THROWS_AS(parse_config(chain_bandit_config(R"(, "eta_grid": [])")), ConfigError);
  }
  SUBCASE("gap-dependent method is bandit-only") {
    const std::string bad = R"({
      "environment": {"name": "cliff_world", "gamma": 0.9},
      "parameterization": {"kind": "tabular"},
      "methods": ["SPMA_bandit_gap"],
      "outer_T": 5
    })";
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
  }
  SUBCASE("missing required keys are named") {
    try {
      parse_config(R"({"environment": {"name": "bandit", "num_arms": 3, "min_gap": 0.1}})");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("parameterization") != std::string::npos);
    }
  }
}

TEST_CASE("effective step sizes") {
  CHECK(effective_step_size(Method::spma, 1.0, false, 0.9) ==
        doctest::Approx(0.999 * 0.1));
  CHECK(effective_step_size(Method::spma, 0.5, false, 0.9) == doctest::Approx(0.05));
  CHECK(effective_step_size(Method::spma, 1.0, true, 0.0) == doctest::Approx(1.0));
  CHECK(effective_step_size(Method::npg, 1.0, false, 0.9) == doctest::Approx(1.0));
  CHECK(effective_step_size(Method::spg, 0.7, false, 0.9) == doctest::Approx(0.7));
}

TEST_CASE("experiments are deterministic and thread-count independent") {
  const ExperimentConfig cfg = parse_config(chain_bandit_config());
  const ExperimentResult a = run_experiment(cfg, 1);
  const ExperimentResult b = run_experiment(cfg, 2);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    REQUIRE(a.cells[i].records.size() == b.cells[i].records.size());
    for (std::size_t t = 0; t < a.cells[i].records.size(); ++t)
      CHECK(record_to_csv(a.cells[i].records[t]) == record_to_csv(b.cells[i].records[t]));
  }
}

TEST_CASE("AUC selection is invariant to positive rescaling") {
  std::vector<IterationRecord> curve(5);
  for (int t = 0; t < 5; ++t) {
    curve[t].t = t;
    curve[t].j_value = 0.1 * t * t;
  }
  const double base = curve_auc(curve);
  for (auto& rec : curve) rec.j_value *= 7.5;
  CHECK(curve_auc(curve) == doctest::Approx(7.5 * base).epsilon(1e-12));
}

TEST_CASE("CSV records round-trip exactly") {
  IterationRecord rec;
  rec.t = 17;
  rec.j_value = 0.12345678901234567;
  rec.subopt_inf = 1e-13;
  rec.subopt_rho = 2.0 / 3.0;
  rec.c_t = 0.1 + 0.2;  // deliberately non-representable sum
  rec.alpha_t = 0.9999999999999;
  rec.surrogate_final = 42.0;
  rec.bound_ok = true;

  const IterationRecord back = record_from_csv(record_to_csv(rec));
  CHECK(back.t == rec.t);
  CHECK(back.j_value == rec.j_value);
  CHECK(back.subopt_inf == rec.subopt_inf);
  CHECK(back.subopt_rho == rec.subopt_rho);
  REQUIRE(back.c_t.has_value());
  CHECK(*back.c_t == *rec.c_t);
  CHECK_FALSE(back.min_gap.has_value());
  CHECK(back.alpha_t == rec.alpha_t);
  REQUIRE(back.surrogate_final.has_value());
  CHECK(*back.surrogate_final == *rec.surrogate_final);
  CHECK_FALSE(back.surrogate_gap.has_value());
  REQUIRE(back.bound_ok.has_value());
  CHECK(*back.bound_ok);
}

TEST_CASE("result files round-trip and the summary renders") {
  const ExperimentConfig cfg = parse_config(chain_bandit_config());
  const ExperimentResult result = run_experiment(cfg, 1);

  const auto dir = std::filesystem::temp_directory_path() / "spma_report_test";
  std::filesystem::remove_all(dir);
  write_results(result, dir.string(), true);

  CHECK(std::filesystem::exists(dir / "manifest.json"));
  CHECK(std::filesystem::exists(dir / "summary.md"));
  CHECK(std::filesystem::exists(dir / "curves.svg"));

  const ExperimentResult loaded = read_results(dir.string());
  REQUIRE(loaded.cells.size() == result.cells.size());
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    CHECK(loaded.cells[i].spec.method == result.cells[i].spec.method);
    CHECK(loaded.cells[i].spec.seed == result.cells[i].spec.seed);
    REQUIRE(loaded.cells[i].records.size() == result.cells[i].records.size());
    for (std::size_t t = 0; t < result.cells[i].records.size(); ++t)
      CHECK(record_to_csv(loaded.cells[i].records[t]) ==
            record_to_csv(result.cells[i].records[t]));
  }

  const std::string svg = read_file(dir / "curves.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<?xml") == 0);

  const std::string md = read_file(dir / "summary.md");
  CHECK(md.find("Best step size by AUC") != std::string::npos);
  CHECK(md.find("SPMA") != std::string::npos);

  // Re-emission is byte identical.
  const std::string csv_before = read_file(dir / "cell000_SPMA.csv");
  write_results(loaded, dir.string(), true);
  CHECK(read_file(dir / "cell000_SPMA.csv") == csv_before);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cell failures are isolated") {
  // SPMA at raw eta 1.0 on a bandit is capped to 1.0 and fine; to force a
  // failure use an infeasible bandit gap inside one method's run by
  // constructing a config whose environment cannot be built lazily.
  ExperimentConfig cfg = parse_config(chain_bandit_config());
  cfg.environment.min_gap = 0.5;  // (K-1) * 0.5 = 1.5 > 1: infeasible
  const ExperimentResult result = run_experiment(cfg, 1);
  for (const auto& cell : result.cells) {
    CHECK(cell.failed());
    CHECK(cell.records.empty());
  }
  // Emission still works with failed cells present.
  const auto dir = std::filesystem::temp_directory_path() / "spma_failed_cells";
  std::filesystem::remove_all(dir);
  CHECK_NOTHROW(write_results(result, dir.string(), false));
  std::filesystem::remove_all(dir);
}

TEST_CASE("seed offsets shift every cell seed") {
  const ExperimentConfig cfg = parse_config(chain_bandit_config());
  const ExperimentResult result = run_experiment(cfg, 1, 100);
  for (const auto& cell : result.cells) CHECK(cell.spec.seed >= 101);
}

TEST_CASE("linear-parameterization cells run end to end") {
  const std::string text = R"({
    "environment": {"name": "cliff_world", "gamma": 0.9},
    "parameterization": {"kind": "linear", "features": "one_hot"},
    "methods": ["SPMA", "MDPO", "SPG"],
    "eta_grid": [0.9],
    "inner_m": [5],
    "outer_T": 3,
    "seeds": [1],
    "state_mode": {"kind": "sampled", "n_states": 64}
  })";
  const ExperimentResult result = run_experiment(parse_config(text), 2);
  REQUIRE(result.cells.size() == 3);
  for (const auto& cell : result.cells) {
    REQUIRE_FALSE(cell.failed());
    REQUIRE(cell.records.size() == 4);
    if (cell.spec.method != Method::spg) {
      CHECK(cell.records.front().surrogate_final.has_value());
      CHECK_FALSE(cell.records.front().surrogate_gap.has_value());  // estimator off
    } else {
      CHECK_FALSE(cell.records.front().surrogate_final.has_value());
    }
  }
  // SPMA's effective step is scaled and capped; the others run raw.
  CHECK(result.cells[0].spec.eta_effective == doctest::Approx(0.09));
  CHECK(result.cells[1].spec.eta_effective == doctest::Approx(0.9));
}

TEST_CASE("acceptance suite names are validated") {
  CHECK_THROWS_AS(run_acceptance_suite("bogus"), ConfigError);
  const auto bandit = run_acceptance_suite("bandit");
  CHECK(bandit.size() == 2);
  CHECK(all_passed(bandit));
}
