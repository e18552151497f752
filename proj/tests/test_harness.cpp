#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "relent/harness.hpp"

using namespace relent;

namespace {

Campaign tiny_campaign() {
  Campaign c;
  c.seed = 1;
  c.d_a_grid = {2};
  c.d_b_grid = {2};
  c.rank_modes = {"full", "deficient"};
  c.samples_per_cell = 5;
  return c;
}

}  // namespace

TEST_CASE("matrix JSON round trip and schema validation") {
  CounterRng rng(91);
  const Matrix m = random_ginibre(3, 2, rng);
  const Matrix back = matrix_from_json(matrix_to_json(m));
  CHECK((m - back).norm() == 0.0);

  Json bad = matrix_to_json(m);
  bad.erase("im");
  CHECK_THROWS_AS(matrix_from_json(bad), SchemaError);

  Json mismatched = matrix_to_json(m);
  mismatched["rows"] = 5;
  CHECK_THROWS_AS(matrix_from_json(mismatched), SchemaError);
}

TEST_CASE("state, channel and form JSON round trips") {
  CounterRng rng(92);
  const DensityOperator rho = random_density(3, 2, rng);
  StateMetadata meta;
  meta.seed = 42;
  meta.rank = 2;
  const Json j = state_to_json(rho, meta);
  CHECK(j["kind"] == "density");
  CHECK(j["seed"] == 42);
  const DensityOperator back = state_from_json(j);
  CHECK((rho.mat() - back.mat()).norm() == 0.0);

  const QuantumChannel c = random_channel(2, 3, rng);
  const QuantumChannel c_back = channel_from_json(channel_to_json(c));
  REQUIRE(c_back.kraus().size() == c.kraus().size());
  for (std::size_t i = 0; i < c.kraus().size(); ++i)
    CHECK((c.kraus()[i] - c_back.kraus()[i]).norm() == 0.0);

  const Matrix g = random_ginibre(4, 4, rng);
  const PositiveForm form(g * g.adjoint());
  const Json fj = form_to_json(form);
  CHECK(fj["basis"] == "matrix-units");
  const PositiveForm f_back = form_from_json(fj);
  CHECK((form.gram() - f_back.gram()).norm() == 0.0);

  // non-state matrices are rejected on load
  Json not_state = matrix_to_json(2.0 * Matrix::Identity(2, 2));
  not_state["kind"] = "density";
  CHECK_THROWS_AS(state_from_json(not_state), StateError);
}

TEST_CASE("CSV emitters") {
  const auto rows = contractive_jensen_table(JensenVariant::shifted_inverse,
                                             0.5, 0.5, {1.0, 2.0});
  const std::string csv = jensen_table_csv(rows);
  CHECK(csv.find("x,lhs,rhs,violation") == 0);
  CHECK(csv.find("\n1,") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("campaign: empty check set gives an empty report") {
  Campaign c = tiny_campaign();
  c.checks = {};
  const Report report = run_campaign(c);
  CHECK(report.checks.empty());
  CHECK(report.total_failures() == 0);
}

TEST_CASE("campaign: default checks pass on a small grid") {
  Campaign c = tiny_campaign();
  c.checks = Campaign::default_checks();
  const Report report = run_campaign(c);
  CHECK(report.total_failures() == 0);
  for (const CheckStats& stats : report.checks) CHECK(stats.fail == 0);
}

TEST_CASE("campaign: chain checks pass on a small grid") {
  Campaign c = tiny_campaign();
  c.samples_per_cell = 3;
  c.checks = {"petz-chain", "uhlmann-chain"};
  const Report report = run_campaign(c);
  CHECK(report.total_failures() == 0);
}

TEST_CASE("campaign: determinism is byte-exact") {
  Campaign c = tiny_campaign();
  c.checks = {"dpi", "equivalence", "flawed-step"};
  const std::string first = run_campaign(c).to_json().dump();
  const std::string second = run_campaign(c).to_json().dump();
  CHECK(first == second);
}

TEST_CASE("campaign: flawed-step reports violations everywhere") {
  Campaign c = tiny_campaign();
  c.checks = {"flawed-step"};
  c.samples_per_cell = 160;  // cover the whole default grid
  const Report report = run_campaign(c);
  REQUIRE(report.checks.size() == 1);
  CHECK(report.checks[0].fail == 0);          // every point violates
  CHECK(report.checks[0].pass == 160);        // 100% violation rate
  CHECK(report.checks[0].worst_defect < 0.0); // maximal rhs - lhs stays negative
}

TEST_CASE("campaign: unknown check name raises") {
  Campaign c = tiny_campaign();
  c.checks = {"no-such-check"};
  CHECK_THROWS_AS(run_campaign(c), DomainError);
}

TEST_CASE("campaign JSON round trip") {
  Campaign c = tiny_campaign();
  c.tolerance_overrides["dpi"] = 1e-6;
  const Campaign back = Campaign::from_json(c.to_json());
  CHECK(back.seed == c.seed);
  CHECK(back.d_a_grid == c.d_a_grid);
  CHECK(back.checks == c.checks);
  CHECK(back.tolerance_overrides.at("dpi") == 1e-6);

  Json bad = c.to_json();
  bad["samples_per_cell"] = -1;
  CHECK_THROWS_AS(Campaign::from_json(bad), SchemaError);
}

TEST_CASE("witness replay") {
  CounterRng rng(93);

  // a passing instance replays to a pass
  const DensityOperator rho = random_density(2, 2, rng);
  const DensityOperator sigma = random_density(2, 2, rng);
  const QuantumChannel channel = random_channel(2, 2, rng);
  Json witness;
  witness["check"] = "dpi";
  witness["d_a"] = 2;
  witness["d_b"] = 2;
  witness["inputs"]["rho"] = state_to_json(rho);
  witness["inputs"]["sigma"] = state_to_json(sigma);
  witness["inputs"]["channel"] = channel_to_json(channel);
  const Json replay = replay_witness(witness);
  CHECK(replay["pass"].get<bool>());

  // near-singular sigma: diagnostics come back finite and reproducible
  Matrix near_singular = Matrix::Zero(2, 2);
  near_singular(0, 0) = 1.0 - 1e-13;
  near_singular(1, 1) = 1e-13;
  Json tricky;
  tricky["check"] = "equivalence";
  tricky["inputs"]["rho"] = state_to_json(rho);
  tricky["inputs"]["sigma"] = state_to_json(DensityOperator(near_singular));
  const Json diag = replay_witness(tricky);
  CHECK(diag.contains("support_overlap"));
  CHECK(diag.contains("regularized_values"));
  const Json diag2 = replay_witness(tricky);
  CHECK(diag.dump() == diag2.dump());

  // corrupted witnesses are schema errors
  Json corrupted;
  corrupted["check"] = "dpi";
  CHECK_THROWS_AS(replay_witness(corrupted), SchemaError);
  corrupted["inputs"] = Json::object();
  CHECK_THROWS_AS(replay_witness(corrupted), SchemaError);
  Json unknown;
  unknown["check"] = "nonsense";
  unknown["inputs"] = Json::object();
  CHECK_THROWS_AS(replay_witness(unknown), SchemaError);
}

TEST_CASE("tolerance overrides apply per check and restore afterwards") {
  const double original = tolerances().dpi_gap;
  Campaign c = tiny_campaign();
  c.checks = {"dpi"};
  c.tolerance_overrides["dpi"] = 1e-2;
  run_campaign(c);
  CHECK(tolerances().dpi_gap == original);

  c.tolerance_overrides.clear();
  c.tolerance_overrides["flawed-step"] = 1.0;
  CHECK_THROWS_AS(run_campaign(c), DomainError);
}

TEST_CASE("parallel campaign reports are byte-identical") {
  Campaign c = tiny_campaign();
  c.checks = {"dpi", "isometry", "interpolation-monotonicity"};
  const std::string serial = run_campaign(c, 1).to_json().dump();
  const std::string parallel = run_campaign(c, 4).to_json().dump();
  CHECK(serial == parallel);
}

TEST_CASE("tolerance config loading") {
  const Tolerances saved = tolerances();
  const std::string path = "/tmp/relent_tol_test.json";
  {
    std::ofstream out(path);
    out << "{\"dpi_gap\": 1e-6}";
  }
  load_tolerances_from_json(path);
  CHECK(tolerances().dpi_gap == 1e-6);
  tolerances() = saved;

  {
    std::ofstream out(path);
    out << "{\"no_such_key\": 1.0}";
  }
  CHECK_THROWS(load_tolerances_from_json(path));
  tolerances() = saved;
}

TEST_CASE("witness completeness: reported failures replay to failures") {
  Campaign c = tiny_campaign();
  c.checks = {"dpi"};
  c.tolerance_overrides["dpi"] = -1.0;  // unreachable bound forces failures
  const Report report = run_campaign(c);
  REQUIRE(report.checks.size() == 1);
  REQUIRE(report.checks[0].fail > 0);
  REQUIRE(!report.checks[0].witness.is_null());
  CHECK(report.checks[0].witness["tolerance"] == -1.0);

  const Json replay = replay_witness(report.checks[0].witness);
  CHECK(!replay["pass"].get<bool>());

  // the same inputs under the default tolerance certify cleanly
  Json relaxed = report.checks[0].witness;
  relaxed.erase("tolerance");
  CHECK(replay_witness(relaxed)["pass"].get<bool>());
}
