#include "relent/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace relent {

namespace {

struct SampleOutcome {
  bool pass = true;
  double defect = 0.0;
  Json inputs;  // serialized only when a witness is requested
};

std::pair<DensityOperator, DensityOperator> sample_state_pair(
    int d, const std::string& rank_mode, CounterRng& rng, bool allow_unnested,
    std::uint64_t sample_index) {
  if (rank_mode == "full") {
    DensityOperator rho = random_density(d, d, rng);
    DensityOperator sigma = random_density(d, d, rng);
    return {std::move(rho), std::move(sigma)};
  }
  if (rank_mode != "deficient")
    throw DomainError("campaign: unknown rank mode '" + rank_mode + "'");
  const int r_sigma = 1 + static_cast<int>(rng.uniform_int(d));
  DensityOperator sigma = random_density(d, r_sigma, rng);
  if (allow_unnested && sample_index % 2 == 1 && r_sigma < d) {
    const int r_rho = 1 + static_cast<int>(rng.uniform_int(d));
    DensityOperator rho = random_density(d, r_rho, rng);
    return {std::move(rho), std::move(sigma)};
  }
  const int r_rho = 1 + static_cast<int>(rng.uniform_int(r_sigma));
  DensityOperator rho = random_density_in_support(sigma, r_rho, rng);
  return {std::move(rho), std::move(sigma)};
}

PositiveForm random_positive_form(int n, int rank, CounterRng& rng) {
  const Matrix g = random_ginibre(n, rank, rng);
  return PositiveForm(g * g.adjoint());
}

PositiveForm compressed_form(const PositiveForm& form, CounterRng& rng) {
  const Matrix s = sqrt_psd(HermitianOperator::symmetrized(form.gram())).mat();
  const Matrix u = random_unitary(form.dim(), rng);
  RealVector d(form.dim());
  for (int i = 0; i < form.dim(); ++i) d[i] = rng.uniform();
  const Matrix m =
      u * d.asDiagonal().toDenseMatrix().cast<Complex>() * u.adjoint();
  return PositiveForm(s * m * s);
}

std::vector<double> chain_t_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 7; ++k) grid.push_back(k / 8.0);
  return grid;
}

Json states_witness(const DensityOperator& rho, const DensityOperator& sigma) {
  Json inputs;
  inputs["rho"] = state_to_json(rho);
  inputs["sigma"] = state_to_json(sigma);
  return inputs;
}

// ---- individual check runners -------------------------------------------

SampleOutcome run_dpi(int d_a, int d_b, const std::string& rank_mode,
                      CounterRng& rng, bool want_witness) {
  auto [rho, sigma] = sample_state_pair(d_a, rank_mode, rng, false, 0);
  const QuantumChannel channel = random_channel(d_a, d_b, rng);

  const RelEntropyResult s_in = relative_entropy_support(rho, sigma);
  const DensityOperator c_rho = apply_channel(channel, rho);
  const DensityOperator c_sigma = apply_channel(channel, sigma);
  const RelEntropyResult s_out = relative_entropy_support(c_rho, c_sigma);

  SampleOutcome out;
  if (!s_in.value.is_finite()) {
    out.pass = s_out.value.is_finite() || true;  // +inf bound is vacuous
    out.defect = -1.0;
  } else if (!s_out.value.is_finite()) {
    out.pass = false;
    out.defect = 1e300;
  } else {
    out.defect = s_out.value.value() - s_in.value.value();
    out.pass = out.defect <= tolerances().dpi_gap;
  }
  if (!out.pass && want_witness) {
    out.inputs = states_witness(rho, sigma);
    out.inputs["channel"] = channel_to_json(channel);
  }
  return out;
}

SampleOutcome run_key_inequality(int d_a, int d_b,
                                 const std::string& rank_mode, CounterRng& rng,
                                 bool want_witness) {
  (void)rank_mode;
  const BipartiteDims dims{d_a, d_b};
  const DensityOperator rho = random_density(dims.d_ab(), dims.d_ab(), rng);
  const DensityOperator sigma = random_density(dims.d_ab(), dims.d_ab(), rng);
  const KeyInequalityCertificate cert =
      check_key_inequality(rho.op(), sigma.op(), dims, rng);

  SampleOutcome out;
  out.defect = -cert.loewner.min_eig;
  out.pass = cert.loewner.holds &&
             cert.trace_identity_defect <= tolerances().trace_identity * 100;
  if (!out.pass && want_witness) out.inputs = states_witness(rho, sigma);
  return out;
}

SampleOutcome run_isometry(int d_a, int d_b, const std::string& rank_mode,
                           CounterRng& rng, bool want_witness) {
  (void)rank_mode;
  const BipartiteDims dims{d_a, d_b};
  const DensityOperator rho = random_density(dims.d_ab(), dims.d_ab(), rng);

  SampleOutcome out;
  const ReductionIsometry v = reduction_isometry(rho.op(), dims);
  out.defect = std::max(v.isometry_defect, v.bridge_defect);
  out.pass = out.defect <= tolerances().isometry;
  if (!out.pass && want_witness) {
    out.inputs["rho"] = state_to_json(rho);
  }
  return out;
}

SampleOutcome run_interpolation_monotonicity(int d_a, int d_b,
                                             const std::string& rank_mode,
                                             CounterRng& rng,
                                             bool want_witness) {
  const int n = d_a * d_b;
  const int rank = rank_mode == "full" ? n : 1 + static_cast<int>(rng.uniform_int(n));
  const PositiveForm alpha = random_positive_form(n, rank, rng);
  const PositiveForm beta = random_positive_form(n, rank, rng);
  const PositiveForm alpha_prime = compressed_form(alpha, rng);
  const PositiveForm beta_prime = compressed_form(beta, rng);

  const GridCertificate cert = check_interpolation_monotonicity(
      alpha_prime, alpha, beta_prime, beta, dyadic_grid(8));

  SampleOutcome out;
  out.defect = -cert.worst_min_eig;
  out.pass = cert.holds;
  if (!out.pass && want_witness) {
    out.inputs["alpha"] = form_to_json(alpha);
    out.inputs["beta"] = form_to_json(beta);
    out.inputs["alpha_prime"] = form_to_json(alpha_prime);
    out.inputs["beta_prime"] = form_to_json(beta_prime);
  }
  return out;
}

SampleOutcome run_pullback(int d_a, int d_b, const std::string& rank_mode,
                           CounterRng& rng, bool want_witness) {
  (void)rank_mode;
  const int n = d_a * d_b;
  const int m = d_a;
  const PositiveForm alpha = random_positive_form(n, n, rng);
  const PositiveForm beta = random_positive_form(n, n, rng);
  const Matrix psi = random_ginibre(n, m, rng);

  const GridCertificate cert =
      check_pullback_inequality(psi, alpha, beta, dyadic_grid(8));

  SampleOutcome out;
  out.defect = -cert.worst_min_eig;
  out.pass = cert.holds;
  if (!out.pass && want_witness) {
    out.inputs["alpha"] = form_to_json(alpha);
    out.inputs["beta"] = form_to_json(beta);
    out.inputs["psi"] = matrix_to_json(psi);
  }
  return out;
}

SampleOutcome run_fawzi_renner(int d_a, int d_b, const std::string& rank_mode,
                               CounterRng& rng, bool want_witness) {
  (void)rank_mode;
  const DensityOperator rho = random_density(d_a, d_a, rng);
  const DensityOperator sigma = random_density(d_a, d_a, rng);
  const QuantumChannel channel = random_channel(d_a, d_b, rng);

  const FawziRennerCertificate cert = fawzi_renner_check(rho, sigma, channel);

  SampleOutcome out;
  out.defect = -cert.slack;
  out.pass = cert.holds;
  if (!out.pass && want_witness) {
    out.inputs = states_witness(rho, sigma);
    out.inputs["channel"] = channel_to_json(channel);
  }
  return out;
}

SampleOutcome run_equivalence(int d_a, int d_b, const std::string& rank_mode,
                              CounterRng& rng, bool want_witness,
                              std::uint64_t sample_index) {
  (void)d_b;
  auto [rho, sigma] =
      sample_state_pair(d_a, rank_mode, rng, true, sample_index);

  const RelEntropyResult support = relative_entropy_support(rho, sigma);
  const RegularizedRelEntropy reg =
      relative_entropy_regularized(rho, sigma, default_eps_schedule());

  SampleOutcome out;
  const bool support_finite = support.value.is_finite();
  if (support_finite == reg.divergent) {
    out.pass = false;
    out.defect = 1.0;  // branch incoherence
  } else if (support_finite) {
    // extrapolated limit: the raw tail value keeps an eps / lambda_min bias
    // for spectra near the regularization scale
    const double s = support.value.value();
    out.defect = std::abs(s - reg.limit_estimate) / (1.0 + std::abs(s));
    out.pass = out.defect <= tolerances().regularized_agreement_rel;
  } else {
    out.pass = true;
    out.defect = -1.0;
  }
  if (!out.pass && want_witness) out.inputs = states_witness(rho, sigma);
  return out;
}

SampleOutcome run_flawed_step(std::uint64_t sample_index, bool want_witness) {
  static const std::vector<double> grid = default_figure_grid();
  const double x = grid[sample_index % grid.size()];
  const auto rows = contractive_jensen_table(JensenVariant::shifted_inverse,
                                             0.5, 0.5, {x});
  SampleOutcome out;
  out.defect = rows[0].rhs - rows[0].lhs;  // negative = violation margin
  out.pass = rows[0].violation;
  if (!out.pass && want_witness) {
    out.inputs["x"] = x;
    out.inputs["alpha"] = 0.5;
    out.inputs["xi"] = 0.5;
  }
  return out;
}

SampleOutcome run_petz_chain(int d_a, int d_b, const std::string& rank_mode,
                             CounterRng& rng, bool want_witness) {
  const BipartiteDims dims{d_a, d_b};
  auto [rho, sigma] =
      sample_state_pair(dims.d_ab(), rank_mode, rng, false, 0);
  const MonotonicityCertificate cert =
      corrected_monotonicity(rho, sigma, dims, default_eps_schedule());

  SampleOutcome out;
  out.pass = cert.holds;
  double defect = std::max({-cert.worst_key_min_eig, -cert.worst_log_min_eig,
                            -cert.worst_jensen_min_eig});
  if (cert.s_joint.value.is_finite() && cert.s_reduced.value.is_finite())
    defect = std::max(defect, -cert.final_gap);
  out.defect = defect;
  if (!out.pass && want_witness) out.inputs = states_witness(rho, sigma);
  return out;
}

SampleOutcome run_uhlmann_chain(int d_a, int d_b, const std::string& rank_mode,
                                CounterRng& rng, bool want_witness) {
  const BipartiteDims dims{d_a, d_b};
  auto [rho, sigma] =
      sample_state_pair(dims.d_ab(), rank_mode, rng, false, 0);
  const UhlmannCertificate cert =
      uhlmann_monotonicity(rho, sigma, dims, chain_t_grid());

  SampleOutcome out;
  out.pass = cert.holds;
  out.defect = std::max({-cert.worst_pullback_gap, -cert.worst_interp_min_eig,
                         -cert.worst_quotient_gap,
                         cert.s_joint.value.is_finite() &&
                                 cert.s_reduced.value.is_finite()
                             ? -cert.final_gap
                             : -1.0});
  if (!out.pass && want_witness) out.inputs = states_witness(rho, sigma);
  return out;
}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names = {
      "dpi",        "key-inequality",
      "isometry",   "interpolation-monotonicity",
      "pull-back",  "fawzi-renner",
      "equivalence", "flawed-step",
      "petz-chain", "uhlmann-chain"};
  return names;
}

bool full_rank_only(const std::string& check) {
  return check == "key-inequality" || check == "isometry" ||
         check == "pull-back" || check == "fawzi-renner";
}

bool dims_independent(const std::string& check) {
  return check == "flawed-step";
}

SampleOutcome dispatch(const std::string& check, int d_a, int d_b,
                       const std::string& rank_mode, CounterRng& rng,
                       bool want_witness, std::uint64_t sample_index) {
  if (check == "dpi") return run_dpi(d_a, d_b, rank_mode, rng, want_witness);
  if (check == "key-inequality")
    return run_key_inequality(d_a, d_b, rank_mode, rng, want_witness);
  if (check == "isometry")
    return run_isometry(d_a, d_b, rank_mode, rng, want_witness);
  if (check == "interpolation-monotonicity")
    return run_interpolation_monotonicity(d_a, d_b, rank_mode, rng,
                                          want_witness);
  if (check == "pull-back")
    return run_pullback(d_a, d_b, rank_mode, rng, want_witness);
  if (check == "fawzi-renner")
    return run_fawzi_renner(d_a, d_b, rank_mode, rng, want_witness);
  if (check == "equivalence")
    return run_equivalence(d_a, d_b, rank_mode, rng, want_witness,
                           sample_index);
  if (check == "flawed-step")
    return run_flawed_step(sample_index, want_witness);
  if (check == "petz-chain")
    return run_petz_chain(d_a, d_b, rank_mode, rng, want_witness);
  if (check == "uhlmann-chain")
    return run_uhlmann_chain(d_a, d_b, rank_mode, rng, want_witness);
  throw DomainError("campaign: unknown check '" + check + "'");
}

double* headline_tolerance_field(const std::string& check) {
  Tolerances& tol = tolerances();
  if (check == "dpi") return &tol.dpi_gap;
  if (check == "key-inequality") return &tol.key_inequality;
  if (check == "isometry") return &tol.isometry;
  if (check == "interpolation-monotonicity") return &tol.form_order;
  if (check == "pull-back") return &tol.pullback;
  if (check == "fawzi-renner") return &tol.fawzi_renner_slack;
  if (check == "equivalence") return &tol.regularized_agreement_rel;
  if (check == "petz-chain" || check == "uhlmann-chain")
    return &tol.chain_gap;
  return nullptr;
}

void apply_tolerance_override(const std::string& check, double value) {
  double* field = headline_tolerance_field(check);
  if (!field)
    throw DomainError("campaign: no tolerance override for '" + check + "'");
  *field = value;
}

}  // namespace

std::vector<std::string> Campaign::default_checks() {
  return {"dpi",        "key-inequality",
          "isometry",   "interpolation-monotonicity",
          "pull-back",  "fawzi-renner",
          "equivalence"};
}

Campaign Campaign::from_json(const Json& j) {
  Campaign c;
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("d_a_grid")) c.d_a_grid = j["d_a_grid"].get<std::vector<int>>();
  if (j.contains("d_b_grid")) c.d_b_grid = j["d_b_grid"].get<std::vector<int>>();
  if (j.contains("rank_modes"))
    c.rank_modes = j["rank_modes"].get<std::vector<std::string>>();
  if (j.contains("samples_per_cell"))
    c.samples_per_cell = j["samples_per_cell"].get<int>();
  if (j.contains("checks"))
    c.checks = j["checks"].get<std::vector<std::string>>();
  if (j.contains("tolerance_overrides"))
    for (const auto& [key, value] : j["tolerance_overrides"].items())
      c.tolerance_overrides[key] = value.get<double>();
  if (c.d_a_grid.empty() || c.d_b_grid.empty() || c.rank_modes.empty() ||
      c.samples_per_cell < 0)
    throw SchemaError("campaign: invalid grids");
  return c;
}

Json Campaign::to_json() const {
  Json j;
  j["seed"] = seed;
  j["d_a_grid"] = d_a_grid;
  j["d_b_grid"] = d_b_grid;
  j["rank_modes"] = rank_modes;
  j["samples_per_cell"] = samples_per_cell;
  j["checks"] = checks;
  Json overrides = Json::object();
  for (const auto& [key, value] : tolerance_overrides) overrides[key] = value;
  j["tolerance_overrides"] = std::move(overrides);
  return j;
}

long Report::total_failures() const {
  long total = 0;
  for (const CheckStats& c : checks) total += c.fail;
  return total;
}

Json Report::to_json() const {
  Json j;
  j["seed"] = seed;
  Json checks_json = Json::array();
  for (const CheckStats& c : checks) {
    Json cj;
    cj["check"] = c.check;
    cj["pass"] = c.pass;
    cj["fail"] = c.fail;
    cj["worst_defect"] = c.worst_defect;
    Json cells = Json::array();
    for (const CellStats& cell : c.cells) {
      Json cellj;
      cellj["d_a"] = cell.d_a;
      cellj["d_b"] = cell.d_b;
      cellj["rank_mode"] = cell.rank_mode;
      cellj["pass"] = cell.pass;
      cellj["fail"] = cell.fail;
      cellj["worst_defect"] = cell.worst_defect;
      cells.push_back(std::move(cellj));
    }
    cj["cells"] = std::move(cells);
    cj["witness"] = c.witness.is_null() ? Json() : c.witness;
    checks_json.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks_json);
  j["total_failures"] = total_failures();
  return j;
}

namespace {

struct CellResult {
  CellStats stats;
  Json witness;  // first failing sample in the cell, null when clean
};

CellResult run_cell(const Campaign& campaign, const std::string& check,
                    int d_a, int d_b, const std::string& mode) {
  CellResult result;
  result.stats.d_a = d_a;
  result.stats.d_b = d_b;
  result.stats.rank_mode = mode;
  result.stats.worst_defect = -std::numeric_limits<double>::infinity();

  std::ostringstream label;
  label << check << '/' << d_a << 'x' << d_b << '/' << mode;
  for (int s = 0; s < campaign.samples_per_cell; ++s) {
    CounterRng rng = CounterRng::substream(campaign.seed, label.str(),
                                           static_cast<std::uint64_t>(s));
    SampleOutcome outcome;
    try {
      outcome = dispatch(check, d_a, d_b, mode, rng, result.witness.is_null(),
                         static_cast<std::uint64_t>(s));
    } catch (const Error& e) {
      outcome.pass = false;
      outcome.defect = 1e300;
      outcome.inputs = Json::object();
      outcome.inputs["error"] = e.what();
    }
    result.stats.worst_defect =
        std::max(result.stats.worst_defect, outcome.defect);
    if (outcome.pass) {
      ++result.stats.pass;
    } else {
      ++result.stats.fail;
      if (result.witness.is_null()) {
        Json witness;
        witness["check"] = check;
        witness["d_a"] = d_a;
        witness["d_b"] = d_b;
        witness["rank_mode"] = mode;
        witness["sample_index"] = s;
        witness["seed"] = campaign.seed;
        witness["defect"] = outcome.defect;
        // the tolerance in force, so a replay reproduces the verdict
        if (const double* field = headline_tolerance_field(check))
          witness["tolerance"] = *field;
        witness["inputs"] = outcome.inputs;
        result.witness = std::move(witness);
      }
    }
  }
  return result;
}

}  // namespace

Report run_campaign(const Campaign& campaign, int jobs) {
  const Tolerances saved = tolerances();
  for (const auto& [check, value] : campaign.tolerance_overrides)
    apply_tolerance_override(check, value);

  Report report;
  report.seed = campaign.seed;
  try {
    for (const std::string& check : campaign.checks) {
      if (std::find(known_checks().begin(), known_checks().end(), check) ==
          known_checks().end())
        throw DomainError("campaign: unknown check '" + check + "'");
    }
    for (const std::string& check : campaign.checks) {
      CheckStats stats;
      stats.check = check;
      stats.worst_defect = -std::numeric_limits<double>::infinity();

      std::vector<std::tuple<int, int, std::string>> cells;
      if (dims_independent(check)) {
        cells.emplace_back(0, 0, "n/a");
      } else {
        for (int d_a : campaign.d_a_grid)
          for (int d_b : campaign.d_b_grid)
            for (const std::string& mode : campaign.rank_modes) {
              if (full_rank_only(check) && mode != "full") continue;
              cells.emplace_back(d_a, d_b, mode);
            }
      }

      std::vector<CellResult> results(cells.size());
      if (jobs > 1) {
        std::vector<std::future<CellResult>> futures;
        futures.reserve(cells.size());
        for (const auto& [d_a, d_b, mode] : cells)
          futures.push_back(std::async(std::launch::async, run_cell,
                                       std::cref(campaign), std::cref(check),
                                       d_a, d_b, mode));
        for (std::size_t i = 0; i < futures.size(); ++i)
          results[i] = futures[i].get();
      } else {
        for (std::size_t i = 0; i < cells.size(); ++i) {
          const auto& [d_a, d_b, mode] = cells[i];
          results[i] = run_cell(campaign, check, d_a, d_b, mode);
        }
      }

      // merge in fixed cell order so parallel runs stay byte-identical
      for (CellResult& result : results) {
        stats.pass += result.stats.pass;
        stats.fail += result.stats.fail;
        stats.worst_defect =
            std::max(stats.worst_defect, result.stats.worst_defect);
        if (stats.witness.is_null() && !result.witness.is_null())
          stats.witness = std::move(result.witness);
        stats.cells.push_back(std::move(result.stats));
      }
      report.checks.push_back(std::move(stats));
    }
  } catch (...) {
    tolerances() = saved;
    throw;
  }
  tolerances() = saved;
  return report;
}

namespace {

struct ToleranceGuard {
  Tolerances saved = tolerances();
  ~ToleranceGuard() { tolerances() = saved; }
};

}  // namespace

Json replay_witness(const Json& witness) {
  if (!witness.is_object() || !witness.contains("check"))
    throw SchemaError("witness: missing 'check' field");
  const std::string check = witness["check"].get<std::string>();
  if (!witness.contains("inputs") || !witness["inputs"].is_object())
    throw SchemaError("witness: missing 'inputs' object");
  const Json& inputs = witness["inputs"];

  ToleranceGuard guard;
  if (witness.contains("tolerance"))
    if (double* field = headline_tolerance_field(check))
      *field = witness["tolerance"].get<double>();

  Json result;
  result["check"] = check;

  auto load_pair = [&]() {
    if (!inputs.contains("rho") || !inputs.contains("sigma"))
      throw SchemaError("witness: inputs must carry rho and sigma");
    return std::make_pair(state_from_json(inputs["rho"]),
                          state_from_json(inputs["sigma"]));
  };
  auto dims_from = [&]() {
    if (!witness.contains("d_a") || !witness.contains("d_b"))
      throw SchemaError("witness: missing dimensions");
    return BipartiteDims{witness["d_a"].get<int>(), witness["d_b"].get<int>()};
  };

  if (check == "dpi") {
    auto [rho, sigma] = load_pair();
    if (!inputs.contains("channel"))
      throw SchemaError("witness: dpi inputs require a channel");
    const QuantumChannel channel = channel_from_json(inputs["channel"]);
    const DpiCertificate cert = dpi_via_stinespring(rho, sigma, channel);
    result["pass"] = cert.holds;
    result["s_input"] = cert.input_entropy.value.str();
    result["s_output"] = cert.output_entropy.value.str();
    result["gap"] = cert.gap;
    result["dilation_defect"] = cert.dilation_defect;
    result["trace_monotonicity_gap"] = cert.trace_monotonicity_gap;
    result["unitary_invariance_defect"] = cert.unitary_invariance_defect;
    result["additivity_defect"] = cert.additivity_defect;
    return result;
  }
  if (check == "key-inequality") {
    auto [rho, sigma] = load_pair();
    CounterRng rng(0, 0);
    const KeyInequalityCertificate cert =
        check_key_inequality(rho.op(), sigma.op(), dims_from(), rng);
    result["pass"] = cert.loewner.holds;
    result["min_eig"] = cert.loewner.min_eig;
    result["trace_identity_defect"] = cert.trace_identity_defect;
    return result;
  }
  if (check == "isometry") {
    if (!inputs.contains("rho"))
      throw SchemaError("witness: isometry inputs require rho");
    const DensityOperator rho = state_from_json(inputs["rho"]);
    const ReductionIsometry v = reduction_isometry(rho.op(), dims_from());
    result["pass"] = v.isometry_defect <= tolerances().isometry;
    result["isometry_defect"] = v.isometry_defect;
    result["bridge_defect"] = v.bridge_defect;
    result["operator_norm"] = v.operator_norm;
    return result;
  }
  if (check == "equivalence") {
    auto [rho, sigma] = load_pair();
    const RelEntropyResult support = relative_entropy_support(rho, sigma);
    const RegularizedRelEntropy reg =
        relative_entropy_regularized(rho, sigma, default_eps_schedule());
    result["support_value"] = support.value.str();
    result["support_overlap"] = support.support_overlap;
    result["regularized_values"] = reg.values;
    result["divergent"] = reg.divergent;
    result["slope"] = reg.slope;
    bool pass = support.value.is_finite() == !reg.divergent;
    if (pass && support.value.is_finite()) {
      const double s = support.value.value();
      const double defect =
          std::abs(s - reg.values.back()) / (1.0 + std::abs(s));
      result["relative_defect"] = defect;
      pass = defect <= tolerances().regularized_agreement_rel;
    }
    result["pass"] = pass;
    return result;
  }
  if (check == "petz-chain") {
    auto [rho, sigma] = load_pair();
    const MonotonicityCertificate cert = corrected_monotonicity(
        rho, sigma, dims_from(), default_eps_schedule());
    result["pass"] = cert.holds;
    result["regularized"] = cert.regularized;
    result["final_gap"] = cert.final_gap;
    Json links = Json::array();
    for (const ChainLink& link : cert.links)
      links.push_back(chain_link_to_json(link));
    result["links"] = std::move(links);
    return result;
  }
  if (check == "uhlmann-chain") {
    auto [rho, sigma] = load_pair();
    const UhlmannCertificate cert =
        uhlmann_monotonicity(rho, sigma, dims_from(), chain_t_grid());
    result["pass"] = cert.holds;
    result["final_gap"] = cert.final_gap;
    Json links = Json::array();
    for (const ChainLink& link : cert.links)
      links.push_back(chain_link_to_json(link));
    result["links"] = std::move(links);
    return result;
  }
  if (check == "fawzi-renner") {
    auto [rho, sigma] = load_pair();
    if (!inputs.contains("channel"))
      throw SchemaError("witness: fawzi-renner inputs require a channel");
    const FawziRennerCertificate cert =
        fawzi_renner_check(rho, sigma, channel_from_json(inputs["channel"]));
    result["pass"] = cert.holds;
    result["entropy_loss"] = cert.entropy_loss;
    result["fidelity"] = cert.fidelity_value;
    result["bound"] = cert.bound;
    result["slack"] = cert.slack;
    return result;
  }
  if (check == "interpolation-monotonicity") {
    for (const char* key : {"alpha", "beta", "alpha_prime", "beta_prime"})
      if (!inputs.contains(key))
        throw SchemaError("witness: interpolation inputs incomplete");
    const GridCertificate cert = check_interpolation_monotonicity(
        form_from_json(inputs["alpha_prime"]), form_from_json(inputs["alpha"]),
        form_from_json(inputs["beta_prime"]), form_from_json(inputs["beta"]),
        dyadic_grid(8));
    result["pass"] = cert.holds;
    result["min_eigs"] = cert.min_eigs;
    return result;
  }
  if (check == "pull-back") {
    for (const char* key : {"alpha", "beta", "psi"})
      if (!inputs.contains(key))
        throw SchemaError("witness: pull-back inputs incomplete");
    const GridCertificate cert = check_pullback_inequality(
        matrix_from_json(inputs["psi"]), form_from_json(inputs["alpha"]),
        form_from_json(inputs["beta"]), dyadic_grid(8));
    result["pass"] = cert.holds;
    result["min_eigs"] = cert.min_eigs;
    return result;
  }
  if (check == "flawed-step") {
    if (!inputs.contains("x")) throw SchemaError("witness: missing x");
    const auto rows = contractive_jensen_table(
        JensenVariant::shifted_inverse,
        inputs.contains("alpha") ? inputs["alpha"].get<double>() : 0.5,
        inputs.contains("xi") ? inputs["xi"].get<double>() : 0.5,
        {inputs["x"].get<double>()});
    result["pass"] = rows[0].violation;
    result["lhs"] = rows[0].lhs;
    result["rhs"] = rows[0].rhs;
    return result;
  }
  throw SchemaError("witness: unknown check '" + check + "'");
}

}  // namespace relent
