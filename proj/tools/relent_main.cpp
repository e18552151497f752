// relent: operator-calculus verification CLI for relative entropy
// monotonicity. Exit codes: 0 = certified/success, 1 = inequality violation
// witness, 2 = input error.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "relent/harness.hpp"

using namespace relent;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInputError = 2;

struct MethodValue {
  std::string method;
  bool finite = true;
  double value = 0.0;
  std::string display() const {
    return finite ? std::to_string(value) : "infinite (support violation)";
  }
};

double neville_to_zero(const std::vector<double>& x,
                       const std::vector<double>& y) {
  std::vector<double> p = y;
  const std::size_t n = p.size();
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = 0; i + level < n; ++i)
      p[i] = (x[i + level] * p[i] - x[i] * p[i + 1]) / (x[i + level] - x[i]);
  return p[0];
}

bool is_positive_definite(const DensityOperator& state) {
  const RealVector eigs = eig_hermitian(state.op()).eigenvalues;
  return eigs.minCoeff() > support_threshold(eigs);
}

// modular route extended to singular inputs through the epsilon schedule
MethodValue modular_method(const DensityOperator& rho,
                           const DensityOperator& sigma) {
  MethodValue out;
  out.method = "modular";
  if (!support_contained(rho, sigma)) {
    out.finite = false;
    return out;
  }
  if (is_positive_definite(rho) && is_positive_definite(sigma)) {
    out.value = entropy_via_modular(rho.op(), sigma.op());
    return out;
  }
  const std::vector<double> schedule = deep_eps_schedule();
  std::vector<double> tail_eps, tail_values;
  const Matrix id = Matrix::Identity(rho.dim(), rho.dim());
  for (double eps : schedule) {
    const HermitianOperator rho_eps =
        HermitianOperator::symmetrized(rho.mat() + eps * id);
    const HermitianOperator sigma_eps =
        HermitianOperator::symmetrized(sigma.mat() + eps * id);
    tail_eps.push_back(eps);
    tail_values.push_back(entropy_via_modular(rho_eps, sigma_eps));
  }
  // extrapolate the last three terms of the schedule to eps = 0
  const std::size_t n = tail_values.size();
  const std::vector<double> x(tail_eps.end() - 3, tail_eps.end());
  const std::vector<double> y(tail_values.begin() + (n - 3),
                              tail_values.end());
  out.value = neville_to_zero(x, y);
  return out;
}

std::vector<MethodValue> compute_methods(const DensityOperator& rho,
                                         const DensityOperator& sigma,
                                         const std::vector<std::string>& which) {
  std::vector<MethodValue> values;
  for (const std::string& method : which) {
    MethodValue v;
    v.method = method;
    if (method == "support") {
      const RelEntropyResult r = relative_entropy_support(rho, sigma);
      v.finite = r.value.is_finite();
      if (v.finite) v.value = r.value.value();
    } else if (method == "regularized") {
      const RegularizedRelEntropy r =
          relative_entropy_regularized(rho, sigma, deep_eps_schedule());
      v.finite = !r.divergent;
      if (v.finite) v.value = r.limit_estimate;
    } else if (method == "modular") {
      v = modular_method(rho, sigma);
    } else if (method == "form") {
      const Matrix id = Matrix::Identity(rho.dim(), rho.dim());
      const EntropyFormResult r =
          entropy_form(rho, sigma, id, id, default_t_schedule());
      v.finite = !r.divergent;
      if (v.finite) v.value = r.value.value();
    } else {
      throw DomainError("unknown entropy method '" + method + "'");
    }
    values.push_back(std::move(v));
  }
  return values;
}

void print_links(const std::vector<ChainLink>& links) {
  for (const ChainLink& link : links) {
    std::printf("  %-62s %s %s= %+.3e\n", link.name.c_str(),
                link.ok ? "ok   " : "FAIL ", link.equality ? "defect" : "gap",
                link.gap);
  }
}

std::vector<double> parse_grid(const std::string& text) {
  // "start:stop:count" inclusive linear grid
  std::vector<double> grid;
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw DomainError("grid must be start:stop:count");
  const double start = std::stod(text.substr(0, first));
  const double stop = std::stod(text.substr(first + 1, second - first - 1));
  const int count = std::stoi(text.substr(second + 1));
  if (count < 1) throw DomainError("grid must contain at least one point");
  for (int i = 0; i < count; ++i)
    grid.push_back(count == 1
                       ? start
                       : start + (stop - start) * i / (count - 1.0));
  return grid;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot open file for writing: " + path);
  out << content;
}

std::vector<double> chain_t_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 7; ++k) grid.push_back(k / 8.0);
  return grid;
}

int cmd_entropy(const std::string& rho_path, const std::string& sigma_path,
                const std::string& method, const std::string& out_path) {
  const DensityOperator rho = load_state(rho_path);
  const DensityOperator sigma = load_state(sigma_path);
  if (rho.dim() != sigma.dim())
    throw DimensionError("states have different dimensions");

  std::vector<std::string> which;
  if (method == "all")
    which = {"support", "regularized", "modular", "form"};
  else
    which = {method};

  const std::vector<MethodValue> values = compute_methods(rho, sigma, which);

  bool all_finite = true, any_finite = false;
  double lo = 0, hi = 0;
  bool first = true;
  for (const MethodValue& v : values) {
    std::printf("%-12s %s\n", v.method.c_str(), v.display().c_str());
    all_finite = all_finite && v.finite;
    any_finite = any_finite || v.finite;
    if (v.finite) {
      lo = first ? v.value : std::min(lo, v.value);
      hi = first ? v.value : std::max(hi, v.value);
      first = false;
    }
  }
  const bool branch_coherent = (all_finite == any_finite) || values.size() == 1;
  const double spread = first ? 0.0 : hi - lo;
  const bool agree = branch_coherent &&
                     (first || spread <= tolerances().entropy_cross_method);
  if (values.size() > 1)
    std::printf("max spread = %.3e (%s)\n", spread,
                agree ? "methods agree" : "METHODS DISAGREE");

  if (!out_path.empty()) {
    Json j;
    j["inputs_hash"] = inputs_hash({&rho.mat(), &sigma.mat()});
    for (const MethodValue& v : values)
      j["values"][v.method] = v.finite ? Json(v.value) : Json("infinite");
    j["branch"] = all_finite ? "finite" : "infinite (support violation)";
    j["max_spread"] = spread;
    j["agree"] = agree;
    write_json_file(out_path, j);
  }
  return agree ? kExitOk : kExitViolation;
}

int cmd_figures(const std::string& which, double alpha, double xi,
                const std::string& grid_text, const std::string& out_path) {
  const JensenVariant variant = which == "jensen-inverse"
                                    ? JensenVariant::shifted_inverse
                                    : JensenVariant::negative_log;
  if (which != "jensen-inverse" && which != "jensen-log")
    throw DomainError("--which must be jensen-inverse or jensen-log");
  const std::vector<double> grid =
      grid_text.empty() ? default_figure_grid() : parse_grid(grid_text);
  const auto rows = contractive_jensen_table(variant, alpha, xi, grid);

  long violations = 0;
  for (const auto& row : rows) violations += row.violation ? 1 : 0;
  const std::string csv = jensen_table_csv(rows);
  if (out_path.empty())
    std::fputs(csv.c_str(), stdout);
  else
    write_text_file(out_path, csv);
  std::fprintf(stderr, "%ld of %zu grid points violate the inequality\n",
               violations, rows.size());
  return kExitOk;
}

int cmd_dpi(const std::string& rho_path, const std::string& sigma_path,
            const std::string& channel_path, const std::string& out_path) {
  const DensityOperator rho = load_state(rho_path);
  const DensityOperator sigma = load_state(sigma_path);
  const QuantumChannel channel = load_channel(channel_path);

  const DpiCertificate cert = dpi_via_stinespring(rho, sigma, channel);
  std::printf("S(rho||sigma)           = %s\n",
              cert.input_entropy.value.str().c_str());
  std::printf("S(C(rho)||C(sigma))     = %s\n",
              cert.output_entropy.value.str().c_str());
  std::printf("gap (input - output)    = %+.6e\n", cert.gap);
  std::printf("dilation defect         = %.3e\n", cert.dilation_defect);
  std::printf("trace monotonicity gap  = %+.3e\n", cert.trace_monotonicity_gap);
  std::printf("unitary invariance      = %.3e\n",
              cert.unitary_invariance_defect);
  std::printf("additivity defect       = %.3e\n", cert.additivity_defect);
  std::printf("certified: %s\n", cert.holds ? "yes" : "NO");

  if (!out_path.empty()) {
    Json j;
    j["inputs_hash"] = inputs_hash({&rho.mat(), &sigma.mat()});
    j["s_input"] = cert.input_entropy.value.str();
    j["s_output"] = cert.output_entropy.value.str();
    j["gap"] = cert.gap;
    j["dilation_defect"] = cert.dilation_defect;
    j["trace_monotonicity_gap"] = cert.trace_monotonicity_gap;
    j["unitary_invariance_defect"] = cert.unitary_invariance_defect;
    j["additivity_defect"] = cert.additivity_defect;
    j["holds"] = cert.holds;
    write_json_file(out_path, j);
  }
  return cert.holds ? kExitOk : kExitViolation;
}

int cmd_chain(bool petz, const std::string& rho_path,
              const std::string& sigma_path, int d_a, int d_b,
              const std::string& out_path, const std::string& trace_path) {
  const DensityOperator rho = load_state(rho_path);
  const DensityOperator sigma = load_state(sigma_path);
  const BipartiteDims dims{d_a, d_b};
  if (rho.dim() != dims.d_ab())
    throw DimensionError("state dimension does not equal d_a * d_b");

  Json j;
  j["inputs_hash"] = inputs_hash({&rho.mat(), &sigma.mat()});
  bool holds = false;
  if (petz) {
    const MonotonicityCertificate cert =
        corrected_monotonicity(rho, sigma, dims, default_eps_schedule());
    if (cert.regularized) {
      std::printf("singular inputs: certified along the epsilon schedule\n");
      std::printf("  eps:");
      for (double e : cert.eps_used) std::printf(" %.0e", e);
      std::printf("\n");
    }
    print_links(cert.links);
    std::printf("S(rho||sigma)            = %s\n",
                cert.s_joint.value.str().c_str());
    std::printf("S(Tr_b rho||Tr_b sigma)  = %s\n",
                cert.s_reduced.value.str().c_str());
    std::printf("entropy gap              = %+.6e\n", cert.final_gap);
    std::printf("certified: %s\n", cert.holds ? "yes" : "NO");
    holds = cert.holds;
    j["regularized"] = cert.regularized;
    j["final_gap"] = cert.final_gap;
    j["s_joint"] = cert.s_joint.value.str();
    j["s_reduced"] = cert.s_reduced.value.str();
    Json links = Json::array();
    for (const ChainLink& link : cert.links)
      links.push_back(chain_link_to_json(link));
    j["links"] = std::move(links);
  } else {
    const UhlmannCertificate cert =
        uhlmann_monotonicity(rho, sigma, dims, chain_t_grid());
    print_links(cert.links);
    std::printf("S(rho||sigma)            = %s\n",
                cert.s_joint.value.str().c_str());
    std::printf("S(Tr_b rho||Tr_b sigma)  = %s\n",
                cert.s_reduced.value.str().c_str());
    std::printf("entropy gap              = %+.6e\n", cert.final_gap);
    std::printf("certified: %s\n", cert.holds ? "yes" : "NO");
    holds = cert.holds;
    j["final_gap"] = cert.final_gap;
    j["s_joint"] = cert.s_joint.value.str();
    j["s_reduced"] = cert.s_reduced.value.str();
    Json links = Json::array();
    for (const ChainLink& link : cert.links)
      links.push_back(chain_link_to_json(link));
    j["links"] = std::move(links);

    if (!trace_path.empty()) {
      const Matrix id = Matrix::Identity(dims.d_ab(), dims.d_ab());
      const EntropyFormResult trace =
          entropy_form(rho, sigma, id, id, default_t_schedule());
      write_text_file(trace_path, interpolation_trace_csv(trace));
    }
  }
  if (!out_path.empty()) write_json_file(out_path, j);
  return holds ? kExitOk : kExitViolation;
}

int cmd_campaign(const std::string& config_path, const std::string& out_path,
                 int jobs) {
  const Campaign campaign = Campaign::from_json(load_json_file(config_path));
  const Report report = run_campaign(campaign, jobs);
  for (const CheckStats& stats : report.checks)
    std::printf("%-28s pass %-7ld fail %-5ld worst defect %+.3e\n",
                stats.check.c_str(), stats.pass, stats.fail,
                stats.worst_defect);
  std::printf("total failures: %ld\n", report.total_failures());
  if (!out_path.empty()) write_json_file(out_path, report.to_json());
  return report.total_failures() == 0 ? kExitOk : kExitViolation;
}

int cmd_recovery(const std::string& sigma_path, const std::string& channel_path,
                 const std::string& rho_path, const std::string& out_path) {
  const DensityOperator sigma = load_state(sigma_path);
  const QuantumChannel channel = load_channel(channel_path);
  const DensityOperator rho = load_state(rho_path);

  const DensityOperator recovered = petz_recovery(sigma, channel, rho);
  const double identity_defect = recovery_identity_defect(sigma, channel);
  std::printf("recovery identity defect ||P(C(sigma)) - sigma||_F = %.3e\n",
              identity_defect);
  if (!out_path.empty()) {
    Json j = state_to_json(recovered);
    j["recovery_identity_defect"] = identity_defect;
    write_json_file(out_path, j);
  } else {
    std::cout << state_to_json(recovered).dump(2) << "\n";
  }
  return identity_defect <= tolerances().recovery_identity ? kExitOk
                                                           : kExitViolation;
}

int cmd_replay(const std::string& witness_path) {
  const Json result = replay_witness(load_json_file(witness_path));
  std::cout << result.dump(2) << "\n";
  return result.contains("pass") && result["pass"].get<bool>()
             ? kExitOk
             : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "relent: certifies relative-entropy monotonicity proofs numerically"};
  app.require_subcommand(1);

  if (const char* config = std::getenv("RELENT_TOL_CONFIG")) {
    try {
      load_tolerances_from_json(config);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error loading tolerance config: %s\n", e.what());
      return kExitInputError;
    }
  }

  // entropy
  std::string rho_path, sigma_path, channel_path, out_path, trace_path;
  std::string method = "all";
  CLI::App* entropy = app.add_subcommand(
      "entropy", "relative entropy of two states by one or all methods");
  entropy->add_option("rho", rho_path, "density matrix JSON")->required();
  entropy->add_option("sigma", sigma_path, "density matrix JSON")->required();
  entropy->add_option("--method", method,
                      "support|regularized|modular|form|all");
  entropy->add_option("--out", out_path, "write result JSON here");

  // figures
  std::string which = "jensen-inverse", grid_text;
  double alpha = 0.5, xi = 0.5;
  CLI::App* figures = app.add_subcommand(
      "figures", "CSV data for the scalar Jensen counterexample figures");
  figures->add_option("--which", which, "jensen-inverse|jensen-log");
  figures->add_option("--alpha", alpha, "contraction coefficient in (0,1]");
  figures->add_option("--xi", xi, "shift parameter (jensen-inverse)");
  figures->add_option("--grid", grid_text, "start:stop:count");
  figures->add_option("--out", out_path, "CSV file (stdout when omitted)");

  // dpi
  CLI::App* dpi = app.add_subcommand(
      "dpi", "data-processing certificate for a channel, chain replayed");
  dpi->add_option("rho", rho_path)->required();
  dpi->add_option("sigma", sigma_path)->required();
  dpi->add_option("channel", channel_path, "channel JSON (Kraus family)")
      ->required();
  dpi->add_option("--out", out_path);

  // chains
  int d_a = 2, d_b = 2;
  CLI::App* petz_chain = app.add_subcommand(
      "petz-chain", "modular-operator monotonicity chain, link by link");
  petz_chain->add_option("rho", rho_path)->required();
  petz_chain->add_option("sigma", sigma_path)->required();
  petz_chain->add_option("--da", d_a, "dimension of subsystem a")->required();
  petz_chain->add_option("--db", d_b, "dimension of subsystem b")->required();
  petz_chain->add_option("--out", out_path);

  CLI::App* uhlmann_chain = app.add_subcommand(
      "uhlmann-chain", "interpolation monotonicity chain, link by link");
  uhlmann_chain->add_option("rho", rho_path)->required();
  uhlmann_chain->add_option("sigma", sigma_path)->required();
  uhlmann_chain->add_option("--da", d_a)->required();
  uhlmann_chain->add_option("--db", d_b)->required();
  uhlmann_chain->add_option("--out", out_path);
  uhlmann_chain->add_option("--trace-csv", trace_path,
                            "write the difference-quotient trace CSV");

  // campaign
  std::string config_path;
  int jobs = 1;
  CLI::App* campaign = app.add_subcommand(
      "campaign", "seeded randomized certification campaign");
  campaign->add_option("config", config_path, "campaign config JSON")
      ->required();
  campaign->add_option("--out", out_path, "write report JSON here");
  campaign->add_option("--jobs", jobs, "parallel cells (report unchanged)");

  // recovery
  CLI::App* recovery = app.add_subcommand(
      "recovery", "Petz recovery map anchored at sigma applied to rho");
  recovery->add_option("sigma", sigma_path)->required();
  recovery->add_option("channel", channel_path)->required();
  recovery->add_option("rho", rho_path)->required();
  recovery->add_option("--out", out_path);

  // replay
  std::string witness_path;
  CLI::App* replay = app.add_subcommand(
      "replay", "re-execute a serialized campaign witness verbosely");
  replay->add_option("witness", witness_path, "witness JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (entropy->parsed())
      return cmd_entropy(rho_path, sigma_path, method, out_path);
    if (figures->parsed())
      return cmd_figures(which, alpha, xi, grid_text, out_path);
    if (dpi->parsed())
      return cmd_dpi(rho_path, sigma_path, channel_path, out_path);
    if (petz_chain->parsed())
      return cmd_chain(true, rho_path, sigma_path, d_a, d_b, out_path, "");
    if (uhlmann_chain->parsed())
      return cmd_chain(false, rho_path, sigma_path, d_a, d_b, out_path,
                       trace_path);
    if (campaign->parsed()) return cmd_campaign(config_path, out_path, jobs);
    if (recovery->parsed())
      return cmd_recovery(sigma_path, channel_path, rho_path, out_path);
    if (replay->parsed()) return cmd_replay(witness_path);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  }
  return kExitInputError;
}
