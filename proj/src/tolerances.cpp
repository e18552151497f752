#include "relent/tolerances.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace relent {

Tolerances& tolerances() {
  static Tolerances t;
  return t;
}

void load_tolerances_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tolerance config: " + path);
  nlohmann::json j;
  in >> j;
  Tolerances& t = tolerances();

  auto set = [&](const std::string& key, double& field) {
    if (auto it = j.find(key); it != j.end()) {
      field = it->get<double>();
      j.erase(it);
    }
  };
  set("hermitian_rel", t.hermitian_rel);
  set("recomposition_rel", t.recomposition_rel);
  set("orthonormality", t.orthonormality);
  set("support_rel", t.support_rel);
  set("cluster_rel", t.cluster_rel);
  set("loewner", t.loewner);
  set("state_trace", t.state_trace);
  set("regularized_agreement_rel", t.regularized_agreement_rel);
  set("divergence_slope", t.divergence_slope);
  set("channel_completeness", t.channel_completeness);
  set("dilation_roundtrip", t.dilation_roundtrip);
  set("duality_probe", t.duality_probe);
  set("entropy_cross_method", t.entropy_cross_method);
  set("additivity", t.additivity);
  set("unitary_invariance", t.unitary_invariance);
  set("klein_slack", t.klein_slack);
  set("dpi_gap", t.dpi_gap);
  set("superop_action", t.superop_action);
  set("superop_hermiticity", t.superop_hermiticity);
  set("isometry", t.isometry);
  set("contraction_slack", t.contraction_slack);
  set("key_inequality", t.key_inequality);
  set("modular_agreement", t.modular_agreement);
  set("chain_gap", t.chain_gap);
  set("trace_identity", t.trace_identity);
  set("recovery_identity", t.recovery_identity);
  set("factorization", t.factorization);
  set("fawzi_renner_slack", t.fawzi_renner_slack);
  set("fidelity_symmetry", t.fidelity_symmetry);
  set("form_reproduction", t.form_reproduction);
  set("representation_independence", t.representation_independence);
  set("interpolation_composition", t.interpolation_composition);
  set("domination_slack", t.domination_slack);
  set("maximality", t.maximality);
  set("form_order", t.form_order);
  set("pullback", t.pullback);
  set("quotient_comparison", t.quotient_comparison);

  if (!j.empty())
    throw std::runtime_error("unknown tolerance key: " + j.begin().key());
}

}  // namespace relent
