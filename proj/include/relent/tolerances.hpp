#pragma once

#include <string>

namespace relent {

// Central numerical tolerance configuration. Every certificate and invariant
// check references these fields symbolically; nothing is inlined at call
// sites, so a single override file retunes the whole library.
struct Tolerances {
  // linear algebra
  double hermitian_rel = 1e-10;      // * (1 + ||A||_F)
  double recomposition_rel = 1e-10;  // * (1 + ||A||_F)
  double orthonormality = 1e-10;
  double support_rel = 1e-10;        // * (1 + lambda_max)
  double cluster_rel = 1e-8;         // * (1 + lambda_max), eigenvalue grouping
  double loewner = 1e-9;

  // states
  double state_trace = 1e-10;
  double regularized_agreement_rel = 1e-5;  // * (1 + |S|)
  double divergence_slope = 0.01;

  // channels
  double channel_completeness = 1e-10;
  double dilation_roundtrip = 1e-9;
  double duality_probe = 1e-10;

  // entropy
  double entropy_cross_method = 1e-7;
  double additivity = 1e-8;
  double unitary_invariance = 1e-8;
  double klein_slack = 1e-9;
  double dpi_gap = 1e-8;

  // modular machinery
  double superop_action = 1e-10;
  double superop_hermiticity = 1e-10;
  double isometry = 1e-9;
  double contraction_slack = 1e-9;
  double key_inequality = 1e-9;
  double modular_agreement = 1e-8;
  double chain_gap = 1e-8;
  double trace_identity = 1e-10;
  double recovery_identity = 1e-9;
  double factorization = 1e-9;
  double fawzi_renner_slack = 1e-7;
  double fidelity_symmetry = 1e-8;

  // sesquilinear forms
  double form_reproduction = 1e-9;
  double representation_independence = 1e-8;
  double interpolation_composition = 1e-8;
  double domination_slack = 1e-9;
  double maximality = 1e-9;
  double form_order = 1e-9;
  double pullback = 1e-9;
  double quotient_comparison = 1e-8;
};

// Mutable process-wide configuration. Load overrides once at startup
// (the CLI honors RELENT_TOL_CONFIG); not synchronized for concurrent writes.
Tolerances& tolerances();

// Reads a flat JSON object {"field": value, ...}; unknown keys are an error.
void load_tolerances_from_json(const std::string& path);

}  // namespace relent
