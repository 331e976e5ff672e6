#pragma once

#include <string>
#include <vector>

#include "epilab/passivity.hpp"

namespace epilab {

// Built-in reference setups: feedback parameters, output coefficients,
// equilibrium seed and storage certificate for the three certified cases
// shipped with the tool. Matrices are stored exactly as published upstream
// in this project's configuration records; x_star seeds are Newton-refined
// at load time.
struct Preset {
  std::string name;
  FeedbackLaw law;        // y_star = NaN until resolved
  OutputMap c;            // output used for feedback
  State x_star_seed;
  StorageCertificate storage;
  double rho_reference = 0.0;     // certified level where one is quoted
  double radius_reference = 0.0;  // quoted ball radius
};

struct ResolvedPreset {
  Preset preset;
  State x_star;   // refined to residual <= 1e-11
  double y_star;  // c^T x_star
  Mat6 A;         // open-loop Jacobian at x_star
  Mat6 A_cl;      // A - k g c^T
};

std::vector<std::string> preset_names();

// Throws std::out_of_range for an unknown name.
Preset get_preset(const std::string& name);

// Refines the seed at u_star and fills the derived fields.
ResolvedPreset resolve_preset(const Preset& p, const EpileptorParams& params);

}  // namespace epilab
