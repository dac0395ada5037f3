#pragma once

#include <string>
#include <vector>

#include "zklab/field.hpp"

namespace zklab {

enum class Scheme { IFRK4, ETDRK4 };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& s);

struct SolverConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::IFRK4;
  bool dealias = true;
  int record_every = 1;
  bool nonlinear = true;
  // Largest allowed linear phase per step, in units of 2*pi.
  double phase_budget = 64.0;
};

struct Trajectory {
  std::vector<SpectralField> states;
  std::vector<double> times;
  SolverConfig config;
};

}  // namespace zklab
