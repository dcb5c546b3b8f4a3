#pragma once

#include <vector>

#include "rkhs.hpp"

namespace koop {

struct SelectionConfig {
  int l0 = 100;
  int l1 = 1000;
  double delta0 = 0.1;  // keep omega with w_{N,l0} > delta0
  double delta1 = 1.0;  // discard omega with w_{N,l1}/w_{N,l0} - 1 > delta1
};

struct CandidateEigenpair {
  double omega = 0.0;
  int r = 0;  // grid index omega = 2*pi*r / (N*dt)
  double w_l0 = 0.0;
  double w_l1 = 0.0;
  double ratio = 0.0;  // w_l1 / w_l0 - 1, +inf when w_l0 == 0
};

// Growth ratio w_l1 / w_l0 - 1 with a +inf sentinel for w_l0 == 0, so a
// zero lower-truncation norm always fails the persistence test.
double growth_ratio(double w_l0, double w_l1);

// Frequency detection: threshold the l0-truncated norms, discard candidates
// whose norm keeps growing between l0 and l1, and return the survivors
// sorted by increasing w_l1 (ties broken by increasing |omega|), i.e. most
// RKHS-regular first.
std::vector<CandidateEigenpair> select_frequencies(const NormTable& table,
                                                   const SelectionConfig& cfg);

// Frequencies n1*a1 + n2*a2 with |n1| + |n2| <= max_order, folded into
// [-pi/dt, pi/dt) by aliasing and deduplicated. Used to compare detected
// frequencies against the lattice generated by a quasiperiodic rotation.
std::vector<double> frequency_lattice(double a1, double a2, int max_order,
                                      double dt);

}  // namespace koop
