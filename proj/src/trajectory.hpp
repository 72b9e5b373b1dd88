#pragma once

#include <span>
#include <string>
#include <vector>

#include "observables.hpp"

namespace socsim {

// Fixed CSV layout: t, Z, l2, l2Y, m_noncrit, mass_K<i>..., bound_rhs<i>...,
// beta_sumsq, with one mass_K/bound_rhs pair of column groups per compact.
// Values are written with 17 significant digits so a read round-trips every
// double bit-for-bit.
std::string trajectory_header(int n_compacts);

// One full double-precision value; shortest form that round-trips.
std::string format_full(double v);

// Serializes records to CSV text (header + one line per record).
std::string trajectory_to_csv(std::span<const ObservableRecord> records);

// Writes CSV to a file; throws IoError if the file cannot be written.
void write_trajectory_csv(const std::string& path,
                          std::span<const ObservableRecord> records);

// Parses a trajectory CSV (as produced above); throws IoError with the
// offending line number on any structural problem.
std::vector<ObservableRecord> parse_trajectory_csv(const std::string& text);

// Reads and parses a trajectory file; throws IoError.
std::vector<ObservableRecord> read_trajectory_csv(const std::string& path);

}  // namespace socsim
