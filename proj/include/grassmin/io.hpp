#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "grassmin/matrix.hpp"

namespace grassmin {

/// File access / parse failures, kept distinct from numerical errors so
/// the CLI can map them to their own exit code.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Text matrix format: first line "rows cols", then whitespace-separated
/// rows in decimal. Writing uses 17 significant digits so a write/load
/// round-trip is exact.
Mat load_matrix_raw(const std::string& path);

struct LoadedSym {
  SymMat mat;
  double relative_asymmetry = 0.0;
  bool symmetrized_with_warning = false;  ///< asymmetry in (1e-8, 1e-4]
};

/// Loads a square matrix and symmetrizes it. Asymmetry above 1e-4
/// (relative) is a hard error; above 1e-8 the matrix is symmetrized
/// and flagged.
LoadedSym load_sym_matrix(const std::string& path);

void save_matrix(const std::string& path, const Mat& m);
inline void save_matrix(const std::string& path, const SymMat& m) { save_matrix(path, m.mat()); }

/// Fragment file: one 0-based index per line.
std::vector<int> load_fragment(const std::string& path);

}  // namespace grassmin
