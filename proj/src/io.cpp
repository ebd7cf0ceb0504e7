#include "grassmin/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace grassmin {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
  throw IoError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Mat load_matrix_raw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");

  std::string line;
  int lineno = 0;
  auto next_content_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_content_line()) parse_fail(path, lineno, "empty file, expected 'rows cols' header");
  int rows = 0, cols = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> rows >> cols) || rows < 1 || cols < 1)
      parse_fail(path, lineno, "bad header, expected 'rows cols' with positive integers");
    std::string extra;
    if (hs >> extra) parse_fail(path, lineno, "trailing tokens after 'rows cols' header");
  }

  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!next_content_line())
      parse_fail(path, lineno, "unexpected end of file, expected row " + std::to_string(i + 1) +
                                   " of " + std::to_string(rows));
    std::istringstream rs(line);
    for (int j = 0; j < cols; ++j) {
      if (!(rs >> m(i, j)))
        parse_fail(path, lineno, "row " + std::to_string(i + 1) + " has fewer than " +
                                     std::to_string(cols) + " columns (failed at column " +
                                     std::to_string(j + 1) + ")");
    }
    std::string extra;
    if (rs >> extra)
      parse_fail(path, lineno, "row " + std::to_string(i + 1) + " has more than " +
                                   std::to_string(cols) + " columns");
  }
  return m;
}

LoadedSym load_sym_matrix(const std::string& path) {
  const Mat raw = load_matrix_raw(path);
  if (!raw.square())
    throw IoError(path + ": expected a square matrix, got " + format_dims(raw));

  const double asym = frob_norm(raw - transpose(raw));
  const double rel = asym / std::max(1.0, frob_norm(raw));
  if (rel > 1e-4)
    throw IoError(path + ": relative asymmetry " + std::to_string(rel) +
                             " exceeds the hard limit 1e-4");
  LoadedSym out;
  out.relative_asymmetry = rel;
  out.symmetrized_with_warning = rel > 1e-8;
  out.mat = SymMat::from(raw);
  return out;
}

void save_matrix(const std::string& path, const Mat& m) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << m.rows() << " " << m.cols() << "\n";
  char buf[40];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << buf << (j + 1 == m.cols() ? "" : " ");
    }
    out << "\n";
  }
  if (!out) throw IoError(path + ": write failed");
}

std::vector<int> load_fragment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::vector<int> idx;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream ls(line);
    int v = 0;
    if (!(ls >> v)) parse_fail(path, lineno, "expected one 0-based index per line");
    std::string extra;
    if (ls >> extra) parse_fail(path, lineno, "expected one 0-based index per line");
    if (v < 0) parse_fail(path, lineno, "negative fragment index");
    idx.push_back(v);
  }
  if (idx.empty()) throw IoError(path + ": empty fragment file");
  return idx;
}

}  // namespace grassmin
