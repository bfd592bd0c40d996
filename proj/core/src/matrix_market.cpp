#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gadi/errors.hpp"
#include "gadi/sparse.hpp"

namespace gadi {

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("matrix market: empty stream");
  std::istringstream hdr(line);
  std::string banner, object, fmt, field, symmetry;
  hdr >> banner >> object >> fmt >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix")
    throw IoError("matrix market: bad banner");
  if (lower(fmt) != "coordinate") throw IoError("matrix market: only coordinate format supported");
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer")
    throw IoError("matrix market: only real matrices supported");
  const bool symmetric = symmetry == "symmetric";
  const bool skew = symmetry == "skew-symmetric";
  if (!symmetric && !skew && symmetry != "general")
    throw IoError("matrix market: unsupported symmetry: " + symmetry);

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream dims(line);
  index_t rows = 0, cols = 0, entries = 0;
  if (!(dims >> rows >> cols >> entries)) throw IoError("matrix market: bad size line");

  std::vector<std::tuple<index_t, index_t, double>> t;
  t.reserve(entries * (symmetric || skew ? 2 : 1));
  for (index_t k = 0; k < entries; ++k) {
    index_t i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw IoError("matrix market: truncated entry list");
    --i;
    --j;  // 1-based on disk
    t.emplace_back(i, j, v);
    if (i != j) {
      if (symmetric) t.emplace_back(j, i, v);
      if (skew) t.emplace_back(j, i, -v);
    }
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

SparseMatrix read_matrix_market_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  return read_matrix_market(f);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& A) {
  const bool symmetric = A.is_symmetric();
  out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << "\n";
  index_t entries = A.nnz();
  if (symmetric) {
    entries = 0;
    for (index_t i = 0; i < A.n_rows(); ++i)
      for (index_t k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k)
        if (A.col_idx()[k] <= i) ++entries;
  }
  out << A.n_rows() << " " << A.n_cols() << " " << entries << "\n";
  char buf[64];
  for (index_t i = 0; i < A.n_rows(); ++i)
    for (index_t k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) {
      const index_t j = A.col_idx()[k];
      if (symmetric && j > i) continue;
      std::snprintf(buf, sizeof(buf), "%" PRId64 " %" PRId64 " %.17g\n", i + 1, j + 1, A.values()[k]);
      out << buf;
    }
}

void write_matrix_market_file(const std::string& path, const SparseMatrix& A) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  write_matrix_market(f, A);
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace gadi
