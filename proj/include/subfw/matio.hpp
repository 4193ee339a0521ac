#ifndef SUBFW_MATIO_HPP
#define SUBFW_MATIO_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace subfw {

// FWMAT1: 8-byte magic "FWMAT1\0\0", u64 little-endian n and d, then d
// column blocks of n little-endian IEEE-754 doubles (column-major).
// FWVEC1: 8-byte magic "FWVEC1\0\0", u64 n, then n doubles.

class FileFormatError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, Truncated, DimensionMismatch, Io };

  FileFormatError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct MatrixHeader {
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
};

extern const char kMatMagic[8];
extern const char kVecMagic[8];
constexpr std::size_t kMatHeaderBytes = 24;  // magic + n + d
constexpr std::size_t kVecHeaderBytes = 16;  // magic + n

void write_matrix_file(const std::string& path, int rows, int cols,
                       const std::vector<double>& column_major);
void write_vector_file(const std::string& path,
                       const std::vector<double>& values);

MatrixHeader read_matrix_header(const std::string& path);
std::vector<double> read_matrix_file(const std::string& path, int* rows,
                                     int* cols);
std::vector<double> read_vector_file(const std::string& path);

}  // namespace subfw

#endif
