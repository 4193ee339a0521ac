#include "subfw/matio.hpp"

#include <cstring>
#include <fstream>

namespace subfw {

const char kMatMagic[8] = {'F', 'W', 'M', 'A', 'T', '1', '\0', '\0'};
const char kVecMagic[8] = {'F', 'W', 'V', 'E', 'C', '1', '\0', '\0'};

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

bool get_u64(std::istream& in, std::uint64_t* v) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) return false;
  std::uint64_t x = 0;
  for (int i = 7; i >= 0; --i) x = (x << 8) | b[i];
  *v = x;
  return true;
}

void put_doubles(std::ostream& out, const double* data, std::size_t count) {
  // Little-endian IEEE-754; native layout on every supported target.
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
}

void check_magic(std::istream& in, const char expected[8],
                 const std::string& path) {
  char m[8];
  if (!in.read(m, 8) || std::memcmp(m, expected, 8) != 0)
    throw FileFormatError(FileFormatError::Kind::BadMagic,
                          "bad magic in " + path);
}

}  // namespace

void write_matrix_file(const std::string& path, int rows, int cols,
                       const std::vector<double>& column_major) {
  if (column_major.size() !=
      static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw FileFormatError(FileFormatError::Kind::DimensionMismatch,
                          "matrix payload does not match dimensions");
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw FileFormatError(FileFormatError::Kind::Io, "cannot open " + path);
  out.write(kMatMagic, 8);
  put_u64(out, static_cast<std::uint64_t>(rows));
  put_u64(out, static_cast<std::uint64_t>(cols));
  put_doubles(out, column_major.data(), column_major.size());
  if (!out)
    throw FileFormatError(FileFormatError::Kind::Io, "write failed: " + path);
}

void write_vector_file(const std::string& path,
                       const std::vector<double>& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw FileFormatError(FileFormatError::Kind::Io, "cannot open " + path);
  out.write(kVecMagic, 8);
  put_u64(out, static_cast<std::uint64_t>(values.size()));
  put_doubles(out, values.data(), values.size());
  if (!out)
    throw FileFormatError(FileFormatError::Kind::Io, "write failed: " + path);
}

MatrixHeader read_matrix_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw FileFormatError(FileFormatError::Kind::Io, "cannot open " + path);
  check_magic(in, kMatMagic, path);
  MatrixHeader h;
  if (!get_u64(in, &h.rows) || !get_u64(in, &h.cols))
    throw FileFormatError(FileFormatError::Kind::Truncated,
                          "truncated header in " + path);

  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::uint64_t>(in.tellg());
  const std::uint64_t expected = kMatHeaderBytes + h.rows * h.cols * 8;
  if (size < expected)
    throw FileFormatError(FileFormatError::Kind::Truncated,
                          "truncated payload in " + path);
  return h;
}

std::vector<double> read_matrix_file(const std::string& path, int* rows,
                                     int* cols) {
  const MatrixHeader h = read_matrix_header(path);
  std::ifstream in(path, std::ios::binary);
  in.seekg(kMatHeaderBytes);
  std::vector<double> data(h.rows * h.cols);
  if (!in.read(reinterpret_cast<char*>(data.data()),
               static_cast<std::streamsize>(data.size() * sizeof(double))))
    throw FileFormatError(FileFormatError::Kind::Truncated,
                          "truncated payload in " + path);
  *rows = static_cast<int>(h.rows);
  *cols = static_cast<int>(h.cols);
  return data;
}

std::vector<double> read_vector_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw FileFormatError(FileFormatError::Kind::Io, "cannot open " + path);
  check_magic(in, kVecMagic, path);
  std::uint64_t n = 0;
  if (!get_u64(in, &n))
    throw FileFormatError(FileFormatError::Kind::Truncated,
                          "truncated header in " + path);
  std::vector<double> values(n);
  if (!in.read(reinterpret_cast<char*>(values.data()),
               static_cast<std::streamsize>(n * sizeof(double))))
    throw FileFormatError(FileFormatError::Kind::Truncated,
                          "truncated payload in " + path);
  return values;
}

}  // namespace subfw
