#include "swnudge/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace swnudge {

namespace {

constexpr char kMagic[4] = {'S', 'W', 'F', '1'};

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template <class T>
void put_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (size_t k = 0; k < sizeof(T) / 2; ++k) std::swap(buf[k], buf[sizeof(T) - 1 - k]);
  }
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  is.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!is) throw IoError("snapshot truncated");
  if constexpr (std::endian::native == std::endian::big) {
    for (size_t k = 0; k < sizeof(T) / 2; ++k) std::swap(buf[k], buf[sizeof(T) - 1 - k]);
  }
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void write_field(std::ostream& os, const ScalarField& f) {
  const Grid& g = f.grid();
  os.write(kMagic, 4);
  put_le<uint32_t>(os, static_cast<uint32_t>(g.nx));
  put_le<uint32_t>(os, static_cast<uint32_t>(g.ny));
  put_le<double>(os, g.dx);
  put_le<double>(os, g.dy);
  for (double v : f.data()) put_le<double>(os, v);
  if (!os) throw IoError("snapshot write failed");
}

ScalarField read_field(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw IoError("bad snapshot magic");
  const uint32_t nx = get_le<uint32_t>(is);
  const uint32_t ny = get_le<uint32_t>(is);
  const double dx = get_le<double>(is);
  const double dy = get_le<double>(is);
  if (nx < 3 || ny < 3 || nx > (1u << 20) || ny > (1u << 20))
    throw IoError("snapshot header has implausible dimensions");
  ScalarField f(Grid(static_cast<int>(nx), static_cast<int>(ny), dx, dy));
  for (double& v : f.data()) v = get_le<double>(is);
  return f;
}

void save_field(const std::string& path, const ScalarField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  write_field(os, f);
}

ScalarField load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  return read_field(is);
}

}  // namespace swnudge
