#include <bit>
#include <cstring>
#include <fstream>

#include "pechaos/runio.hpp"

namespace pechaos {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

constexpr char kMagic[4] = {'P', 'E', 'C', '1'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void write_checkpoint(const std::string& path, const SpectralVelocity& v) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  out.write(kMagic, 4);
  const std::uint32_t version = kVersion;
  const std::uint32_t K = static_cast<std::uint32_t>(v.truncation());
  const std::uint64_t count = v.size();
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&K), 4);
  out.write(reinterpret_cast<const char*>(&count), 8);
  out.write(reinterpret_cast<const char*>(v.coeffs().data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  if (!out) throw std::runtime_error("short write on checkpoint " + path);
}

SpectralVelocity read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  char magic[4];
  std::uint32_t version = 0, K = 0;
  std::uint64_t count = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&K), 4);
  in.read(reinterpret_cast<char*>(&count), 8);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  if (version != kVersion)
    throw std::runtime_error("unsupported checkpoint version in " + path);
  SpectralVelocity v(static_cast<int>(K));
  if (count != v.size())
    throw std::runtime_error("checkpoint mode count does not match truncation in " + path);
  in.read(reinterpret_cast<char*>(v.coeffs().data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw std::runtime_error("truncated checkpoint " + path);
  return v;
}

}  // namespace pechaos
