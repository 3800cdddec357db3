#include "ovml/grad/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace ovml::grad {

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'O', 'V', 'M', 'L'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is, const std::string& what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw FormatError("checkpoint truncated while reading " + what);
  }
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const NamedTensors& tensors) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot open checkpoint for writing: " + path);
  os.write(kMagic, 4);
  write_pod<std::uint32_t>(os, kVersion);
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(t.rank()));
    for (int e : t.shape()) write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(e));
    for (double v : t.value()) write_pod<float>(os, static_cast<float>(v));
  }
  if (!os) throw FormatError("write failed for checkpoint: " + path);
}

NamedTensors load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open checkpoint: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("checkpoint magic mismatch in " + path);
  }
  const auto version = read_pod<std::uint32_t>(is, "version");
  if (version != kVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version) +
                      " in " + path);
  }
  const auto count = read_pod<std::uint32_t>(is, "tensor count");
  NamedTensors out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = read_pod<std::uint32_t>(is, "name length");
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len)) {
      throw FormatError("checkpoint truncated while reading name");
    }
    const auto rank = read_pod<std::uint32_t>(is, "rank");
    std::vector<int> shape(rank);
    for (auto& e : shape) {
      const auto ext = read_pod<std::uint64_t>(is, "extent");
      e = static_cast<int>(ext);
    }
    const std::int64_t n = shape_numel(shape);
    std::vector<double> data(static_cast<std::size_t>(n));
    for (auto& v : data) v = read_pod<float>(is, "payload of " + name);
    out.emplace_back(std::move(name),
                     Tensor::from_data(std::move(data), std::move(shape)));
  }
  return out;
}

Tensor expect_tensor(const NamedTensors& tensors, const std::string& name,
                     const std::vector<int>& shape) {
  for (const auto& [n, t] : tensors) {
    if (n == name) {
      if (t.shape() != shape) {
        throw FormatError("checkpoint tensor '" + name + "' has shape " +
                          shape_str(t.shape()) + ", expected " + shape_str(shape));
      }
      return t;
    }
  }
  throw FormatError("checkpoint is missing tensor '" + name + "'");
}

}  // namespace ovml::grad
