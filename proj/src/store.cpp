#include "schnapsen/store.hpp"

#include <array>
#include <iterator>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace schnapsen {
namespace {

constexpr std::uint16_t kFormatVersion = 1;
constexpr char kModelMagic[4] = {'S', 'N', 'P', 'W'};
constexpr char kDatasetMagic[4] = {'S', 'N', 'P', 'D'};

constexpr std::size_t kModelFloats =
    static_cast<std::size_t>(kHiddenUnits) * kNumFeatures + kHiddenUnits +
    kHiddenUnits + 1;
constexpr std::size_t kModelHeaderBytes = 4 + 2 + 2 + 3 * 4;
constexpr std::size_t kModelFileBytes =
    kModelHeaderBytes + kModelFloats * 4 + 4;
constexpr std::size_t kDatasetHeaderBytes = 4 + 2 + 2 + 8;
constexpr std::size_t kSampleBytes =
    static_cast<std::size_t>(kNumFeatures) * 4 + 1;

// --- little-endian encoding ------------------------------------------------

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

float get_f32(const std::uint8_t* p) {
  return std::bit_cast<float>(get_u32(p));
}

// --- file plumbing ----------------------------------------------------------

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw StoreError(StoreErrorCode::IoFailure,
                     "cannot open " + path.string() + " for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad())
    throw StoreError(StoreErrorCode::IoFailure,
                     "read failure on " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw StoreError(StoreErrorCode::IoFailure,
                     "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw StoreError(StoreErrorCode::IoFailure,
                     "write failure on " + path.string());
}

void check_magic(const std::vector<std::uint8_t>& bytes, const char* magic,
                 const char* what) {
  if (bytes.size() < 4 ||
      std::memcmp(bytes.data(), magic, 4) != 0)
    throw StoreError(StoreErrorCode::BadMagic,
                     std::string("not a ") + what + " file (bad magic)");
}

}  // namespace

std::uint32_t crc32(const void* data, std::size_t size) {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int bit = 0; bit < 8; ++bit)
        c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  const auto* p = static_cast<const std::uint8_t*>(data);
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < size; ++i)
    crc = table[(crc ^ p[i]) & 0xffu] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

void save_model(const Mlp& net, const std::filesystem::path& path) {
  if (net.w1.size() != static_cast<std::size_t>(kHiddenUnits) * kNumFeatures ||
      net.b1.size() != static_cast<std::size_t>(kHiddenUnits) ||
      net.w2.size() != static_cast<std::size_t>(kHiddenUnits))
    throw StoreError(StoreErrorCode::BadDims,
                     "refusing to save a malformed network");
  std::vector<std::uint8_t> bytes;
  bytes.reserve(kModelFileBytes);
  bytes.insert(bytes.end(), kModelMagic, kModelMagic + 4);
  put_u16(bytes, kFormatVersion);
  put_u16(bytes, net.encoder_version);
  put_u32(bytes, kNumFeatures);
  put_u32(bytes, kHiddenUnits);
  put_u32(bytes, 1);
  for (float v : net.w1) put_f32(bytes, v);
  for (float v : net.b1) put_f32(bytes, v);
  for (float v : net.w2) put_f32(bytes, v);
  put_f32(bytes, net.b2);
  put_u32(bytes, crc32(bytes.data(), bytes.size()));
  write_file(path, bytes);
}

Mlp load_model(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  check_magic(bytes, kModelMagic, "model checkpoint");
  if (bytes.size() < kModelHeaderBytes)
    throw StoreError(StoreErrorCode::BadChecksum,
                     "checkpoint truncated inside its header");
  const std::uint16_t version = get_u16(bytes.data() + 4);
  if (version != kFormatVersion)
    throw StoreError(StoreErrorCode::BadFormatVersion,
                     "unsupported checkpoint format version " +
                         std::to_string(version));
  const std::uint16_t encoder = get_u16(bytes.data() + 6);
  const std::uint32_t d_in = get_u32(bytes.data() + 8);
  const std::uint32_t d_hidden = get_u32(bytes.data() + 12);
  const std::uint32_t d_out = get_u32(bytes.data() + 16);
  if (d_in != kNumFeatures || d_hidden != kHiddenUnits || d_out != 1)
    throw StoreError(StoreErrorCode::BadDims,
                     "checkpoint dimensions do not match the fixed topology");
  if (bytes.size() != kModelFileBytes)
    throw StoreError(StoreErrorCode::BadChecksum,
                     "checkpoint truncated or padded");
  const std::uint32_t stored = get_u32(bytes.data() + bytes.size() - 4);
  if (crc32(bytes.data(), bytes.size() - 4) != stored)
    throw StoreError(StoreErrorCode::BadChecksum, "checkpoint checksum mismatch");
  if (encoder != kEncoderVersion)
    throw StoreError(StoreErrorCode::BadEncoderVersion,
                     "checkpoint was written for feature encoding v" +
                         std::to_string(encoder) + ", this build expects v" +
                         std::to_string(kEncoderVersion));

  Mlp net;
  net.encoder_version = encoder;
  net.w1.resize(static_cast<std::size_t>(kHiddenUnits) * kNumFeatures);
  net.b1.resize(kHiddenUnits);
  net.w2.resize(kHiddenUnits);
  const std::uint8_t* p = bytes.data() + kModelHeaderBytes;
  for (auto& v : net.w1) { v = get_f32(p); p += 4; }
  for (auto& v : net.b1) { v = get_f32(p); p += 4; }
  for (auto& v : net.w2) { v = get_f32(p); p += 4; }
  net.b2 = get_f32(p);
  return net;
}

void save_dataset(const ReplayDataset& dataset,
                  const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(kDatasetHeaderBytes + dataset.size() * kSampleBytes);
  bytes.insert(bytes.end(), kDatasetMagic, kDatasetMagic + 4);
  put_u16(bytes, kFormatVersion);
  put_u16(bytes, kEncoderVersion);
  put_u64(bytes, dataset.size());
  for (const ReplaySample& s : dataset) {
    for (float v : s.x) put_f32(bytes, v);
    bytes.push_back(s.g);
  }
  write_file(path, bytes);
}

ReplayDataset load_dataset(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  check_magic(bytes, kDatasetMagic, "replay dataset");
  if (bytes.size() < kDatasetHeaderBytes)
    throw StoreError(StoreErrorCode::CountMismatch,
                     "dataset truncated inside its header");
  const std::uint16_t version = get_u16(bytes.data() + 4);
  if (version != kFormatVersion)
    throw StoreError(StoreErrorCode::BadFormatVersion,
                     "unsupported dataset format version " +
                         std::to_string(version));
  const std::uint16_t encoder = get_u16(bytes.data() + 6);
  const std::uint64_t count = get_u64(bytes.data() + 8);
  const std::size_t body = bytes.size() - kDatasetHeaderBytes;
  if (body % kSampleBytes != 0 || body / kSampleBytes != count)
    throw StoreError(StoreErrorCode::CountMismatch,
                     "dataset header count disagrees with the body length");
  if (encoder != kEncoderVersion)
    throw StoreError(StoreErrorCode::BadEncoderVersion,
                     "dataset was written for feature encoding v" +
                         std::to_string(encoder) + ", this build expects v" +
                         std::to_string(kEncoderVersion));

  ReplayDataset dataset(count);
  const std::uint8_t* p = bytes.data() + kDatasetHeaderBytes;
  for (ReplaySample& s : dataset) {
    for (float& v : s.x) {
      v = get_f32(p);
      p += 4;
      if (!std::isfinite(v))
        throw StoreError(StoreErrorCode::InvalidRecord,
                         "dataset sample holds a non-finite feature");
    }
    s.g = *p++;
    if (s.g > 1)
      throw StoreError(StoreErrorCode::InvalidRecord,
                       "dataset label is not binary");
  }
  return dataset;
}

}  // namespace schnapsen
