#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "schnapsen/nn.hpp"
#include "schnapsen/replay.hpp"

namespace schnapsen {

enum class StoreErrorCode {
  IoFailure,          // file missing or unreadable/unwritable
  BadMagic,           // leading bytes are not the expected tag
  BadFormatVersion,   // known magic, unknown layout revision
  BadDims,            // model dimensions differ from the fixed topology
  BadChecksum,        // truncated or corrupted checkpoint
  CountMismatch,      // dataset header count disagrees with the body length
  InvalidRecord,      // dataset record holds an out-of-range value
  BadEncoderVersion,  // file was written against a different feature encoding
};

class StoreError : public std::runtime_error {
 public:
  StoreError(StoreErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  StoreErrorCode code() const { return code_; }

 private:
  StoreErrorCode code_;
};

// IEEE CRC-32 (polynomial 0xEDB88320), the checksum sealing checkpoints.
std::uint32_t crc32(const void* data, std::size_t size);

// Model checkpoint, little-endian: magic "SNPW", format version u16,
// encoder_version u16, dims (173, 512, 1) as u32 triple, then w1 row-major
// f32, b1 f32, w2 f32, b2 f32, then CRC-32 over all preceding bytes.
void save_model(const Mlp& net, const std::filesystem::path& path);
Mlp load_model(const std::filesystem::path& path);

// Replay dataset, little-endian: magic "SNPD", format version u16,
// encoder_version u16, sample count u64, then per sample 173 x f32 plus one
// u8 label. The header count doubling as a length check is the integrity
// guard; there is no trailing checksum.
void save_dataset(const ReplayDataset& dataset,
                  const std::filesystem::path& path);
ReplayDataset load_dataset(const std::filesystem::path& path);

}  // namespace schnapsen
