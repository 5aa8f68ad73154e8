#pragma once

#include <filesystem>
#include <iosfwd>

#include "kgex/embedding.hpp"

namespace kgex {

// Binary checkpoint layout, all integers little endian:
//   bytes 0..7   magic "KGEXMDL1"
//   u32          model kind ordinal
//   u32          entity_dim
//   u32          relation_dim
//   u64          entity_count
//   u64          relation_count
//   u64          seed used at init
//   u64          core element count (0 unless tucker)
//   f32[]        entity table, relation table, core, row major
// Parameters are float32 on disk, so a round trip is exact only to float
// precision. Bad magic, an unknown kind, or a short file raise ParseError.
void save_checkpoint(const ModelParams& params, std::ostream& out);
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);

ModelParams load_checkpoint(std::istream& in);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace kgex
