#include "kgex/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "kgex/csv.hpp"
#include "kgex/error.hpp"

namespace kgex {
namespace {

constexpr char kMagic[8] = {'K', 'G', 'E', 'X', 'M', 'D', 'L', '1'};

void put_u32(std::ostream& out, std::uint32_t value) {
    std::array<char, 4> bytes;
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
    out.write(bytes.data(), bytes.size());
}

void put_u64(std::ostream& out, std::uint64_t value) {
    std::array<char, 8> bytes;
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
    out.write(bytes.data(), bytes.size());
}

std::uint32_t take_u32(std::istream& in) {
    std::array<unsigned char, 4> bytes;
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
        throw ParseError("truncated checkpoint header");
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) value |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    return value;
}

std::uint64_t take_u64(std::istream& in) {
    std::array<unsigned char, 8> bytes;
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
        throw ParseError("truncated checkpoint header");
    std::uint64_t value = 0;
    for (int i = 0; i < 8; ++i) value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return value;
}

void put_table(std::ostream& out, const std::vector<double>& table) {
    for (double x : table) {
        float f = static_cast<float>(x);
        std::uint32_t bits;
        std::memcpy(&bits, &f, sizeof(bits));
        put_u32(out, bits);
    }
}

void take_table(std::istream& in, std::vector<double>& table, std::size_t count) {
    table.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t bits = 0;
        std::array<unsigned char, 4> bytes;
        if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
            throw ParseError("truncated checkpoint table");
        for (int j = 0; j < 4; ++j) bits |= static_cast<std::uint32_t>(bytes[j]) << (8 * j);
        float f;
        std::memcpy(&f, &bits, sizeof(f));
        table[i] = static_cast<double>(f);
    }
}

}  // namespace

void save_checkpoint(const ModelParams& params, std::ostream& out) {
    out.write(kMagic, sizeof(kMagic));
    put_u32(out, static_cast<std::uint32_t>(params.kind));
    put_u32(out, static_cast<std::uint32_t>(params.entity_dim));
    put_u32(out, static_cast<std::uint32_t>(params.relation_dim));
    put_u64(out, params.entity_count);
    put_u64(out, params.relation_count);
    put_u64(out, params.seed);
    put_u64(out, params.core.size());
    put_table(out, params.entities);
    put_table(out, params.relations);
    put_table(out, params.core);
    if (!out) throw IoError("failed to write checkpoint");
}

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    save_checkpoint(params, out);
}

ModelParams load_checkpoint(std::istream& in) {
    char magic[sizeof(kMagic)];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ParseError("not a model checkpoint (bad magic)");

    ModelParams params;
    std::uint32_t kind = take_u32(in);
    if (kind > static_cast<std::uint32_t>(ModelKind::TuckER))
        throw ParseError("checkpoint names an unknown model kind");
    params.kind = static_cast<ModelKind>(kind);
    params.entity_dim = take_u32(in);
    params.relation_dim = take_u32(in);
    params.entity_count = take_u64(in);
    params.relation_count = take_u64(in);
    params.seed = take_u64(in);
    std::uint64_t core_size = take_u64(in);

    std::uint64_t expected_core =
        params.kind == ModelKind::TuckER
            ? static_cast<std::uint64_t>(params.relation_dim) * params.entity_dim * params.entity_dim
            : 0;
    if (core_size != expected_core) throw ParseError("checkpoint core size mismatch");

    take_table(in, params.entities, params.entity_count * params.entity_dim);
    take_table(in, params.relations, params.relation_count * params.relation_dim);
    take_table(in, params.core, core_size);
    return params;
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path.string());
    return load_checkpoint(in);
}

}  // namespace kgex
