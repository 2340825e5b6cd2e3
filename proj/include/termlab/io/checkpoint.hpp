#pragma once

#include <filesystem>
#include <string>

#include "termlab/net/params.hpp"

namespace termlab::io {

inline constexpr int kCheckpointFormatVersion = 1;

/// Side metadata a checkpoint carries so evaluation needs no extra flags.
struct CheckpointMeta {
    std::string tokenizer = "char";
    int context_length = 10;
};

/// Container layout: 8-byte magic "TLABCKPT", little-endian u64 header
/// length, UTF-8 JSON header (format version, vocabulary, architecture,
/// head record, tensor manifest with name/shape/byte offset), then the
/// tensor payloads as little-endian float32 in manifest order.
void save_checkpoint(const std::filesystem::path& path, const net::ModelParams& params,
                     const CheckpointMeta& meta);

struct LoadedCheckpoint {
    net::ModelParams params;
    CheckpointMeta meta;
};

/// Validates magic, version, shapes against the architecture, and payload
/// length (truncation reports the failing byte offset).
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

} // namespace termlab::io
