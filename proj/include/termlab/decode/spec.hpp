#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace termlab::decode {

enum class DecoderKind { greedy, top_k, nucleus, beam };

/// Which algorithm to run, with its width/threshold, the hard length cap,
/// and the sampling seed (ignored by greedy and beam).
struct DecoderSpec {
    DecoderKind kind = DecoderKind::greedy;
    int k = 1;          // top_k and beam widths
    double mu = 1.0;    // nucleus threshold, in (0, 1]
    std::int64_t cap = 10000;
    std::uint64_t seed = 0;
};

void validate_spec(const DecoderSpec& spec);

/// Parses the CLI grammar: "greedy", "top-k:K", "nucleus:MU", "beam:K".
/// Cap and seed keep their defaults and are set by the caller.
DecoderSpec parse_decoder_spec(std::string_view text);

/// Inverse of parse_decoder_spec (cap and seed are not rendered).
std::string to_string(const DecoderSpec& spec);

} // namespace termlab::decode
