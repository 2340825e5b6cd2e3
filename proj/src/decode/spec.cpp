#include "termlab/decode/spec.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace termlab::decode {

void validate_spec(const DecoderSpec& spec) {
    if (spec.cap < 1) throw std::invalid_argument("decoder spec: cap must be >= 1");
    switch (spec.kind) {
        case DecoderKind::greedy: break;
        case DecoderKind::top_k:
        case DecoderKind::beam:
            if (spec.k < 1) throw std::invalid_argument("decoder spec: k must be >= 1");
            break;
        case DecoderKind::nucleus:
            if (!(spec.mu > 0.0 && spec.mu <= 1.0))
                throw std::invalid_argument("decoder spec: mu must lie in (0,1]");
            break;
    }
}

DecoderSpec parse_decoder_spec(std::string_view text) {
    DecoderSpec spec;
    if (text == "greedy") {
        spec.kind = DecoderKind::greedy;
        validate_spec(spec);
        return spec;
    }
    auto parse_int_arg = [&](std::string_view arg) {
        int value = 0;
        auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
        if (ec != std::errc{} || p != arg.data() + arg.size())
            throw std::invalid_argument("decoder spec: bad integer in '" + std::string(text) + "'");
        return value;
    };
    if (text.rfind("top-k:", 0) == 0) {
        spec.kind = DecoderKind::top_k;
        spec.k = parse_int_arg(text.substr(6));
    } else if (text.rfind("nucleus:", 0) == 0) {
        spec.kind = DecoderKind::nucleus;
        std::string arg(text.substr(8));
        try {
            std::size_t used = 0;
            spec.mu = std::stod(arg, &used);
            if (used != arg.size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw std::invalid_argument("decoder spec: bad threshold in '" + std::string(text) +
                                        "'");
        }
    } else if (text.rfind("beam:", 0) == 0) {
        spec.kind = DecoderKind::beam;
        spec.k = parse_int_arg(text.substr(5));
    } else {
        throw std::invalid_argument("decoder spec: unrecognized '" + std::string(text) + "'");
    }
    validate_spec(spec);
    return spec;
}

std::string to_string(const DecoderSpec& spec) {
    std::ostringstream os;
    switch (spec.kind) {
        case DecoderKind::greedy: os << "greedy"; break;
        case DecoderKind::top_k: os << "top-k:" << spec.k; break;
        case DecoderKind::nucleus: os << "nucleus:" << spec.mu; break;
        case DecoderKind::beam: os << "beam:" << spec.k; break;
    }
    return os.str();
}

} // namespace termlab::decode
