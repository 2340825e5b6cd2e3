#include "termlab/core/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <stdexcept>

namespace termlab {

Vocabulary::Vocabulary(std::vector<std::string> tokens, TokenId eos_id,
                       std::optional<TokenId> unk_id)
    : tokens_(std::move(tokens)), eos_id_(eos_id), unk_id_(unk_id) {
    if (tokens_.size() < 2) throw std::invalid_argument("Vocabulary: size must be >= 2");
    if (eos_id_ < 0 || static_cast<std::size_t>(eos_id_) >= tokens_.size())
        throw std::invalid_argument("Vocabulary: eos_id out of range");
    if (unk_id_ && (*unk_id_ < 0 || static_cast<std::size_t>(*unk_id_) >= tokens_.size()))
        throw std::invalid_argument("Vocabulary: unk_id out of range");
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        auto [it, inserted] = index_.emplace(tokens_[i], static_cast<TokenId>(i));
        if (!inserted)
            throw std::invalid_argument("Vocabulary: duplicate token '" + tokens_[i] + "'");
    }
}

std::optional<TokenId> Vocabulary::id_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

TokenizerMode parse_tokenizer_mode(std::string_view name) {
    if (name == "char" || name == "chars") return TokenizerMode::chars;
    if (name == "word" || name == "words") return TokenizerMode::words;
    throw std::invalid_argument("unknown tokenizer mode: " + std::string(name));
}

std::string to_string(TokenizerMode mode) {
    return mode == TokenizerMode::chars ? "char" : "word";
}

static std::vector<std::string> split_utf8_scalars(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        unsigned char lead = static_cast<unsigned char>(line[i]);
        std::size_t len = 1;
        if (lead >= 0xF0)
            len = 4;
        else if (lead >= 0xE0)
            len = 3;
        else if (lead >= 0xC0)
            len = 2;
        if (i + len > line.size()) len = 1;
        // Continuation bytes must match; fall back to a single byte otherwise.
        for (std::size_t k = 1; k < len; ++k) {
            if ((static_cast<unsigned char>(line[i + k]) & 0xC0) != 0x80) {
                len = 1;
                break;
            }
        }
        out.emplace_back(line.substr(i, len));
        i += len;
    }
    return out;
}

static std::vector<std::string> split_whitespace(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.emplace_back(line.substr(start, i - start));
    }
    return out;
}

std::vector<std::string> tokenize_line(std::string_view line, TokenizerMode mode) {
    return mode == TokenizerMode::chars ? split_utf8_scalars(line) : split_whitespace(line);
}

std::vector<std::vector<std::string>> read_corpus(const std::filesystem::path& path,
                                                  TokenizerMode mode) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path.string());
    std::vector<std::vector<std::string>> corpus;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto tokens = tokenize_line(line, mode);
        if (!tokens.empty()) corpus.push_back(std::move(tokens));
    }
    return corpus;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus_tokens,
                            std::size_t min_freq, bool add_unk) {
    if (corpus_tokens.empty()) throw std::invalid_argument("build_vocabulary: empty corpus");

    std::map<std::string, std::size_t> freq;
    for (const auto& line : corpus_tokens)
        for (const auto& tok : line) {
            if (tok == Vocabulary::kEos || tok == Vocabulary::kUnk)
                throw std::invalid_argument("build_vocabulary: corpus contains reserved token '" +
                                            tok + "'");
            ++freq[tok];
        }

    std::vector<std::pair<std::string, std::size_t>> kept;
    kept.reserve(freq.size());
    for (const auto& [tok, n] : freq)
        if (n >= min_freq) kept.emplace_back(tok, n);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    std::vector<std::string> tokens;
    tokens.reserve(kept.size() + 2);
    tokens.emplace_back(Vocabulary::kEos);
    std::optional<TokenId> unk_id;
    if (add_unk) {
        unk_id = static_cast<TokenId>(tokens.size());
        tokens.emplace_back(Vocabulary::kUnk);
    }
    for (auto& [tok, n] : kept) tokens.push_back(std::move(tok));

    if (tokens.size() < 2)
        throw std::invalid_argument("build_vocabulary: no tokens survive min_freq");
    return Vocabulary(std::move(tokens), /*eos_id=*/0, unk_id);
}

Sequence encode(const Vocabulary& vocab, std::span<const std::string> tokens, bool append_eos) {
    std::vector<TokenId> ids;
    ids.reserve(tokens.size() + 1);
    for (const auto& tok : tokens) {
        auto id = vocab.id_of(tok);
        if (!id) {
            if (!vocab.unk_id())
                throw std::runtime_error("encode: unknown token '" + tok +
                                         "' and vocabulary has no <unk>");
            id = vocab.unk_id();
        }
        ids.push_back(*id);
    }
    if (append_eos) ids.push_back(vocab.eos_id());
    return Sequence::from_ids(std::move(ids), vocab.eos_id());
}

std::vector<std::string> decode_tokens(const Vocabulary& vocab, std::span<const TokenId> ids) {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (TokenId id : ids) out.push_back(vocab.token(id));
    return out;
}

} // namespace termlab
