#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "termlab/core/types.hpp"

namespace termlab {

/// Token inventory with a distinguished end-of-sequence token and an
/// optional unknown token. Immutable after construction.
class Vocabulary {
public:
    static constexpr const char* kEos = "<eos>";
    static constexpr const char* kUnk = "<unk>";

    Vocabulary(std::vector<std::string> tokens, TokenId eos_id,
               std::optional<TokenId> unk_id = std::nullopt);

    std::size_t size() const { return tokens_.size(); }
    TokenId eos_id() const { return eos_id_; }
    std::optional<TokenId> unk_id() const { return unk_id_; }
    const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
    const std::vector<std::string>& tokens() const { return tokens_; }
    std::optional<TokenId> id_of(std::string_view token) const;

private:
    std::vector<std::string> tokens_;
    TokenId eos_id_;
    std::optional<TokenId> unk_id_;
    std::unordered_map<std::string, TokenId> index_;
};

enum class TokenizerMode { chars, words };

TokenizerMode parse_tokenizer_mode(std::string_view name);
std::string to_string(TokenizerMode mode);

/// Splits one line into tokens. "chars" treats each Unicode scalar as a
/// token (invalid UTF-8 bytes become single-byte tokens); "words" splits
/// on runs of whitespace.
std::vector<std::string> tokenize_line(std::string_view line, TokenizerMode mode);

/// Reads a UTF-8 corpus, one sequence per line. Blank lines are skipped.
std::vector<std::vector<std::string>> read_corpus(const std::filesystem::path& path,
                                                  TokenizerMode mode);

/// Builds the canonical vocabulary: eos first, then unk (when requested),
/// then corpus tokens ordered by (descending frequency, ascending lexical).
/// Tokens seen fewer than `min_freq` times are dropped.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus_tokens,
                            std::size_t min_freq, bool add_unk);

/// Maps token strings to ids; unknown strings map to unk when the
/// vocabulary has one and throw otherwise.
Sequence encode(const Vocabulary& vocab, std::span<const std::string> tokens, bool append_eos);

/// Inverse of encode for display and reports.
std::vector<std::string> decode_tokens(const Vocabulary& vocab, std::span<const TokenId> ids);

} // namespace termlab
