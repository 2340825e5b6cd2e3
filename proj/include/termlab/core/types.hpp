#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace termlab {

using TokenId = std::int32_t;

/// A token-id sequence. `terminated` is true iff the last id is the
/// vocabulary's eos id; eos may appear at most once and only at the end.
struct Sequence {
    std::vector<TokenId> ids;
    bool terminated = false;

    std::size_t length() const { return ids.size(); }

    static Sequence from_ids(std::vector<TokenId> ids, TokenId eos_id) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (ids[i] == eos_id && i + 1 != ids.size())
                throw std::invalid_argument("Sequence: eos before final position");
        }
        Sequence s;
        s.terminated = !ids.empty() && ids.back() == eos_id;
        s.ids = std::move(ids);
        return s;
    }
};

inline bool operator==(const Sequence& a, const Sequence& b) {
    return a.ids == b.ids && a.terminated == b.terminated;
}

/// Conditioning input for generation; never contains eos.
struct Context {
    std::vector<TokenId> ids;

    static Context from_ids(std::vector<TokenId> ids, TokenId eos_id) {
        for (TokenId id : ids)
            if (id == eos_id) throw std::invalid_argument("Context: contains eos");
        return Context{std::move(ids)};
    }
};

} // namespace termlab
