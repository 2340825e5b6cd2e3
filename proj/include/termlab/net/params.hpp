#pragma once

#include <string>
#include <vector>

#include "termlab/core/rng.hpp"
#include "termlab/core/tensor.hpp"
#include "termlab/core/vocab.hpp"
#include "termlab/heads/heads.hpp"

namespace termlab::net {

enum class CellKind { rnn, lstm };

CellKind parse_cell_kind(std::string_view name);
std::string to_string(CellKind kind);

/// Serializable model shape: backbone cell, depth and widths, input/output
/// embedding tying, and the head record.
struct Architecture {
    CellKind cell = CellKind::rnn;
    int layers = 1;
    int hidden = 64;
    int embedding = 64; // must equal hidden when tied
    bool tied = true;
    heads::HeadKind head = heads::HeadKind::va;
    double epsilon = 0.0;
};

void validate_architecture(const Architecture& arch, std::size_t vocab_size);

/// Flat registry of named parameter tensors. Ids are dense and stable;
/// the registration order is the canonical serialization order.
class ParameterStore {
public:
    int add(std::string name, Tensor tensor, bool trainable = true);

    std::size_t count() const { return entries_.size(); }
    Tensor& tensor(int id) { return entries_[static_cast<std::size_t>(id)].tensor; }
    const Tensor& tensor(int id) const { return entries_[static_cast<std::size_t>(id)].tensor; }
    const std::string& name(int id) const { return entries_[static_cast<std::size_t>(id)].name; }
    bool trainable(int id) const { return entries_[static_cast<std::size_t>(id)].trainable; }
    void set_trainable(int id, bool on) { entries_[static_cast<std::size_t>(id)].trainable = on; }

private:
    struct Entry {
        std::string name;
        Tensor tensor;
        bool trainable;
    };
    std::vector<Entry> entries_;
};

/// A complete model: vocabulary, architecture, and every parameter tensor.
/// Canonical tensor order: embedding, then per-layer (w_x, w_h, b), then
/// the untied output embedding when present. LSTM gate order is i,f,g,o.
class ModelParams {
public:
    struct LayerIds {
        int w_x = -1;
        int w_h = -1;
        int b = -1;
    };

    /// Zero-initialized (checkpoint loading fills values in afterwards).
    ModelParams(Vocabulary vocab, Architecture arch);

    /// Random initialization, uniform in +-1/sqrt(fan_in).
    ModelParams(Vocabulary vocab, Architecture arch, Rng& rng);

    const Vocabulary& vocab() const { return vocab_; }
    const Architecture& arch() const { return arch_; }
    ParameterStore& store() { return store_; }
    const ParameterStore& store() const { return store_; }

    int embedding_param() const { return embedding_id_; }
    int head_param() const { return head_id_; } // == embedding_param() when tied
    const std::vector<LayerIds>& layer_params() const { return layers_; }

    /// Input size of layer l: embedding for layer 0, hidden above.
    int layer_input_size(int layer) const;

private:
    void register_tensors();

    Vocabulary vocab_;
    Architecture arch_;
    ParameterStore store_;
    int embedding_id_ = -1;
    int head_id_ = -1;
    std::vector<LayerIds> layers_;
};

} // namespace termlab::net
