#include "termlab/net/params.hpp"

#include <cmath>
#include <stdexcept>

namespace termlab::net {

CellKind parse_cell_kind(std::string_view name) {
    if (name == "rnn") return CellKind::rnn;
    if (name == "lstm") return CellKind::lstm;
    throw std::invalid_argument("unknown cell kind: " + std::string(name));
}

std::string to_string(CellKind kind) { return kind == CellKind::rnn ? "rnn" : "lstm"; }

void validate_architecture(const Architecture& arch, std::size_t vocab_size) {
    if (arch.layers < 1) throw std::invalid_argument("architecture: layers must be >= 1");
    if (arch.hidden < 1 || arch.embedding < 1)
        throw std::invalid_argument("architecture: sizes must be >= 1");
    if (arch.tied && arch.embedding != arch.hidden)
        throw std::invalid_argument("architecture: tying requires embedding == hidden");
    if (vocab_size < 2) throw std::invalid_argument("architecture: vocabulary too small");
    if (arch.head == heads::HeadKind::va) {
        if (arch.epsilon != 0.0)
            throw std::invalid_argument("architecture: epsilon is meaningless for the va head");
    } else if (!(arch.epsilon > 0.0 && arch.epsilon < 1.0)) {
        throw std::invalid_argument("architecture: epsilon must lie in (0,1) for st/nmst");
    }
}

int ParameterStore::add(std::string name, Tensor tensor, bool trainable) {
    entries_.push_back(Entry{std::move(name), std::move(tensor), trainable});
    return static_cast<int>(entries_.size() - 1);
}

ModelParams::ModelParams(Vocabulary vocab, Architecture arch)
    : vocab_(std::move(vocab)), arch_(arch) {
    validate_architecture(arch_, vocab_.size());
    register_tensors();
}

ModelParams::ModelParams(Vocabulary vocab, Architecture arch, Rng& rng)
    : ModelParams(std::move(vocab), arch) {
    auto init = [&rng](Tensor& t, int fan_in) {
        double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (double& x : t.data) x = rng.uniform(-scale, scale);
    };
    init(store_.tensor(embedding_id_), arch_.embedding);
    for (int l = 0; l < arch_.layers; ++l) {
        init(store_.tensor(layers_[static_cast<std::size_t>(l)].w_x), layer_input_size(l));
        init(store_.tensor(layers_[static_cast<std::size_t>(l)].w_h), arch_.hidden);
        // Biases start at zero.
    }
    if (!arch_.tied) init(store_.tensor(head_id_), arch_.hidden);
}

int ModelParams::layer_input_size(int layer) const {
    return layer == 0 ? arch_.embedding : arch_.hidden;
}

void ModelParams::register_tensors() {
    const int v = static_cast<int>(vocab_.size());
    const int gates = arch_.cell == CellKind::lstm ? 4 : 1;
    embedding_id_ = store_.add("embedding", Tensor(v, arch_.embedding));
    layers_.resize(static_cast<std::size_t>(arch_.layers));
    for (int l = 0; l < arch_.layers; ++l) {
        auto tag = "layer" + std::to_string(l);
        auto& ids = layers_[static_cast<std::size_t>(l)];
        ids.w_x = store_.add(tag + ".w_x", Tensor(gates * arch_.hidden, layer_input_size(l)));
        ids.w_h = store_.add(tag + ".w_h", Tensor(gates * arch_.hidden, arch_.hidden));
        ids.b = store_.add(tag + ".b", Tensor(gates * arch_.hidden, 1));
    }
    head_id_ = arch_.tied ? embedding_id_
                          : store_.add("head.output_embedding", Tensor(v, arch_.hidden));
}

} // namespace termlab::net
