#include "termlab/io/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace termlab::io {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'T', 'L', 'A', 'B', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

json architecture_to_json(const net::Architecture& arch) {
    json j;
    j["cell"] = net::to_string(arch.cell);
    j["layers"] = arch.layers;
    j["hidden"] = arch.hidden;
    j["embedding"] = arch.embedding;
    j["tied"] = arch.tied;
    return j;
}

net::Architecture architecture_from_json(const json& j, const json& head) {
    net::Architecture arch;
    arch.cell = net::parse_cell_kind(j.at("cell").get<std::string>());
    arch.layers = j.at("layers").get<int>();
    arch.hidden = j.at("hidden").get<int>();
    arch.embedding = j.at("embedding").get<int>();
    arch.tied = j.at("tied").get<bool>();
    arch.head = heads::parse_head_kind(head.at("kind").get<std::string>());
    arch.epsilon = head.value("epsilon", 0.0);
    return arch;
}

} // namespace

void save_checkpoint(const std::filesystem::path& path, const net::ModelParams& params,
                     const CheckpointMeta& meta) {
    const net::ParameterStore& store = params.store();

    json header;
    header["format_version"] = kCheckpointFormatVersion;
    header["vocabulary"] = {
        {"tokens", params.vocab().tokens()},
        {"eos_id", params.vocab().eos_id()},
        {"unk_id", params.vocab().unk_id() ? json(*params.vocab().unk_id()) : json(nullptr)},
    };
    header["architecture"] = architecture_to_json(params.arch());
    json head = {{"kind", heads::to_string(params.arch().head)}};
    if (params.arch().head != heads::HeadKind::va) head["epsilon"] = params.arch().epsilon;
    header["head"] = head;
    header["meta"] = {{"tokenizer", meta.tokenizer}, {"context_length", meta.context_length}};

    json manifest = json::array();
    std::uint64_t offset = 0;
    for (std::size_t i = 0; i < store.count(); ++i) {
        const Tensor& t = store.tensor(static_cast<int>(i));
        manifest.push_back({{"name", store.name(static_cast<int>(i))},
                            {"shape", {t.rows, t.cols}},
                            {"offset", offset}});
        offset += t.size() * sizeof(float);
    }
    header["tensors"] = manifest;

    std::string header_bytes = header.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
    out.write(kMagic, sizeof(kMagic));
    std::uint64_t header_len = header_bytes.size();
    out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out.write(header_bytes.data(), static_cast<std::streamsize>(header_bytes.size()));

    std::vector<float> buffer;
    for (std::size_t i = 0; i < store.count(); ++i) {
        const Tensor& t = store.tensor(static_cast<int>(i));
        buffer.resize(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) buffer[k] = static_cast<float>(t.data[k]);
        out.write(reinterpret_cast<const char*>(buffer.data()),
                  static_cast<std::streamsize>(buffer.size() * sizeof(float)));
    }
    if (!out) throw std::runtime_error("error writing checkpoint: " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path.string());
    std::uint64_t header_len = 0;
    in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
    if (!in) throw std::runtime_error("checkpoint: truncated header length");
    std::string header_bytes(header_len, '\0');
    in.read(header_bytes.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw std::runtime_error("checkpoint: truncated header");

    json header = json::parse(header_bytes);
    int version = header.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion)
        throw std::runtime_error("checkpoint: unsupported format version " +
                                 std::to_string(version));

    const json& v = header.at("vocabulary");
    std::optional<TokenId> unk_id;
    if (!v.at("unk_id").is_null()) unk_id = v.at("unk_id").get<TokenId>();
    Vocabulary vocab(v.at("tokens").get<std::vector<std::string>>(),
                     v.at("eos_id").get<TokenId>(), unk_id);

    net::Architecture arch =
        architecture_from_json(header.at("architecture"), header.at("head"));
    net::ModelParams params(std::move(vocab), arch);

    const json& manifest = header.at("tensors");
    const net::ParameterStore& store = params.store();
    if (manifest.size() != store.count())
        throw std::runtime_error("checkpoint: tensor manifest does not match architecture");

    std::uint64_t payload_base =
        sizeof(kMagic) + sizeof(header_len) + static_cast<std::uint64_t>(header_len);
    std::vector<float> buffer;
    for (std::size_t i = 0; i < store.count(); ++i) {
        const json& entry = manifest[i];
        Tensor& t = params.store().tensor(static_cast<int>(i));
        if (entry.at("name").get<std::string>() != store.name(static_cast<int>(i)))
            throw std::runtime_error("checkpoint: unexpected tensor '" +
                                     entry.at("name").get<std::string>() + "'");
        auto shape = entry.at("shape").get<std::vector<int>>();
        if (shape.size() != 2 || shape[0] != t.rows || shape[1] != t.cols)
            throw std::runtime_error("checkpoint: shape mismatch for tensor '" +
                                     store.name(static_cast<int>(i)) + "'");
        std::uint64_t offset = entry.at("offset").get<std::uint64_t>();
        in.seekg(static_cast<std::streamoff>(payload_base + offset));
        buffer.resize(t.size());
        in.read(reinterpret_cast<char*>(buffer.data()),
                static_cast<std::streamsize>(buffer.size() * sizeof(float)));
        if (!in)
            throw std::runtime_error("checkpoint: truncated payload for tensor '" +
                                     store.name(static_cast<int>(i)) + "' at byte offset " +
                                     std::to_string(payload_base + offset));
        for (std::size_t k = 0; k < t.size(); ++k) t.data[k] = static_cast<double>(buffer[k]);
    }

    CheckpointMeta meta;
    if (header.contains("meta")) {
        meta.tokenizer = header["meta"].value("tokenizer", std::string("char"));
        meta.context_length = header["meta"].value("context_length", 10);
    }
    return LoadedCheckpoint{std::move(params), meta};
}

} // namespace termlab::io
