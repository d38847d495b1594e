#include "ctrltab/nn/checkpoint.hpp"

#include "ctrltab/util/error.hpp"
#include "ctrltab/util/io.hpp"

#include <bit>
#include <cstring>

namespace ctrltab::nn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

nlohmann::json to_json(const ModelConfig& c) {
    return {{"d_model", c.d_model},         {"n_heads", c.n_heads},
            {"n_layers_enc", c.n_layers_enc}, {"n_layers_dec", c.n_layers_dec},
            {"max_input_len", c.max_input_len}, {"max_output_len", c.max_output_len},
            {"vocab_size", c.vocab_size},     {"d_ff", c.d_ff}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.d_model = j.at("d_model").get<std::size_t>();
    c.n_heads = j.at("n_heads").get<std::size_t>();
    c.n_layers_enc = j.at("n_layers_enc").get<std::size_t>();
    c.n_layers_dec = j.at("n_layers_dec").get<std::size_t>();
    c.max_input_len = j.at("max_input_len").get<std::size_t>();
    c.max_output_len = j.at("max_output_len").get<std::size_t>();
    c.vocab_size = j.at("vocab_size").get<std::size_t>();
    c.d_ff = j.value("d_ff", std::size_t{0});
    return c;
}

nlohmann::json to_json(const TrainConfig& c) {
    return {{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
            {"epochs", c.epochs},               {"grad_clip_norm", c.grad_clip_norm},
            {"seed", c.seed},                   {"noise_ratio", c.noise_ratio}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    c.grad_clip_norm = j.value("grad_clip_norm", c.grad_clip_norm);
    c.seed = j.value("seed", c.seed);
    c.noise_ratio = j.value("noise_ratio", c.noise_ratio);
    return c;
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
    nlohmann::json header;
    header["model_kind"] = ckpt.model_kind;
    header["config"] = to_json(ckpt.config);
    header["seed"] = ckpt.params.seed();
    header["vocab"] = ckpt.vocab.tokens();
    header["extra"] = ckpt.extra;
    nlohmann::json table = nlohmann::json::array();
    std::size_t offset = 0;
    for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
        const auto& t = ckpt.params.at(i);
        table.push_back({{"name", ckpt.params.name(i)}, {"shape", t.shape}, {"offset", offset}});
        offset += t.numel() * sizeof(double);
    }
    header["tensors"] = std::move(table);
    const std::string json = header.dump();

    std::string out;
    out.reserve(kCheckpointMagic.size() + 8 + json.size() + offset);
    out += kCheckpointMagic;
    const std::uint64_t len = json.size();
    char len_bytes[8];
    std::memcpy(len_bytes, &len, 8);
    out.append(len_bytes, 8);
    out += json;
    for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
        const auto& d = ckpt.params.at(i).data;
        out.append(reinterpret_cast<const char*>(d.data()), d.size() * sizeof(double));
    }
    return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
    if (bytes.size() < kCheckpointMagic.size() + 8 ||
        bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic)
        throw ParseError("checkpoint: bad magic", 0);
    std::uint64_t len = 0;
    std::memcpy(&len, bytes.data() + kCheckpointMagic.size(), 8);
    const std::size_t header_start = kCheckpointMagic.size() + 8;
    if (len > bytes.size() - header_start) throw ParseError("checkpoint: truncated header", header_start);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(bytes.substr(header_start, len));
    } catch (const std::exception& e) {
        throw ParseError(std::string("checkpoint: bad header: ") + e.what(), header_start);
    }
    const std::size_t data_start = header_start + len;

    Checkpoint ckpt;
    try {
        ckpt.model_kind = header.at("model_kind").get<std::string>();
        ckpt.config = model_config_from_json(header.at("config"));
        ckpt.vocab = Vocabulary::from_tokens(header.at("vocab").get<std::vector<std::string>>());
        ckpt.extra = header.value("extra", nlohmann::json::object());
        ckpt.params = ParameterSet(header.at("seed").get<std::uint64_t>());
        for (const auto& entry : header.at("tensors")) {
            Tensor t(entry.at("shape").get<std::vector<std::size_t>>());
            const std::size_t off = entry.at("offset").get<std::size_t>();
            const std::size_t nbytes = t.numel() * sizeof(double);
            if (off > bytes.size() - data_start || nbytes > bytes.size() - data_start - off)
                throw ParseError("checkpoint: tensor '" + entry.at("name").get<std::string>() +
                                     "' extends past end of file",
                                 data_start + off);
            std::memcpy(t.data.data(), bytes.data() + data_start + off, nbytes);
            ckpt.params.add_tensor(entry.at("name").get<std::string>(), std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("checkpoint: bad header: ") + e.what(), header_start);
    }
    if (ckpt.params.contains("embed") && ckpt.params.at("embed").rows() != ckpt.vocab.size())
        throw ValidationError("checkpoint: embedding rows differ from vocabulary size");
    if (ckpt.config.vocab_size != ckpt.vocab.size())
        throw ValidationError("checkpoint: config vocab_size differs from stored vocabulary");
    return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    util::write_file_atomic(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path, std::string_view expected_kind) {
    Checkpoint ckpt = deserialize_checkpoint(util::read_file(path));
    if (!expected_kind.empty() && ckpt.model_kind != expected_kind)
        throw ValidationError("checkpoint '" + path + "' holds a " + ckpt.model_kind +
                              " model, expected " + std::string(expected_kind));
    return ckpt;
}

} // namespace ctrltab::nn
