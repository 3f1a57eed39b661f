#include "mph/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace mph {

namespace {

constexpr char kMagic[8] = {'M', 'P', 'H', 'C', 'K', 'P', 'T', '\x01'};

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw UsageError("checkpoint: truncated file");
    return v;
}

}  // namespace

void Checkpoint::add(const std::string& name, const Tensor& tensor) {
    for (const auto& [existing, _] : entries_) {
        if (existing == name) throw UsageError("checkpoint: duplicate entry " + name);
    }
    entries_.emplace_back(name, tensor);
}

void Checkpoint::add_net(const std::string& prefix, const MLPParams& net) {
    for (size_t l = 0; l < net.layers.size(); ++l) {
        add(prefix + ".w" + std::to_string(l), net.layers[l].weight);
        add(prefix + ".b" + std::to_string(l), net.layers[l].bias);
    }
}

bool Checkpoint::has(const std::string& name) const {
    for (const auto& [existing, _] : entries_) {
        if (existing == name) return true;
    }
    return false;
}

const Tensor& Checkpoint::get(const std::string& name) const {
    for (const auto& [existing, tensor] : entries_) {
        if (existing == name) return tensor;
    }
    throw UsageError("checkpoint: missing entry " + name);
}

MLPParams Checkpoint::get_net(const std::string& prefix) const {
    MLPParams net;
    for (size_t l = 0;; ++l) {
        const std::string w_name = prefix + ".w" + std::to_string(l);
        if (!has(w_name)) break;
        DenseLayer layer;
        layer.weight = get(w_name);
        layer.bias = get(prefix + ".b" + std::to_string(l));
        net.layers.push_back(std::move(layer));
    }
    if (net.layers.empty()) throw UsageError("checkpoint: no net under " + prefix);
    return net;
}

void Checkpoint::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("checkpoint: cannot open " + path.string());
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, static_cast<std::uint32_t>(entries_.size()));
    for (const auto& [name, tensor] : entries_) {
        write_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u32(out, static_cast<std::uint32_t>(tensor.shape.size()));
        for (int d : tensor.shape) write_u32(out, static_cast<std::uint32_t>(d));
        out.write(reinterpret_cast<const char*>(tensor.data.data()),
                  static_cast<std::streamsize>(tensor.data.size() * sizeof(double)));
    }
    if (!out) throw UsageError("checkpoint: write failed for " + path.string());
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("checkpoint: cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw UsageError("checkpoint: bad magic in " + path.string());
    }
    Checkpoint ckpt;
    const std::uint32_t count = read_u32(in);
    for (std::uint32_t e = 0; e < count; ++e) {
        const std::uint32_t name_len = read_u32(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const std::uint32_t ndim = read_u32(in);
        std::vector<int> shape(ndim);
        size_t numel = 1;
        for (std::uint32_t d = 0; d < ndim; ++d) {
            shape[d] = static_cast<int>(read_u32(in));
            numel *= static_cast<size_t>(shape[d]);
        }
        std::vector<double> data(numel);
        in.read(reinterpret_cast<char*>(data.data()),
                static_cast<std::streamsize>(numel * sizeof(double)));
        if (!in) throw UsageError("checkpoint: truncated tensor data");
        ckpt.entries_.emplace_back(std::move(name),
                                   Tensor(std::move(shape), std::move(data)));
    }
    return ckpt;
}

}  // namespace mph
