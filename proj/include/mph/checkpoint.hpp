#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mph/mlp.hpp"
#include "mph/tensor.hpp"

namespace mph {

// Versioned binary dump of named tensors (shapes + flat f64 arrays).
// Round-trips are bit-exact; entry order is preserved.
class Checkpoint {
public:
    void add(const std::string& name, const Tensor& tensor);
    void add_net(const std::string& prefix, const MLPParams& net);

    bool has(const std::string& name) const;
    const Tensor& get(const std::string& name) const;
    MLPParams get_net(const std::string& prefix) const;

    size_t size() const { return entries_.size(); }
    const std::vector<std::pair<std::string, Tensor>>& entries() const {
        return entries_;
    }

    void save(const std::filesystem::path& path) const;
    static Checkpoint load(const std::filesystem::path& path);

private:
    std::vector<std::pair<std::string, Tensor>> entries_;
};

}  // namespace mph
