#pragma once

// Built-in instances. "fig3a" and "fig3c" are the two worked alignment tasks
// (with and without a reference sequence). The qubit-count instances
// q4/q8/q12/q16 are small stand-ins of our own: the original tasks at those
// sizes are not published as sequences.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hqmsa/align_core.hpp"
#include "hqmsa/error.hpp"

namespace hqmsa {

struct NamedInstance {
    std::string name;
    std::vector<std::string> sequences;
    std::size_t columns = 0;
    std::optional<std::size_t> reference;
    std::string note;

    [[nodiscard]] SequenceSet to_set() const { return SequenceSet(sequences, columns, reference); }
    [[nodiscard]] std::size_t qubits() const noexcept { return sequences.size() * columns; }
};

[[nodiscard]] inline const std::vector<NamedInstance>& builtin_instances() {
    static const std::vector<NamedInstance> all = {
        {"fig3a", {"AAKGT", "AT", "AKG", "KT"}, 5, 0, "reference AAKGT against three fragments; optimum -10"},
        {"fig3c", {"ACGTCAT", "ACGGTTAT"}, 10, std::nullopt, "two fragments of a common ancestor, L=10"},
        {"q4", {"AG", "AG"}, 2, std::nullopt, "stand-in, 4 qubits"},
        {"q8", {"AKGT", "AGT"}, 4, std::nullopt, "stand-in, 8 qubits"},
        {"q12", {"AKGT", "AGT", "KT"}, 4, std::nullopt, "stand-in, 12 qubits"},
        {"q16", {"AKGT", "AGT", "KGT", "AT"}, 4, std::nullopt, "stand-in, 16 qubits"},
    };
    return all;
}

[[nodiscard]] inline const NamedInstance& find_instance(std::string_view name) {
    for (const auto& inst : builtin_instances()) {
        if (inst.name == name) return inst;
    }
    throw InputError("unknown instance '" + std::string(name) + "'");
}

}  // namespace hqmsa
