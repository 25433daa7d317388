#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "hqmsa/error.hpp"

namespace hqmsa {

struct FastaRecord {
    std::string name;
    std::string sequence;
};

/// Minimal FASTA: '>' header lines followed by residue lines. Blank lines and
/// surrounding whitespace are ignored. Residue validation is left to
/// SequenceSet.
[[nodiscard]] inline std::vector<FastaRecord> read_fasta(std::istream& in) {
    std::vector<FastaRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        if (line.front() == '>') {
            records.push_back({line.substr(1), {}});
            continue;
        }
        if (records.empty()) {
            throw InputError("FASTA line " + std::to_string(line_no) +
                             ": sequence data before the first header");
        }
        records.back().sequence += line;
    }
    for (const auto& r : records) {
        if (r.sequence.empty()) throw InputError("FASTA record '" + r.name + "' has no residues");
    }
    return records;
}

[[nodiscard]] inline std::vector<FastaRecord> read_fasta(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open FASTA file " + path.string());
    return read_fasta(in);
}

[[nodiscard]] inline std::vector<FastaRecord> parse_fasta(const std::string& text) {
    std::istringstream in(text);
    return read_fasta(in);
}

}  // namespace hqmsa
